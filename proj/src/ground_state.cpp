#include "harness/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dense.hpp"
#include "harness/error.hpp"
#include "harness/parallel.hpp"
#include "harness/rng.hpp"

namespace harness {

namespace {

constexpr const char* kModule = "ground_state";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, kModule, msg); }

template <class F>
auto rethrow_here(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& err) {
    if (err.module() == kModule) throw;
    throw Error(err.code(), kModule, err.detail());
  }
}

struct Inputs {
  std::vector<double> d;
  std::vector<double> y;
};

Inputs gather(const Geometry& geo, const HeightField& d, const HeightField& y) {
  return rethrow_here([&] { return Inputs{geo.box_values(d, "d"), geo.shell_values(y, "y")}; });
}

void check_tol(double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");
}

}  // namespace

std::string_view method_name(GroundStateMethod m) noexcept {
  switch (m) {
    case GroundStateMethod::jacobi: return "jacobi";
    case GroundStateMethod::neumann: return "neumann";
    case GroundStateMethod::exact_solve: return "exact_solve";
    case GroundStateMethod::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

double KernelRow::total_mass() const noexcept {
  double s = truncation_mass;
  for (const auto& [site, p] : killed) s += p;
  for (const auto& [site, p] : absorbed) s += p;
  return s;
}

double ground_state_residual(const Geometry& geo, std::span<const double> m, std::span<const double> y,
                             std::span<const double> d, const ModelParams& params) {
  double worst = 0.0;
  for (std::size_t i = 0; i < geo.size(); ++i) {
    double inside = 0.0, outside = 0.0;
    for (const NeighborRef& r : geo.neighbors(i)) {
      if (r.in_box)
        inside += r.weight * m[r.index];
      else
        outside += r.weight * y[r.index];
    }
    const double res = m[i] - params.alpha * inside - params.alpha * outside - params.h() * d[i];
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

void jacobi_sweep(const Geometry& geo, std::span<const double> m, std::span<const double> y,
                  std::span<const double> d, const ModelParams& params, std::span<double> out) {
  for (std::size_t i = 0; i < geo.size(); ++i) {
    double acc = 0.0;
    for (const NeighborRef& r : geo.neighbors(i)) acc += r.weight * (r.in_box ? m[r.index] : y[r.index]);
    out[i] = params.alpha * acc + params.h() * d[i];
  }
}

GroundStateResult solve_jacobi(const Box& box, const HeightField& d, const HeightField& y,
                               const ModelParams& params, const Kernel& kernel, double tol, int max_iter,
                               const std::optional<HeightField>& initial) {
  check_tol(tol);
  const Geometry geo(box, kernel);
  const Inputs in = gather(geo, d, y);

  std::vector<double> m(geo.size(), 0.0);
  if (initial) m = rethrow_here([&] { return geo.box_values(*initial, "initial"); });
  std::vector<double> next(geo.size());

  const double stop = tol * params.h() / params.alpha;
  for (int it = 1; it <= max_iter; ++it) {
    jacobi_sweep(geo, m, in.y, in.d, params, next);
    double change = 0.0;
    for (std::size_t i = 0; i < geo.size(); ++i) change = std::max(change, std::abs(next[i] - m[i]));
    m.swap(next);
    if (change <= stop) {
      GroundStateResult out;
      out.residual_inf = ground_state_residual(geo, m, in.y, in.d, params);
      out.m = geo.box_field(m);
      out.iterations = it;
      out.method = GroundStateMethod::jacobi;
      return out;
    }
  }
  fail(ErrorCode::NoConvergence, "no convergence to tol " + std::to_string(tol) + " within " +
                                     std::to_string(max_iter) + " sweeps");
}

GroundStateResult solve_exact(const Box& box, const HeightField& d, const HeightField& y,
                              const ModelParams& params, const Kernel& kernel) {
  const Geometry geo(box, kernel);
  detail::check_dense_size(geo, kModule);
  const Inputs in = gather(geo, d, y);
  const Eigen::MatrixXd a = detail::interaction_matrix(geo, params.alpha);
  const Eigen::VectorXd b = detail::source_vector(geo, in.y, in.d, params.alpha);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd m = lu.solve(b);
  // One step of iterative refinement.
  m += lu.solve(b - a * m);

  GroundStateResult out;
  out.residual_inf = ground_state_residual(geo, detail::as_span(m), in.y, in.d, params);
  out.m = geo.box_field(detail::as_span(m));
  out.iterations = 1;
  out.method = GroundStateMethod::exact_solve;
  return out;
}

KernelRow kernel_row_exact(const Box& box, const ModelParams& params, const Kernel& kernel, const Site& i) {
  const Geometry geo(box, kernel);
  detail::check_dense_size(geo, kModule);
  const auto start = box.index_of(i);
  if (!start) fail(ErrorCode::SiteOutsideBox, "site " + i.to_string() + " is not in the box");

  // Row `start` of (I - alpha P)^-1: expected visits to each box site.
  const Eigen::MatrixXd a = detail::interaction_matrix(geo, params.alpha);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(a.rows());
  e(static_cast<Eigen::Index>(*start)) = 1.0;
  const Eigen::MatrixXd at = a.transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(at);
  Eigen::VectorXd visits = lu.solve(e);
  visits += lu.solve(e - at * visits);

  KernelRow row;
  row.start = i;
  row.method = GroundStateMethod::exact_solve;
  std::vector<double> absorbed(geo.shell().size(), 0.0);
  for (std::size_t j = 0; j < geo.size(); ++j) {
    const double v = visits(static_cast<Eigen::Index>(j));
    const double k = params.h() * v;
    if (k != 0.0) row.killed[geo.sites()[j]] = k;
    for (const NeighborRef& r : geo.neighbors(j))
      if (!r.in_box) absorbed[r.index] += params.alpha * r.weight * v;
  }
  for (std::size_t k = 0; k < absorbed.size(); ++k)
    if (absorbed[k] != 0.0) row.absorbed[geo.shell()[k]] = absorbed[k];
  return row;
}

KernelRow kernel_row_mc(const Box& box, const ModelParams& params, const Kernel& kernel, const Site& i,
                        std::uint64_t n_walks, std::uint64_t seed, int workers) {
  if (n_walks < 1) fail(ErrorCode::InvalidArgument, "n_walks must be >= 1");
  const Geometry geo(box, kernel);
  const auto start = box.index_of(i);
  if (!start) fail(ErrorCode::SiteOutsideBox, "site " + i.to_string() + " is not in the box");

  std::vector<double> cumulative;
  double acc = 0.0;
  for (const Jump& j : kernel.jumps()) cumulative.push_back(acc += j.weight);

  // Per-chunk tallies; counts add exactly so the merge order is irrelevant.
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::uint64_t>(n_walks, 64));
  std::vector<std::vector<std::uint64_t>> killed(chunks, std::vector<std::uint64_t>(geo.size(), 0));
  std::vector<std::vector<std::uint64_t>> absorbed(chunks, std::vector<std::uint64_t>(geo.shell().size(), 0));

  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::uint64_t lo = n_walks * c / chunks, hi = n_walks * (c + 1) / chunks;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::uint64_t w = lo; w < hi; ++w) {
      Engine eng = make_engine(seed, w);
      std::size_t at = *start;
      for (std::uint64_t step = 0;; ++step) {
        if (step >= kWalkStepCap)
          fail(ErrorCode::WalkCapExceeded, "walk " + std::to_string(w) + " exceeded the step cap");
        if (unif(eng) < params.h()) {
          ++killed[c][at];
          break;
        }
        const double u = unif(eng) * acc;
        const auto pick = static_cast<std::size_t>(
            std::min<std::ptrdiff_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin(),
                                     static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
        const NeighborRef& r = geo.neighbors(at)[pick];
        if (!r.in_box) {
          ++absorbed[c][r.index];
          break;
        }
        at = r.index;
      }
    }
  });

  KernelRow row;
  row.start = i;
  row.method = GroundStateMethod::monte_carlo;
  row.n_walks = n_walks;
  const double n = static_cast<double>(n_walks);
  for (std::size_t j = 0; j < geo.size(); ++j) {
    std::uint64_t total = 0;
    for (const auto& t : killed) total += t[j];
    if (total) row.killed[geo.sites()[j]] = static_cast<double>(total) / n;
  }
  for (std::size_t k = 0; k < geo.shell().size(); ++k) {
    std::uint64_t total = 0;
    for (const auto& t : absorbed) total += t[k];
    if (total) row.absorbed[geo.shell()[k]] = static_cast<double>(total) / n;
  }
  return row;
}

double recompose(const KernelRow& row, const HeightField& d, const HeightField& y) {
  return rethrow_here([&] {
    double v = 0.0;
    for (const auto& [site, p] : row.killed) v += p * d.at(site);
    for (const auto& [site, p] : row.absorbed) v += p * y.at(site);
    return v;
  });
}

InfiniteGroundState ground_state_infinite(const HeightField& d, const ModelParams& params,
                                          const Kernel& kernel, double tol) {
  check_tol(tol);
  if (d.empty()) fail(ErrorCode::InvalidArgument, "data field is empty");
  const int dim = kernel.dim();

  // Bounding box of the data support (the whole domain if d vanishes).
  Site lo, hi;
  bool any = false;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d.values()[k] == 0.0) continue;
    const Site& s = d.sites()[k];
    if (s.dim() != dim) fail(ErrorCode::InvalidArgument, "data dimension does not match the kernel");
    if (!any) {
      lo = hi = s;
      any = true;
    }
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], s[a]);
      hi[a] = std::max(hi[a], s[a]);
    }
  }
  if (!any) {
    InfiniteGroundState zero;
    zero.m = d.scaled(0.0);
    zero.terms = 1;
    return zero;
  }

  const double l1 = d.l1_norm();
  int n_max = 0;
  while (std::pow(params.alpha, n_max + 1) * l1 / params.h() > tol) ++n_max;

  const Box region = Box(lo, hi).grown(n_max * kernel.reach());
  constexpr std::size_t kRegionLimit = 50'000'000;
  if (region.size() > kRegionLimit)
    fail(ErrorCode::SizeLimit, "Neumann region of " + std::to_string(region.size()) + " sites is too large");

  const Geometry geo(region, kernel);
  std::vector<double> term(geo.size(), 0.0);
  for (std::size_t k = 0; k < d.size(); ++k)
    if (auto idx = region.index_of(d.sites()[k])) term[*idx] = d.values()[k];
  std::vector<double> m(geo.size(), 0.0), next(geo.size(), 0.0);

  for (int n = 0; n <= n_max; ++n) {
    for (std::size_t i = 0; i < geo.size(); ++i) m[i] += params.h() * term[i];
    if (n == n_max) break;
    // term <- alpha P term; the support grows by one reach per step and never
    // leaves the region before n_max, so shell neighbors contribute zero.
    for (std::size_t i = 0; i < geo.size(); ++i) {
      double acc = 0.0;
      for (const NeighborRef& r : geo.neighbors(i))
        if (r.in_box) acc += r.weight * term[r.index];
      next[i] = params.alpha * acc;
    }
    term.swap(next);
  }

  InfiniteGroundState out;
  out.m = geo.box_field(m);
  out.terms = n_max + 1;
  out.tail_bound = std::pow(params.alpha, n_max + 1) * l1 / params.h();
  return out;
}

DecayReport decay_bound_check(const KernelRow& row, const ModelParams& params, const Kernel& kernel) {
  const int reach = std::max(1, kernel.reach());
  DecayReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  rep.worst_site = row.start;
  auto visit = [&](const Site& j, double k) {
    const int dist = sup_distance(row.start, j);
    const double bound = std::pow(params.alpha, dist / reach);
    const double slack = bound - k;
    if (slack < -1e-12)
      fail(ErrorCode::BoundViolated, "K(" + row.start.to_string() + ", " + j.to_string() + ") = " +
                                         std::to_string(k) + " exceeds " + std::to_string(bound));
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.worst_site = j;
    }
    ++rep.entries;
  };
  for (const auto& [j, k] : row.killed) visit(j, k);
  for (const auto& [j, k] : row.absorbed) visit(j, k);
  return rep;
}

}  // namespace harness
