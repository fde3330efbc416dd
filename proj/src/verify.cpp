#include "harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "harness/dual.hpp"
#include "harness/dynamics.hpp"
#include "harness/error.hpp"
#include "harness/gibbs.hpp"
#include "harness/ground_state.hpp"
#include "harness/hamiltonian.hpp"
#include "harness/rng.hpp"

namespace harness {

namespace {

constexpr const char* kModule = "verify";
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, kModule, msg); }

struct Dense {
  Geometry geo;
  std::vector<double> y;
  std::vector<double> d;
};

Dense densify(const Box& box, const Kernel& kernel, const HeightField& y, const HeightField& d) {
  Geometry geo(box, kernel);
  auto ys = geo.shell_values(y, "y");
  auto ds = geo.box_values(d, "d");
  return {std::move(geo), std::move(ys), std::move(ds)};
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_and_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

// Excess of `observed` over `bound` in standard errors; with a zero standard
// error any excess beyond roundoff counts as infinite.
double excess_z(double observed, double bound, double se) {
  if (se > 0.0) return (observed - bound) / se;
  return observed - bound > 1e-12 ? kInf : 0.0;
}

bool boundary_adjacent(const Geometry& geo, std::size_t i) {
  for (const NeighborRef& r : geo.neighbors(i))
    if (!r.in_box) return true;
  return false;
}

}  // namespace

CheckReport make_report(std::string name, double statistic, double threshold, nlohmann::ordered_json details) {
  CheckReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.passed = statistic <= threshold;
  r.details = details.is_null() ? nlohmann::ordered_json::object() : std::move(details);
  return r;
}

CheckReport check_stationary_law(const Box& box, const HeightField& y, const HeightField& d,
                                 const ModelParams& params, const Kernel& kernel, std::size_t n_samples,
                                 std::uint64_t seed, const StationaryOptions& opts) {
  if (n_samples < 1000) fail(ErrorCode::InvalidArgument, "stationary-law check needs at least 1000 samples");
  const ModelParams oracle{params.alpha, opts.oracle_sigma2.value_or(params.sigma2)};
  const GaussianSpec spec = build_gaussian(box, y, d, oracle, kernel);
  const Eigen::MatrixXd x = sample_stationary(box, y, d, params, kernel, opts.burn_in, n_samples, opts.thin, seed);

  const double n = static_cast<double>(n_samples);
  const Eigen::RowVectorXd mean_hat = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean_hat;
  const Eigen::MatrixXd cov_hat = centered.transpose() * centered / (n - 1.0);
  const Eigen::MatrixXd& cov = spec.covariance();

  double max_mean_z = 0.0, max_cov_z = 0.0;
  std::size_t comparisons = 0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    max_mean_z = std::max(max_mean_z, std::abs(mean_hat(i) - spec.mean()(i)) / std::sqrt(cov(i, i) / n));
    ++comparisons;
    for (Eigen::Index j = i; j < cov.cols(); ++j) {
      const double se = std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / n);
      max_cov_z = std::max(max_cov_z, std::abs(cov_hat(i, j) - cov(i, j)) / se);
      ++comparisons;
    }
  }
  return make_report("stationary-law", std::max(max_mean_z, max_cov_z), kZThreshold,
                     {{"n_samples", n_samples},
                      {"seed", seed},
                      {"burn_in", opts.burn_in},
                      {"thin", opts.thin},
                      {"model_sigma2", params.sigma2},
                      {"oracle_sigma2", oracle.sigma2},
                      {"max_mean_z", max_mean_z},
                      {"max_cov_z", max_cov_z},
                      {"comparisons", comparisons}});
}

CheckReport check_ergodic_forgetting(const Box& box, const HeightField& y, const HeightField& d,
                                     const ModelParams& params, const Kernel& kernel, const HeightField& z,
                                     const HeightField& z_prime, const std::vector<double>& u_grid,
                                     std::size_t n_seeds, std::uint64_t seed) {
  if (n_seeds < 2) fail(ErrorCode::InvalidArgument, "need at least two seeds");
  const Dense dense = densify(box, kernel, y, d);
  const auto z0 = dense.geo.box_values(z, "z");
  const auto z1 = dense.geo.box_values(z_prime, "z_prime");
  double gap = 0.0;
  for (std::size_t i = 0; i < z0.size(); ++i) gap = std::max(gap, std::abs(z0[i] - z1[i]));
  const std::size_t center = *box.index_of(box.center());

  double worst = -kInf;
  nlohmann::ordered_json per_u = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < u_grid.size(); ++k) {
    const double u = u_grid[k];
    if (u < 0.0) fail(ErrorCode::InvalidArgument, "u must be >= 0");
    std::vector<double> diffs(n_seeds);
    for (std::size_t s = 0; s < n_seeds; ++s) {
      EpochList epochs;
      if (u > 0.0) epochs = generate_epochs(box, 0.0, u, params, derive_seed(derive_seed(seed, k), s));
      auto a = z0, b = z1;
      replay(dense.geo, a, dense.y, dense.d, params, epochs);
      replay(dense.geo, b, dense.y, dense.d, params, epochs);
      diffs[s] = std::abs(a[center] - b[center]);
    }
    const MeanSe ms = mean_and_se(diffs);
    const double bound = gap * std::exp(-params.h() * u);
    const double z_u = excess_z(ms.mean, bound, ms.se);
    worst = std::max(worst, z_u);
    per_u.push_back({{"u", u}, {"observed", ms.mean}, {"se", ms.se}, {"bound", bound}, {"z", z_u}});
  }
  return make_report("ergodic-forgetting", worst, kZThreshold,
                     {{"n_seeds", n_seeds}, {"seed", seed}, {"initial_gap", gap}, {"grid", per_u}});
}

CheckReport check_variance_bound(const Box& box, const ModelParams& params, const Kernel& kernel,
                                 const std::vector<double>& windows, std::uint64_t seed) {
  const Geometry geo(box, kernel);
  const std::size_t center = *box.index_of(box.center());
  double worst = 0.0;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    EpochList epochs;
    if (windows[k] > 0.0) epochs = generate_epochs(box, 0.0, windows[k], params, derive_seed(seed, k));
    const WeightTable w = backward_weights(geo, epochs, center, params);
    if (!w.absorbed.empty())
      fail(ErrorCode::AbsorptionOccurred, "window " + std::to_string(windows[k]) + " reached the box boundary");
    worst = std::max(worst, noise_variance_accumulator(w, params));
  }
  const double bound = params.sigma2 / params.h();
  return make_report("variance-bound", worst, bound + 1e-9,
                     {{"windows", windows.size()}, {"seed", seed}, {"bound", bound}, {"alpha", params.alpha}});
}

CheckReport check_survival_mass(const Box& box, const ModelParams& params, const Kernel& kernel, double u,
                                std::size_t n_seeds, std::uint64_t seed) {
  if (n_seeds < 2) fail(ErrorCode::InvalidArgument, "need at least two seeds");
  const Site center = box.center();
  std::vector<double> mass(n_seeds);
  for (std::size_t s = 0; s < n_seeds; ++s) {
    EpochList epochs;
    if (u > 0.0) epochs = generate_epochs(box, 0.0, u, params, derive_seed(seed, s));
    mass[s] = survival_mass(epochs, box, center, params, kernel);
  }
  const MeanSe ms = mean_and_se(mass);
  const double expected = std::exp(-params.h() * u);
  const double z = ms.se > 0.0 ? std::abs(ms.mean - expected) / ms.se : (std::abs(ms.mean - expected) > 1e-12 ? kInf : 0.0);
  return make_report("survival-mass", z, kZThreshold,
                     {{"u", u}, {"n_seeds", n_seeds}, {"seed", seed}, {"mean", ms.mean}, {"se", ms.se},
                      {"expected", expected}});
}

ThermoLimitResult check_thermo_limit(const HeightField& d, const std::vector<double>& boundary_values,
                                     const ModelParams& params, const Kernel& kernel,
                                     const std::vector<int>& half_widths, double tol) {
  if (half_widths.empty() || boundary_values.empty())
    fail(ErrorCode::InvalidArgument, "need at least one box and one boundary value");
  const int dim = kernel.dim();
  const int reach = std::max(1, kernel.reach());
  const Site origin = Site::zero(dim);
  const auto infinite = ground_state_infinite(d, params, kernel, tol);
  const double m_inf = infinite.m.value_or(origin, 0.0);

  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  double limit_stat = 0.0, washout_stat = 0.0, limit_threshold = 0.0;
  for (double yv : boundary_values) {
    nlohmann::ordered_json row = {{"y", yv}, {"boxes", nlohmann::ordered_json::array()}};
    double last = 0.0;
    for (int hw : half_widths) {
      const Geometry geo(Box::centered(dim, hw), kernel);
      std::vector<double> ds(geo.size());
      for (std::size_t i = 0; i < geo.size(); ++i) ds[i] = d.value_or(geo.sites()[i], 0.0);
      const std::vector<double> ys(geo.shell().size(), yv), zeros(geo.shell().size(), 0.0);
      const std::size_t c = *geo.box().index_of(origin);
      const double value = build_gaussian(geo, ys, ds, params).mean()(static_cast<Eigen::Index>(c));
      const double m_box = build_gaussian(geo, zeros, ds, params).mean()(static_cast<Eigen::Index>(c));
      const double r_box = value - m_box;
      const int dist = geo.box().distance_to_outside(origin);
      const double decay = std::pow(params.alpha, dist / reach);
      if (yv != 0.0) washout_stat = std::max(washout_stat, std::abs(r_box) / (decay * std::abs(yv)));
      row["boxes"].push_back({{"half_width", hw}, {"value", value}, {"m_box", m_box}, {"r_box", r_box},
                              {"decay_bound", decay * std::abs(yv)}});
      last = value;
      if (hw == half_widths.back())
        limit_threshold = std::max(limit_threshold, tol + decay * (std::abs(yv) + d.l1_norm()));
    }
    limit_stat = std::max(limit_stat, std::abs(last - m_inf));
    table.push_back(row);
  }
  nlohmann::ordered_json details = {{"m_infinite", m_inf}, {"neumann_terms", infinite.terms}, {"tol", tol},
                                    {"table", table}};
  return {make_report("thermo-limit", limit_stat, limit_threshold, details),
          make_report("boundary-washout", washout_stat, 1.0, {{"table", table}})};
}

CheckReport check_beta_scaling(const Box& box, const HeightField& y, const HeightField& d, double alpha,
                               const Kernel& kernel, double beta) {
  if (!(beta > 0.0)) fail(ErrorCode::InvalidArgument, "beta must be positive");
  const GaussianSpec unit = build_gaussian(box, y, d, ModelParams::make(alpha, 0.5), kernel);
  const GaussianSpec scaled = build_gaussian(box, y, d, ModelParams::from_beta(alpha, beta), kernel);
  const double mean_violation = (unit.mean() - scaled.mean()).cwiseAbs().maxCoeff();
  double cov_violation = 0.0;
  const Eigen::MatrixXd& c1 = unit.covariance();
  const Eigen::MatrixXd& cb = scaled.covariance();
  for (Eigen::Index i = 0; i < c1.rows(); ++i)
    for (Eigen::Index j = 0; j < c1.cols(); ++j)
      if (c1(i, j) != 0.0) cov_violation = std::max(cov_violation, std::abs(c1(i, j) - beta * cb(i, j)) / std::abs(c1(i, j)));
  return make_report("beta-scaling", std::max(mean_violation, cov_violation), 1e-10,
                     {{"beta", beta}, {"mean_violation", mean_violation}, {"cov_relative_violation", cov_violation}});
}

CheckReport check_duality(const Box& box, const HeightField& z_init, const HeightField& y, const HeightField& d,
                          const ModelParams& params, const Kernel& kernel, double window, std::uint64_t seed,
                          int workers) {
  const Dense dense = densify(box, kernel, y, d);
  auto z = dense.geo.box_values(z_init, "z_init");
  const auto z0 = z;
  const EpochList epochs = generate_epochs(box, 0.0, window, params, seed);
  replay(dense.geo, z, dense.y, dense.d, params, epochs);
  const auto rec = reconstruct_all(dense.geo, epochs, z0, dense.y, dense.d, params, workers);
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) worst = std::max(worst, std::abs(z[i] - rec[i].value));
  return make_report("duality", worst, 1e-9,
                     {{"sites", z.size()}, {"epochs", epochs.epochs.size()}, {"window", window}, {"seed", seed},
                      {"alpha", params.alpha}});
}

CheckReport check_detailed_balance(const Box& box, const HeightField& y, const HeightField& d,
                                   const ModelParams& params, const Kernel& kernel, std::size_t n_states,
                                   std::uint64_t seed) {
  const Dense dense = densify(box, kernel, y, d);
  const GaussianSpec spec = build_gaussian(dense.geo, dense.y, dense.d, params);
  const std::size_t n = dense.geo.size();
  Engine eng = make_engine(seed, 0);
  std::uniform_real_distribution<double> offset(-3.0, 3.0);
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * params.sigma2);
  auto log_q = [&](double to, double mean) { return -(to - mean) * (to - mean) / (2.0 * params.sigma2) + log_norm; };

  double worst_balance = 0.0, worst_energy = 0.0;
  std::size_t interior = 0, boundary = 0;
  for (std::size_t s = 0; s < n_states; ++s) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = spec.mean()(static_cast<Eigen::Index>(i)) + offset(eng);
    const std::size_t k = s % n;
    (boundary_adjacent(dense.geo, k) ? boundary : interior) += 1;
    auto x2 = x;
    x2[k] += offset(eng);
    const double mean = local_mean(dense.geo, k, x, dense.y, dense.d[k], params);
    const double lhs = spec.log_density(x) + log_q(x2[k], mean);
    const double rhs = spec.log_density(x2) + log_q(x[k], mean);
    worst_balance = std::max(worst_balance, std::abs(lhs - rhs));
    const double dlog = spec.log_density(x) - spec.log_density(x2);
    const double dh = energy(dense.geo, x, dense.y, dense.d, params).total -
                      energy(dense.geo, x2, dense.y, dense.d, params).total;
    worst_energy = std::max(worst_energy, std::abs(dlog + dh / (2.0 * params.sigma2)));
  }
  return make_report("detailed-balance", std::max(worst_balance, worst_energy), 1e-9,
                     {{"n_states", n_states},
                      {"seed", seed},
                      {"interior_moves", interior},
                      {"boundary_adjacent_moves", boundary},
                      {"max_balance_residual", worst_balance},
                      {"max_energy_residual", worst_energy}});
}

CheckReport check_dlr(const Box& box, const HeightField& y, const HeightField& d, const ModelParams& params,
                      const Kernel& kernel, std::size_t n_states, std::uint64_t seed) {
  const Dense dense = densify(box, kernel, y, d);
  const GaussianSpec spec = build_gaussian(dense.geo, dense.y, dense.d, params);
  const std::size_t n = dense.geo.size();
  Engine eng = make_engine(seed, 0);
  std::uniform_real_distribution<double> offset(-3.0, 3.0);
  double worst_interior = 0.0, worst_boundary = 0.0;
  for (std::size_t s = 0; s < n_states; ++s) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = spec.mean()(static_cast<Eigen::Index>(i)) + offset(eng);
    for (std::size_t k = 0; k < n; ++k) {
      const auto exact = spec.conditional(k, x);
      const double mean = local_mean(dense.geo, k, x, dense.y, dense.d[k], params);
      const double res = std::max(std::abs(exact.mean - mean), std::abs(exact.variance - params.sigma2));
      double& slot = boundary_adjacent(dense.geo, k) ? worst_boundary : worst_interior;
      slot = std::max(slot, res);
    }
  }
  return make_report("dlr-conditional", std::max(worst_interior, worst_boundary), 1e-9,
                     {{"n_states", n_states},
                      {"seed", seed},
                      {"max_interior_residual", worst_interior},
                      {"max_boundary_adjacent_residual", worst_boundary}});
}

std::vector<CheckReport> check_minimizer(const Box& box, const HeightField& y, const HeightField& d,
                                         const ModelParams& params, const Kernel& kernel, std::size_t n_probes,
                                         std::uint64_t seed) {
  const Dense dense = densify(box, kernel, y, d);
  const std::size_t n = dense.geo.size();
  const auto m = dense.geo.box_values(solve_exact(box, d, y, params, kernel).m, "m");
  auto energy_at = [&](const std::vector<double>& x) { return energy(dense.geo, x, dense.y, dense.d, params).total; };

  double grad_sup = 0.0;
  for (double g : gradient(dense.geo, m, dense.y, dense.d, params)) grad_sup = std::max(grad_sup, std::abs(g));

  Engine eng = make_engine(seed, 0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  constexpr double step = 1e-5;
  double fd_err = 0.0;
  std::size_t not_increasing = 0;
  double min_increase = kInf;
  for (std::size_t p = 0; p < n_probes; ++p) {
    std::vector<double> x(n), v(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = m[i] + 2.0 * unif(eng);
    const auto g = gradient(dense.geo, x, dense.y, dense.d, params);
    for (std::size_t i = 0; i < n; ++i) {
      auto up = x, down = x;
      up[i] += step;
      down[i] -= step;
      fd_err = std::max(fd_err, std::abs((energy_at(up) - energy_at(down)) / (2.0 * step) - g[i]));
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = unif(eng);
    const double eps = 1e-3 + std::abs(unif(eng));
    auto moved = m;
    for (std::size_t i = 0; i < n; ++i) moved[i] += eps * v[i];
    const double increase = energy_at(moved) - energy_at(m);
    min_increase = std::min(min_increase, increase);
    // Second difference along v at a random point.
    auto fwd = x, back = x;
    for (std::size_t i = 0; i < n; ++i) {
      fwd[i] += eps * v[i];
      back[i] -= eps * v[i];
    }
    const double second = energy_at(fwd) - 2.0 * energy_at(x) + energy_at(back);
    if (!(increase > 0.0) || !(second > 0.0)) ++not_increasing;
  }
  return {make_report("minimizer-gradient", grad_sup, 1e-9, {{"sites", n}}),
          make_report("minimizer-finite-difference", fd_err, 1e-5,
                      {{"n_probes", n_probes}, {"seed", seed}, {"step", step}}),
          make_report("minimizer-perturbation", static_cast<double>(not_increasing), 0.0,
                      {{"n_probes", n_probes}, {"seed", seed}, {"min_increase", min_increase}})};
}

CheckReport check_ground_state_agreement(const Box& box, const HeightField& y, const HeightField& d,
                                         const ModelParams& params, const Kernel& kernel, double tol) {
  const auto jac = solve_jacobi(box, d, y, params, kernel, tol, 10'000'000);
  const auto exact = solve_exact(box, d, y, params, kernel);
  double jac_exact = 0.0, rows_exact = 0.0, rows_jac = 0.0;
  for (std::size_t i = 0; i < exact.m.size(); ++i) {
    const Site& s = exact.m.sites()[i];
    const double e = exact.m.values()[i];
    const double j = jac.m.at(s);
    const double r = recompose(kernel_row_exact(box, params, kernel, s), d, y);
    jac_exact = std::max(jac_exact, std::abs(j - e));
    rows_exact = std::max(rows_exact, std::abs(r - e));
    rows_jac = std::max(rows_jac, std::abs(r - j));
  }
  return make_report("ground-state-agreement", std::max({jac_exact, rows_exact, rows_jac}), std::max(2.0 * tol, 1e-8),
                     {{"tol", tol},
                      {"jacobi_iterations", jac.iterations},
                      {"jacobi_residual", jac.residual_inf},
                      {"exact_residual", exact.residual_inf},
                      {"jacobi_vs_exact", jac_exact},
                      {"rows_vs_exact", rows_exact},
                      {"rows_vs_jacobi", rows_jac}});
}

CheckReport check_kernel_row_mc(const Box& box, const ModelParams& params, const Kernel& kernel, const Site& i,
                                std::uint64_t n_walks, std::uint64_t seed, int workers) {
  const KernelRow exact = kernel_row_exact(box, params, kernel, i);
  const KernelRow mc = kernel_row_mc(box, params, kernel, i, n_walks, seed, workers);
  const double n = static_cast<double>(n_walks);
  double worst = 0.0;
  std::size_t entries = 0;
  auto compare = [&](const std::map<Site, double>& ex, const std::map<Site, double>& est) {
    std::map<Site, std::pair<double, double>> all;
    for (const auto& [s, p] : ex) all[s].first = p;
    for (const auto& [s, p] : est) all[s].second = p;
    for (const auto& [s, pq] : all) {
      const auto [p, q] = pq;
      const double se = std::sqrt(p * (1.0 - p) / n);
      const double z = se > 0.0 ? std::abs(q - p) / se : (std::abs(q - p) > 0.0 ? kInf : 0.0);
      worst = std::max(worst, z);
      ++entries;
    }
  };
  compare(exact.killed, mc.killed);
  compare(exact.absorbed, mc.absorbed);
  return make_report("kernel-row-mc", worst, kZThreshold,
                     {{"site", i.to_string()}, {"n_walks", n_walks}, {"seed", seed}, {"entries", entries}});
}

}  // namespace harness
