#include "harness/hamiltonian.hpp"

#include "harness/error.hpp"

namespace harness {

namespace {

constexpr const char* kModule = "hamiltonian";

double neighbor_value(const HeightField& z, const Site& s) {
  if (auto v = z.find(s)) return *v;
  throw Error(ErrorCode::DomainMismatch, kModule, "no height at neighbor site " + s.to_string());
}

void check_sizes(const Geometry& geo, std::span<const double> x, std::span<const double> y,
                 std::span<const double> d) {
  if (x.size() != geo.size() || d.size() != geo.size() || y.size() != geo.shell().size())
    throw Error(ErrorCode::DomainMismatch, kModule, "vector sizes do not match the box and its shell");
}

}  // namespace

EnergyBreakdown energy(const Geometry& geo, std::span<const double> x, std::span<const double> y,
                       std::span<const double> d, const ModelParams& params) {
  check_sizes(geo, x, y, d);
  EnergyBreakdown e;
  for (std::size_t i = 0; i < geo.size(); ++i) {
    for (const NeighborRef& r : geo.neighbors(i)) {
      if (r.in_box) {
        // Each interior pair is visited from both ends; count it once.
        if (r.index > i) {
          const double diff = x[i] - x[r.index];
          e.pair_interior += params.alpha * r.weight * diff * diff;
        }
      } else {
        const double diff = x[i] - y[r.index];
        e.pair_boundary += params.alpha * r.weight * diff * diff;
      }
    }
    const double dd = x[i] - d[i];
    e.data_term += params.h() * dd * dd;
  }
  e.total = e.pair_interior + e.pair_boundary + e.data_term;
  return e;
}

double local_mean(const Geometry& geo, std::size_t i, std::span<const double> x, std::span<const double> y,
                  double d_i, const ModelParams& params) {
  double avg = 0.0;
  for (const NeighborRef& r : geo.neighbors(i)) avg += r.weight * (r.in_box ? x[r.index] : y[r.index]);
  return params.alpha * avg + params.h() * d_i;
}

std::vector<double> gradient(const Geometry& geo, std::span<const double> x, std::span<const double> y,
                             std::span<const double> d, const ModelParams& params) {
  check_sizes(geo, x, y, d);
  std::vector<double> g(geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) g[i] = 2.0 * (x[i] - local_mean(geo, i, x, y, d[i], params));
  return g;
}

EnergyBreakdown energy(const Box& box, const HeightField& x, const HeightField& y, const HeightField& d,
                       const ModelParams& params, const Kernel& kernel) {
  const Geometry geo(box, kernel);
  try {
    const auto xs = geo.box_values(x, "x");
    const auto ds = geo.box_values(d, "d");
    const auto ys = geo.shell_values(y, "y");
    return energy(geo, xs, ys, ds, params);
  } catch (const Error& err) {
    throw Error(err.code(), kModule, err.detail());
  }
}

double local_mean(const Site& k, const HeightField& z, double d_k, const ModelParams& params,
                  const Kernel& kernel) {
  double avg = 0.0;
  for (const Jump& j : kernel.jumps()) avg += j.weight * neighbor_value(z, k + j.offset);
  return params.alpha * avg + params.h() * d_k;
}

double energy_delta(const Site& k, double old_val, double new_val, const HeightField& z, double d_k,
                    const ModelParams& params, const Kernel& kernel) {
  const double m = local_mean(k, z, d_k, params, kernel);
  return (new_val - m) * (new_val - m) - (old_val - m) * (old_val - m);
}

ConditionalLaw conditional_law(const Site& k, const HeightField& z, double d_k, const ModelParams& params,
                               const Kernel& kernel) {
  return {local_mean(k, z, d_k, params, kernel), params.sigma2};
}

HeightField gradient(const Box& box, const HeightField& x, const HeightField& y, const HeightField& d,
                     const ModelParams& params, const Kernel& kernel) {
  const Geometry geo(box, kernel);
  try {
    const auto xs = geo.box_values(x, "x");
    const auto ds = geo.box_values(d, "d");
    const auto ys = geo.shell_values(y, "y");
    return geo.box_field(gradient(geo, xs, ys, ds, params));
  } catch (const Error& err) {
    throw Error(err.code(), kModule, err.detail());
  }
}

}  // namespace harness
