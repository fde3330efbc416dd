#include "harness/dual.hpp"

#include "harness/error.hpp"
#include "harness/parallel.hpp"

namespace harness {

namespace {

constexpr const char* kModule = "dual";

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

}  // namespace

double WeightTable::total_mass() const noexcept {
  double s = pruned;
  for (const auto& [site, m] : b_final) s += m;
  for (const EpochMass& e : killed) s += e.mass;
  for (const EpochMass& e : absorbed) s += e.mass;
  return s;
}

WeightTable backward_weights(const Geometry& geo, const EpochList& epochs, std::size_t origin,
                             const ModelParams& params) {
  if (origin >= geo.size()) fail(ErrorCode::SiteOutsideBox, "origin index out of range");
  WeightTable w;
  w.origin = geo.sites()[origin];
  w.start = epochs.start;
  w.end = epochs.end;

  std::vector<double> mass(geo.size(), 0.0);
  mass[origin] = 1.0;
  for (std::size_t e = epochs.epochs.size(); e-- > 0;) {
    const Epoch& ep = epochs.epochs[e];
    const auto j = geo.box().index_of(ep.site);
    if (!j) fail(ErrorCode::SiteOutsideBox, "epoch at " + ep.site.to_string() + " lies outside the box");
    const double here = mass[*j];
    if (here == 0.0) continue;
    mass[*j] = 0.0;
    w.alive.push_back({e, ep.site, here});
    w.killed.push_back({e, ep.site, params.h() * here});
    for (const NeighborRef& r : geo.neighbors(*j)) {
      const double moved = params.alpha * r.weight * here;
      if (!r.in_box) {
        w.absorbed.push_back({e, geo.shell()[r.index], moved});
        continue;
      }
      double& target = mass[r.index];
      target += moved;
      if (target < kPruneThreshold) {
        w.pruned += target;
        target = 0.0;
      }
    }
  }
  for (std::size_t k = 0; k < geo.size(); ++k)
    if (mass[k] != 0.0) w.b_final[geo.sites()[k]] = mass[k];
  return w;
}

WeightTable backward_weights(const EpochList& epochs, const Box& box, const Site& i, const ModelParams& params,
                             const Kernel& kernel) {
  const Geometry geo(box, kernel);
  const auto origin = box.index_of(i);
  if (!origin) fail(ErrorCode::SiteOutsideBox, "site " + i.to_string() + " is not in the box");
  return backward_weights(geo, epochs, *origin, params);
}

Reconstruction reconstruct(const Geometry& geo, const EpochList& epochs, const WeightTable& w,
                           std::span<const double> z_init, std::span<const double> y, std::span<const double> d) {
  if (z_init.size() != geo.size() || d.size() != geo.size() || y.size() != geo.shell().size())
    fail(ErrorCode::DomainMismatch, "vector sizes do not match the box and its shell");
  Reconstruction r;
  for (const EpochMass& e : w.alive) {
    if (e.epoch >= epochs.epochs.size()) fail(ErrorCode::InvalidArgument, "weight table does not match the epochs");
    r.noise += e.mass * epochs.epochs[e.epoch].noise;
  }
  for (const EpochMass& e : w.killed) r.data += e.mass * d[*geo.box().index_of(e.site)];
  for (const EpochMass& e : w.absorbed) r.boundary += e.mass * y[*geo.shell_index(e.site)];
  for (const auto& [site, m] : w.b_final) r.initial += m * z_init[*geo.box().index_of(site)];
  r.value = r.noise + r.data + r.boundary + r.initial;
  return r;
}

Reconstruction reconstruct(const EpochList& epochs, const Box& box, const Site& i, const HeightField& z_init,
                           const HeightField& y, const HeightField& d, const ModelParams& params,
                           const Kernel& kernel) {
  const Geometry geo(box, kernel);
  const auto origin = box.index_of(i);
  if (!origin) fail(ErrorCode::SiteOutsideBox, "site " + i.to_string() + " is not in the box");
  const auto zs = rethrow_here([&] { return geo.box_values(z_init, "z_init"); });
  const auto ys = rethrow_here([&] { return geo.shell_values(y, "y"); });
  const auto ds = rethrow_here([&] { return geo.box_values(d, "d"); });
  const WeightTable w = backward_weights(geo, epochs, *origin, params);
  return reconstruct(geo, epochs, w, zs, ys, ds);
}

std::vector<Reconstruction> reconstruct_all(const Geometry& geo, const EpochList& epochs,
                                            std::span<const double> z_init, std::span<const double> y,
                                            std::span<const double> d, const ModelParams& params, int workers) {
  std::vector<Reconstruction> out(geo.size());
  parallel_for(geo.size(), workers, [&](std::size_t i) {
    const WeightTable w = backward_weights(geo, epochs, i, params);
    out[i] = reconstruct(geo, epochs, w, z_init, y, d);
  });
  return out;
}

double survival_mass(const EpochList& epochs, const Box& box, const Site& i, const ModelParams& params,
                     const Kernel& kernel) {
  const WeightTable w = backward_weights(epochs, box, i, params, kernel);
  if (!w.absorbed.empty())
    fail(ErrorCode::AbsorptionOccurred, "walk from " + i.to_string() + " reached the box boundary; enlarge the box");
  double s = 0.0;
  for (const auto& [site, m] : w.b_final) s += m;
  return s;
}

double noise_variance_accumulator(const WeightTable& w, const ModelParams& params) {
  double s = 0.0;
  for (const EpochMass& e : w.alive) s += e.mass * e.mass;
  return params.sigma2 * s;
}

double noise_variance_accumulator(const EpochList& epochs, const Box& box, const Site& i,
                                  const ModelParams& params, const Kernel& kernel) {
  return noise_variance_accumulator(backward_weights(epochs, box, i, params, kernel), params);
}

}  // namespace harness
