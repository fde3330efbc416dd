#include "harness/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "harness/error.hpp"
#include "harness/hamiltonian.hpp"
#include "harness/rng.hpp"

namespace harness {

namespace {

constexpr const char* kModule = "dynamics";

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

bool epoch_before(const Epoch& a, const Epoch& b) {
  if (a.time != b.time) return a.time < b.time;
  return a.site < b.site;
}

void apply_epoch(const Geometry& geo, std::vector<double>& z, std::span<const double> y,
                 std::span<const double> d, const ModelParams& params, std::size_t i, double noise) {
  z[i] = local_mean(geo, i, z, y, d[i], params) + noise;
}

}  // namespace

EpochList EpochList::restricted(double s, double t) const {
  EpochList out;
  out.start = s;
  out.end = t;
  out.seed = seed;
  for (const Epoch& e : epochs)
    if (e.time >= s && e.time <= t) out.epochs.push_back(e);
  return out;
}

EpochList generate_epochs(const Box& box, double start, double end, const ModelParams& params,
                          std::uint64_t seed) {
  if (!(start < end) || !std::isfinite(start) || !std::isfinite(end))
    fail(ErrorCode::InvalidArgument, "window must satisfy start < end");
  EpochList out;
  out.start = start;
  out.end = end;
  out.seed = seed;
  const double sd = std::sqrt(params.sigma2);
  for (std::size_t k = 0; k < box.size(); ++k) {
    const Site site = box.site_at(k);
    Engine eng = make_engine(seed, k);
    std::exponential_distribution<double> gap(1.0);
    std::normal_distribution<double> noise(0.0, sd);
    for (double t = start + gap(eng); t < end; t += gap(eng)) out.epochs.push_back({site, t, noise(eng)});
  }
  std::sort(out.epochs.begin(), out.epochs.end(), epoch_before);
  return out;
}

HeightField heat_bath_step(const HeightField& state, const Epoch& epoch, const HeightField& y,
                           const HeightField& d, const ModelParams& params, const Kernel& kernel) {
  if (!state.contains(epoch.site))
    fail(ErrorCode::DomainMismatch, "epoch site " + epoch.site.to_string() + " is not in the state");
  // Neighbors come from the state where it has a value, else from y.
  const HeightField surroundings = y.merged(state);
  const double mean = rethrow_here([&] {
    return local_mean(epoch.site, surroundings, d.at(epoch.site), params, kernel);
  });
  std::vector<Site> sites(state.sites().begin(), state.sites().end());
  std::vector<double> values(state.values().begin(), state.values().end());
  const auto pos = static_cast<std::size_t>(std::lower_bound(sites.begin(), sites.end(), epoch.site) - sites.begin());
  values[pos] = mean + epoch.noise;
  return HeightField(std::move(sites), std::move(values));
}

void replay(const Geometry& geo, std::vector<double>& z, std::span<const double> y, std::span<const double> d,
            const ModelParams& params, const EpochList& epochs, double snapshot_every,
            const SnapshotFn& observer) {
  if (z.size() != geo.size() || d.size() != geo.size() || y.size() != geo.shell().size())
    fail(ErrorCode::DomainMismatch, "vector sizes do not match the box and its shell");
  const bool snap = snapshot_every > 0.0 && observer;
  std::size_t k = 0;
  auto next_snap = [&] { return epochs.start + static_cast<double>(k) * snapshot_every; };
  for (const Epoch& e : epochs.epochs) {
    while (snap && next_snap() < e.time && next_snap() <= epochs.end) {
      observer(next_snap(), z);
      ++k;
    }
    const auto i = geo.box().index_of(e.site);
    if (!i) fail(ErrorCode::SiteOutsideBox, "epoch at " + e.site.to_string() + " lies outside the box");
    apply_epoch(geo, z, y, d, params, *i, e.noise);
  }
  if (snap) {
    double last = -std::numeric_limits<double>::infinity();
    while (next_snap() <= epochs.end) {
      last = next_snap();
      observer(last, z);
      ++k;
    }
    if (last < epochs.end) observer(epochs.end, z);
  }
}

SimulationResult simulate(const Box& box, const HeightField& z_init, const HeightField& y, const HeightField& d,
                          const ModelParams& params, const Kernel& kernel, double start, double end,
                          std::uint64_t seed) {
  const Geometry geo(box, kernel);
  auto z = rethrow_here([&] { return geo.box_values(z_init, "z_init"); });
  const auto ys = rethrow_here([&] { return geo.shell_values(y, "y"); });
  const auto ds = rethrow_here([&] { return geo.box_values(d, "d"); });
  EpochList epochs = generate_epochs(box, start, end, params, seed);
  replay(geo, z, ys, ds, params, epochs);
  return {geo.box_field(z), std::move(epochs)};
}

Eigen::MatrixXd sample_stationary(const Box& box, const HeightField& y, const HeightField& d,
                                  const ModelParams& params, const Kernel& kernel, double burn_in,
                                  std::size_t n_samples, double thin, std::uint64_t seed,
                                  const std::optional<HeightField>& z_init) {
  if (!(burn_in > 0.0) || !(thin > 0.0)) fail(ErrorCode::InvalidArgument, "burn_in and thin must be positive");
  if (n_samples < 1) fail(ErrorCode::InvalidArgument, "n_samples must be >= 1");
  const Geometry geo(box, kernel);
  const auto ys = rethrow_here([&] { return geo.shell_values(y, "y"); });
  const auto ds = rethrow_here([&] { return geo.box_values(d, "d"); });
  std::vector<double> z(geo.size(), 0.0);
  if (z_init) z = rethrow_here([&] { return geo.box_values(*z_init, "z_init"); });

  Eigen::MatrixXd out(static_cast<Eigen::Index>(n_samples), static_cast<Eigen::Index>(geo.size()));
  double t = 0.0;
  replay(geo, z, ys, ds, params, generate_epochs(box, t, burn_in, params, derive_seed(seed, 0)));
  t = burn_in;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double t_next = burn_in + static_cast<double>(s + 1) * thin;
    replay(geo, z, ys, ds, params, generate_epochs(box, t, t_next, params, derive_seed(seed, s + 1)));
    t = t_next;
    for (std::size_t i = 0; i < geo.size(); ++i)
      out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) = z[i];
  }
  return out;
}

}  // namespace harness
