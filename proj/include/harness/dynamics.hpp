#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "harness/lattice.hpp"

namespace harness {

/// A Poisson epoch with its Gaussian noise mark.
struct Epoch {
  Site site;
  double time = 0.0;
  double noise = 0.0;
};

/// Epochs of the space-time Poisson process in the window [start, end],
/// sorted by time, ties by site. The noise marks travel with the list so the
/// forward update and the backward reconstruction consume the same randomness.
struct EpochList {
  double start = 0.0;
  double end = 0.0;
  std::vector<Epoch> epochs;
  std::uint64_t seed = 0;

  /// Epochs with time in [s, t], as a list over that window.
  EpochList restricted(double s, double t) const;
};

/// Independent rate-one clocks per box site, each epoch marked with
/// N(0, sigma2) noise. Site k draws from substream k of `seed`.
EpochList generate_epochs(const Box& box, double start, double end, const ModelParams& params,
                          std::uint64_t seed);

/// Replaces the height at epoch.site by its local mean plus the epoch noise.
HeightField heat_bath_step(const HeightField& state, const Epoch& epoch, const HeightField& y,
                           const HeightField& d, const ModelParams& params, const Kernel& kernel);

struct SimulationResult {
  HeightField final_state;
  EpochList epochs;
};

SimulationResult simulate(const Box& box, const HeightField& z_init, const HeightField& y, const HeightField& d,
                          const ModelParams& params, const Kernel& kernel, double start, double end,
                          std::uint64_t seed);

/// Called with (time, state in box order).
using SnapshotFn = std::function<void(double, std::span<const double>)>;

/// Replays `epochs` from `z` in place (dense box order). When snapshot_every
/// is positive the observer sees the state at start, start + k * every, ...,
/// and at the window end.
void replay(const Geometry& geo, std::vector<double>& z, std::span<const double> y, std::span<const double> d,
            const ModelParams& params, const EpochList& epochs, double snapshot_every = 0.0,
            const SnapshotFn& observer = {});

/// Runs for burn_in model time, then records the state every `thin` time
/// units, n_samples times. Row r holds sample r in box site order. Segment k
/// (k = 0 is the burn-in) uses substream k of `seed`.
Eigen::MatrixXd sample_stationary(const Box& box, const HeightField& y, const HeightField& d,
                                  const ModelParams& params, const Kernel& kernel, double burn_in,
                                  std::size_t n_samples, double thin, std::uint64_t seed,
                                  const std::optional<HeightField>& z_init = std::nullopt);

}  // namespace harness
