#pragma once

#include <map>
#include <span>
#include <vector>

#include "harness/dynamics.hpp"
#include "harness/lattice.hpp"

namespace harness {

// Mass entries below this are dropped into WeightTable::pruned.
inline constexpr double kPruneThreshold = 1e-15;

struct EpochMass {
  std::size_t epoch;  // index into EpochList::epochs
  Site site;
  double mass;
};

/// Conditional law, given the epochs, of the backward walk started at
/// `origin` at the window end. At each epoch (j, tau), visited in decreasing
/// time, the alive mass w at j is recorded in `alive`; (1 - alpha) w dies
/// there (`killed`) and alpha p(j, k) w moves to k, or is absorbed when k is
/// outside the box. `b_final` is the mass still alive at the window start.
struct WeightTable {
  Site origin;
  double start = 0.0;
  double end = 0.0;
  std::map<Site, double> b_final;
  std::vector<EpochMass> alive;
  std::vector<EpochMass> killed;
  std::vector<EpochMass> absorbed;
  double pruned = 0.0;

  /// b_final + killed + absorbed + pruned; equals one up to roundoff.
  double total_mass() const noexcept;
};

WeightTable backward_weights(const EpochList& epochs, const Box& box, const Site& i, const ModelParams& params,
                             const Kernel& kernel);
WeightTable backward_weights(const Geometry& geo, const EpochList& epochs, std::size_t origin,
                             const ModelParams& params);

/// value = noise + data + boundary + initial, the four weighted sums over
/// the noise marks, the data at killing sites, the boundary heights at
/// absorption sites and the initial heights under b_final.
struct Reconstruction {
  double value = 0.0;
  double noise = 0.0;
  double data = 0.0;
  double boundary = 0.0;
  double initial = 0.0;
};

Reconstruction reconstruct(const EpochList& epochs, const Box& box, const Site& i, const HeightField& z_init,
                           const HeightField& y, const HeightField& d, const ModelParams& params,
                           const Kernel& kernel);
/// `w` must come from `epochs`; noise marks are found by epoch index.
Reconstruction reconstruct(const Geometry& geo, const EpochList& epochs, const WeightTable& w,
                           std::span<const double> z_init, std::span<const double> y, std::span<const double> d);

/// Reconstructs every box site in box order.
std::vector<Reconstruction> reconstruct_all(const Geometry& geo, const EpochList& epochs,
                                            std::span<const double> z_init, std::span<const double> y,
                                            std::span<const double> d, const ModelParams& params,
                                            int workers = 1);

/// Alive mass left at the window start. The box stands in for all of Z^d, so
/// any absorption raises AbsorptionOccurred.
double survival_mass(const EpochList& epochs, const Box& box, const Site& i, const ModelParams& params,
                     const Kernel& kernel);

/// sigma2 * sum over epochs of alive mass squared: the variance of the noise
/// term given the epochs. Never exceeds sigma2 / (1 - alpha).
double noise_variance_accumulator(const EpochList& epochs, const Box& box, const Site& i,
                                  const ModelParams& params, const Kernel& kernel);
double noise_variance_accumulator(const WeightTable& w, const ModelParams& params);

}  // namespace harness
