#pragma once

#include <span>
#include <vector>

#include "harness/lattice.hpp"

namespace harness {

/// H = sum over unordered pairs {i,j} not both outside the box of
/// alpha p(i,j) (x(i) - x(j))^2, plus (1 - alpha) sum_i (x(i) - d(i))^2.
struct EnergyBreakdown {
  double pair_interior = 0.0;
  double pair_boundary = 0.0;
  double data_term = 0.0;
  double total = 0.0;
};

struct ConditionalLaw {
  double mean;
  double variance;
};

EnergyBreakdown energy(const Box& box, const HeightField& x, const HeightField& y, const HeightField& d,
                       const ModelParams& params, const Kernel& kernel);

/// z-bar(k) = alpha sum_j p(k,j) z(j) + (1 - alpha) d_k. `z` must cover every
/// kernel neighbor of k.
double local_mean(const Site& k, const HeightField& z, double d_k, const ModelParams& params,
                  const Kernel& kernel);

/// (new - z-bar)^2 - (old - z-bar)^2, the change of H when z(k) moves from
/// old_val to new_val with everything else held fixed.
double energy_delta(const Site& k, double old_val, double new_val, const HeightField& z, double d_k,
                    const ModelParams& params, const Kernel& kernel);

/// Heat-bath law of z(k) given the rest: N(z-bar(k), sigma2).
ConditionalLaw conditional_law(const Site& k, const HeightField& z, double d_k, const ModelParams& params,
                               const Kernel& kernel);

/// g(i) = dH/dx(i) = 2 (x(i) - x-bar(i)), neighbors read from x inside the
/// box and from y outside.
HeightField gradient(const Box& box, const HeightField& x, const HeightField& y, const HeightField& d,
                     const ModelParams& params, const Kernel& kernel);

// Dense forms over a Geometry: x and d in box order, y in shell order.
EnergyBreakdown energy(const Geometry& geo, std::span<const double> x, std::span<const double> y,
                       std::span<const double> d, const ModelParams& params);
double local_mean(const Geometry& geo, std::size_t i, std::span<const double> x, std::span<const double> y,
                  double d_i, const ModelParams& params);
std::vector<double> gradient(const Geometry& geo, std::span<const double> x, std::span<const double> y,
                             std::span<const double> d, const ModelParams& params);

}  // namespace harness
