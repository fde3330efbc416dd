#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "harness/lattice.hpp"

namespace harness {

/// passed is statistic <= threshold.
struct CheckReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool passed = false;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

CheckReport make_report(std::string name, double statistic, double threshold, nlohmann::ordered_json details = {});

// Statistical checks compare at this many standard errors.
inline constexpr double kZThreshold = 5.0;

struct StationaryOptions {
  double burn_in = 50.0;
  double thin = 10.0;
  /// Noise variance assumed by the oracle; defaults to the model's. Setting it
  /// differently gives the negative control.
  std::optional<double> oracle_sigma2;
};

/// Thinned heat-bath samples against the exact Gaussian: max |z| over the
/// per-site means and every covariance entry.
CheckReport check_stationary_law(const Box& box, const HeightField& y, const HeightField& d,
                                 const ModelParams& params, const Kernel& kernel, std::size_t n_samples,
                                 std::uint64_t seed, const StationaryOptions& opts = {});

/// Two chains from z and z_prime on shared epochs. For each u, the mean over
/// seeds of |difference at the box center| is compared with
/// |z - z_prime|_inf exp(-(1 - alpha) u); statistic is the largest excess in
/// standard errors.
CheckReport check_ergodic_forgetting(const Box& box, const HeightField& y, const HeightField& d,
                                     const ModelParams& params, const Kernel& kernel, const HeightField& z,
                                     const HeightField& z_prime, const std::vector<double>& u_grid,
                                     std::size_t n_seeds, std::uint64_t seed);

/// Largest conditional noise variance at the box center over the given window
/// lengths (one epoch draw per entry), against sigma2 / (1 - alpha) + 1e-9.
CheckReport check_variance_bound(const Box& box, const ModelParams& params, const Kernel& kernel,
                                 const std::vector<double>& windows, std::uint64_t seed);

/// Mean survival mass after backward time u over n_seeds epoch draws,
/// against exp(-(1 - alpha) u), in standard errors.
CheckReport check_survival_mass(const Box& box, const ModelParams& params, const Kernel& kernel, double u,
                                std::size_t n_seeds, std::uint64_t seed);

struct ThermoLimitResult {
  CheckReport limit;     // largest-box center mean vs the infinite-volume m
  CheckReport washout;   // |r_box(center)| / (alpha^floor(dist/reach) |y|_inf), threshold 1
};

/// Center-site Gibbs means on centered boxes of the given half-widths, for
/// each constant boundary value. The limit threshold is
/// tol + alpha^floor(dist/reach) (|y|_inf + |d|_1): the walk must leave the
/// box before it can see the boundary or data outside it.
ThermoLimitResult check_thermo_limit(const HeightField& d, const std::vector<double>& boundary_values,
                                     const ModelParams& params, const Kernel& kernel,
                                     const std::vector<int>& half_widths, double tol);

/// Specs at sigma2 = 1/2 and sigma2 = 1/(2 beta): identical means and
/// covariance ratio beta, threshold 1e-10.
CheckReport check_beta_scaling(const Box& box, const HeightField& y, const HeightField& d, double alpha,
                               const Kernel& kernel, double beta);

/// Forward simulation vs backward reconstruction at every site, threshold 1e-9.
CheckReport check_duality(const Box& box, const HeightField& z_init, const HeightField& y, const HeightField& d,
                          const ModelParams& params, const Kernel& kernel, double window, std::uint64_t seed,
                          int workers = 1);

/// log pi(x) + log q(x -> x') against log pi(x') + log q(x' -> x) for random
/// single-site heat-bath moves, and log pi differences against energy
/// differences. Threshold 1e-9.
CheckReport check_detailed_balance(const Box& box, const HeightField& y, const HeightField& d,
                                   const ModelParams& params, const Kernel& kernel, std::size_t n_states,
                                   std::uint64_t seed);

/// Gaussian single-site conditionals against the heat-bath law at random
/// states, over every site. Threshold 1e-9.
CheckReport check_dlr(const Box& box, const HeightField& y, const HeightField& d, const ModelParams& params,
                      const Kernel& kernel, std::size_t n_states, std::uint64_t seed);

/// Gradient at the exact minimizer (<= 1e-9), central differences of the
/// energy against the gradient (<= 1e-5), and strict energy increase under
/// random perturbations of the minimizer.
std::vector<CheckReport> check_minimizer(const Box& box, const HeightField& y, const HeightField& d,
                                         const ModelParams& params, const Kernel& kernel, std::size_t n_probes,
                                         std::uint64_t seed);

/// Jacobi, exact solve and kernel-row recomposition pairwise, threshold
/// max(2 tol, 1e-8).
CheckReport check_ground_state_agreement(const Box& box, const HeightField& y, const HeightField& d,
                                         const ModelParams& params, const Kernel& kernel, double tol);

/// Monte Carlo kernel row against the exact row, max binomial z-score.
CheckReport check_kernel_row_mc(const Box& box, const ModelParams& params, const Kernel& kernel, const Site& i,
                                std::uint64_t n_walks, std::uint64_t seed, int workers = 1);

}  // namespace harness
