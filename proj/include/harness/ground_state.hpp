#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>

#include "harness/lattice.hpp"

namespace harness {

// Dense solves are capped at this many box sites.
inline constexpr std::size_t kDenseSiteLimit = 4096;
// A Monte Carlo killed walk aborts after this many steps.
inline constexpr std::uint64_t kWalkStepCap = 1'000'000;

enum class GroundStateMethod { jacobi, neumann, exact_solve, monte_carlo };

std::string_view method_name(GroundStateMethod m) noexcept;

/// Termination distribution of the jump chain started at `start` that, at
/// each step, dies in place with probability 1 - alpha or jumps by p with
/// probability alpha, and is absorbed on first landing outside the box.
struct KernelRow {
  Site start;
  std::map<Site, double> killed;    // K_box(start, j), j in the box
  std::map<Site, double> absorbed;  // absorption at shell sites
  double truncation_mass = 0.0;
  GroundStateMethod method = GroundStateMethod::exact_solve;
  std::uint64_t n_walks = 0;  // Monte Carlo only

  double total_mass() const noexcept;
};

struct GroundStateResult {
  HeightField m;
  double residual_inf = 0.0;
  int iterations = 0;
  GroundStateMethod method = GroundStateMethod::exact_solve;
};

/// sup_i |m(i) - alpha (P m)(i) - alpha (P y)(i) - (1 - alpha) d(i)|, with
/// (P m) summed over box neighbors and (P y) over shell neighbors.
double ground_state_residual(const Geometry& geo, std::span<const double> m, std::span<const double> y,
                             std::span<const double> d, const ModelParams& params);

/// out = alpha P m + alpha (P y) + (1 - alpha) d, dense box order. The map
/// is a contraction with factor alpha in sup-norm.
void jacobi_sweep(const Geometry& geo, std::span<const double> m, std::span<const double> y,
                  std::span<const double> d, const ModelParams& params, std::span<double> out);

/// Jacobi sweeps m <- alpha P m + alpha (P y) + (1 - alpha) d. Stops once a
/// sweep moves m by at most tol (1 - alpha) / alpha in sup-norm, which bounds
/// both the distance to the fixed point and the residual by tol.
GroundStateResult solve_jacobi(const Box& box, const HeightField& d, const HeightField& y,
                               const ModelParams& params, const Kernel& kernel, double tol, int max_iter,
                               const std::optional<HeightField>& initial = std::nullopt);

/// Direct solve of (I - alpha P_box) m = alpha (P y) + (1 - alpha) d.
GroundStateResult solve_exact(const Box& box, const HeightField& d, const HeightField& y,
                              const ModelParams& params, const Kernel& kernel);

KernelRow kernel_row_exact(const Box& box, const ModelParams& params, const Kernel& kernel, const Site& i);

KernelRow kernel_row_mc(const Box& box, const ModelParams& params, const Kernel& kernel, const Site& i,
                        std::uint64_t n_walks, std::uint64_t seed, int workers = 1);

/// sum_j K(i,j) d(j) + sum_k K(i,k) y(k).
double recompose(const KernelRow& row, const HeightField& d, const HeightField& y);

struct InfiniteGroundState {
  HeightField m;      // on the data support grown by terms * reach
  int terms = 0;      // Neumann terms summed (N + 1)
  double tail_bound = 0.0;
};

/// m = (1 - alpha) sum_{n >= 0} (alpha P)^n d on Z^d for finitely supported d,
/// truncated at the first N with alpha^(N+1) |d|_1 / (1 - alpha) <= tol.
InfiniteGroundState ground_state_infinite(const HeightField& d, const ModelParams& params,
                                          const Kernel& kernel, double tol);

struct DecayReport {
  double worst_slack = 0.0;  // min over entries of bound - K
  Site worst_site;
  std::size_t entries = 0;
};

/// Checks K(i,j) <= alpha^floor(|i - j| / reach) for every entry of the row
/// and throws BoundViolated otherwise.
DecayReport decay_bound_check(const KernelRow& row, const ModelParams& params, const Kernel& kernel);

}  // namespace harness
