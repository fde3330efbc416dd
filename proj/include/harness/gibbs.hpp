#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "harness/lattice.hpp"

namespace harness {

/// The finite-volume Gibbs measure with density proportional to
/// exp(-H / (2 sigma2)) on the box heights, given boundary heights y.
/// It is Gaussian with mean m solving (I - alpha P) m = alpha P y + (1 - alpha) d
/// and covariance sigma2 (I - alpha P)^-1. At sigma2 = 1/2 the density is
/// exactly exp(-H).
class GaussianSpec {
 public:
  GaussianSpec(std::vector<Site> sites, Eigen::VectorXd mean, Eigen::MatrixXd covariance, double sigma2);

  std::span<const Site> sites() const noexcept { return sites_; }
  std::size_t size() const noexcept { return sites_.size(); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }
  /// Inverse covariance.
  const Eigen::MatrixXd& precision() const noexcept { return precision_; }
  double sigma2() const noexcept { return sigma2_; }

  double log_density(std::span<const double> x) const;
  double log_density(const HeightField& x) const;

  /// n iid draws via the Cholesky factor of the covariance; row r is draw r.
  Eigen::MatrixXd sample(std::size_t n, std::uint64_t seed) const;

  struct Conditional {
    double mean;
    double variance;
  };
  /// Law of coordinate k given the others at x.
  Conditional conditional(std::size_t k, std::span<const double> x) const;

 private:
  std::vector<Site> sites_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd precision_;
  Eigen::MatrixXd cov_factor_;  // lower L with L L^T = covariance
  double log_det_2pi_cov_ = 0.0;
  double sigma2_ = 0.0;
};

GaussianSpec build_gaussian(const Box& box, const HeightField& y, const HeightField& d, const ModelParams& params,
                            const Kernel& kernel);
GaussianSpec build_gaussian(const Geometry& geo, std::span<const double> y, std::span<const double> d,
                            const ModelParams& params);

inline double log_density(const GaussianSpec& spec, const HeightField& x) { return spec.log_density(x); }

inline Eigen::MatrixXd sample_exact(const GaussianSpec& spec, std::size_t n, std::uint64_t seed) {
  return spec.sample(n, seed);
}

/// max(|mean diff|, |variance diff|) between the Gaussian conditional of
/// site k under `spec` and the heat-bath law computed from the Hamiltonian
/// with `kernel`. x covers the box; y covers the shell.
double conditional_check(const GaussianSpec& spec, const Site& k, const HeightField& x, const HeightField& y,
                         const HeightField& d, const ModelParams& params, const Kernel& kernel);

}  // namespace harness
