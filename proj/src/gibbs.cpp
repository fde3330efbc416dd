#include "harness/gibbs.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "dense.hpp"
#include "harness/error.hpp"
#include "harness/hamiltonian.hpp"
#include "harness/rng.hpp"

namespace harness {

namespace {

constexpr const char* kModule = "gibbs_exact";

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

GaussianSpec::GaussianSpec(std::vector<Site> sites, Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                           double sigma2)
    : sites_(std::move(sites)), mean_(std::move(mean)), cov_(std::move(covariance)), sigma2_(sigma2) {
  const auto n = static_cast<Eigen::Index>(sites_.size());
  if (mean_.size() != n || cov_.rows() != n || cov_.cols() != n)
    fail(ErrorCode::InvalidArgument, "mean/covariance sizes do not match the site list");
  Eigen::LLT<Eigen::MatrixXd> llt(cov_);
  if (llt.info() != Eigen::Success) fail(ErrorCode::FactorizationFailure, "covariance is not positive definite");
  cov_factor_ = llt.matrixL();
  precision_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
  precision_ = 0.5 * (precision_ + precision_.transpose()).eval();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(cov_factor_(i, i));
  log_det_2pi_cov_ = log_det + static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

double GaussianSpec::log_density(std::span<const double> x) const {
  if (x.size() != sites_.size()) fail(ErrorCode::DomainMismatch, "configuration size does not match the spec");
  const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(x.data(), mean_.size()) - mean_;
  // |L^-1 (x - mu)|^2 = (x - mu)^T Sigma^-1 (x - mu)
  const Eigen::VectorXd w = cov_factor_.triangularView<Eigen::Lower>().solve(diff);
  return -0.5 * w.squaredNorm() - 0.5 * log_det_2pi_cov_;
}

double GaussianSpec::log_density(const HeightField& x) const {
  std::vector<double> xs(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    auto v = x.find(sites_[i]);
    if (!v) fail(ErrorCode::DomainMismatch, "no height at " + sites_[i].to_string());
    xs[i] = *v;
  }
  return log_density(xs);
}

Eigen::MatrixXd GaussianSpec::sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) fail(ErrorCode::InvalidArgument, "sample count must be >= 1");
  const auto dim = mean_.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), dim);
  Eigen::VectorXd z(dim);
  for (std::size_t r = 0; r < n; ++r) {
    Engine eng = make_engine(seed, r);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index i = 0; i < dim; ++i) z(i) = gauss(eng);
    out.row(static_cast<Eigen::Index>(r)) = (mean_ + cov_factor_ * z).transpose();
  }
  return out;
}

GaussianSpec::Conditional GaussianSpec::conditional(std::size_t k, std::span<const double> x) const {
  if (x.size() != sites_.size()) fail(ErrorCode::DomainMismatch, "configuration size does not match the spec");
  if (k >= sites_.size()) fail(ErrorCode::SiteOutsideBox, "coordinate index out of range");
  const auto kk = static_cast<Eigen::Index>(k);
  const double q = precision_(kk, kk);
  double shift = 0.0;
  for (Eigen::Index j = 0; j < mean_.size(); ++j)
    if (j != kk) shift += precision_(kk, j) * (x[static_cast<std::size_t>(j)] - mean_(j));
  return {mean_(kk) - shift / q, 1.0 / q};
}

GaussianSpec build_gaussian(const Geometry& geo, std::span<const double> y, std::span<const double> d,
                            const ModelParams& params) {
  detail::check_dense_size(geo, kModule);
  const Eigen::MatrixXd a = detail::interaction_matrix(geo, params.alpha);
  const Eigen::VectorXd b = detail::source_vector(geo, y, d, params.alpha);
  const auto n = a.rows();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd mean = lu.solve(b);
  mean += lu.solve(b - a * mean);
  // Solve against the identity, then symmetrize away roundoff.
  Eigen::MatrixXd inv = lu.solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd cov = params.sigma2 * 0.5 * (inv + inv.transpose());
  return GaussianSpec(std::vector<Site>(geo.sites().begin(), geo.sites().end()), std::move(mean), std::move(cov),
                      params.sigma2);
}

GaussianSpec build_gaussian(const Box& box, const HeightField& y, const HeightField& d, const ModelParams& params,
                            const Kernel& kernel) {
  const Geometry geo(box, kernel);
  const auto ys = rethrow_here([&] { return geo.shell_values(y, "y"); });
  const auto ds = rethrow_here([&] { return geo.box_values(d, "d"); });
  return build_gaussian(geo, ys, ds, params);
}

double conditional_check(const GaussianSpec& spec, const Site& k, const HeightField& x, const HeightField& y,
                         const HeightField& d, const ModelParams& params, const Kernel& kernel) {
  std::vector<double> xs(spec.size());
  std::size_t pos = spec.size();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    auto v = x.find(spec.sites()[i]);
    if (!v) fail(ErrorCode::DomainMismatch, "no height at " + spec.sites()[i].to_string());
    xs[i] = *v;
    if (spec.sites()[i] == k) pos = i;
  }
  if (pos == spec.size()) fail(ErrorCode::SiteOutsideBox, "site " + k.to_string() + " is not in the spec");
  const auto exact = spec.conditional(pos, xs);
  const auto heat_bath = rethrow_here([&] { return conditional_law(k, y.merged(x), d.at(k), params, kernel); });
  return std::max(std::abs(exact.mean - heat_bath.mean), std::abs(exact.variance - heat_bath.variance));
}

}  // namespace harness
