#pragma once

#include <Eigen/Dense>

#include "harness/error.hpp"
#include "harness/ground_state.hpp"
#include "harness/lattice.hpp"

namespace harness::detail {

inline void check_dense_size(const Geometry& geo, const char* module) {
  if (geo.size() > kDenseSiteLimit)
    throw Error(ErrorCode::SizeLimit, module,
                "box has " + std::to_string(geo.size()) + " sites; dense limit is " +
                    std::to_string(kDenseSiteLimit));
}

// I - alpha P restricted to the box.
inline Eigen::MatrixXd interaction_matrix(const Geometry& geo, double alpha) {
  const auto n = static_cast<Eigen::Index>(geo.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t i = 0; i < geo.size(); ++i)
    for (const NeighborRef& r : geo.neighbors(i))
      if (r.in_box) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r.index)) -= alpha * r.weight;
  return a;
}

// alpha (P y) + (1 - alpha) d.
inline Eigen::VectorXd source_vector(const Geometry& geo, std::span<const double> y, std::span<const double> d,
                                     double alpha) {
  const auto drive = geo.boundary_drive(y);
  Eigen::VectorXd b(static_cast<Eigen::Index>(geo.size()));
  for (std::size_t i = 0; i < geo.size(); ++i) b(static_cast<Eigen::Index>(i)) = alpha * drive[i] + (1.0 - alpha) * d[i];
  return b;
}

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace harness::detail
