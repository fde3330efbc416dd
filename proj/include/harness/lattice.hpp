#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace harness {

inline constexpr int kMaxDim = 4;

/// A point of Z^d. Ordering is lexicographic in the coordinates, which is the
/// site order used for every vector, matrix and output file.
class Site {
 public:
  Site() = default;
  Site(std::initializer_list<int> coords);
  explicit Site(std::span<const int> coords);

  static Site zero(int dim);

  int dim() const noexcept { return dim_; }
  int operator[](int axis) const { return c_[static_cast<std::size_t>(axis)]; }
  int& operator[](int axis) { return c_[static_cast<std::size_t>(axis)]; }
  std::span<const int> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  Site operator+(const Site& o) const;
  Site operator-(const Site& o) const;
  Site operator-() const;

  /// Sup-norm |j| = max_k |j_k|.
  int sup_norm() const noexcept;
  bool is_zero() const noexcept;

  std::strong_ordering operator<=>(const Site& o) const noexcept;
  bool operator==(const Site& o) const noexcept;

  std::string to_string() const;

 private:
  std::array<int, kMaxDim> c_{};
  int dim_ = 0;
};

int sup_distance(const Site& a, const Site& b);

/// Inclusive axis-aligned box. Site indices follow lexicographic order, so
/// index_of is monotone in the site ordering.
class Box {
 public:
  Box(Site lower, Site upper);

  static Box centered(int dim, int half_width);

  int dim() const noexcept { return lower_.dim(); }
  const Site& lower() const noexcept { return lower_; }
  const Site& upper() const noexcept { return upper_; }
  std::size_t size() const noexcept { return size_; }

  bool contains(const Site& s) const noexcept;
  std::optional<std::size_t> index_of(const Site& s) const noexcept;
  Site site_at(std::size_t index) const;
  std::vector<Site> sites() const;
  Site center() const;

  /// Smallest sup-distance from s (inside the box) to a site outside it.
  int distance_to_outside(const Site& s) const;

  Box grown(int width) const;

 private:
  Site lower_;
  Site upper_;
  std::array<std::size_t, kMaxDim> stride_{};
  std::size_t size_ = 0;
};

/// Sites within sup-distance `width` of the box but outside it, sorted.
std::vector<Site> boundary_shell(const Box& box, int width);

struct Jump {
  Site offset;
  double weight;
};

/// Translation-invariant, symmetric, finite-range stochastic kernel
/// p(i, j) = p(j - i). Offsets satisfy |v| < range and v != 0.
class Kernel {
 public:
  /// Validates and (if its total is within 1e-9 of one) renormalizes.
  static Kernel validate(const std::map<Site, double>& raw, int range);

  /// No checks at all. Only meant for negative tests of the oracles.
  static Kernel unchecked(std::vector<Jump> jumps, int range);

  static Kernel nearest_neighbor(int dim);

  int dim() const noexcept { return dim_; }
  int range() const noexcept { return range_; }
  /// Longest jump in sup-norm; a walk needs at least ceil(dist / reach) jumps
  /// to travel sup-distance dist.
  int reach() const noexcept { return reach_; }
  std::span<const Jump> jumps() const noexcept { return jumps_; }
  double weight(const Site& offset) const noexcept;
  double total_weight() const noexcept;

 private:
  Kernel(std::vector<Jump> jumps, int range);

  std::vector<Jump> jumps_;
  int range_ = 0;
  int reach_ = 0;
  int dim_ = 0;
};

inline Kernel validate_kernel(const std::map<Site, double>& raw, int range) {
  return Kernel::validate(raw, range);
}

/// Mixing weight alpha in (0,1) and noise variance sigma2 > 0. The pair
/// coupling is J = alpha * p, the data weight is h = 1 - alpha and the
/// invariant density is proportional to exp(-beta * H) with beta = 1/(2 sigma2).
struct ModelParams {
  double alpha = 0.5;
  double sigma2 = 0.5;

  static ModelParams make(double alpha, double sigma2 = 0.5);
  static ModelParams from_beta(double alpha, double beta);

  double h() const noexcept { return 1.0 - alpha; }
  double beta() const noexcept { return 1.0 / (2.0 * sigma2); }
};

/// Real heights on an explicit finite site set.
class HeightField {
 public:
  HeightField() = default;
  HeightField(std::vector<Site> sites, std::vector<double> values);

  static HeightField constant(std::span<const Site> sites, double value);
  static HeightField single(const Site& site, double value);

  std::size_t size() const noexcept { return sites_.size(); }
  bool empty() const noexcept { return sites_.empty(); }
  std::span<const Site> sites() const noexcept { return sites_; }
  std::span<const double> values() const noexcept { return values_; }

  bool contains(const Site& s) const noexcept;
  std::optional<double> find(const Site& s) const noexcept;
  /// Throws DomainMismatch when s is not in the domain.
  double at(const Site& s) const;
  double value_or(const Site& s, double fallback) const noexcept;

  HeightField scaled(double c) const;
  HeightField shifted(double c) const;
  /// Union of domains; values of `other` win on overlap.
  HeightField merged(const HeightField& other) const;

  double sup_norm() const noexcept;
  double l1_norm() const noexcept;

 private:
  std::vector<Site> sites_;
  std::vector<double> values_;
};

/// Sum_j |x(j)| alpha^(|j| / range), sup-norm, no floor on the exponent.
double weighted_norm(const HeightField& field, double alpha, int range);

struct NeighborRef {
  std::size_t index;  // into the box or the shell, depending on in_box
  bool in_box;
  double weight;
};

/// Box plus kernel, with the one-jump stencil of every box site precomputed.
/// The shell has width kernel.reach(), which covers every one-jump target.
class Geometry {
 public:
  Geometry(Box box, Kernel kernel);

  const Box& box() const noexcept { return box_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  std::size_t size() const noexcept { return box_.size(); }
  std::span<const Site> sites() const noexcept { return sites_; }
  std::span<const Site> shell() const noexcept { return shell_; }
  std::optional<std::size_t> shell_index(const Site& s) const noexcept;

  std::span<const NeighborRef> neighbors(std::size_t i) const noexcept {
    return {refs_.data() + row_[i], row_[i + 1] - row_[i]};
  }

  /// Dense values of `f` on the box (or shell) in site order; DomainMismatch
  /// names the field when a site is missing.
  std::vector<double> box_values(const HeightField& f, const char* name) const;
  std::vector<double> shell_values(const HeightField& f, const char* name) const;
  HeightField box_field(std::span<const double> values) const;
  HeightField shell_field(std::span<const double> values) const;

  /// (P y)(i) restricted to shell targets, for each box site i.
  std::vector<double> boundary_drive(std::span<const double> y_shell) const;

 private:
  Box box_;
  Kernel kernel_;
  std::vector<Site> sites_;
  std::vector<Site> shell_;
  std::vector<std::size_t> row_;
  std::vector<NeighborRef> refs_;
};

}  // namespace harness
