#include "harness/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "harness/error.hpp"

namespace harness {

namespace {

constexpr const char* kModule = "lattice_core";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, kModule, msg); }

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim)
    fail(ErrorCode::InvalidArgument,
         "dimension " + std::to_string(dim) + " outside [1, " + std::to_string(kMaxDim) + "]");
}

}  // namespace

// ---------------------------------------------------------------- Site

Site::Site(std::initializer_list<int> coords) : Site(std::span<const int>(coords.begin(), coords.size())) {}

Site::Site(std::span<const int> coords) : dim_(static_cast<int>(coords.size())) {
  check_dim(dim_);
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Site Site::zero(int dim) {
  check_dim(dim);
  Site s;
  s.dim_ = dim;
  return s;
}

Site Site::operator+(const Site& o) const {
  Site r = *this;
  for (int k = 0; k < dim_; ++k) r.c_[k] += o.c_[k];
  return r;
}

Site Site::operator-(const Site& o) const {
  Site r = *this;
  for (int k = 0; k < dim_; ++k) r.c_[k] -= o.c_[k];
  return r;
}

Site Site::operator-() const {
  Site r = *this;
  for (int k = 0; k < dim_; ++k) r.c_[k] = -r.c_[k];
  return r;
}

int Site::sup_norm() const noexcept {
  int n = 0;
  for (int k = 0; k < dim_; ++k) n = std::max(n, std::abs(c_[k]));
  return n;
}

bool Site::is_zero() const noexcept { return sup_norm() == 0; }

std::strong_ordering Site::operator<=>(const Site& o) const noexcept {
  if (auto c = dim_ <=> o.dim_; c != 0) return c;
  for (int k = 0; k < dim_; ++k)
    if (auto c = c_[k] <=> o.c_[k]; c != 0) return c;
  return std::strong_ordering::equal;
}

bool Site::operator==(const Site& o) const noexcept { return (*this <=> o) == 0; }

std::string Site::to_string() const {
  std::string s = "(";
  for (int k = 0; k < dim_; ++k) {
    if (k) s += ",";
    s += std::to_string(c_[k]);
  }
  return s + ")";
}

int sup_distance(const Site& a, const Site& b) { return (a - b).sup_norm(); }

// ---------------------------------------------------------------- Box

Box::Box(Site lower, Site upper) : lower_(lower), upper_(upper) {
  if (lower.dim() != upper.dim()) fail(ErrorCode::InvalidArgument, "box corners differ in dimension");
  check_dim(lower.dim());
  std::size_t stride = 1;
  for (int k = lower.dim() - 1; k >= 0; --k) {
    if (lower[k] > upper[k])
      fail(ErrorCode::InvalidArgument, "box lower " + lower.to_string() + " exceeds upper " + upper.to_string());
    stride_[k] = stride;
    stride *= static_cast<std::size_t>(upper[k] - lower[k] + 1);
  }
  size_ = stride;
}

Box Box::centered(int dim, int half_width) {
  if (half_width < 0) fail(ErrorCode::InvalidArgument, "negative half width");
  Site lo = Site::zero(dim), hi = Site::zero(dim);
  for (int k = 0; k < dim; ++k) {
    lo[k] = -half_width;
    hi[k] = half_width;
  }
  return Box(lo, hi);
}

bool Box::contains(const Site& s) const noexcept {
  if (s.dim() != dim()) return false;
  for (int k = 0; k < dim(); ++k)
    if (s[k] < lower_[k] || s[k] > upper_[k]) return false;
  return true;
}

std::optional<std::size_t> Box::index_of(const Site& s) const noexcept {
  if (!contains(s)) return std::nullopt;
  std::size_t idx = 0;
  for (int k = 0; k < dim(); ++k) idx += static_cast<std::size_t>(s[k] - lower_[k]) * stride_[k];
  return idx;
}

Site Box::site_at(std::size_t index) const {
  if (index >= size_) fail(ErrorCode::SiteOutsideBox, "index " + std::to_string(index) + " out of range");
  Site s = lower_;
  for (int k = 0; k < dim(); ++k) {
    s[k] += static_cast<int>(index / stride_[k]);
    index %= stride_[k];
  }
  return s;
}

std::vector<Site> Box::sites() const {
  std::vector<Site> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back(site_at(i));
  return out;
}

Site Box::center() const {
  Site c = lower_;
  for (int k = 0; k < dim(); ++k) c[k] = lower_[k] + (upper_[k] - lower_[k]) / 2;
  return c;
}

int Box::distance_to_outside(const Site& s) const {
  if (!contains(s)) return 0;
  int d = -1;
  for (int k = 0; k < dim(); ++k) {
    const int to_edge = std::min(s[k] - lower_[k], upper_[k] - s[k]) + 1;
    d = d < 0 ? to_edge : std::min(d, to_edge);
  }
  return d;
}

Box Box::grown(int width) const {
  Site lo = lower_, hi = upper_;
  for (int k = 0; k < dim(); ++k) {
    lo[k] -= width;
    hi[k] += width;
  }
  return Box(lo, hi);
}

std::vector<Site> boundary_shell(const Box& box, int width) {
  if (width < 1) fail(ErrorCode::InvalidArgument, "shell width must be >= 1");
  const Box outer = box.grown(width);
  std::vector<Site> out;
  out.reserve(outer.size() - box.size());
  for (std::size_t i = 0; i < outer.size(); ++i) {
    Site s = outer.site_at(i);
    if (!box.contains(s)) out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------- Kernel

Kernel::Kernel(std::vector<Jump> jumps, int range) : jumps_(std::move(jumps)), range_(range) {
  std::sort(jumps_.begin(), jumps_.end(), [](const Jump& a, const Jump& b) { return a.offset < b.offset; });
  dim_ = jumps_.empty() ? 0 : jumps_.front().offset.dim();
  for (const Jump& j : jumps_) reach_ = std::max(reach_, j.offset.sup_norm());
}

Kernel Kernel::validate(const std::map<Site, double>& raw, int range) {
  if (raw.empty()) fail(ErrorCode::InvalidArgument, "kernel has no offsets");
  if (range < 1) fail(ErrorCode::RangeViolation, "range must be >= 1");
  const int dim = raw.begin()->first.dim();
  double total = 0.0;
  for (const auto& [v, w] : raw) {
    if (v.dim() != dim) fail(ErrorCode::InvalidArgument, "kernel offsets have mixed dimensions");
    if (v.is_zero()) fail(ErrorCode::SelfLoop, "offset 0 present (p(0,0) must vanish)");
    if (v.sup_norm() >= range)
      fail(ErrorCode::RangeViolation,
           "offset " + v.to_string() + " has |v| >= range " + std::to_string(range));
    if (!(w > 0.0 && w <= 1.0) || !std::isfinite(w))
      fail(ErrorCode::NonStochastic, "weight of " + v.to_string() + " outside (0, 1]");
    total += w;
  }
  for (const auto& [v, w] : raw) {
    auto it = raw.find(-v);
    if (it == raw.end() || std::abs(it->second - w) > 1e-12 * std::max(1.0, w))
      fail(ErrorCode::AsymmetricKernel, "p(" + v.to_string() + ") != p(" + (-v).to_string() + ")");
  }
  if (std::abs(total - 1.0) > 1e-9)
    fail(ErrorCode::NonStochastic, "weights sum to " + std::to_string(total));

  std::vector<Jump> jumps;
  jumps.reserve(raw.size());
  for (const auto& [v, w] : raw) {
    // Average the pair so symmetry holds exactly as stored.
    const double sym = 0.5 * (w + raw.at(-v));
    jumps.push_back({v, sym / total});
  }
  return Kernel(std::move(jumps), range);
}

Kernel Kernel::unchecked(std::vector<Jump> jumps, int range) { return Kernel(std::move(jumps), range); }

Kernel Kernel::nearest_neighbor(int dim) {
  check_dim(dim);
  std::map<Site, double> raw;
  for (int k = 0; k < dim; ++k) {
    Site e = Site::zero(dim);
    e[k] = 1;
    raw[e] = 0.5 / dim;
    raw[-e] = 0.5 / dim;
  }
  return validate(raw, 2);
}

double Kernel::weight(const Site& offset) const noexcept {
  auto it = std::lower_bound(jumps_.begin(), jumps_.end(), offset,
                             [](const Jump& j, const Site& v) { return j.offset < v; });
  return (it != jumps_.end() && it->offset == offset) ? it->weight : 0.0;
}

double Kernel::total_weight() const noexcept {
  double s = 0.0;
  for (const Jump& j : jumps_) s += j.weight;
  return s;
}

// ---------------------------------------------------------------- ModelParams

ModelParams ModelParams::make(double alpha, double sigma2) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::InvalidArgument, "model", "alpha must lie in (0, 1)");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw Error(ErrorCode::InvalidArgument, "model", "sigma2 must be positive");
  return ModelParams{alpha, sigma2};
}

ModelParams ModelParams::from_beta(double alpha, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "model", "beta must be positive");
  return make(alpha, 1.0 / (2.0 * beta));
}

// ---------------------------------------------------------------- HeightField

HeightField::HeightField(std::vector<Site> sites, std::vector<double> values) {
  if (sites.size() != values.size())
    fail(ErrorCode::InvalidArgument, "field has " + std::to_string(sites.size()) + " sites but " +
                                         std::to_string(values.size()) + " values");
  std::vector<std::size_t> order(sites.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sites[a] < sites[b]; });
  sites_.reserve(sites.size());
  values_.reserve(sites.size());
  for (std::size_t k : order) {
    if (!sites_.empty() && sites_.back() == sites[k])
      fail(ErrorCode::InvalidArgument, "site " + sites[k].to_string() + " listed twice");
    if (!sites_.empty() && sites_.back().dim() != sites[k].dim())
      fail(ErrorCode::InvalidArgument, "field sites have mixed dimensions");
    sites_.push_back(sites[k]);
    values_.push_back(values[k]);
  }
}

HeightField HeightField::constant(std::span<const Site> sites, double value) {
  return HeightField(std::vector<Site>(sites.begin(), sites.end()), std::vector<double>(sites.size(), value));
}

HeightField HeightField::single(const Site& site, double value) { return HeightField({site}, {value}); }

std::optional<double> HeightField::find(const Site& s) const noexcept {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it == sites_.end() || !(*it == s)) return std::nullopt;
  return values_[static_cast<std::size_t>(it - sites_.begin())];
}

bool HeightField::contains(const Site& s) const noexcept { return find(s).has_value(); }

double HeightField::at(const Site& s) const {
  if (auto v = find(s)) return *v;
  throw Error(ErrorCode::DomainMismatch, kModule, "no value at site " + s.to_string());
}

double HeightField::value_or(const Site& s, double fallback) const noexcept { return find(s).value_or(fallback); }

HeightField HeightField::scaled(double c) const {
  HeightField r = *this;
  for (double& v : r.values_) v *= c;
  return r;
}

HeightField HeightField::shifted(double c) const {
  HeightField r = *this;
  for (double& v : r.values_) v += c;
  return r;
}

HeightField HeightField::merged(const HeightField& other) const {
  std::map<Site, double> all;
  for (std::size_t i = 0; i < size(); ++i) all[sites_[i]] = values_[i];
  for (std::size_t i = 0; i < other.size(); ++i) all[other.sites_[i]] = other.values_[i];
  std::vector<Site> s;
  std::vector<double> v;
  for (const auto& [site, val] : all) {
    s.push_back(site);
    v.push_back(val);
  }
  return HeightField(std::move(s), std::move(v));
}

double HeightField::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double HeightField::l1_norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += std::abs(v);
  return s;
}

double weighted_norm(const HeightField& field, double alpha, int range) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (range < 1) fail(ErrorCode::InvalidArgument, "range must be >= 1");
  double total = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double v = field.values()[i];
    if (v == 0.0) continue;
    const double exponent = static_cast<double>(field.sites()[i].sup_norm()) / range;
    total += std::abs(v) * std::pow(alpha, exponent);
  }
  return total;
}

// ---------------------------------------------------------------- Geometry

Geometry::Geometry(Box box, Kernel kernel) : box_(std::move(box)), kernel_(std::move(kernel)) {
  if (kernel_.dim() != box_.dim())
    fail(ErrorCode::InvalidArgument, "kernel dimension " + std::to_string(kernel_.dim()) +
                                         " does not match box dimension " + std::to_string(box_.dim()));
  sites_ = box_.sites();
  shell_ = boundary_shell(box_, std::max(1, kernel_.reach()));
  row_.reserve(sites_.size() + 1);
  row_.push_back(0);
  for (const Site& s : sites_) {
    for (const Jump& j : kernel_.jumps()) {
      const Site t = s + j.offset;
      if (auto idx = box_.index_of(t)) {
        refs_.push_back({*idx, true, j.weight});
      } else {
        refs_.push_back({*shell_index(t), false, j.weight});
      }
    }
    row_.push_back(refs_.size());
  }
}

std::optional<std::size_t> Geometry::shell_index(const Site& s) const noexcept {
  auto it = std::lower_bound(shell_.begin(), shell_.end(), s);
  if (it == shell_.end() || !(*it == s)) return std::nullopt;
  return static_cast<std::size_t>(it - shell_.begin());
}

std::vector<double> Geometry::box_values(const HeightField& f, const char* name) const {
  std::vector<double> out(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    auto v = f.find(sites_[i]);
    if (!v)
      throw Error(ErrorCode::DomainMismatch, kModule,
                  std::string("field '") + name + "' has no value at box site " + sites_[i].to_string());
    out[i] = *v;
  }
  return out;
}

std::vector<double> Geometry::shell_values(const HeightField& f, const char* name) const {
  std::vector<double> out(shell_.size());
  for (std::size_t i = 0; i < shell_.size(); ++i) {
    auto v = f.find(shell_[i]);
    if (!v)
      throw Error(ErrorCode::DomainMismatch, kModule,
                  std::string("field '") + name + "' has no value at shell site " + shell_[i].to_string());
    out[i] = *v;
  }
  return out;
}

HeightField Geometry::box_field(std::span<const double> values) const {
  return HeightField(sites_, std::vector<double>(values.begin(), values.end()));
}

HeightField Geometry::shell_field(std::span<const double> values) const {
  return HeightField(shell_, std::vector<double>(values.begin(), values.end()));
}

std::vector<double> Geometry::boundary_drive(std::span<const double> y_shell) const {
  std::vector<double> out(sites_.size(), 0.0);
  for (std::size_t i = 0; i < sites_.size(); ++i)
    for (const NeighborRef& r : neighbors(i))
      if (!r.in_box) out[i] += r.weight * y_shell[r.index];
  return out;
}

}  // namespace harness
