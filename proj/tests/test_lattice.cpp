#include "doctest.h"

#include <algorithm>
#include <set>

#include "test_util.hpp"

using namespace harness;
using namespace testutil;

TEST_CASE("validate_kernel accepts the symmetric nearest-neighbor kernel") {
  const Kernel k = validate_kernel({{Site{1}, 0.5}, {Site{-1}, 0.5}}, 2);
  CHECK(k.dim() == 1);
  CHECK(k.range() == 2);
  CHECK(k.reach() == 1);
  CHECK(k.weight(Site{1}) == 0.5);
  CHECK(k.weight(Site{-1}) == 0.5);
  CHECK(k.weight(Site{2}) == 0.0);
}

TEST_CASE("validate_kernel rejects each broken invariant") {
  CHECK(code_of([] { validate_kernel({{Site{1}, 0.6}, {Site{-1}, 0.4}}, 2); }) == ErrorCode::AsymmetricKernel);
  CHECK(code_of([] { validate_kernel({{Site{0}, 0.2}, {Site{1}, 0.4}, {Site{-1}, 0.4}}, 2); }) ==
        ErrorCode::SelfLoop);
  // |v| must be strictly below the range.
  CHECK(code_of([] { validate_kernel({{Site{2}, 0.5}, {Site{-2}, 0.5}}, 2); }) == ErrorCode::RangeViolation);
  CHECK(code_of([] { validate_kernel({{Site{1}, 0.3}, {Site{-1}, 0.3}}, 2); }) == ErrorCode::NonStochastic);
  CHECK(code_of([] { validate_kernel({{Site{1}, 0.5 + 1e-6}, {Site{-1}, 0.5 + 1e-6}}, 2); }) ==
        ErrorCode::NonStochastic);
  CHECK(code_of([] { validate_kernel({}, 2); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { validate_kernel({{Site{1}, 0.5}, {Site{-1, 0}, 0.5}}, 2); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("validate_kernel renormalizes sums within 1e-9 and stores exact symmetry") {
  const double w = 0.25 + 2e-10;
  const Kernel k = validate_kernel({{Site{1, 0}, w}, {Site{-1, 0}, w}, {Site{0, 1}, w}, {Site{0, -1}, w}}, 2);
  CHECK(std::abs(k.total_weight() - 1.0) <= 1e-12);
  for (const Jump& j : k.jumps()) CHECK(k.weight(-j.offset) == j.weight);

  const Kernel w2 = wide2d();
  CHECK(w2.reach() == 2);
  CHECK(std::abs(w2.total_weight() - 1.0) <= 1e-12);
  for (const Jump& j : w2.jumps()) CHECK(w2.weight(-j.offset) == j.weight);
}

TEST_CASE("weighted_norm examples and homogeneity") {
  const auto sites = box1(-3, 3).sites();
  CHECK(weighted_norm(zeros(sites), 0.5, 1) == 0.0);
  CHECK(weighted_norm(HeightField::single(Site{0}, 1.0), 0.3, 2) == 1.0);
  CHECK(weighted_norm(HeightField::single(Site{3}, 2.0), 0.25, 1) == doctest::Approx(0.03125).epsilon(1e-15));
  // No floor: |j| / R = 3/2 gives alpha^1.5.
  CHECK(weighted_norm(HeightField::single(Site{3}, 1.0), 0.25, 2) == doctest::Approx(0.125).epsilon(1e-15));

  std::mt19937_64 eng(11);
  const HeightField f = random_field(sites, eng);
  for (double c : {-3.5, 0.0, 0.1, 7.0}) {
    const double lhs = weighted_norm(f.scaled(c), 0.6, 2);
    const double rhs = std::abs(c) * weighted_norm(f, 0.6, 2);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }
}

TEST_CASE("boundary_shell examples") {
  CHECK(boundary_shell(box1(0, 2), 1) == std::vector<Site>{Site{-1}, Site{3}});
  CHECK(boundary_shell(box1(0, 0), 2) == std::vector<Site>{Site{-2}, Site{-1}, Site{1}, Site{2}});
  const auto ring = boundary_shell(Box(Site{0, 0}, Site{0, 0}), 1);
  CHECK(ring.size() == 8);
  CHECK(std::is_sorted(ring.begin(), ring.end()));
  for (const Site& s : ring) CHECK(sup_distance(s, Site{0, 0}) == 1);
}

TEST_CASE("the shell is disjoint from the box and covers every one-jump target") {
  for (const Kernel& k : {nn(2), wide2d()}) {
    const Geometry geo(Box(Site{-2, 0}, Site{3, 4}), k);
    const std::set<Site> shell(geo.shell().begin(), geo.shell().end());
    for (const Site& s : shell) CHECK_FALSE(geo.box().contains(s));
    for (const Site& s : geo.sites())
      for (const Jump& j : k.jumps()) {
        const Site t = s + j.offset;
        CHECK((geo.box().contains(t) || shell.count(t) == 1));
      }
    // Stencil weights are the kernel weights.
    for (std::size_t i = 0; i < geo.size(); ++i) {
      double total = 0.0;
      for (const NeighborRef& r : geo.neighbors(i)) total += r.weight;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("box indexing is lexicographic") {
  const Box b(Site{-1, 2}, Site{1, 4});
  CHECK(b.size() == 9);
  const auto sites = b.sites();
  CHECK(std::is_sorted(sites.begin(), sites.end()));
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(b.site_at(i) == sites[i]);
    CHECK(b.index_of(sites[i]) == i);
  }
  CHECK_FALSE(b.index_of(Site{2, 2}).has_value());
  CHECK(b.center() == Site{0, 3});
  CHECK(b.distance_to_outside(Site{0, 3}) == 2);
  CHECK(b.distance_to_outside(Site{-1, 3}) == 1);
  CHECK(code_of([] { Box(Site{1}, Site{0}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { b.site_at(9); }) == ErrorCode::SiteOutsideBox);
  CHECK(Box::centered(2, 3).size() == 49);
}

TEST_CASE("height fields keep one value per site") {
  const HeightField f({Site{2}, Site{0}}, {5.0, 1.0});
  CHECK(f.sites()[0] == Site{0});
  CHECK(f.at(Site{2}) == 5.0);
  CHECK(code_of([&] { f.at(Site{1}); }) == ErrorCode::DomainMismatch);
  CHECK(f.value_or(Site{1}, -4.0) == -4.0);
  CHECK(code_of([] { HeightField({Site{0}, Site{0}}, {1.0, 2.0}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { HeightField({Site{0}, Site{0, 1}}, {1.0, 2.0}); }) == ErrorCode::InvalidArgument);

  const HeightField g({Site{2}, Site{3}}, {-1.0, 9.0});
  const HeightField m = f.merged(g);
  CHECK(m.size() == 3);
  CHECK(m.at(Site{2}) == -1.0);
  CHECK(m.at(Site{0}) == 1.0);
  CHECK(f.sup_norm() == 5.0);
  CHECK(f.l1_norm() == 6.0);
}

TEST_CASE("model parameters") {
  const auto p = ModelParams::make(0.25, 0.5);
  CHECK(p.h() == 0.75);
  CHECK(p.beta() == 1.0);
  CHECK(ModelParams::from_beta(0.5, 4.0).sigma2 == 0.125);
  CHECK(code_of([] { ModelParams::make(0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ModelParams::make(1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ModelParams::make(0.5, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ModelParams::from_beta(0.5, -1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("geometry dense values name the missing field") {
  const Geometry geo(box1(0, 2), nn(1));
  try {
    geo.box_values(HeightField::single(Site{0}, 1.0), "d");
    FAIL("expected DomainMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainMismatch);
    CHECK(std::string(e.what()).find("d") != std::string::npos);
  }
  const auto drive = geo.boundary_drive(std::vector<double>{2.0, 4.0});
  CHECK(drive == std::vector<double>{1.0, 0.0, 2.0});
}
