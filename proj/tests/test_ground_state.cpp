#include "doctest.h"

#include <cmath>

#include "harness/ground_state.hpp"
#include "test_util.hpp"

using namespace harness;
using namespace testutil;

namespace {

const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

struct Instance {
  Box box;
  Kernel kernel;
  ModelParams params;
  HeightField y, d;
};

// Boxes of at most 12 sites, random alpha, data and boundary in [-1, 1].
Instance random_instance(std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  const bool two_d = seed % 3 == 0;
  std::uniform_int_distribution<int> side(1, two_d ? 3 : 12);
  const int a = side(eng), b = two_d ? std::uniform_int_distribution<int>(1, 4)(eng) : 1;
  Box box = two_d ? Box(Site{0, 0}, Site{a - 1, b - 1}) : box1(0, a - 1);
  Kernel k = two_d ? (seed % 2 ? wide2d() : nn(2)) : nn(1);
  const Geometry geo(box, k);
  const double alpha = std::uniform_real_distribution<double>(0.05, 0.95)(eng);
  return {box, k, ModelParams::make(alpha), random_field(geo.shell(), eng), random_field(geo.sites(), eng)};
}

}  // namespace

TEST_CASE("constant data and boundary give a constant ground state") {
  const Box b = box1(-4, 4);
  const Geometry geo(b, nn(1));
  const auto d = HeightField::constant(geo.sites(), 2.5), y = HeightField::constant(geo.shell(), 2.5);
  const auto p = ModelParams::make(0.5);
  const auto from_d = solve_jacobi(b, d, y, p, nn(1), 1e-12, 100, d);
  CHECK(from_d.iterations == 1);
  for (double v : from_d.m.values()) CHECK(v == 2.5);
  const auto from_zero = solve_jacobi(b, d, y, p, nn(1), 1e-12, 1000);
  for (double v : from_zero.m.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
  const auto exact = solve_exact(b, d, y, p, nn(1));
  for (double v : exact.m.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("single site with d = 2 has m = 1") {
  const Box b = box1(0, 0);
  const Geometry geo(b, nn(1));
  const auto d = HeightField::single(Site{0}, 2.0);
  const auto y = zeros(geo.shell());
  const auto p = ModelParams::make(0.5);
  CHECK(solve_jacobi(b, d, y, p, nn(1), 1e-14, 100).m.at(Site{0}) == 1.0);
  CHECK(solve_exact(b, d, y, p, nn(1)).m.at(Site{0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("two-site box matches the 2x2 inverse") {
  const Box b = box1(0, 1);
  const Geometry geo(b, nn(1));
  const HeightField d({Site{0}, Site{1}}, {2.0, 0.0});
  const auto r = solve_exact(b, d, zeros(geo.shell()), ModelParams::make(0.5), nn(1));
  CHECK(r.m.at(Site{0}) == doctest::Approx(16.0 / 15.0).epsilon(1e-15));
  CHECK(r.m.at(Site{1}) == doctest::Approx(4.0 / 15.0).epsilon(1e-15));
  CHECK(r.residual_inf <= 1e-15);
}

TEST_CASE("homogeneous system gives zero") {
  const Box b(Site{0, 0}, Site{3, 3});
  const Geometry geo(b, nn(2));
  const auto r = solve_exact(b, zeros(geo.sites()), zeros(geo.shell()), ModelParams::make(0.4), nn(2));
  for (double v : r.m.values()) CHECK(v == 0.0);
}

TEST_CASE("jacobi residual is within tolerance and all three methods agree") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto in = random_instance(s);
    const double tol = 1e-10;
    const auto jac = solve_jacobi(in.box, in.d, in.y, in.params, in.kernel, tol, 1000000);
    CHECK(jac.residual_inf <= tol);
    const auto ex = solve_exact(in.box, in.d, in.y, in.params, in.kernel);
    CHECK(ex.residual_inf <= 1e-10 * (1 + in.d.sup_norm() + in.y.sup_norm()));
    const double agree = std::max(2 * tol, 1e-8);
    for (const Site& i : ex.m.sites()) {
      CHECK(std::abs(jac.m.at(i) - ex.m.at(i)) <= agree);
      const auto row = kernel_row_exact(in.box, in.params, in.kernel, i);
      CHECK(std::abs(recompose(row, in.d, in.y) - ex.m.at(i)) <= 1e-9);
    }
  }
}

TEST_CASE("jacobi stops with NoConvergence when capped") {
  const auto in = random_instance(4);
  CHECK(code_of([&] { solve_jacobi(in.box, in.d, in.y, in.params, in.kernel, 1e-14, 1); }) ==
        ErrorCode::NoConvergence);
  CHECK(code_of([&] { solve_jacobi(in.box, in.d, in.y, in.params, in.kernel, 0.0, 10); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("jacobi sweeps contract by alpha") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto in = random_instance(50 + s);
    const Geometry geo(in.box, in.kernel);
    const auto ys = geo.shell_values(in.y, "y"), ds = geo.box_values(in.d, "d");
    std::mt19937_64 eng(s);
    std::vector<double> a = geo.box_values(random_field(geo.sites(), eng, -10, 10), "a");
    std::vector<double> b = geo.box_values(random_field(geo.sites(), eng, -10, 10), "b");
    std::vector<double> na(a.size()), nb(b.size());
    for (int sweep = 0; sweep < 5; ++sweep) {
      double before = 0.0, after = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) before = std::max(before, std::abs(a[i] - b[i]));
      jacobi_sweep(geo, a, ys, ds, in.params, na);
      jacobi_sweep(geo, b, ys, ds, in.params, nb);
      for (std::size_t i = 0; i < a.size(); ++i) after = std::max(after, std::abs(na[i] - nb[i]));
      CHECK(after <= in.params.alpha * before * (1 + 1e-12) + 1e-15);
      a.swap(na);
      b.swap(nb);
    }
  }
}

TEST_CASE("dense solves are size capped") {
  const Box b = box1(0, static_cast<int>(kDenseSiteLimit));
  const Geometry geo(b, nn(1));
  CHECK(code_of([&] { solve_exact(b, zeros(geo.sites()), zeros(geo.shell()), ModelParams{}, nn(1)); }) ==
        ErrorCode::SizeLimit);
  CHECK(code_of([&] { kernel_row_exact(b, ModelParams{}, nn(1), Site{0}); }) == ErrorCode::SizeLimit);
}

TEST_CASE("single-site kernel row") {
  const auto row = kernel_row_exact(box1(0, 0), ModelParams::make(0.5), nn(1), Site{0});
  CHECK(row.killed.size() == 1);
  CHECK(row.killed.at(Site{0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(row.absorbed.at(Site{-1}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(row.absorbed.at(Site{1}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(row.truncation_mass == 0.0);
  CHECK(code_of([] { kernel_row_exact(box1(0, 0), ModelParams{}, nn(1), Site{1}); }) == ErrorCode::SiteOutsideBox);
}

TEST_CASE("kernel rows are probability distributions") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto in = random_instance(70 + s);
    for (const Site& i : in.box.sites()) {
      const auto row = kernel_row_exact(in.box, in.params, in.kernel, i);
      CHECK(row.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
      for (const auto& [j, p] : row.killed) CHECK((p >= 0.0 && p <= 1.0));
      for (const auto& [j, p] : row.absorbed) CHECK((p >= 0.0 && p <= 1.0));
    }
  }
}

TEST_CASE("monte carlo rows match exact rows within five binomial standard errors") {
  const Box b = box1(0, 5);
  const auto p = ModelParams::make(0.7);
  const std::uint64_t n = 100000;
  const auto exact = kernel_row_exact(b, p, nn(1), Site{2});
  const auto mc = kernel_row_mc(b, p, nn(1), Site{2}, n, 99);
  CHECK(mc.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mc.truncation_mass == 0.0);
  auto compare = [&](const std::map<Site, double>& ex, const std::map<Site, double>& est) {
    for (const auto& [j, q] : ex) {
      const double se = std::sqrt(q * (1 - q) / static_cast<double>(n));
      const auto it = est.find(j);
      const double got = it == est.end() ? 0.0 : it->second;
      CHECK(std::abs(got - q) <= 5 * se);
    }
  };
  compare(exact.killed, mc.killed);
  compare(exact.absorbed, mc.absorbed);
}

TEST_CASE("monte carlo rows replay exactly and ignore the worker count") {
  const Box b(Site{0, 0}, Site{4, 4});
  const auto p = ModelParams::make(0.6);
  const auto a = kernel_row_mc(b, p, wide2d(), Site{2, 2}, 5000, 3, 1);
  const auto c = kernel_row_mc(b, p, wide2d(), Site{2, 2}, 5000, 3, 3);
  CHECK(a.killed == c.killed);
  CHECK(a.absorbed == c.absorbed);
  const auto other = kernel_row_mc(b, p, wide2d(), Site{2, 2}, 5000, 4, 1);
  CHECK(other.killed != a.killed);
}

TEST_CASE("one-site box with alpha near one is absorbed almost surely") {
  const double alpha = 0.999;
  const auto mc = kernel_row_mc(box1(0, 0), ModelParams::make(alpha), nn(1), Site{0}, 20000, 5);
  double absorbed = 0.0;
  for (const auto& [j, q] : mc.absorbed) absorbed += q;
  const double se = std::sqrt(alpha * (1 - alpha) / 20000.0);
  CHECK(std::abs(absorbed - alpha) <= 5 * se);
}

TEST_CASE("monte carlo walks abort at the step cap") {
  // Killing probability 1e-12 per step: a walk from the middle of a wide box
  // runs past the cap long before it is killed or reaches the boundary.
  CHECK(code_of([] { kernel_row_mc(box1(-4000, 4000), ModelParams::make(1 - 1e-12), nn(1), Site{0}, 1, 1); }) ==
        ErrorCode::WalkCapExceeded);
}

TEST_CASE("infinite-volume ground state for a unit mass") {
  const auto r = ground_state_infinite(HeightField::single(Site{0}, 1.0), ModelParams::make(0.5), nn(1), 1e-12);
  CHECK(std::abs(r.m.at(Site{0}) - kInvSqrt3) <= 1e-9);
  CHECK(std::abs(r.m.at(Site{1}) - (2 - std::sqrt(3.0)) / std::sqrt(3.0)) <= 1e-9);
  CHECK(std::abs(r.m.at(Site{-1}) - (2 - std::sqrt(3.0)) / std::sqrt(3.0)) <= 1e-9);
  CHECK(r.tail_bound <= 1e-12);
  // Closed form (1 - alpha) sum alpha^n P^n(0,0) = (1 - alpha) / sqrt(1 - alpha^2), other alpha.
  const double a = 0.8;
  const auto r8 = ground_state_infinite(HeightField::single(Site{0}, 1.0), ModelParams::make(a), nn(1), 1e-12);
  CHECK(std::abs(r8.m.at(Site{0}) - (1 - a) / std::sqrt(1 - a * a)) <= 1e-9);
}

TEST_CASE("infinite-volume ground state is linear and reproduces constants") {
  const auto p = ModelParams::make(0.6);
  const HeightField d({Site{-1, 0}, Site{0, 2}, Site{3, 1}}, {1.0, -2.0, 0.5});
  const auto m1 = ground_state_infinite(d, p, wide2d(), 1e-12);
  const auto m3 = ground_state_infinite(d.scaled(-3.0), p, wide2d(), 1e-12);
  for (const Site& s : m1.m.sites()) CHECK(m3.m.value_or(s, 0.0) == doctest::Approx(-3.0 * m1.m.at(s)).epsilon(1e-12));

  const auto wide = box1(-200, 200).sites();
  const auto c = ground_state_infinite(HeightField::constant(wide, 1.5), ModelParams::make(0.5), nn(1), 1e-12);
  CHECK(c.m.at(Site{0}) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("finite boxes exhaust monotonically toward the infinite ground state") {
  const auto p = ModelParams::make(0.5);
  const HeightField mass = HeightField::single(Site{0}, 1.0);
  const double limit = ground_state_infinite(mass, p, nn(1), 1e-13).m.at(Site{0});
  double prev = 0.0;
  for (int hw : {0, 1, 2, 4, 8, 16, 32}) {
    const Box b = box1(-hw, hw);
    const Geometry geo(b, nn(1));
    const auto d = zeros(geo.sites()).merged(mass);
    const double m = solve_exact(b, d, zeros(geo.shell()), p, nn(1)).m.at(Site{0});
    CHECK(m >= prev);
    // The walk must leave the box (probability <= alpha^(hw+1)) to see the
    // difference, and m <= 1 / (1 - alpha) everywhere.
    CHECK(limit - m <= std::pow(p.alpha, hw + 1) / p.h() + 1e-15);
    prev = m;
  }
  CHECK(std::abs(prev - limit) <= 1e-9);
}

TEST_CASE("boundary influence washes out like alpha^dist") {
  const auto p = ModelParams::make(0.5);
  double prev = 1.0;
  for (int hw : {2, 4, 8, 16, 32}) {
    const Box b = box1(-hw, hw);
    const Geometry geo(b, nn(1));
    const double r = solve_exact(b, zeros(geo.sites()), HeightField::constant(geo.shell(), 7.0), p, nn(1)).m.at(Site{0});
    const int dist = b.distance_to_outside(Site{0});
    CHECK(std::abs(r) <= std::pow(p.alpha, dist) * 7.0);
    CHECK(std::abs(r) < prev);
    prev = std::abs(r);
  }
  CHECK(prev < 1e-9);
}

TEST_CASE("decay bound holds for exact rows and catches corruption") {
  const auto p = ModelParams::make(0.5);
  const auto one = kernel_row_exact(box1(0, 0), p, nn(1), Site{0});
  const auto rep = decay_bound_check(one, p, nn(1));
  CHECK(rep.entries == 3);
  // Absorbed 1/4 at distance 1 against the bound 1/2.
  CHECK(rep.worst_slack == doctest::Approx(0.25));

  const auto row = kernel_row_exact(box1(-10, 10), p, nn(1), Site{0});
  CHECK(row.killed.at(Site{3}) <= 0.125);
  CHECK(row.killed.at(Site{-3}) <= 0.125);
  CHECK(decay_bound_check(row, p, nn(1)).worst_slack >= 0.0);

  const Box b2(Site{0, 0}, Site{6, 6});
  for (const Site& i : {Site{3, 3}, Site{0, 6}}) {
    const auto r2 = kernel_row_exact(b2, ModelParams::make(0.8), wide2d(), i);
    CHECK(decay_bound_check(r2, ModelParams::make(0.8), wide2d()).worst_slack >= 0.0);
  }

  KernelRow bad = row;
  bad.killed[Site{3}] = 0.2;
  CHECK(code_of([&] { decay_bound_check(bad, p, nn(1)); }) == ErrorCode::BoundViolated);
}
