#include "doctest.h"

#include <cmath>

#include "harness/dual.hpp"
#include "harness/dynamics.hpp"
#include "harness/gibbs.hpp"
#include "harness/hamiltonian.hpp"
#include "test_util.hpp"

using namespace harness;
using namespace testutil;

TEST_CASE("epoch lists are deterministic, sorted and inside the window") {
  const Box b(Site{0, 0}, Site{3, 2});
  const auto p = ModelParams::make(0.5, 0.7);
  const auto e1 = generate_epochs(b, 1.0, 6.0, p, 42);
  const auto e2 = generate_epochs(b, 1.0, 6.0, p, 42);
  REQUIRE(e1.epochs.size() == e2.epochs.size());
  for (std::size_t k = 0; k < e1.epochs.size(); ++k) {
    CHECK(e1.epochs[k].site == e2.epochs[k].site);
    CHECK(e1.epochs[k].time == e2.epochs[k].time);
    CHECK(e1.epochs[k].noise == e2.epochs[k].noise);
    CHECK(e1.epochs[k].time > 1.0);
    CHECK(e1.epochs[k].time < 6.0);
    CHECK(b.contains(e1.epochs[k].site));
    if (k) CHECK(e1.epochs[k - 1].time <= e1.epochs[k].time);
  }
  CHECK(generate_epochs(b, 1.0, 6.0, p, 43).epochs.size() != 0);
  CHECK(code_of([&] { generate_epochs(b, 2.0, 2.0, p, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("a vanishing window is almost always empty") {
  std::size_t nonempty = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) nonempty += !generate_epochs(box1(0, 9), 0.0, 1e-15, ModelParams{}, s).epochs.empty();
  CHECK(nonempty == 0);
}

TEST_CASE("epoch counts have Poisson mean |box| * length and noise has variance sigma2") {
  const Box b = box1(0, 9);
  const auto p = ModelParams::make(0.5, 0.8);
  const int n = 10000;
  double count = 0.0, sum = 0.0, sq = 0.0, marks = 0.0;
  for (int s = 0; s < n; ++s) {
    const auto e = generate_epochs(b, 0.0, 3.0, p, static_cast<std::uint64_t>(s));
    count += static_cast<double>(e.epochs.size());
    for (const Epoch& ep : e.epochs) {
      sum += ep.noise;
      sq += ep.noise * ep.noise;
      marks += 1.0;
    }
  }
  CHECK(std::abs(count / n - 30.0) <= 5 * std::sqrt(30.0 / n));
  const double var = sq / marks - (sum / marks) * (sum / marks);
  // Var of the sample variance of Gaussians is 2 sigma^4 / n.
  CHECK(std::abs(var - 0.8) <= 5 * std::sqrt(2 * 0.64 / marks));
  CHECK(std::abs(sum / marks) <= 5 * std::sqrt(0.8 / marks));
}

TEST_CASE("heat_bath_step examples") {
  const auto p = ModelParams::make(0.5);
  const HeightField zero_state = HeightField::single(Site{0}, 5.0);
  const HeightField y({Site{-1}, Site{1}}, {0.0, 0.0});
  const HeightField d = HeightField::single(Site{0}, 0.0);
  CHECK(heat_bath_step(zero_state, {Site{0}, 0.5, 0.0}, y, d, p, nn(1)).at(Site{0}) == 0.0);

  const HeightField y13({Site{-1}, Site{1}}, {1.0, 3.0});
  CHECK(heat_bath_step(zero_state, {Site{0}, 0.5, 0.3}, y13, d, p, nn(1)).at(Site{0}) == doctest::Approx(1.3).epsilon(1e-15));

  // Other sites are untouched bit for bit.
  std::mt19937_64 eng(1);
  const Box b = box1(0, 5);
  const Geometry geo(b, nn(1));
  const auto state = random_field(geo.sites(), eng);
  const auto next = heat_bath_step(state, {Site{2}, 0.1, -0.4}, random_field(geo.shell(), eng),
                                   random_field(geo.sites(), eng), p, nn(1));
  for (const Site& s : geo.sites())
    if (s != Site{2}) CHECK(next.at(s) == state.at(s));
  CHECK(code_of([&] { heat_bath_step(state, {Site{9}, 0.1, 0.0}, y, d, p, nn(1)); }) == ErrorCode::DomainMismatch);
}

TEST_CASE("simulate: empty window keeps the start and one epoch is one step") {
  const Box b = box1(0, 3);
  const Geometry geo(b, nn(1));
  std::mt19937_64 eng(3);
  const auto z = random_field(geo.sites(), eng), y = random_field(geo.shell(), eng), d = random_field(geo.sites(), eng);
  const auto p = ModelParams::make(0.4);

  std::vector<double> zs = geo.box_values(z, "z");
  const auto ys = geo.shell_values(y, "y"), ds = geo.box_values(d, "d");
  EpochList empty;
  empty.start = 0.0;
  empty.end = 1.0;
  replay(geo, zs, ys, ds, p, empty);
  CHECK(zs == geo.box_values(z, "z"));

  EpochList one = empty;
  one.epochs.push_back({Site{1}, 0.5, 0.25});
  replay(geo, zs, ys, ds, p, one);
  const auto step = heat_bath_step(z, one.epochs[0], y, d, p, nn(1));
  for (std::size_t i = 0; i < geo.size(); ++i) CHECK(zs[i] == step.values()[i]);
}

TEST_CASE("simulate replays from its seed and returns the consumed epochs") {
  const Box b(Site{0, 0}, Site{2, 3});
  const Geometry geo(b, nn(2));
  std::mt19937_64 eng(9);
  const auto z = random_field(geo.sites(), eng), y = random_field(geo.shell(), eng), d = random_field(geo.sites(), eng);
  const auto p = ModelParams::make(0.6);
  const auto a = simulate(b, z, y, d, p, nn(2), 0.0, 5.0, 17);
  const auto c = simulate(b, z, y, d, p, nn(2), 0.0, 5.0, 17);
  CHECK(std::vector<double>(a.final_state.values().begin(), a.final_state.values().end()) ==
        std::vector<double>(c.final_state.values().begin(), c.final_state.values().end()));
  CHECK(a.epochs.epochs.size() == generate_epochs(b, 0.0, 5.0, p, 17).epochs.size());
  // And the forward state equals the backward reconstruction.
  for (const Site& i : geo.sites()) {
    const auto r = reconstruct(a.epochs, b, i, z, y, d, p, nn(2));
    CHECK(std::abs(r.value - a.final_state.at(i)) <= 1e-9);
  }
}

TEST_CASE("snapshots land on the requested grid") {
  const Box b = box1(0, 2);
  const Geometry geo(b, nn(1));
  const auto p = ModelParams::make(0.5);
  const auto epochs = generate_epochs(b, 0.0, 5.0, p, 8);
  std::vector<double> z(geo.size(), 0.0), y(geo.shell().size(), 0.0), d(geo.size(), 1.0);
  std::vector<double> times;
  replay(geo, z, y, d, p, epochs, 2.0, [&](double t, std::span<const double> s) {
    times.push_back(t);
    CHECK(s.size() == geo.size());
  });
  CHECK(times == std::vector<double>{0.0, 2.0, 4.0, 5.0});
}

TEST_CASE("coupled chains differ by the dual weights applied to the initial difference") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Box b = s % 2 ? Box(Site{0, 0}, Site{3, 3}) : box1(0, 9);
    const Kernel k = s % 2 ? wide2d() : nn(1);
    const Geometry geo(b, k);
    std::mt19937_64 eng(s);
    const auto p = ModelParams::make(0.3 + 0.05 * static_cast<double>(s));
    const auto ys = geo.shell_values(random_field(geo.shell(), eng), "y");
    const auto ds = geo.box_values(random_field(geo.sites(), eng), "d");
    std::vector<double> z1 = geo.box_values(random_field(geo.sites(), eng, -3, 3), "z");
    std::vector<double> z2 = geo.box_values(random_field(geo.sites(), eng, -3, 3), "z");
    const auto start1 = z1, start2 = z2;
    const auto epochs = generate_epochs(b, 0.0, 4.0, p, 100 + s);
    replay(geo, z1, ys, ds, p, epochs);
    replay(geo, z2, ys, ds, p, epochs);
    for (std::size_t i = 0; i < geo.size(); ++i) {
      const auto w = backward_weights(geo, epochs, i, p);
      double expect = 0.0;
      for (const auto& [site, mass] : w.b_final) {
        const auto j = *b.index_of(site);
        expect += mass * (start1[j] - start2[j]);
      }
      CHECK(std::abs((z1[i] - z2[i]) - expect) <= 1e-9);
    }
  }
}

TEST_CASE("single-site stationary samples have mean 1 and variance sigma2") {
  const Box b = box1(0, 0);
  const Geometry geo(b, nn(1));
  const auto p = ModelParams::make(0.5, 0.5);
  const std::size_t n = 20000;
  const auto s = sample_stationary(b, zeros(geo.shell()), HeightField::single(Site{0}, 2.0), p, nn(1), 50.0, n, 2.0, 5);
  const double mean = s.col(0).mean();
  const double var = (s.col(0).array() - mean).square().sum() / static_cast<double>(n - 1);
  CHECK(std::abs(mean - 1.0) <= 5 * std::sqrt(0.5 / n));
  CHECK(std::abs(var - 0.5) <= 5 * std::sqrt(2 * 0.25 / n));
  const auto again = sample_stationary(b, zeros(geo.shell()), HeightField::single(Site{0}, 2.0), p, nn(1), 50.0, n, 2.0, 5);
  CHECK(again == s);
  CHECK(code_of([&] { sample_stationary(b, zeros(geo.shell()), zeros(geo.sites()), p, nn(1), 0.0, 1, 1.0, 1); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("heat-bath moves satisfy detailed balance against the Gibbs density") {
  const Box b = box1(0, 5);
  const Geometry geo(b, nn(1));
  std::mt19937_64 eng(21);
  const auto y = random_field(geo.shell(), eng), d = random_field(geo.sites(), eng);
  const auto p = ModelParams::make(0.5, 0.5);
  const auto spec = build_gaussian(b, y, d, p, nn(1));
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const auto x = random_field(geo.sites(), eng, -2, 2);
    const Site k = geo.sites()[static_cast<std::size_t>(t) % geo.size()];
    const auto law = conditional_law(k, y.merged(x), d.at(k), p, nn(1));
    const double new_v = law.mean + std::sqrt(law.variance) * g(eng);
    const auto x2 = x.merged(HeightField::single(k, new_v));
    auto log_q = [&](double to) {
      return -0.5 * std::log(2 * M_PI * law.variance) - (to - law.mean) * (to - law.mean) / (2 * law.variance);
    };
    const double lhs = spec.log_density(x) + log_q(new_v);
    const double rhs = spec.log_density(x2) + log_q(x.at(k));
    CHECK(std::abs(lhs - rhs) <= 1e-9);
  }
}
