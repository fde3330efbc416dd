// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "harness/dual.hpp"
#include "harness/ground_state.hpp"
#include "harness/parallel.hpp"
#include "harness/rng.hpp"
#include "harness/verify.hpp"

using namespace harness;

namespace {

struct Outcome {
  bool passed = true;
  std::string summary;
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // <= 0: no runtime limit
  std::function<Outcome()> run;
};

HeightField uniform_field(std::span<const Site> sites, std::mt19937_64& eng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(sites.size());
  for (double& x : v) x = u(eng);
  return HeightField(std::vector<Site>(sites.begin(), sites.end()), v);
}

// Symmetric 2D kernel with jumps of length 2 as well as 1.
Kernel wide2d() {
  std::map<Site, double> raw;
  for (int s : {-1, 1}) {
    raw[Site{s, 0}] = raw[Site{0, s}] = 0.15;
    raw[Site{2 * s, 0}] = raw[Site{0, 2 * s}] = 0.05;
    raw[Site{s, s}] = raw[Site{s, -s}] = 0.05;
  }
  return Kernel::validate(raw, 3);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Instance {
  Box box;
  Kernel kernel;
  HeightField y, d, z;
};

Instance random_instance(std::mt19937_64& eng, bool two_d, int max_side_1d, int max_side_2d) {
  std::uniform_int_distribution<int> side1(6, max_side_1d), side2(2, max_side_2d);
  Box box = two_d ? Box(Site{0, 0}, Site{side2(eng) - 1, side2(eng) - 1}) : Box(Site{0}, Site{side1(eng) - 1});
  Kernel k = two_d ? (std::bernoulli_distribution(0.5)(eng) ? wide2d() : Kernel::nearest_neighbor(2))
                   : Kernel::nearest_neighbor(1);
  const Geometry geo(box, k);
  auto y = uniform_field(geo.shell(), eng, -3, 3);
  auto d = uniform_field(geo.sites(), eng, -3, 3);
  auto z = uniform_field(geo.sites(), eng, -3, 3);
  return {box, k, y, d, z};
}

Outcome duality() {
  std::mt19937_64 eng(1001);
  const double alphas[] = {0.2, 0.5, 0.8};
  double worst = 0.0;
  std::size_t sites = 0, epochs = 0;
  Outcome o;
  for (int k = 0; k < 50; ++k) {
    const auto in = random_instance(eng, k % 2 == 1, 20, 8);
    const auto p = ModelParams::make(alphas[k % 3], std::uniform_real_distribution<double>(0.2, 2.0)(eng));
    const double window = std::uniform_real_distribution<double>(5.0, 20.0)(eng);
    const auto r = check_duality(in.box, in.z, in.y, in.d, p, in.kernel, window, derive_seed(1001, k), default_workers());
    worst = std::max(worst, r.statistic);
    sites += r.details["sites"].get<std::size_t>();
    epochs += r.details["epochs"].get<std::size_t>();
    o.passed = o.passed && r.passed;
  }
  o.summary = "50 instances, " + std::to_string(sites) + " sites, " + std::to_string(epochs) +
              " epochs, max |forward - dual| = " + fmt("%.3g", worst) + " (<= 1e-9)";
  return o;
}

Outcome stationary_law() {
  const Box box(Site{0}, Site{7});
  const Kernel k = Kernel::nearest_neighbor(1);
  const Geometry geo(box, k);
  std::vector<double> ramp(geo.size());
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.5 * static_cast<double>(i) - 1.0;
  const HeightField d(std::vector<Site>(geo.sites().begin(), geo.sites().end()), ramp);
  const HeightField y = HeightField::constant(geo.shell(), 0.0);
  const auto p = ModelParams::make(0.5, 0.5);
  const auto good = check_stationary_law(box, y, d, p, k, 100000, 2002);
  StationaryOptions wrong;
  wrong.oracle_sigma2 = 1.0;
  const auto control = check_stationary_law(box, y, d, p, k, 100000, 2002, wrong);
  return {good.passed && !control.passed,
          "1e5 samples, max z = " + fmt("%.3f", good.statistic) + " (<= 5); sigma2 = 1 oracle max z = " +
              fmt("%.1f", control.statistic) + (control.passed ? " (control PASSED, wrong)" : " (control rejected)")};
}

Outcome ground_state_agreement() {
  std::mt19937_64 eng(3003);
  Outcome o;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto in = random_instance(eng, k % 2 == 1, 20, 6);
    const auto p = ModelParams::make(std::uniform_real_distribution<double>(0.1, 0.95)(eng));
    const auto r = check_ground_state_agreement(in.box, in.y, in.d, p, in.kernel, 1e-12);
    worst = std::max(worst, r.statistic);
    o.passed = o.passed && r.passed;
  }
  double worst_z = 0.0;
  struct Row {
    Box box;
    Kernel kernel;
    double alpha;
    Site site;
  };
  const std::vector<Row> rows = {{Box(Site{-4}, Site{4}), Kernel::nearest_neighbor(1), 0.5, Site{0}},
                                 {Box(Site{0}, Site{5}), Kernel::nearest_neighbor(1), 0.8, Site{0}},
                                 {Box(Site{0, 0}, Site{3, 3}), Kernel::nearest_neighbor(2), 0.6, Site{1, 2}},
                                 {Box(Site{0, 0}, Site{4, 4}), wide2d(), 0.7, Site{2, 2}}};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = check_kernel_row_mc(rows[k].box, ModelParams::make(rows[k].alpha), rows[k].kernel, rows[k].site,
                                       100000, derive_seed(3003, 100 + k), default_workers());
    worst_z = std::max(worst_z, r.statistic);
    o.passed = o.passed && r.passed;
  }
  o.summary = "20 instances, max pairwise diff = " + fmt("%.3g", worst) + " (<= 2e-12 or 1e-8); " +
              std::to_string(rows.size()) + " Monte Carlo rows (1e5 walks), max z = " + fmt("%.3f", worst_z) + " (<= 5)";
  return o;
}

Outcome spot_values() {
  const auto r = ground_state_infinite(HeightField::single(Site{0}, 1.0), ModelParams::make(0.5),
                                       Kernel::nearest_neighbor(1), 1e-12);
  const double m0 = r.m.at(Site{0}), mp = r.m.at(Site{1}), mm = r.m.at(Site{-1});
  const double want0 = 1.0 / std::sqrt(3.0), want1 = (2.0 - std::sqrt(3.0)) / std::sqrt(3.0);
  const double err = std::max({std::abs(m0 - want0), std::abs(mp - want1), std::abs(mm - want1)});
  return {err <= 1e-9, "m(0) = " + fmt("%.9f", m0) + ", m(+1) = " + fmt("%.9f", mp) + ", m(-1) = " + fmt("%.9f", mm) +
                           ", max error " + fmt("%.2g", err) + " (<= 1e-9), " + std::to_string(r.terms) +
                           " Neumann terms, tail bound " + fmt("%.2g", r.tail_bound)};
}

Outcome variance_and_survival() {
  Outcome o;
  std::string parts;
  std::vector<double> windows(10000);
  for (std::size_t k = 0; k < windows.size(); ++k) windows[k] = 5.0 * static_cast<double>(k + 1) / windows.size();
  for (double alpha : {0.5, 0.9}) {
    const auto p = ModelParams::make(alpha, 0.5);
    const auto r = check_variance_bound(Box::centered(1, 30), p, Kernel::nearest_neighbor(1), windows, 5005);
    o.passed = o.passed && r.passed;
    parts += "alpha " + fmt("%.1f", alpha) + ": max var " + fmt("%.6f", r.statistic) + " <= " +
             fmt("%.6f", r.details["bound"].get<double>()) + "; ";
  }
  const auto s = check_survival_mass(Box::centered(1, 30), ModelParams::make(0.5), Kernel::nearest_neighbor(1), 2.0,
                                     10000, 5006);
  o.passed = o.passed && s.passed;
  o.summary = parts + "survival mean " + fmt("%.5f", s.details["mean"].get<double>()) + " vs e^-1, z = " +
              fmt("%.3f", s.statistic) + " (<= 5)";
  return o;
}

Outcome balance_and_dlr() {
  Outcome o;
  double worst = 0.0;
  std::size_t interior = 0, boundary = 0;
  std::mt19937_64 eng(6006);
  const std::vector<std::pair<Box, Kernel>> setups = {{Box(Site{0}, Site{7}), Kernel::nearest_neighbor(1)},
                                                      {Box(Site{0, 0}, Site{5, 5}), wide2d()}};
  for (std::size_t k = 0; k < setups.size(); ++k) {
    const auto& [box, kernel] = setups[k];
    const Geometry geo(box, kernel);
    const auto y = uniform_field(geo.shell(), eng, -2, 2), d = uniform_field(geo.sites(), eng, -2, 2);
    const auto p = ModelParams::make(0.6, 0.7);
    const auto db = check_detailed_balance(box, y, d, p, kernel, 1000, derive_seed(6006, 2 * k));
    const auto dlr = check_dlr(box, y, d, p, kernel, 1000, derive_seed(6006, 2 * k + 1));
    interior += db.details["interior_moves"].get<std::size_t>();
    boundary += db.details["boundary_adjacent_moves"].get<std::size_t>();
    worst = std::max({worst, db.statistic, dlr.statistic});
    o.passed = o.passed && db.passed && dlr.passed && dlr.details["max_interior_residual"].get<double>() <= 1e-9 &&
               dlr.details["max_boundary_adjacent_residual"].get<double>() <= 1e-9;
  }
  o.passed = o.passed && interior > 0 && boundary > 0;
  o.summary = "2 boxes x 1e3 states, " + std::to_string(interior) + " interior and " + std::to_string(boundary) +
              " boundary-adjacent moves, max residual " + fmt("%.3g", worst) + " (<= 1e-9)";
  return o;
}

Outcome thermo_limit() {
  const auto r = check_thermo_limit(HeightField::single(Site{0}, 1.0), {0.0, 7.0}, ModelParams::make(0.5),
                                    Kernel::nearest_neighbor(1), {4, 8, 16, 32}, 1e-12);
  const auto& table = r.limit.details["table"];
  const double v0 = table[0]["boxes"].back()["value"].get<double>();
  const double v7 = table[1]["boxes"].back()["value"].get<double>();
  const double gap = std::abs(v0 - v7);
  std::string seq;
  for (const auto& b : table[1]["boxes"]) seq += fmt("%.3g ", std::abs(b["r_box"].get<double>()));
  return {gap <= 1e-6 && r.limit.passed && r.washout.passed,
          "half-width 32: y=0 -> " + fmt("%.12f", v0) + ", y=7 -> " + fmt("%.12f", v7) + ", gap " + fmt("%.2g", gap) +
              " (<= 1e-6); |r_box| at y=7: " + seq + "(max ratio to 7 alpha^dist " + fmt("%.3g", r.washout.statistic) +
              " <= 1)"};
}

Outcome beta_scaling() {
  Outcome o;
  double worst = 0.0;
  std::mt19937_64 eng(8008);
  for (int k = 0; k < 4; ++k) {
    const auto in = random_instance(eng, k % 2 == 1, 12, 5);
    for (double beta : {0.25, 1.0, 4.0}) {
      const auto r = check_beta_scaling(in.box, in.y, in.d, 0.5 + 0.1 * k, in.kernel, beta);
      worst = std::max(worst, r.statistic);
      o.passed = o.passed && r.passed;
    }
  }
  o.summary = "4 instances x beta {0.25, 1, 4}, max mean/relative covariance violation " + fmt("%.3g", worst) +
              " (<= 1e-10)";
  return o;
}

Outcome minimizer() {
  Outcome o;
  double grad = 0.0, fd = 0.0, bad = 0.0;
  std::mt19937_64 eng(9009);
  for (int k = 0; k < 6; ++k) {
    const auto in = random_instance(eng, k % 2 == 1, 16, 6);
    const auto p = ModelParams::make(std::uniform_real_distribution<double>(0.1, 0.9)(eng));
    const auto reps = check_minimizer(in.box, in.y, in.d, p, in.kernel, 100, derive_seed(9009, k));
    grad = std::max(grad, reps[0].statistic);
    fd = std::max(fd, reps[1].statistic);
    bad += reps[2].statistic;
    for (const auto& r : reps) o.passed = o.passed && r.passed;
  }
  o.summary = "6 instances: |grad H(m)|_inf = " + fmt("%.3g", grad) + " (<= 1e-9), finite-difference error " +
              fmt("%.3g", fd) + " (<= 1e-5), " + fmt("%.0f", bad) + " non-increasing perturbations of 600";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "duality identity", 30.0, duality},
      {2, "stationary law", 60.0, stationary_law},
      {3, "ground-state triple agreement", 60.0, ground_state_agreement},
      {4, "closed-form spot values", 0.0, spot_values},
      {5, "variance bound and survival mass", 0.0, variance_and_survival},
      {6, "detailed balance and DLR", 0.0, balance_and_dlr},
      {7, "thermodynamic insensitivity", 0.0, thermo_limit},
      {8, "beta scaling", 0.0, beta_scaling},
      {9, "gradient and minimizer", 0.0, minimizer},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.2f s", secs);
    if (c.budget_s > 0.0) {
      timing += fmt(" of %.0f s", c.budget_s);
      if (secs >= c.budget_s) {
        o.passed = false;
        timing += " OVER BUDGET";
      }
    }
    failed += !o.passed;
    std::printf("%s  criterion %d  %-34s %s [%s]\n", o.passed ? "PASS" : "FAIL", c.id, c.title, o.summary.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
