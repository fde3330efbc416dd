// harness: config-driven runs over the C API, writing JSON/CSV artifacts and a
// manifest. Exit status: 0 success, 1 check failure or component error,
// 2 usage or config error.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "harness/harness.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kDualityTolerance = 1e-9;

// Exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Exit 1.
struct ComponentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(harness_status s) {
  if (s != HARNESS_OK) throw ComponentError(harness_last_error());
}

std::string take(char* s) {
  std::string out = s ? s : "";
  harness_string_free(s);
  return out;
}

json take_json(char* s) { return json::parse(take(s)); }

struct ModelDeleter {
  void operator()(harness_model* m) const { harness_model_destroy(m); }
};
struct EpochsDeleter {
  void operator()(harness_epochs* e) const { harness_epochs_destroy(e); }
};
struct GaussianDeleter {
  void operator()(harness_gaussian* g) const { harness_gaussian_destroy(g); }
};
using ModelPtr = std::unique_ptr<harness_model, ModelDeleter>;
using EpochsPtr = std::unique_ptr<harness_epochs, EpochsDeleter>;
using GaussianPtr = std::unique_ptr<harness_gaussian, GaussianDeleter>;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- config ---------------------------------------------------------------

const std::set<std::string> kTopKeys = {"command", "model", "geometry", "fields", "run", "output"};
const std::set<std::string> kRunKeys = {"seed",     "window",   "burn_in",        "thin",   "n_samples",
                                        "n_walks",  "tol",      "max_iter",       "method", "site",
                                        "infinite", "checks",   "snapshot_every", "n_states", "exact_samples"};
const std::set<std::string> kOutputKeys = {"directory", "formats"};

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

// --set a.b.c=value. The value is read as JSON when it parses as a scalar,
// otherwise as a string.
void apply_override(json& cfg, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects dotted.path=value, got '" + spec + "'");
  const std::string path = spec.substr(0, eq), raw = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  if (value.is_structured()) throw ConfigError("--set only overrides scalar leaves ('" + path + "')");

  json* node = &cfg;
  std::stringstream ss(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(ss, key, '.')) {
    if (key.empty()) throw ConfigError("empty component in --set path '" + path + "'");
    keys.push_back(key);
  }
  // Objects are entered by key (created on demand), arrays by index.
  auto step = [&](json* at, const std::string& k) -> json* {
    if (at->is_array()) {
      std::size_t used = 0, idx = 0;
      try {
        idx = std::stoul(k, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != k.size() || idx >= at->size()) throw ConfigError("--set path '" + path + "': bad index '" + k + "'");
      return &(*at)[idx];
    }
    if (at->is_null()) *at = json::object();
    if (!at->is_object()) throw ConfigError("--set path '" + path + "' crosses a scalar");
    return &(*at)[k];
  };
  for (const auto& k : keys) node = step(node, k);
  if (node->is_structured()) throw ConfigError("--set only overrides scalar leaves ('" + path + "')");
  *node = value;
}

void validate_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

struct Run {
  std::string command;
  json config;
  json run;
  ModelPtr model;
  fs::path out_dir;
  bool want_json = true;
  bool want_csv = true;
  int workers = 1;

  double number(const char* key, double fallback) const {
    if (!run.contains(key)) return fallback;
    if (!run.at(key).is_number()) throw ConfigError(std::string("run.") + key + " must be a number");
    return run.at(key).get<double>();
  }
  std::uint64_t count(const char* key, std::uint64_t fallback) const {
    if (!run.contains(key)) return fallback;
    if (!run.at(key).is_number_unsigned()) throw ConfigError(std::string("run.") + key + " must be a non-negative integer");
    return run.at(key).get<std::uint64_t>();
  }
  std::string text(const char* key, const std::string& fallback) const {
    if (!run.contains(key)) return fallback;
    if (!run.at(key).is_string()) throw ConfigError(std::string("run.") + key + " must be a string");
    return run.at(key).get<std::string>();
  }
  // Every stochastic command needs an explicit seed.
  std::uint64_t seed() const {
    if (!run.contains("seed"))
      throw ConfigError("ConfigInvalid: command '" + command + "' is stochastic and requires run.seed");
    if (!run.at("seed").is_number_unsigned()) throw ConfigError("ConfigInvalid: run.seed must be a non-negative integer");
    return run.at("seed").get<std::uint64_t>();
  }
};

// ---- model helpers --------------------------------------------------------

int dim_of(const Run& r) { return harness_model_dim(r.model.get()); }

std::vector<int> coords(const Run& r, bool shell) {
  const std::size_t n = shell ? harness_model_shell_count(r.model.get()) : harness_model_site_count(r.model.get());
  std::vector<int> c(n * static_cast<std::size_t>(dim_of(r)));
  check(shell ? harness_model_shell_coords(r.model.get(), c.data(), c.size())
              : harness_model_site_coords(r.model.get(), c.data(), c.size()));
  return c;
}

std::vector<int> parse_site(const Run& r, const json& j) {
  std::vector<int> s;
  if (j.is_number_integer()) s.push_back(j.get<int>());
  else if (j.is_array())
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw ConfigError("run.site coordinates must be integers");
      s.push_back(v.get<int>());
    }
  else throw ConfigError("run.site must be an integer array");
  if (s.size() != static_cast<std::size_t>(dim_of(r))) throw ConfigError("run.site has the wrong dimension");
  return s;
}

// run.site, or the box center.
std::vector<int> chosen_site(const Run& r) {
  if (r.run.contains("site")) return parse_site(r, r.run.at("site"));
  const json box = take_json([&] {
    char* s = nullptr;
    check(harness_model_describe(r.model.get(), &s));
    return s;
  }())["box"];
  std::vector<int> c;
  for (std::size_t k = 0; k < box["lower"].size(); ++k) {
    const int lo = box["lower"][k], hi = box["upper"][k];
    c.push_back(lo + (hi - lo) / 2);
  }
  return c;
}

std::string csv_header(int dim, const std::vector<std::string>& value_cols) {
  std::string h;
  for (int k = 0; k < dim; ++k) h += "x" + std::to_string(k) + ",";
  for (std::size_t c = 0; c < value_cols.size(); ++c) h += (c ? "," : "") + value_cols[c];
  return h + "\n";
}

// Rows of (site coords, values...).
std::string csv_rows(int dim, const std::vector<int>& c, const std::vector<std::vector<double>>& cols) {
  std::string out;
  const std::size_t n = cols.empty() ? 0 : cols.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) out += std::to_string(c[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)]) + ",";
    for (std::size_t j = 0; j < cols.size(); ++j) out += (j ? "," : "") + fmt(cols[j][i]);
    out += "\n";
  }
  return out;
}

// Column label for each site: s_<x0>_<x1>...
std::vector<std::string> site_labels(const std::vector<int>& c, int dim) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i + static_cast<std::size_t>(dim) <= c.size(); i += static_cast<std::size_t>(dim)) {
    std::string l = "s";
    for (int k = 0; k < dim; ++k) l += "_" + std::to_string(c[i + static_cast<std::size_t>(k)]);
    out.push_back(l);
  }
  return out;
}

// CSV of a serialized field {"sites": [...], "values": [...]}.
std::string field_csv(const json& field, const std::string& value_name) {
  std::string out;
  const auto& sites = field.at("sites");
  const int dim = sites.empty() ? 0 : static_cast<int>(sites[0].size());
  out += csv_header(dim, {value_name});
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (const auto& c : sites[i]) out += std::to_string(c.get<int>()) + ",";
    out += fmt(field.at("values")[i].get<double>()) + "\n";
  }
  return out;
}

// CSV of a mass list [{"site": [...], key: p}, ...].
std::string mass_csv(const json& list, int dim, const std::string& key, const std::string& column) {
  std::string out = csv_header(dim, {column});
  for (const auto& e : list) {
    for (const auto& c : e.at("site")) out += std::to_string(c.get<int>()) + ",";
    out += fmt(e.at(key).get<double>()) + "\n";
  }
  return out;
}

// ---- artifacts ------------------------------------------------------------

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (dir_ / name).string() + "'");
    out << content;
    if (!out) throw ConfigError("failed writing '" + (dir_ / name).string() + "'");
    entries_.push_back({{"path", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }

  // Self-describing JSON artifact.
  void write_json(const std::string& name, const std::string& schema, json payload) {
    json doc = {{"schema", "harness/" + schema + "/1"},
                {"site_order", "lexicographic"},
                {"units", "heights in the units of d and y; time in model time (rate-one clocks)"}};
    for (auto& [k, v] : payload.items()) doc[k] = std::move(v);
    write(name, doc.dump(2) + "\n");
  }

  const json& entries() const { return entries_; }

 private:
  fs::path dir_;
  json entries_ = json::array();
};

// ---- commands -------------------------------------------------------------

int cmd_ground_state(Run& r, Artifacts& out) {
  const std::string method = r.text("method", "exact");
  const double tol = r.number("tol", 1e-12);
  const auto max_iter = static_cast<int>(r.count("max_iter", 1000000));
  char* s = nullptr;
  check(harness_ground_state(r.model.get(), method.c_str(), tol, max_iter, &s));
  const json res = take_json(s);
  if (r.want_json) out.write_json("ground_state.json", "ground_state", {{"result", res}});
  if (r.want_csv) out.write("ground_state.csv", field_csv(res.at("m"), "m"));
  std::printf("ground-state: method=%s iterations=%d residual_inf=%s\n", method.c_str(), res.at("iterations").get<int>(),
              fmt(res.at("residual_inf").get<double>()).c_str());

  if (r.run.value("infinite", false)) {
    check(harness_ground_state_infinite(r.model.get(), tol, &s));
    const json inf = take_json(s);
    if (r.want_json) out.write_json("ground_state_infinite.json", "ground_state_infinite", {{"result", inf}});
    if (r.want_csv) out.write("ground_state_infinite.csv", field_csv(inf.at("m"), "m"));
    std::printf("ground-state (Z^d): terms=%d tail_bound=%s\n", inf.at("terms").get<int>(),
                fmt(inf.at("tail_bound").get<double>()).c_str());
  }
  return 0;
}

int cmd_kernel(Run& r, Artifacts& out) {
  const std::string method = r.text("method", "exact");
  const auto site = chosen_site(r);
  std::uint64_t seed = 0, n_walks = 0;
  if (method == "monte_carlo") {
    seed = r.seed();
    n_walks = r.count("n_walks", 100000);
  }
  char* s = nullptr;
  check(harness_kernel_row(r.model.get(), site.data(), method.c_str(), n_walks, seed, &s));
  const json row = take_json(s);
  const int dim = dim_of(r);
  if (r.want_json) out.write_json("kernel_row.json", "kernel_row", {{"row", row}});
  if (r.want_csv) {
    out.write("kernel_killed.csv", mass_csv(row.at("killed"), dim, "p", "K"));
    out.write("kernel_absorbed.csv", mass_csv(row.at("absorbed"), dim, "p", "absorbed"));
  }
  std::printf("kernel: method=%s total_mass=%s\n", method.c_str(), fmt(row.at("total_mass").get<double>()).c_str());
  return 0;
}

int cmd_simulate(Run& r, Artifacts& out) {
  const auto seed = r.seed();
  const double window = r.number("window", 10.0);
  const double every = r.number("snapshot_every", 0.0);
  if (!(window > 0.0)) throw ConfigError("run.window must be positive");
  if (every < 0.0) throw ConfigError("run.snapshot_every must be non-negative");

  harness_epochs* raw = nullptr;
  check(harness_epochs_generate(r.model.get(), 0.0, window, seed, &raw));
  EpochsPtr epochs(raw);
  const std::size_t n = harness_model_site_count(r.model.get());
  const int dim = dim_of(r);
  const auto c = coords(r, false);

  // Wide layout: one row per snapshot time, one column per site.
  std::string traj = "time";
  for (const auto& label : site_labels(c, dim)) traj += "," + label;
  traj += "\n";
  auto cb = [](double t, const double* v, size_t len, void* user) {
    auto* csv = static_cast<std::string*>(user);
    *csv += fmt(t);
    for (std::size_t i = 0; i < len; ++i) *csv += "," + fmt(v[i]);
    *csv += "\n";
  };
  std::vector<double> final_state(n);
  check(harness_simulate(r.model.get(), epochs.get(), nullptr, final_state.data(), n, every,
                         every > 0.0 ? +cb : nullptr, &traj));

  if (r.want_json) {
    char* s = nullptr;
    check(harness_epochs_to_json(epochs.get(), &s));
    out.write_json("epochs.json", "epochs", {{"epochs", take_json(s)}});
    out.write_json("simulate.json", "simulate",
                   {{"window", {0.0, window}},
                    {"seed", seed},
                    {"n_epochs", harness_epochs_count(epochs.get())},
                    {"final_state", final_state}});
  }
  if (r.want_csv) {
    out.write("final_state.csv", csv_header(dim, {"value"}) + csv_rows(dim, c, {final_state}));
    if (every > 0.0) out.write("trajectory.csv", traj);
  }
  std::printf("simulate: window=%s epochs=%zu\n", fmt(window).c_str(), harness_epochs_count(epochs.get()));
  return 0;
}

int cmd_dual_check(Run& r, Artifacts& out) {
  const auto seed = r.seed();
  const double window = r.number("window", 10.0);
  if (!(window > 0.0)) throw ConfigError("run.window must be positive");

  harness_epochs* raw = nullptr;
  check(harness_epochs_generate(r.model.get(), 0.0, window, seed, &raw));
  EpochsPtr epochs(raw);
  const std::size_t n = harness_model_site_count(r.model.get());
  std::vector<double> forward(n), backward(n), diff(n);
  check(harness_simulate(r.model.get(), epochs.get(), nullptr, forward.data(), n, 0.0, nullptr, nullptr));
  check(harness_reconstruct(r.model.get(), epochs.get(), nullptr, backward.data(), nullptr, n));
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = std::abs(forward[i] - backward[i]);
    worst = std::max(worst, diff[i]);
  }
  const bool passed = worst <= kDualityTolerance;
  const int dim = dim_of(r);
  if (r.want_csv)
    out.write("dual_check.csv",
              csv_header(dim, {"forward", "reconstructed", "abs_diff"}) + csv_rows(dim, coords(r, false), {forward, backward, diff}));
  if (r.want_json) {
    out.write_json("dual_check.json", "dual_check",
                   {{"report",
                     {{"name", "duality"},
                      {"statistic", worst},
                      {"threshold", kDualityTolerance},
                      {"passed", passed},
                      {"details", {{"sites", n}, {"window", window}, {"seed", seed}, {"n_epochs", harness_epochs_count(epochs.get())}}}}}});
    if (r.run.contains("site")) {
      const auto site = parse_site(r, r.run.at("site"));
      char* s = nullptr;
      check(harness_backward_weights(r.model.get(), epochs.get(), site.data(), &s));
      out.write_json("weights.json", "weight_table", {{"weights", take_json(s)}});
    }
  }
  std::printf("dual-check: max |forward - reconstructed| = %s (threshold %s) %s\n", fmt(worst).c_str(),
              fmt(kDualityTolerance).c_str(), passed ? "PASS" : "FAIL");
  return passed ? 0 : 1;
}

// Canonical check order. The position of a check fixes its seed substream,
// so a check's report does not depend on which others run with it.
const std::vector<std::string> kAllChecks = {
    "stationary-law", "ergodic-forgetting", "variance-bound", "survival-mass", "thermo-limit", "beta-scaling",
    "duality",        "detailed-balance",   "dlr",            "minimizer",     "ground-state-agreement",
    "kernel-row-mc"};
const std::vector<std::string> kGibbsChecks = {"stationary-law", "detailed-balance", "dlr", "beta-scaling",
                                               "minimizer"};
// run keys forwarded to every check that understands them.
const std::vector<std::string> kForwarded = {"n_samples", "burn_in", "thin", "tol", "n_walks", "window", "n_states"};

json check_options(const Run& r, const std::string& name, std::size_t stream, std::uint64_t seed) {
  json o = json::object();
  // The variance and survival checks treat their box as Z^d. The backward walk
  // makes about Poisson(u) jumps, so at half-width 24 and u <= 5 it leaves the
  // box with probability ~1e-10 per window.
  if (name == "variance-bound" || name == "survival-mass") o["half_width"] = 24;
  for (const auto& k : kForwarded)
    if (r.run.contains(k)) o[k] = r.run.at(k);
  if (r.run.contains("checks") && r.run.at("checks").is_object() && r.run.at("checks").contains(name)) {
    const json& extra = r.run.at("checks").at(name);
    if (!extra.is_object()) throw ConfigError("run.checks." + name + " must be an object");
    for (const auto& [k, v] : extra.items()) o[k] = v;
  }
  o["seed"] = harness_derive_seed(seed, stream);
  return o;
}

std::vector<std::string> selected_checks(const Run& r, const std::vector<std::string>& fallback) {
  if (!r.run.contains("checks")) return fallback;
  const json& c = r.run.at("checks");
  std::vector<std::string> names;
  if (c.is_array()) {
    for (const auto& v : c) {
      if (!v.is_string()) throw ConfigError("run.checks must list check names");
      names.push_back(v.get<std::string>());
    }
  } else if (c.is_object()) {
    // An object only adds per-check options; the command's list stands.
    return fallback;
  } else {
    throw ConfigError("run.checks must be an array of names or an object of options");
  }
  for (const auto& n : names)
    if (std::find(kAllChecks.begin(), kAllChecks.end(), n) == kAllChecks.end())
      throw ConfigError("unknown check '" + n + "'");
  return names;
}

int run_checks(Run& r, Artifacts& out, const std::vector<std::string>& names) {
  const auto seed = r.seed();
  std::vector<json> opts;
  for (const auto& n : names) {
    const auto stream = static_cast<std::size_t>(std::find(kAllChecks.begin(), kAllChecks.end(), n) - kAllChecks.begin());
    opts.push_back(check_options(r, n, stream, seed));
  }

  // Checks are independent: run them concurrently, collect by position.
  std::vector<json> results(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < names.size(); k = next++) {
      char* s = nullptr;
      const std::string o = opts[k].dump();
      const harness_status st = harness_check(r.model.get(), names[k].c_str(), o.c_str(), &s);
      if (st == HARNESS_OK) {
        json j = take_json(s);
        results[k] = j.is_array() ? j : json::array({j});
      } else {
        results[k] = json::array({{{"name", names[k]},
                                   {"statistic", "nan"},
                                   {"threshold", "nan"},
                                   {"passed", false},
                                   {"details", {{"error", harness_last_error()}, {"status", harness_status_name(st)}}}}});
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(r.workers), names.size());
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
  }

  std::string lines;
  bool all_passed = true;
  std::printf("%-28s %-24s %-24s %s\n", "check", "statistic", "threshold", "result");
  for (std::size_t k = 0; k < names.size(); ++k) {
    for (auto& rep : results[k]) {
      rep["details"]["options"] = opts[k];
      lines += rep.dump() + "\n";
      const bool ok = rep.at("passed").get<bool>();
      all_passed = all_passed && ok;
      auto show = [](const json& v) { return v.is_number() ? fmt(v.get<double>()) : v.get<std::string>(); };
      std::printf("%-28s %-24s %-24s %s\n", rep.at("name").get<std::string>().c_str(), show(rep.at("statistic")).c_str(),
                  show(rep.at("threshold")).c_str(), ok ? "PASS" : "FAIL");
      if (rep["details"].contains("error"))
        std::printf("  error: %s\n", rep["details"]["error"].get<std::string>().c_str());
    }
  }
  if (r.want_json) out.write("reports.jsonl", lines);
  std::printf("%s\n", all_passed ? "all checks passed" : "some checks FAILED");
  return all_passed ? 0 : 1;
}

int cmd_gibbs_verify(Run& r, Artifacts& out) {
  harness_gaussian* raw = nullptr;
  check(harness_gaussian_create(r.model.get(), &raw));
  GaussianPtr spec(raw);
  if (r.want_json) {
    char* s = nullptr;
    check(harness_gaussian_to_json(spec.get(), &s));
    out.write_json("gaussian_spec.json", "gaussian_spec", {{"spec", take_json(s)}});
  }
  if (const auto n = r.count("exact_samples", 0); n > 0 && r.want_csv) {
    // Exact draws, seeded off the same master seed as the checks.
    const std::size_t sites = harness_model_site_count(r.model.get());
    std::vector<double> draws(n * sites);
    check(harness_gaussian_sample(spec.get(), n, harness_derive_seed(r.seed(), kAllChecks.size()), draws.data(),
                                  draws.size()));
    std::string csv = "sample";
    for (const auto& label : site_labels(coords(r, false), dim_of(r))) csv += "," + label;
    csv += "\n";
    for (std::size_t k = 0; k < n; ++k) {
      csv += std::to_string(k);
      for (std::size_t i = 0; i < sites; ++i) csv += "," + fmt(draws[k * sites + i]);
      csv += "\n";
    }
    out.write("gaussian_samples.csv", csv);
  }
  return run_checks(r, out, selected_checks(r, kGibbsChecks));
}

int cmd_full_suite(Run& r, Artifacts& out) { return run_checks(r, out, selected_checks(r, kAllChecks)); }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int workers_from_env() {
  const char* env = std::getenv("HARNESS_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long w = std::strtol(env, &end, 10);
  if (*end != '\0' || w < 1 || w > 1024) throw ConfigError("HARNESS_WORKERS must be an integer in [1, 1024]");
  return static_cast<int>(w);
}

int run(const std::string& command, const std::string& config_path, const std::vector<std::string>& sets) {
  Run r;
  r.command = command;
  r.config = read_config(config_path);
  if (!r.config.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& s : sets) apply_override(r.config, s);
  if (r.config.contains("command") && r.config.at("command") != command)
    throw ConfigError("config is for command '" + r.config.at("command").dump() + "', not '" + command + "'");
  r.config["command"] = command;
  validate_keys(r.config, kTopKeys, "config");
  r.run = r.config.value("run", json::object());
  validate_keys(r.run, kRunKeys, "run");
  const json output = r.config.value("output", json::object());
  validate_keys(output, kOutputKeys, "output");

  r.workers = workers_from_env();
  harness_set_workers(r.workers);

  if (output.contains("formats")) {
    const json& f = output.at("formats");
    if (!f.is_array()) throw ConfigError("output.formats must be an array");
    r.want_json = r.want_csv = false;
    for (const auto& v : f) {
      if (v == "json") r.want_json = true;
      else if (v == "csv") r.want_csv = true;
      else throw ConfigError("output.formats entries must be \"json\" or \"csv\"");
    }
  }
  const json dir = output.value("directory", json("harness_out"));
  if (!dir.is_string()) throw ConfigError("output.directory must be a string");
  r.out_dir = dir.get<std::string>();

  harness_model* raw = nullptr;
  const std::string cfg_text = r.config.dump();
  if (harness_model_create(cfg_text.c_str(), &raw) != HARNESS_OK) throw ConfigError(harness_last_error());
  r.model.reset(raw);

  std::error_code ec;
  fs::create_directories(r.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + r.out_dir.string() + "': " + ec.message());

  Artifacts out(r.out_dir);
  int status = 0;
  if (command == "ground-state") status = cmd_ground_state(r, out);
  else if (command == "kernel") status = cmd_kernel(r, out);
  else if (command == "simulate") status = cmd_simulate(r, out);
  else if (command == "dual-check") status = cmd_dual_check(r, out);
  else if (command == "gibbs-verify") status = cmd_gibbs_verify(r, out);
  else status = cmd_full_suite(r, out);

  const json manifest = {{"schema", "harness/manifest/1"},
                         {"tool", "harness"},
                         {"version", harness_version()},
                         {"command", command},
                         {"created_utc", utc_now()},
                         {"workers", r.workers},
                         {"exit_status", status},
                         {"config", r.config},
                         {"artifacts", out.entries()}};
  std::ofstream mf(r.out_dir / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << "\n";
  if (!mf) throw ConfigError("cannot write manifest");
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harness process experiments: ground states, dynamics, duality and Gibbs checks."};
  app.set_version_flag("--version", std::string(harness_version()));
  std::string command, config;
  std::vector<std::string> sets;
  app.add_option("command", command, "ground-state | kernel | simulate | dual-check | gibbs-verify | full-suite")
      ->required()
      ->check(CLI::IsMember({"ground-state", "kernel", "simulate", "dual-check", "gibbs-verify", "full-suite"}));
  app.add_option("--config", config, "Run config (JSON)")->required();
  app.add_option("--set", sets, "Override a scalar config leaf: dotted.path=value (repeatable)");
  app.footer("Environment: HARNESS_WORKERS sets the worker count.\n"
             "Exit status: 0 success, 1 check failure or component error, 2 usage or config error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(command, config, sets);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "harness: %s\n", e.what());
    return 2;
  } catch (const ComponentError& e) {
    std::fprintf(stderr, "harness: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "harness: %s\n", e.what());
    return 1;
  }
}
