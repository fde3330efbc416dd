#include "harness/io.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "harness/error.hpp"
#include "harness/rng.hpp"

namespace harness::io {

namespace {

constexpr const char* kModule = "io";

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, kModule, msg); }

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) bad(std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

Site parse_offset_key(const std::string& key) {
  std::vector<int> coords;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      coords.push_back(std::stoi(part, &used));
      if (used != part.size() && part.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      bad("offset key '" + key + "' is not a comma-separated integer list");
    }
  }
  if (coords.empty()) bad("empty offset key");
  return Site(std::span<const int>(coords));
}

std::string offset_key(const Site& s) {
  std::string out;
  for (int k = 0; k < s.dim(); ++k) {
    if (k) out += ",";
    out += std::to_string(s[k]);
  }
  return out;
}

// Mixes the coordinates into one 64-bit stream id.
std::uint64_t site_stream(const Site& s) {
  std::uint64_t h = static_cast<std::uint64_t>(s.dim());
  for (int k = 0; k < s.dim(); ++k) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(s[k])));
  return h;
}

json mass_list(const std::map<Site, double>& m, const char* key) {
  json arr = json::array();
  for (const auto& [s, p] : m) arr.push_back({{"site", site_to_json(s)}, {key, p}});
  return arr;
}

}  // namespace

Site site_from_json(const json& j) {
  if (j.is_number_integer()) return Site{j.get<int>()};
  if (!j.is_array() || j.empty()) bad("site must be a non-empty integer array");
  std::vector<int> c;
  for (const auto& v : j) {
    if (!v.is_number_integer()) bad("site coordinates must be integers");
    c.push_back(v.get<int>());
  }
  if (c.size() > static_cast<std::size_t>(kMaxDim)) bad("site has more than " + std::to_string(kMaxDim) + " coordinates");
  return Site(std::span<const int>(c));
}

json site_to_json(const Site& s) {
  json arr = json::array();
  for (int v : s.coords()) arr.push_back(v);
  return arr;
}

Kernel kernel_from_json(const json& j) {
  if (!j.is_object()) bad("kernel must be an object");
  if (j.contains("type")) {
    if (j.at("type") != "nearest-neighbor") bad("unknown kernel type");
    return Kernel::nearest_neighbor(static_cast<int>(number(j, "dim")));
  }
  if (!j.contains("offsets") || !j.at("offsets").is_object()) bad("kernel needs an 'offsets' object");
  const int range = static_cast<int>(number(j, "range"));
  std::map<Site, double> raw;
  for (const auto& [key, w] : j.at("offsets").items()) {
    if (!w.is_number()) bad("kernel weight for '" + key + "' must be a number");
    const Site v = parse_offset_key(key);
    if (raw.count(v)) bad("offset '" + key + "' listed twice");
    raw[v] = w.get<double>();
  }
  if (j.contains("dim")) {
    const int dim = static_cast<int>(number(j, "dim"));
    for (const auto& [v, w] : raw)
      if (v.dim() != dim) bad("offset " + v.to_string() + " does not have dimension " + std::to_string(dim));
  }
  return Kernel::validate(raw, range);
}

json kernel_to_json(const Kernel& k) {
  json offsets = json::object();
  for (const Jump& jmp : k.jumps()) offsets[offset_key(jmp.offset)] = jmp.weight;
  return {{"dim", k.dim()}, {"range", k.range()}, {"offsets", offsets}};
}

HeightField field_from_json(const json& j, std::span<const Site> domain) {
  if (j.is_number()) return HeightField::constant(domain, j.get<double>());
  if (!j.is_object()) bad("field must be an object or a number");
  if (j.contains("sites")) {
    if (!j.contains("values") || !j.at("sites").is_array() || !j.at("values").is_array())
      bad("field literal needs 'sites' and 'values' arrays");
    std::vector<Site> sites;
    std::vector<double> values;
    for (const auto& s : j.at("sites")) sites.push_back(site_from_json(s));
    for (const auto& v : j.at("values")) {
      if (!v.is_number()) bad("field values must be numbers");
      values.push_back(v.get<double>());
    }
    if (sites.size() != values.size()) bad("field literal has mismatched 'sites' and 'values'");
    return HeightField(std::move(sites), std::move(values));
  }
  if (!j.contains("generator") || !j.at("generator").is_string()) bad("field needs 'sites' or 'generator'");
  const std::string gen = j.at("generator").get<std::string>();
  std::vector<double> values(domain.size(), 0.0);
  if (gen == "constant") {
    std::fill(values.begin(), values.end(), number(j, "value"));
  } else if (gen == "ramp") {
    const double slope = number(j, "slope"), offset = number_or(j, "offset", 0.0);
    const int axis = static_cast<int>(number_or(j, "axis", 0.0));
    for (std::size_t i = 0; i < domain.size(); ++i) {
      if (axis < 0 || axis >= domain[i].dim()) bad("ramp axis out of range");
      values[i] = offset + slope * domain[i][axis];
    }
  } else if (gen == "delta") {
    if (!j.contains("site")) bad("delta generator needs 'site'");
    const Site at = site_from_json(j.at("site"));
    const double v = number_or(j, "value", 1.0);
    for (std::size_t i = 0; i < domain.size(); ++i)
      if (domain[i] == at) values[i] = v;
  } else if (gen == "random") {
    const double lo = number_or(j, "low", -1.0), hi = number_or(j, "high", 1.0);
    if (!(lo < hi)) bad("random generator needs low < high");
    if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) bad("random generator needs a non-negative integer 'seed'");
    const auto seed = j.at("seed").get<std::uint64_t>();
    for (std::size_t i = 0; i < domain.size(); ++i) {
      Engine eng = make_engine(seed, site_stream(domain[i]));
      values[i] = std::uniform_real_distribution<double>(lo, hi)(eng);
    }
  } else {
    bad("unknown field generator '" + gen + "'");
  }
  return HeightField(std::vector<Site>(domain.begin(), domain.end()), std::move(values));
}

json field_to_json(const HeightField& f) {
  json sites = json::array(), values = json::array();
  for (const Site& s : f.sites()) sites.push_back(site_to_json(s));
  for (double v : f.values()) values.push_back(v);
  return {{"site_order", "lexicographic"}, {"sites", sites}, {"values", values}};
}

Box box_from_json(const json& j, int dim) {
  if (j.is_object() && j.contains("half_width")) return Box::centered(dim, static_cast<int>(number(j, "half_width")));
  if (!j.is_object() || !j.contains("lower") || !j.contains("upper")) bad("box needs 'lower' and 'upper' (or 'half_width')");
  const Site lo = site_from_json(j.at("lower")), hi = site_from_json(j.at("upper"));
  if (lo.dim() != dim || hi.dim() != dim) bad("box corners must have dimension " + std::to_string(dim));
  return Box(lo, hi);
}

json box_to_json(const Box& b) { return {{"lower", site_to_json(b.lower())}, {"upper", site_to_json(b.upper())}}; }

json to_json(const EnergyBreakdown& e) {
  return {{"pair_interior", e.pair_interior}, {"pair_boundary", e.pair_boundary}, {"data_term", e.data_term},
          {"total", e.total}};
}

json to_json(const KernelRow& row) {
  json j = {{"start", site_to_json(row.start)},
            {"method", std::string(method_name(row.method))},
            {"killed", mass_list(row.killed, "p")},
            {"absorbed", mass_list(row.absorbed, "p")},
            {"truncation_mass", row.truncation_mass},
            {"total_mass", row.total_mass()}};
  if (row.method == GroundStateMethod::monte_carlo) j["n_walks"] = row.n_walks;
  return j;
}

json to_json(const DecayReport& r) {
  return {{"worst_slack", r.worst_slack}, {"worst_site", site_to_json(r.worst_site)}, {"entries", r.entries}};
}

json to_json(const GroundStateResult& r) {
  json j = {{"method", std::string(method_name(r.method))},
            {"iterations", r.iterations},
            {"residual_inf", r.residual_inf}};
  j["m"] = field_to_json(r.m);
  return j;
}

json to_json(const InfiniteGroundState& r) {
  return {{"method", "neumann"}, {"terms", r.terms}, {"tail_bound", r.tail_bound}, {"m", field_to_json(r.m)}};
}

json to_json(const EpochList& epochs) {
  json arr = json::array();
  for (const Epoch& e : epochs.epochs) arr.push_back({{"site", site_to_json(e.site)}, {"time", e.time}, {"noise", e.noise}});
  return {{"window", {epochs.start, epochs.end}}, {"seed", epochs.seed}, {"epochs", arr}};
}

EpochList epochs_from_json(const json& j) {
  if (!j.is_object() || !j.contains("window") || !j.contains("epochs")) bad("epoch list needs 'window' and 'epochs'");
  const json& w = j.at("window");
  if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) bad("window must be [start, end]");
  EpochList out;
  out.start = w[0].get<double>();
  out.end = w[1].get<double>();
  if (out.start > out.end) bad("window start exceeds end");
  out.seed = j.value("seed", std::uint64_t{0});
  for (const auto& e : j.at("epochs")) {
    Epoch ep{site_from_json(e.at("site")), number(e, "time"), number(e, "noise")};
    if (ep.time < out.start || ep.time > out.end) bad("epoch time outside the window");
    if (!out.epochs.empty()) {
      const Epoch& prev = out.epochs.back();
      if (ep.time < prev.time || (ep.time == prev.time && !(prev.site < ep.site))) bad("epochs are not sorted by time");
    }
    out.epochs.push_back(ep);
  }
  return out;
}

json to_json(const WeightTable& w) {
  std::map<std::size_t, json> per_epoch;
  auto slot = [&](std::size_t e) -> json& {
    auto [it, fresh] = per_epoch.try_emplace(e);
    if (fresh) it->second = json::object();
    return it->second;
  };
  for (const EpochMass& e : w.alive) {
    slot(e.epoch)["site"] = site_to_json(e.site);
    slot(e.epoch)["alive"] = e.mass;
  }
  for (const EpochMass& e : w.killed) slot(e.epoch)["killed"] = e.mass;
  for (const EpochMass& e : w.absorbed) {
    json& s = slot(e.epoch);
    if (!s.contains("absorbed")) s["absorbed"] = json::array();
    s["absorbed"].push_back({{"site", site_to_json(e.site)}, {"mass", e.mass}});
  }
  json epochs = json::object();
  for (auto& [idx, v] : per_epoch) epochs[std::to_string(idx)] = std::move(v);
  return {{"origin", site_to_json(w.origin)},
          {"window", {w.start, w.end}},
          {"b_final", mass_list(w.b_final, "mass")},
          {"epochs", epochs},
          {"pruned", w.pruned},
          {"total_mass", w.total_mass()}};
}

json to_json(const Reconstruction& r) {
  return {{"value", r.value}, {"noise", r.noise}, {"data", r.data}, {"boundary", r.boundary}, {"initial", r.initial}};
}

json to_json(const GaussianSpec& spec) {
  json sites = json::array(), mean = json::array(), cov = json::array();
  for (const Site& s : spec.sites()) sites.push_back(site_to_json(s));
  for (Eigen::Index i = 0; i < spec.mean().size(); ++i) mean.push_back(spec.mean()(i));
  for (Eigen::Index i = 0; i < spec.covariance().rows(); ++i)
    for (Eigen::Index k = 0; k < spec.covariance().cols(); ++k) cov.push_back(spec.covariance()(i, k));
  return {{"site_order", "lexicographic"},
          {"size", spec.size()},
          {"sigma2", spec.sigma2()},
          {"sites", sites},
          {"mean", mean},
          {"covariance_layout", "row-major"},
          {"covariance", cov}};
}

json to_json(const CheckReport& r) {
  auto finite_or_string = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  };
  return {{"name", r.name},
          {"statistic", finite_or_string(r.statistic)},
          {"threshold", finite_or_string(r.threshold)},
          {"passed", r.passed},
          {"details", r.details}};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field_to_csv(const HeightField& f, const std::string& value_name) {
  std::string out;
  const int dim = f.empty() ? 0 : f.sites().front().dim();
  for (int k = 0; k < dim; ++k) out += "x" + std::to_string(k) + ",";
  out += value_name + "\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (int c : f.sites()[i].coords()) out += std::to_string(c) + ",";
    out += format_double(f.values()[i]) + "\n";
  }
  return out;
}

}  // namespace harness::io
