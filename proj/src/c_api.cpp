#include "harness/harness.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <utility>

#include "harness/dual.hpp"
#include "harness/dynamics.hpp"
#include "harness/error.hpp"
#include "harness/gibbs.hpp"
#include "harness/ground_state.hpp"
#include "harness/hamiltonian.hpp"
#include "harness/io.hpp"
#include "harness/lattice.hpp"
#include "harness/parallel.hpp"
#include "harness/rng.hpp"
#include "harness/verify.hpp"

using harness::Error;
using harness::ErrorCode;
using harness::io::json;

struct harness_model {
  json config;
  harness::Geometry geo;
  harness::ModelParams params;
  harness::HeightField d, y, z_init;
  std::vector<double> dv, yv, zv;
};

struct harness_epochs {
  harness::EpochList list;
};

struct harness_gaussian {
  harness::GaussianSpec spec;
};

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kModule = "c_api";

thread_local std::string last_error;

harness_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return HARNESS_E_INVALID_ARGUMENT;
    case ErrorCode::AsymmetricKernel: return HARNESS_E_ASYMMETRIC_KERNEL;
    case ErrorCode::NonStochastic: return HARNESS_E_NON_STOCHASTIC;
    case ErrorCode::SelfLoop: return HARNESS_E_SELF_LOOP;
    case ErrorCode::RangeViolation: return HARNESS_E_RANGE_VIOLATION;
    case ErrorCode::DomainMismatch: return HARNESS_E_DOMAIN_MISMATCH;
    case ErrorCode::NoConvergence: return HARNESS_E_NO_CONVERGENCE;
    case ErrorCode::SizeLimit: return HARNESS_E_SIZE_LIMIT;
    case ErrorCode::SiteOutsideBox: return HARNESS_E_SITE_OUTSIDE_BOX;
    case ErrorCode::WalkCapExceeded: return HARNESS_E_WALK_CAP_EXCEEDED;
    case ErrorCode::BoundViolated: return HARNESS_E_BOUND_VIOLATED;
    case ErrorCode::AbsorptionOccurred: return HARNESS_E_ABSORPTION_OCCURRED;
    case ErrorCode::FactorizationFailure: return HARNESS_E_FACTORIZATION_FAILURE;
    case ErrorCode::ConfigInvalid: return HARNESS_E_CONFIG_INVALID;
  }
  return HARNESS_E_INTERNAL;
}

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, kModule, msg); }

// Runs fn, turning every exception into a status plus last_error.
template <class Fn>
harness_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return HARNESS_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    last_error = std::string("io: ConfigInvalid: ") + e.what();
    return HARNESS_E_CONFIG_INVALID;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return HARNESS_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return HARNESS_E_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return HARNESS_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

void emit(const json& j, char** out) {
  require(out, "output pointer");
  const std::string s = j.dump();
  char* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (!buf) throw std::bad_alloc();
  std::memcpy(buf, s.c_str(), s.size() + 1);
  *out = buf;
}

void check_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    fail(ErrorCode::DomainMismatch,
         std::string(what) + " has " + std::to_string(got) + " values, expected " + std::to_string(want));
}

std::span<const double> box_span(const harness_model* m, const double* x, std::size_t n, const char* what) {
  require(x, what);
  check_len(n, m->geo.size(), what);
  return {x, n};
}

harness::Site site_from(const harness_model* m, const int* coords) {
  require(coords, "site");
  return harness::Site(std::span<const int>(coords, static_cast<std::size_t>(m->geo.box().dim())));
}

// ---- model construction ---------------------------------------------------

harness::Kernel parse_kernel(const json& model, int dim) {
  if (!model.contains("kernel")) return harness::Kernel::nearest_neighbor(dim);
  json k = model.at("kernel");
  if (k.is_object() && !k.contains("dim")) k["dim"] = dim;
  harness::Kernel kernel = harness::io::kernel_from_json(k);
  if (kernel.dim() != dim) fail(ErrorCode::ConfigInvalid, "kernel dimension differs from model.dim");
  return kernel;
}

double number_at(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(ErrorCode::ConfigInvalid, std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

harness::HeightField field_or_zero(const json& fields, const char* name, std::span<const harness::Site> domain) {
  if (!fields.contains(name)) return harness::HeightField::constant(domain, 0.0);
  return harness::io::field_from_json(fields.at(name), domain);
}

harness_model* build_model(const json& cfg) {
  if (!cfg.is_object()) fail(ErrorCode::ConfigInvalid, "config must be a JSON object");
  const json model = cfg.value("model", json::object());
  const json geometry = cfg.value("geometry", json::object());
  const json fields = cfg.value("fields", json::object());
  if (!model.is_object() || !geometry.is_object() || !fields.is_object())
    fail(ErrorCode::ConfigInvalid, "'model', 'geometry' and 'fields' must be objects");

  const double dim_raw = number_at(model, "dim", 1.0);
  const int dim = static_cast<int>(dim_raw);
  if (dim != dim_raw || dim < 1 || dim > harness::kMaxDim)
    fail(ErrorCode::ConfigInvalid, "model.dim must be an integer in [1, " + std::to_string(harness::kMaxDim) + "]");

  harness::Kernel kernel = parse_kernel(model, dim);
  const auto params = harness::ModelParams::make(number_at(model, "alpha", 0.5), number_at(model, "sigma2", 0.5));
  if (!geometry.contains("box")) fail(ErrorCode::ConfigInvalid, "geometry.box is required");
  harness::Box box = harness::io::box_from_json(geometry.at("box"), dim);
  if (geometry.contains("shell") && number_at(geometry, "shell", 0.0) != kernel.reach())
    fail(ErrorCode::ConfigInvalid,
         "geometry.shell must equal the kernel's longest jump (" + std::to_string(kernel.reach()) + ")");

  harness::Geometry geo(std::move(box), std::move(kernel));
  auto d = field_or_zero(fields, "d", geo.sites());
  auto y = field_or_zero(fields, "y", geo.shell());
  auto z = field_or_zero(fields, "z_init", geo.sites());
  auto dv = geo.box_values(d, "d");
  auto yv = geo.shell_values(y, "y");
  auto zv = geo.box_values(z, "z_init");
  // Keep exactly the domain values so literal fields with extra sites behave.
  d = geo.box_field(dv);
  y = geo.shell_field(yv);
  z = geo.box_field(zv);
  return new harness_model{cfg, std::move(geo), params, std::move(d), std::move(y), std::move(z),
                           std::move(dv), std::move(yv), std::move(zv)};
}

// ---- check options --------------------------------------------------------

std::uint64_t opt_seed(const json& o) {
  if (!o.contains("seed")) fail(ErrorCode::ConfigInvalid, "this check is stochastic and needs an explicit 'seed'");
  if (!o.at("seed").is_number_unsigned()) fail(ErrorCode::ConfigInvalid, "'seed' must be a non-negative integer");
  return o.at("seed").get<std::uint64_t>();
}

std::size_t opt_count(const json& o, const char* key, std::size_t fallback) {
  if (!o.contains(key)) return fallback;
  if (!o.at(key).is_number_unsigned()) fail(ErrorCode::ConfigInvalid, std::string("'") + key + "' must be a non-negative integer");
  return o.at(key).get<std::size_t>();
}

template <class T>
std::vector<T> opt_list(const json& o, const char* key, std::vector<T> fallback) {
  if (!o.contains(key)) return fallback;
  const json& a = o.at(key);
  if (!a.is_array()) fail(ErrorCode::ConfigInvalid, std::string("'") + key + "' must be an array");
  std::vector<T> out;
  for (const auto& v : a) {
    if (!v.is_number()) fail(ErrorCode::ConfigInvalid, std::string("'") + key + "' must hold numbers");
    out.push_back(v.get<T>());
  }
  return out;
}

json run_check(const harness_model* m, const std::string& name, const json& o) {
  using namespace harness;
  const Box& box = m->geo.box();
  const Kernel& kernel = m->geo.kernel();
  const int workers = default_workers();
  auto one = [](const CheckReport& r) { return io::to_json(r); };

  if (name == "stationary-law") {
    StationaryOptions so;
    so.burn_in = number_at(o, "burn_in", so.burn_in);
    so.thin = number_at(o, "thin", so.thin);
    if (o.contains("oracle_sigma2")) so.oracle_sigma2 = number_at(o, "oracle_sigma2", 0.0);
    return one(check_stationary_law(box, m->y, m->d, m->params, kernel, opt_count(o, "n_samples", 10000),
                                    opt_seed(o), so));
  }
  if (name == "ergodic-forgetting") {
    const auto seed = opt_seed(o);
    const double shift = number_at(o, "shift", 1.0);
    return one(check_ergodic_forgetting(box, m->y, m->d, m->params, kernel, m->z_init, m->z_init.shifted(shift),
                                        opt_list<double>(o, "u_grid", {0.0, 0.5, 1.0, 2.0, 4.0}),
                                        opt_count(o, "n_seeds", 1000), seed));
  }
  // Box for the checks that stand in for all of Z^d.
  auto wide_box = [&] {
    if (!o.contains("half_width")) return box;
    return Box::centered(box.dim(), static_cast<int>(opt_count(o, "half_width", 0)));
  };
  if (name == "variance-bound") {
    const auto seed = opt_seed(o);
    const std::size_t n = opt_count(o, "n_windows", 1000);
    const double max_window = number_at(o, "max_window", 5.0);
    std::vector<double> windows(n);
    for (std::size_t k = 0; k < n; ++k) windows[k] = max_window * static_cast<double>(k + 1) / static_cast<double>(n);
    return one(check_variance_bound(wide_box(), m->params, kernel, windows, seed));
  }
  if (name == "survival-mass") {
    const auto seed = opt_seed(o);
    return one(check_survival_mass(wide_box(), m->params, kernel, number_at(o, "u", 2.0), opt_count(o, "n_seeds", 10000), seed));
  }
  if (name == "thermo-limit") {
    // The data is taken as finitely supported on Z^d: the model's d restricted
    // to its nonzero entries.
    std::vector<Site> s;
    std::vector<double> v;
    for (std::size_t i = 0; i < m->d.size(); ++i)
      if (m->dv[i] != 0.0) {
        s.push_back(m->d.sites()[i]);
        v.push_back(m->dv[i]);
      }
    const auto res = check_thermo_limit(HeightField(std::move(s), std::move(v)),
                                        opt_list<double>(o, "boundary_values", {0.0, 7.0}), m->params, kernel,
                                        opt_list<int>(o, "half_widths", {4, 8, 16, 32}), number_at(o, "tol", 1e-9));
    return json::array({one(res.limit), one(res.washout)});
  }
  if (name == "beta-scaling") {
    json arr = json::array();
    for (double beta : opt_list<double>(o, "betas", {0.25, 1.0, 4.0}))
      arr.push_back(one(check_beta_scaling(box, m->y, m->d, m->params.alpha, kernel, beta)));
    return arr;
  }
  if (name == "duality") {
    const auto seed = opt_seed(o);
    return one(check_duality(box, m->z_init, m->y, m->d, m->params, kernel, number_at(o, "window", 10.0), seed, workers));
  }
  if (name == "detailed-balance") {
    const auto seed = opt_seed(o);
    return one(check_detailed_balance(box, m->y, m->d, m->params, kernel, opt_count(o, "n_states", 1000), seed));
  }
  if (name == "dlr") {
    const auto seed = opt_seed(o);
    return one(check_dlr(box, m->y, m->d, m->params, kernel, opt_count(o, "n_states", 1000), seed));
  }
  if (name == "minimizer") {
    const auto seed = opt_seed(o);
    json arr = json::array();
    for (const auto& r : check_minimizer(box, m->y, m->d, m->params, kernel, opt_count(o, "n_probes", 100), seed))
      arr.push_back(one(r));
    return arr;
  }
  if (name == "ground-state-agreement")
    return one(check_ground_state_agreement(box, m->y, m->d, m->params, kernel, number_at(o, "tol", 1e-10)));
  if (name == "kernel-row-mc") {
    const auto seed = opt_seed(o);
    const Site i = o.contains("site") ? io::site_from_json(o.at("site")) : box.center();
    return one(check_kernel_row_mc(box, m->params, kernel, i, opt_count(o, "n_walks", 100000), seed, workers));
  }
  fail(ErrorCode::InvalidArgument, "unknown check '" + name + "'");
}

}  // namespace

extern "C" {

const char* harness_version(void) { return kVersion; }

const char* harness_status_name(harness_status status) {
  switch (status) {
    case HARNESS_OK: return "Ok";
    case HARNESS_E_INTERNAL: return "Internal";
    default: break;
  }
  const int c = static_cast<int>(status);
  if (c >= 1 && c <= static_cast<int>(ErrorCode::ConfigInvalid) + 1)
    return harness::error_code_name(static_cast<ErrorCode>(c - 1)).data();
  return "Unknown";
}

const char* harness_last_error(void) { return last_error.c_str(); }

void harness_string_free(char* s) { std::free(s); }

void harness_set_workers(int workers) { harness::set_default_workers(workers); }

int harness_get_workers(void) { return harness::default_workers(); }

uint64_t harness_derive_seed(uint64_t seed, uint64_t stream) { return harness::derive_seed(seed, stream); }

harness_status harness_model_create(const char* model_json, harness_model** out) {
  return guarded([&] {
    require(model_json, "model_json");
    require(out, "output pointer");
    *out = nullptr;
    json cfg;
    try {
      cfg = json::parse(model_json);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
    }
    *out = build_model(cfg);
  });
}

void harness_model_destroy(harness_model* model) { delete model; }

harness_status harness_model_describe(const harness_model* m, char** json_out) {
  return guarded([&] {
    require(m, "model");
    emit({{"dim", m->geo.box().dim()},
          {"alpha", m->params.alpha},
          {"sigma2", m->params.sigma2},
          {"kernel", harness::io::kernel_to_json(m->geo.kernel())},
          {"box", harness::io::box_to_json(m->geo.box())},
          {"shell_width", m->geo.kernel().reach()},
          {"sites", m->geo.size()},
          {"shell_sites", m->geo.shell().size()}},
         json_out);
  });
}

int harness_model_dim(const harness_model* m) { return m ? m->geo.box().dim() : 0; }

size_t harness_model_site_count(const harness_model* m) { return m ? m->geo.size() : 0; }

size_t harness_model_shell_count(const harness_model* m) { return m ? m->geo.shell().size() : 0; }

static harness_status copy_coords(const harness_model* m, std::span<const harness::Site> sites, int* coords,
                                  size_t capacity) {
  return guarded([&] {
    require(m, "model");
    require(coords, "coords");
    const auto dim = static_cast<std::size_t>(m->geo.box().dim());
    if (capacity < sites.size() * dim) fail(ErrorCode::InvalidArgument, "coords buffer too small");
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t k = 0; k < dim; ++k) coords[i * dim + k] = sites[i][static_cast<int>(k)];
  });
}

harness_status harness_model_site_coords(const harness_model* m, int* coords, size_t capacity) {
  if (!m) return guarded([] { require(nullptr, "model"); });
  return copy_coords(m, m->geo.sites(), coords, capacity);
}

harness_status harness_model_shell_coords(const harness_model* m, int* coords, size_t capacity) {
  if (!m) return guarded([] { require(nullptr, "model"); });
  return copy_coords(m, m->geo.shell(), coords, capacity);
}

harness_status harness_model_field(const harness_model* m, const char* name, double* values, size_t n) {
  return guarded([&] {
    require(m, "model");
    require(name, "name");
    require(values, "values");
    const std::string f = name;
    const std::vector<double>* src = f == "d" ? &m->dv : f == "y" ? &m->yv : f == "z_init" ? &m->zv : nullptr;
    if (!src) fail(ErrorCode::InvalidArgument, "unknown field '" + f + "'");
    check_len(n, src->size(), name);
    std::copy(src->begin(), src->end(), values);
  });
}

harness_status harness_energy(const harness_model* m, const double* x, size_t n, char** json_out) {
  return guarded([&] {
    require(m, "model");
    emit(harness::io::to_json(harness::energy(m->geo, box_span(m, x, n, "x"), m->yv, m->dv, m->params)), json_out);
  });
}

harness_status harness_gradient(const harness_model* m, const double* x, size_t n, double* grad_out) {
  return guarded([&] {
    require(m, "model");
    require(grad_out, "grad_out");
    const auto g = harness::gradient(m->geo, box_span(m, x, n, "x"), m->yv, m->dv, m->params);
    std::copy(g.begin(), g.end(), grad_out);
  });
}

harness_status harness_ground_state(const harness_model* m, const char* method, double tol, int max_iter,
                                    char** json_out) {
  return guarded([&] {
    require(m, "model");
    require(method, "method");
    const std::string meth = method;
    harness::GroundStateResult r;
    if (meth == "jacobi")
      r = harness::solve_jacobi(m->geo.box(), m->d, m->y, m->params, m->geo.kernel(), tol, max_iter);
    else if (meth == "exact")
      r = harness::solve_exact(m->geo.box(), m->d, m->y, m->params, m->geo.kernel());
    else
      fail(ErrorCode::InvalidArgument, "ground-state method must be 'jacobi' or 'exact'");
    emit(harness::io::to_json(r), json_out);
  });
}

harness_status harness_kernel_row(const harness_model* m, const int* site, const char* method, uint64_t n_walks,
                                  uint64_t seed, char** json_out) {
  return guarded([&] {
    require(m, "model");
    require(method, "method");
    const harness::Site i = site_from(m, site);
    const std::string meth = method;
    if (meth == "exact") {
      const auto row = harness::kernel_row_exact(m->geo.box(), m->params, m->geo.kernel(), i);
      json j = harness::io::to_json(row);
      j["decay"] = harness::io::to_json(harness::decay_bound_check(row, m->params, m->geo.kernel()));
      j["m_site"] = harness::recompose(row, m->d, m->y);
      emit(j, json_out);
    } else if (meth == "monte_carlo") {
      emit(harness::io::to_json(harness::kernel_row_mc(m->geo.box(), m->params, m->geo.kernel(), i, n_walks, seed,
                                                       harness::default_workers())),
           json_out);
    } else {
      fail(ErrorCode::InvalidArgument, "kernel-row method must be 'exact' or 'monte_carlo'");
    }
  });
}

harness_status harness_ground_state_infinite(const harness_model* m, double tol, char** json_out) {
  return guarded([&] {
    require(m, "model");
    std::vector<harness::Site> s;
    std::vector<double> v;
    for (std::size_t i = 0; i < m->dv.size(); ++i)
      if (m->dv[i] != 0.0) {
        s.push_back(m->d.sites()[i]);
        v.push_back(m->dv[i]);
      }
    const harness::HeightField support(std::move(s), std::move(v));
    emit(harness::io::to_json(harness::ground_state_infinite(support, m->params, m->geo.kernel(), tol)), json_out);
  });
}

harness_status harness_epochs_generate(const harness_model* m, double start, double end, uint64_t seed,
                                       harness_epochs** out) {
  return guarded([&] {
    require(m, "model");
    require(out, "output pointer");
    *out = new harness_epochs{harness::generate_epochs(m->geo.box(), start, end, m->params, seed)};
  });
}

harness_status harness_epochs_from_json(const char* text, harness_epochs** out) {
  return guarded([&] {
    require(text, "json");
    require(out, "output pointer");
    *out = new harness_epochs{harness::io::epochs_from_json(json::parse(text))};
  });
}

harness_status harness_epochs_to_json(const harness_epochs* e, char** json_out) {
  return guarded([&] {
    require(e, "epochs");
    emit(harness::io::to_json(e->list), json_out);
  });
}

size_t harness_epochs_count(const harness_epochs* e) { return e ? e->list.epochs.size() : 0; }

void harness_epochs_destroy(harness_epochs* e) { delete e; }

harness_status harness_simulate(const harness_model* m, const harness_epochs* e, const double* z_init,
                                double* final_out, size_t n, double snapshot_every, harness_snapshot_fn callback,
                                void* user) {
  return guarded([&] {
    require(m, "model");
    require(e, "epochs");
    require(final_out, "final_out");
    check_len(n, m->geo.size(), "final_out");
    std::vector<double> z = z_init ? std::vector<double>(z_init, z_init + n) : m->zv;
    harness::SnapshotFn obs;
    if (callback) obs = [&](double t, std::span<const double> s) { callback(t, s.data(), s.size(), user); };
    harness::replay(m->geo, z, m->yv, m->dv, m->params, e->list, callback ? snapshot_every : 0.0, obs);
    std::copy(z.begin(), z.end(), final_out);
  });
}

harness_status harness_sample_stationary(const harness_model* m, double burn_in, double thin, size_t n_samples,
                                         uint64_t seed, double* out, size_t capacity) {
  return guarded([&] {
    require(m, "model");
    require(out, "out");
    if (capacity < n_samples * m->geo.size()) fail(ErrorCode::InvalidArgument, "sample buffer too small");
    const Eigen::MatrixXd s = harness::sample_stationary(m->geo.box(), m->y, m->d, m->params, m->geo.kernel(),
                                                         burn_in, n_samples, thin, seed, m->z_init);
    for (Eigen::Index r = 0; r < s.rows(); ++r)
      for (Eigen::Index c = 0; c < s.cols(); ++c) out[r * s.cols() + c] = s(r, c);
  });
}

harness_status harness_backward_weights(const harness_model* m, const harness_epochs* e, const int* site,
                                        char** json_out) {
  return guarded([&] {
    require(m, "model");
    require(e, "epochs");
    const auto idx = m->geo.box().index_of(site_from(m, site));
    if (!idx) fail(ErrorCode::SiteOutsideBox, "site is not in the box");
    emit(harness::io::to_json(harness::backward_weights(m->geo, e->list, *idx, m->params)), json_out);
  });
}

harness_status harness_reconstruct(const harness_model* m, const harness_epochs* e, const double* z_init,
                                   double* values_out, double* terms_out, size_t n) {
  return guarded([&] {
    require(m, "model");
    require(e, "epochs");
    require(values_out, "values_out");
    check_len(n, m->geo.size(), "values_out");
    const std::span<const double> z = z_init ? std::span<const double>(z_init, n) : std::span<const double>(m->zv);
    const auto recs =
        harness::reconstruct_all(m->geo, e->list, z, m->yv, m->dv, m->params, harness::default_workers());
    for (std::size_t i = 0; i < n; ++i) {
      values_out[i] = recs[i].value;
      if (terms_out) {
        terms_out[4 * i] = recs[i].noise;
        terms_out[4 * i + 1] = recs[i].data;
        terms_out[4 * i + 2] = recs[i].boundary;
        terms_out[4 * i + 3] = recs[i].initial;
      }
    }
  });
}

harness_status harness_gaussian_create(const harness_model* m, harness_gaussian** out) {
  return guarded([&] {
    require(m, "model");
    require(out, "output pointer");
    *out = new harness_gaussian{harness::build_gaussian(m->geo, m->yv, m->dv, m->params)};
  });
}

void harness_gaussian_destroy(harness_gaussian* g) { delete g; }

harness_status harness_gaussian_to_json(const harness_gaussian* g, char** json_out) {
  return guarded([&] {
    require(g, "gaussian");
    emit(harness::io::to_json(g->spec), json_out);
  });
}

harness_status harness_gaussian_log_density(const harness_gaussian* g, const double* x, size_t n, double* out) {
  return guarded([&] {
    require(g, "gaussian");
    require(x, "x");
    require(out, "out");
    check_len(n, g->spec.size(), "x");
    *out = g->spec.log_density(std::span<const double>(x, n));
  });
}

harness_status harness_gaussian_sample(const harness_gaussian* g, size_t count, uint64_t seed, double* out,
                                       size_t capacity) {
  return guarded([&] {
    require(g, "gaussian");
    require(out, "out");
    if (capacity < count * g->spec.size()) fail(ErrorCode::InvalidArgument, "sample buffer too small");
    const Eigen::MatrixXd s = g->spec.sample(count, seed);
    for (Eigen::Index r = 0; r < s.rows(); ++r)
      for (Eigen::Index c = 0; c < s.cols(); ++c) out[r * s.cols() + c] = s(r, c);
  });
}

harness_status harness_check(const harness_model* m, const char* name, const char* options_json,
                             char** report_json) {
  return guarded([&] {
    require(m, "model");
    require(name, "name");
    json opts = json::object();
    if (options_json && *options_json) {
      try {
        opts = json::parse(options_json);
      } catch (const json::parse_error& e) {
        fail(ErrorCode::ConfigInvalid, std::string("check options are not valid JSON: ") + e.what());
      }
      if (!opts.is_object()) fail(ErrorCode::ConfigInvalid, "check options must be a JSON object");
    }
    emit(run_check(m, name, opts), report_json);
  });
}

}  // extern "C"
