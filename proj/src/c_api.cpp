#include "nlc/nlc.h"

#include <cstdlib>
#include <cstring>
#include <limits>
#include <sstream>
#include <string>

#include "nlc/config.hpp"
#include "nlc/currents.hpp"
#include "nlc/error.hpp"
#include "nlc/experiments.hpp"
#include "nlc/scattering.hpp"
#include "nlc/spectral.hpp"
#include "nlc/symmetry.hpp"

struct nlc_model {
  nlc::LatticeModel model;
};

struct nlc_transform {
  nlc::SymmetryTransform t;
};

struct nlc_eigen {
  nlc::EigenSolution sol;
};

namespace {

thread_local std::string last_error;

nlc_status to_status(nlc::ErrorCode c) {
  // The C enum mirrors ErrorCode one to one.
  return static_cast<nlc_status>(static_cast<int>(c));
}

template <class F>
nlc_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return NLC_OK;
  } catch (const nlc::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return NLC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return NLC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw nlc::Error(nlc::ErrorCode::invalid_argument, std::string(what) + " is null");
}

std::vector<nlc::cd> complex_in(const double* p, std::size_t n) {
  std::vector<nlc::cd> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {p[2 * i], p[2 * i + 1]};
  return out;
}

void complex_out(const nlc::CVector& v, double* p) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    p[2 * i] = v(i).real();
    p[2 * i + 1] = v(i).imag();
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlc::TransformKind kind_of(nlc_transform_kind k) {
  if (k == NLC_INVERSION) return nlc::TransformKind::inversion;
  if (k == NLC_TRANSLATION) return nlc::TransformKind::translation;
  throw nlc::Error(nlc::ErrorCode::invalid_argument, "unknown transform kind");
}

int run_common(const char* config_path, const char* out_dir, int threads, const char* format,
               char** report, bool verify) {
  if (report) *report = nullptr;
  try {
    if (!config_path) throw nlc::Error(nlc::ErrorCode::invalid_argument, "config path is null");
    nlc::RunOptions o;
    o.out_dir = out_dir ? out_dir : ".";
    o.threads = threads > 0 ? threads : 1;
    o.format = format ? format : "csv";
    std::ostringstream text;
    const nlc::RunOutcome r = verify ? nlc::verify_experiment(config_path, o, &text)
                                     : nlc::run_experiment(config_path, o, &text);
    last_error = r.error_message;
    if (report) *report = dup_string(text.str());
    return r.exit_code;
  } catch (const std::exception& e) {
    last_error = e.what();
    return 1;
  }
}

} // namespace

extern "C" {

const char* nlc_version(void) { return nlc::kVersion; }

const char* nlc_last_error(void) { return last_error.c_str(); }

const char* nlc_status_name(nlc_status status) {
  if (status == NLC_OK) return "OK";
  if (status == NLC_ERR_INTERNAL) return "Internal";
  if (status >= NLC_ERR_INVALID_ARGUMENT && status <= NLC_ERR_IO) {
    return nlc::error_name(static_cast<nlc::ErrorCode>(static_cast<int>(status)));
  }
  return "Unknown";
}

void nlc_string_free(char* s) { std::free(s); }

nlc_status nlc_model_create(size_t n_sites, const double* onsite, const double* hop_up,
                            const double* hop_down, nlc_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    if (n_sites == 0) throw nlc::Error(nlc::ErrorCode::invalid_argument, "need at least one site");
    need(onsite, "onsite");
    if (n_sites > 1) need(hop_up, "hop_up");
    std::optional<std::vector<nlc::cd>> down;
    if (hop_down) down = complex_in(hop_down, n_sites - 1);
    auto m = std::make_unique<nlc_model>();
    m->model = nlc::LatticeModel(complex_in(onsite, n_sites),
                                 n_sites > 1 ? complex_in(hop_up, n_sites - 1) : std::vector<nlc::cd>{},
                                 std::move(down));
    *out = m.release();
  });
}

nlc_status nlc_model_from_json(const char* json, nlc_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    need(json, "json");
    nlc::Json j;
    try {
      j = nlc::Json::parse(json);
    } catch (const nlc::Json::exception& e) {
      throw nlc::Error(nlc::ErrorCode::config, std::string("malformed JSON: ") + e.what());
    }
    const nlc::ModelSpec spec = nlc::parse_model(j, ".");
    auto m = std::make_unique<nlc_model>();
    m->model = spec.build();
    *out = m.release();
  });
}

void nlc_model_free(nlc_model* model) { delete model; }

size_t nlc_model_size(const nlc_model* model) {
  return model ? static_cast<size_t>(model->model.size()) : 0;
}

nlc_status nlc_model_hamiltonian(const nlc_model* model, double* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const nlc::CMatrix H = nlc::hamiltonian_matrix(model->model);
    const Eigen::Index n = H.rows();
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        out[2 * (r * n + c)] = H(r, c).real();
        out[2 * (r * n + c) + 1] = H(r, c).imag();
      }
    }
  });
}

nlc_status nlc_transform_create(nlc_transform_kind kind, int d_lo, int d_hi, int shift,
                                int time_reversal, nlc_transform** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto t = std::make_unique<nlc_transform>();
    t->t = kind_of(kind) == nlc::TransformKind::inversion
             ? nlc::SymmetryTransform::inversion(d_lo, d_hi, time_reversal != 0)
             : nlc::SymmetryTransform::translation(d_lo, d_hi, shift, time_reversal != 0);
    // Shape checks only; the chain length is checked when a model is used.
    t->t.validate(std::numeric_limits<int>::max() / 2);
    *out = t.release();
  });
}

void nlc_transform_free(nlc_transform* t) { delete t; }

nlc_status nlc_symmetry_residual(const nlc_model* model, const nlc_transform* t, double* out) {
  return guarded([&] {
    need(model, "model");
    need(t, "transform");
    need(out, "out");
    *out = nlc::symmetry_residual(model->model, t->t);
  });
}

nlc_status nlc_detect_domains_json(const nlc_model* model, nlc_transform_kind kind,
                                   int time_reversal, char** out_json) {
  return guarded([&] {
    need(model, "model");
    need(out_json, "out_json");
    *out_json = nullptr;
    nlc::Json arr = nlc::Json::array();
    for (const nlc::SymmetryTransform& t :
         nlc::detect_maximal_domains(model->model, kind_of(kind), time_reversal != 0)) {
      arr.push_back({{"lo", t.d_lo}, {"hi", t.d_hi}, {"shift", t.shift}, {"center2", t.center2}});
    }
    *out_json = dup_string(arr.dump());
  });
}

nlc_status nlc_eigen_compute(const nlc_model* model, nlc_eigen** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = nullptr;
    auto e = std::make_unique<nlc_eigen>();
    e->sol = nlc::eigenmodes(model->model);
    *out = e.release();
  });
}

void nlc_eigen_free(nlc_eigen* e) { delete e; }

size_t nlc_eigen_size(const nlc_eigen* e) { return e ? static_cast<size_t>(e->sol.size()) : 0; }

nlc_status nlc_eigen_values(const nlc_eigen* e, double* out) {
  return guarded([&] {
    need(e, "eigen");
    need(out, "out");
    for (std::size_t i = 0; i < e->sol.values.size(); ++i) {
      out[2 * i] = e->sol.values[i].real();
      out[2 * i + 1] = e->sol.values[i].imag();
    }
  });
}

nlc_status nlc_eigen_vector(const nlc_eigen* e, size_t nu, double* out) {
  return guarded([&] {
    need(e, "eigen");
    need(out, "out");
    if (nu >= static_cast<size_t>(e->sol.size())) {
      throw nlc::Error(nlc::ErrorCode::invalid_argument, "mode index out of range");
    }
    complex_out(e->sol.mode(static_cast<int>(nu)), out);
  });
}

nlc_status nlc_field_compute(const nlc_model* model, const double* psi, const nlc_transform* t,
                             double* q_plus, double* q_minus) {
  return guarded([&] {
    need(model, "model");
    need(psi, "psi");
    need(t, "transform");
    const std::vector<nlc::cd> v = complex_in(psi, static_cast<std::size_t>(model->model.size()));
    const nlc::CVector x = Eigen::Map<const nlc::CVector>(v.data(), static_cast<Eigen::Index>(v.size()));
    const nlc::LinkCurrentField f = nlc::nlc_field(model->model, x, t->t);
    if (q_plus) complex_out(f.q_plus, q_plus);
    if (q_minus) complex_out(f.q_minus, q_minus);
  });
}

nlc_status nlc_smatrix(const nlc_model* model, double lead_v, double lead_h, double k, double* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    if (lead_h == 0.0) throw nlc::Error(nlc::ErrorCode::invalid_argument, "lead hopping is zero");
    const nlc::SMatrix s = nlc::s_matrix(model->model, nlc::LeadSpec{lead_v, lead_h}, k);
    const nlc::cd vals[4] = {s.r, s.t, s.t_prime, s.r_prime};
    for (int i = 0; i < 4; ++i) {
      out[2 * i] = vals[i].real();
      out[2 * i + 1] = vals[i].imag();
    }
  });
}

int nlc_run_experiment(const char* config_path, const char* out_dir, int threads,
                       const char* format, char** report) {
  return run_common(config_path, out_dir, threads, format, report, false);
}

int nlc_verify_experiment(const char* config_path, const char* out_dir, int threads,
                          char** report) {
  return run_common(config_path, out_dir, threads, "csv", report, true);
}

} // extern "C"
