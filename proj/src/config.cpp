#include "nlc/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <openssl/evp.h>

#include "nlc/error.hpp"

namespace nlc {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::config, where + ": " + what);
}

double finite_number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(where, "non-finite number");
  return x;
}

std::vector<cd> coefficient_array(const Json& block, const std::string& key, std::size_t size,
                                  const std::string& where) {
  if (!block.contains(key)) return std::vector<cd>(size);
  std::vector<cd> c = parse_complex_array(block[key], where + "." + key);
  if (c.size() != size) {
    fail(where + "." + key, "expected " + std::to_string(size) + " entries, got " +
                              std::to_string(c.size()));
  }
  return c;
}

void add_scaled(std::vector<cd>& out, const std::vector<cd>& c, double p) {
  for (std::size_t i = 0; i < out.size() && i < c.size(); ++i) out[i] += c[i] * p;
}

} // namespace

const Json& require(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  if (!j.contains(key)) fail(where, "missing field '" + key + "'");
  return j[key];
}

double get_number(const Json& j, const std::string& key, const std::string& where) {
  return finite_number(require(j, key, where), where + "." + key);
}

double get_number(const Json& j, const std::string& key, const std::string& where,
                  double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return finite_number(j[key], where + "." + key);
}

int get_int(const Json& j, const std::string& key, const std::string& where, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

bool get_bool(const Json& j, const std::string& key, const std::string& where, bool fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_boolean()) fail(where + "." + key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

cd parse_complex(const Json& j, const std::string& where) {
  if (j.is_number()) return finite_number(j, where);
  if (j.is_array() && j.size() == 2) {
    return {finite_number(j[0], where + "[0]"), finite_number(j[1], where + "[1]")};
  }
  fail(where, "expected a number or an [re, im] pair");
}

std::vector<cd> parse_complex_array(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<cd> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(parse_complex(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> parse_grid(const Json& j, const std::string& where) {
  std::vector<double> out;
  const Json* values = nullptr;
  if (j.is_array()) values = &j;
  else if (j.is_object() && j.contains("values")) values = &j["values"];
  if (values) {
    if (!values->is_array()) fail(where, "grid values must be an array");
    for (std::size_t i = 0; i < values->size(); ++i) {
      out.push_back(finite_number((*values)[i], where + "[" + std::to_string(i) + "]"));
    }
  } else if (j.is_object()) {
    const double from = get_number(j, "from", where);
    const double to = get_number(j, "to", where);
    const int points = get_int(j, "points", where, 0);
    const bool endpoints = get_bool(j, "endpoints", where, true);
    if (points < 1) fail(where, "points must be positive");
    for (int i = 0; i < points; ++i) {
      if (endpoints) {
        out.push_back(points == 1 ? from : from + (to - from) * i / (points - 1));
      } else {
        out.push_back(from + (to - from) * (i + 1) / (points + 1));
      }
    }
  } else {
    fail(where, "expected a list or a {from, to, points} range");
  }
  if (out.empty()) fail(where, "grid is empty");
  return out;
}

SymmetryTransform parse_transform(const Json& j, const std::string& where) {
  const std::string kind = get_string(j, "kind", where);
  const int lo = get_int(j, "lo", where, 0);
  const int hi = get_int(j, "hi", where, 0);
  const bool tr = get_bool(j, "time_reversal", where, false);
  if (kind == "inversion") return SymmetryTransform::inversion(lo, hi, tr);
  if (kind == "translation") {
    return SymmetryTransform::translation(lo, hi, get_int(j, "shift", where, 0), tr);
  }
  fail(where + ".kind", "unknown transform kind '" + kind + "'");
}

LeadSpec parse_lead(const Json& j, const std::string& where) {
  LeadSpec lead;
  lead.v = get_number(j, "v", where, 0.0);
  lead.h = get_number(j, "h", where);
  if (lead.h == 0.0) fail(where + ".h", "lead hopping must be nonzero");
  return lead;
}

ModelSpec parse_model(const Json& j, const std::filesystem::path& base) {
  if (j.is_object() && j.contains("file")) {
    const std::filesystem::path file = base / get_string(j, "file", "model");
    Json inner;
    try {
      inner = Json::parse(read_text_file(file));
    } catch (const Json::exception& e) {
      fail("model.file", e.what());
    } catch (const Error& e) {
      fail("model.file", e.what());
    }
    return parse_model(inner, file.parent_path());
  }
  const std::string where = "model";
  ModelSpec m;
  m.onsite = parse_complex_array(require(j, "onsite", where), where + ".onsite");
  if (m.onsite.empty()) fail(where + ".onsite", "need at least one site");
  const std::size_t links = m.onsite.size() - 1;
  m.hop_up = j.contains("hop_up") ? parse_complex_array(j["hop_up"], where + ".hop_up")
                                  : std::vector<cd>();
  if (m.hop_up.size() != links) {
    fail(where + ".hop_up", "expected " + std::to_string(links) + " entries");
  }
  if (j.contains("hop_down")) {
    m.hop_down = parse_complex_array(j["hop_down"], where + ".hop_down");
    if (m.hop_down->size() != links) {
      fail(where + ".hop_down", "expected " + std::to_string(links) + " entries");
    }
  }
  if (j.contains("lead")) m.lead = parse_lead(j["lead"], where + ".lead");
  if (j.contains("params")) {
    const Json& ps = j["params"];
    if (!ps.is_object()) fail(where + ".params", "expected an object");
    for (const auto& [name, block] : ps.items()) {
      const std::string w = where + ".params." + name;
      if (!block.is_object()) fail(w, "expected an object");
      ModelSpec::Linear lin;
      lin.onsite = coefficient_array(block, "onsite", m.onsite.size(), w);
      lin.hop_up = coefficient_array(block, "hop_up", links, w);
      lin.hop_down = coefficient_array(block, "hop_down", links, w);
      if (block.contains("hop_down") && !m.hop_down) {
        fail(w + ".hop_down", "model has no explicit hop_down");
      }
      m.params[name] = std::move(lin);
      m.defaults[name] = get_number(block, "value", w, 0.0);
    }
  }
  // Validate the default instance early so that a bad model is a parse error.
  try {
    (void)m.build();
  } catch (const Error& e) {
    fail(where, e.what());
  }
  return m;
}

void ModelSpec::require_param(const std::string& name) const {
  if (!params.count(name)) throw Error(ErrorCode::config, "model has no parameter '" + name + "'");
}

LatticeModel ModelSpec::build(const ParamSet& values) const {
  std::vector<cd> v = onsite, up = hop_up;
  std::optional<std::vector<cd>> down = hop_down;
  for (const auto& [name, lin] : params) {
    const auto it = values.find(name);
    const double p = it != values.end() ? it->second : defaults.at(name);
    add_scaled(v, lin.onsite, p);
    add_scaled(up, lin.hop_up, p);
    if (down) add_scaled(*down, lin.hop_down, p);
  }
  for (const auto& [name, value] : values) {
    if (!params.count(name)) {
      throw Error(ErrorCode::config, "model has no parameter '" + name + "'");
    }
    (void)value;
  }
  return LatticeModel(std::move(v), std::move(up), std::move(down), lead);
}

DrivenModel parse_drive(const Json& j, const LatticeModel& base) {
  const std::string where = "drive";
  DrivenModel d;
  d.base = base;
  const std::string target = j.contains("target") ? get_string(j, "target", where) : "hoppings";
  if (target == "hoppings") d.target = DriveTarget::hoppings;
  else if (target == "onsite") d.target = DriveTarget::onsite;
  else fail(where + ".target", "expected 'hoppings' or 'onsite'");
  d.f = get_number(j, "f", where);
  if (j.contains("omega_over_pi")) {
    d.omega = get_number(j, "omega_over_pi", where) * std::numbers::pi;
  } else {
    d.omega = get_number(j, "omega", where);
  }
  const std::size_t count = d.target == DriveTarget::hoppings
                              ? static_cast<std::size_t>(std::max(base.size() - 1, 0))
                              : static_cast<std::size_t>(base.size());
  if (j.contains("mask")) {
    const Json& m = j["mask"];
    if (!m.is_array() || m.size() != count) {
      fail(where + ".mask", "expected " + std::to_string(count) + " booleans");
    }
    for (const Json& b : m) {
      if (!b.is_boolean()) fail(where + ".mask", "expected booleans");
      d.mask.push_back(b.get<bool>());
    }
  } else {
    d.mask.assign(count, true);
  }
  try {
    d.validate();
  } catch (const Error& e) {
    fail(where, e.what());
  }
  return d;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorCode::io, "SHA-256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

} // namespace nlc
