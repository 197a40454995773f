#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlc/lattice.hpp"
#include "nlc/symmetry.hpp"

namespace nlc {

using Json = nlohmann::json;
using ParamSet = std::map<std::string, double>;

// Chain whose onsite and hopping entries are affine in named parameters:
// x(p) = x0 + sum_i c_i p_i. Missing hop_down means Hermitian conjugate of
// the evaluated hop_up.
struct ModelSpec {
  struct Linear {
    std::vector<cd> onsite, hop_up, hop_down;
  };

  std::vector<cd> onsite, hop_up;
  std::optional<std::vector<cd>> hop_down;
  std::optional<LeadSpec> lead;
  std::map<std::string, Linear> params;
  ParamSet defaults;

  int size() const { return static_cast<int>(onsite.size()); }
  LatticeModel build(const ParamSet& values = {}) const;
  void require_param(const std::string& name) const;
};

// Numbers are plain JSON numbers; complex values are [re, im] pairs.
cd parse_complex(const Json& j, const std::string& where);
std::vector<cd> parse_complex_array(const Json& j, const std::string& where);

// {"values": [...]} or a bare list, or {"from", "to", "points"} with optional
// "endpoints": false for an open interval.
std::vector<double> parse_grid(const Json& j, const std::string& where);

// {"kind": "inversion" | "translation", "lo", "hi", "shift", "time_reversal"}
SymmetryTransform parse_transform(const Json& j, const std::string& where);

// Model block, possibly {"file": "relative/path.json"} resolved against base.
ModelSpec parse_model(const Json& j, const std::filesystem::path& base);
LeadSpec parse_lead(const Json& j, const std::string& where);

// {"target": "hoppings" | "onsite", "f", "omega" | "omega_over_pi", "mask"}
DrivenModel parse_drive(const Json& j, const LatticeModel& base);

// Field accessors that raise ErrorCode::config with the JSON path on misuse.
const Json& require(const Json& j, const std::string& key, const std::string& where);
double get_number(const Json& j, const std::string& key, const std::string& where);
double get_number(const Json& j, const std::string& key, const std::string& where, double fallback);
int get_int(const Json& j, const std::string& key, const std::string& where, int fallback);
bool get_bool(const Json& j, const std::string& key, const std::string& where, bool fallback);
std::string get_string(const Json& j, const std::string& key, const std::string& where);

std::string sha256_hex(const std::string& bytes);
std::string read_text_file(const std::filesystem::path& path);

} // namespace nlc
