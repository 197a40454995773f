// C interface and command-line runner, exercised as an external user would.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "nlc/nlc.h"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path kConfigs = NLC_CONFIG_DIR;
const std::string kCli = NLC_CLI_PATH;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "nlc_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

} // namespace

TEST_CASE("C API: model, symmetry, eigen and field round trip") {
  CHECK(std::string(nlc_version()) == "1.0.0");
  const double onsite[] = {0.1, 0, 0.2, 0, 0.1, 0};
  const double hops[] = {0.5, 0, 0.5, 0};
  nlc_model* m = nullptr;
  REQUIRE(nlc_model_create(3, onsite, hops, nullptr, &m) == NLC_OK);
  CHECK(nlc_model_size(m) == 3);
  std::vector<double> H(18);
  REQUIRE(nlc_model_hamiltonian(m, H.data()) == NLC_OK);
  CHECK(H[2 * 1] == 0.5);
  CHECK(H[2 * 4] == 0.2);

  nlc_transform* t = nullptr;
  REQUIRE(nlc_transform_create(NLC_INVERSION, 1, 3, 0, 0, &t) == NLC_OK);
  double residual = -1.0;
  REQUIRE(nlc_symmetry_residual(m, t, &residual) == NLC_OK);
  CHECK(residual == 0.0);

  char* domains = nullptr;
  REQUIRE(nlc_detect_domains_json(m, NLC_INVERSION, 0, &domains) == NLC_OK);
  const Json dj = Json::parse(domains);
  nlc_string_free(domains);
  REQUIRE(dj.size() == 1);
  CHECK(dj[0]["lo"] == 1);
  CHECK(dj[0]["hi"] == 3);

  nlc_eigen* e = nullptr;
  REQUIRE(nlc_eigen_compute(m, &e) == NLC_OK);
  REQUIRE(nlc_eigen_size(e) == 3);
  std::vector<double> vals(6), vec(6), qp(6), qm(6);
  REQUIRE(nlc_eigen_values(e, vals.data()) == NLC_OK);
  for (size_t nu = 0; nu < 3; ++nu) {
    REQUIRE(nlc_eigen_vector(e, nu, vec.data()) == NLC_OK);
    REQUIRE(nlc_field_compute(m, vec.data(), t, qp.data(), qm.data()) == NLC_OK);
    // Real-energy mode in a symmetric domain: interior links share one value.
    CHECK(std::abs(std::complex<double>(qp[0], qp[1]) - std::complex<double>(qp[2], qp[3])) < 1e-12);
  }
  CHECK(nlc_eigen_vector(e, 3, vec.data()) == NLC_ERR_INVALID_ARGUMENT);
  CHECK(std::string(nlc_last_error()).find("range") != std::string::npos);
  nlc_eigen_free(e);

  double s[8];
  REQUIRE(nlc_smatrix(m, 0.0, 0.5, 1.0, s) == NLC_OK);
  const double unit = s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3];
  CHECK(std::abs(unit - 1.0) < 1e-12);
  CHECK(nlc_smatrix(m, 0.0, 0.5, 4.0, s) == NLC_ERR_DOMAIN);
  CHECK(std::string(nlc_status_name(NLC_ERR_DOMAIN)) == "DomainError");

  nlc_transform_free(t);
  nlc_model_free(m);
}

TEST_CASE("C API: argument and config errors map to status codes") {
  nlc_model* m = nullptr;
  CHECK(nlc_model_create(0, nullptr, nullptr, nullptr, &m) == NLC_ERR_INVALID_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(nlc_model_from_json("{not json", &m) == NLC_ERR_CONFIG);
  CHECK(nlc_model_from_json(R"({"onsite": [0, 0], "hop_up": [1, 2, 3]})", &m) == NLC_ERR_CONFIG);
  REQUIRE(nlc_model_from_json(R"({"onsite": [0, 0, 0], "hop_up": [1, 1]})", &m) == NLC_OK);
  nlc_transform* t = nullptr;
  CHECK(nlc_transform_create(NLC_TRANSLATION, 1, 3, -1, 0, &t) != NLC_OK);
  REQUIRE(nlc_transform_create(NLC_INVERSION, 1, 5, 0, 0, &t) == NLC_OK);
  double r;
  CHECK(nlc_symmetry_residual(m, t, &r) == NLC_ERR_DOMAIN);
  CHECK(nlc_symmetry_residual(nullptr, t, &r) == NLC_ERR_INVALID_ARGUMENT);
  nlc_transform_free(t);
  nlc_model_free(m);
}

TEST_CASE("run is deterministic and independent of the thread count") {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b"), c = fresh_dir("det_c");
  const std::string cfg = "\"" + (kConfigs / "fig4i.json").string() + "\"";
  REQUIRE(run_cli("run " + cfg + " --out " + a.string()) == 0);
  REQUIRE(run_cli("run " + cfg + " --out " + b.string()) == 0);
  REQUIRE(run_cli("run " + cfg + " --out " + c.string() + " --threads 4") == 0);
  int csv = 0;
  for (const std::string& name : listing(a)) {
    if (fs::path(name).extension() != ".csv") continue;
    ++csv;
    CHECK(slurp(a / name) == slurp(b / name));
    CHECK(slurp(a / name) == slurp(c / name));
  }
  CHECK(csv >= 2);
  const Json manifest = Json::parse(slurp(a / "fig4i.manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["exit_code"] == 0);
  CHECK(manifest["config_sha256"].get<std::string>().size() == 64);
  CHECK(manifest["all_checks_as_expected"] == true);
  const std::string header = slurp(a / "fig4i.sweep.csv").substr(0, 200);
  CHECK(header.find(',') != std::string::npos);
}

TEST_CASE("malformed config exits 2 and leaves only the manifest") {
  const fs::path dir = fresh_dir("malformed");
  const fs::path cfg = dir / "broken.json";
  std::ofstream(cfg) << "{\"experiment\": \"eigen_report\", \"model\": ";
  const fs::path out = dir / "out";
  CHECK(run_cli("run " + cfg.string() + " --out " + out.string()) == 2);
  REQUIRE(listing(out) == std::vector<std::string>{"broken.manifest.json"});
  const Json manifest = Json::parse(slurp(out / "broken.manifest.json"));
  CHECK(manifest["exit_code"] == 2);
  CHECK(manifest["error"]["code"] == "ConfigError");

  const fs::path bad_field = dir / "bad_field.json";
  std::ofstream(bad_field) << R"({"experiment": "eigen_report", "model": {"onsite": [0, 0], "hop_up": ["x"]}})";
  CHECK(run_cli("verify " + bad_field.string() + " --out " + out.string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run " + cfg.string() + " --threads 0") == 2);
}

TEST_CASE("module error exits 1 with a structured error file") {
  const fs::path dir = fresh_dir("module");
  const fs::path cfg = dir / "slow_drive.json";
  Json j = Json::parse(slurp(kConfigs / "fig5.json"));
  j["model"]["file"] = (kConfigs / "fig5_model.json").string();
  j["drive"]["omega_over_pi"] = 0.005;
  j["sidebands"] = 1;
  std::ofstream(cfg) << j.dump();
  CHECK(run_cli("run " + cfg.string() + " --out " + dir.string()) == 1);
  const Json err = Json::parse(slurp(dir / "slow_drive.error.json"));
  CHECK(err["code"] == "UnconvergedTruncation");
  CHECK_FALSE(err["message"].get<std::string>().empty());
  const Json manifest = Json::parse(slurp(dir / "slow_drive.manifest.json"));
  CHECK(manifest["exit_code"] == 1);
  CHECK(manifest["status"] == "module_error");
}

TEST_CASE("verify exit codes, expectations and thread override") {
  const fs::path dir = fresh_dir("verify");
  CHECK(run_cli("verify " + (kConfigs / "fig5_s05.json").string() + " --out " + dir.string()) == 0);
  const Json m = Json::parse(slurp(dir / "fig5_s05.manifest.json"));
  bool negative = false;
  for (const Json& c : m["checks"]) {
    if (c["name"] == "period-averaged constancy") negative = c["verdict"] == "FAIL-as-expected";
  }
  CHECK(negative);
  CHECK(m["outputs"].empty());

  CHECK(run_cli("verify " + (kConfigs / "fig4ii.json").string() + " --out " + dir.string()) == 3);
  CHECK(Json::parse(slurp(dir / "fig4ii.manifest.json"))["all_checks_as_expected"] == false);

  CHECK(run_cli("run " + (kConfigs / "cls_scan.json").string() + " --out " + dir.string() +
                  " --threads 2 --format json",
                "NLC_THREADS=3") == 0);
  const Json cls = Json::parse(slurp(dir / "cls_scan.manifest.json"));
  CHECK(cls["threads"] == 3);
  CHECK(fs::exists(dir / "cls_scan.domains.json"));
  CHECK(Json::parse(slurp(dir / "cls_scan.domains.json")).is_object());

  char* report = nullptr;
  CHECK(nlc_verify_experiment((kConfigs / "cls_eigen.json").c_str(), dir.c_str(), 1, &report) == 0);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("PASS") != std::string::npos);
  nlc_string_free(report);
}
