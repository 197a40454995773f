// Acceptance suite: one line per criterion with the pinned tolerances.
// Exit status is 0 when every criterion passes or fails only in the
// documented known-red set; any other failure gives 1.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <string>

#include "nlc/currents.hpp"
#include "nlc/experiments.hpp"
#include "nlc/scattering.hpp"
#include "nlc/spectral.hpp"
#include "support.hpp"

using namespace nlc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds
  std::function<Outcome()> run;
};

// Criteria whose failure is understood and recorded; they still print FAIL.
const std::set<int> kKnownRed = {5, 9};

const fs::path kConfigs = NLC_CONFIG_DIR;

fs::path scratch() {
  const fs::path p = fs::temp_directory_path() / "nlc_acceptance";
  fs::create_directories(p);
  return p;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

RunOutcome verify(const std::string& name, int threads = 1) {
  RunOptions o;
  o.out_dir = scratch() / fs::path(name).stem();
  o.threads = threads;
  return verify_experiment(kConfigs / name, o);
}

// All checks of a verify run must pass outright (expectations ignored).
Outcome all_pass(const RunOutcome& r, const std::string& tag) {
  Outcome out;
  if (r.exit_code == 1 || r.exit_code == 2) {
    out.detail = tag + ": " + r.error_code + " " + r.error_message;
    return out;
  }
  out.passed = true;
  std::string failed;
  double worst = 0.0;
  for (const CheckResult& c : r.result.checks) {
    if (c.upper_bound) worst = std::max(worst, c.measured);
    if (!c.passed) {
      out.passed = false;
      failed += " [" + c.name + " = " + fmt(c.measured) + " vs " + fmt(c.tolerance) + "]";
    }
  }
  out.detail = tag + ": " + std::to_string(r.result.checks.size()) + " checks";
  out.detail += failed.empty() ? ", worst upper-bound " + fmt(worst) : ", failing" + failed;
  return out;
}

Outcome combine(std::initializer_list<Outcome> parts) {
  Outcome o{true, {}};
  for (const Outcome& p : parts) {
    o.passed = o.passed && p.passed;
    o.detail += (o.detail.empty() ? "" : "; ") + p.detail;
  }
  return o;
}

Outcome bound(const std::string& what, double measured, double tol) {
  return {measured < tol, what + " " + fmt(measured) + " < " + fmt(tol)};
}

const CheckResult* find_check(const RunOutcome& r, const std::string& name) {
  for (const CheckResult& c : r.result.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

constexpr Direction kDirs[] = {Direction::up, Direction::down};

Outcome oracle_equivalence() {
  std::mt19937_64 rng(20240501);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 12)(rng);
    const oracle::Chain c = oracle::random_chain(rng, n);
    const LatticeModel model = test::to_model(c);
    const CMatrix H = oracle::dense(c);
    const CVector psi = oracle::random_state(rng, n);
    const oracle::Map S = test::random_map(rng, n);
    const LinkCurrentField f = nlc_field(model, psi, test::to_transform(S));
    for (int site = 1; site <= n; ++site) {
      for (Direction d : kDirs) {
        const cd def = oracle::def_nlc(H, psi, S, site, step(d));
        const cd op = oracle::expectation(psi, oracle::nlc_operator(H, S, site, step(d)));
        worst = std::max({worst, std::abs(f.q(site, d) - def), std::abs(op - def)});
      }
    }
  }
  return bound("max entrywise difference over 50 cases", worst, 1e-13);
}

Outcome continuity_law() {
  std::mt19937_64 rng(18);
  const LatticeModel model = test::to_model(oracle::random_chain(rng, 8));
  const CVector psi0 = oracle::random_state(rng, 8);
  const SymmetryTransform t = SymmetryTransform::inversion(2, 7);
  auto worst = [&](double dt) {
    const std::vector<double> r = continuity_residual(model, time_evolve(model, psi0, 2.0, dt), t);
    return *std::max_element(r.begin(), r.end());
  };
  const double ratio = worst(0.02) / worst(0.01);
  return {ratio >= 3.5 && ratio <= 4.5, "residual ratio under dt halving " + fmt(ratio) + " in [3.5, 4.5]"};
}

Outcome stationary_invariance() {
  return combine({all_pass(verify("cls_eigen.json"), "CLS"),
                  all_pass(verify("gapped_eigen.json"), "gapped")});
}

Outcome mapping_relations() {
  // Current mapping on scattering states of a two-domain PT array.
  const std::vector<cd> v = {0, {0, -0.15}, 0, {0, 0.15}, 0, 0, {0, -0.05}, 0, {0, 0.05}, 0};
  const std::vector<cd> h = {0.1, 0.15, 0.15, 0.1, 0.1, 0.1, 0.15, 0.15, 0.1};
  const LatticeModel scat(v, h, h);
  const SymmetryTransform ta = SymmetryTransform::inversion(1, 5, true);
  double current = 0.0;
  for (int j = 1; j < 40; ++j) {
    const ScatteringSolution s = solve_scattering(scat, LeadSpec{0.0, 0.1}, std::numbers::pi * j / 40, 1.0, 0.0);
    for (int site = 1; site <= 4; ++site) {
      const cd p = amplitude_map_current(scat, s.interior, ta, site, Direction::up);
      current = std::max(current, std::abs(p - s.interior(map_site(ta, site) - 1)) /
                                    s.interior.cwiseAbs().maxCoeff());
    }
  }
  // Summation mapping on real bound modes with an odd PT domain.
  const LatticeModel bound_model({0.9, 0.1, -0.3, 0.2, 0.05, 0.2, -0.3, 0.1, -0.4},
                                 {0.35, 0.5, 0.4, 0.6, 0.6, 0.4, 0.5, 0.7});
  const SymmetryTransform tb = SymmetryTransform::inversion(2, 8, true);
  const EigenSolution modes = eigenmodes(bound_model);
  double summation = 0.0;
  for (int nu = 0; nu < modes.size(); ++nu) {
    CVector psi = modes.mode(nu);
    Eigen::Index imax;
    psi.cwiseAbs().maxCoeff(&imax);
    psi *= std::abs(psi(imax)) / psi(imax);
    if (psi.segment(1, 7).cwiseAbs().minCoeff() < 1e-3) continue;
    for (int site = 2; site <= 8; ++site) {
      summation = std::max(summation, std::abs(amplitude_map_summation(bound_model, psi, tb, site, 5, 1.0) -
                                               psi(map_site(tb, site) - 1)));
    }
  }
  std::mt19937_64 rng(14);
  double connection = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(3, 12)(rng);
    const LatticeModel m = test::to_model(oracle::random_chain(rng, n));
    const CVector psi = oracle::random_state(rng, n);
    const LinkCurrentField f = nlc_field(m, psi, test::to_transform(test::random_map(rng, n)));
    for (int site = 1; site <= n; ++site) {
      for (Direction d : kDirs) connection = std::max(connection, current_connection_residual(f, site, d));
    }
  }
  return combine({bound("current mapping", current, 1e-9), bound("summation mapping", summation, 1e-10),
                  bound("current connection", connection, 1e-12)});
}

oracle::Chain symmetric_chain(std::mt19937_64& rng, int n, bool hermitian) {
  oracle::Chain c;
  for (int i = 0; i < n; ++i) {
    c.onsite.push_back(hermitian ? cd{oracle::random_real(rng, -0.1, 0.1)} : oracle::random_complex(rng, 0.1));
  }
  for (int i = 0; i + 1 < n; ++i) {
    const cd hop = hermitian ? cd{oracle::random_real(rng, 0.05, 0.2)} : oracle::random_complex(rng, 0.15);
    c.up.push_back(hop);
    c.down.push_back(hop);
  }
  return c;
}

Outcome scattering_core() {
  std::mt19937_64 rng(22);
  const LeadSpec lead{0.0, 0.1};
  double cc = 0.0, unitary = 0.0, recip = 0.0, compose = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 12)(rng);
    const LatticeModel herm = test::to_model(symmetric_chain(rng, n, true));
    const LatticeModel sym = test::to_model(symmetric_chain(rng, n, false));
    for (int j = 1; j < 40; ++j) {
      const double k = std::numbers::pi * j / 40.0;
      for (const LatticeModel* m : {&herm, &sym}) {
        cc = std::max(cc, close_coupling_residual(*m, solve_scattering(*m, lead, k, 1.0, 0.0)));
        cc = std::max(cc, close_coupling_residual(*m, solve_scattering(*m, lead, k, 0.0, 1.0)));
      }
      const SMatrix s = s_matrix(herm, lead, k);
      Eigen::Matrix2cd S;
      S << s.r, s.t_prime, s.t, s.r_prime;
      unitary = std::max(unitary, (S.adjoint() * S - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff());
      const SMatrix ss = s_matrix(sym, lead, k);
      recip = std::max(recip, std::abs(ss.t - ss.t_prime) / std::max(1.0, std::abs(ss.t)));
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    const int n1 = std::uniform_int_distribution<int>(1, 6)(rng);
    const int n2 = std::uniform_int_distribution<int>(1, 6)(rng);
    const int gap = trial % 3;
    const oracle::Chain a = symmetric_chain(rng, n1, false);
    const oracle::Chain b = symmetric_chain(rng, n2, trial % 2 == 1);
    oracle::Chain full = a;
    for (int g = 0; g <= gap; ++g) {
      full.up.push_back(lead.h);
      full.down.push_back(lead.h);
      if (g < gap) full.onsite.push_back(lead.v);
    }
    full.onsite.insert(full.onsite.end(), b.onsite.begin(), b.onsite.end());
    full.up.insert(full.up.end(), b.up.begin(), b.up.end());
    full.down.insert(full.down.end(), b.down.begin(), b.down.end());
    for (double k : {0.4, 1.1, 1.9, 2.7}) {
      const SMatrix c = compose_smatrices(s_matrix(test::to_model(a), lead, k),
                                          s_matrix(test::to_model(b), lead, k), n1 + gap);
      const SMatrix f = s_matrix(test::to_model(full), lead, k);
      compose = std::max({compose, std::abs(c.r - f.r), std::abs(c.t - f.t), std::abs(c.t_prime - f.t_prime),
                          std::abs(c.r_prime - f.r_prime)});
    }
  }
  return combine({{cc <= 1e-12, "close-coupling " + fmt(cc) + " <= 1.00e-12"},
                  {unitary <= 1e-12, "Hermitian unitarity " + fmt(unitary) + " <= 1.00e-12"},
                  {recip <= 1e-12, "t = t' " + fmt(recip) + " <= 1.00e-12"},
                  {compose <= 1e-10, "composition " + fmt(compose) + " <= 1.00e-10"}});
}

Outcome floquet_criterion() {
  const RunOutcome on = verify("fig5.json");
  const RunOutcome off = verify("fig5_s05.json");
  Outcome o = all_pass(on, "s=1");
  const CheckResult* broken = find_check(off, "period-averaged constancy");
  const bool control = broken && !broken->passed;
  o.passed = o.passed && control;
  o.detail += "; s=0.5 constancy " + (broken ? fmt(broken->measured) : std::string("missing")) +
              (control ? " fails as required" : " did not fail");
  return o;
}

Outcome quasipower() {
  std::mt19937_64 rng(19);
  const int n = 8;
  std::vector<cd> v(n), h(n - 1);
  for (int i = 0; i < n / 2; ++i) {
    v[i] = oracle::random_complex(rng, 0.3);
    v[n - 1 - i] = std::conj(v[i]);
  }
  for (int i = 0; i < (n - 1) / 2 + 1; ++i) h[i] = h[n - 2 - i] = oracle::random_real(rng, 0.2, 0.6);
  const LatticeModel model(v, h, h);
  const CVector psi0 = oracle::random_state(rng, n);
  const SymmetryTransform t = SymmetryTransform::inversion(1, n, true);
  const Trajectory tr = time_evolve(model, psi0, 10.0, 0.01);
  const cd sigma0 = nonlocal_charge(psi0, t);
  double drift = 0.0;
  for (const CVector& s : tr.states) drift = std::max(drift, std::abs(nonlocal_charge(s, t) - sigma0));
  return bound("drift over " + std::to_string(tr.states.size() - 1) + " steps", drift, 1e-9);
}

} // namespace

int main() {
  const std::vector<Criterion> criteria = {
    {1, "oracle equivalence", 5, oracle_equivalence},
    {2, "continuity law O(dt^2)", 10, continuity_law},
    {3, "stationary invariance (CLS, gapped)", 5, stationary_invariance},
    {4, "PT inversion sweep, 400-point grid", 30,
     [] { return all_pass(verify("fig4i.json"), "fig4i"); }},
    {5, "KT translation sweep", 30, [] { return all_pass(verify("fig4ii.json"), "fig4ii"); }},
    {6, "mapping relations", 5, mapping_relations},
    {7, "scattering core", 5, scattering_core},
    {8, "PTR suite, 2000-point k-scan", 60,
     [] {
       return combine({all_pass(verify("fig7_sptr.json"), "sPTR"), all_pass(verify("fig7_aptr.json"), "aPTR")});
     }},
    {9, "two-domain PT scattering, 200x200 grid, 8 threads", 60,
     [] { return all_pass(verify("fig6.json", 8), "fig6"); }},
    {10, "Floquet averaged NLCs", 60, floquet_criterion},
    {11, "quasipower conservation", 5, quasipower},
  };

  int unexpected = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit;
    if (!in_time) o.detail += "; over time limit";
    const bool pass = o.passed && in_time;
    const bool known = !pass && kKnownRed.count(c.id);
    if (!pass && !known) ++unexpected;
    std::printf("criterion %2d %-4s %s | %.2fs (< %.0fs) | %s%s\n", c.id, pass ? "PASS" : "FAIL",
                c.title.c_str(), secs, c.time_limit, o.detail.c_str(), known ? " | known" : "");
    std::fflush(stdout);
  }
  std::printf("%d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
