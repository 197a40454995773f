#include "nlc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "nlc/currents.hpp"
#include "nlc/error.hpp"
#include "nlc/floquet.hpp"
#include "nlc/linalg.hpp"
#include "nlc/parallel.hpp"
#include "nlc/scattering.hpp"
#include "nlc/spectral.hpp"

namespace nlc {

const char* const kVersion = "1.0.0";

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void config_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::config, where + ": " + what);
}

double max_of(double a, double b) { return std::isnan(b) ? b : std::max(a, b); }

// Transform entry with plotting label and optional gap description.
struct DomainSpec {
  SymmetryTransform t;
  std::string label;
  std::vector<int> gap_sites;  // sites where the q+ run is interrupted
  std::vector<int> gap_links;  // links left out of magnitude constancy
  bool backward = false;
};

DomainSpec parse_domain(const Json& j, const std::string& where, int n_sites, int index) {
  DomainSpec d;
  d.t = parse_transform(j, where);
  try {
    d.t.validate(n_sites);
  } catch (const Error& e) {
    config_fail(where, e.what());
  }
  if (d.t.empty()) config_fail(where, "empty domain");
  d.label = j.contains("label") ? get_string(j, "label", where) : "D" + std::to_string(index + 1);
  auto int_list = [&](const char* key) {
    std::vector<int> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array()) config_fail(where + "." + key, "expected an array of sites");
    for (const Json& v : j[key]) {
      if (!v.is_number_integer()) config_fail(where + "." + key, "expected integers");
      out.push_back(v.get<int>());
    }
    return out;
  };
  d.gap_sites = int_list("gap_sites");
  d.gap_links = int_list("gap_links");
  d.backward = get_bool(j, "backward", where, false);
  if (d.backward && d.t.kind != TransformKind::translation) {
    config_fail(where + ".backward", "backward assignment needs a translation domain");
  }
  return d;
}

std::vector<DomainSpec> parse_domains(const Json& cfg, const char* key, int n_sites) {
  const Json& list = require(cfg, key, "config");
  if (!list.is_array() || list.empty()) config_fail(key, "expected a nonempty array");
  std::vector<DomainSpec> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    out.push_back(parse_domain(list[i], std::string(key) + "[" + std::to_string(i) + "]", n_sites,
                               static_cast<int>(i)));
  }
  return out;
}

ParamSet parse_params(const Json& cfg, const ModelSpec& model) {
  ParamSet p = model.defaults;
  if (!cfg.contains("params")) return p;
  const Json& ps = cfg["params"];
  if (!ps.is_object()) config_fail("params", "expected an object");
  for (const auto& [name, value] : ps.items()) {
    if (!model.params.count(name)) config_fail("params." + name, "model has no such parameter");
    if (!value.is_number()) config_fail("params." + name, "expected a number");
    p[name] = value.get<double>();
  }
  return p;
}

// Constancy of q+ over runs of interior links separated at gap sites.
double piecewise_deviation(const CVector& q_plus, const DomainSpec& d) {
  const auto [lo, hi] = interior_links(d.t);
  double worst = 0.0;
  std::vector<cd> run;
  for (int n = lo; n <= hi; ++n) {
    if (n > lo && std::count(d.gap_sites.begin(), d.gap_sites.end(), n)) {
      worst = max_of(worst, constancy_deviation(run));
      run.clear();
    }
    run.push_back(q_plus(n - 1));
  }
  return max_of(worst, constancy_deviation(run));
}

double whole_deviation(const CVector& q_plus, const SymmetryTransform& t) {
  const auto [lo, hi] = interior_links(t);
  std::vector<cd> q;
  for (int n = lo; n <= hi; ++n) q.push_back(q_plus(n - 1));
  return constancy_deviation(q);
}

Json num(double x) { return Json(x); }
Json integer(long x) { return Json(x); }

// ---------------------------------------------------------------- eigen_report

ExperimentPlan plan_eigen_report(const Json& cfg, const fs::path& base) {
  const ModelSpec spec = parse_model(require(cfg, "model", "config"), base);
  const ParamSet params = parse_params(cfg, spec);
  const LatticeModel model = spec.build(params);
  const std::vector<DomainSpec> domains = parse_domains(cfg, "transforms", model.size());

  ExperimentPlan plan;
  plan.experiment = "eigen_report";
  plan.check_names.push_back("eigen residual");
  for (const DomainSpec& d : domains) {
    if (d.gap_sites.empty()) {
      plan.check_names.push_back("real-E constancy " + d.label);
    } else {
      plan.check_names.push_back("real-E piecewise constancy " + d.label);
      plan.check_names.push_back("gap breaks constancy " + d.label);
    }
    if (d.backward) plan.check_names.push_back("backward constancy " + d.label);
  }
  plan.execute = [model, domains](int) {
    ExperimentResult res;
    res.experiment = "eigen_report";
    const EigenSolution modes = eigenmodes(model);
    const CMatrix H = hamiltonian_matrix(model);
    const double norm = inf_norm(H);
    const double real_tol = 1e-8 * norm;

    Table eig{"eigen", {"mode", "re_E[energy]", "im_E[energy]", "condition", "real_E", "degenerate"}, {}};
    double residual = 0.0;
    for (int nu = 0; nu < modes.size(); ++nu) {
      const CVector x = modes.mode(nu);
      residual = max_of(residual, (H * x - modes.values[nu] * x).cwiseAbs().maxCoeff() / norm);
      eig.rows.push_back({integer(nu), num(modes.values[nu].real()), num(modes.values[nu].imag()),
                          num(modes.condition[nu]),
                          integer(std::abs(modes.values[nu].imag()) <= real_tol),
                          integer(modes.degenerate[nu])});
    }
    res.checks.push_back(make_check("eigen residual", residual, 1e-10));

    Table nlc_table{"nlc",
                    {"mode", "domain", "site", "re_q_plus", "im_q_plus", "re_q_minus", "im_q_minus",
                     "re_dual_plus", "im_dual_plus", "re_backward", "im_backward"},
                    {}};
    for (const DomainSpec& d : domains) {
      double dev = 0.0, gap_dev = 0.0, back_dev = 0.0;
      int counted = 0;
      for (int nu = 0; nu < modes.size(); ++nu) {
        const CVector psi = modes.mode(nu);
        const LinkCurrentField f = nlc_field(model, psi, d.t);
        const CVector back = d.backward ? backward_assignment(model, psi, d.t) : f.q_plus;
        for (int n = 1; n <= model.size(); ++n) {
          nlc_table.rows.push_back({integer(nu), d.label, integer(n), num(f.q_plus(n - 1).real()),
                                    num(f.q_plus(n - 1).imag()), num(f.q_minus(n - 1).real()),
                                    num(f.q_minus(n - 1).imag()), num(f.dual_plus(n - 1).real()),
                                    num(f.dual_plus(n - 1).imag()), num(back(n - 1).real()),
                                    num(back(n - 1).imag())});
        }
        if (std::abs(modes.values[nu].imag()) > real_tol || modes.degenerate[nu]) continue;
        ++counted;
        dev = max_of(dev, piecewise_deviation(f.q_plus, d));
        if (!d.gap_sites.empty()) gap_dev = max_of(gap_dev, whole_deviation(f.q_plus, d.t));
        if (d.backward) {
          std::vector<cd> q;
          for (int n = d.t.d_lo; n <= d.t.u_hi(); ++n) q.push_back(back(n - 1));
          back_dev = max_of(back_dev, constancy_deviation(q));
        }
      }
      const std::string note = std::to_string(counted) + " real-E nondegenerate modes";
      if (d.gap_sites.empty()) {
        res.checks.push_back(make_check("real-E constancy " + d.label, dev, 1e-9, true, note));
      } else {
        res.checks.push_back(make_check("real-E piecewise constancy " + d.label, dev, 1e-9, true, note));
        res.checks.push_back(make_check("gap breaks constancy " + d.label, gap_dev, 1e-6, false, note));
      }
      if (d.backward) {
        res.checks.push_back(make_check("backward constancy " + d.label, back_dev, 1e-9, true, note));
      }
    }
    res.tables.push_back(std::move(eig));
    res.tables.push_back(std::move(nlc_table));
    return res;
  };
  return plan;
}

// --------------------------------------------------------------- symmetry_scan

ExperimentPlan plan_symmetry_scan(const Json& cfg, const fs::path& base) {
  const ModelSpec spec = parse_model(require(cfg, "model", "config"), base);
  const LatticeModel model = spec.build(parse_params(cfg, spec));
  const std::string kind_name = get_string(cfg, "kind", "config");
  TransformKind kind;
  if (kind_name == "inversion") kind = TransformKind::inversion;
  else if (kind_name == "translation") kind = TransformKind::translation;
  else config_fail("kind", "expected 'inversion' or 'translation'");
  const bool tr = get_bool(cfg, "time_reversal", "config", false);

  ExperimentPlan plan;
  plan.experiment = "symmetry_scan";
  plan.check_names = {"domain residuals", "CLS found", "CLS exact cover"};
  plan.execute = [model, kind, tr](int) {
    ExperimentResult res;
    res.experiment = "symmetry_scan";
    const double tol = default_symmetry_tol(model);
    const std::vector<SymmetryTransform> found = detect_maximal_domains(model, kind, tr);
    Table domains{"domains", {"kind", "lo", "hi", "center2", "shift", "size", "residual"}, {}};
    double worst = 0.0;
    const char* kname = kind == TransformKind::inversion ? "inversion" : "translation";
    for (const SymmetryTransform& t : found) {
      const double r = symmetry_residual(model, t);
      worst = max_of(worst, r);
      domains.rows.push_back({kname, integer(t.d_lo), integer(t.d_hi), integer(t.center2),
                              integer(t.shift), integer(t.domain_size()), num(r)});
    }
    res.checks.push_back(make_check("domain residuals", worst, tol, true,
                                    std::to_string(found.size()) + " maximal domains"));
    const auto cls = decompose_cls(model, kind, tr);
    Table cover{"cls", {"index", "lo", "hi", "center2", "shift"}, {}};
    double uncovered = 0.0;
    if (cls) {
      std::vector<int> hits(model.size(), 0);
      for (std::size_t i = 0; i < cls->size(); ++i) {
        const SymmetryTransform& t = (*cls)[i];
        cover.rows.push_back({integer(static_cast<long>(i)), integer(t.d_lo), integer(t.d_hi),
                              integer(t.center2), integer(t.shift)});
        for (int n = t.u_lo(); n <= t.u_hi(); ++n) ++hits[n - 1];
      }
      for (int h : hits) uncovered += (h != 1);
    } else {
      uncovered = model.size();
    }
    res.checks.push_back(make_check("CLS found", cls ? 1.0 : 0.0, 0.5, false));
    res.checks.push_back(make_check("CLS exact cover", uncovered, 0.0, true,
                                    "sites covered other than exactly once"));
    res.tables.push_back(std::move(domains));
    res.tables.push_back(std::move(cover));
    return res;
  };
  return plan;
}

// -------------------------------------------------------------------- pt_sweep

ExperimentPlan plan_pt_sweep(const Json& cfg, const fs::path& base) {
  const ModelSpec spec = parse_model(require(cfg, "model", "config"), base);
  const ParamSet params = parse_params(cfg, spec);
  const Json& sweep = require(cfg, "sweep", "config");
  const std::string param = get_string(sweep, "param", "sweep");
  if (!spec.params.count(param)) config_fail("sweep.param", "model has no parameter '" + param + "'");
  const std::vector<double> grid = parse_grid(require(sweep, "grid", "sweep"), "sweep.grid");
  const DomainSpec dom = parse_domain(require(cfg, "transform", "config"), "transform", spec.size(), 0);
  const bool inversion = dom.t.kind == TransformKind::inversion;

  ExperimentPlan plan;
  plan.experiment = "pt_sweep";
  if (inversion) {
    plan.check_names = {"real window exists", "Q=0 in unbroken window",
                        "conjugate-pair cancellation", "sum of Q vanishes in broken phase"};
  } else {
    plan.check_names = {"real window exists", "constancy in unbroken window",
                        "imaginary q in unbroken window", "backward constancy over U",
                        "sum of Q imaginary in broken phase"};
  }
  plan.execute = [spec, params, param, grid, dom, inversion](int threads) {
    ExperimentResult res;
    res.experiment = "pt_sweep";
    auto family = [&](double p) {
      ParamSet ps = params;
      ps[param] = p;
      return spec.build(ps);
    };
    const std::vector<SweepPoint> pts = pt_transition_sweep(family, grid, dom.t, threads);
    // Backward constancy needs the eigenvectors again; recompute per point.
    std::vector<double> back_dev(grid.size(), 0.0);
    if (!inversion) {
      parallel_for(grid.size(), threads, [&](std::size_t g) {
        if (!pts[g].all_real) return;
        const LatticeModel m = family(grid[g]);
        const EigenSolution modes = eigenmodes(m);
        for (int nu = 0; nu < modes.size(); ++nu) {
          if (modes.degenerate[nu]) continue;
          const CVector b = backward_assignment(m, modes.mode(nu), dom.t);
          std::vector<cd> q;
          for (int n = dom.t.d_lo; n <= dom.t.u_hi(); ++n) q.push_back(b(n - 1));
          back_dev[g] = max_of(back_dev[g], constancy_deviation(q));
        }
      });
    }

    Table modes_table{"sweep",
                      {param, "mode", "re_E[energy]", "im_E[energy]", "re_Q", "im_Q", "deviation",
                       "max_re_q", "condition", "real_E"},
                      {}};
    Table summary{"summary", {param, "all_real", "pair_residual", "re_sum_Q", "im_sum_Q"}, {}};
    int window = 0;
    double q_in = 0.0, pair = 0.0, sum_abs = 0.0, dev_in = 0.0, re_in = 0.0, sum_re = 0.0,
           back = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t g = 0; g < pts.size(); ++g) {
      const SweepPoint& p = pts[g];
      for (const ModeRecord& m : p.modes) {
        modes_table.rows.push_back({num(p.parameter), integer(m.index), num(m.energy.real()),
                                    num(m.energy.imag()), num(m.q_domain.real()),
                                    num(m.q_domain.imag()), num(m.deviation), num(m.max_real),
                                    num(m.condition), integer(m.real_energy)});
      }
      summary.rows.push_back({num(p.parameter), integer(p.all_real), num(p.pair_residual),
                              num(p.q_sum.real()), num(p.q_sum.imag())});
      if (p.all_real) {
        ++window;
        lo = std::min(lo, p.parameter);
        hi = std::max(hi, p.parameter);
        for (const ModeRecord& m : p.modes) {
          q_in = max_of(q_in, std::abs(m.q_domain));
          if (!m.degenerate) dev_in = max_of(dev_in, m.deviation);
          re_in = max_of(re_in, m.max_real);
        }
        back = max_of(back, back_dev[g]);
      } else {
        pair = max_of(pair, p.pair_residual);
        sum_abs = max_of(sum_abs, std::abs(p.q_sum));
        sum_re = max_of(sum_re, std::abs(p.q_sum.real()));
      }
    }
    const std::string wnote = window ? "window [" + format_number(lo) + ", " + format_number(hi) + "]"
                                     : "no all-real grid point";
    res.checks.push_back(make_check("real window exists", window, 0.5, false, wnote));
    if (inversion) {
      res.checks.push_back(make_check("Q=0 in unbroken window", q_in, 1e-10));
      res.checks.push_back(make_check("conjugate-pair cancellation", pair, 1e-10));
      res.checks.push_back(make_check("sum of Q vanishes in broken phase", sum_abs, 1e-10));
    } else {
      res.checks.push_back(make_check("constancy in unbroken window", dev_in, 1e-9));
      res.checks.push_back(make_check("imaginary q in unbroken window", re_in, 1e-10));
      res.checks.push_back(make_check("backward constancy over U", back, 1e-9));
      res.checks.push_back(make_check("sum of Q imaginary in broken phase", sum_re, 1e-10,
                                      true, "max |Re sum_nu Q_nu| over broken points"));
    }
    res.tables.push_back(std::move(modes_table));
    res.tables.push_back(std::move(summary));
    return res;
  };
  return plan;
}

// -------------------------------------------------------------- floquet_report

ExperimentPlan plan_floquet_report(const Json& cfg, const fs::path& base) {
  const ModelSpec spec = parse_model(require(cfg, "model", "config"), base);
  const LatticeModel model = spec.build(parse_params(cfg, spec));
  const DrivenModel driven = parse_drive(require(cfg, "drive", "config"), model);
  const std::vector<DomainSpec> domains = parse_domains(cfg, "domains", model.size());
  for (const DomainSpec& d : domains) {
    if (d.t.kind != TransformKind::inversion) config_fail("domains", "Floquet report needs inversion domains");
  }
  FloquetOptions opt;
  opt.sidebands = get_int(cfg, "sidebands", "config", 6);
  opt.samples = get_int(cfg, "samples", "config", 256);
  if (opt.sidebands < 1) config_fail("sidebands", "must be positive");
  if (opt.samples < 2) config_fail("samples", "must be at least 2");
  std::vector<int> trace;
  if (cfg.contains("trace_modes")) {
    for (const Json& v : cfg["trace_modes"]) {
      if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() >= model.size()) {
        config_fail("trace_modes", "expected mode indices in [0, N)");
      }
      trace.push_back(v.get<int>());
    }
  }

  ExperimentPlan plan;
  plan.experiment = "floquet_report";
  plan.check_names = {"quasienergy count", "quasienergy M-stability", "mode periodicity",
                      "period-averaged constancy", "i*qbar real", "zero-sum",
                      "mirror identity", "Simpson convergence"};
  for (const DomainSpec& d : domains) {
    if (!d.gap_links.empty()) plan.check_names.push_back("gapped |qbar| constancy " + d.label);
  }
  plan.execute = [driven, domains, opt, trace](int threads) {
    ExperimentResult res;
    res.experiment = "floquet_report";
    const FloquetSolution sol = floquet_modes(driven, opt);
    FloquetSolution fine = sol;
    {
      // Same modes sampled twice as densely, for the quadrature check.
      FloquetOptions o = opt;
      o.samples = 2 * sol.samples;
      o.check_truncation = false;
      fine = floquet_modes(driven, o);
    }
    const int N = driven.base.size();
    const int count = sol.size();
    struct PerMode {
      std::vector<PeriodAverage> avg;
      double zero = 0.0, mirror = 0.0, simpson = 0.0;
      std::vector<double> gapped;
    };
    std::vector<PerMode> per(count);
    parallel_for(count, threads, [&](std::size_t mu) {
      PerMode& pm = per[mu];
      for (const DomainSpec& d : domains) {
        PeriodAverage a = period_averaged_nlc(driven, sol, static_cast<int>(mu), d.t);
        const PeriodAverage b = period_averaged_nlc(driven, fine, static_cast<int>(mu), d.t);
        pm.simpson = max_of(pm.simpson, (a.q_plus - b.q_plus).cwiseAbs().maxCoeff());
        for (double z : zero_sum_check(driven, sol, static_cast<int>(mu), d.t)) {
          pm.zero = max_of(pm.zero, z);
        }
        pm.mirror = max_of(pm.mirror,
                           mirror_identity_residual(driven, sol, static_cast<int>(mu), d.t));
        if (!d.gap_links.empty()) {
          const auto [lo, hi] = interior_links(d.t);
          std::vector<cd> mags;
          for (int n = lo; n <= hi; ++n) {
            if (!std::count(d.gap_links.begin(), d.gap_links.end(), n)) {
              mags.emplace_back(std::abs(a.q_plus(n - 1)));
            }
          }
          pm.gapped.push_back(constancy_deviation(mags));
        }
        pm.avg.push_back(std::move(a));
      }
    });

    Table qe{"quasienergies", {"mu", "re_eps[energy]", "im_eps[energy]", "central_weight", "periodicity"}, {}};
    Table nt{"nlc",
             {"mu", "re_eps[energy]", "site", "domain", "re_qbar_plus", "im_qbar_plus",
              "re_qbar_minus", "im_qbar_minus", "domain_deviation"},
             {}};
    double dev = 0.0, re = 0.0, zero = 0.0, mirror = 0.0, periodic = 0.0, simpson = 0.0;
    std::vector<double> gapped(domains.size(), 0.0);
    for (int mu = 0; mu < count; ++mu) {
      periodic = max_of(periodic, sol.periodicity_error(mu));
      qe.rows.push_back({integer(mu), num(sol.quasienergies[mu].real()),
                         num(sol.quasienergies[mu].imag()), num(sol.central_weight[mu]),
                         num(sol.periodicity_error(mu))});
      const PerMode& pm = per[mu];
      zero = max_of(zero, pm.zero);
      mirror = max_of(mirror, pm.mirror);
      simpson = max_of(simpson, pm.simpson);
      std::size_t gi = 0;
      for (std::size_t di = 0; di < domains.size(); ++di) {
        const DomainSpec& d = domains[di];
        const PeriodAverage& a = pm.avg[di];
        dev = max_of(dev, a.deviation);
        re = max_of(re, a.max_real);
        if (!d.gap_links.empty()) gapped[di] = max_of(gapped[di], pm.gapped[gi++]);
        for (int n = d.t.d_lo; n <= d.t.d_hi; ++n) {
          nt.rows.push_back({integer(mu), num(sol.quasienergies[mu].real()), integer(n), d.label,
                             num(a.q_plus(n - 1).real()), num(a.q_plus(n - 1).imag()),
                             num(a.q_minus(n - 1).real()), num(a.q_minus(n - 1).imag()),
                             num(a.deviation)});
        }
      }
    }
    res.checks.push_back(make_check("quasienergy count", std::abs(count - N), 0.0, true,
                                    std::to_string(count) + " modes for N = " + std::to_string(N)));
    res.checks.push_back(make_check("quasienergy M-stability", sol.truncation_shift, 1e-8, true,
                                    "M = " + std::to_string(sol.sidebands) + " vs " +
                                      std::to_string(sol.sidebands + 2)));
    res.checks.push_back(make_check("mode periodicity", periodic, 1e-8));
    res.checks.push_back(make_check("period-averaged constancy", dev, 1e-6));
    res.checks.push_back(make_check("i*qbar real", re, 1e-6, true, "max |Re qbar+| on domain links"));
    res.checks.push_back(make_check("zero-sum", zero, 1e-6));
    res.checks.push_back(make_check("mirror identity", mirror, 1e-10));
    res.checks.push_back(make_check("Simpson convergence", simpson, 1e-8,
                                    true, "N_t = " + std::to_string(sol.samples) + " vs doubled"));
    for (std::size_t di = 0; di < domains.size(); ++di) {
      if (domains[di].gap_links.empty()) continue;
      res.checks.push_back(
        make_check("gapped |qbar| constancy " + domains[di].label, gapped[di], 1e-6));
    }

    if (!trace.empty()) {
      Table tr{"trace", {"mu", "t[time]", "site", "domain", "re_q_plus", "im_q_plus"}, {}};
      for (int mu : trace) {
        for (int j = 0; j <= sol.samples; ++j) {
          const double t = sol.time(j);
          const LatticeModel m = model_at_time(driven, t);
          for (const DomainSpec& d : domains) {
            const LinkCurrentField f = nlc_field(m, sol.modes[mu][j], d.t);
            for (int n = d.t.d_lo; n <= d.t.d_hi; ++n) {
              tr.rows.push_back({integer(mu), num(t), integer(n), d.label,
                                 num(f.q_plus(n - 1).real()), num(f.q_plus(n - 1).imag())});
            }
          }
        }
      }
      res.tables.push_back(std::move(tr));
    }
    res.tables.insert(res.tables.begin(), std::move(nt));
    res.tables.insert(res.tables.begin(), std::move(qe));
    return res;
  };
  return plan;
}

// ------------------------------------------------------------ scattering_sweep

struct ContourSpec {
  ParamSet values;
  std::string label;
};

std::string param_label(const ParamSet& p) {
  std::string s;
  char buf[32];
  for (const auto& [k, v] : p) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    s += (s.empty() ? "" : ",") + k + "=" + buf;
  }
  return s;
}

std::vector<double> k_grid_of(const Json& cfg) {
  if (!cfg.contains("k_grid")) return default_k_grid(200);
  const std::vector<double> k = parse_grid(cfg["k_grid"], "k_grid");
  for (double x : k) {
    if (!(x > 0.0 && x < kPi)) config_fail("k_grid", "quasimomenta must lie in (0, pi)");
  }
  return k;
}

ExperimentPlan plan_scattering_sweep(const Json& cfg, const fs::path& base) {
  const ModelSpec spec = parse_model(require(cfg, "model", "config"), base);
  if (!spec.lead) config_fail("model.lead", "scattering needs a lead");
  const ParamSet params = parse_params(cfg, spec);
  const Json& sweep = require(cfg, "sweep", "config");
  const std::string param = get_string(sweep, "param", "sweep");
  if (!spec.params.count(param)) config_fail("sweep.param", "model has no parameter '" + param + "'");
  const std::vector<double> grid = parse_grid(require(sweep, "grid", "sweep"), "sweep.grid");
  const std::vector<double> kgrid = k_grid_of(cfg);
  const std::vector<DomainSpec> domains = parse_domains(cfg, "domains", spec.size());
  const double generic_floor = get_number(cfg, "generic_floor", "config", 1e-4);

  auto parse_point = [&](const Json& j, const std::string& where) {
    ParamSet p;
    if (!j.is_object() || j.empty()) config_fail(where, "expected parameter values");
    for (const auto& [name, value] : j.items()) {
      if (!spec.params.count(name)) config_fail(where + "." + name, "unknown parameter");
      if (!value.is_number()) config_fail(where + "." + name, "expected a number");
      p[name] = value.get<double>();
    }
    return p;
  };
  std::vector<ContourSpec> contours;
  if (cfg.contains("contours")) {
    if (!cfg["contours"].is_array()) config_fail("contours", "expected an array");
    for (std::size_t i = 0; i < cfg["contours"].size(); ++i) {
      ContourSpec c;
      c.values = parse_point(cfg["contours"][i], "contours[" + std::to_string(i) + "]");
      c.label = param_label(c.values);
      contours.push_back(std::move(c));
    }
  }
  std::optional<SymmetryTransform> global;
  ParamSet global_point;
  if (cfg.contains("global")) {
    const Json& g = cfg["global"];
    global = parse_domain(require(g, "transform", "global"), "global.transform", spec.size(), 0).t;
    global_point = parse_point(require(g, "at", "global"), "global.at");
  }

  ExperimentPlan plan;
  plan.experiment = "scattering_sweep";
  plan.check_names = {"close-coupling residual", "t = t' (reciprocity)"};
  for (const ContourSpec& c : contours) plan.check_names.push_back("PT unitarity at " + c.label);
  for (const DomainSpec& d : domains) plan.check_names.push_back("q+ constancy " + d.label);
  if (global) {
    plan.check_names.push_back("dual NLC constancy (global)");
    plan.check_names.push_back("|q+| mirror symmetry (global)");
  }
  plan.execute = [=](int threads) {
    ExperimentResult res;
    res.experiment = "scattering_sweep";
    const LeadSpec lead = *spec.lead;
    auto build = [&](const ParamSet& over) {
      ParamSet ps = params;
      for (const auto& [k, v] : over) ps[k] = v;
      return spec.build(ps);
    };
    const std::size_t nk = kgrid.size();
    struct Cell {
      double T = 0, R = 0, Rp = 0, unit = 0, cc = 0, recip = 0;
      std::vector<cd> q;
      std::vector<double> dev;
      std::vector<bool> generic;
    };
    std::vector<Cell> cells(grid.size() * nk);
    const bool symmetric_h = [&] {
      const CMatrix H = hamiltonian_matrix(build({}));
      return (H - H.transpose()).cwiseAbs().maxCoeff() == 0.0;
    }();
    parallel_for(cells.size(), threads, [&](std::size_t idx) {
      const std::size_t g = idx / nk, j = idx % nk;
      const LatticeModel m = build({{param, grid[g]}});
      const double k = kgrid[j];
      const CMatrix H = hamiltonian_matrix(m);
      const ScatteringSolution left = solve_scattering(H, lead, k, 1.0, 0.0);
      const ScatteringSolution right = solve_scattering(H, lead, k, 0.0, 1.0);
      Cell& c = cells[idx];
      c.cc = std::max(close_coupling_residual(H, left), close_coupling_residual(H, right));
      SMatrix s;
      s.k = k;
      s.r = left.out_left;
      s.t = left.out_right;
      s.r_prime = right.out_right;
      s.t_prime = right.out_left;
      c.T = std::norm(s.t);
      c.R = std::norm(s.r);
      c.Rp = std::norm(s.r_prime);
      c.unit = s.t == cd{} ? std::numeric_limits<double>::quiet_NaN() : pt_unitarity_residual(s);
      c.recip = std::abs(s.t - s.t_prime) / std::max(1.0, std::abs(s.t));
      const double scale = 2.0 * std::abs(lead.h) * std::sin(k);
      for (const DomainSpec& d : domains) {
        const LinkCurrentField f = nlc_field(m, left.interior, d.t);
        const auto [lo, hi] = interior_links(d.t);
        std::vector<cd> q;
        for (int n = lo; n <= hi; ++n) q.push_back(f.q_plus(n - 1));
        const cd med = complex_median(q);
        c.q.push_back(med);
        c.dev.push_back(constancy_deviation(q));
        c.generic.push_back(std::abs(med) >= generic_floor * scale);
      }
    });

    std::vector<std::string> cols = {"k[1/site]", param, "T", "R", "R_prime", "pt_unitarity"};
    for (const DomainSpec& d : domains) {
      cols.push_back("re_q_" + d.label);
      cols.push_back("im_q_" + d.label);
    }
    Table gt{"grid", cols, {}};
    double cc = 0.0, recip = 0.0;
    std::vector<double> dev(domains.size(), 0.0);
    std::vector<int> skipped(domains.size(), 0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      for (std::size_t j = 0; j < nk; ++j) {
        const Cell& c = cells[g * nk + j];
        cc = max_of(cc, c.cc);
        recip = max_of(recip, c.recip);
        std::vector<Json> row = {num(kgrid[j]), num(grid[g]), num(c.T), num(c.R), num(c.Rp), num(c.unit)};
        for (std::size_t d = 0; d < domains.size(); ++d) {
          row.push_back(num(c.q[d].real()));
          row.push_back(num(c.q[d].imag()));
          if (c.generic[d]) dev[d] = max_of(dev[d], c.dev[d]);
          else ++skipped[d];
        }
        gt.rows.push_back(std::move(row));
      }
    }
    res.checks.push_back(make_check("close-coupling residual", cc, 1e-12));
    if (symmetric_h) {
      res.checks.push_back(make_check("t = t' (reciprocity)", recip, 1e-12, true,
                                      "relative to max(|t|, 1)"));
    } else {
      CheckResult c = make_check("t = t' (reciprocity)", 0.0, 1e-12, true,
                                 "skipped: Hamiltonian not symmetric");
      res.checks.push_back(c);
    }

    Table ct{"contours", {"contour", "k[1/site]", "T", "pt_unitarity"}, {}};
    for (const ContourSpec& c : contours) {
      const LatticeModel m = build(c.values);
      std::vector<double> r(nk), T(nk);
      parallel_for(nk, threads, [&](std::size_t j) {
        const SMatrix s = s_matrix(m, lead, kgrid[j]);
        T[j] = std::norm(s.t);
        r[j] = pt_unitarity_residual(s);
      });
      double worst = 0.0;
      for (std::size_t j = 0; j < nk; ++j) {
        worst = max_of(worst, r[j]);
        ct.rows.push_back({c.label, num(kgrid[j]), num(T[j]), num(r[j])});
      }
      res.checks.push_back(make_check("PT unitarity at " + c.label, worst, 1e-10));
    }
    for (std::size_t d = 0; d < domains.size(); ++d) {
      res.checks.push_back(make_check("q+ constancy " + domains[d].label, dev[d], 1e-10, true,
                                      std::to_string(skipped[d]) + " near-zero points skipped"));
    }

    if (global) {
      const LatticeModel m = build(global_point);
      Table gl{"global",
               {"k[1/site]", "site", "density", "re_q_plus", "im_q_plus", "re_dual_plus", "im_dual_plus"},
               {}};
      std::vector<double> dual_dev(nk), mirror(nk);
      std::vector<LinkCurrentField> fields(nk, LinkCurrentField{});
      std::vector<CVector> states(nk);
      parallel_for(nk, threads, [&](std::size_t j) {
        const ScatteringSolution s = solve_scattering(m, lead, kgrid[j], 1.0, 0.0);
        states[j] = s.interior;
        fields[j] = nlc_field(m, s.interior, *global);
        const auto [lo, hi] = interior_links(*global);
        std::vector<cd> dq;
        double scale = 0.0, worst = 0.0;
        for (int n = lo; n <= hi; ++n) {
          dq.push_back(fields[j].dual_plus(n - 1));
          scale = std::max(scale, std::abs(fields[j].q_plus(n - 1)));
        }
        dual_dev[j] = constancy_deviation(dq);
        for (int n = lo; n <= hi; ++n) {
          const int partner = map_site(*global, n) - 1;
          worst = std::max(worst, std::abs(std::abs(fields[j].q_plus(n - 1)) -
                                           std::abs(fields[j].q_plus(partner - 1))));
        }
        mirror[j] = scale > 0.0 ? worst / scale : 0.0;
      });
      double dd = 0.0, mm = 0.0;
      for (std::size_t j = 0; j < nk; ++j) {
        dd = max_of(dd, dual_dev[j]);
        mm = max_of(mm, mirror[j]);
        for (int n = 1; n <= m.size(); ++n) {
          gl.rows.push_back({num(kgrid[j]), integer(n), num(std::norm(states[j](n - 1))),
                             num(fields[j].q_plus(n - 1).real()), num(fields[j].q_plus(n - 1).imag()),
                             num(fields[j].dual_plus(n - 1).real()),
                             num(fields[j].dual_plus(n - 1).imag())});
        }
      }
      const std::string note = "at " + param_label(global_point);
      res.checks.push_back(make_check("dual NLC constancy (global)", dd, 1e-10, true, note));
      res.checks.push_back(make_check("|q+| mirror symmetry (global)", mm, 1e-10, true,
                                      note + ", relative to max |q+|"));
      res.tables.push_back(std::move(gl));
    }
    res.tables.insert(res.tables.begin(), std::move(ct));
    res.tables.insert(res.tables.begin(), std::move(gt));
    return res;
  };
  return plan;
}

// ------------------------------------------------------------------ ptr_search

ExperimentPlan plan_ptr_search(const Json& cfg, const fs::path& base) {
  const ModelSpec spec = parse_model(require(cfg, "model", "config"), base);
  if (!spec.lead) config_fail("model.lead", "scattering needs a lead");
  const ParamSet params = parse_params(cfg, spec);
  const std::vector<DomainSpec> domains = parse_domains(cfg, "domains", spec.size());
  for (const DomainSpec& d : domains) {
    if (d.t.kind != TransformKind::inversion) config_fail("domains", "PTR search needs inversion domains");
  }
  if (domains.size() < 2) config_fail("domains", "need at least two domains");
  PtrOptions opt;
  opt.grid_points = get_int(cfg, "grid_points", "config", 2000);
  if (opt.grid_points < 3) config_fail("grid_points", "need at least 3 points");
  std::optional<std::string> tune_param;
  double w0 = 0.0, k0 = 0.0;
  if (cfg.contains("tune")) {
    const Json& t = cfg["tune"];
    tune_param = get_string(t, "param", "tune");
    if (!spec.params.count(*tune_param)) config_fail("tune.param", "unknown parameter");
    w0 = get_number(t, "guess", "tune");
    k0 = get_number(t, "k_guess", "tune");
    if (!(k0 > 0.0 && k0 < kPi)) config_fail("tune.k_guess", "must lie in (0, pi)");
  }
  std::string expect_class;
  if (cfg.contains("expect_class")) {
    expect_class = get_string(cfg, "expect_class", "config");
    if (expect_class != "symmetric" && expect_class != "asymmetric") {
      config_fail("expect_class", "expected 'symmetric' or 'asymmetric'");
    }
  }

  ExperimentPlan plan;
  plan.experiment = "ptr_search";
  plan.check_names = {"PTR found", "r1' = conj(r2)", "|q_D1| = |q_D2|",
                      "sPTR domain NLCs below threshold", "sPTR density symmetry",
                      "aPTR t-phase law"};
  if (!expect_class.empty()) plan.check_names.push_back("expected class present");
  plan.execute = [=](int threads) {
    ExperimentResult res;
    res.experiment = "ptr_search";
    const LeadSpec lead = *spec.lead;
    ParamSet ps = params;
    std::string tuned_note;
    if (tune_param) {
      auto family = [&](double w) {
        ParamSet p = params;
        p[*tune_param] = w;
        return spec.build(p);
      };
      const PtrTuning tn = refine_ptr(family, lead, w0, k0);
      ps[*tune_param] = tn.w;
      tuned_note = *tune_param + " = " + format_number(tn.w);
    }
    const LatticeModel model = spec.build(ps);
    std::vector<SymmetryTransform> ts;
    for (const DomainSpec& d : domains) ts.push_back(d.t);
    PtrOptions o = opt;
    o.threads = threads;
    const std::vector<PtrResult> found = find_ptr(model, lead, ts, o);

    std::vector<std::string> cols = {"k[1/site]", "E[energy]", "class", "g", "abs_t", "arg_t",
                                     "reflection_match", "q_magnitude_gap", "phase_deviation",
                                     "density_asymmetry"};
    for (const DomainSpec& d : domains) {
      cols.push_back("re_q_" + d.label);
      cols.push_back("im_q_" + d.label);
    }
    Table pt{"ptr", cols, {}};
    double match = 0.0, gap = 0.0, below = 0.0, dens = 0.0, phase = 0.0;
    int n_sym = 0, n_asym = 0;
    for (const PtrResult& p : found) {
      const bool sym = p.cls == PtrClass::symmetric;
      std::vector<Json> row = {num(p.k), num(p.E), sym ? "sPTR" : "aPTR", num(p.g),
                               num(std::abs(p.t)), num(std::arg(p.t)), num(p.reflection_match),
                               num(p.q_magnitude_gap), num(p.phase_deviation),
                               num(p.density_asymmetry)};
      for (const cd& q : p.domain_q) {
        row.push_back(num(q.real()));
        row.push_back(num(q.imag()));
      }
      pt.rows.push_back(std::move(row));
      match = max_of(match, p.reflection_match);
      gap = max_of(gap, p.q_magnitude_gap);
      if (sym) {
        ++n_sym;
        for (const cd& q : p.domain_q) below = max_of(below, std::abs(q) / p.threshold);
        dens = max_of(dens, p.density_asymmetry);
      } else {
        ++n_asym;
        phase = max_of(phase, p.phase_deviation);
      }
    }
    const std::string counts = std::to_string(n_sym) + " sPTR, " + std::to_string(n_asym) + " aPTR" +
                               (tuned_note.empty() ? "" : ", " + tuned_note);
    res.checks.push_back(make_check("PTR found", static_cast<double>(found.size()), 0.5, false, counts));
    res.checks.push_back(make_check("r1' = conj(r2)", match, 1e-8));
    res.checks.push_back(make_check("|q_D1| = |q_D2|", gap, 1e-8));
    res.checks.push_back(make_check("sPTR domain NLCs below threshold", below, 1.0, true,
                                    "max |q_D| / (1e-8 * 2h sin k)"));
    res.checks.push_back(make_check("sPTR density symmetry", dens, 1e-8));
    res.checks.push_back(make_check("aPTR t-phase law", phase, 1e-6, true,
                                    "distance of arg[t zeta^{2(a2-a1)}] from {0, pi}"));
    if (!expect_class.empty()) {
      const int n = expect_class == "symmetric" ? n_sym : n_asym;
      res.checks.push_back(make_check("expected class present", n, 0.5, false, expect_class));
    }

    // k-resolved transmission and domain NLCs for plotting.
    const std::vector<double> kgrid = default_k_grid(opt.grid_points);
    std::vector<std::vector<Json>> rows(kgrid.size());
    parallel_for(kgrid.size(), threads, [&](std::size_t j) {
      const ScatteringSolution s = solve_scattering(model, lead, kgrid[j], 1.0, 0.0);
      std::vector<Json> row = {num(kgrid[j]), num(std::norm(s.out_right))};
      for (const cd& q : domain_nlcs(model, s, ts)) {
        row.push_back(num(q.real()));
        row.push_back(num(q.imag()));
      }
      rows[j] = std::move(row);
    });
    std::vector<std::string> scols = {"k[1/site]", "T"};
    for (const DomainSpec& d : domains) {
      scols.push_back("re_q_" + d.label);
      scols.push_back("im_q_" + d.label);
    }
    res.tables.push_back(std::move(pt));
    res.tables.push_back(Table{"transmission", scols, std::move(rows)});
    return res;
  };
  return plan;
}

// ------------------------------------------------------------------- plumbing

void apply_expectations(const Json& cfg, ExperimentPlan& plan) {
  if (!cfg.contains("expect")) return;
  const Json& e = cfg["expect"];
  if (!e.is_object()) config_fail("expect", "expected an object of check -> pass|fail");
  std::map<std::string, bool> wanted;
  for (const auto& [name, value] : e.items()) {
    if (!value.is_string() || (value != "pass" && value != "fail")) {
      config_fail("expect." + name, "expected 'pass' or 'fail'");
    }
    if (std::find(plan.check_names.begin(), plan.check_names.end(), name) == plan.check_names.end()) {
      config_fail("expect." + name, "no such check for " + plan.experiment);
    }
    wanted[name] = value == "pass";
  }
  auto inner = plan.execute;
  plan.execute = [inner, wanted](int threads) {
    ExperimentResult r = inner(threads);
    for (CheckResult& c : r.checks) {
      const auto it = wanted.find(c.name);
      if (it != wanted.end()) c.expect_pass = it->second;
    }
    return r;
  };
}

Json check_json(const CheckResult& c) {
  Json j;
  j["name"] = c.name;
  j["tolerance"] = c.tolerance;
  j["measured"] = std::isfinite(c.measured) ? Json(c.measured) : Json(format_number(c.measured));
  j["bound"] = c.upper_bound ? "upper" : "lower";
  j["passed"] = c.passed;
  j["expected"] = c.expect_pass ? "pass" : "fail";
  j["verdict"] = c.verdict();
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

std::string stem_of(const fs::path& config) { return config.stem().string(); }

RunOutcome execute(const fs::path& config_path, const RunOptions& options, std::ostream* report,
                   bool verify) {
  RunOutcome out;
  Json manifest;
  manifest["tool"] = "nlc";
  manifest["version"] = kVersion;
  manifest["mode"] = verify ? "verify" : "run";
  manifest["config"] = config_path.filename().string();
  manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION);
  const std::string stem = stem_of(config_path);
  const fs::path manifest_path = options.out_dir / (stem + ".manifest.json");
  out.manifest = manifest_path;

  auto finish = [&](const std::string& status, int code) {
    out.status = status;
    out.exit_code = code;
    manifest["status"] = status;
    manifest["exit_code"] = code;
    if (!out.error_code.empty()) {
      manifest["error"] = {{"code", out.error_code}, {"message", out.error_message}};
    }
    try {
      fs::create_directories(options.out_dir);
      write_file(manifest_path, manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
      if (report) *report << "error: " << e.what() << "\n";
    }
    return out;
  };

  if (options.format != "csv" && options.format != "json") {
    out.error_code = error_name(ErrorCode::config);
    out.error_message = "unknown output format '" + options.format + "'";
    return finish("config_error", 2);
  }

  ExperimentPlan plan;
  try {
    const std::string text = read_text_file(config_path);
    manifest["config_sha256"] = sha256_hex(text);
    Json cfg;
    try {
      cfg = Json::parse(text);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::config, std::string("malformed JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw Error(ErrorCode::config, "config must be a JSON object");
    plan = plan_experiment(cfg, config_path.parent_path());
    manifest["experiment"] = plan.experiment;
  } catch (const Error& e) {
    // Unreadable and malformed configs both count as parse failures.
    out.error_code = error_name(e.code() == ErrorCode::io ? ErrorCode::config : e.code());
    out.error_message = e.what();
    if (report) *report << "config error: " << e.what() << "\n";
    return finish("config_error", 2);
  } catch (const std::exception& e) {
    out.error_code = error_name(ErrorCode::config);
    out.error_message = e.what();
    if (report) *report << "config error: " << e.what() << "\n";
    return finish("config_error", 2);
  }

  const int threads = effective_threads(options.threads);
  manifest["threads"] = threads;
  try {
    out.result = plan.execute(threads);
  } catch (const Error& e) {
    out.error_code = error_name(e.code());
    out.error_message = e.what();
    if (report) *report << "error (" << out.error_code << "): " << e.what() << "\n";
    Json err = {{"code", out.error_code}, {"message", out.error_message},
                {"experiment", plan.experiment}};
    try {
      fs::create_directories(options.out_dir);
      write_file(options.out_dir / (stem + ".error.json"), err.dump(2) + "\n");
      manifest["outputs"] = Json::array({stem + ".error.json"});
    } catch (const std::exception&) {
    }
    return finish("module_error", 1);
  } catch (const std::exception& e) {
    out.error_code = "internal";
    out.error_message = e.what();
    if (report) *report << "error: " << e.what() << "\n";
    return finish("module_error", 1);
  }

  Json checks = Json::array();
  bool all_expected = true;
  for (const CheckResult& c : out.result.checks) {
    checks.push_back(check_json(c));
    all_expected = all_expected && c.as_expected();
  }
  manifest["checks"] = checks;
  manifest["all_checks_as_expected"] = all_expected;

  Json outputs = Json::array();
  if (!verify) {
    try {
      fs::create_directories(options.out_dir);
      for (const Table& t : out.result.tables) {
        const std::string name = stem + "." + t.name + (options.format == "csv" ? ".csv" : ".json");
        std::ostringstream ss;
        if (options.format == "csv") write_table_csv(t, ss);
        else ss << table_to_json(t).dump(1) << "\n";
        write_file(options.out_dir / name, ss.str());
        outputs.push_back(name);
      }
    } catch (const Error& e) {
      out.error_code = error_name(e.code());
      out.error_message = e.what();
      return finish("module_error", 1);
    }
  }
  manifest["outputs"] = outputs;
  if (report) {
    *report << plan.experiment << " (" << config_path.filename().string() << ")\n"
            << check_table_text(out.result.checks);
  }
  if (verify && !all_expected) return finish("checks_failed", 3);
  return finish("ok", 0);
}

} // namespace

ExperimentPlan plan_experiment(const Json& cfg, const fs::path& base) {
  if (!cfg.is_object()) throw Error(ErrorCode::config, "config must be a JSON object");
  const std::string kind = get_string(cfg, "experiment", "config");
  ExperimentPlan plan;
  if (kind == "eigen_report") plan = plan_eigen_report(cfg, base);
  else if (kind == "symmetry_scan") plan = plan_symmetry_scan(cfg, base);
  else if (kind == "pt_sweep") plan = plan_pt_sweep(cfg, base);
  else if (kind == "floquet_report") plan = plan_floquet_report(cfg, base);
  else if (kind == "scattering_sweep") plan = plan_scattering_sweep(cfg, base);
  else if (kind == "ptr_search") plan = plan_ptr_search(cfg, base);
  else throw Error(ErrorCode::config, "config.experiment: unknown experiment '" + kind + "'");
  apply_expectations(cfg, plan);
  return plan;
}

std::string CheckResult::verdict() const {
  if (passed) return expect_pass ? "PASS" : "PASS-unexpected";
  return expect_pass ? "FAIL" : "FAIL-as-expected";
}

CheckResult make_check(std::string name, double measured, double tolerance, bool upper_bound,
                       std::string note) {
  CheckResult c;
  c.name = std::move(name);
  c.measured = measured;
  c.tolerance = tolerance;
  c.upper_bound = upper_bound;
  c.passed = upper_bound ? (measured <= tolerance) : (measured > tolerance);
  c.note = std::move(note);
  return c;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_table_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << "\n";
  for (const std::vector<Json>& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      const Json& v = row[i];
      if (v.is_number_float()) out << format_number(v.get<double>());
      else if (v.is_number_integer()) out << v.get<long>();
      else if (v.is_string()) out << v.get<std::string>();
      else if (v.is_boolean()) out << (v.get<bool>() ? 1 : 0);
      else out << v.dump();
    }
    out << "\n";
  }
}

Json table_to_json(const Table& table) {
  Json rows = Json::array();
  for (const std::vector<Json>& row : table.rows) {
    Json r = Json::array();
    for (const Json& v : row) {
      // JSON has no NaN; keep the textual form used in CSV output.
      if (v.is_number_float() && !std::isfinite(v.get<double>())) r.push_back(format_number(v.get<double>()));
      else r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  return Json{{"name", table.name}, {"columns", table.columns}, {"rows", rows}};
}

std::string check_table_text(const std::vector<CheckResult>& checks) {
  std::size_t width = 5;
  for (const CheckResult& c : checks) width = std::max(width, c.name.size());
  std::ostringstream ss;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %-12s  %-12s  %s\n", static_cast<int>(width), "check",
                "tolerance", "measured", "verdict");
  ss << line;
  for (const CheckResult& c : checks) {
    char tbuf[24];
    std::snprintf(tbuf, sizeof tbuf, "%.3g", c.tolerance);
    const std::string tol = (c.upper_bound ? "<= " : "> ") + std::string(tbuf);
    char meas[32];
    std::snprintf(meas, sizeof meas, "%.3e", c.measured);
    std::snprintf(line, sizeof line, "%-*s  %-12s  %-12s  %s", static_cast<int>(width),
                  c.name.c_str(), tol.c_str(), meas, c.verdict().c_str());
    ss << line;
    if (!c.note.empty()) ss << "  (" << c.note << ")";
    ss << "\n";
  }
  return ss.str();
}

int effective_threads(int requested) {
  if (const char* env = std::getenv("NLC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<int>(v);
  }
  return std::max(requested, 1);
}

RunOutcome run_experiment(const fs::path& config_path, const RunOptions& options,
                          std::ostream* report) {
  return execute(config_path, options, report, false);
}

RunOutcome verify_experiment(const fs::path& config_path, const RunOptions& options,
                             std::ostream* report) {
  return execute(config_path, options, report, true);
}

} // namespace nlc
