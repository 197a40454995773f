#include "nlc/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlc/error.hpp"
#include "nlc/linalg.hpp"
#include "nlc/parallel.hpp"

namespace nlc {

namespace {

constexpr double kPi = std::numbers::pi;

cd zeta_pow(double k, double p) { return std::exp(I * (k * p)); }

void check_k(double k) {
  if (!(k > 0.0 && k < kPi)) {
    throw Error(ErrorCode::domain, "quasimomentum must lie in the open interval (0, pi)");
  }
}

LatticeModel sub_model(const LatticeModel& m, int lo, int hi) {
  std::vector<cd> v(m.onsite_values().begin() + (lo - 1), m.onsite_values().begin() + hi);
  std::vector<cd> up(m.hop_up().begin() + (lo - 1), m.hop_up().begin() + (hi - 1));
  std::vector<cd> down(m.hop_down().begin() + (lo - 1), m.hop_down().begin() + (hi - 1));
  return LatticeModel(std::move(v), std::move(up), std::move(down), m.leads());
}

double phase_distance(cd z) {
  const double a = std::abs(std::arg(z));
  return std::min(a, kPi - a);
}

} // namespace

double lead_dispersion(const LeadSpec& lead, double k) {
  check_k(k);
  return lead.v + 2.0 * lead.h * std::cos(k);
}

cd ScatteringSolution::zeta() const { return std::exp(I * k); }

cd ScatteringSolution::amplitude(int n) const {
  const int N = static_cast<int>(interior.size());
  if (n < 1) return in_left * zeta_pow(k, n) + out_left * zeta_pow(k, -n);
  if (n > N) return out_right * zeta_pow(k, n) + in_right * zeta_pow(k, -n);
  return interior(n - 1);
}

ScatteringSolution solve_scattering(const CMatrix& H, const LeadSpec& lead, double k, cd in_left,
                                    cd in_right) {
  const int N = static_cast<int>(H.rows());
  if (N < 1 || H.cols() != N) throw Error(ErrorCode::invalid_argument, "scatterer must be square");
  if (lead.h == 0.0) throw Error(ErrorCode::invalid_argument, "lead hopping must be nonzero");
  const double E = lead_dispersion(lead, k);
  const double h = lead.h;
  const double ve = lead.v - E;
  const int M = N + 2;
  CMatrix A = CMatrix::Zero(M, M);
  CVector b = CVector::Zero(M);

  // Row 0: lead equation at site 0 with a_0 = A + B, a_-1 = A/z + B z.
  A(0, 0) = h * zeta_pow(k, 1) + ve;
  A(0, 1) = h;
  b(0) = -in_left * (h * zeta_pow(k, -1) + ve);
  // Rows 1..N: scatterer equations with the lead couplings at the ends.
  A.block(1, 1, N, N) = H;
  for (int i = 1; i <= N; ++i) A(i, i) -= E;
  A(1, 0) += h;
  b(1) -= h * in_left;
  A(N, N + 1) += h * zeta_pow(k, N + 1);
  b(N) -= h * in_right * zeta_pow(k, -(N + 1));
  // Row N+1: lead equation at site N+1.
  A(N + 1, N) = h;
  A(N + 1, N + 1) = ve * zeta_pow(k, N + 1) + h * zeta_pow(k, N + 2);
  b(N + 1) = -in_right * (ve * zeta_pow(k, -(N + 1)) + h * zeta_pow(k, -(N + 2)));

  const Eigen::PartialPivLU<CMatrix> lu(A);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::singular_system,
                "scattering system singular at k = " + std::to_string(k));
  }
  const CVector x = lu.solve(b);
  if (!x.allFinite()) throw Error(ErrorCode::singular_system, "non-finite scattering solution");

  ScatteringSolution s;
  s.k = k;
  s.E = E;
  s.lead = lead;
  s.in_left = in_left;
  s.in_right = in_right;
  s.out_left = x(0);
  s.out_right = x(N + 1);
  s.interior = x.segment(1, N);
  return s;
}

ScatteringSolution solve_scattering(const LatticeModel& model, const LeadSpec& lead, double k,
                                    cd in_left, cd in_right) {
  return solve_scattering(hamiltonian_matrix(model), lead, k, in_left, in_right);
}

SMatrix s_matrix(const LatticeModel& model, const LeadSpec& lead, double k) {
  const CMatrix H = hamiltonian_matrix(model);
  const ScatteringSolution from_left = solve_scattering(H, lead, k, 1.0, 0.0);
  const ScatteringSolution from_right = solve_scattering(H, lead, k, 0.0, 1.0);
  SMatrix s;
  s.k = k;
  s.E = from_left.E;
  s.r = from_left.out_left;
  s.t = from_left.out_right;
  s.r_prime = from_right.out_right;
  s.t_prime = from_right.out_left;
  return s;
}

double close_coupling_residual(const CMatrix& H, const ScatteringSolution& s) {
  const int N = static_cast<int>(H.rows());
  const double h = s.lead.h;
  const double E = s.E;
  double worst = 0.0;
  double amp = 0.0;
  for (int n = -1; n <= N + 2; ++n) amp = std::max(amp, std::abs(s.amplitude(n)));
  auto lead_eq = [&](int n) {
    return h * s.amplitude(n - 1) + (s.lead.v - E) * s.amplitude(n) + h * s.amplitude(n + 1);
  };
  worst = std::max(std::abs(lead_eq(0)), std::abs(lead_eq(N + 1)));
  for (int n = 1; n <= N; ++n) {
    cd acc = -E * s.amplitude(n);
    for (int m = 1; m <= N; ++m) acc += H(n - 1, m - 1) * s.amplitude(m);
    if (n == 1) acc += h * s.amplitude(0);
    if (n == N) acc += h * s.amplitude(N + 1);
    worst = std::max(worst, std::abs(acc));
  }
  const double scale = std::max({std::abs(E), inf_norm(H), std::abs(h)}) * std::max(amp, 1e-300);
  return worst / scale;
}

double close_coupling_residual(const LatticeModel& model, const ScatteringSolution& s) {
  return close_coupling_residual(hamiltonian_matrix(model), s);
}

ExtendedState extend_with_leads(const LatticeModel& model, const ScatteringSolution& s, int pad) {
  if (pad < 0) throw Error(ErrorCode::invalid_argument, "padding must be nonnegative");
  const int N = model.size();
  const int total = N + 2 * pad;
  std::vector<cd> v(total, s.lead.v);
  std::vector<cd> up(total - 1, s.lead.h);
  std::vector<cd> down(total - 1, s.lead.h);
  for (int n = 1; n <= N; ++n) v[n - 1 + pad] = model.onsite(n);
  for (int n = 1; n < N; ++n) {
    up[n - 1 + pad] = model.hopping(n, n + 1);
    down[n - 1 + pad] = model.hopping(n + 1, n);
  }
  ExtendedState ext{LatticeModel(std::move(v), std::move(up), std::move(down)), CVector(total), pad};
  for (int i = 1; i <= total; ++i) ext.psi(i - 1) = s.amplitude(i - pad);
  return ext;
}

BoundaryNlc scattering_nlc_boundary(const ScatteringSolution& s, int alpha2) {
  // Shifted amplitudes c = zeta^{+-alpha} c reduce the lead NLC to
  // 2h sin k (c<+* c>- - c<-* c>+).
  const double half = 0.5 * alpha2;
  const cd a = zeta_pow(s.k, half) * s.in_left;
  const cd b = zeta_pow(s.k, -half) * s.out_left;
  const cd c = zeta_pow(s.k, half) * s.out_right;
  const cd d = zeta_pow(s.k, -half) * s.in_right;
  BoundaryNlc q;
  q.left = 2.0 * s.lead.h * std::sin(s.k) * (std::conj(a) * d - std::conj(b) * c);
  q.right = std::conj(q.left);
  return q;
}

SMatrix compose_smatrices(const SMatrix& s1, const SMatrix& s2, int offset) {
  if (std::abs(s1.k - s2.k) > 1e-14 * std::max(1.0, std::abs(s1.k))) {
    throw Error(ErrorCode::invalid_argument, "composed S-matrices must share k");
  }
  const cd shift = zeta_pow(s1.k, 2.0 * offset);
  const cd r2 = s2.r * shift;
  const cd r2p = s2.r_prime / shift;
  const cd denom = 1.0 - r2 * s1.r_prime;
  if (std::abs(denom) <= 1e-12) {
    throw Error(ErrorCode::resonant_denominator, "multiple-reflection series diverges");
  }
  const cd p = 1.0 / denom;
  SMatrix s;
  s.k = s1.k;
  s.E = s1.E;
  s.r = s1.r + p * s1.t_prime * r2 * s1.t;
  s.r_prime = r2p + p * s2.t * s1.r_prime * s2.t_prime;
  s.t = p * s1.t * s2.t;
  s.t_prime = p * s1.t_prime * s2.t_prime;
  return s;
}

double pt_unitarity_residual(const SMatrix& s) {
  if (s.t == cd{}) throw Error(ErrorCode::zero_transmission, "transmission vanishes");
  const double T = std::norm(s.t);
  const double R = std::norm(s.r);
  const double Rp = std::norm(s.r_prime);
  return std::abs(std::abs(T - 1.0) - std::sqrt(R * Rp));
}

std::vector<double> default_k_grid(int points) {
  std::vector<double> k(points);
  for (int j = 0; j < points; ++j) k[j] = kPi * (j + 1) / (points + 1);
  return k;
}

std::vector<cd> domain_nlcs(const LatticeModel& model, const ScatteringSolution& s,
                            const std::vector<SymmetryTransform>& domains) {
  std::vector<cd> out;
  for (const SymmetryTransform& t : domains) {
    const LinkCurrentField f = nlc_field(model, s.interior, t);
    std::vector<double> re, im;
    std::vector<cd> q;
    const auto [lo, hi] = interior_links(t);
    for (int n = lo; n <= hi; ++n) q.push_back(f.q_plus(n - 1));
    // Componentwise median, matching the constancy metric.
    auto med = [](std::vector<double> x) {
      if (x.empty()) return 0.0;
      std::sort(x.begin(), x.end());
      const std::size_t n = x.size();
      return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
    };
    for (const cd& z : q) {
      re.push_back(z.real());
      im.push_back(z.imag());
    }
    out.emplace_back(med(re), med(im));
  }
  return out;
}

std::vector<PtrResult> find_ptr(const LatticeModel& model, const LeadSpec& lead,
                                const std::vector<SymmetryTransform>& domains,
                                const PtrOptions& options) {
  for (const SymmetryTransform& t : domains) {
    t.validate(model.size());
    if (t.kind != TransformKind::inversion) {
      throw Error(ErrorCode::invalid_argument, "PTR analysis needs inversion domains");
    }
  }
  const CMatrix H = hamiltonian_matrix(model);
  const bool hermitian = model.is_hermitian(1e-14 * std::max(model.max_element(), 1e-300));
  auto g_of = [&](double k) {
    const ScatteringSolution s = solve_scattering(H, lead, k, 1.0, 0.0);
    return hermitian ? std::norm(s.out_left) : 1.0 - std::norm(s.out_right);
  };

  const std::vector<double> grid = default_k_grid(options.grid_points);
  std::vector<double> g(grid.size());
  parallel_for(grid.size(), options.threads, [&](std::size_t i) { g[i] = g_of(grid[i]); });

  std::vector<double> roots;
  const double width_tol = 1e-15;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    double lo = grid[i - 1], hi = grid[i + 1];
    if (!hermitian && g[i - 1] * g[i] < 0.0) {
      double a = grid[i - 1], b = grid[i], ga = g[i - 1];
      for (int it = 0; it < 200 && b - a > width_tol; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = g_of(m);
        if (std::abs(gm) < options.g_tol * 1e-3) {
          a = b = m;
          break;
        }
        if ((gm < 0.0) == (ga < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
      continue;
    }
    if (!(std::abs(g[i]) <= std::abs(g[i - 1]) && std::abs(g[i]) <= std::abs(g[i + 1]))) continue;
    // Golden-section minimization of |g| on the bracketing cell pair.
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = std::abs(g_of(x1)), f2 = std::abs(g_of(x2));
    for (int it = 0; it < 200 && hi - lo > width_tol; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = std::abs(g_of(x1));
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = std::abs(g_of(x2));
      }
    }
    double best = f1 < f2 ? x1 : x2;
    double fbest = std::min(f1, f2);
    if (hermitian) {
      // Secant refinement on the complex reflection amplitude, whose simple
      // zero sits on the real k axis.
      for (int it = 0; it < 4; ++it) {
        const double dk = 1e-7 * std::max(best, 1e-3);
        const cd r0 = solve_scattering(H, lead, best, 1.0, 0.0).out_left;
        const cd rp = solve_scattering(H, lead, best + dk, 1.0, 0.0).out_left;
        const cd rm = solve_scattering(H, lead, best - dk, 1.0, 0.0).out_left;
        const cd slope = (rp - rm) / (2.0 * dk);
        if (slope == cd{}) break;
        const double cand = best - (r0 / slope).real();
        if (!(cand > 0.0 && cand < kPi)) break;
        const double fc = std::abs(g_of(cand));
        if (fc < fbest) {
          best = cand;
          fbest = fc;
        } else {
          break;
        }
      }
    }
    if (fbest < options.g_tol) roots.push_back(best);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              roots.end());

  std::vector<PtrResult> out;
  const bool two_domain = domains.size() >= 2;
  for (double k : roots) {
    PtrResult p;
    p.k = k;
    const ScatteringSolution s = solve_scattering(H, lead, k, 1.0, 0.0);
    p.E = s.E;
    p.t = s.out_right;
    p.g = hermitian ? std::norm(s.out_left) : 1.0 - std::norm(s.out_right);
    p.domain_q = domain_nlcs(model, s, domains);
    p.threshold = 1e-8 * 2.0 * std::abs(lead.h) * std::sin(k);
    bool all_zero = true;
    for (const cd& q : p.domain_q) all_zero = all_zero && std::abs(q) < p.threshold;
    p.cls = all_zero ? PtrClass::symmetric : PtrClass::asymmetric;
    for (const SymmetryTransform& t : domains) {
      for (int n = t.d_lo; n <= t.d_hi; ++n) {
        const int m = map_site(t, n);
        p.density_asymmetry =
          std::max(p.density_asymmetry, std::abs(std::norm(s.amplitude(n)) - std::norm(s.amplitude(m))));
      }
    }
    if (two_domain) {
      const SymmetryTransform& d1 = domains.front();
      const SymmetryTransform& d2 = domains.back();
      const int split = d1.u_hi();
      const SMatrix s1 = s_matrix(sub_model(model, 1, split), lead, k);
      const SMatrix s2 = s_matrix(sub_model(model, split + 1, model.size()), lead, k);
      const cd r2 = s2.r * zeta_pow(k, 2.0 * split);
      p.reflection_match = std::abs(s1.r_prime - std::conj(r2));
      p.q_magnitude_gap = std::abs(std::abs(p.domain_q.front()) - std::abs(p.domain_q.back()));
      p.phase_deviation = phase_distance(p.t * zeta_pow(k, d2.center2 - d1.center2));
    }
    out.push_back(p);
  }
  return out;
}

PtrTuning refine_ptr(const std::function<LatticeModel(double)>& family, const LeadSpec& lead,
                     double w0, double k0, double tol) {
  auto r_of = [&](double w, double k) {
    return solve_scattering(family(w), lead, k, 1.0, 0.0).out_left;
  };
  double w = w0, k = k0;
  cd r = r_of(w, k);
  for (int it = 0; it < 60 && std::abs(r) > 0.1 * tol; ++it) {
    const double step = 1e-7;
    const cd dw = (r_of(w + step, k) - r_of(w - step, k)) / (2.0 * step);
    const cd dk = (r_of(w, k + step) - r_of(w, k - step)) / (2.0 * step);
    const double det = dw.real() * dk.imag() - dk.real() * dw.imag();
    if (det == 0.0) break;
    const double x = (r.real() * dk.imag() - dk.real() * r.imag()) / det;
    const double y = (dw.real() * r.imag() - dw.imag() * r.real()) / det;
    const double kn = k - y;
    if (!(kn > step && kn < kPi - step)) break;
    w -= x;
    k = kn;
    r = r_of(w, k);
  }
  if (!(std::abs(r) <= tol)) {
    throw Error(ErrorCode::non_convergence,
                "reflection zero not reached, |r| = " + std::to_string(std::abs(r)));
  }
  return {w, k, std::abs(r)};
}

} // namespace nlc
