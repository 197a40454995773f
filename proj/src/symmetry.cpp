#include "nlc/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "nlc/error.hpp"

namespace nlc {

SymmetryTransform SymmetryTransform::identity() { return SymmetryTransform{}; }

SymmetryTransform SymmetryTransform::inversion(int d_lo, int d_hi, bool time_reversal) {
  SymmetryTransform t;
  t.kind = TransformKind::inversion;
  t.d_lo = d_lo;
  t.d_hi = d_hi;
  t.center2 = d_lo + d_hi;
  t.time_reversal = time_reversal;
  return t;
}

SymmetryTransform SymmetryTransform::translation(int d_lo, int d_hi, int shift, bool time_reversal) {
  SymmetryTransform t;
  t.kind = TransformKind::translation;
  t.d_lo = d_lo;
  t.d_hi = d_hi;
  t.shift = shift;
  t.time_reversal = time_reversal;
  return t;
}

int SymmetryTransform::u_hi() const {
  if (empty()) return d_hi;
  return kind == TransformKind::inversion ? d_hi : d_hi + shift;
}

void SymmetryTransform::validate(int n_sites) const {
  if (empty()) return;
  auto fail = [](const std::string& why) { throw Error(ErrorCode::domain, why); };
  if (d_lo < 1 || u_hi() > n_sites) {
    fail("transform domain [" + std::to_string(d_lo) + ", " + std::to_string(u_hi()) +
         "] exceeds [1, " + std::to_string(n_sites) + "]");
  }
  if (kind == TransformKind::inversion) {
    if (center2 != d_lo + d_hi) {
      fail("inversion domain must be symmetric about its center (2a = d_lo + d_hi)");
    }
  } else {
    if (shift < 1) fail("translation shift must be positive");
    if (shift > domain_size()) {
      fail("translation shift " + std::to_string(shift) + " exceeds domain size " +
           std::to_string(domain_size()));
    }
  }
}

int map_site(const SymmetryTransform& t, int n) {
  if (t.empty() || n < t.d_lo || n > t.d_hi) {
    throw Error(ErrorCode::domain, "site " + std::to_string(n) + " outside transform domain");
  }
  return t.kind == TransformKind::inversion ? t.center2 - n : n + t.shift;
}

CVector PermutationMatrix::apply(const CVector& psi) const {
  CVector out(psi.size());
  for (int m = 1; m <= size(); ++m) out(m - 1) = psi(image[m - 1] - 1);
  return out;
}

CMatrix PermutationMatrix::dense() const {
  CMatrix P = CMatrix::Zero(size(), size());
  for (int m = 1; m <= size(); ++m) P(m - 1, image[m - 1] - 1) = 1.0;
  return P;
}

PermutationMatrix sigma_matrix(const SymmetryTransform& t, int n_sites) {
  t.validate(n_sites);
  PermutationMatrix p;
  p.image.resize(n_sites);
  for (int m = 1; m <= n_sites; ++m) p.image[m - 1] = m;
  if (t.empty()) return p;
  if (t.kind == TransformKind::inversion) {
    for (int m = t.d_lo; m <= t.d_hi; ++m) p.image[m - 1] = t.center2 - m;
  } else {
    const int u_size = t.u_hi() - t.u_lo() + 1;
    for (int m = t.u_lo(); m <= t.u_hi(); ++m) {
      p.image[m - 1] = t.u_lo() + (m - t.u_lo() + t.shift) % u_size;
    }
  }
  return p;
}

double symmetry_residual(const LatticeModel& model, const SymmetryTransform& t) {
  t.validate(model.size());
  double r = 0.0;
  auto compare = [&](int m, int n) {
    const cd original = model.element(m, n);
    const cd mapped = model.element(map_site(t, m), map_site(t, n));
    r = std::max(r, std::abs(mapped - (t.time_reversal ? std::conj(original) : original)));
  };
  for (int m = t.d_lo; m <= t.d_hi; ++m) {
    compare(m, m);
    if (m + 1 <= t.d_hi) {
      compare(m, m + 1);
      compare(m + 1, m);
    }
  }
  return r;
}

double default_symmetry_tol(const LatticeModel& model) { return 1e-12 * model.max_element(); }

namespace {

std::vector<SymmetryTransform> inversion_domains(const LatticeModel& model, bool T, double tol) {
  const int N = model.size();
  std::vector<SymmetryTransform> out;
  for (int c = 3; c < 2 * N; ++c) {
    std::optional<SymmetryTransform> best;
    for (int r = 0;; ++r) {
      const int lo = (c % 2 == 0) ? c / 2 - r : (c - 1) / 2 - r;
      const int hi = c - lo;
      if (lo < 1 || hi > N) break;
      SymmetryTransform t = SymmetryTransform::inversion(lo, hi, T);
      if (symmetry_residual(model, t) > tol) break;
      best = t;
    }
    if (best && best->domain_size() > 1) out.push_back(*best);
  }
  return out;
}

std::vector<SymmetryTransform> translation_domains(const LatticeModel& model, bool T, double tol) {
  const int N = model.size();
  std::vector<SymmetryTransform> out;
  auto same = [&](cd mapped, cd original) {
    return std::abs(mapped - (T ? std::conj(original) : original)) <= tol;
  };
  for (int L = 1; L < N; ++L) {
    auto site_ok = [&](int n) { return n + L <= N && same(model.onsite(n + L), model.onsite(n)); };
    auto link_ok = [&](int n) {
      return n + 1 + L <= N && same(model.element(n + L, n + 1 + L), model.element(n, n + 1)) &&
             same(model.element(n + 1 + L, n + L), model.element(n + 1, n));
    };
    int a = 1;
    while (a + L <= N) {
      if (!site_ok(a)) {
        ++a;
        continue;
      }
      int b = a;
      while (b + 1 + L <= N && site_ok(b + 1) && link_ok(b)) ++b;
      if (b - a + 1 >= L) out.push_back(SymmetryTransform::translation(a, b, L, T));
      a = b + 1;
    }
  }
  return out;
}

} // namespace

std::vector<SymmetryTransform> detect_maximal_domains(const LatticeModel& model, TransformKind kind,
                                                      bool time_reversal, std::optional<double> tol) {
  const double eps = tol.value_or(default_symmetry_tol(model));
  if (eps < 0.0) throw Error(ErrorCode::invalid_argument, "tolerance must be nonnegative");
  return kind == TransformKind::inversion ? inversion_domains(model, time_reversal, eps)
                                          : translation_domains(model, time_reversal, eps);
}

std::optional<std::vector<SymmetryTransform>> decompose_cls(const LatticeModel& model,
                                                            TransformKind kind, bool time_reversal,
                                                            std::optional<double> tol) {
  const int N = model.size();
  std::vector<SymmetryTransform> candidates = detect_maximal_domains(model, kind, time_reversal, tol);
  // Longest first among domains starting at the same site; stable order keeps
  // the choice deterministic.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const SymmetryTransform& a, const SymmetryTransform& b) {
                     if (a.u_lo() != b.u_lo()) return a.u_lo() < b.u_lo();
                     return a.u_hi() > b.u_hi();
                   });
  std::vector<SymmetryTransform> chosen;
  std::function<bool(int)> cover = [&](int start) {
    if (start > N) return true;
    for (const SymmetryTransform& t : candidates) {
      if (t.u_lo() != start) continue;
      chosen.push_back(t);
      if (cover(t.u_hi() + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  if (!cover(1)) return std::nullopt;
  return chosen;
}

} // namespace nlc
