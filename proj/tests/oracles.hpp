// Independent reference implementations used by the tests. Nothing here calls
// into the library's numerics; only the plain data types are shared.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
inline constexpr cd I{0.0, 1.0};

struct Chain {
  std::vector<cd> onsite, up, down;  // down[i] = h_{i+2,i+1}
  int size() const { return static_cast<int>(onsite.size()); }
};

inline cd random_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double re = u(rng);
  const double im = u(rng);
  return scale * cd{re, im};
}

inline double random_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Fully general non-Hermitian, non-equidirectional chain.
inline Chain random_chain(std::mt19937_64& rng, int n) {
  Chain c;
  for (int i = 0; i < n; ++i) c.onsite.push_back(random_complex(rng, 0.3));
  for (int i = 0; i + 1 < n; ++i) {
    c.up.push_back(random_complex(rng, 0.3));
    c.down.push_back(random_complex(rng, 0.3));
  }
  return c;
}

inline CVector random_state(std::mt19937_64& rng, int n) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = random_complex(rng);
  return v / v.norm();
}

inline CMatrix dense(const Chain& c) {
  const int n = c.size();
  CMatrix H = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) H(i, i) = c.onsite[i];
  for (int i = 0; i + 1 < n; ++i) {
    H(i, i + 1) = c.up[i];
    H(i + 1, i) = c.down[i];
  }
  return H;
}

// Element lookup with zero outside [1, N]; 1-based labels.
inline cd element(const CMatrix& H, int m, int n) {
  const int N = static_cast<int>(H.rows());
  if (m < 1 || n < 1 || m > N || n > N) return {};
  return H(m - 1, n - 1);
}

inline cd amp(const CVector& v, int n) {
  return (n >= 1 && n <= v.size()) ? v(n - 1) : cd{};
}

// Site image: inversion lo+hi-n on [lo, hi]; translation by L, cyclic over
// [lo, hi+L]; identity elsewhere.
struct Map {
  bool inversion = true;
  int lo = 1, hi = 0, shift = 0;

  int operator()(int n) const {
    if (inversion) return (n >= lo && n <= hi) ? lo + hi - n : n;
    const int top = hi + shift;
    if (n < lo || n > top) return n;
    const int size = top - lo + 1;
    return lo + (n - lo + shift) % size;
  }
  int pairing() const { return inversion ? -1 : 1; }
};

// i q = L_n h_{S(n),S(n)+e} R_{S(n)+e} - L_{n+d} h'_{n,n+d} R_{S(n)},
// e = pairing * d; h' is conj(h) for q and h for the dual.
inline cd definition(const CMatrix& H, const CVector& left, const CVector& right, const Map& S,
                     int n, int d, bool dual) {
  const int N = static_cast<int>(H.rows());
  if (n < 1 || n > N) return {};
  const int s = S(n);
  const int e = S.pairing() * d;
  const cd h_img = element(H, s, s + e);
  cd h_own = element(H, n, n + d);
  if (!dual) h_own = std::conj(h_own);
  const cd value = amp(left, n) * h_img * amp(right, s + e) - amp(left, n + d) * h_own * amp(right, s);
  return value / I;
}

inline cd def_nlc(const CMatrix& H, const CVector& psi, const Map& S, int n, int d) {
  return definition(H, psi.conjugate(), psi, S, n, d, false);
}

inline cd def_dual(const CMatrix& H, const CVector& psi, const Map& S, int n, int d) {
  return definition(H, psi, psi, S, n, d, true);
}

inline cd def_current(const CMatrix& H, const CVector& psi, int n, int d) {
  return definition(H, psi.conjugate(), psi, Map{false, 1, 0, 0}, n, d, false);  // identity, pairing +1
}

// q = psi^dagger Q psi with Q assembled from unit-vector outer products.
inline CMatrix nlc_operator(const CMatrix& H, const Map& S, int n, int d) {
  const int N = static_cast<int>(H.rows());
  CMatrix Q = CMatrix::Zero(N, N);
  const int s = S(n);
  const int e = S.pairing() * d;
  auto add = [&](int row, int col, cd value) {
    if (row >= 1 && row <= N && col >= 1 && col <= N) Q(row - 1, col - 1) += value;
  };
  add(n, s + e, element(H, s, s + e) / I);
  add(n + d, s, -std::conj(element(H, n, n + d)) / I);
  return Q;
}

inline cd expectation(const CVector& psi, const CMatrix& Q) {
  return psi.dot(Q * psi);  // dot conjugates its first argument
}

// Eigenvalues sorted by (real, imag) from Eigen's general complex solver.
inline std::vector<cd> eigenvalues(const CMatrix& H) {
  Eigen::ComplexEigenSolver<CMatrix> es(H);
  std::vector<cd> v(es.eigenvalues().data(), es.eigenvalues().data() + H.rows());
  std::sort(v.begin(), v.end(), [](cd a, cd b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

// RK4 for i dpsi/dt = H(t) psi with `steps` equal steps over [0, T].
template <class HamAt>
CMatrix rk4_propagator(HamAt&& ham, double T, int steps, int n) {
  CMatrix U = CMatrix::Identity(n, n);
  const double dt = T / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = s * dt;
    const CMatrix H0 = ham(t), Hm = ham(t + 0.5 * dt), H1 = ham(t + dt);
    const CMatrix k1 = -I * (H0 * U);
    const CMatrix k2 = -I * (Hm * (U + 0.5 * dt * k1));
    const CMatrix k3 = -I * (Hm * (U + 0.5 * dt * k2));
    const CMatrix k4 = -I * (H1 * (U + dt * k3));
    U += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return U;
}

// Left-incidence r and t by back-propagating a pure transmitted wave through
// the chain, leads with onsite v and hopping h on both sides.
struct TransferResult {
  cd r, t;
};

inline TransferResult transfer_scattering(const Chain& c, double v, double h, double k) {
  const int N = c.size();
  const cd z = std::exp(I * k);
  const double E = v + 2.0 * h * std::cos(k);
  // a[n + 1] stores the amplitude of site n for n = -1 .. N+1.
  std::vector<cd> a(N + 3);
  auto A = [&](int n) -> cd& { return a[n + 1]; };
  A(N + 1) = std::pow(z, N + 1);
  A(N) = std::pow(z, N);
  auto hop = [&](int m, int n) -> cd {  // h_{m,n} including lead couplings
    if (m < 1 || n < 1 || m > N || n > N) return h;
    return m < n ? c.up[m - 1] : c.down[n - 1];
  };
  for (int n = N; n >= 1; --n) {
    const cd rhs = (E - c.onsite[n - 1]) * A(n) - hop(n, n + 1) * A(n + 1);
    A(n - 1) = rhs / hop(n, n - 1);
  }
  A(-1) = ((E - v) * A(0) - h * A(1)) / h;
  // A0 = alpha + beta, A(-1) = alpha/z + beta z.
  const cd beta = (A(-1) - A(0) / z) / (z - 1.0 / z);
  const cd alpha = A(0) - beta;
  return {beta / alpha, 1.0 / alpha};
}

inline Chain reversed(const Chain& c) {
  Chain r;
  r.onsite.assign(c.onsite.rbegin(), c.onsite.rend());
  r.up.assign(c.down.rbegin(), c.down.rend());
  r.down.assign(c.up.rbegin(), c.up.rend());
  return r;
}

} // namespace oracle
