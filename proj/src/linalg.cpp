#include "nlc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "nlc/error.hpp"

namespace nlc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Rotation G = [[c, s], [-conj(s), c]] with G [x; y] = [r; 0].
void givens(cd x, cd y, double& c, cd& s) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  if (ay == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (ax == 0.0) {
    c = 0.0;
    s = std::conj(y) / ay;
    return;
  }
  const double nu = std::hypot(ax, ay);
  c = ax / nu;
  s = (x / ax) * std::conj(y) / nu;
}

// LU of an upper Hessenberg matrix with row interchanges between neighbours
// only; tiny pivots are replaced so that near-singular shifts stay usable.
struct HessenbergLU {
  CMatrix U;
  std::vector<bool> swapped;
  std::vector<cd> multiplier;

  HessenbergLU(CMatrix B, double tiny) : U(std::move(B)) {
    const int n = static_cast<int>(U.rows());
    swapped.assign(std::max(n - 1, 0), false);
    multiplier.assign(std::max(n - 1, 0), cd{});
    for (int k = 0; k + 1 < n; ++k) {
      if (std::abs(U(k + 1, k)) > std::abs(U(k, k))) {
        for (int j = k; j < n; ++j) std::swap(U(k, j), U(k + 1, j));
        swapped[k] = true;
      }
      if (std::abs(U(k, k)) < tiny) U(k, k) = tiny;
      const cd l = U(k + 1, k) / U(k, k);
      multiplier[k] = l;
      U(k + 1, k) = 0.0;
      for (int j = k + 1; j < n; ++j) U(k + 1, j) -= l * U(k, j);
    }
    if (n > 0 && std::abs(U(n - 1, n - 1)) < tiny) U(n - 1, n - 1) = tiny;
  }

  CVector solve(CVector b) const {
    const int n = static_cast<int>(U.rows());
    for (int k = 0; k + 1 < n; ++k) {
      if (swapped[k]) std::swap(b(k), b(k + 1));
      b(k + 1) -= multiplier[k] * b(k);
    }
    for (int i = n - 1; i >= 0; --i) {
      cd acc = b(i);
      for (int j = i + 1; j < n; ++j) acc -= U(i, j) * b(j);
      b(i) = acc / U(i, i);
    }
    return b;
  }
};

CVector start_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CVector b(n);
  for (int i = 0; i < n; ++i) b(i) = cd(dist(rng), dist(rng));
  return b / b.norm();
}

double residual_inf(const CMatrix& A, const CVector& x, cd lambda) {
  return (A * x - lambda * x).cwiseAbs().maxCoeff();
}

// Inverse iteration on the Hessenberg matrix Hs for eigenvalue lambda.
// Vectors in `cluster` belong to (numerically) equal eigenvalues; the result
// is made orthogonal to them when that keeps it an eigenvector.
CVector inverse_iteration(const CMatrix& Hs, cd lambda, const std::vector<CVector>& cluster,
                          unsigned seed, double norm) {
  const int n = static_cast<int>(Hs.rows());
  const double tiny = std::max(kEps * norm, std::numeric_limits<double>::min());
  CMatrix B = Hs;
  B.diagonal().array() -= lambda;
  const HessenbergLU lu(B, tiny);
  const double target = 4.0 * kEps * norm * std::max(n, 1);

  auto iterate = [&](bool orthogonalize) {
    CVector x = start_vector(n, seed);
    for (int it = 0; it < 12; ++it) {
      x = lu.solve(x);
      if (orthogonalize) {
        for (int pass = 0; pass < 2; ++pass) {
          for (const CVector& c : cluster) x -= c * c.dot(x);
        }
      }
      const double nx = x.norm();
      if (!(nx > 0.0) || !std::isfinite(nx)) return CVector();
      x /= nx;
      if (it >= 1 && residual_inf(Hs, x, lambda) <= target) break;
    }
    return x;
  };

  CVector plain = iterate(false);
  if (cluster.empty()) return plain;
  CVector ortho = iterate(true);
  if (ortho.size() == n && residual_inf(Hs, ortho, lambda) <= 1e3 * target) return ortho;
  return plain;
}

void apply_gauge(CVector& x) {
  x /= x.norm();
  const double big = x.cwiseAbs().maxCoeff();
  for (int i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > 1e-8 * big) {
      x *= std::conj(x(i)) / std::abs(x(i));
      x(i) = std::abs(x(i));
      break;
    }
  }
}

} // namespace

double inf_norm(const CMatrix& A) {
  if (A.size() == 0) return 0.0;
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

void hessenberg_reduce(const CMatrix& A, CMatrix& H, CMatrix& Q) {
  const int n = static_cast<int>(A.rows());
  H = A;
  Q = CMatrix::Identity(n, n);
  for (int k = 0; k + 2 < n; ++k) {
    const int m = n - k - 1;
    CVector v = H.block(k + 1, k, m, 1);
    const double tail = v.tail(m - 1).norm();
    if (tail == 0.0) continue;
    const double xnorm = v.norm();
    const cd phase = v(0) == cd{} ? cd(1.0) : v(0) / std::abs(v(0));
    v(0) += phase * xnorm;
    v /= v.norm();
    // H <- P H P, P = I - 2 v v^H acting on indices k+1..n-1.
    const Eigen::RowVectorXcd w = v.adjoint() * H.bottomRows(m);
    H.bottomRows(m) -= 2.0 * v * w;
    const CVector z = H.rightCols(m) * v;
    H.rightCols(m) -= 2.0 * z * v.adjoint();
    const CVector zq = Q.rightCols(m) * v;
    Q.rightCols(m) -= 2.0 * zq * v.adjoint();
    H.block(k + 2, k, m - 1, 1).setZero();
  }
}

std::vector<cd> hessenberg_eigenvalues(CMatrix H) {
  const int n = static_cast<int>(H.rows());
  std::vector<cd> eig(n);
  const double norm = inf_norm(H);
  if (norm == 0.0) return eig;
  int hi = n - 1;
  int iter = 0;
  long total = 0;
  const long max_total = 60L * std::max(n, 1);
  while (hi >= 0) {
    int l = hi;
    for (; l > 0; --l) {
      double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(H(l, l - 1)) <= kEps * s) {
        H(l, l - 1) = 0.0;
        break;
      }
    }
    if (l == hi) {
      eig[hi] = H(hi, hi);
      --hi;
      iter = 0;
      continue;
    }
    if (++total > max_total) {
      throw Error(ErrorCode::non_convergence,
                  "shifted QR did not converge for eigenvalue index " + std::to_string(hi));
    }
    ++iter;
    cd mu;
    if (iter % 10 == 0) {
      mu = H(hi, hi) + 0.75 * std::abs(H(hi, hi - 1));
    } else {
      const cd a = H(hi - 1, hi - 1), b = H(hi - 1, hi), c = H(hi, hi - 1), d = H(hi, hi);
      const cd half = 0.5 * (a + d);
      const cd disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
      const cd mu1 = half + disc;
      const cd mu2 = half - disc;
      mu = std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
    }
    for (int k = l; k < hi; ++k) {
      const cd x = (k == l) ? H(l, l) - mu : H(k, k - 1);
      const cd y = (k == l) ? H(l + 1, l) : H(k + 1, k - 1);
      double c;
      cd s;
      givens(x, y, c, s);
      for (int j = std::max(l, k - 1); j <= hi; ++j) {
        const cd t1 = H(k, j), t2 = H(k + 1, j);
        H(k, j) = c * t1 + s * t2;
        H(k + 1, j) = -std::conj(s) * t1 + c * t2;
      }
      if (k > l) H(k + 1, k - 1) = 0.0;
      for (int i = l; i <= std::min(k + 2, hi); ++i) {
        const cd t1 = H(i, k), t2 = H(i, k + 1);
        H(i, k) = t1 * c + t2 * std::conj(s);
        H(i, k + 1) = -t1 * s + t2 * c;
      }
    }
  }
  return eig;
}

EigenDecomposition eigen_decompose(const CMatrix& A) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw Error(ErrorCode::invalid_argument, "eigen_decompose needs a square matrix");
  EigenDecomposition out;
  if (n == 0) return out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(A(i, j).real()) || !std::isfinite(A(i, j).imag())) {
        throw Error(ErrorCode::invalid_argument, "matrix has non-finite entries");
      }
    }
  }
  const double norm = inf_norm(A);
  CMatrix Hs, Q;
  hessenberg_reduce(A, Hs, Q);
  std::vector<cd> values = hessenberg_eigenvalues(Hs);

  // Sort: ascending real part, near-equal real parts by imaginary part.
  const double tie = 1e-9 * std::max(norm, 1e-300);
  std::sort(values.begin(), values.end(), [](cd a, cd b) { return a.real() < b.real(); });
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i + 1;
    while (j < values.size() && values[j].real() - values[j - 1].real() <= tie) ++j;
    std::sort(values.begin() + i, values.begin() + j,
              [](cd a, cd b) { return a.imag() < b.imag(); });
    i = j;
  }

  // Left vectors via the reversed conjugate transpose, which is again upper
  // Hessenberg.
  const CMatrix Hrev = Hs.adjoint().reverse();
  const double degenerate = 1e-9 * std::max(norm, 1.0);

  out.values = values;
  out.vectors.resize(n, n);
  out.left_vectors.resize(n, n);
  out.condition.resize(n);
  std::vector<CVector> right_h(n), left_h(n);
  for (int i = 0; i < n; ++i) {
    std::vector<CVector> cluster_r, cluster_l;
    for (int j = 0; j < i; ++j) {
      if (std::abs(values[j] - values[i]) < degenerate) {
        cluster_r.push_back(right_h[j]);
        cluster_l.push_back(left_h[j]);
      }
    }
    const unsigned seed = 12345u + static_cast<unsigned>(i);
    right_h[i] = inverse_iteration(Hs, values[i], cluster_r, seed, norm);
    left_h[i] = inverse_iteration(Hrev, std::conj(values[i]), cluster_l, seed + 7919u, norm);
    if (right_h[i].size() != n || left_h[i].size() != n) {
      throw Error(ErrorCode::non_convergence,
                  "inverse iteration failed for eigenvalue index " + std::to_string(i));
    }
    CVector x = Q * right_h[i];
    CVector y = Q * left_h[i].reverse();
    apply_gauge(x);
    y /= y.norm();
    const double res = residual_inf(A, x, values[i]);
    if (res > 1e-10 * std::max(norm, 1e-300)) {
      throw Error(ErrorCode::non_convergence,
                  "eigenvector residual " + std::to_string(res) + " too large for eigenvalue index " +
                    std::to_string(i));
    }
    out.vectors.col(i) = x;
    out.left_vectors.col(i) = y;
    const double overlap = std::abs(y.dot(x));
    out.condition[i] = overlap > 0.0 ? 1.0 / overlap : std::numeric_limits<double>::infinity();
  }
  return out;
}

} // namespace nlc
