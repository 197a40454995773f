#include "nlc/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <string>

#include "nlc/currents.hpp"
#include "nlc/error.hpp"
#include "nlc/linalg.hpp"
#include "nlc/spectral.hpp"

namespace nlc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double circular_distance(double a, double b, double omega) {
  const double d = std::remainder(a - b, omega);
  return std::abs(d);
}

struct Selected {
  std::vector<cd> eps;
  std::vector<std::vector<CVector>> fourier;
  std::vector<double> weight;
  std::vector<int> fold_shift;
};

Selected select_modes(const DrivenModel& driven, int M) {
  const int N = driven.base.size();
  const EigenDecomposition d = eigen_decompose(floquet_matrix(driven, M));
  const int total = static_cast<int>(d.values.size());
  std::vector<double> weight(total);
  for (int i = 0; i < total; ++i) {
    const CVector v = d.vectors.col(i);
    weight[i] = v.segment(M * N, N).squaredNorm() / v.squaredNorm();
  }
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weight[a] > weight[b]; });
  order.resize(N);
  // Report in ascending folded quasienergy for a stable mode numbering.
  std::vector<double> folded(total);
  for (int i : order) folded[i] = fold_quasienergy(d.values[i].real(), driven.omega);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return folded[a] < folded[b]; });

  Selected s;
  for (int i : order) {
    const cd e = d.values[i];
    const double f = folded[i];
    s.eps.emplace_back(f, e.imag());
    s.fold_shift.push_back(static_cast<int>(std::lround((e.real() - f) / driven.omega)));
    s.weight.push_back(weight[i]);
    CVector v = d.vectors.col(i);
    v /= v.norm();
    std::vector<CVector> blocks;
    for (int m = -M; m <= M; ++m) blocks.push_back(v.segment((m + M) * N, N));
    s.fourier.push_back(std::move(blocks));
  }
  return s;
}

std::vector<CVector> sample_mode(const std::vector<CVector>& blocks, int M, int shift,
                                 double omega, int samples) {
  const double tau = kTwoPi / omega;
  std::vector<CVector> out;
  out.reserve(samples + 1);
  for (int j = 0; j <= samples; ++j) {
    const double t = tau * j / samples;
    CVector phi = CVector::Zero(blocks.front().size());
    for (int m = -M; m <= M; ++m) phi += blocks[m + M] * std::exp(I * (m * omega * t));
    // Folding eps by -shift w multiplies phi by exp(-i shift w t).
    out.push_back(phi * std::exp(-I * (shift * omega * t)));
  }
  return out;
}

std::vector<LinkCurrentField> sampled_fields(const DrivenModel& driven,
                                             const FloquetSolution& solution, int mu,
                                             const SymmetryTransform& t) {
  if (mu < 0 || mu >= solution.size()) {
    throw Error(ErrorCode::invalid_argument, "Floquet mode index out of range");
  }
  t.validate(driven.base.size());
  std::vector<LinkCurrentField> fields;
  fields.reserve(solution.samples + 1);
  for (int j = 0; j <= solution.samples; ++j) {
    fields.push_back(nlc_field(model_at_time(driven, solution.time(j)), solution.modes[mu][j], t));
  }
  return fields;
}

CVector simpson(const std::vector<CVector>& f) {
  const int n = static_cast<int>(f.size()) - 1;
  CVector acc = f.front() + f.back();
  for (int j = 1; j < n; ++j) acc += (j % 2 ? 4.0 : 2.0) * f[j];
  return acc / (3.0 * n);
}

} // namespace

double FloquetSolution::time(int j) const { return kTwoPi / omega * j / samples; }

double FloquetSolution::periodicity_error(int mu) const {
  return (modes[mu].front() - modes[mu].back()).cwiseAbs().maxCoeff();
}

double fold_quasienergy(double e, double omega) {
  double f = std::remainder(e, omega);
  if (f <= -0.5 * omega) f += omega;
  return f;
}

CMatrix floquet_matrix(const DrivenModel& driven, int M) {
  driven.validate();
  if (M < 1) throw Error(ErrorCode::invalid_argument, "need at least one sideband");
  const auto [H0, H1] = drive_components(driven);
  const int N = driven.base.size();
  const int blocks = 2 * M + 1;
  CMatrix F = CMatrix::Zero(blocks * N, blocks * N);
  // sin(wt) = (e^{iwt} - e^{-iwt}) / 2i couples neighbouring sidebands.
  const CMatrix lower = H1 / (2.0 * I);
  for (int b = 0; b < blocks; ++b) {
    const int m = b - M;
    F.block(b * N, b * N, N, N) = H0 + CMatrix::Identity(N, N) * (m * driven.omega);
    if (b > 0) F.block(b * N, (b - 1) * N, N, N) = lower;
    if (b + 1 < blocks) F.block(b * N, (b + 1) * N, N, N) = -lower;
  }
  return F;
}

FloquetSolution floquet_modes(const DrivenModel& driven, const FloquetOptions& options) {
  driven.validate();
  if (options.sidebands < 1) throw Error(ErrorCode::invalid_argument, "need at least one sideband");
  if (options.samples < 2) throw Error(ErrorCode::invalid_argument, "need at least two samples");
  const int samples = options.samples + (options.samples % 2);
  const int M = options.sidebands;

  const Selected sel = select_modes(driven, M);
  FloquetSolution sol;
  sol.omega = driven.omega;
  sol.sidebands = M;
  sol.samples = samples;
  sol.quasienergies = sel.eps;
  sol.fourier = sel.fourier;
  sol.central_weight = sel.weight;
  for (std::size_t mu = 0; mu < sel.eps.size(); ++mu) {
    sol.modes.push_back(sample_mode(sel.fourier[mu], M, sel.fold_shift[mu], driven.omega, samples));
  }

  if (options.check_truncation) {
    const Selected wider = select_modes(driven, M + 2);
    for (const cd& e : sol.quasienergies) {
      double best = std::numeric_limits<double>::infinity();
      for (const cd& w : wider.eps) {
        best = std::min(best, std::hypot(circular_distance(e.real(), w.real(), driven.omega),
                                         e.imag() - w.imag()));
      }
      sol.truncation_shift = std::max(sol.truncation_shift, best);
    }
    if (sol.truncation_shift > options.truncation_tol) {
      throw Error(ErrorCode::unconverged_truncation,
                  "quasienergies move by " + std::to_string(sol.truncation_shift) +
                    " between " + std::to_string(M) + " and " + std::to_string(M + 2) +
                    " sidebands");
    }
  }
  return sol;
}

PeriodAverage period_averaged_nlc(const DrivenModel& driven, const FloquetSolution& solution,
                                  int mu, const SymmetryTransform& t) {
  const std::vector<LinkCurrentField> fields = sampled_fields(driven, solution, mu, t);
  std::vector<CVector> qp, qm;
  for (const LinkCurrentField& f : fields) {
    qp.push_back(f.q_plus);
    qm.push_back(f.q_minus);
  }
  PeriodAverage avg;
  avg.q_plus = simpson(qp);
  avg.q_minus = simpson(qm);
  const auto [lo, hi] = interior_links(t);
  std::vector<cd> interior;
  for (int n = lo; n <= hi; ++n) {
    const cd q = avg.q_plus(n - 1);
    interior.push_back(q);
    avg.max_real = std::max(avg.max_real, std::abs(q.real()));
    avg.max_imag = std::max(avg.max_imag, std::abs(q.imag()));
  }
  avg.deviation = constancy_deviation(interior);
  return avg;
}

std::vector<double> zero_sum_check(const DrivenModel& driven, const FloquetSolution& solution,
                                   int mu, const SymmetryTransform& t) {
  const PeriodAverage avg = period_averaged_nlc(driven, solution, mu, t);
  std::vector<double> out;
  for (int n = t.d_lo; n <= t.d_hi; ++n) out.push_back(std::abs(avg.q_plus(n - 1) + avg.q_minus(n - 1)));
  return out;
}

double mirror_identity_residual(const DrivenModel& driven, const FloquetSolution& solution, int mu,
                                const SymmetryTransform& t) {
  if (t.kind != TransformKind::inversion) {
    throw Error(ErrorCode::invalid_argument, "mirror identity needs an inversion domain");
  }
  const std::vector<LinkCurrentField> fields = sampled_fields(driven, solution, mu, t);
  double worst = 0.0;
  for (const LinkCurrentField& f : fields) {
    for (int n = t.d_lo; n <= t.d_hi; ++n) {
      const int nbar = map_site(t, n);
      for (Direction d : {Direction::up, Direction::down}) {
        const int m = nbar - step(d);
        const int partner = n + step(d);
        if (m < t.d_lo || m > t.d_hi || partner < t.d_lo || partner > t.d_hi) continue;
        worst = std::max(worst, std::abs(I * f.q(m, d) - std::conj(I * f.q(n, d))));
      }
    }
  }
  return worst;
}

} // namespace nlc
