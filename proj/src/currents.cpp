#include "nlc/currents.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlc/error.hpp"

namespace nlc {

namespace {

cd at(const CVector& v, int n) {
  return (n >= 1 && n <= v.size()) ? v(n - 1) : cd{};
}

// i q = L_n h_{s,s+e} R_{s+e} - L_{n+d} h2 R_s, with h2 = h_{n,n+d} or its
// conjugate. Out-of-range labels contribute zero.
cd pair_current(const LatticeModel& model, const CVector& left, const CVector& right, int n, int d,
                int s, int e, bool conj_hop) {
  const cd h_image = model.hopping(s, s + e);
  const cd h_own = model.hopping(n, n + d);
  const cd first = at(left, n) * h_image * at(right, s + e);
  const cd second = at(left, n + d) * (conj_hop ? std::conj(h_own) : h_own) * at(right, s);
  return -I * (first - second);
}

CVector conj_of(const CVector& v) { return v.conjugate(); }

void check_state(const LatticeModel& model, const CVector& psi) {
  if (psi.size() != model.size()) {
    throw Error(ErrorCode::invalid_argument, "state length " + std::to_string(psi.size()) +
                                               " does not match model size " +
                                               std::to_string(model.size()));
  }
}

} // namespace

cd local_current(const LatticeModel& model, const CVector& psi, int n, Direction d) {
  check_state(model, psi);
  return pair_current(model, conj_of(psi), psi, n, step(d), n, step(d), true);
}

cd nlc(const LatticeModel& model, const CVector& psi, const SymmetryTransform& t, int n,
       Direction d) {
  check_state(model, psi);
  const PermutationMatrix sigma = sigma_matrix(t, model.size());
  return pair_current(model, conj_of(psi), psi, n, step(d), sigma(n), t.pairing() * step(d), true);
}

cd cross_nlc(const LatticeModel& model, const CVector& left, const CVector& right,
             const SymmetryTransform& t, int n, Direction d) {
  check_state(model, left);
  check_state(model, right);
  const PermutationMatrix sigma = sigma_matrix(t, model.size());
  return pair_current(model, conj_of(left), right, n, step(d), sigma(n), t.pairing() * step(d),
                      true);
}

cd dual_nlc(const LatticeModel& model, const CVector& psi, const SymmetryTransform& t, int n,
            Direction d) {
  check_state(model, psi);
  const PermutationMatrix sigma = sigma_matrix(t, model.size());
  return pair_current(model, psi, psi, n, step(d), sigma(n), t.pairing() * step(d), false);
}

cd bitemporal_nlc(const LatticeModel& model, const CVector& psi_plus, const CVector& psi_minus,
                  const SymmetryTransform& t, int n, Direction d) {
  check_state(model, psi_plus);
  check_state(model, psi_minus);
  const PermutationMatrix sigma = sigma_matrix(t, model.size());
  return pair_current(model, psi_minus, psi_plus, n, step(d), sigma(n), t.pairing() * step(d),
                      false);
}

LinkCurrentField nlc_field(const LatticeModel& model, const CVector& psi,
                           const SymmetryTransform& t) {
  check_state(model, psi);
  const int N = model.size();
  const CMatrix H = hamiltonian_matrix(model);
  const CMatrix up = H.triangularView<Eigen::StrictlyUpper>();
  const CMatrix down = H.triangularView<Eigen::StrictlyLower>();

  LinkCurrentField f;
  f.transform = t;
  f.sigma = sigma_matrix(t, N);
  const CMatrix S = f.sigma.dense();

  const CVector psi_c = psi.conjugate();
  const CVector up_psi = up * psi;
  const CVector down_psi = down * psi;
  const CVector s_psi = S * psi;
  // The image link of (n, n+1) is (nbar, nbar-1) for inversion and
  // (nbar, nbar+1) for translation.
  const CVector& image_plus = t.kind == TransformKind::inversion ? down_psi : up_psi;
  const CVector& image_minus = t.kind == TransformKind::inversion ? up_psi : down_psi;
  const CVector s_plus = S * image_plus;
  const CVector s_minus = S * image_minus;

  f.q_plus = -I * (psi_c.cwiseProduct(s_plus) - up_psi.conjugate().cwiseProduct(s_psi));
  f.q_minus = -I * (psi_c.cwiseProduct(s_minus) - down_psi.conjugate().cwiseProduct(s_psi));
  f.dual_plus = -I * (psi.cwiseProduct(s_plus) - up_psi.cwiseProduct(s_psi));
  f.dual_minus = -I * (psi.cwiseProduct(s_minus) - down_psi.cwiseProduct(s_psi));
  f.j_plus = -I * (psi_c.cwiseProduct(up_psi) - up_psi.conjugate().cwiseProduct(psi));
  f.j_minus = -I * (psi_c.cwiseProduct(down_psi) - down_psi.conjugate().cwiseProduct(psi));
  return f;
}

cd nonlocal_charge(const CVector& psi, const SymmetryTransform& t, int lo, int hi) {
  const int N = static_cast<int>(psi.size());
  if (lo > hi) {
    lo = 1;
    hi = N;
  }
  const PermutationMatrix sigma = sigma_matrix(t, N);
  cd sum{};
  for (int n = std::max(lo, 1); n <= std::min(hi, N); ++n) {
    sum += std::conj(psi(n - 1)) * psi(sigma(n) - 1);
  }
  return sum;
}

cd net_nlc_domain(const LinkCurrentField& field, int lo, int hi) {
  cd sum{};
  for (int n = std::max(lo, 1); n <= std::min(hi, field.size()); ++n) {
    sum += field.q_plus(n - 1) + field.q_minus(n - 1);
  }
  return sum;
}

cd boundary_nlc_sum(const LinkCurrentField& field, int lo, int hi) {
  return field.q_minus(lo - 1) + field.q_plus(hi - 1);
}

cd asymmetry_beta(const LatticeModel& model, const SymmetryTransform& t, int n) {
  const PermutationMatrix sigma = sigma_matrix(t, model.size());
  return -I * (model.onsite(sigma(n)) - std::conj(model.onsite(n)));
}

cd asymmetry_xi(const LatticeModel& model, const SymmetryTransform& t, int n) {
  const PermutationMatrix sigma = sigma_matrix(t, model.size());
  return -I * (model.onsite(sigma(n)) - model.onsite(n));
}

double gain_rate(const LatticeModel& model, int n) { return 2.0 * model.onsite(n).imag(); }

std::vector<double> continuity_residual(const LatticeModel& model, const Trajectory& trajectory,
                                        const SymmetryTransform& t) {
  const int N = model.size();
  if (trajectory.states.size() < 3 || !(trajectory.dt > 0.0)) {
    throw Error(ErrorCode::grid_mismatch, "continuity residual needs >= 3 samples and dt > 0");
  }
  for (const CVector& s : trajectory.states) {
    if (s.size() != N) throw Error(ErrorCode::grid_mismatch, "trajectory state size mismatch");
  }
  const PermutationMatrix sigma = sigma_matrix(t, N);
  std::vector<cd> beta(N);
  for (int n = 1; n <= N; ++n) beta[n - 1] = asymmetry_beta(model, t, n);

  auto density = [&](const CVector& psi, int n) {
    return std::conj(psi(n - 1)) * psi(sigma(n) - 1);
  };
  std::vector<double> worst(N, 0.0);
  for (std::size_t k = 1; k + 1 < trajectory.states.size(); ++k) {
    const CVector& prev = trajectory.states[k - 1];
    const CVector& cur = trajectory.states[k];
    const CVector& next = trajectory.states[k + 1];
    const LinkCurrentField f = nlc_field(model, cur, t);
    for (int n = 1; n <= N; ++n) {
      const cd rate = (density(next, n) - density(prev, n)) / (2.0 * trajectory.dt);
      const cd r = rate - f.q_plus(n - 1) - f.q_minus(n - 1) - beta[n - 1] * density(cur, n);
      worst[n - 1] = std::max(worst[n - 1], std::abs(r));
    }
  }
  return worst;
}

cd amplitude_map_current(cd j, cd q, cd q_dual, cd psi_n, double threshold) {
  if (std::abs(j) <= threshold) {
    throw Error(ErrorCode::singular_current, "local current below mapping threshold");
  }
  return (q * psi_n - q_dual * std::conj(psi_n)) / j;
}

double singular_current_threshold(const LatticeModel& model, const CVector& psi) {
  const double amp = psi.size() ? psi.cwiseAbs().maxCoeff() : 0.0;
  return 1e-10 * model.max_hopping() * amp * amp;
}

cd amplitude_map_current(const LatticeModel& model, const CVector& psi, const SymmetryTransform& t,
                         int n, Direction d) {
  return amplitude_map_current(local_current(model, psi, n, d), nlc(model, psi, t, n, d),
                               dual_nlc(model, psi, t, n, d), psi(n - 1),
                               singular_current_threshold(model, psi));
}

cd amplitude_map_summation(const LatticeModel& model, const CVector& psi,
                           const SymmetryTransform& t, int n, int n0, cd ratio) {
  check_state(model, psi);
  const Direction d = n <= n0 ? Direction::up : Direction::down;
  const int s = step(d);
  cd sum{};
  for (int m = n; m != n0; m += s) {
    const cd a = psi(m - 1);
    const cd b = at(psi, m + s);
    if (a == cd{} || b == cd{}) {
      throw Error(ErrorCode::zero_amplitude_on_path,
                  "zero amplitude on summation path at site " + std::to_string(a == cd{} ? m : m + s));
    }
    const cd h = model.hopping(m, m + s);
    sum += nlc(model, psi, t, m, d) / (std::conj(a) * std::conj(h) * std::conj(b));
  }
  return std::conj(psi(n - 1)) * (ratio - I * sum);
}

double current_connection_residual(const LinkCurrentField& field, int n, Direction d) {
  const cd q = field.q(n, d);
  const cd qd = field.dual(n, d);
  const int image = field.sigma(n);
  const Direction image_dir =
    field.transform.pairing() * step(d) > 0 ? Direction::up : Direction::down;
  const cd jj = field.j(n, d) * field.j(image, image_dir);
  return std::abs(std::norm(q) - std::norm(qd) - jj);
}

CVector backward_assignment(const LatticeModel& model, const CVector& psi,
                            const SymmetryTransform& t) {
  if (t.kind != TransformKind::translation || t.empty()) {
    throw Error(ErrorCode::invalid_argument, "backward assignment needs a translation transform");
  }
  check_state(model, psi);
  t.validate(model.size());
  const LinkCurrentField forward = nlc_field(model, psi, t);
  CVector out = forward.q_plus;
  const CVector psi_c = psi.conjugate();
  const int L = t.shift;
  // Backward translation m -> m - L, evaluated on the lower link of m; the
  // topmost site of U has no upper link and repeats the last link value.
  for (int site = t.d_hi; site <= t.u_hi(); ++site) {
    const int m = std::min(site + 1, t.u_hi());
    const cd q_back = pair_current(model, psi_c, psi, m, -1, m - L, -1, true);
    out(site - 1) = -std::conj(q_back);
  }
  return out;
}

std::pair<int, int> interior_links(const SymmetryTransform& t) { return {t.d_lo, t.d_hi - 1}; }

} // namespace nlc
