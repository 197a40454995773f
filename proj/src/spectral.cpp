#include "nlc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nlc/error.hpp"
#include "nlc/parallel.hpp"

namespace nlc {

EigenSolution eigenmodes(const LatticeModel& model) {
  if (model.size() > 512) {
    throw Error(ErrorCode::invalid_argument, "dense eigensolver limited to N <= 512");
  }
  EigenDecomposition d = eigen_decompose(hamiltonian_matrix(model));
  EigenSolution s;
  s.values = std::move(d.values);
  s.vectors = std::move(d.vectors);
  s.condition = std::move(d.condition);
  s.degenerate.assign(s.values.size(), false);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    for (std::size_t j = 0; j < s.values.size(); ++j) {
      if (i != j && std::abs(s.values[i] - s.values[j]) < 1e-9) s.degenerate[i] = true;
    }
  }
  return s;
}

namespace {

std::size_t step_count(double span, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::invalid_argument, "time step must be positive");
  }
  if (!(span >= 0.0) || !std::isfinite(span)) {
    throw Error(ErrorCode::invalid_argument, "time span must be finite and nonnegative");
  }
  return static_cast<std::size_t>(std::llround(span / dt));
}

} // namespace

Trajectory time_evolve(const LatticeModel& model, const CVector& psi0, double t_end, double dt,
                       double t_start) {
  if (psi0.size() != model.size()) {
    throw Error(ErrorCode::invalid_argument, "initial state size mismatch");
  }
  const std::size_t steps = step_count(t_end - t_start, dt);
  const EigenSolution modes = eigenmodes(model);
  const CVector c = modes.vectors.partialPivLu().solve(psi0);
  Trajectory traj;
  traj.t0 = t_start;
  traj.dt = dt;
  traj.states.reserve(steps + 1);
  const int N = model.size();
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = traj.time(k);
    CVector phase(N);
    for (int nu = 0; nu < N; ++nu) phase(nu) = c(nu) * std::exp(-I * modes.values[nu] * t);
    traj.states.push_back(modes.vectors * phase);
  }
  return traj;
}

Trajectory time_evolve(const DrivenModel& driven, const CVector& psi0, double t_end, double dt) {
  driven.validate();
  if (psi0.size() != driven.base.size()) {
    throw Error(ErrorCode::invalid_argument, "initial state size mismatch");
  }
  const std::size_t steps = step_count(t_end, dt);
  const auto [H0, H1] = drive_components(driven);
  auto rhs = [&](double t, const CVector& psi) -> CVector {
    return -I * (H0 * psi + std::sin(driven.omega * t) * (H1 * psi));
  };
  Trajectory traj;
  traj.t0 = 0.0;
  traj.dt = dt;
  traj.states.reserve(steps + 1);
  CVector psi = psi0;
  traj.states.push_back(psi);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = traj.time(k);
    const CVector k1 = rhs(t, psi);
    const CVector k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1);
    const CVector k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2);
    const CVector k4 = rhs(t + dt, psi + dt * k3);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    traj.states.push_back(psi);
  }
  return traj;
}

cd complex_median(std::vector<cd> values) {
  if (values.empty()) return {};
  auto median_of = [](std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
  };
  std::vector<double> re, im;
  for (const cd& z : values) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {median_of(re), median_of(im)};
}

double constancy_deviation(const std::vector<cd>& values) {
  if (values.empty()) return 0.0;
  const cd med = complex_median(values);
  double worst = 0.0;
  for (const cd& z : values) worst = std::max(worst, std::abs(z - med));
  return worst / std::max(std::abs(med), 1e-14);
}

InvarianceReport invariance_report(const std::vector<cd>& q_values, double imag_tol) {
  InvarianceReport r;
  r.links = static_cast<int>(q_values.size());
  r.deviation = constancy_deviation(q_values);
  cd sum{};
  for (const cd& z : q_values) {
    sum += z;
    r.max_real = std::max(r.max_real, std::abs(z.real()));
  }
  if (!q_values.empty()) r.mean = sum / static_cast<double>(q_values.size());
  r.is_imaginary = r.max_real <= imag_tol;
  return r;
}

InvarianceReport invariance_report(const LatticeModel& model, const CVector& psi,
                                   const SymmetryTransform& t, double imag_tol) {
  const LinkCurrentField f = nlc_field(model, psi, t);
  const auto [lo, hi] = interior_links(t);
  std::vector<cd> q;
  for (int n = lo; n <= hi; ++n) q.push_back(f.q_plus(n - 1));
  if (imag_tol < 0.0) {
    imag_tol = 1e-10 * std::max(model.max_hopping() * psi.squaredNorm(),
                                std::numeric_limits<double>::min());
  }
  return invariance_report(q, imag_tol);
}

std::vector<SweepPoint> pt_transition_sweep(const ModelFamily& family,
                                            const std::vector<double>& grid,
                                            const SymmetryTransform& t, int threads,
                                            double real_tol) {
  std::vector<SweepPoint> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t g) {
    const LatticeModel model = family(grid[g]);
    const EigenSolution modes = eigenmodes(model);
    const double tol = real_tol >= 0.0 ? real_tol : 1e-8 * inf_norm(hamiltonian_matrix(model));
    const auto [lo, hi] = interior_links(t);
    SweepPoint& p = out[g];
    p.parameter = grid[g];
    std::vector<LinkCurrentField> fields;
    for (int nu = 0; nu < modes.size(); ++nu) {
      const CVector psi = modes.mode(nu);
      fields.push_back(nlc_field(model, psi, t));
      const InvarianceReport rep = invariance_report(model, psi, t);
      ModeRecord m;
      m.index = nu;
      m.energy = modes.values[nu];
      for (int n = lo; n <= hi; ++n) m.q_domain += fields.back().q_plus(n - 1);
      m.deviation = rep.deviation;
      m.max_real = rep.max_real;
      m.condition = modes.condition[nu];
      m.degenerate = modes.degenerate[nu];
      m.real_energy = std::abs(m.energy.imag()) <= tol;
      p.all_real = p.all_real && m.real_energy;
      p.q_sum += m.q_domain;
      p.modes.push_back(m);
    }
    for (int nu = 0; nu < modes.size(); ++nu) {
      if (p.modes[nu].real_energy) continue;
      int partner = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int mu = 0; mu < modes.size(); ++mu) {
        if (mu == nu) continue;
        const double d = std::abs(modes.values[mu] - std::conj(modes.values[nu]));
        if (d < best) {
          best = d;
          partner = mu;
        }
      }
      if (partner < 0) continue;
      const CVector sp = fields[nu].q_plus + fields[partner].q_plus;
      const CVector sm = fields[nu].q_minus + fields[partner].q_minus;
      p.pair_residual =
        std::max({p.pair_residual, sp.cwiseAbs().maxCoeff(), sm.cwiseAbs().maxCoeff()});
    }
  });
  return out;
}

MixedModeNlc mixed_mode_nlc(const LatticeModel& model, const EigenSolution& modes,
                            const SymmetryTransform& t, int nu, int mu) {
  if (nu < 0 || mu < 0 || nu >= modes.size() || mu >= modes.size()) {
    throw Error(ErrorCode::invalid_argument, "mode index out of range");
  }
  const int N = model.size();
  MixedModeNlc out;
  out.q_plus.resize(N);
  out.q_minus.resize(N);
  const CVector a = modes.mode(nu);
  const CVector b = modes.mode(mu);
  for (int n = 1; n <= N; ++n) {
    out.q_plus(n - 1) = cross_nlc(model, a, b, t, n, Direction::up);
    out.q_minus(n - 1) = cross_nlc(model, a, b, t, n, Direction::down);
  }
  return out;
}

} // namespace nlc
