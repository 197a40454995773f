#pragma once

#include <functional>
#include <vector>

#include "nlc/currents.hpp"
#include "nlc/lattice.hpp"
#include "nlc/linalg.hpp"
#include "nlc/symmetry.hpp"

namespace nlc {

struct EigenSolution {
  std::vector<cd> values;
  CMatrix vectors;
  std::vector<double> condition;
  // Eigenvalues closer than 1e-9 to another one.
  std::vector<bool> degenerate;

  int size() const { return static_cast<int>(values.size()); }
  CVector mode(int nu) const { return vectors.col(nu); }
};

EigenSolution eigenmodes(const LatticeModel& model);

// Exact propagation through the eigen-decomposition; samples at
// t_start + k dt up to t_end, with psi0 given at t = 0.
Trajectory time_evolve(const LatticeModel& model, const CVector& psi0, double t_end, double dt,
                       double t_start = 0.0);
// Classical RK4 on i dpsi/dt = H(t) psi, starting at t = 0.
Trajectory time_evolve(const DrivenModel& driven, const CVector& psi0, double t_end, double dt);

// Componentwise median of complex samples.
cd complex_median(std::vector<cd> values);
// max |q - median| / max(|median|, 1e-14).
double constancy_deviation(const std::vector<cd>& values);

struct InvarianceReport {
  double deviation = 0.0;
  cd mean{};
  bool is_imaginary = true;
  double max_real = 0.0;
  int links = 0;
};

// Constancy of q+ over the links interior to the transform's domain.
InvarianceReport invariance_report(const LatticeModel& model, const CVector& psi,
                                   const SymmetryTransform& t, double imag_tol = -1.0);
InvarianceReport invariance_report(const std::vector<cd>& q_values, double imag_tol);

struct ModeRecord {
  int index = 0;
  cd energy{};
  cd q_domain{};  // sum of q+ over interior links
  double deviation = 0.0;
  double max_real = 0.0;
  double condition = 1.0;
  bool degenerate = false;
  bool real_energy = true;
};

struct SweepPoint {
  double parameter = 0.0;
  std::vector<ModeRecord> modes;
  bool all_real = true;
  // max over conjugate pairs and sites of |q_nu + q_nu'| (both directions).
  double pair_residual = 0.0;
  cd q_sum{};
};

using ModelFamily = std::function<LatticeModel(double)>;

// real_tol: |Im E| below it counts as real; negative selects 1e-8 ||H||.
std::vector<SweepPoint> pt_transition_sweep(const ModelFamily& family,
                                            const std::vector<double>& grid,
                                            const SymmetryTransform& t, int threads = 1,
                                            double real_tol = -1.0);

struct MixedModeNlc {
  CVector q_plus, q_minus;
};

MixedModeNlc mixed_mode_nlc(const LatticeModel& model, const EigenSolution& modes,
                            const SymmetryTransform& t, int nu, int mu);

} // namespace nlc
