#pragma once

#include <vector>

#include "nlc/lattice.hpp"
#include "nlc/symmetry.hpp"

namespace nlc {

struct FloquetOptions {
  int sidebands = 6;
  int samples = 256;
  // Recompute with sidebands + 2 and throw UnconvergedTruncation when a
  // quasienergy moves by more than truncation_tol.
  bool check_truncation = true;
  double truncation_tol = 1e-8;
};

// psi_mu(t) = exp(-i eps_mu t) phi_mu(t) with phi_mu periodic.
struct FloquetSolution {
  double omega = 0.0;
  int sidebands = 0;
  // Even sample count; modes carry samples + 1 points t_j = j tau / samples,
  // the last one closing the period.
  int samples = 0;
  std::vector<cd> quasienergies;                // folded into (-w/2, w/2]
  std::vector<std::vector<CVector>> modes;      // modes[mu][j]
  std::vector<std::vector<CVector>> fourier;    // fourier[mu][m + M]
  std::vector<double> central_weight;           // m = 0 block weight
  double truncation_shift = 0.0;                // max |eps(M) - eps(M + 2)|

  int size() const { return static_cast<int>(quasienergies.size()); }
  double time(int j) const;
  double periodicity_error(int mu) const;
};

// Extended (2M+1)N matrix in the sideband basis exp(i m w t), m = -M..M.
CMatrix floquet_matrix(const DrivenModel& driven, int sidebands);

double fold_quasienergy(double e, double omega);

FloquetSolution floquet_modes(const DrivenModel& driven, const FloquetOptions& options = {});

struct PeriodAverage {
  CVector q_plus, q_minus;      // per site, Simpson average over one period
  double deviation = 0.0;       // constancy of q_plus over the interior links
  double max_real = 0.0;        // over interior links
  double max_imag = 0.0;
};

PeriodAverage period_averaged_nlc(const DrivenModel& driven, const FloquetSolution& solution,
                                  int mu, const SymmetryTransform& t);

// |qbar+_n + qbar-_n| for the sites of the domain.
std::vector<double> zero_sum_check(const DrivenModel& driven, const FloquetSolution& solution,
                                   int mu, const SymmetryTransform& t);

// Max over samples and domain sites of |i q^+-_{nbar -+ 1}(t) - conj(i q^+-_n(t))|.
double mirror_identity_residual(const DrivenModel& driven, const FloquetSolution& solution, int mu,
                                const SymmetryTransform& t);

} // namespace nlc
