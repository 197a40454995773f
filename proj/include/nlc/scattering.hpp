#pragma once

#include <functional>
#include <vector>

#include "nlc/currents.hpp"
#include "nlc/lattice.hpp"
#include "nlc/symmetry.hpp"

namespace nlc {

// E = v + 2h cos k for k in (0, pi).
double lead_dispersion(const LeadSpec& lead, double k);

// Plane waves zeta^n, zeta = e^{ik}, in global site labels: a_n = A zeta^n +
// B zeta^-n left of the scatterer (n < 1) and C zeta^n + D zeta^-n right of
// it (n > N). Inputs are A and D, outputs B and C.
struct ScatteringSolution {
  double k = 0.0;
  double E = 0.0;
  LeadSpec lead;
  cd in_left{}, in_right{};
  cd out_left{}, out_right{};
  CVector interior;

  cd zeta() const;
  // Amplitude at any site label, using the asymptotic forms outside [1, N].
  cd amplitude(int n) const;
};

struct SMatrix {
  double k = 0.0;
  double E = 0.0;
  cd r{}, t{}, t_prime{}, r_prime{};
};

// Solves the (N+2) close-coupling system for [B, a_1..a_N, C]. The scatterer
// Hamiltonian may be any dense matrix coupled to the leads through sites 1
// and N with the lead hopping.
ScatteringSolution solve_scattering(const CMatrix& H, const LeadSpec& lead, double k, cd in_left,
                                    cd in_right);
ScatteringSolution solve_scattering(const LatticeModel& model, const LeadSpec& lead, double k,
                                    cd in_left, cd in_right);

SMatrix s_matrix(const LatticeModel& model, const LeadSpec& lead, double k);

// Max close-coupling residual over sites 0..N+1, relative to
// max(|E|, ||H||, |h|) times the largest amplitude.
double close_coupling_residual(const CMatrix& H, const ScatteringSolution& s);
double close_coupling_residual(const LatticeModel& model, const ScatteringSolution& s);

// Scatterer padded by `pad` lead sites on both sides, closed chain, with the
// asymptotic amplitudes filled in. Original site n sits at n + pad.
struct ExtendedState {
  LatticeModel model;
  CVector psi;
  int pad = 0;
};
ExtendedState extend_with_leads(const LatticeModel& model, const ScatteringSolution& s, int pad);

// q+ on a left-lead link whose inversion image about alpha2/2 is a right-lead
// link, and q- on that image (its conjugate).
struct BoundaryNlc {
  cd left{};
  cd right{};
};
BoundaryNlc scattering_nlc_boundary(const ScatteringSolution& s, int alpha2);

// S2 lives in a frame shifted by `offset` sites relative to S1.
SMatrix compose_smatrices(const SMatrix& s1, const SMatrix& s2, int offset);

double pt_unitarity_residual(const SMatrix& s);

enum class PtrClass { symmetric, asymmetric };

struct PtrResult {
  double k = 0.0;
  double E = 0.0;
  double g = 0.0;  // 1 - |t|^2 at k
  PtrClass cls = PtrClass::asymmetric;
  cd t{};
  std::vector<cd> domain_q;  // median interior q+ per domain, left incidence
  double threshold = 0.0;
  double reflection_match = 0.0;  // |r1' - conj(r2)|
  double q_magnitude_gap = 0.0;   // ||q_D1| - |q_D2||
  double phase_deviation = 0.0;   // distance of arg[t zeta^{2(a2-a1)}] from {0, pi}
  double density_asymmetry = 0.0; // max over domains of |rho_n - rho_nbar|
};

struct PtrOptions {
  int grid_points = 2000;
  double g_tol = 1e-12;
  int threads = 1;
};

std::vector<double> default_k_grid(int points);

// |t| = 1 points of a model decomposed into inversion domains. The first and
// last domains play the roles of D1 and D2 in the two-scatterer checks.
std::vector<PtrResult> find_ptr(const LatticeModel& model, const LeadSpec& lead,
                                const std::vector<SymmetryTransform>& domains,
                                const PtrOptions& options = {});

// Newton refinement of a one-parameter family towards an exact zero of the
// left reflection amplitude in the (w, k) plane. Throws NonConvergence when
// |r| stays above tol.
struct PtrTuning {
  double w = 0.0;
  double k = 0.0;
  double reflection = 0.0;
};
PtrTuning refine_ptr(const std::function<LatticeModel(double)>& family, const LeadSpec& lead,
                     double w0, double k0, double tol = 1e-13);

// Median of q+ over the interior links of each domain for one solution.
std::vector<cd> domain_nlcs(const LatticeModel& model, const ScatteringSolution& s,
                            const std::vector<SymmetryTransform>& domains);

} // namespace nlc
