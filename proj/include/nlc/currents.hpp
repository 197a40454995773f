#pragma once

#include <vector>

#include "nlc/lattice.hpp"
#include "nlc/symmetry.hpp"

namespace nlc {

enum class Direction : int { up = 1, down = -1 };

inline int step(Direction d) { return static_cast<int>(d); }

struct StateVector {
  CVector amplitudes;
  double time = 0.0;
};

// States sampled at t0 + k dt.
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<CVector> states;

  double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
};

// Per-site link currents; entry n-1 belongs to site n, and the '+' value of a
// site sits on its upper link (n, n+1).
struct LinkCurrentField {
  SymmetryTransform transform;
  PermutationMatrix sigma;
  CVector q_plus, q_minus;
  CVector dual_plus, dual_minus;
  CVector j_plus, j_minus;

  int size() const { return static_cast<int>(q_plus.size()); }
  cd q(int n, Direction d) const { return d == Direction::up ? q_plus(n - 1) : q_minus(n - 1); }
  cd dual(int n, Direction d) const {
    return d == Direction::up ? dual_plus(n - 1) : dual_minus(n - 1);
  }
  cd j(int n, Direction d) const { return d == Direction::up ? j_plus(n - 1) : j_minus(n - 1); }
};

cd local_current(const LatticeModel& model, const CVector& psi, int n, Direction d);
cd nlc(const LatticeModel& model, const CVector& psi, const SymmetryTransform& t, int n,
       Direction d);
cd dual_nlc(const LatticeModel& model, const CVector& psi, const SymmetryTransform& t, int n,
            Direction d);
// psi_plus = psi(t), psi_minus = psi(-t).
cd bitemporal_nlc(const LatticeModel& model, const CVector& psi_plus, const CVector& psi_minus,
                  const SymmetryTransform& t, int n, Direction d);

// Vectorized evaluation through diagonal and permutation-matrix products.
LinkCurrentField nlc_field(const LatticeModel& model, const CVector& psi,
                           const SymmetryTransform& t);

// NLC between two different states: first slot conj(left), mapped slot right.
cd cross_nlc(const LatticeModel& model, const CVector& left, const CVector& right,
             const SymmetryTransform& t, int n, Direction d);

// Sum of psi*_n psi_{nbar} over [lo, hi]; the whole chain when lo > hi.
cd nonlocal_charge(const CVector& psi, const SymmetryTransform& t, int lo = 1, int hi = 0);

// Q over the site range [lo, hi] and its boundary form q^-_lo + q^+_hi.
cd net_nlc_domain(const LinkCurrentField& field, int lo, int hi);
cd boundary_nlc_sum(const LinkCurrentField& field, int lo, int hi);

// beta_n = (v_{nbar} - v*_n)/i, xi_n = (v_{nbar} - v_n)/i, gamma_n = (v_n - v*_n)/i.
cd asymmetry_beta(const LatticeModel& model, const SymmetryTransform& t, int n);
cd asymmetry_xi(const LatticeModel& model, const SymmetryTransform& t, int n);
double gain_rate(const LatticeModel& model, int n);

// Max over interior time samples of |dsigma/dt - q - beta sigma| per site,
// using central differences.
std::vector<double> continuity_residual(const LatticeModel& model, const Trajectory& trajectory,
                                        const SymmetryTransform& t);

// psi_{S(n)} = (q psi_n - qdual psi*_n) / j.
cd amplitude_map_current(cd j, cd q, cd q_dual, cd psi_n, double threshold);
cd amplitude_map_current(const LatticeModel& model, const CVector& psi, const SymmetryTransform& t,
                         int n, Direction d);
double singular_current_threshold(const LatticeModel& model, const CVector& psi);

// psi_{nbar} from anchor ratio psi_{nbar0}/psi*_{n0} and the NLCs on the
// path between n and n0.
cd amplitude_map_summation(const LatticeModel& model, const CVector& psi,
                           const SymmetryTransform& t, int n, int n0, cd ratio);

double current_connection_residual(const LinkCurrentField& field, int n, Direction d);

// Upper NLC over the whole chain with sites of the last period taken from the
// backward translation, -conj(q^-_{K-}).
CVector backward_assignment(const LatticeModel& model, const CVector& psi,
                            const SymmetryTransform& t);

// Links [d_lo, d_hi - 1] whose endpoints and images all lie in the domain.
std::pair<int, int> interior_links(const SymmetryTransform& t);

} // namespace nlc
