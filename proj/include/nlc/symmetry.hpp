#pragma once

#include <optional>
#include <vector>

#include "nlc/lattice.hpp"

namespace nlc {

enum class TransformKind { inversion, translation };

// Local inversion n -> 2a - n or translation n -> n + L acting on the site
// interval D = [d_lo, d_hi]. An empty domain (d_lo > d_hi) is the identity.
struct SymmetryTransform {
  TransformKind kind = TransformKind::inversion;
  int d_lo = 1;
  int d_hi = 0;
  int center2 = 0;
  int shift = 0;
  bool time_reversal = false;

  static SymmetryTransform identity();
  static SymmetryTransform inversion(int d_lo, int d_hi, bool time_reversal = false);
  static SymmetryTransform translation(int d_lo, int d_hi, int shift, bool time_reversal = false);

  bool empty() const { return d_lo > d_hi; }
  int domain_size() const { return empty() ? 0 : d_hi - d_lo + 1; }
  // U = D for inversion, D plus the last period for translation.
  int u_lo() const { return d_lo; }
  int u_hi() const;
  // Sign relating S(n+-1) to S(n): -1 for inversion, +1 for translation.
  int pairing() const { return kind == TransformKind::inversion ? -1 : 1; }

  void validate(int n_sites) const;
  bool operator==(const SymmetryTransform&) const = default;
};

// Pure analytic map on D.
int map_site(const SymmetryTransform& t, int n);

// [Sigma]_{mn} = delta_{image(m), n}; image is 1-based, identity outside U.
struct PermutationMatrix {
  std::vector<int> image;

  int size() const { return static_cast<int>(image.size()); }
  int operator()(int m) const { return image[m - 1]; }
  CVector apply(const CVector& psi) const;
  CMatrix dense() const;
};

PermutationMatrix sigma_matrix(const SymmetryTransform& t, int n_sites);

double symmetry_residual(const LatticeModel& model, const SymmetryTransform& t);
double default_symmetry_tol(const LatticeModel& model);

std::vector<SymmetryTransform> detect_maximal_domains(const LatticeModel& model, TransformKind kind,
                                                      bool time_reversal,
                                                      std::optional<double> tol = std::nullopt);

// Exact cover of [1, N] by non-overlapping maximal domains, or nullopt.
std::optional<std::vector<SymmetryTransform>> decompose_cls(const LatticeModel& model,
                                                            TransformKind kind,
                                                            bool time_reversal,
                                                            std::optional<double> tol = std::nullopt);

} // namespace nlc
