#pragma once

#include <vector>

#include "nlc/types.hpp"

namespace nlc {

// Eigenpairs of a dense complex matrix, columns of `vectors` unit-normalized
// with the first non-negligible entry real positive. Sorted by ascending real
// part; eigenvalues whose real parts agree to 1e-9 ||A|| are ordered by
// imaginary part.
struct EigenDecomposition {
  std::vector<cd> values;
  CMatrix vectors;
  CMatrix left_vectors;
  // ||x|| ||y|| / |y^H x| per eigenvalue.
  std::vector<double> condition;
};

// Householder reduction A = Q H Q^H with H upper Hessenberg.
void hessenberg_reduce(const CMatrix& A, CMatrix& H, CMatrix& Q);

// Eigenvalues of an upper Hessenberg matrix by implicitly shifted QR
// (Wilkinson shifts). Throws NonConvergence.
std::vector<cd> hessenberg_eigenvalues(CMatrix H);

// Full decomposition: Hessenberg reduction, shifted QR for the eigenvalues,
// inverse iteration on the Hessenberg form for right and left vectors.
EigenDecomposition eigen_decompose(const CMatrix& A);

double inf_norm(const CMatrix& A);

} // namespace nlc
