#include <doctest.h>

#include "nlc/error.hpp"
#include "nlc/symmetry.hpp"
#include "support.hpp"

using namespace nlc;

namespace {

// max |H[S(m),S(n)] - (conj) H[m,n]| over m, n in D, from dense matrices.
double brute_residual(const CMatrix& H, const oracle::Map& S, bool tr) {
  double r = 0.0;
  for (int m = S.lo; m <= S.hi; ++m) {
    for (int n = S.lo; n <= S.hi; ++n) {
      const cd orig = H(m - 1, n - 1);
      const cd mapped = H(S(m) - 1, S(n) - 1);
      r = std::max(r, std::abs(mapped - (tr ? std::conj(orig) : orig)));
    }
  }
  return r;
}

} // namespace

TEST_CASE("site maps and permutation matrices match the oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(3, 12)(rng);
    const oracle::Map S = test::random_map(rng, n);
    const SymmetryTransform t = test::to_transform(S);
    const PermutationMatrix p = sigma_matrix(t, n);
    for (int m = 1; m <= n; ++m) CHECK(p(m) == S(m));
    for (int m = S.lo; m <= S.hi; ++m) CHECK(map_site(t, m) == S(m));
    const CMatrix P = p.dense();
    CHECK((P * P.transpose() - CMatrix::Identity(n, n)).norm() == 0.0);
    if (S.inversion) {
      CHECK((P * P - CMatrix::Identity(n, n)).norm() == 0.0);
    }
  }
}

TEST_CASE("symmetry residual equals brute force over the domain") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(3, 10)(rng);
    const oracle::Chain c = oracle::random_chain(rng, n);
    oracle::Map S = test::random_map(rng, n);
    const bool tr = trial % 2 == 1;
    SymmetryTransform t = test::to_transform(S);
    t.time_reversal = tr;
    CHECK(symmetry_residual(test::to_model(c), t) == doctest::Approx(brute_residual(oracle::dense(c), S, tr)));
  }
}

TEST_CASE("transform validation") {
  CHECK_THROWS_AS(SymmetryTransform::inversion(0, 3).validate(5), Error);
  CHECK_THROWS_AS(SymmetryTransform::inversion(2, 6).validate(5), Error);
  CHECK_THROWS_AS(SymmetryTransform::translation(1, 3, 2).validate(4), Error);
  CHECK_THROWS_AS(SymmetryTransform::translation(1, 2, 3).validate(9), Error);
  CHECK_NOTHROW(SymmetryTransform::translation(1, 3, 2).validate(5));
  try {
    SymmetryTransform::inversion(4, 9).validate(5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::domain);
  }
  CHECK_THROWS_AS(map_site(SymmetryTransform::inversion(2, 4), 5), Error);
  const SymmetryTransform id = SymmetryTransform::identity();
  CHECK(id.empty());
  CHECK(sigma_matrix(id, 4).image == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("detected inversion domains are maximal and exact") {
  // Two mirror blocks [1,4] and [5,9] plus an accidental short one.
  const LatticeModel m({0.1, -0.05, -0.05, 0.1, 0.02, 0.12, -0.07, 0.12, 0.02},
                       {0.1, 0.16, 0.1, 0.07, 0.09, 0.13, 0.13, 0.09});
  const auto domains = detect_maximal_domains(m, TransformKind::inversion, false);
  bool has1 = false, has2 = false;
  for (const SymmetryTransform& t : domains) {
    CHECK(symmetry_residual(m, t) <= default_symmetry_tol(m));
    // Growing by one site on each side breaks the symmetry or leaves the chain.
    if (t.d_lo > 1 && t.d_hi < m.size()) {
      CHECK(symmetry_residual(m, SymmetryTransform::inversion(t.d_lo - 1, t.d_hi + 1)) >
            default_symmetry_tol(m));
    }
    has1 = has1 || (t.d_lo == 1 && t.d_hi == 4);
    has2 = has2 || (t.d_lo == 5 && t.d_hi == 9);
  }
  CHECK(has1);
  CHECK(has2);
  const auto cls = decompose_cls(m, TransformKind::inversion, false);
  REQUIRE(cls.has_value());
  REQUIRE(cls->size() == 2);
  CHECK((*cls)[0].d_hi == 4);
  CHECK((*cls)[1].d_lo == 5);
}

TEST_CASE("random CLS arrays decompose into their building blocks") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cd> v, h;
    std::vector<int> sizes;
    while (v.size() < 10) {
      const int size = std::uniform_int_distribution<int>(2, 5)(rng);
      std::vector<cd> block(size), links(size - 1);
      for (int i = 0; i < (size + 1) / 2; ++i) block[i] = block[size - 1 - i] = oracle::random_real(rng, -1, 1);
      for (int i = 0; i < size / 2; ++i) links[i] = links[size - 2 - i] = oracle::random_real(rng, 0.2, 1);
      if (!v.empty()) h.push_back(oracle::random_real(rng, 0.2, 1));
      v.insert(v.end(), block.begin(), block.end());
      h.insert(h.end(), links.begin(), links.end());
      sizes.push_back(size);
    }
    const LatticeModel m(v, h);
    const auto cls = decompose_cls(m, TransformKind::inversion, false);
    REQUIRE(cls.has_value());
    int next = 1;
    for (const SymmetryTransform& t : *cls) {
      CHECK(t.d_lo == next);
      next = t.d_hi + 1;
    }
    CHECK(next == m.size() + 1);
  }
}

TEST_CASE("translation domains and time reversal") {
  const std::vector<cd> v = {0, {0.15, 0.05}, 0, {0.15, -0.05}, 0};
  const LatticeModel m(v, {0.1, 0.2, 0.1, 0.2});
  const auto kt = detect_maximal_domains(m, TransformKind::translation, true);
  bool found = false;
  for (const SymmetryTransform& t : kt) found = found || (t.shift == 2 && t.d_lo == 1 && t.d_hi == 3);
  CHECK(found);
  for (const SymmetryTransform& t : detect_maximal_domains(m, TransformKind::translation, false)) {
    CHECK_FALSE((t.shift == 2 && t.d_hi - t.d_lo >= 2));
  }
  CHECK_FALSE(decompose_cls(LatticeModel({0.1, 0.2, 0.3}, {0.4, 0.5}), TransformKind::translation, false));
}
