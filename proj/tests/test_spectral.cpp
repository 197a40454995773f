#include <doctest.h>

#include <cmath>

#include "nlc/error.hpp"
#include "nlc/linalg.hpp"
#include "nlc/spectral.hpp"
#include "support.hpp"

using namespace nlc;

namespace {

std::vector<cd> sorted(std::vector<cd> v) {
  std::sort(v.begin(), v.end(), [](cd a, cd b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

} // namespace

TEST_CASE("eigenvalues match Eigen's complex solver and satisfy H x = E x") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const oracle::Chain c = oracle::random_chain(rng, n);
    const EigenSolution s = eigenmodes(test::to_model(c));
    const CMatrix H = oracle::dense(c);
    const std::vector<cd> ours = sorted(s.values);
    const std::vector<cd> ref = oracle::eigenvalues(H);
    for (int i = 0; i < n; ++i) CHECK(std::abs(ours[i] - ref[i]) < 1e-10);
    for (int nu = 0; nu < n; ++nu) {
      const CVector x = s.mode(nu);
      CHECK(std::abs(x.norm() - 1.0) < 1e-12);
      CHECK((H * x - s.values[nu] * x).norm() < 1e-12);
    }
  }
}

TEST_CASE("Hessenberg reduction is a similarity transform") {
  std::mt19937_64 rng(6);
  CMatrix A(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) A(i, j) = oracle::random_complex(rng);
  CMatrix H, Q;
  hessenberg_reduce(A, H, Q);
  CHECK((Q * H * Q.adjoint() - A).norm() < 1e-13);
  for (int i = 2; i < 7; ++i)
    for (int j = 0; j < i - 1; ++j) CHECK(H(i, j) == cd{});
}

TEST_CASE("exact time evolution agrees with an independent RK4 propagator") {
  std::mt19937_64 rng(7);
  const oracle::Chain c = oracle::random_chain(rng, 6);
  const CMatrix H = oracle::dense(c);
  const CVector psi0 = oracle::random_state(rng, 6);
  const Trajectory tr = time_evolve(test::to_model(c), psi0, 3.0, 0.5);
  REQUIRE(tr.states.size() == 7);
  const CMatrix U = oracle::rk4_propagator([&](double) { return H; }, 3.0, 3000, 6);
  CHECK((tr.states.back() - U * psi0).norm() < 1e-10);
  CHECK_THROWS_AS(time_evolve(test::to_model(c), psi0, 1.0, 0.0), Error);
}

TEST_CASE("driven RK4 evolution agrees with the oracle propagator") {
  DrivenModel d;
  d.base = LatticeModel({0.1, -0.2, 0.3, 0.0}, {0.5, 0.7, 0.4});
  d.f = 0.4;
  d.omega = 1.3;
  d.mask = {true, true, false};
  std::mt19937_64 rng(8);
  const CVector psi0 = oracle::random_state(rng, 4);
  const Trajectory tr = time_evolve(d, psi0, 2.0, 0.001);
  const CMatrix U = oracle::rk4_propagator(
    [&](double t) { return hamiltonian_matrix(model_at_time(d, t)); }, 2.0, 4000, 4);
  CHECK((tr.states.back() - U * psi0).norm() < 1e-10);
}

TEST_CASE("median and constancy metric") {
  CHECK(complex_median({cd{1, 5}, cd{3, 1}, cd{2, 3}}) == cd{2, 3});
  CHECK(complex_median({cd{1, 0}, cd{3, 0}}) == cd{2, 0});
  CHECK(constancy_deviation({cd{2, 0}, cd{2, 0}, cd{2.2, 0}}) == doctest::Approx(0.1));
  CHECK(constancy_deviation({cd{0, 0}, cd{1e-20, 0}, cd{0, 0}}) < 1e-5);
}

TEST_CASE("PT transition sweep: unbroken window and conjugate pairs") {
  auto family = [](double g) {
    return LatticeModel({cd{0, 0.06}, cd{0, g}, 0.06, cd{0, -g}, cd{0, -0.06}},
                        {0.1, 0.2, 0.2, 0.1}, std::vector<cd>{0.1, 0.2, 0.2, 0.1});
  };
  const std::vector<double> grid = {0.0, 0.05, 0.1, 0.2, 0.3};
  const auto pts = pt_transition_sweep(family, grid, SymmetryTransform::inversion(1, 5, true), 2);
  CHECK(pts[0].all_real);
  CHECK_FALSE(pts[4].all_real);
  for (const SweepPoint& p : pts) {
    if (p.all_real) {
      for (const ModeRecord& m : p.modes) CHECK(std::abs(m.q_domain) < 1e-10);
    } else {
      CHECK(p.pair_residual < 1e-10);
      CHECK(std::abs(p.q_sum) < 1e-10);
    }
  }
  // Thread count does not change results.
  const auto serial = pt_transition_sweep(family, grid, SymmetryTransform::inversion(1, 5, true), 1);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t nu = 0; nu < 5; ++nu) CHECK(serial[g].modes[nu].energy == pts[g].modes[nu].energy);
  }
}

TEST_CASE("mixed-mode NLC reduces to the single-mode NLC on the diagonal") {
  std::mt19937_64 rng(9);
  const oracle::Chain c = oracle::random_chain(rng, 6);
  const LatticeModel m = test::to_model(c);
  const EigenSolution s = eigenmodes(m);
  const SymmetryTransform t = SymmetryTransform::inversion(2, 5);
  const MixedModeNlc mixed = mixed_mode_nlc(m, s, t, 3, 3);
  const LinkCurrentField f = nlc_field(m, s.mode(3), t);
  CHECK((mixed.q_plus - f.q_plus).norm() < 1e-15);
  CHECK_THROWS_AS(mixed_mode_nlc(m, s, t, 0, 6), Error);
}
