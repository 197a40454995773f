// Glue between the oracle data types and the library.
#pragma once

#include <random>

#include "nlc/lattice.hpp"
#include "nlc/symmetry.hpp"
#include "oracles.hpp"

namespace test {

inline nlc::LatticeModel to_model(const oracle::Chain& c) {
  return nlc::LatticeModel(c.onsite, c.up, c.down);
}

inline nlc::SymmetryTransform to_transform(const oracle::Map& m) {
  return m.inversion ? nlc::SymmetryTransform::inversion(m.lo, m.hi)
                     : nlc::SymmetryTransform::translation(m.lo, m.hi, m.shift);
}

// Random valid transform on an n-site chain.
inline oracle::Map random_map(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> coin(0, 1);
  oracle::Map m;
  m.inversion = coin(rng) == 0 || n < 3;
  if (m.inversion) {
    m.lo = std::uniform_int_distribution<int>(1, n)(rng);
    m.hi = std::uniform_int_distribution<int>(m.lo, n)(rng);
  } else {
    m.shift = std::uniform_int_distribution<int>(1, std::max(1, n / 3))(rng);
    m.lo = std::uniform_int_distribution<int>(1, n - 2 * m.shift + 1)(rng);
    m.hi = std::uniform_int_distribution<int>(m.lo + m.shift - 1, n - m.shift)(rng);
  }
  return m;
}

} // namespace test
