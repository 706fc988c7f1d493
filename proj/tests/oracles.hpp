#pragma once

// Independent reference computations. Nothing here calls the library's
// search code; only its value types are shared.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "posmon/group.hpp"

namespace oracle {

using posmon::Rational;

// sign(x + y*sqrt2), exactly: compare squares when the terms disagree.
inline int sign_sqrt2(const Rational& x, const Rational& y) {
  const int sx = sgn(x), sy = sgn(y);
  if (sx == 0) return sy;
  if (sy == 0 || sx == sy) return sx;
  const int cmp = sgn(Rational(x * x - 2 * y * y));
  return cmp == 0 ? 0 : (cmp > 0 ? sx : sy);
}

// sign(c0 + c1*sqrt2 + c2*sqrt3): u = c0 + c1*sqrt2, then sign(u + c2*sqrt3)
// by squaring, since u^2 - 3 c2^2 = (c0^2 + 2c1^2 - 3c2^2) + 2 c0 c1 sqrt2.
inline int triple_sign(const Rational& c0, const Rational& c1, const Rational& c2) {
  const int su = sign_sqrt2(c0, c1), s3 = sgn(c2);
  if (su == 0) return s3;
  if (s3 == 0 || su == s3) return su;
  const int cmp = sign_sqrt2(Rational(c0 * c0 + 2 * c1 * c1 - 3 * c2 * c2), Rational(2 * c0 * c1));
  return cmp == 0 ? 0 : (cmp > 0 ? su : s3);
}

// Index, in comparison order, of the first nonzero coordinate.
inline std::size_t lex_level(const std::vector<Rational>& coords, std::size_t priority) {
  std::vector<std::size_t> order{priority};
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i != priority) order.push_back(i);
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (coords[order[k]] != 0) return k;
  }
  return order.size();
}

// Minimal generators of <gens> in N: those not a sum of smaller generators.
inline std::vector<long> numerical_atoms(std::vector<long> gens) {
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  std::vector<long> atoms;
  for (long g : gens) {
    std::vector<bool> reach(static_cast<std::size_t>(g) + 1, false);
    reach[0] = true;
    for (long x = 1; x <= g; ++x) {
      for (long a : atoms) {
        if (a <= x && reach[static_cast<std::size_t>(x - a)]) reach[static_cast<std::size_t>(x)] = true;
      }
    }
    if (!reach[static_cast<std::size_t>(g)]) atoms.push_back(g);
  }
  return atoms;
}

// Z(b) over the given atoms by plain nested loops, one loop per atom.
// Each factorization is a multiplicity vector indexed like `atoms`.
inline std::set<std::vector<long>> nested_loop_factorizations(const std::vector<long>& atoms, long b) {
  std::set<std::vector<long>> out;
  std::vector<long> c(atoms.size(), 0);
  const std::size_t k = atoms.size();
  const auto bound = [&](std::size_t i) { return b / atoms[i]; };
  for (c[0] = 0; c[0] <= bound(0); ++c[0]) {
    if (k == 1) {
      if (c[0] * atoms[0] == b) out.insert(c);
      continue;
    }
    for (c[1] = 0; c[1] <= bound(1); ++c[1]) {
      if (k == 2) {
        if (c[0] * atoms[0] + c[1] * atoms[1] == b) out.insert(c);
        continue;
      }
      for (c[2] = 0; c[2] <= bound(2); ++c[2]) {
        if (k == 3) {
          if (c[0] * atoms[0] + c[1] * atoms[1] + c[2] * atoms[2] == b) out.insert(c);
          continue;
        }
        for (c[3] = 0; c[3] <= bound(3); ++c[3]) {
          if (c[0] * atoms[0] + c[1] * atoms[1] + c[2] * atoms[2] + c[3] * atoms[3] == b) out.insert(c);
        }
      }
    }
  }
  return out;
}

inline Rational random_rational(std::mt19937_64& rng, long num_range, long den_max) {
  std::uniform_int_distribution<long> num(-num_range, num_range), den(1, den_max);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

}  // namespace oracle
