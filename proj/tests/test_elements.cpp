#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "posmon/error.hpp"
#include "posmon/group.hpp"

using namespace posmon;

namespace {

const GroupId kZ2 = GroupId::lex_integers(2);

GroupElement z2(long x, long y) { return GroupElement::lex(kZ2, {Rational(x), Rational(y)}); }

GroupElement random_element(std::mt19937_64& rng, const GroupId& g) {
  switch (g.kind()) {
    case GroupKind::Rational:
      return GroupElement::rational(oracle::random_rational(rng, 50, g == GroupId::integers() ? 1 : 12), g);
    case GroupKind::Algebraic:
      return GroupElement::triple(oracle::random_rational(rng, 20, 6), oracle::random_rational(rng, 20, 6),
                                  oracle::random_rational(rng, 20, 6));
    case GroupKind::Lex: {
      // Sparse coordinates so that every level gets exercised.
      std::uniform_int_distribution<int> zero(0, 2);
      std::vector<Rational> coords;
      for (std::size_t i = 0; i < g.rank(); ++i) {
        coords.push_back(zero(rng) == 0 ? Rational(0) : oracle::random_rational(rng, 9, g.coord_is_rational(i) ? 5 : 1));
      }
      return GroupElement::lex(g, coords);
    }
  }
  return {};
}

}  // namespace

TEST_CASE("rational arithmetic stays in lowest terms") {
  CHECK(add(GroupElement::rational(Rational(1, 2)), GroupElement::rational(Rational(1, 3))) ==
        GroupElement::rational(Rational(5, 6)));
  CHECK(parse_rational("6/4") == Rational(3, 2));
  CHECK(format_rational(parse_rational("-10/4")) == "-5/2");
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto a = GroupElement::rational(oracle::random_rational(rng, 100, 30));
    const auto b = GroupElement::rational(oracle::random_rational(rng, 100, 30));
    for (const auto& x : {a + b, -a, scale(Integer(7), a)}) {
      const Rational& q = x.as_rational();
      REQUIRE(gcd_of(numerator(q), denominator(q)) == 1);
      REQUIRE(denominator(q) >= 1);
    }
  }
}

TEST_CASE("lex order under first-coordinate priority") {
  CHECK(compare(z2(0, 5), z2(1, -100)) == Ordering::LT);
  CHECK(compare(z2(3, 3), z2(3, 3)) == Ordering::EQ);
  CHECK(negate(z2(2, -3)) == z2(-2, 3));
  CHECK(z2(0, 1).is_positive());
  CHECK_FALSE(z2(-1, 50).is_positive());

  const GroupId second = GroupId::lex_integers(2, 1);
  const auto a = GroupElement::lex(second, {Rational(5), Rational(0)});
  const auto b = GroupElement::lex(second, {Rational(0), Rational(1)});
  CHECK(a < b);
}

TEST_CASE("mixing groups is rejected") {
  CHECK_THROWS_AS(add(z2(1, 0), GroupElement::integer(1)), GroupMismatch);
  CHECK_THROWS_AS(compare(z2(1, 0), GroupElement::lex(GroupId::lex_integers(2, 1), {Rational(1), Rational(0)})),
                  GroupMismatch);
  CHECK_THROWS_AS(GroupId::parse("Z9"), DomainError);
}

TEST_CASE("triple sign agrees with the squaring oracle") {
  CHECK(compare(GroupElement::triple(0, 1, 0), GroupElement::triple(Rational(3, 2), 0, 0)) == Ordering::LT);
  CHECK(scale(Integer(3), GroupElement::triple(0, 1, 0)) == GroupElement::triple(0, 3, 0));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto c0 = oracle::random_rational(rng, 40, 9);
    const auto c1 = oracle::random_rational(rng, 40, 9);
    const auto c2 = oracle::random_rational(rng, 40, 9);
    REQUIRE(GroupElement::triple(c0, c1, c2).sign() == oracle::triple_sign(c0, c1, c2));
  }
  // Near-cancellation: 99/70 and 97/56 approximate sqrt2 and sqrt3 closely.
  CHECK(GroupElement::triple(Rational(-99, 70), 1, 0).sign() == oracle::triple_sign(Rational(-99, 70), 1, 0));
  CHECK(GroupElement::triple(Rational(-97, 56), 0, 1).sign() == oracle::triple_sign(Rational(-97, 56), 0, 1));
  CHECK(GroupElement::triple(Rational(-1351, 780), 0, 1).sign() == -1);
}

TEST_CASE("enclosures contain the value and shrink with precision") {
  const AlgebraicTriple t{Rational(1), Rational(-1), Rational(1)};  // 1 - sqrt2 + sqrt3 ~ 1.3178
  const auto lo = enclose(t, 64), hi = enclose(t, 256);
  CHECK(lo.lo <= hi.lo);
  CHECK(hi.hi <= lo.hi);
  CHECK(hi.lo < Rational(13179, 10000));
  CHECK(hi.hi > Rational(13178, 10000));
}

TEST_CASE("text forms round-trip") {
  std::mt19937_64 rng(3);
  for (const auto& g : {GroupId::integers(), GroupId::rationals(), GroupId::quadratic_span(), GroupId::parse("ZxQxZ@prio=1"),
                        GroupId::lex_integers(3, 2)}) {
    CHECK(GroupId::parse(g.to_string()) == g);
    for (int i = 0; i < 200; ++i) {
      const auto x = random_element(rng, g);
      REQUIRE(GroupElement::parse(g, x.to_string()) == x);
    }
  }
  CHECK(GroupElement::parse(kZ2, "(2,-3)") == z2(2, -3));
  CHECK_THROWS_AS(GroupElement::parse(kZ2, "(1,2)@prio=1"), ParseError);
  CHECK_THROWS_AS(GroupElement::parse(kZ2, "(1,1/2)"), DomainError);
}

TEST_CASE("Archimedean classes") {
  CHECK(arch_valuation(z2(0, 7)).level == 1);
  CHECK(arch_valuation(z2(3, -5)).level == 0);
  CHECK(is_lteq(compare_classes(arch_valuation(z2(3, -5)), arch_valuation(z2(0, 7)))));
  CHECK(same_class(GroupElement::rational(Rational(1, 9)), GroupElement::rational(Rational(400))));
  CHECK(same_class(GroupElement::triple(1, 1, 0), GroupElement::triple(0, 0, 2)));
  CHECK_THROWS_AS(arch_valuation(z2(0, 0)), DomainError);

  CHECK(big_o(z2(0, 5), z2(1, 0)));
  CHECK_FALSE(big_o(z2(1, 0), z2(0, 5)));
  CHECK(big_o(GroupElement::rational(1000000), GroupElement::rational(Rational(1, 7))));
  const GroupId z3 = GroupId::lex_integers(3);
  CHECK(big_o(GroupElement::lex(z3, {0, 0, 9}), GroupElement::lex(z3, {0, 1, 0})));
  CHECK_THROWS_AS(big_o(z2(1, 0), z2(0, 0)), DomainError);
}

TEST_CASE("lex class index matches the first nonzero prioritized coordinate") {
  std::mt19937_64 rng(5);
  for (const auto& g : {GroupId::lex_integers(3, 0), GroupId::lex_integers(3, 1), GroupId::parse("QxZxQxZ@prio=2")}) {
    for (int i = 0; i < 2000; ++i) {
      const auto x = random_element(rng, g);
      if (x.is_zero()) continue;
      REQUIRE(arch_valuation(x).level == oracle::lex_level(x.as_lex().coords, g.priority()));
    }
  }
}

TEST_CASE("valuation is superadditive with equality off the diagonal") {
  std::mt19937_64 rng(17);
  for (const auto& g : {GroupId::rationals(), GroupId::quadratic_span(), GroupId::lex_integers(3, 1)}) {
    std::size_t tested = 0;
    while (tested < 10000) {
      const auto a = random_element(rng, g), b = random_element(rng, g);
      if (a.is_zero() || b.is_zero() || (a + b).is_zero()) continue;
      ++tested;
      const auto va = arch_valuation(a), vb = arch_valuation(b), vs = arch_valuation(a + b);
      const auto& low = is_lteq(compare_classes(va, vb)) ? va : vb;
      REQUIRE(is_gteq(compare_classes(vs, low)));
      if (is_neq(compare_classes(va, vb)) || (a.is_positive() && b.is_positive())) {
        REQUIRE(is_eq(compare_classes(vs, low)));
      }
    }
  }
}

TEST_CASE("order is compatible with addition") {
  std::mt19937_64 rng(23);
  for (const auto& g : {GroupId::rationals(), GroupId::quadratic_span(), GroupId::lex_integers(2), GroupId::parse("QxZ")}) {
    for (int i = 0; i < 1000; ++i) {
      const auto a = random_element(rng, g), b = random_element(rng, g), c = random_element(rng, g);
      REQUIRE((a <= b) == (a + c <= b + c));
      REQUIRE(((a < b) || (b < a) || (a == b)));
      REQUIRE(a + b == b + a);
      REQUIRE((a + b) + c == a + (b + c));
    }
  }
}
