#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "posmon/error.hpp"
#include "posmon/monoid.hpp"

using namespace posmon;

namespace {

MonoidDescriptor parse(std::string_view s) { return MonoidDescriptor::parse(s); }
GroupElement q(long n, long d = 1) { return GroupElement::rational(Rational(n, d)); }
GroupElement z(long n) { return GroupElement::integer(n); }

std::vector<Rational> window_values(const MonoidDescriptor& m, std::size_t depth) {
  std::vector<Rational> out;
  for (const auto& g : generators(m, depth)->gens) out.push_back(g.as_rational());
  return out;
}

// Every In verdict carries a certificate that replays.
void require_sound(const MonoidDescriptor& m, const GroupElement& x, const MembershipVerdict& v) {
  if (!v.in()) return;
  REQUIRE(v.certificate);
  REQUIRE(replay(m, x, *v.certificate));
}

}  // namespace

TEST_CASE("generator windows") {
  const std::vector<Rational> mq = {1, Rational(2, 3), Rational(4, 9), Rational(8, 27)};
  CHECK(window_values(parse("mq:2/3"), 3) == mq);
  const std::vector<Rational> m0 = {Rational(1, 2), Rational(1, 3), Rational(1, 5), Rational(1, 7)};
  auto got = window_values(parse("m0"), 4);
  std::sort(got.begin(), got.end(), std::greater<>());
  CHECK(got == m0);
  const auto c3 = window_values(parse("conductive:Z:a=3"), 5);
  CHECK(c3.front() == 3);
  CHECK(std::is_sorted(c3.begin(), c3.end()));

  for (const auto* inst : {"mq:2/3", "m0", "conductive:Z2:a=(1,0)", "lexcone:Z2:open", "alphabeta:2/3", "nearly-alpha"}) {
    const auto m = parse(inst);
    const auto small = generators(m, 3)->gens, large = generators(m, 6)->gens;
    for (const auto& g : small) {
      REQUIRE(g.is_positive());
      REQUIRE(std::find(large.begin(), large.end(), g) != large.end());
    }
  }
  CHECK_THROWS_AS(generators(parse("mq:2/3"), 0), DomainError);
}

TEST_CASE("descriptor validation") {
  CHECK_THROWS_AS(parse("mq:1/2"), DomainError);
  CHECK_THROWS_AS(parse("mq:3/2"), DomainError);
  CHECK_THROWS_AS(parse("conductive:Z:a=0"), DomainError);
  CHECK_THROWS_AS(parse("conductive:Z2:a=(0,-1)"), DomainError);
  CHECK_THROWS_AS(parse("nm:3,-5"), DomainError);
  CHECK_THROWS_AS(parse("frobnicate:1"), ParseError);
  CHECK_THROWS_AS(parse("localized:4"), DomainError);
}

TEST_CASE("descriptors round-trip through text and JSON") {
  for (const auto* inst : {"nm:3,5", "pm:1/2,2/3", "mq:2/3", "m0", "conductive:Z:a=3", "conductive:Z2:a=(1,0)",
                           "lexcone:Q2:open", "lexcone:ZxZ@prio=1:positive", "product:(mq:2/3)*(N0)", "almost", "quasi",
                           "localized:2", "alphabeta:3/5", "nearly-alpha", "union:(m0):gp>=2"}) {
    const auto m = parse(inst);
    CHECK(parse(m.to_string()) == m);
    CHECK(MonoidDescriptor::from_json(m.to_json()) == m);
  }
}

TEST_CASE("finitely generated membership against reachability") {
  const auto m = parse("nm:3,5");
  CHECK(contains(m, z(7)).out());
  const auto eight = contains(m, z(8));
  REQUIRE(eight.in());
  require_sound(m, z(8), eight);

  for (const auto& gens : std::vector<std::vector<long>>{{3, 5}, {4, 6, 7}, {6, 10, 15}, {5, 7, 9, 11}}) {
    std::vector<GroupElement> es;
    for (long g : gens) es.push_back(z(g));
    const auto fg = MonoidDescriptor::finite_generated(es);
    std::vector<bool> reach(121, false);
    reach[0] = true;
    for (long x = 1; x <= 120; ++x) {
      for (long g : gens) {
        if (g <= x && reach[static_cast<std::size_t>(x - g)]) reach[static_cast<std::size_t>(x)] = true;
      }
    }
    for (long x = 0; x <= 120; ++x) {
      const auto v = contains(fg, z(x));
      REQUIRE(v.in() == reach[static_cast<std::size_t>(x)]);
      require_sound(fg, z(x), v);
    }
  }
  CHECK_THROWS_AS(contains(m, z(-1)), DomainError);
}

TEST_CASE("M_q membership against canonical representations") {
  // Members with denominator 3^e have a representation sum c_n q^n with
  // n <= e and c_n < 3 for n >= 1; list all of them up to 2.
  const auto m = parse("mq:2/3");
  std::set<Rational> members;
  const Rational qq(2, 3);
  for (int mask = 0; mask < 2187; ++mask) {  // c_0..c_6 in {0,1,2}
    int rest = mask;
    Rational x = 0;
    for (unsigned n = 0; n <= 6; ++n, rest /= 3) x += (rest % 3) * pow(qq, n);
    if (x <= 2) members.insert(x);
  }
  for (long k = 1; k <= 1458; ++k) {
    const auto x = q(k, 729);
    const auto v = contains(m, x);
    REQUIRE(v.in() == members.contains(x.as_rational()));
    require_sound(m, x, v);
  }
  CHECK(contains(m, q(1, 2)).out());
  // Denominator law on enumerated members.
  for (const auto& x : members) CHECK(divides_power_exponent(denominator(x), 3) >= 0);
}

TEST_CASE("M_0 membership against bounded sums of 1/2, 1/3, 1/5, 1/7") {
  const auto m = parse("m0");
  std::set<Rational> members;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 6; ++b)
      for (int c = 0; c <= 10; ++c)
        for (int d = 0; d <= 14; ++d) {
          const Rational x = Rational(a, 2) + Rational(b, 3) + Rational(c, 5) + Rational(d, 7);
          if (x <= 2) members.insert(x);
        }
  for (long k = 1; k <= 420; ++k) {
    const auto x = q(k, 210);
    const auto v = contains(m, x);
    REQUIRE(v.in() == members.contains(x.as_rational()));
    require_sound(m, x, v);
  }
  CHECK(contains(m, q(1, 4)).out());
}

TEST_CASE("conductive and cone membership") {
  const auto m = parse("conductive:Z2:a=(1,0)");
  const GroupId g = m.group();
  CHECK(contains(m, GroupElement::parse(g, "(0,3)")).out());
  CHECK(contains(m, GroupElement::parse(g, "(2,-7)")).in());
  CHECK(contains(m, GroupElement::zero(g)).in());

  const auto nz = parse("lexcone:Z2:open");
  CHECK(divides(nz, GroupElement::parse(nz.group(), "(1,5)"), GroupElement::parse(nz.group(), "(2,0)")).in());
  CHECK(divides(nz, GroupElement::zero(nz.group()), GroupElement::parse(nz.group(), "(3,-1)")).in());
  CHECK(divides(parse("mq:2/3"), q(2, 3), q(4, 9)).out());
}

TEST_CASE("membership is monotone in depth") {
  for (const auto* inst : {"alphabeta:2/3", "nearly-alpha", "almost", "quasi"}) {
    const auto m = parse(inst);
    for (const auto& x : generators(m, 4)->gens) {
      const auto doubled = x + x;
      const auto shallow = contains(m, doubled, 4), deep = contains(m, doubled, 8);
      if (shallow.in()) REQUIRE(deep.in());
      if (shallow.out()) REQUIRE(deep.out());
      require_sound(m, doubled, deep);
    }
  }
}

TEST_CASE("product membership is componentwise") {
  const auto left = parse("nm:3,5"), right = parse("mq:2/3");
  const auto p = MonoidDescriptor::product(left, right);
  for (long a = 0; a <= 12; ++a) {
    for (long k = 0; k <= 27; ++k) {
      const auto x = GroupElement::lex(p.group(), {Rational(a), Rational(k, 9)});
      const bool expect = contains(left, z(a)).in() && contains(right, q(k, 9)).in();
      REQUIRE(contains(p, x).in() == expect);
    }
  }
}

TEST_CASE("difference groups") {
  CHECK(gp_membership(parse("nm:3,5"), z(1)));
  CHECK_FALSE(gp_membership(parse("nm:4,6"), z(3)));
  const auto quasi = parse("quasi");
  CHECK(contains(quasi, q(1, 2)).in());
  CHECK_FALSE(gp_membership(quasi, q(1, 2), GroupScope::AtomicSubmonoid));
  CHECK(gp_membership(quasi, q(4, 27), GroupScope::AtomicSubmonoid));
  CHECK(gp_membership(parse("m0"), q(1, 30)));
  CHECK_FALSE(gp_membership(parse("m0"), q(1, 4)));
}

TEST_CASE("enumerations behind the prime injections") {
  std::set<Rational> seen;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const auto r = nonnegative_rational_at(i);
    REQUIRE(r >= 0);
    REQUIRE(seen.insert(r).second);
    REQUIRE(nonnegative_rational_index(r) == i);
  }
  CHECK(nth_prime(0) == 2);
  CHECK(nth_prime(24) == 97);

  const auto s = alpha_beta_discovery(Rational(2, 3), 40);
  for (std::size_t i = 0; i < s.size(); ++i) {
    REQUIRE(s[i] * s[i] < 2);
    REQUIRE(alpha_beta_index(Rational(2, 3), s[i]) == i);
  }
}
