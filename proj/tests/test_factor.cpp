#include <doctest.h>

#include "oracles.hpp"
#include "posmon/error.hpp"
#include "posmon/factor.hpp"

using namespace posmon;

namespace {

MonoidDescriptor parse(std::string_view s) { return MonoidDescriptor::parse(s); }
GroupElement z(long n) { return GroupElement::integer(n); }

MonoidDescriptor numerical(const std::vector<long>& gens) {
  std::vector<GroupElement> es;
  for (long g : gens) es.push_back(z(g));
  return MonoidDescriptor::finite_generated(es);
}

std::vector<long> as_longs(const std::vector<GroupElement>& xs) {
  std::vector<long> out;
  for (const auto& x : xs) out.push_back(x.as_rational().get_num().get_si());
  return out;
}

// Multiplicity vector of f over `atoms` (ascending).
std::vector<long> mult_vector(const Factorization& f, const std::vector<long>& atoms) {
  std::vector<long> c(atoms.size(), 0);
  for (std::size_t i = 0; i < f.atoms.size(); ++i) {
    const long a = f.atoms[i].as_rational().get_num().get_si();
    const auto at = std::find(atoms.begin(), atoms.end(), a) - atoms.begin();
    c[static_cast<std::size_t>(at)] = f.mults[i].get_si();
  }
  return c;
}

}  // namespace

TEST_CASE("atoms by closed form and by search") {
  const auto c3 = atoms(parse("conductive:Z:a=3"));
  CHECK(as_longs(c3.atoms) == std::vector<long>{3, 4, 5});
  CHECK(c3.complete);
  CHECK(as_longs(atoms(numerical({4, 6, 7})).atoms) == std::vector<long>{4, 6, 7});
  CHECK(as_longs(atoms(numerical({3, 5, 6, 8, 10})).atoms) == std::vector<long>{3, 5});

  const auto nz = parse("lexcone:Z2:open");
  const auto cone = atoms(nz, 5);
  CHECK_FALSE(cone.complete);
  REQUIRE(cone.atoms.size() == 11);
  for (long n = -5; n <= 5; ++n) {
    CHECK(std::find(cone.atoms.begin(), cone.atoms.end(), GroupElement::lex(nz.group(), {1, Rational(n)})) !=
          cone.atoms.end());
  }

  const auto mq = atoms(parse("mq:2/3"), 6);
  REQUIRE(mq.atoms.size() == 7);
  for (const auto& a : mq.atoms) CHECK(verify_atom(parse("mq:2/3"), a));
  CHECK_FALSE(verify_atom(parse("nm:3,5"), z(8)));
}

TEST_CASE("factorization examples") {
  const auto m = parse("nm:3,5");
  const auto z15 = factorizations(m, z(15));
  REQUIRE(z15.items.size() == 2);
  CHECK(z15.complete);
  CHECK(length_set(m, z(15)).lengths == std::set<Integer>{3, 5});
  CHECK_THROWS_AS(factorizations(m, z(7)), DomainError);

  const auto c3 = parse("conductive:Z:a=3");
  const auto z3 = factorizations(c3, z(3));
  REQUIRE(z3.items.size() == 1);
  CHECK(z3.items[0].length == 1);
  CHECK(length_set(c3, z(5)).lengths == std::set<Integer>{1});

  const auto nz = parse("lexcone:Z2:open");
  const auto two = factorizations(nz, GroupElement::lex(nz.group(), {2, 0}), 5);
  CHECK(two.items.size() == 6);
  CHECK_FALSE(two.complete);

  const auto m0 = parse("m0");
  const auto l1 = length_set(m0, GroupElement::rational(1), 6);
  CHECK(l1.lengths == std::set<Integer>{2, 3, 5, 7, 11, 13});
  CHECK_FALSE(l1.complete);

  const auto anti = factorizations(parse("localized:2"), GroupElement::rational(Rational(3, 4)));
  CHECK(anti.items.empty());
  CHECK(anti.note == "NotAtomicFamily");
}

TEST_CASE("factorizations are sound and ordered") {
  for (const auto* inst : {"nm:4,6,7", "conductive:Z:a=4", "mq:2/3", "conductive:Z2:a=(1,2)", "quasi"}) {
    const auto m = parse(inst);
    std::set<std::string> verified;
    for (const auto& x : generators(m, 5)->gens) {
      const auto b = x + x + x;
      const auto list = factorizations(m, b, 6);
      for (std::size_t i = 0; i < list.items.size(); ++i) {
        const auto& f = list.items[i];
        REQUIRE(f.consistent());
        REQUIRE(f.value == b);
        for (const auto& a : f.atoms) {
          if (verified.insert(a.to_string()).second) REQUIRE(verify_atom(m, a, 6));
        }
        if (i > 0) REQUIRE(!(list.items[i - 1] == f));
      }
      const auto ls = length_set_of(list);
      for (const auto& f : list.items) REQUIRE(ls.lengths.contains(f.length));
    }
  }
}

TEST_CASE("truncation is explicit") {
  const auto list = factorizations(parse("nm:2,3"), z(60), kDefaultDepth, 5);
  CHECK(list.items.size() == 5);
  CHECK(list.truncated);
  CHECK_FALSE(list.complete);
}

TEST_CASE("numerical monoids match the nested-loop oracle") {
  // The full sweep (generators <= 20, b <= 100) runs in the acceptance
  // binary; this is the quick slice.
  for (long g1 = 2; g1 <= 9; ++g1) {
    for (long g2 = g1 + 1; g2 <= 11; g2 += 2) {
      for (long g3 : {g2 + 1, g2 + 4}) {
        const std::vector<long> gens{g1, g2, g3};
        const auto m = numerical(gens);
        const auto oracle_atoms = oracle::numerical_atoms(gens);
        REQUIRE(as_longs(atoms(m).atoms) == oracle_atoms);
        for (long b = 0; b <= 50; ++b) {
          const auto expect = oracle::nested_loop_factorizations(oracle_atoms, b);
          if (expect.empty()) {
            REQUIRE_THROWS_AS(factorizations(m, z(b)), DomainError);
            continue;
          }
          const auto list = factorizations(m, z(b));
          REQUIRE(list.complete);
          std::set<std::vector<long>> got;
          for (const auto& f : list.items) got.insert(mult_vector(f, oracle_atoms));
          REQUIRE(got == expect);
          REQUIRE(got.size() == list.items.size());
        }
      }
    }
  }
}

TEST_CASE("atomicity of single elements") {
  const auto quasi = parse("quasi");
  const auto four = is_atomic_element(quasi, GroupElement::rational(4));
  REQUIRE(four.status == Atomicity::Yes);
  REQUIRE(four.witness);
  CHECK(four.witness->consistent());

  const auto cone = parse("lexcone:Z2:positive");
  CHECK(is_atomic_element(cone, GroupElement::lex(cone.group(), {1, 0})).status == Atomicity::No);
  const auto zero = is_atomic_element(cone, GroupElement::zero(cone.group()));
  REQUIRE(zero.status == Atomicity::Yes);
  CHECK(zero.witness->length == 0);
}

TEST_CASE("probes") {
  const auto hfm = probe_property(parse("conductive:Z:a=3"), ProbeProperty::HFM, ProbeBound::parse("60"));
  CHECK(hfm.status == ProbeStatus::Refuted);
  REQUIRE(hfm.counterexample);
  CHECK(*hfm.counterexample == z(9));
  REQUIRE(hfm.evidence.size() == 2);
  CHECK(hfm.evidence[0].length != hfm.evidence[1].length);

  CHECK(probe_property(parse("conductive:Z:a=2"), ProbeProperty::LFM, ProbeBound::parse("60")).status ==
        ProbeStatus::Consistent);
  CHECK(probe_property(parse("conductive:Z:a=1"), ProbeProperty::UFM, ProbeBound::parse("60")).status ==
        ProbeStatus::Consistent);
  CHECK(probe_property(parse("lexcone:Z2:positive"), ProbeProperty::ATM, ProbeBound::parse("(2,3)")).status ==
        ProbeStatus::Refuted);
  CHECK_THROWS_AS(probe_property(parse("mq:2/3"), ProbeProperty::BFM, ProbeBound::parse("2")), Unsupported);
  CHECK_THROWS_AS(ProbeBound::parse("(4,"), ParseError);
}

TEST_CASE("members below a bound") {
  const auto below = members_below(parse("nm:3,5"), ProbeBound::parse("12"));
  CHECK(as_longs(below) == std::vector<long>{0, 3, 5, 6, 8, 9, 10, 11, 12});
  const auto box = members_below(parse("lexcone:Z2:open"), ProbeBound::parse("(1,2)"));
  CHECK(box.size() == 6);
}

TEST_CASE("length functions") {
  const auto m = parse("conductive:Z2:a=(1,0)");
  std::vector<GroupElement> samples;
  for (long x = 1; x <= 4; ++x) {
    for (long y = x == 1 ? 0 : -5; y <= 5; ++y) samples.push_back(GroupElement::lex(m.group(), {Rational(x), Rational(y)}));
  }
  samples.push_back(GroupElement::zero(m.group()));
  const auto first = [](const GroupElement& g) { return Integer(g.as_lex().coords[0]); };
  CHECK(length_function_check(m, first, samples));
  CHECK_FALSE(length_function_check(m, [](const GroupElement&) { return Integer(0); }, samples));
  CHECK_FALSE(length_function_check(parse("nm:3,5"),
                                    [](const GroupElement& g) { return Integer(floor_of(g.as_rational() / 5)); },
                                    {z(0), z(3), z(5), z(8)}));
}
