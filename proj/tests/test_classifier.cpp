#include <doctest.h>

#include "posmon/classifier.hpp"
#include "posmon/error.hpp"

using namespace posmon;

namespace {

using S = VerdictStatus;
using P = Property;

GroupElement z(long n) { return GroupElement::integer(n); }

// Expected conductive verdicts over Z, straight from the characterization.
std::map<P, bool> expected_over_z(long a) {
  std::map<P, bool> e;
  for (auto p : kAllProperties) e[p] = true;
  e[P::UFM] = e[P::HFM] = a == 1;
  e[P::LFM] = a <= 2;
  return e;
}

PropertyReport blank() {
  PropertyReport r;
  r.scope = ReportScope::General;
  return r;
}

}  // namespace

TEST_CASE("conductive classification over Z") {
  for (long a = 1; a <= 8; ++a) {
    const auto r = classify_conductive(z(a));
    CHECK(check_chain_consistency(r));
    for (const auto& [p, holds] : expected_over_z(a)) {
      INFO("a = " << a << ", " << to_string(p));
      CHECK(r.at(p).status == (holds ? S::Proved : S::Refuted));
    }
  }
  CHECK_THROWS_AS(classify_conductive(z(0)), DomainError);
}

TEST_CASE("conductive classifier agrees with probes at 30a") {
  const std::pair<P, ProbeProperty> pairs[] = {{P::ATM, ProbeProperty::ATM}, {P::BFM, ProbeProperty::BFM},
                                               {P::FFM, ProbeProperty::FFM}, {P::HFM, ProbeProperty::HFM},
                                               {P::LFM, ProbeProperty::LFM}, {P::UFM, ProbeProperty::UFM}};
  for (long a = 1; a <= 8; ++a) {
    const auto m = MonoidDescriptor::conductive(z(a));
    const auto r = classify_conductive(z(a));
    ProbeBound bound;
    bound.scalar = Rational(30 * a);
    for (const auto& [p, probe] : pairs) {
      const auto res = probe_property(m, probe, bound);
      INFO("a = " << a << ", " << to_string(probe));
      // Over Z every probe is decidable: Consistent means Proved.
      CHECK(res.status != ProbeStatus::Inconclusive);
      CHECK((res.status == ProbeStatus::Refuted) == (r.at(p).status == S::Refuted));
    }
  }
}

TEST_CASE("conductive lex examples") {
  const GroupId g = GroupId::lex_integers(2);
  const auto lower = classify_conductive(GroupElement::lex(g, {0, 1}));
  for (auto p : kAllProperties) CHECK(lower.at(p).status == S::Refuted);

  const auto upper = classify_conductive(GroupElement::lex(g, {1, 0}));
  CHECK(upper.at(P::BFM).status == S::Proved);
  CHECK(upper.at(P::FFM).status == S::Refuted);
  CHECK(check_chain_consistency(upper));
}

TEST_CASE("lex BFM verdict follows the leading coordinate") {
  for (std::size_t k = 1; k <= 3; ++k) {
    for (std::size_t prio = 0; prio < k; ++prio) {
      const GroupId g = GroupId::lex_integers(k, prio);
      std::vector<long> c(k, -3);
      while (true) {
        std::vector<Rational> coords(c.begin(), c.end());
        const auto a = GroupElement::lex(g, coords);
        if (a.is_positive()) {
          const auto r = classify_conductive(a, 4);
          REQUIRE(check_chain_consistency(r));
          REQUIRE((r.at(P::BFM).status == S::Proved) == (c[prio] != 0));
        }
        std::size_t i = 0;
        while (i < k && ++c[i] > 3) c[i++] = -3;
        if (i == k) break;
      }
    }
  }
}

TEST_CASE("chain consistency rejects inversions") {
  auto r = blank();
  r.verdicts[P::UFM] = Verdict{S::Proved, "test", {}, {}};
  r.verdicts[P::BFM] = Verdict{S::Refuted, "test", {}, {}};
  CHECK_FALSE(check_chain_consistency(r));

  auto c = blank();
  c.scope = ReportScope::Conductive;
  c.verdicts[P::BFM] = Verdict{S::Proved, "test", {}, {}};
  c.verdicts[P::QAM] = Verdict{S::Refuted, "test", {}, {}};
  CHECK_FALSE(check_chain_consistency(c));

  auto ok = blank();
  ok.verdicts[P::ACCP] = Verdict{S::Proved, "test", {}, {}};
  ok.verdicts[P::BFM] = Verdict{S::Refuted, "test", {}, {}};
  CHECK(check_chain_consistency(ok));
}

TEST_CASE("propagation follows the implications") {
  auto r = blank();
  assert_verdict(r, P::FFM, Verdict{S::Proved, "test", {}, {}});
  assert_verdict(r, P::LFM, Verdict{S::Refuted, "test", {}, {}});
  propagate(r);
  CHECK(check_chain_consistency(r));
  CHECK(r.at(P::BFM).status == S::Proved);
  CHECK(r.at(P::QAM).status == S::Proved);
  CHECK(r.at(P::UFM).status == S::Refuted);
  CHECK(r.at(P::UFM).source == "implied");
  CHECK(r.at(P::HFM).status == S::Unknown);

  auto clash = blank();
  assert_verdict(clash, P::ATM, Verdict{S::Proved, "test", {}, {}});
  CHECK_FALSE(assert_verdict(clash, P::ATM, Verdict{S::Refuted, "test", {}, {}}));
}

TEST_CASE("limit points") {
  const auto fg = limit_point_bfm(MonoidDescriptor::parse("nm:3,5"));
  CHECK(fg.applicable);
  REQUIRE(fg.infimum);
  CHECK(*fg.infimum == z(3));
  CHECK_FALSE(limit_point_bfm(MonoidDescriptor::parse("mq:2/3")).applicable);
  CHECK_FALSE(limit_point_bfm(MonoidDescriptor::parse("m0")).applicable);
  CHECK_THROWS_AS(limit_point_bfm(MonoidDescriptor::parse("conductive:Z2:a=(1,0)")), Unsupported);
}

TEST_CASE("known instances") {
  const auto check = [](std::string_view inst, std::vector<std::pair<P, S>> expected) {
    const auto r = classify_known(MonoidDescriptor::parse(inst));
    INFO(inst);
    CHECK(r.chain_ok);
    CHECK(check_chain_consistency(r));
    for (const auto& [p, s] : expected) CHECK(r.at(p).status == s);
    return r;
  };
  const auto mq = check("mq:2/3", {{P::SAM, S::Proved}, {P::ACCP, S::Refuted}, {P::BFM, S::Refuted}});
  CHECK(mq.at(P::ACCP).witness);
  CHECK(mq.at(P::BFM).source == "implied");
  check("m0", {{P::ACCP, S::Proved}, {P::BFM, S::Refuted}});
  check("product:(mq:2/3)*(N0)", {{P::SAM, S::Proved}, {P::ACCP, S::Refuted}});
  check("nm:3,5", {{P::FFM, S::Proved}, {P::HFM, S::Refuted}});
  check("nm:7", {{P::UFM, S::Proved}});
  check("lexcone:Z2:open", {{P::HFM, S::Proved}, {P::FFM, S::Refuted}});
  check("lexcone:Q2:open", {{P::QAM, S::Refuted}});
  check("almost", {{P::AAM, S::Proved}, {P::NAM, S::Refuted}});
  check("quasi", {{P::QAM, S::Proved}, {P::AAM, S::Refuted}});
  check("alphabeta:2/3", {{P::ATM, S::Proved}, {P::SAM, S::Refuted}});
  check("nearly-alpha", {{P::NAM, S::Proved}, {P::ATM, S::Refuted}});
}

TEST_CASE("report JSON shape") {
  const auto j = classify_known(MonoidDescriptor::parse("conductive:Z:a=2")).to_json();
  CHECK(j.at("instance") == "conductive:Z:a=2");
  CHECK(j.at("chain_ok") == true);
  CHECK(j.at("verdicts").size() == kAllProperties.size());
  CHECK(j.at("verdicts").at("LFM").at("status") == "Proved");
}
