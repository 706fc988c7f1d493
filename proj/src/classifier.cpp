#include "posmon/classifier.hpp"

#include <algorithm>

#include "posmon/error.hpp"
#include "posmon/witness.hpp"

namespace posmon {

std::string to_string(Property p) {
  switch (p) {
    case Property::UFM:
      return "UFM";
    case Property::HFM:
      return "HFM";
    case Property::LFM:
      return "LFM";
    case Property::FFM:
      return "FFM";
    case Property::BFM:
      return "BFM";
    case Property::ACCP:
      return "ACCP";
    case Property::SAM:
      return "SAM";
    case Property::ATM:
      return "ATM";
    case Property::NAM:
      return "NAM";
    case Property::AAM:
      return "AAM";
    case Property::QAM:
      return "QAM";
  }
  return {};
}

Property parse_property(std::string_view text) {
  for (auto p : kAllProperties) {
    if (to_string(p) == text) return p;
  }
  throw ParseError("unknown property '" + std::string(text) + "'");
}

const std::vector<std::pair<Property, Property>>& implications() {
  using P = Property;
  static const std::vector<std::pair<P, P>> edges = {
      {P::UFM, P::LFM}, {P::LFM, P::FFM}, {P::FFM, P::BFM}, {P::BFM, P::ACCP}, {P::ACCP, P::SAM}, {P::SAM, P::ATM},
      {P::ATM, P::NAM}, {P::NAM, P::AAM}, {P::AAM, P::QAM}, {P::UFM, P::HFM},
      // every length set is a singleton, hence bounded
      {P::HFM, P::BFM}};
  return edges;
}

std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Proved:
      return "Proved";
    case VerdictStatus::Refuted:
      return "Refuted";
    case VerdictStatus::ProbeConsistent:
      return "ProbeConsistent";
    case VerdictStatus::Unknown:
      return "Unknown";
  }
  return {};
}

nlohmann::json Verdict::to_json() const {
  nlohmann::json j = {{"status", posmon::to_string(status)}, {"source", source}};
  if (!bound.empty()) j["bound"] = bound;
  if (witness) j["witness"] = *witness;
  return j;
}

PropertyReport::PropertyReport() {
  for (auto p : kAllProperties) verdicts[p] = Verdict{};
}

nlohmann::json PropertyReport::to_json() const {
  nlohmann::json v = nlohmann::json::object();
  for (auto p : kAllProperties) v[posmon::to_string(p)] = verdicts.at(p).to_json();
  nlohmann::json j = {{"instance", instance}, {"verdicts", v}, {"chain_ok", chain_ok}};
  if (!atoms.empty()) j["atoms"] = atoms;
  return j;
}

namespace {

bool decided(const Verdict& v) { return v.status == VerdictStatus::Proved || v.status == VerdictStatus::Refuted; }

Verdict proved(std::string source, std::optional<nlohmann::json> witness = std::nullopt) {
  return Verdict{VerdictStatus::Proved, std::move(source), {}, std::move(witness)};
}

Verdict refuted(std::string source, std::optional<nlohmann::json> witness = std::nullopt) {
  return Verdict{VerdictStatus::Refuted, std::move(source), {}, std::move(witness)};
}

std::vector<std::pair<Property, Property>> edges_for(ReportScope scope) {
  using P = Property;
  auto edges = implications();
  if (scope != ReportScope::General) edges.emplace_back(P::HFM, P::UFM);
  if (scope == ReportScope::Conductive) edges.emplace_back(P::QAM, P::BFM);
  return edges;
}

}  // namespace

bool assert_verdict(PropertyReport& r, Property p, Verdict v) {
  Verdict& cur = r.verdicts.at(p);
  if (decided(cur)) {
    if (decided(v) && v.status != cur.status) {
      r.chain_ok = false;
      return false;
    }
    return true;
  }
  if (cur.status == VerdictStatus::ProbeConsistent && v.status == VerdictStatus::Refuted) {
    r.chain_ok = false;
    cur = std::move(v);
    return false;
  }
  if (v.status != VerdictStatus::Unknown) cur = std::move(v);
  return true;
}

void propagate(PropertyReport& r) {
  const auto edges = edges_for(r.scope);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [strong, weak] : edges) {
      const auto s = r.verdicts.at(strong).status;
      const auto w = r.verdicts.at(weak).status;
      if (s == VerdictStatus::Proved && w != VerdictStatus::Proved && w != VerdictStatus::Refuted) {
        r.verdicts[weak] = proved("implied");
        changed = true;
      }
      if (w == VerdictStatus::Refuted && s != VerdictStatus::Refuted && s != VerdictStatus::Proved) {
        r.verdicts[strong] = refuted("implied");
        changed = true;
      }
    }
  }
  r.chain_ok = r.chain_ok && check_chain_consistency(r);
}

bool check_chain_consistency(const PropertyReport& r) {
  // transitive closure over the edges: proved(s) and refuted(w) with s => w
  const auto edges = edges_for(r.scope);
  std::map<Property, std::vector<Property>> below;
  for (const auto& [s, w] : edges) below[s].push_back(w);
  for (auto start : kAllProperties) {
    if (r.at(start).status != VerdictStatus::Proved) continue;
    std::vector<Property> stack{start};
    std::vector<Property> seen{start};
    while (!stack.empty()) {
      const Property cur = stack.back();
      stack.pop_back();
      if (r.at(cur).status == VerdictStatus::Refuted) return false;
      for (auto next : below[cur]) {
        if (std::find(seen.begin(), seen.end(), next) == seen.end()) {
          seen.push_back(next);
          stack.push_back(next);
        }
      }
    }
  }
  return true;
}

// ------------------------------------------------------------- conductive

namespace {

nlohmann::json factorization_pair(const std::vector<GroupElement>& left, const std::vector<GroupElement>& right) {
  auto side = [](const std::vector<GroupElement>& terms) {
    auto arr = nlohmann::json::array();
    for (const auto& t : terms) arr.push_back(t.to_string());
    return arr;
  };
  GroupElement sum = left.front();
  for (std::size_t i = 1; i < left.size(); ++i) sum = sum + left[i];
  return {{"value", sum.to_string()}, {"factorizations", {side(left), side(right)}}};
}

// A positive e with factor * e < a, or nullopt when the group is too coarse.
std::optional<GroupElement> small_step(const GroupElement& a, const Integer& factor) {
  const GroupId& g = a.group();
  std::optional<GroupElement> e;
  if (g.kind() == GroupKind::Lex) {
    const std::size_t last = g.comparison_order().back();
    std::vector<Rational> c(g.rank(), Rational(0));
    c[last] = 1;
    e = GroupElement::lex(g, c);
    if (scale(factor, *e) < a) return e;
    if (!g.coord_is_rational(last)) return std::nullopt;
  } else if (g == GroupId::integers()) {
    e = GroupElement::integer(1);
    if (scale(factor, *e) < a) return e;
    return std::nullopt;
  }
  return scale(Rational(1, 1) / Rational(2 * factor), a);
}

bool is_generator_multiple(const GroupElement& a, int k) {
  const auto c = a.coordinates();
  return c.size() == 1 && c[0] == k;
}

}  // namespace

PropertyReport classify_conductive(const GroupElement& a, std::size_t depth) {
  if (!a.is_positive()) throw DomainError("conductive monoids need a > 0, got " + a.to_string());
  const auto m = MonoidDescriptor::conductive(a);
  const GroupId& g = a.group();
  PropertyReport r;
  r.instance = m.to_string();
  r.scope = ReportScope::Conductive;

  // BFM .. QAM together iff v(a) is the least Archimedean value
  const bool bottom = arch_valuation(a).level == 0;
  for (auto p : {Property::BFM, Property::ACCP, Property::SAM, Property::ATM, Property::NAM, Property::AAM,
                 Property::QAM}) {
    assert_verdict(r, p, bottom ? proved("conductive:bf-block") : refuted("conductive:bf-block"));
  }

  const bool cyclic = g.cyclic();
  assert_verdict(r, Property::FFM, cyclic ? proved("conductive:ff-cyclic") : refuted("conductive:ff-cyclic"));

  const bool lfm = cyclic && (is_generator_multiple(a, 1) || is_generator_multiple(a, 2));
  std::optional<nlohmann::json> lfm_witness;
  if (!lfm && bottom) {
    // a + (a + 2e) = (a + e) + (a + e), all four in [a, 2a)
    if (auto e = small_step(a, 2)) {
      lfm_witness = factorization_pair({a, a + *e + *e}, {a + *e, a + *e});
    }
  }
  assert_verdict(r, Property::LFM, lfm ? proved("conductive:lf") : refuted("conductive:lf", lfm_witness));

  const bool ufm = cyclic && is_generator_multiple(a, 1);
  std::optional<nlohmann::json> hfm_witness;
  if (!ufm && bottom) {
    // a + a + a = b + (3a - b) for b in (a, 2a)
    if (auto e = small_step(a, 1)) {
      const GroupElement b = a + *e;
      hfm_witness = factorization_pair({a, a, a}, {b, a + a + a - b});
    }
  }
  assert_verdict(r, Property::UFM, ufm ? proved("conductive:uf-hf") : refuted("conductive:uf-hf"));
  assert_verdict(r, Property::HFM, ufm ? proved("conductive:uf-hf") : refuted("conductive:uf-hf", hfm_witness));

  for (const auto& x : atoms(m, depth).atoms) r.atoms.push_back(element_short(x));
  propagate(r);
  return r;
}

// ------------------------------------------------------------ limit point

nlohmann::json LimitPointVerdict::to_json() const {
  nlohmann::json j = {{"applicable", applicable}, {"note", note}};
  j["infimum"] = infimum ? nlohmann::json(infimum->to_string()) : nlohmann::json(nullptr);
  return j;
}

LimitPointVerdict limit_point_bfm(const MonoidDescriptor& m) {
  if (!m.group().archimedean()) {
    throw Unsupported("0 as a limit point is only decided here for Archimedean groups; use classify_conductive or probes");
  }
  LimitPointVerdict v;
  switch (m.family()) {
    case Family::FiniteGenerated:
      v.applicable = true;
      v.infimum = m.generators().front();
      v.note = "least generator";
      break;
    case Family::Conductive:
      v.applicable = true;
      v.infimum = m.a();
      v.note = "every nonzero member is at least a";
      break;
    case Family::GeometricPuiseux:
      v.note = "q^n -> 0, so 0 is a limit point";
      break;
    case Family::PrimeReciprocal:
    case Family::UnionShift:
      v.note = "1/p -> 0, so 0 is a limit point";
      break;
    case Family::LocalizedNonnegative:
      v.note = "1/p^n -> 0, so 0 is a limit point";
      break;
    case Family::AlphaBeta:
      v.note = "q^n -> 0, so 0 is a limit point";
      break;
    case Family::NearlyAtomicAlpha:
      v.note = "contains all nonnegative rationals";
      break;
    default:
      throw Unsupported("no limit-point rule for " + m.to_string());
  }
  return v;
}

// ------------------------------------------------------------ known families

namespace {

void merge_probe(PropertyReport& r, const MonoidDescriptor& m, Property prop, ProbeProperty probe, const ProbeBound& bound,
                 std::size_t depth) {
  const auto res = probe_property(m, probe, bound, depth);
  Verdict v;
  v.bound = bound.to_string();
  v.source = "probe";
  switch (res.status) {
    case ProbeStatus::Refuted:
      v.status = VerdictStatus::Refuted;
      v.witness = res.to_json();
      break;
    case ProbeStatus::Consistent:
      v.status = VerdictStatus::ProbeConsistent;
      break;
    case ProbeStatus::Inconclusive:
      return;
  }
  assert_verdict(r, prop, std::move(v));
}

void classify_finite_generated(PropertyReport& r, const MonoidDescriptor& m, std::size_t depth) {
  const auto lp = limit_point_bfm(m);
  assert_verdict(r, Property::BFM, proved("limit-point", lp.to_json()));
  assert_verdict(r, Property::FFM, proved("finitely-generated"));
  const auto set = atoms(m, depth);
  if (set.atoms.size() == 1) {
    assert_verdict(r, Property::UFM, proved("single-atom"));
  } else {
    // k2 * a1 = k1 * a2 with a2 / a1 = k2 / k1 in lowest terms
    const Rational& a1 = set.atoms[0].as_rational();
    const Rational& a2 = set.atoms[1].as_rational();
    const Rational ratio = a2 / a1;
    const auto w = factorization_pair(std::vector<GroupElement>(ratio.get_num().get_ui(), set.atoms[0]),
                                      std::vector<GroupElement>(ratio.get_den().get_ui(), set.atoms[1]));
    assert_verdict(r, Property::HFM, refuted("two-atoms", w));
    const Rational top = set.atoms.back().as_rational();
    ProbeBound b;
    b.scalar = 30 * top;
    merge_probe(r, m, Property::LFM, ProbeProperty::LFM, b, depth);
  }
}

void classify_lex_cone(PropertyReport& r, const MonoidDescriptor& m) {
  const GroupId& g = m.group();
  const auto order = g.comparison_order();
  if (m.rule() == ConeRule::OpenHalfSpace) {
    if (g.coord_is_rational(order.front())) {
      // b/2 is a member for every member b: no atoms at all
      assert_verdict(r, Property::QAM, refuted("cone:antimatter"));
      return;
    }
    if (g.rank() == 1) {
      assert_verdict(r, Property::UFM, proved("cone:rank-one"));
      return;
    }
    // the lead coordinate is a length function and (2,0) = (1,n) + (1,-n)
    assert_verdict(r, Property::HFM, proved("cone:lead-coordinate-length"));
    assert_verdict(r, Property::FFM, refuted("cone:lead-coordinate-length"));
    return;
  }
  if (g.coord_is_rational(order.back())) {
    assert_verdict(r, Property::QAM, refuted("cone:antimatter"));
    return;
  }
  if (g.rank() == 1) {
    assert_verdict(r, Property::UFM, proved("cone:rank-one"));
    return;
  }
  // the only atom lies in the least class; nothing above it is atomic
  assert_verdict(r, Property::QAM, refuted("cone:atoms-in-least-class"));
}

void classify_product(PropertyReport& r, const MonoidDescriptor& m, std::size_t depth) {
  const auto left = classify_known(m.left(), depth);
  const auto right = classify_known(m.right(), depth);
  for (auto p : {Property::ATM, Property::SAM, Property::ACCP, Property::BFM, Property::FFM, Property::UFM, Property::HFM}) {
    const auto l = left.at(p).status;
    const auto rr = right.at(p).status;
    if (l == VerdictStatus::Refuted || rr == VerdictStatus::Refuted) {
      assert_verdict(r, p, refuted("product:factor"));
    } else if (l == VerdictStatus::Proved && rr == VerdictStatus::Proved) {
      assert_verdict(r, p, proved("product:factors"));
    }
  }
}

}  // namespace

PropertyReport classify_known(const MonoidDescriptor& m, std::size_t depth) {
  if (m.family() == Family::Conductive) {
    auto r = classify_conductive(m.a(), depth);
    r.instance = m.to_string();
    return r;
  }
  PropertyReport r;
  r.instance = m.to_string();
  if (m.group().kind() == GroupKind::Rational) r.scope = ReportScope::RankOne;

  switch (m.family()) {
    case Family::FiniteGenerated:
      classify_finite_generated(r, m, depth);
      break;
    case Family::GeometricPuiseux: {
      assert_verdict(r, Property::SAM, proved("asserted:mq-strongly-atomic"));
      assert_verdict(r, Property::ACCP, refuted("certificate:chain", mq_chain(m.q(), 5).to_json()));
      break;
    }
    case Family::PrimeReciprocal: {
      assert_verdict(r, Property::ACCP, proved("asserted:m0-accp"));
      const auto lengths = length_set(m, GroupElement::rational(1), 15);
      assert_verdict(r, Property::BFM, refuted("lengths-of-1-contain-primes", lengths.to_json()));
      break;
    }
    case Family::LocalizedNonnegative:
      assert_verdict(r, Property::QAM, refuted("localized:antimatter"));
      break;
    case Family::LexCone:
      classify_lex_cone(r, m);
      break;
    case Family::Product:
      classify_product(r, m, depth);
      break;
    case Family::UnionShift:
      if (m.tail() == TailRule::DifferenceGroupAtLeast) {
        assert_verdict(r, Property::AAM, proved("asserted:almost-atomic"));
        assert_verdict(r, Property::NAM, refuted("certificate:refuting-set", refute_nearly_witness(Rational(1, 3)).to_json()));
      } else {
        assert_verdict(r, Property::QAM, proved("asserted:quasi-atomic", verify_quasi_witness(Rational(1, 2)).to_json()));
        const GroupElement half = GroupElement::rational(Rational(1, 2));
        const nlohmann::json gp = {{"element", "1/2"},
                                   {"in_monoid", contains(m, half).in()},
                                   {"in_atomic_group", gp_membership(m, half, GroupScope::AtomicSubmonoid)}};
        assert_verdict(r, Property::AAM, refuted("asserted:half-outside-atomic-group", gp));
      }
      break;
    case Family::AlphaBeta:
      assert_verdict(r, Property::ATM, proved("asserted:alpha-beta-atomic"));
      assert_verdict(r, Property::SAM, refuted("asserted:alpha-beta-not-strongly-atomic"));
      break;
    case Family::NearlyAtomicAlpha:
      assert_verdict(r, Property::NAM, proved("asserted:nearly-atomic"));
      assert_verdict(r, Property::ATM, refuted("asserted:rationals-not-atomic"));
      break;
    case Family::Conductive:
      break;
  }
  propagate(r);
  return r;
}

}  // namespace posmon
