#include "posmon/gallery.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "posmon/error.hpp"
#include "posmon/witness.hpp"

namespace posmon {

nlohmann::json Check::to_json() const {
  nlohmann::json j = {{"name", name}, {"passed", passed}};
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

namespace {

Check check(std::string name, bool passed, std::string detail = {}) {
  return Check{std::move(name), passed, std::move(detail)};
}

GroupElement el(const MonoidDescriptor& m, std::string_view text) { return GroupElement::parse(m.group(), text); }

std::string join(const std::vector<GroupElement>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ", ";
    out += x.to_string();
  }
  return out;
}

// Every window member b has b/2 in the monoid, and no atom survives.
std::vector<Check> halving_checks(const MonoidDescriptor& m) {
  bool halves = true;
  std::size_t n = 0;
  for (const auto& b : generators(m, 4)->gens) {
    ++n;
    halves = halves && contains(m, scale(Rational(1, 2), b)).in();
  }
  const auto set = atoms(m, 4);
  return {check("b/2 is a member for every window member b", halves, std::to_string(n) + " members"),
          check("no atoms", set.atoms.empty() && set.complete)};
}

// Classifier verdict vs probe at bound 30a on the probe-decidable properties.
std::vector<Check> conductive_probe_checks(const MonoidDescriptor& m) {
  const auto report = classify_conductive(m.a());
  ProbeBound bound;
  bound.scalar = Rational(30 * m.a().as_rational());
  std::vector<Check> out;
  const std::pair<Property, ProbeProperty> pairs[] = {{Property::ATM, ProbeProperty::ATM}, {Property::BFM, ProbeProperty::BFM},
                                                      {Property::FFM, ProbeProperty::FFM}, {Property::HFM, ProbeProperty::HFM},
                                                      {Property::LFM, ProbeProperty::LFM}, {Property::UFM, ProbeProperty::UFM}};
  for (const auto& [prop, probe] : pairs) {
    const auto res = probe_property(m, probe, bound);
    const auto status = report.at(prop).status;
    bool agree = false;
    if (res.status == ProbeStatus::Refuted) agree = status == VerdictStatus::Refuted;
    if (res.status == ProbeStatus::Consistent) agree = status == VerdictStatus::Proved;
    if (res.status == ProbeStatus::Inconclusive) agree = status != VerdictStatus::Unknown;
    out.push_back(check("probe " + to_string(probe) + " at bound " + bound.to_string() + " agrees", agree,
                        to_string(res.status) + " vs " + to_string(status)));
  }
  return out;
}

std::vector<GalleryEntry> build() {
  using P = Property;
  using S = VerdictStatus;
  std::vector<GalleryEntry> g;

  g.push_back({"antimatter-QxQ", "lexcone:Q2:open", "open half-plane of QxQ: antimatter",
               {{P::ATM, S::Refuted}, {P::QAM, S::Refuted}},
               "halving: b/2 is a member for every window member",
               halving_checks});

  g.push_back({"nonatomic-ZxZ", "lexcone:Z2:positive", "nonnegative cone of ZxZ: one atom, not atomic",
               {{P::ATM, S::Refuted}},
               "atoms are exactly {(0,1)}; (1,0) has no factorization",
               [](const MonoidDescriptor& m) {
                 const auto set = atoms(m);
                 const auto at = is_atomic_element(m, el(m, "(1,0)"));
                 return std::vector<Check>{
                     check("atoms = {(0,1)}", set.complete && set.atoms == std::vector<GroupElement>{el(m, "(0,1)")},
                           join(set.atoms)),
                     check("(1,0) is not atomic", at.status == Atomicity::No)};
               }});

  g.push_back({"nonatomic-ZxZ-second-priority", "lexcone:ZxZ@prio=1:positive",
               "nonnegative cone of Z^2 ordered by the second coordinate first",
               {{P::ATM, S::Refuted}},
               "atoms are exactly {(1,0)}; (0,1) has no factorization",
               [](const MonoidDescriptor& m) {
                 const auto set = atoms(m);
                 const auto at = is_atomic_element(m, el(m, "(0,1)"));
                 return std::vector<Check>{
                     check("atoms = {(1,0)}", set.complete && set.atoms == std::vector<GroupElement>{el(m, "(1,0)")},
                           join(set.atoms)),
                     check("(0,1) is not atomic", at.status == Atomicity::No)};
               }});

  g.push_back({"alpha-beta", "alphabeta:2/3", "M_{alpha,beta} with alpha = sqrt2, beta = sqrt3: atomic, not strongly atomic",
               {{P::ATM, S::Proved}, {P::SAM, S::Refuted}},
               "window atoms re-verified; alpha - d and beta - d share the divisor q^k",
               [](const MonoidDescriptor& m) {
                 const auto set = atoms(m, 4);
                 bool all = true;
                 std::size_t found = 0;
                 for (const auto& id : verify_alpha_beta_identities(m.q(), 6)) {
                   all = all && id.verified;
                   found += id.k ? 1 : 0;
                 }
                 return std::vector<Check>{
                     check("window atoms re-verified", !set.atoms.empty(), std::to_string(set.atoms.size()) + " atoms"),
                     check("common-divisor identities replay", all && found == 6)};
               }});

  g.push_back({"mq-chain", "mq:2/3", "M_q, q = 2/3: strongly atomic, ACCP fails",
               {{P::SAM, S::Proved}, {P::ACCP, S::Refuted}, {P::BFM, S::Refuted}},
               "ascending chain of principal ideals to depth 20 replays; atoms q^n",
               [](const MonoidDescriptor& m) {
                 const auto chain = mq_chain(m.q(), 20);
                 const auto set = atoms(m, 10);
                 bool powers = set.atoms.size() == 11;
                 for (std::size_t n = 0; powers && n <= 10; ++n) {
                   powers = set.atoms[10 - n].as_rational() == pow(m.q(), static_cast<unsigned>(n));
                 }
                 return std::vector<Check>{check("chain replays to depth 20", replay_chain(chain).ok),
                                           check("atoms = {q^n : n <= 10}", powers)};
               }});

  g.push_back({"mq-times-N0", "product:(mq:2/3)*(N0)", "M_q x N0: strongly atomic, ACCP fails",
               {{P::SAM, S::Proved}, {P::ACCP, S::Refuted}},
               "the chain of M_q embeds in the first factor",
               [](const MonoidDescriptor& m) {
                 const auto chain = mq_chain(Rational(2, 3), 10);
                 bool ok = true;
                 for (const auto& a : chain.differences) {
                   ok = ok && contains(m, GroupElement::lex(m.group(), {a, Rational(0)})).in();
                 }
                 return std::vector<Check>{check("chain differences are members of the product", ok)};
               }});

  g.push_back({"m0", "m0", "M_0 = <1/p>: ACCP holds, not BFM",
               {{P::ACCP, S::Proved}, {P::BFM, S::Refuted}},
               "atoms 1/p for p <= 97 re-verified; L(1) over the primes <= 47 is those primes",
               [](const MonoidDescriptor& m) {
                 const auto set = atoms(m, 25);
                 bool ok = set.atoms.size() == 25;
                 const auto primes = first_primes(25);
                 for (std::size_t i = 0; ok && i < 25; ++i) {
                   ok = set.atoms[24 - i].as_rational() == Rational(1, static_cast<unsigned long>(primes[i]));
                 }
                 const auto lengths = length_set(m, GroupElement::rational(1), 15);
                 std::set<Integer> expect;
                 for (auto p : primes_up_to(47)) expect.insert(Integer(static_cast<unsigned long>(p)));
                 return std::vector<Check>{check("atoms = {1/p : p <= 97}", ok),
                                           check("L(1) = primes <= 47", lengths.lengths == expect)};
               }});

  g.push_back({"conductive-Z2-upper", "conductive:Z2:a=(1,0)", "conductive monoid of lex ZxZ, a in the upper class",
               {{P::BFM, S::Proved}, {P::FFM, S::Refuted}},
               "atoms of the window are exactly the window part of [a, 2a)",
               [](const MonoidDescriptor& m) {
                 const auto set = atoms(m);
                 std::vector<GroupElement> expect;
                 for (const auto& x : generators(m)->gens) {
                   if (x >= m.a() && x < m.a() + m.a()) expect.push_back(x);
                 }
                 return std::vector<Check>{check("window atoms = [a, 2a) in the window", set.atoms == expect,
                                                 std::to_string(set.atoms.size()) + " atoms")};
               }});

  g.push_back({"conductive-Z2-lower", "conductive:Z2:a=(0,1)", "conductive monoid of lex ZxZ, a in the lower class",
               {{P::ATM, S::Refuted}, {P::QAM, S::Refuted}},
               "the only atom is (0,1); (1,0) has no factorization",
               [](const MonoidDescriptor& m) {
                 const auto at = is_atomic_element(m, el(m, "(1,0)"));
                 return std::vector<Check>{check("(1,0) is not atomic", at.status == Atomicity::No)};
               }});

  g.push_back({"bfm-not-ffm", "conductive:Z2:a=(2,3)", "conductive monoid of lex ZxZ: BFM, not FFM",
               {{P::BFM, S::Proved}, {P::FFM, S::Refuted}},
               "3a = (a + y e2) + (2a - y e2) gives at least 10 factorizations in the window",
               [](const MonoidDescriptor& m) {
                 const auto list = factorizations(m, m.a() + m.a() + m.a());
                 return std::vector<Check>{check(">= 10 factorizations of 3a", list.items.size() >= 10,
                                                 std::to_string(list.items.size()) + " found")};
               }});

  g.push_back({"nearly-not-atomic", "nearly-alpha", "<q, (alpha + q)/phi(q)>: nearly atomic, not atomic",
               {{P::NAM, S::Proved}, {P::ATM, S::Refuted}},
               "alpha + r decomposes into atoms; rationals have no factorization",
               [](const MonoidDescriptor&) {
                 const auto rep = verify_nearly_atomic(8);
                 return std::vector<Check>{check("decompositions and obstructions verify", rep.ok,
                                                 std::to_string(rep.decompositions.size()) + " decompositions")};
               }});

  g.push_back({"almost-not-nearly", "almost", "M_0 u G_{>=1}: almost atomic, not nearly atomic",
               {{P::AAM, S::Proved}, {P::NAM, S::Refuted}},
               "refuting set for q = 1/3 certified; atomic companions for sample members",
               [](const MonoidDescriptor& m) {
                 const auto ref = refute_nearly_witness(Rational(1, 3));
                 const auto w = almost_witness(Rational(211, 210));
                 const auto set = atoms(m, 10);
                 return std::vector<Check>{
                     check("refuting set certified and replayed", ref.certified && replay_refutation(ref).ok,
                           "primes " + std::to_string(ref.first_prime) + ".." + std::to_string(ref.last_prime)),
                     check("atomic companion for 211/210", w.evidence.consistent() && w.companion.as_rational() == 1),
                     check("atoms of the window are 1/p", set.atoms.size() == 10)};
               }});

  g.push_back({"quasi-not-almost", "quasi", "<Z[1/2]_{>=0} u Z[1/3]_{>=4/3}>: quasi-atomic, not almost atomic",
               {{P::QAM, S::Proved}, {P::AAM, S::Refuted}},
               "b = (4d(q) - 1)q with b + q = 3n(q) * 4/3; 1/2 outside Z[1/3]",
               [](const MonoidDescriptor& m) {
                 bool ok = true;
                 for (const auto& q : {Rational(1, 2), Rational(5, 4), Rational(2), Rational(13, 9), Rational(29, 9)}) {
                   ok = ok && replay_quasi(verify_quasi_witness(q)).ok;
                 }
                 const GroupElement half = GroupElement::rational(Rational(1, 2));
                 return std::vector<Check>{
                     check("quasi witnesses replay", ok),
                     check("1/2 is a member outside the atomic group",
                           contains(m, half).in() && !gp_membership(m, half, GroupScope::AtomicSubmonoid)),
                     check("4/3 is an atom", verify_atom(m, GroupElement::rational(Rational(4, 3))))};
               }});

  g.push_back({"hfm-NxZ", "lexcone:Z2:open", "{0} u (N x Z): HFM, not FFM",
               {{P::HFM, S::Proved}, {P::FFM, S::Refuted}},
               "probe HFM over the box (4,20); at least 10 factorizations of (2,0)",
               [](const MonoidDescriptor& m) {
                 const auto res = probe_property(m, ProbeProperty::HFM, ProbeBound::parse("(4,20)"));
                 const auto list = factorizations(m, el(m, "(2,0)"), 25);
                 return std::vector<Check>{check("HFM probe consistent", res.status == ProbeStatus::Consistent,
                                                 std::to_string(res.members_checked) + " members"),
                                           check(">= 10 factorizations of (2,0)", list.items.size() >= 10,
                                                 std::to_string(list.items.size()) + " found")};
               }});

  g.push_back({"conductive-Z-1", "conductive:Z:a=1", "M_1 = N0: UFM",
               {{P::UFM, S::Proved}},
               "probes at bound 30a agree",
               conductive_probe_checks});
  g.push_back({"conductive-Z-2", "conductive:Z:a=2", "M_2: LFM, not HFM",
               {{P::LFM, S::Proved}, {P::HFM, S::Refuted}},
               "probes at bound 30a agree",
               conductive_probe_checks});
  g.push_back({"conductive-Z-3", "conductive:Z:a=3", "M_3: FFM, not LFM",
               {{P::FFM, S::Proved}, {P::LFM, S::Refuted}},
               "probes at bound 30a agree",
               conductive_probe_checks});

  g.push_back({"numerical-3-5", "nm:3,5", "<3,5>: FFM, not HFM",
               {{P::FFM, S::Proved}, {P::HFM, S::Refuted}},
               "15 = 5*3 = 3*5",
               [](const MonoidDescriptor& m) {
                 const auto list = factorizations(m, GroupElement::integer(15));
                 return std::vector<Check>{check("Z(15) has two factorizations of lengths 3 and 5",
                                                 list.complete && list.items.size() == 2 &&
                                                     length_set_of(list).lengths == std::set<Integer>{3, 5})};
               }});

  g.push_back({"numerical-3-4-5", "nm:3,4,5", "<3,4,5>: not HFM",
               {{P::HFM, S::Refuted}},
               "probe HFM at bound 60 refutes with 9 = 3+3+3 = 4+5",
               [](const MonoidDescriptor& m) {
                 const auto res = probe_property(m, ProbeProperty::HFM, ProbeBound::parse("60"));
                 return std::vector<Check>{check("counterexample 9", res.status == ProbeStatus::Refuted && res.counterexample &&
                                                                         *res.counterexample == GroupElement::integer(9))};
               }});

  g.push_back({"localized-2", "localized:2", "Z[1/2]_{>=0}: antimatter",
               {{P::ATM, S::Refuted}},
               "halving: b/2 is a member for every window member",
               halving_checks});
  return g;
}

}  // namespace

const std::vector<GalleryEntry>& gallery_list() {
  static const std::vector<GalleryEntry> entries = build();
  return entries;
}

const GalleryEntry& gallery_entry(std::string_view id) {
  for (const auto& e : gallery_list()) {
    if (e.id == id) return e;
  }
  throw ParseError("unknown gallery entry '" + std::string(id) + "'");
}

bool EntryResult::passed() const {
  if (!error.empty() || !expected_ok || !chain_ok) return false;
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

nlohmann::json EntryResult::to_json() const {
  auto cs = nlohmann::json::array();
  for (const auto& c : checks) cs.push_back(c.to_json());
  nlohmann::json j = {{"id", id},          {"passed", passed()},  {"expected_ok", expected_ok},
                      {"chain_ok", chain_ok}, {"checks", cs},     {"report", report.to_json()}};
  if (!error.empty()) j["error"] = error;
  return j;
}

EntryResult run_entry(const GalleryEntry& e) {
  EntryResult r;
  r.id = e.id;
  try {
    const auto m = MonoidDescriptor::parse(e.instance);
    r.report = classify_known(m);
    r.chain_ok = r.report.chain_ok && check_chain_consistency(r.report);
    r.expected_ok = true;
    for (const auto& [prop, status] : e.expected) {
      const auto got = r.report.at(prop).status;
      const bool ok = got == status;
      r.expected_ok = r.expected_ok && ok;
      r.checks.push_back(check("expected " + to_string(prop) + " " + to_string(status), ok, "got " + to_string(got)));
    }
    for (auto& c : e.run_checks(m)) r.checks.push_back(std::move(c));
  } catch (const std::exception& ex) {
    r.error = ex.what();
  }
  return r;
}

std::vector<EntryResult> run_gallery(unsigned jobs) {
  const auto& entries = gallery_list();
  std::vector<EntryResult> results(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) results[i] = run_entry(entries[i]);
  };
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(entries.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace posmon
