#include "posmon/witness.hpp"

#include <algorithm>
#include <map>

#include "posmon/error.hpp"
#include "posmon/knapsack.hpp"

namespace posmon {

namespace {

std::string str(const Rational& q) { return format_rational(q); }

Rational rat(const nlohmann::json& j) { return parse_rational(j.get<std::string>()); }

nlohmann::json rationals_json(const std::vector<Rational>& v) {
  auto arr = nlohmann::json::array();
  for (const auto& x : v) arr.push_back(str(x));
  return arr;
}

std::vector<Rational> rationals_from(const nlohmann::json& j) {
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(rat(x));
  return out;
}

template <class F>
auto parse_json(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed ") + what + " json: " + e.what());
  }
}

GroupElement q_elem(const Rational& x) { return GroupElement::rational(x); }

void check_geometric_parameter(const Rational& q) {
  if (q <= 0 || q >= 1) throw DomainError("the chain needs 0 < q < 1, got " + str(q));
  if (q.get_num() < 2) throw DomainError("the chain needs n(q) >= 2 (q^-1 not an integer), got " + str(q));
}

// a_n = (d - n) q^{n-1}, 1-based.
Rational chain_difference(const Rational& q, std::size_t n) {
  return Rational(q.get_den() - q.get_num()) * pow(q, static_cast<unsigned>(n - 1));
}

ExclusionTranscript exclude(std::vector<Rational> items, const Rational& target) {
  std::sort(items.begin(), items.end(), std::greater<>());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  ExclusionTranscript t;
  t.items = items;
  t.target = target;
  std::vector<GroupElement> elems;
  for (const auto& x : items) {
    elems.push_back(q_elem(x));
    t.bounds.push_back(floor_of(target / x));
  }
  const auto result = solve_knapsack(elems, q_elem(target));
  t.nodes = result.nodes;
  if (!result.solutions.empty()) t.nodes = 0;  // marks "not excluded"
  return t;
}

bool excluded(const ExclusionTranscript& t) { return t.nodes != 0; }

}  // namespace

// ------------------------------------------------------------------ chains

nlohmann::json ChainCertificate::to_json() const {
  return {{"kind", "chain"},
          {"instance", instance},
          {"q", str(q)},
          {"depth", depth()},
          {"elements", rationals_json(elements)},
          {"differences", rationals_json(differences)}};
}

ChainCertificate ChainCertificate::from_json(const nlohmann::json& j) {
  return parse_json("chain certificate", [&] {
    ChainCertificate c;
    c.instance = j.at("instance").get<std::string>();
    c.q = rat(j.at("q"));
    c.elements = rationals_from(j.at("elements"));
    c.differences = rationals_from(j.at("differences"));
    return c;
  });
}

ChainCertificate mq_chain(const Rational& q, std::size_t depth) {
  check_geometric_parameter(q);
  ChainCertificate c;
  c.instance = MonoidDescriptor::geometric_puiseux(q).to_string();
  c.q = q;
  const Rational d(q.get_den());
  for (std::size_t n = 0; n <= depth; ++n) c.elements.push_back(d * pow(q, static_cast<unsigned>(n)));
  for (std::size_t n = 1; n <= depth; ++n) c.differences.push_back(chain_difference(q, n));
  const Replay r = replay_chain(c);
  if (!r.ok) throw Error("internal: chain failed its own replay: " + r.detail);
  return c;
}

Replay replay_chain(const ChainCertificate& cert) {
  const auto m = MonoidDescriptor::geometric_puiseux(cert.q);
  if (m.to_string() != cert.instance) return Replay::fail("instance does not match q");
  if (cert.elements.size() != cert.differences.size() + 1) return Replay::fail("need one more element than differences");
  for (std::size_t n = 0; n < cert.elements.size(); ++n) {
    const auto v = contains(m, q_elem(cert.elements[n]));
    if (!v.in() || !replay(m, q_elem(cert.elements[n]), *v.certificate)) {
      return Replay::fail("q_" + std::to_string(n) + " is not a member");
    }
  }
  for (std::size_t n = 0; n < cert.differences.size(); ++n) {
    const Rational& a = cert.differences[n];
    if (cert.elements[n] != cert.elements[n + 1] + a) return Replay::fail("q_n != q_{n+1} + a_{n+1} at n = " + std::to_string(n));
    if (a <= 0) return Replay::fail("a_" + std::to_string(n + 1) + " is not positive");
    const auto v = contains(m, q_elem(a));
    if (!v.in() || !replay(m, q_elem(a), *v.certificate)) return Replay::fail("a_" + std::to_string(n + 1) + " is not a member");
  }
  return {};
}

// --------------------------------------------------------- hereditary break

nlohmann::json ExclusionTranscript::to_json() const {
  auto b = nlohmann::json::array();
  for (const auto& x : bounds) b.push_back(x.get_str());
  return {{"items", rationals_json(items)}, {"bounds", b}, {"target", str(target)}, {"nodes", nodes}};
}

ExclusionTranscript ExclusionTranscript::from_json(const nlohmann::json& j) {
  return parse_json("exclusion transcript", [&] {
    ExclusionTranscript t;
    t.items = rationals_from(j.at("items"));
    for (const auto& b : j.at("bounds")) t.bounds.emplace_back(b.get<std::string>());
    t.target = rat(j.at("target"));
    t.nodes = j.at("nodes").get<std::uint64_t>();
    return t;
  });
}

nlohmann::json BreakStep::to_json() const {
  return {{"first", first},         {"second", second},
          {"atom", str(atom)},      {"partial_sum", str(partial_sum)},
          {"m", m},                 {"s_m", str(s_m)},
          {"remainder", remainder.to_json()}, {"exclusion", exclusion.to_json()}};
}

BreakStep BreakStep::from_json(const nlohmann::json& j) {
  return parse_json("break step", [&] {
    BreakStep s;
    s.first = j.at("first").get<std::size_t>();
    s.second = j.at("second").get<std::size_t>();
    s.atom = rat(j.at("atom"));
    s.partial_sum = rat(j.at("partial_sum"));
    s.m = j.at("m").get<std::size_t>();
    s.s_m = rat(j.at("s_m"));
    s.remainder = Certificate::from_json(GroupId::rationals(), j.at("remainder"));
    s.exclusion = ExclusionTranscript::from_json(j.at("exclusion"));
    return s;
  });
}

nlohmann::json HereditaryBreakCertificate::to_json() const {
  auto steps_json = nlohmann::json::array();
  for (const auto& s : steps) steps_json.push_back(s.to_json());
  return {{"kind", "break"},
          {"instance", instance},
          {"q", str(q)},
          {"q0", str(q0)},
          {"differences", rationals_json(differences)},
          {"steps", steps_json}};
}

HereditaryBreakCertificate HereditaryBreakCertificate::from_json(const nlohmann::json& j) {
  return parse_json("break certificate", [&] {
    HereditaryBreakCertificate c;
    c.instance = j.at("instance").get<std::string>();
    c.q = rat(j.at("q"));
    c.q0 = rat(j.at("q0"));
    c.differences = rationals_from(j.at("differences"));
    for (const auto& s : j.at("steps")) c.steps.push_back(BreakStep::from_json(s));
    return c;
  });
}

HereditaryBreakCertificate synthesize_break(const Rational& q, std::size_t steps, std::size_t depth) {
  check_geometric_parameter(q);
  const auto m = MonoidDescriptor::geometric_puiseux(q);
  HereditaryBreakCertificate cert;
  cert.instance = m.to_string();
  cert.q = q;
  cert.q0 = Rational(q.get_den());

  auto a = [&](std::size_t n) {
    while (cert.differences.size() < n) cert.differences.push_back(chain_difference(q, cert.differences.size() + 1));
    return cert.differences[n - 1];
  };
  auto s = [&](std::size_t n) {
    Rational sum = 0;
    for (std::size_t i = 1; i <= n; ++i) sum += a(i);
    return sum;
  };

  std::vector<Rational> atoms;
  Rational partial = 0;
  std::size_t prev_m = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    // first step pairs a_1 with a_i, i >= 2; later steps pair a_{m+1} with a_j, j > m + 1
    const std::size_t first = k == 0 ? 1 : prev_m + 1;
    const std::size_t lo = first + 1;
    std::optional<BreakStep> found;
    for (std::size_t second = lo; second < lo + depth && !found; ++second) {
      const Rational candidate = a(first) + a(second);
      auto items = atoms;
      items.push_back(candidate);
      auto transcript = exclude(items, cert.q0);
      if (!excluded(transcript)) continue;
      BreakStep step;
      step.first = first;
      step.second = second;
      step.atom = candidate;
      step.partial_sum = partial + candidate;
      step.m = second;
      step.s_m = s(second);
      const Rational rem = step.s_m - step.partial_sum;
      const auto v = contains(m, q_elem(rem));
      if (!v.in()) throw Error("internal: s'_k does not divide s_m at step " + std::to_string(k + 1));
      step.remainder = *v.certificate;
      step.exclusion = std::move(transcript);
      found = std::move(step);
    }
    if (!found) {
      throw Error("break search exhausted: no index in [" + std::to_string(lo) + ", " + std::to_string(lo + depth) +
                  ") keeps q_0 excluded at step " + std::to_string(k + 1));
    }
    atoms.push_back(found->atom);
    partial = found->partial_sum;
    prev_m = found->m;
    cert.steps.push_back(std::move(*found));
  }
  const Replay r = replay_break(cert);
  if (!r.ok) throw Error("internal: break certificate failed its own replay: " + r.detail);
  return cert;
}

Replay replay_break(const HereditaryBreakCertificate& cert) {
  try {
    check_geometric_parameter(cert.q);
  } catch (const DomainError& e) {
    return Replay::fail(e.what());
  }
  const auto m = MonoidDescriptor::geometric_puiseux(cert.q);
  if (m.to_string() != cert.instance) return Replay::fail("instance does not match q");
  if (cert.q0 != Rational(cert.q.get_den())) return Replay::fail("q_0 must be d(q)");
  for (std::size_t n = 1; n <= cert.differences.size(); ++n) {
    if (cert.differences[n - 1] != chain_difference(cert.q, n)) return Replay::fail("a_" + std::to_string(n) + " is wrong");
  }
  auto a = [&](std::size_t n) -> const Rational& { return cert.differences.at(n - 1); };
  std::vector<Rational> atoms;
  Rational partial = 0;
  std::size_t prev_m = 0;
  for (std::size_t k = 0; k < cert.steps.size(); ++k) {
    const BreakStep& st = cert.steps[k];
    const std::string at = " at step " + std::to_string(k + 1);
    if (st.second > cert.differences.size()) return Replay::fail("index beyond the recorded differences" + at);
    const std::size_t first = k == 0 ? 1 : prev_m + 1;
    if (st.first != first || st.second <= first) return Replay::fail("indices break the construction" + at);
    if (st.atom != a(st.first) + a(st.second)) return Replay::fail("a'_k != a_first + a_second" + at);
    partial += st.atom;
    if (st.partial_sum != partial) return Replay::fail("partial sum mismatch" + at);
    if (!same_class(q_elem(st.atom), q_elem(cert.q0))) return Replay::fail("a'_k not in the class of q_0" + at);
    if (st.m != st.second) return Replay::fail("m must be the second index" + at);
    Rational sm = 0;
    for (std::size_t i = 1; i <= st.m; ++i) sm += a(i);
    if (st.s_m != sm) return Replay::fail("s_m mismatch" + at);
    if (!replay(m, q_elem(st.s_m - st.partial_sum), st.remainder)) return Replay::fail("divisibility s'_k | s_m fails" + at);
    atoms.push_back(st.atom);
    const auto again = exclude(atoms, cert.q0);
    if (!excluded(again)) return Replay::fail("q_0 lies in <a'_1..a'_k>" + at);
    if (again.items != st.exclusion.items || again.bounds != st.exclusion.bounds || again.target != st.exclusion.target ||
        again.nodes != st.exclusion.nodes) {
      return Replay::fail("exclusion transcript differs from the recomputed search" + at);
    }
    prev_m = st.m;
  }
  return {};
}

// -------------------------------------------------------- subatomic witnesses

std::string to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::Quasi:
      return "Quasi";
    case WitnessKind::Almost:
      return "Almost";
    case WitnessKind::NearlyRefutation:
      return "NearlyRefutation";
  }
  return {};
}

nlohmann::json SubatomicWitness::to_json() const {
  nlohmann::json j = {{"kind", "witness"},
                      {"witness_kind", posmon::to_string(kind)},
                      {"element", element.to_string()},
                      {"companion", companion.to_string()},
                      {"evidence", evidence.to_json()}};
  if (!note.empty()) j["note"] = note;
  return j;
}

MonoidDescriptor quasi_not_almost() { return MonoidDescriptor::parse("quasi"); }
MonoidDescriptor almost_not_nearly() { return MonoidDescriptor::parse("almost"); }

SubatomicWitness verify_quasi_witness(const Rational& q) {
  const auto m = quasi_not_almost();
  const GroupElement x = q_elem(q);
  if (q <= 0 || !contains(m, x).in()) throw DomainError(str(q) + " is not a nonzero member of " + m.to_string());
  const Integer d = q.get_den();
  const Integer n = q.get_num();
  SubatomicWitness w;
  w.kind = WitnessKind::Quasi;
  w.element = x;
  w.companion = q_elem(Rational(4 * d - 1) * q);
  const GroupElement atom = q_elem(Rational(4, 3));
  w.evidence = Factorization{w.companion + x, {atom}, {3 * n}, 3 * n};
  const Replay r = replay_quasi(w);
  if (!r.ok) throw Error("internal: quasi witness failed its own replay: " + r.detail);
  w.note = "b + q = 4 n(q) = 3 n(q) * 4/3";
  return w;
}

Replay replay_quasi(const SubatomicWitness& w) {
  const auto m = quasi_not_almost();
  const Rational& q = w.element.as_rational();
  if (w.companion.as_rational() != Rational(4 * q.get_den() - 1) * q) return Replay::fail("companion is not (4d(q) - 1)q");
  if (!contains(m, w.companion).in()) return Replay::fail("companion is not a member");
  if (w.evidence.value != w.companion + w.element) return Replay::fail("evidence is not a factorization of b + q");
  if (w.evidence.value.as_rational() != Rational(4 * q.get_num())) return Replay::fail("b + q != 4 n(q)");
  if (!w.evidence.consistent()) return Replay::fail("evidence does not sum to b + q");
  for (const auto& a : w.evidence.atoms) {
    if (!verify_atom(m, a)) return Replay::fail(a.to_string() + " is not an atom");
  }
  return {};
}

// ---- almost atomic, not nearly atomic

nlohmann::json NearlyRefutation::to_json() const {
  std::vector<nlohmann::json> ex;
  for (auto p : excluded) ex.emplace_back(p);
  return {{"kind", "nearly-refutation"},
          {"q", str(q)},
          {"certified", certified},
          {"prime_limit", prime_limit},
          {"excluded", ex},
          {"first_prime", first_prime},
          {"last_prime", last_prime},
          {"count", count},
          {"scale_bits", scale_bits},
          {"floor_sum", floor_sum.get_str()},
          {"r", r}};
}

NearlyRefutation NearlyRefutation::from_json(const nlohmann::json& j) {
  return parse_json("nearly refutation", [&] {
    NearlyRefutation r;
    r.q = rat(j.at("q"));
    r.certified = j.at("certified").get<bool>();
    r.prime_limit = j.at("prime_limit").get<std::uint64_t>();
    r.excluded = j.at("excluded").get<std::vector<std::uint64_t>>();
    r.first_prime = j.at("first_prime").get<std::uint64_t>();
    r.last_prime = j.at("last_prime").get<std::uint64_t>();
    r.count = j.at("count").get<std::uint64_t>();
    r.scale_bits = j.at("scale_bits").get<unsigned>();
    r.floor_sum = Integer(j.at("floor_sum").get<std::string>());
    r.r = j.at("r").get<std::string>();
    return r;
  });
}

nlohmann::json AlmostNotNearlyReport::to_json() const {
  auto refs = nlohmann::json::array();
  for (const auto& r : refutations) refs.push_back(r.to_json());
  auto wit = nlohmann::json::array();
  for (const auto& w : almost_witnesses) wit.push_back(w.to_json());
  return {{"refutations", refs}, {"almost_witnesses", wit}};
}

namespace {

std::vector<std::uint64_t> support(const Rational& q) {
  std::vector<std::uint64_t> out;
  for (const auto& p : prime_factors(q.get_den())) out.push_back(p.get_ui());
  return out;
}

Integer from_u128(unsigned __int128 v) {
  Integer hi(static_cast<unsigned long>(v >> 64));
  Integer lo(static_cast<unsigned long>(v & ~std::uint64_t{0}));
  return (hi << 64) + lo;
}

struct PrefixScan {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  std::uint64_t count = 0;
  unsigned __int128 sum = 0;
  bool certified = false;
};

// Walks the primes <= limit outside `excluded`, stopping at the first
// prefix whose floor sum certifies.
PrefixScan scan_prefix(const std::vector<std::uint64_t>& excluded, const Rational& q, std::uint64_t limit) {
  const Rational bound = q + 2;
  const Integer rhs = bound.get_num() << 64;
  PrefixScan scan;
  for (auto p : primes_up_to(limit)) {
    if (std::find(excluded.begin(), excluded.end(), p) != excluded.end()) continue;
    if (scan.count == 0) scan.first = p;
    ++scan.count;
    scan.last = p;
    // floor(2^64 / p), computed without 2^64 itself
    constexpr std::uint64_t kMax = ~std::uint64_t{0};
    scan.sum += kMax / p + (kMax % p + 1 == p ? 1 : 0);
    if (from_u128(scan.sum) * bound.get_den() > rhs) {
      scan.certified = true;
      return scan;
    }
  }
  return scan;
}

}  // namespace

NearlyRefutation refute_nearly_witness(const Rational& q, std::uint64_t prime_limit) {
  if (q <= 0) throw DomainError("the candidate must be a nonzero member; got " + str(q));
  if (!contains(almost_not_nearly(), q_elem(q)).in()) throw DomainError(str(q) + " is not a member of the monoid");
  NearlyRefutation out;
  out.q = q;
  out.prime_limit = prime_limit;
  out.excluded = support(q);
  out.scale_bits = 64;
  std::uint64_t limit = std::min<std::uint64_t>(std::uint64_t{1} << 16, prime_limit);
  while (true) {
    const auto scan = scan_prefix(out.excluded, q, limit);
    out.first_prime = scan.first;
    out.count = scan.count;
    out.floor_sum = from_u128(scan.sum);
    if (scan.certified) {
      out.certified = true;
      out.last_prime = scan.last;
      out.r = "1 + 1/(" + std::to_string(out.first_prime) + " * ... * " + std::to_string(scan.last) + ")";
      return out;
    }
    if (limit >= prime_limit) {
      out.last_prime = scan.last;
      return out;
    }
    limit = std::min(limit << 2, prime_limit);
  }
}

Replay replay_refutation(const NearlyRefutation& r) {
  if (r.q <= 0) return Replay::fail("q must be a nonzero member");
  if (r.excluded != support(r.q)) return Replay::fail("excluded primes are not the support of d(q)");
  if (r.scale_bits != 64) return Replay::fail("only 64-bit scaling is replayed");
  const auto scan = scan_prefix(r.excluded, r.q, r.certified ? r.last_prime : r.prime_limit);
  if (scan.certified != r.certified) return Replay::fail("certification status does not match");
  if (scan.first != r.first_prime || scan.last != r.last_prime || scan.count != r.count) {
    return Replay::fail("prime range does not match");
  }
  if (from_u128(scan.sum) != r.floor_sum) return Replay::fail("floor sum does not match");
  return {};
}

SubatomicWitness almost_witness(const Rational& c) {
  const auto m = almost_not_nearly();
  if (c <= 0 || !contains(m, q_elem(c)).in()) throw DomainError(str(c) + " is not a nonzero member of " + m.to_string());
  // c = u + sum r_p / p with 0 < r_p < p and u an integer (possibly negative)
  const Integer d = c.get_den();
  std::map<Integer, Integer> mults;
  Rational rest = c;
  for (const auto& p : prime_factors(d)) {
    const Integer cofactor = d / p;
    Integer inv;
    mpz_invert(inv.get_mpz_t(), cofactor.get_mpz_t(), p.get_mpz_t());
    Integer r = (c.get_num() * inv) % p;
    if (r < 0) r += p;
    mults[p] = r;
    rest -= Rational(r, p);
  }
  Integer u = Rational(rest).get_num();
  const Integer t = u < 0 ? Integer(-u) : Integer(0);
  mults[2] += 2 * (u + t);
  SubatomicWitness w;
  w.kind = WitnessKind::Almost;
  w.element = q_elem(c);
  w.companion = q_elem(Rational(t));
  w.evidence.value = w.element + w.companion;
  w.evidence.length = 0;
  // atoms descending means primes ascending
  for (const auto& [p, k] : mults) {
    if (k == 0) continue;
    Rational inv(1, 1);
    inv /= Rational(p);
    w.evidence.atoms.push_back(q_elem(inv));
    w.evidence.mults.push_back(k);
    w.evidence.length += k;
  }
  w.note = "companion " + str(Rational(t)) + " = " + Integer(2 * t).get_str() + " * 1/2 is atomic";
  if (!w.evidence.consistent()) throw Error("internal: almost-atomic witness does not add up");
  return w;
}

AlmostNotNearlyReport verify_almost_not_nearly(std::size_t b) {
  if (b == 0) throw DomainError("need at least one prime");
  AlmostNotNearlyReport report;
  const auto primes = first_primes(b);
  std::vector<Rational> candidates{Rational(1)};
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << primes.size()); ++mask) {
    Rational q = 0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if ((mask >> i) & 1) q += Rational(1, static_cast<unsigned long>(primes[i]));
    }
    candidates.push_back(q);
  }
  for (const auto& q : candidates) {
    auto r = refute_nearly_witness(q);
    const Replay ok = replay_refutation(r);
    if (!ok.ok) throw Error("internal: refutation failed its own replay: " + ok.detail);
    report.refutations.push_back(std::move(r));
  }
  for (const auto& c : {Rational(1, 2), Rational(7, 6), Rational(211, 210), Rational(2311, 2310), Rational(30031, 30030)}) {
    report.almost_witnesses.push_back(almost_witness(c));
  }
  return report;
}

// ---- nearly atomic, not atomic

nlohmann::json NearlyDecomposition::to_json() const {
  auto t = nlohmann::json::array();
  for (const auto& a : tail) t.push_back(a.to_string());
  return {{"r", r.to_string()}, {"q0", str(q0)}, {"phi", phi.get_str()}, {"tail", t}, {"verified", verified}};
}

nlohmann::json RationalObstruction::to_json() const {
  return {{"x", str(x)},
          {"factorizations_found", factorizations_found},
          {"alpha_coordinate_obstruction", alpha_coordinate_obstruction}};
}

nlohmann::json NearlyAtomicReport::to_json() const {
  auto d = nlohmann::json::array();
  for (const auto& x : decompositions) d.push_back(x.to_json());
  auto r = nlohmann::json::array();
  for (const auto& x : rational_members) r.push_back(x.to_json());
  return {{"decompositions", d}, {"rational_members", r}, {"ok", ok}};
}

namespace {

Integer phi_of_rational(const Rational& q) {
  const auto idx = nonnegative_rational_index(q);
  if (!idx) throw Unsupported("enumeration index of " + str(q) + " is out of range");
  return nth_prime(*idx);
}

GroupElement nearly_atom(const Rational& q) {
  const Integer phi = phi_of_rational(q);
  return GroupElement::triple(q / Rational(phi), Rational(1) / Rational(phi), 0);
}

}  // namespace

NearlyAtomicReport verify_nearly_atomic(std::size_t depth) {
  const auto m = MonoidDescriptor::nearly_atomic_alpha();
  const GroupElement alpha = GroupElement::triple(0, 1, 0);
  NearlyAtomicReport report;
  report.ok = true;

  auto decompose = [&](const Rational& q0, std::vector<GroupElement> tail) {
    NearlyDecomposition dec;
    dec.q0 = q0;
    dec.phi = phi_of_rational(q0);
    dec.tail = std::move(tail);
    GroupElement r = GroupElement::triple(q0, 0, 0);
    for (const auto& a : dec.tail) r = r + a;
    dec.r = r;
    const GroupElement lead = nearly_atom(q0);
    GroupElement rhs = scale(dec.phi, lead);
    for (const auto& a : dec.tail) rhs = rhs + a;
    bool atoms_ok = verify_atom(m, lead, depth);
    for (const auto& a : dec.tail) atoms_ok = atoms_ok && verify_atom(m, a, depth);
    dec.verified = atoms_ok && contains(m, r, depth).in() && alpha + r == rhs;
    report.ok = report.ok && dec.verified;
    report.decompositions.push_back(std::move(dec));
  };

  decompose(Rational(0), {});
  for (std::size_t i = 0; i < depth; ++i) {
    const Rational q0 = nonnegative_rational_at(i);
    decompose(q0, {nearly_atom(nonnegative_rational_at(i + 1))});
  }

  const AtomSet window = atoms(m, depth);
  bool all_irrational = !window.atoms.empty();
  for (const auto& a : window.atoms) all_irrational = all_irrational && a.as_triple().c1 > 0;
  for (std::size_t i = 1; i <= depth; ++i) {
    RationalObstruction ob;
    ob.x = nonnegative_rational_at(i);
    ob.factorizations_found = factorizations_over(window, GroupElement::triple(ob.x, 0, 0)).items.size();
    ob.alpha_coordinate_obstruction = all_irrational;
    report.ok = report.ok && ob.factorizations_found == 0 && ob.alpha_coordinate_obstruction;
    report.rational_members.push_back(ob);
  }
  return report;
}

nlohmann::json AlphaBetaIdentity::to_json() const {
  nlohmann::json j = {{"d", str(d)}, {"verified", verified}};
  if (k) {
    j["k"] = *k;
    j["s"] = str(s);
    j["phi"] = phi.get_str();
  } else {
    j["k"] = nullptr;
  }
  return j;
}

std::vector<AlphaBetaIdentity> verify_alpha_beta_identities(const Rational& q, std::size_t count, std::size_t depth) {
  const auto m = MonoidDescriptor::alpha_beta(q);
  const GroupElement alpha = GroupElement::triple(0, 1, 0);
  const GroupElement beta = GroupElement::triple(0, 0, 1);
  std::vector<AlphaBetaIdentity> out;
  for (const auto& d : alpha_beta_discovery(q, count)) {
    AlphaBetaIdentity id;
    id.d = d;
    for (std::size_t k = 1; k <= depth && !id.k; ++k) {
      const Rational qk = pow(q, static_cast<unsigned>(k));
      const Rational s = d + qk;
      if (s * s >= 2) continue;
      const auto idx = alpha_beta_index(q, s);
      if (!idx) continue;
      id.k = k;
      id.s = s;
      id.phi = nth_prime(*idx);
      const Rational inv = Rational(1) / Rational(id.phi);
      const GroupElement ga = GroupElement::triple(-s * inv, inv, 0);
      const GroupElement gb = GroupElement::triple(-s * inv, 0, inv);
      const GroupElement tail = GroupElement::triple(qk, 0, 0);
      const GroupElement dd = GroupElement::triple(d, 0, 0);
      id.verified = is_defining_generator(m, ga) && is_defining_generator(m, gb) && is_defining_generator(m, tail) &&
                    alpha - dd == scale(id.phi, ga) + tail && beta - dd == scale(id.phi, gb) + tail;
    }
    out.push_back(std::move(id));
  }
  return out;
}

Replay verify_certificate(const nlohmann::json& j) {
  std::string kind;
  try {
    kind = j.at("kind").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("certificate has no \"kind\" field");
  }
  if (kind == "chain") return replay_chain(ChainCertificate::from_json(j));
  if (kind == "break") return replay_break(HereditaryBreakCertificate::from_json(j));
  if (kind == "nearly-refutation") return replay_refutation(NearlyRefutation::from_json(j));
  if (kind == "witness") {
    return parse_json("witness", [&] {
      const std::string wk = j.at("witness_kind").get<std::string>();
      if (wk != "Quasi") throw Unsupported("only quasi-atomic witnesses are replayed from files");
      SubatomicWitness w;
      w.element = GroupElement::parse(GroupId::rationals(), j.at("element").get<std::string>());
      w.companion = GroupElement::parse(GroupId::rationals(), j.at("companion").get<std::string>());
      w.evidence = Factorization::from_json(GroupId::rationals(), j.at("evidence"));
      return replay_quasi(w);
    });
  }
  throw ParseError("unknown certificate kind '" + kind + "'");
}

}  // namespace posmon
