#include "posmon/factor.hpp"

#include <algorithm>
#include <functional>

#include "posmon/error.hpp"
#include "posmon/knapsack.hpp"

namespace posmon {

namespace {

bool lex_all_integer(const GroupId& g) {
  if (g.kind() != GroupKind::Lex) return false;
  for (std::size_t i = 0; i < g.rank(); ++i) {
    if (g.coord_is_rational(i)) return false;
  }
  return true;
}

GroupElement unit_vector(const GroupId& g, std::size_t coord) {
  std::vector<Rational> c(g.rank(), Rational(0));
  c[coord] = 1;
  return GroupElement::lex(g, c);
}

std::size_t level_of(const GroupElement& g) { return arch_valuation(g).level; }

void add_verified(AtomSet& set, const MonoidDescriptor& m, const GroupElement& x, std::size_t depth) {
  if (!verify_atom(m, x, depth)) {
    throw Error("internal: closed-form atom " + x.to_string() + " of " + m.to_string() + " decomposes in the window");
  }
  set.atoms.push_back(x);
}

AtomSet finite_generated_atoms(const MonoidDescriptor& m, AtomSet set) {
  const auto& gens = m.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    std::vector<GroupElement> others;
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (j != i && gens[j] < gens[i]) others.push_back(gens[j]);
    }
    if (!representable(others, gens[i])) set.atoms.push_back(gens[i]);
  }
  set.complete = true;
  return set;
}

AtomSet conductive_atoms(const MonoidDescriptor& m, AtomSet set) {
  const GroupElement& a = m.a();
  const GroupElement twice = a + a;
  for (const auto& g : generators(m, set.depth)->gens) {
    if (g >= a && g < twice) add_verified(set, m, g, set.depth);
  }
  const GroupId& group = m.group();
  if (group.kind() == GroupKind::Rational && !group.coord_is_rational(0)) {
    // [a, 2a) has a elements; the window lists a..a+depth
    set.complete = set.atoms.size() == a.as_rational().get_num().get_ui();
    if (!set.complete) set.exhaustive_below = generators(m, set.depth)->gens.back();
  } else if (lex_all_integer(group) && level_of(a) + 1 == group.rank()) {
    const std::size_t last = group.comparison_order().back();
    set.complete = Integer(static_cast<unsigned long>(set.atoms.size())) == a.as_lex().coords[last].get_num();
  }
  return set;
}

AtomSet lex_cone_atoms(const MonoidDescriptor& m, AtomSet set) {
  const GroupId& group = m.group();
  const auto order = group.comparison_order();
  if (m.rule() == ConeRule::PositiveCone) {
    // the least positive element, if the last compared coordinate is discrete
    set.complete = true;
    if (!group.coord_is_rational(order.back())) add_verified(set, m, unit_vector(group, order.back()), set.depth);
    return set;
  }
  const std::size_t lead = order.front();
  set.complete = true;
  if (group.coord_is_rational(lead)) return set;  // halving: antimatter
  for (const auto& g : generators(m, set.depth)->gens) {
    if (g.as_lex().coords[lead] == 1) add_verified(set, m, g, set.depth);
  }
  set.complete = group.rank() == 1;
  return set;
}

AtomSet union_atoms(const MonoidDescriptor& m, AtomSet set) {
  if (m.tail() == TailRule::DifferenceGroupAtLeast) {
    for (auto p : first_primes(set.depth)) {
      add_verified(set, m, GroupElement::rational(Rational(1, static_cast<unsigned long>(p))), set.depth);
    }
    return set;
  }
  // non-integral tail elements below min(t + 1, 2t)
  const Rational& t = m.threshold();
  const Rational top = std::min<Rational>(t + 1, 2 * t);
  for (const auto& g : generators(m, set.depth)->gens) {
    const Rational& x = g.as_rational();
    if (x >= t && x < top && !is_integer(x) && divides_power_exponent(x.get_den(), m.prime()) >= 0) {
      add_verified(set, m, g, set.depth);
    }
  }
  return set;
}

}  // namespace

nlohmann::json AtomSet::to_json() const {
  nlohmann::json j;
  j["instance"] = instance;
  j["depth"] = depth;
  auto& arr = j["atoms"] = nlohmann::json::array();
  for (const auto& a : atoms) arr.push_back(a.to_string());
  j["complete"] = complete;
  j["exhaustive_below"] = exhaustive_below ? nlohmann::json(exhaustive_below->to_string()) : nlohmann::json(nullptr);
  return j;
}

bool verify_atom(const MonoidDescriptor& m, const GroupElement& x, std::size_t depth) {
  if (!x.is_positive() || !contains(m, x, depth).in()) return false;
  for (const auto& g : generators(m, depth)->gens) {
    if (g >= x) continue;
    if (contains(m, x - g, depth).in()) return false;
  }
  return true;
}

AtomSet atoms(const MonoidDescriptor& m, std::size_t depth) {
  AtomSet set;
  set.instance = m.to_string();
  set.depth = depth;
  switch (m.family()) {
    case Family::FiniteGenerated:
      set = finite_generated_atoms(m, std::move(set));
      break;
    case Family::GeometricPuiseux:
      for (std::size_t n = 0; n <= depth; ++n) {
        add_verified(set, m, GroupElement::rational(pow(m.q(), static_cast<unsigned>(n))), depth);
      }
      break;
    case Family::PrimeReciprocal:
      for (auto p : first_primes(depth)) add_verified(set, m, GroupElement::rational(Rational(1, static_cast<unsigned long>(p))), depth);
      break;
    case Family::LocalizedNonnegative:
      set.complete = true;  // every x > 0 is x/2 + x/2... with x/p in place of x/2 when needed
      break;
    case Family::Conductive:
      set = conductive_atoms(m, std::move(set));
      break;
    case Family::LexCone:
      set = lex_cone_atoms(m, std::move(set));
      break;
    case Family::Product: {
      const AtomSet left = atoms(m.left(), depth);
      const AtomSet right = atoms(m.right(), depth);
      for (const auto& a : left.atoms) set.atoms.push_back(GroupElement::lex(m.group(), {a.as_rational(), Rational(0)}));
      for (const auto& a : right.atoms) set.atoms.push_back(GroupElement::lex(m.group(), {Rational(0), a.as_rational()}));
      set.complete = left.complete && right.complete;
      break;
    }
    case Family::UnionShift:
      set = union_atoms(m, std::move(set));
      break;
    case Family::AlphaBeta: {
      for (std::size_t n = 0; n <= depth; ++n) {
        add_verified(set, m, GroupElement::triple(pow(m.q(), static_cast<unsigned>(n)), 0, 0), depth);
      }
      for (const auto& g : generators(m, depth)->gens) {
        if (g.as_triple().c1 != 0 || g.as_triple().c2 != 0) add_verified(set, m, g, depth);
      }
      break;
    }
    case Family::NearlyAtomicAlpha:
      for (const auto& g : generators(m, depth)->gens) {
        if (g.as_triple().c1 != 0) add_verified(set, m, g, depth);
      }
      break;
  }
  std::sort(set.atoms.begin(), set.atoms.end());
  set.atoms.erase(std::unique(set.atoms.begin(), set.atoms.end()), set.atoms.end());
  return set;
}

// --------------------------------------------------------- factorizations

nlohmann::json Factorization::to_json() const {
  nlohmann::json j;
  j["value"] = value.to_string();
  auto& a = j["atoms"] = nlohmann::json::array();
  auto& m = j["mults"] = nlohmann::json::array();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    a.push_back(atoms[i].to_string());
    m.push_back(mults[i].get_str());
  }
  j["length"] = length.get_str();
  return j;
}

Factorization Factorization::from_json(const GroupId& group, const nlohmann::json& j) {
  try {
    Factorization f;
    f.value = GroupElement::parse(group, j.at("value").get<std::string>());
    for (const auto& a : j.at("atoms")) f.atoms.push_back(GroupElement::parse(group, a.get<std::string>()));
    for (const auto& m : j.at("mults")) f.mults.emplace_back(m.get<std::string>());
    f.length = Integer(j.at("length").get<std::string>());
    if (f.atoms.size() != f.mults.size()) throw ParseError("factorization atoms and mults differ in size");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed factorization json: ") + e.what());
  }
}

bool Factorization::consistent() const {
  GroupElement sum = GroupElement::zero(value.group());
  Integer len = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (mults[i] <= 0) return false;
    sum = sum + scale(mults[i], atoms[i]);
    len += mults[i];
  }
  return sum == value && len == length;
}

nlohmann::json FactorizationList::to_json() const {
  nlohmann::json j;
  j["value"] = value.to_string();
  auto& arr = j["factorizations"] = nlohmann::json::array();
  for (const auto& f : items) arr.push_back(f.to_json());
  j["complete"] = complete;
  j["truncated"] = truncated;
  if (!note.empty()) j["note"] = note;
  return j;
}

FactorizationList factorizations_over(const AtomSet& atom_set, const GroupElement& b, std::size_t max_count) {
  FactorizationList list;
  list.value = b;
  std::vector<GroupElement> usable;
  for (const auto& a : atom_set.atoms) {
    if (a <= b) usable.push_back(a);
  }
  KnapsackOptions options;
  options.max_solutions = max_count;
  const auto result = solve_knapsack(usable, b, options);
  list.nodes = result.nodes;
  list.truncated = result.truncated;
  for (const auto& sol : result.solutions) {
    Factorization f;
    f.value = b;
    f.length = 0;
    for (std::size_t i = 0; i < sol.size(); ++i) {
      if (sol[i] == 0) continue;
      f.atoms.push_back(result.items[i]);
      f.mults.push_back(sol[i]);
      f.length += sol[i];
    }
    list.items.push_back(std::move(f));
  }
  list.complete = atom_set.covers(b) && !list.truncated;
  if (atom_set.atoms.empty() && atom_set.complete && !b.is_zero()) list.note = "NotAtomicFamily";
  return list;
}

FactorizationList factorizations(const MonoidDescriptor& m, const GroupElement& b, std::size_t depth, std::size_t max_count) {
  if (contains(m, b, depth).out()) throw DomainError(b.to_string() + " is not a member of " + m.to_string());
  return factorizations_over(atoms(m, depth), b, max_count);
}

nlohmann::json LengthSet::to_json() const {
  nlohmann::json j;
  j["value"] = value.to_string();
  auto& arr = j["lengths"] = nlohmann::json::array();
  for (const auto& l : lengths) arr.push_back(l.get_str());
  j["complete"] = complete;
  return j;
}

LengthSet length_set_of(const FactorizationList& list) {
  LengthSet out;
  out.value = list.value;
  for (const auto& f : list.items) out.lengths.insert(f.length);
  out.complete = list.complete;
  return out;
}

LengthSet length_set(const MonoidDescriptor& m, const GroupElement& b, std::size_t depth) {
  return length_set_of(factorizations(m, b, depth));
}

AtomicElementResult is_atomic_element(const MonoidDescriptor& m, const GroupElement& b, std::size_t depth) {
  if (contains(m, b, depth).out()) throw DomainError(b.to_string() + " is not a member of " + m.to_string());
  AtomicElementResult out;
  if (b.is_zero()) {
    out.status = Atomicity::Yes;
    out.witness = Factorization{b, {}, {}, Integer(0)};
    return out;
  }
  const AtomSet set = atoms(m, depth);
  const auto list = factorizations_over(set, b, 1);
  if (!list.items.empty()) {
    out.status = Atomicity::Yes;
    out.witness = list.items.front();
  } else {
    out.status = list.complete ? Atomicity::No : Atomicity::Unknown;
  }
  return out;
}

// ----------------------------------------------------------------- probes

std::string to_string(ProbeProperty p) {
  switch (p) {
    case ProbeProperty::ATM:
      return "ATM";
    case ProbeProperty::BFM:
      return "BFM";
    case ProbeProperty::FFM:
      return "FFM";
    case ProbeProperty::HFM:
      return "HFM";
    case ProbeProperty::LFM:
      return "LFM";
    case ProbeProperty::UFM:
      return "UFM";
  }
  return {};
}

ProbeProperty parse_probe_property(std::string_view text) {
  for (auto p : {ProbeProperty::ATM, ProbeProperty::BFM, ProbeProperty::FFM, ProbeProperty::HFM, ProbeProperty::LFM,
                 ProbeProperty::UFM}) {
    if (to_string(p) == text) return p;
  }
  throw ParseError("unknown probe property '" + std::string(text) + "' (ATM, BFM, FFM, HFM, LFM, UFM)");
}

std::string to_string(ProbeStatus s) {
  switch (s) {
    case ProbeStatus::Consistent:
      return "Consistent";
    case ProbeStatus::Refuted:
      return "Refuted";
    case ProbeStatus::Inconclusive:
      return "Inconclusive";
  }
  return {};
}

ProbeBound ProbeBound::parse(std::string_view raw) {
  std::string text(raw);
  if (text.size() >= 2 && text.front() == '(' && text.back() == ')') text = text.substr(1, text.size() - 2);
  ProbeBound b;
  if (text.find(',') == std::string::npos) {
    b.scalar = parse_rational(text);
    return b;
  }
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const Rational v = parse_rational(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!is_integer(v) || v < 0) throw ParseError("box bounds must be nonnegative integers");
    b.box.push_back(v.get_num());
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return b;
}

std::string ProbeBound::to_string() const {
  if (scalar) return format_rational(*scalar);
  std::string out = "(";
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (i) out += ',';
    out += box[i].get_str();
  }
  return out + ")";
}

nlohmann::json ProbeResult::to_json() const {
  nlohmann::json j;
  j["property"] = posmon::to_string(property);
  j["status"] = posmon::to_string(status);
  j["members_checked"] = members_checked;
  if (counterexample) j["counterexample"] = counterexample->to_string();
  auto& ev = j["evidence"] = nlohmann::json::array();
  for (const auto& f : evidence) ev.push_back(f.to_json());
  if (!note.empty()) j["note"] = note;
  return j;
}

namespace {

bool box_enumerable(const MonoidDescriptor& m) {
  if (!lex_all_integer(m.group())) return false;
  switch (m.family()) {
    case Family::Conductive:
    case Family::LexCone:
      return true;
    case Family::Product:
      return m.left().family() == Family::FiniteGenerated && m.right().family() == Family::FiniteGenerated;
    default:
      return false;
  }
}

bool scalar_enumerable(const MonoidDescriptor& m) {
  if (m.family() == Family::FiniteGenerated) return true;
  return m.family() == Family::Conductive && m.group() == GroupId::integers();
}

std::size_t probe_depth(const MonoidDescriptor& m, const ProbeBound& bound, std::size_t depth) {
  if (m.group().kind() == GroupKind::Lex) {
    Integer widest = 0;
    for (const auto& b : bound.box) widest = std::max(widest, b);
    return std::max<std::size_t>(depth, widest.get_ui() + 5);
  }
  if (m.family() == Family::Conductive) return std::max<std::size_t>(depth, m.a().as_rational().get_num().get_ui());
  return depth;
}

}  // namespace

std::vector<GroupElement> members_below(const MonoidDescriptor& m, const ProbeBound& bound) {
  std::vector<GroupElement> out;
  if (scalar_enumerable(m)) {
    if (!bound.scalar) throw DomainError("a scalar bound is needed for " + m.to_string());
    // members are multiples of the generator gcd
    Integer lcm = 1;
    const bool conductive = m.family() == Family::Conductive;
    if (!conductive) {
      for (const auto& g : m.generators()) lcm = lcm_of(lcm, g.as_rational().get_den());
    }
    Integer gcd = 0;
    if (conductive) {
      gcd = 1;
    } else {
      for (const auto& g : m.generators()) gcd = gcd_of(gcd, Rational(g.as_rational() * lcm).get_num());
    }
    Rational step(gcd, lcm);
    step.canonicalize();
    for (Integer k = 0; step * k <= *bound.scalar; ++k) {
      const GroupElement x = GroupElement::rational(Rational(step * k), m.group());
      if (contains(m, x).in()) out.push_back(x);
    }
    return out;
  }
  if (box_enumerable(m)) {
    const GroupId& g = m.group();
    if (bound.box.size() != g.rank()) throw DomainError("box bound needs " + std::to_string(g.rank()) + " entries");
    std::vector<Rational> coords(g.rank());
    std::function<void(std::size_t)> fill = [&](std::size_t i) {
      if (i == g.rank()) {
        const GroupElement x = GroupElement::lex(g, coords);
        if (x.sign() >= 0 && contains(m, x).in()) out.push_back(x);
        return;
      }
      for (Integer v = -bound.box[i]; v <= bound.box[i]; ++v) {
        coords[i] = v;
        fill(i + 1);
      }
    };
    fill(0);
    std::sort(out.begin(), out.end());
    return out;
  }
  throw Unsupported("membership below a bound is not exact (or not finite) for " + m.to_string());
}

ProbeResult probe_property(const MonoidDescriptor& m, ProbeProperty prop, const ProbeBound& bound, std::size_t depth) {
  const auto members = members_below(m, bound);
  const AtomSet atom_set = atoms(m, probe_depth(m, bound, depth));
  ProbeResult result;
  result.property = prop;
  bool inconclusive = false;
  for (const auto& x : members) {
    if (x.is_zero()) continue;
    ++result.members_checked;
    // Finiteness needs only that every atom below x is listed; one
    // factorization then settles atomicity.
    const bool existence_only =
        prop == ProbeProperty::ATM || prop == ProbeProperty::BFM || prop == ProbeProperty::FFM;
    const auto list = factorizations_over(atom_set, x, existence_only ? 1 : kDefaultMaxFactorizations);
    const auto& items = list.items;
    auto refute = [&](std::vector<Factorization> evidence, std::string note) {
      result.status = ProbeStatus::Refuted;
      result.counterexample = x;
      result.evidence = std::move(evidence);
      result.note = std::move(note);
    };
    if (items.empty()) {
      if (list.complete) {
        refute({}, "element has no factorization");
        return result;
      }
      inconclusive = true;
      continue;
    }
    switch (prop) {
      case ProbeProperty::ATM:
        break;
      case ProbeProperty::BFM:
      case ProbeProperty::FFM:
        if (!atom_set.covers(x)) inconclusive = true;
        break;
      case ProbeProperty::HFM:
        for (std::size_t i = 1; i < items.size(); ++i) {
          if (items[i].length != items[0].length) {
            refute({items[0], items[i]}, "two factorizations with different lengths");
            return result;
          }
        }
        break;
      case ProbeProperty::LFM:
        for (std::size_t i = 0; i < items.size(); ++i) {
          for (std::size_t j = i + 1; j < items.size(); ++j) {
            if (items[i].length == items[j].length) {
              refute({items[i], items[j]}, "two distinct factorizations with the same length");
              return result;
            }
          }
        }
        break;
      case ProbeProperty::UFM:
        if (items.size() > 1) {
          refute({items[0], items[1]}, "two distinct factorizations");
          return result;
        }
        break;
    }
    // A truncated list cannot confirm a length or uniqueness property.
    if (!existence_only && list.truncated) inconclusive = true;
  }
  if (inconclusive) {
    result.status = ProbeStatus::Inconclusive;
    result.note = "some factorization sets were not provably complete";
  }
  return result;
}

bool length_function_check(const MonoidDescriptor& m, const std::function<Integer(const GroupElement&)>& length,
                           const std::vector<GroupElement>& samples) {
  for (const auto& u : samples) {
    if (!contains(m, u).in()) throw DomainError("sample " + u.to_string() + " is not a member of " + m.to_string());
    if ((length(u) == 0) != u.is_zero()) return false;
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i; j < samples.size(); ++j) {
      if (length(samples[i] + samples[j]) < length(samples[i]) + length(samples[j])) return false;
    }
  }
  return true;
}

}  // namespace posmon
