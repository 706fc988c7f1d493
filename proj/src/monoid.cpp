#include "posmon/monoid.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <set>

#include "posmon/error.hpp"
#include "posmon/knapsack.hpp"

namespace posmon {

namespace {

bool is_prime(const Integer& p) { return p >= 2 && mpz_probab_prime_p(p.get_mpz_t(), 40) > 0; }

Integer mod_inverse(const Integer& a, const Integer& m) {
  Integer r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) throw DomainError("no modular inverse");
  return r;
}

Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Integer pow_int(const Integer& b, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

bool below_sqrt2(const Rational& s) { return s < 0 || s * s < 2; }

void check_geometric_parameter(const Rational& q) {
  if (q <= 0 || q >= 1) throw DomainError("q must satisfy 0 < q < 1, got " + format_rational(q));
  if (q.get_num() < 2) throw DomainError("1/q must not be an integer, got q = " + format_rational(q));
}

GroupElement triple_of(const Rational& c0, const Rational& c1 = 0, const Rational& c2 = 0) {
  return GroupElement::triple(c0, c1, c2);
}

std::vector<std::string> split_top_level(std::string_view text, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string current;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::string strip_parens(std::string s) {
  while (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    int depth = 0;
    bool wraps = true;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (depth == 0) {
        wraps = false;
        break;
      }
    }
    if (!wraps) break;
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

bool in_cone(const GroupElement& x, ConeRule rule) {
  if (rule == ConeRule::PositiveCone) return x.sign() >= 0;
  if (x.is_zero()) return true;
  return x.coordinates()[x.group().comparison_order().front()] > 0;
}

/// Members of a lex box |x_i| <= radius (rational coordinates in steps of 1/2).
std::vector<GroupElement> lex_box(const GroupId& group, long radius) {
  std::vector<GroupElement> out;
  std::vector<Rational> coords(group.rank());
  std::function<void(std::size_t)> fill = [&](std::size_t i) {
    if (i == group.rank()) {
      out.push_back(GroupElement::lex(group, coords));
      return;
    }
    const long steps = group.coord_is_rational(i) ? 2 : 1;
    for (long j = -radius * steps; j <= radius * steps; ++j) {
      coords[i] = Rational(j, steps);
      coords[i].canonicalize();
      fill(i + 1);
    }
  };
  fill(0);
  return out;
}

}  // namespace

// ------------------------------------------------------------- factories

MonoidDescriptor MonoidDescriptor::finite_generated(std::vector<GroupElement> gens) {
  if (gens.empty()) throw DomainError("a finitely generated monoid needs at least one generator");
  const GroupId group = gens.front().group();
  if (group.kind() != GroupKind::Rational) throw Unsupported("finitely generated monoids are supported over Z and Q only");
  for (const auto& g : gens) {
    if (!(g.group() == group)) throw GroupMismatch("generators live in different groups");
    if (!g.is_positive()) throw DomainError("generators must be positive: " + g.to_string());
  }
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  MonoidDescriptor m;
  m.family_ = Family::FiniteGenerated;
  m.group_ = group;
  m.gens_ = std::move(gens);
  return m;
}

MonoidDescriptor MonoidDescriptor::geometric_puiseux(const Rational& q) {
  check_geometric_parameter(q);
  MonoidDescriptor m;
  m.family_ = Family::GeometricPuiseux;
  m.group_ = GroupId::rationals();
  m.q_ = q;
  return m;
}

MonoidDescriptor MonoidDescriptor::prime_reciprocal() {
  MonoidDescriptor m;
  m.family_ = Family::PrimeReciprocal;
  m.group_ = GroupId::rationals();
  return m;
}

MonoidDescriptor MonoidDescriptor::conductive(const GroupElement& a) {
  if (!a.is_positive()) throw DomainError("conductive monoid needs a > 0, got " + a.to_string());
  MonoidDescriptor m;
  m.family_ = Family::Conductive;
  m.group_ = a.group();
  m.a_ = a;
  return m;
}

MonoidDescriptor MonoidDescriptor::lex_cone(const GroupId& group, ConeRule rule) {
  if (group.kind() != GroupKind::Lex) throw Unsupported("lex cones need a lexicographic group");
  MonoidDescriptor m;
  m.family_ = Family::LexCone;
  m.group_ = group;
  m.rule_ = rule;
  return m;
}

MonoidDescriptor MonoidDescriptor::product(const MonoidDescriptor& left, const MonoidDescriptor& right) {
  if (left.group().kind() != GroupKind::Rational || right.group().kind() != GroupKind::Rational) {
    throw Unsupported("products are supported for factors over Z or Q");
  }
  MonoidDescriptor m;
  m.family_ = Family::Product;
  m.group_ = GroupId::lex({left.group().coord_is_rational(0), right.group().coord_is_rational(0)}, 0);
  m.left_ = std::make_shared<const MonoidDescriptor>(left);
  m.right_ = std::make_shared<const MonoidDescriptor>(right);
  return m;
}

MonoidDescriptor MonoidDescriptor::union_difference_group(const MonoidDescriptor& base, const Rational& threshold) {
  if (base.family() != Family::PrimeReciprocal) throw Unsupported("difference-group tails are supported over M_0 only");
  if (threshold <= 0) throw DomainError("tail threshold must be positive");
  MonoidDescriptor m;
  m.family_ = Family::UnionShift;
  m.group_ = GroupId::rationals();
  m.left_ = std::make_shared<const MonoidDescriptor>(base);
  m.tail_ = TailRule::DifferenceGroupAtLeast;
  m.threshold_ = threshold;
  return m;
}

MonoidDescriptor MonoidDescriptor::union_localization(const MonoidDescriptor& base, const Integer& prime,
                                                      const Rational& threshold) {
  if (base.family() != Family::LocalizedNonnegative) {
    throw Unsupported("localization tails are supported over Z[1/r]_{>=0} only");
  }
  if (!is_prime(prime) || prime == base.prime()) throw DomainError("tail prime must be a prime different from the base prime");
  if (threshold <= 0) throw DomainError("tail threshold must be positive");
  MonoidDescriptor m;
  m.family_ = Family::UnionShift;
  m.group_ = GroupId::rationals();
  m.left_ = std::make_shared<const MonoidDescriptor>(base);
  m.tail_ = TailRule::LocalizationAtLeast;
  m.prime_ = prime;
  m.threshold_ = threshold;
  return m;
}

MonoidDescriptor MonoidDescriptor::localized_nonnegative(const Integer& prime) {
  if (!is_prime(prime)) throw DomainError("localization needs a prime, got " + prime.get_str());
  MonoidDescriptor m;
  m.family_ = Family::LocalizedNonnegative;
  m.group_ = GroupId::rationals();
  m.prime_ = prime;
  return m;
}

MonoidDescriptor MonoidDescriptor::alpha_beta(const Rational& q) {
  check_geometric_parameter(q);
  MonoidDescriptor m;
  m.family_ = Family::AlphaBeta;
  m.group_ = GroupId::quadratic_span();
  m.q_ = q;
  return m;
}

MonoidDescriptor MonoidDescriptor::nearly_atomic_alpha() {
  MonoidDescriptor m;
  m.family_ = Family::NearlyAtomicAlpha;
  m.group_ = GroupId::quadratic_span();
  return m;
}

// ------------------------------------------------------------ text forms

std::string element_short(const GroupElement& g) {
  std::string s = g.to_string();
  if (const auto at = s.find("@prio="); at != std::string::npos) s.resize(at);
  return s;
}

std::string MonoidDescriptor::to_string() const {
  switch (family_) {
    case Family::FiniteGenerated: {
      std::string out = group_.coord_is_rational(0) ? "pm:" : "nm:";
      for (std::size_t i = 0; i < gens_.size(); ++i) {
        if (i) out += ',';
        out += gens_[i].to_string();
      }
      return out;
    }
    case Family::GeometricPuiseux:
      return "mq:" + format_rational(q_);
    case Family::PrimeReciprocal:
      return "m0";
    case Family::Conductive:
      return "conductive:" + group_.to_string() + ":a=" + element_short(a_);
    case Family::LexCone:
      return "lexcone:" + group_.to_string() + (rule_ == ConeRule::OpenHalfSpace ? ":open" : ":positive");
    case Family::Product:
      return "product:(" + left_->to_string() + ")*(" + right_->to_string() + ")";
    case Family::UnionShift:
      if (tail_ == TailRule::DifferenceGroupAtLeast) return "union:(" + left_->to_string() + "):gp>=" + format_rational(threshold_);
      return "union:(" + left_->to_string() + "):Z[1/" + prime_.get_str() + "]>=" + format_rational(threshold_);
    case Family::LocalizedNonnegative:
      return "localized:" + prime_.get_str();
    case Family::AlphaBeta:
      return "alphabeta:" + format_rational(q_);
    case Family::NearlyAtomicAlpha:
      return "nearly-alpha";
  }
  return {};
}

MonoidDescriptor MonoidDescriptor::parse(std::string_view raw) {
  std::string text = strip_parens(std::string(raw));
  if (text == "almost") return union_difference_group(prime_reciprocal(), 1);
  if (text == "quasi") return union_localization(localized_nonnegative(2), 3, Rational(4, 3));
  if (text == "N0") return finite_generated({GroupElement::integer(1)});
  if (text == "m0") return prime_reciprocal();
  if (text == "nearly-alpha") return nearly_atomic_alpha();

  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("unknown instance '" + text + "'");
  const std::string family = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);

  if (family == "nm" || family == "pm") {
    const GroupId group = family == "nm" ? GroupId::integers() : GroupId::rationals();
    std::vector<GroupElement> gens;
    for (const auto& part : split_top_level(rest, ',')) gens.push_back(GroupElement::parse(group, part));
    return finite_generated(std::move(gens));
  }
  if (family == "mq") return geometric_puiseux(parse_rational(rest));
  if (family == "alphabeta") return alpha_beta(parse_rational(rest));
  if (family == "localized") return localized_nonnegative(Integer(rest));
  if (family == "conductive") {
    const auto marker = rest.find(":a=");
    if (marker == std::string::npos) throw ParseError("conductive instance needs ':a=<element>': '" + text + "'");
    const GroupId group = GroupId::parse(rest.substr(0, marker));
    return conductive(GroupElement::parse(group, rest.substr(marker + 3)));
  }
  if (family == "lexcone") {
    const auto marker = rest.rfind(':');
    if (marker == std::string::npos) throw ParseError("lexcone instance needs ':open' or ':positive': '" + text + "'");
    const std::string rule = rest.substr(marker + 1);
    if (rule != "open" && rule != "positive") throw ParseError("unknown cone rule '" + rule + "'");
    return lex_cone(GroupId::parse(rest.substr(0, marker)), rule == "open" ? ConeRule::OpenHalfSpace : ConeRule::PositiveCone);
  }
  if (family == "product") {
    const auto parts = split_top_level(rest, '*');
    if (parts.size() != 2) throw ParseError("product instance needs exactly two factors: '" + text + "'");
    return product(parse(parts[0]), parse(parts[1]));
  }
  if (family == "union") {
    const auto parts = split_top_level(rest, ':');
    if (parts.size() != 2) throw ParseError("union instance looks like union:(<base>):<tail>: '" + text + "'");
    const MonoidDescriptor base = parse(parts[0]);
    const std::string& tail = parts[1];
    if (tail.rfind("gp>=", 0) == 0) return union_difference_group(base, parse_rational(tail.substr(4)));
    if (tail.rfind("Z[1/", 0) == 0) {
      const auto close = tail.find("]>=");
      if (close == std::string::npos) throw ParseError("bad localization tail '" + tail + "'");
      return union_localization(base, Integer(tail.substr(4, close - 4)), parse_rational(tail.substr(close + 3)));
    }
    throw ParseError("unknown tail rule '" + tail + "'");
  }
  throw ParseError("unknown instance family '" + family + "'");
}

nlohmann::json MonoidDescriptor::to_json() const {
  nlohmann::json j;
  switch (family_) {
    case Family::FiniteGenerated: {
      j["family"] = "finite_generated";
      j["group"] = group_.to_string();
      auto& arr = j["generators"] = nlohmann::json::array();
      for (const auto& g : gens_) arr.push_back(g.to_string());
      break;
    }
    case Family::GeometricPuiseux:
      j["family"] = "geometric_puiseux";
      j["q"] = format_rational(q_);
      break;
    case Family::PrimeReciprocal:
      j["family"] = "prime_reciprocal";
      break;
    case Family::Conductive:
      j["family"] = "conductive";
      j["group"] = group_.to_string();
      j["a"] = a_.to_string();
      break;
    case Family::LexCone:
      j["family"] = "lex_cone";
      j["group"] = group_.to_string();
      j["rule"] = rule_ == ConeRule::OpenHalfSpace ? "open" : "positive";
      break;
    case Family::Product:
      j["family"] = "product";
      j["left"] = left_->to_json();
      j["right"] = right_->to_json();
      break;
    case Family::UnionShift:
      j["family"] = "union_shift";
      j["base"] = left_->to_json();
      j["tail"] = tail_ == TailRule::DifferenceGroupAtLeast ? "difference_group_at_least" : "localization_at_least";
      if (tail_ == TailRule::LocalizationAtLeast) j["prime"] = prime_.get_str();
      j["threshold"] = format_rational(threshold_);
      break;
    case Family::LocalizedNonnegative:
      j["family"] = "localized_nonnegative";
      j["prime"] = prime_.get_str();
      break;
    case Family::AlphaBeta:
      j["family"] = "alpha_beta";
      j["q"] = format_rational(q_);
      break;
    case Family::NearlyAtomicAlpha:
      j["family"] = "nearly_atomic_alpha";
      break;
  }
  return j;
}

MonoidDescriptor MonoidDescriptor::from_json(const nlohmann::json& j) {
  try {
    const std::string family = j.at("family").get<std::string>();
    if (family == "finite_generated") {
      const GroupId group = GroupId::parse(j.at("group").get<std::string>());
      std::vector<GroupElement> gens;
      for (const auto& g : j.at("generators")) gens.push_back(GroupElement::parse(group, g.get<std::string>()));
      return finite_generated(std::move(gens));
    }
    if (family == "geometric_puiseux") return geometric_puiseux(parse_rational(j.at("q").get<std::string>()));
    if (family == "prime_reciprocal") return prime_reciprocal();
    if (family == "conductive") {
      const GroupId group = GroupId::parse(j.at("group").get<std::string>());
      return conductive(GroupElement::parse(group, j.at("a").get<std::string>()));
    }
    if (family == "lex_cone") {
      const std::string rule = j.at("rule").get<std::string>();
      if (rule != "open" && rule != "positive") throw ParseError("unknown cone rule '" + rule + "'");
      return lex_cone(GroupId::parse(j.at("group").get<std::string>()),
                      rule == "open" ? ConeRule::OpenHalfSpace : ConeRule::PositiveCone);
    }
    if (family == "product") return product(from_json(j.at("left")), from_json(j.at("right")));
    if (family == "union_shift") {
      const std::string tail = j.at("tail").get<std::string>();
      const Rational t = parse_rational(j.at("threshold").get<std::string>());
      if (tail == "difference_group_at_least") return union_difference_group(from_json(j.at("base")), t);
      if (tail == "localization_at_least") {
        return union_localization(from_json(j.at("base")), Integer(j.at("prime").get<std::string>()), t);
      }
      throw ParseError("unknown tail rule '" + tail + "'");
    }
    if (family == "localized_nonnegative") return localized_nonnegative(Integer(j.at("prime").get<std::string>()));
    if (family == "alpha_beta") return alpha_beta(parse_rational(j.at("q").get<std::string>()));
    if (family == "nearly_atomic_alpha") return nearly_atomic_alpha();
    throw ParseError("unknown descriptor family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed descriptor json: ") + e.what());
  }
}

// ---------------------------------------------------- prime injections

Integer nth_prime(std::uint64_t index) { return Integer(static_cast<unsigned long>(first_primes(index + 1).back())); }

Rational nonnegative_rational_at(std::uint64_t index) {
  if (index == 0) return Rational(0);
  int top = 63;
  while (((index >> top) & 1U) == 0) --top;
  Integer a = 1, b = 1;
  for (int bit = top - 1; bit >= 0; --bit) {
    if ((index >> bit) & 1U) {
      a += b;  // right child (a+b)/b
    } else {
      b += a;  // left child a/(a+b)
    }
  }
  return Rational(a, b);
}

std::optional<std::uint64_t> nonnegative_rational_index(const Rational& q) {
  if (q < 0) return std::nullopt;
  if (q == 0) return 0;
  Integer a = q.get_num(), b = q.get_den();
  std::uint64_t index = 0;
  int bits = 0;
  while (!(a == 1 && b == 1)) {
    if (bits >= 62) return std::nullopt;
    if (a < b) {
      b -= a;
    } else {
      a -= b;
      index |= (std::uint64_t{1} << bits);
    }
    ++bits;
  }
  return index | (std::uint64_t{1} << bits);
}

namespace {

class Discovery {
 public:
  explicit Discovery(const Rational& q) : q_(q) {
    order_.push_back(Rational(0));
    seen_.insert(Rational(0));
  }

  // Extends stage by stage until at least `count` elements (or `budget`
  // stages) are known. Caller holds the lock.
  void extend_to(std::size_t count) {
    while (order_.size() < count && stage_ < 64) next_stage();
  }

  std::optional<std::size_t> find(const Rational& s, std::size_t budget) {
    while (true) {
      if (auto it = index_.find(s); it != index_.end()) return it->second;
      if (order_.size() >= budget || stage_ >= 64) return std::nullopt;
      next_stage();
    }
  }

  const std::vector<Rational>& order() const { return order_; }

 private:
  void next_stage() {
    ++stage_;
    std::vector<Rational> powers;
    for (std::size_t n = 0; n <= stage_; ++n) powers.push_back(pow(q_, static_cast<unsigned>(n)));
    std::set<Rational> fresh;
    std::function<void(std::size_t, std::size_t, const Rational&)> walk = [&](std::size_t from, std::size_t used,
                                                                              const Rational& sum) {
      if (used > 0 && !seen_.count(sum)) fresh.insert(sum);
      if (used == stage_) return;
      for (std::size_t n = from; n < powers.size(); ++n) {
        Rational next = sum + powers[n];
        if (!below_sqrt2(next)) continue;
        walk(n, used + 1, next);
      }
    };
    walk(0, 0, Rational(0));
    for (const auto& s : fresh) {
      index_.emplace(s, order_.size());
      order_.push_back(s);
      seen_.insert(s);
    }
  }

  Rational q_;
  std::size_t stage_ = 0;
  std::vector<Rational> order_;
  std::set<Rational> seen_;
  std::map<Rational, std::size_t> index_{{Rational(0), 0}};
};

std::mutex& discovery_mutex() {
  static std::mutex m;
  return m;
}

Discovery& discovery_for(const Rational& q) {
  static std::map<Rational, std::unique_ptr<Discovery>> table;
  auto& slot = table[q];
  if (!slot) slot = std::make_unique<Discovery>(q);
  return *slot;
}

}  // namespace

std::vector<Rational> alpha_beta_discovery(const Rational& q, std::size_t count) {
  check_geometric_parameter(q);
  std::lock_guard lock(discovery_mutex());
  auto& d = discovery_for(q);
  d.extend_to(count);
  const auto& order = d.order();
  return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(count, order.size()))};
}

std::optional<std::size_t> alpha_beta_index(const Rational& q, const Rational& s, std::size_t budget) {
  check_geometric_parameter(q);
  if (!below_sqrt2(s) || s < 0) return std::nullopt;
  if (!contains(MonoidDescriptor::geometric_puiseux(q), GroupElement::rational(s)).in()) return std::nullopt;
  std::lock_guard lock(discovery_mutex());
  return discovery_for(q).find(s, budget);
}

// ----------------------------------------------------------- windows

namespace {

std::vector<GroupElement> build_window(const MonoidDescriptor& m, std::size_t d) {
  std::vector<GroupElement> out;
  const auto sort_unique = [&out] {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  };
  switch (m.family()) {
    case Family::FiniteGenerated:
      return m.generators();
    case Family::GeometricPuiseux:
      for (std::size_t n = 0; n <= d; ++n) out.push_back(GroupElement::rational(pow(m.q(), static_cast<unsigned>(n))));
      return out;
    case Family::PrimeReciprocal:
      for (auto p : first_primes(d)) out.push_back(GroupElement::rational(Rational(1, static_cast<unsigned long>(p))));
      return out;
    case Family::LocalizedNonnegative:
      for (std::size_t j = 0; j <= d; ++j) {
        out.push_back(GroupElement::rational(Rational(Integer(1), pow_int(m.prime(), j))));
      }
      return out;
    case Family::Conductive: {
      const GroupId& g = m.group();
      if (g.kind() == GroupKind::Lex) {
        const long radius = static_cast<long>(g.rank() <= 2 ? d : std::min<std::size_t>(d, 3));
        for (auto& x : lex_box(g, radius)) {
          if (x >= m.a()) out.push_back(std::move(x));
        }
        sort_unique();
        return out;
      }
      if (g.kind() == GroupKind::Rational && !g.coord_is_rational(0)) {
        for (std::size_t j = 0; j <= d; ++j) out.push_back(m.a() + GroupElement::integer(static_cast<long>(j)));
        return out;
      }
      for (std::size_t k = 1; k <= d; ++k) {
        for (std::size_t j = 0; j <= k; ++j) {
          out.push_back(scale(Rational(static_cast<long>(k + j), static_cast<long>(k)), m.a()));
        }
      }
      sort_unique();
      return out;
    }
    case Family::LexCone: {
      const GroupId& g = m.group();
      const long radius = static_cast<long>(g.rank() <= 2 ? d : std::min<std::size_t>(d, 3));
      for (auto& x : lex_box(g, radius)) {
        if (!x.is_zero() && in_cone(x, m.rule())) out.push_back(std::move(x));
      }
      sort_unique();
      return out;
    }
    case Family::Product: {
      const GroupId& g = m.group();
      for (const auto& x : generators(m.left(), d)->gens) {
        out.push_back(GroupElement::lex(g, {x.as_rational(), Rational(0)}));
      }
      for (const auto& y : generators(m.right(), d)->gens) {
        out.push_back(GroupElement::lex(g, {Rational(0), y.as_rational()}));
      }
      return out;
    }
    case Family::UnionShift: {
      out = generators(m.base(), d)->gens;
      const Rational& t = m.threshold();
      if (m.tail() == TailRule::DifferenceGroupAtLeast) {
        out.push_back(GroupElement::rational(t));
        for (auto p : first_primes(d)) {
          out.push_back(GroupElement::rational(t + Rational(1, static_cast<unsigned long>(p))));
        }
      } else {
        // tail generators below 2t suffice: anything >= 2t splits off t
        const std::size_t levels = (d + 2) / 3;
        for (std::size_t k = 1; k <= levels; ++k) {
          const Integer den = pow_int(m.prime(), k);
          for (Integer j = ceil_of(t * den); Rational(j, den) < 2 * t; ++j) {
            if (j % m.prime() == 0) continue;
            out.push_back(GroupElement::rational(Rational(j, den)));
          }
        }
      }
      sort_unique();
      return out;
    }
    case Family::AlphaBeta: {
      const auto s = alpha_beta_discovery(m.q(), d);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const Integer p = nth_prime(i);
        if (s[i] != 0) out.push_back(triple_of(s[i]));
        out.push_back(triple_of(-s[i] / p, Rational(1) / p, 0));
        out.push_back(triple_of(-s[i] / p, 0, Rational(1) / p));
      }
      return out;
    }
    case Family::NearlyAtomicAlpha:
      for (std::uint64_t i = 0; i < d; ++i) {
        const Rational q = nonnegative_rational_at(i);
        const Integer p = nth_prime(i);
        if (q != 0) out.push_back(triple_of(q));
        out.push_back(triple_of(q / p, Rational(1) / p, 0));
      }
      return out;
  }
  return out;
}

}  // namespace

std::shared_ptr<const GeneratorWindow> generators(const MonoidDescriptor& m, std::size_t depth) {
  if (depth == 0) throw DomainError("window depth must be at least 1");
  static std::mutex mutex;
  static std::map<std::pair<std::string, std::size_t>, std::shared_ptr<const GeneratorWindow>> cache;
  const auto key = std::make_pair(m.to_string(), depth);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto window = std::make_shared<GeneratorWindow>();
  window->label = key.first + "@depth=" + std::to_string(depth);
  window->depth = depth;
  window->gens = build_window(m, depth);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(window)).first->second;
}

// ------------------------------------------------------- generator test

namespace {

/// Exponent n with g = q^n, if any.
std::optional<unsigned long> geometric_exponent(const Rational& q, const Rational& g) {
  if (g <= 0) return std::nullopt;
  const long e = divides_power_exponent(g.get_den(), q.get_den());
  if (e < 0) return std::nullopt;
  if (pow(q, static_cast<unsigned>(e)) == g) return static_cast<unsigned long>(e);
  return std::nullopt;
}

}  // namespace

bool is_defining_generator(const MonoidDescriptor& m, const GroupElement& g) {
  if (!(g.group() == m.group())) return false;
  switch (m.family()) {
    case Family::FiniteGenerated:
      return std::find(m.generators().begin(), m.generators().end(), g) != m.generators().end();
    case Family::GeometricPuiseux:
      return geometric_exponent(m.q(), g.as_rational()).has_value();
    case Family::PrimeReciprocal: {
      const Rational& x = g.as_rational();
      return x.get_num() == 1 && is_prime(x.get_den());
    }
    case Family::LocalizedNonnegative: {
      const Rational& x = g.as_rational();
      return x.get_num() == 1 && divides_power_exponent(x.get_den(), m.prime()) >= 0;
    }
    case Family::Conductive:
      return g >= m.a();
    case Family::LexCone:
      return !g.is_zero() && in_cone(g, m.rule());
    case Family::Product: {
      const auto& c = g.as_lex().coords;
      if (c[1] == 0 && c[0] != 0) return is_defining_generator(m.left(), GroupElement::rational(c[0], m.left().group()));
      if (c[0] == 0 && c[1] != 0) return is_defining_generator(m.right(), GroupElement::rational(c[1], m.right().group()));
      return false;
    }
    case Family::UnionShift: {
      if (is_defining_generator(m.base(), g)) return true;
      const Rational& x = g.as_rational();
      if (x < m.threshold()) return false;
      if (m.tail() == TailRule::DifferenceGroupAtLeast) return is_squarefree(x.get_den());
      return divides_power_exponent(x.get_den(), m.prime()) >= 0;
    }
    case Family::AlphaBeta: {
      const auto& t = g.as_triple();
      const MonoidDescriptor mq = MonoidDescriptor::geometric_puiseux(m.q());
      if (t.c1 == 0 && t.c2 == 0) return t.c0 > 0 && below_sqrt2(t.c0) && contains(mq, GroupElement::rational(t.c0)).in();
      const Rational coeff = t.c1 != 0 ? t.c1 : t.c2;
      if ((t.c1 != 0) == (t.c2 != 0) || coeff <= 0 || coeff.get_num() != 1) return false;
      const Integer p = coeff.get_den();
      const Rational s = -t.c0 * p;
      const auto index = alpha_beta_index(m.q(), s);
      return index && nth_prime(*index) == p;
    }
    case Family::NearlyAtomicAlpha: {
      const auto& t = g.as_triple();
      if (t.c2 != 0) return false;
      if (t.c1 == 0) return t.c0 > 0;
      if (t.c1 < 0 || t.c1.get_num() != 1) return false;
      const Integer p = t.c1.get_den();
      const auto index = nonnegative_rational_index(t.c0 * p);
      return index && *index < 5'000'000 && nth_prime(*index) == p;
    }
  }
  return false;
}

// ---------------------------------------------------------- certificates

GroupElement Certificate::total(const GroupId& group) const {
  GroupElement sum = GroupElement::zero(group);
  for (const auto& [g, c] : terms) sum = sum + scale(c, g);
  return sum;
}

nlohmann::json Certificate::to_json() const {
  nlohmann::json j;
  j["window"] = window;
  auto& arr = j["terms"] = nlohmann::json::array();
  for (const auto& [g, c] : terms) arr.push_back({{"generator", g.to_string()}, {"coefficient", c.get_str()}});
  return j;
}

Certificate Certificate::from_json(const GroupId& group, const nlohmann::json& j) {
  try {
    Certificate cert;
    cert.window = j.at("window").get<std::string>();
    for (const auto& t : j.at("terms")) {
      cert.terms.emplace_back(GroupElement::parse(group, t.at("generator").get<std::string>()),
                              Integer(t.at("coefficient").get<std::string>()));
    }
    return cert;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed certificate json: ") + e.what());
  }
}

bool replay(const MonoidDescriptor& m, const GroupElement& x, const Certificate& cert) {
  for (const auto& [g, c] : cert.terms) {
    if (c <= 0 || !is_defining_generator(m, g)) return false;
  }
  return cert.total(m.group()) == x;
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::In:
      return "In";
    case Membership::Out:
      return "Out";
    case Membership::UnknownAtDepth:
      return "UnknownAtDepth";
  }
  return {};
}

// ------------------------------------------------------------ membership

namespace {

MembershipVerdict verdict_in(std::size_t depth, Certificate cert) {
  MembershipVerdict v;
  v.status = Membership::In;
  v.depth = depth;
  v.certificate = std::move(cert);
  return v;
}

MembershipVerdict verdict(Membership status, std::size_t depth) {
  MembershipVerdict v;
  v.status = status;
  v.depth = depth;
  return v;
}

/// Coefficients c_n of the canonical representation x = sum c_n q^n with
/// 0 <= c_n < d(q) for n >= 1; nullopt when x is not in M_q.
std::optional<std::vector<Integer>> geometric_digits(const Rational& q, const Rational& x) {
  const Integer& num = q.get_num();
  const Integer& den = q.get_den();
  const long e = divides_power_exponent(x.get_den(), den);
  if (e < 0) return std::nullopt;
  // A canonical representation with top index n has d(x) not dividing
  // den^(n-1), so n <= e and K = e digits suffice.
  const auto K = static_cast<unsigned long>(e);
  Rational scaled = x * pow_int(den, K);
  Integer X = scaled.get_num();
  const Integer inv = mod_inverse(mod_floor(num, den), den);
  std::vector<Integer> digits(K + 1, 0);
  for (unsigned long n = K; n >= 1; --n) {
    const Integer nn = pow_int(num, n);
    digits[n] = mod_floor(mod_floor(X, den) * pow_int(inv, n), den);
    X = (X - digits[n] * nn) / den;
  }
  if (X < 0) return std::nullopt;
  digits[0] = X;
  return digits;
}

MembershipVerdict contains_geometric(const MonoidDescriptor& m, const Rational& x, std::size_t depth,
                                     const std::string& label) {
  const auto digits = geometric_digits(m.q(), x);
  if (!digits) return verdict(Membership::Out, depth);
  Certificate cert{label, {}};
  for (std::size_t n = 0; n < digits->size(); ++n) {
    if ((*digits)[n] != 0) cert.terms.emplace_back(GroupElement::rational(pow(m.q(), static_cast<unsigned>(n))), (*digits)[n]);
  }
  return verdict_in(depth, std::move(cert));
}

/// Forced residues r_p for x = n/d with d squarefree: any representation
/// sum c_p / p has c_p = r_p (mod p) for p | d.
std::vector<std::pair<Integer, Integer>> prime_residues(const Rational& x) {
  std::vector<std::pair<Integer, Integer>> out;
  const Integer& d = x.get_den();
  for (const auto& p : prime_factors(d)) {
    const Integer cofactor = d / p;
    out.emplace_back(p, mod_floor(x.get_num() * mod_inverse(mod_floor(cofactor, p), p), p));
  }
  return out;
}

MembershipVerdict contains_prime_reciprocal(const Rational& x, std::size_t depth, const std::string& label) {
  if (!is_squarefree(x.get_den())) return verdict(Membership::Out, depth);
  Rational rest = x;
  std::map<Integer, Integer> coeff;
  for (const auto& [p, r] : prime_residues(x)) {
    if (r == 0) continue;
    coeff[p] += r;
    rest -= Rational(r, p);
  }
  rest.canonicalize();
  if (rest < 0) return verdict(Membership::Out, depth);
  if (!is_integer(rest)) throw Error("internal: prime residues left a fraction");
  if (rest > 0) coeff[Integer(2)] += 2 * rest.get_num();
  Certificate cert{label, {}};
  for (const auto& [p, c] : coeff) cert.terms.emplace_back(GroupElement::rational(Rational(Integer(1), p)), c);
  return verdict_in(depth, std::move(cert));
}

MembershipVerdict contains_localized(const Integer& prime, const Rational& x, std::size_t depth, const std::string& label) {
  const long e = divides_power_exponent(x.get_den(), prime);
  if (e < 0) return verdict(Membership::Out, depth);
  Certificate cert{label, {}};
  if (x > 0) {
    const Integer pe = pow_int(prime, static_cast<unsigned long>(e));
    cert.terms.emplace_back(GroupElement::rational(Rational(Integer(1), pe)), Rational(x * pe).get_num());
  }
  return verdict_in(depth, std::move(cert));
}

MembershipVerdict contains_union(const MonoidDescriptor& m, const Rational& x, std::size_t depth, const std::string& label) {
  const GroupElement xe = GroupElement::rational(x);
  if (m.tail() == TailRule::DifferenceGroupAtLeast) {
    auto base = contains_prime_reciprocal(x, depth, label);
    if (base.in()) return base;
    if (x >= m.threshold() && is_squarefree(x.get_den())) return verdict_in(depth, Certificate{label, {{xe, Integer(1)}}});
    return verdict(Membership::Out, depth);
  }
  // <Z[1/r]_{>=0} u Z[1/p]_{>=t}>: x = d + T with d in Z[1/r]_{>=0} and T in
  // Z[1/p]; d is determined modulo Z, so the smallest d in [0,1) leaves the
  // largest T, and x is a member iff that T reaches t.
  const Integer& r = m.base().prime();
  const Integer& p = m.prime();
  Integer den = x.get_den();
  unsigned long a = 0, b = 0;
  while (den % r == 0) {
    den /= r;
    ++a;
  }
  while (den % p == 0) {
    den /= p;
    ++b;
  }
  if (den != 1) return verdict(Membership::Out, depth);
  if (b == 0) return contains_localized(r, x, depth, label);
  const Integer ra = pow_int(r, a), pb = pow_int(p, b);
  const Integer u = a == 0 ? Integer(0) : mod_floor(x.get_num() * mod_inverse(mod_floor(pb, ra), ra), ra);
  Rational T = x - Rational(u, ra);
  T.canonicalize();
  if (T < m.threshold()) return verdict(Membership::Out, depth);
  Certificate cert{label, {}};
  if (u != 0) cert.terms.emplace_back(GroupElement::rational(Rational(Integer(1), ra)), u);
  cert.terms.emplace_back(GroupElement::rational(T), Integer(1));
  return verdict_in(depth, std::move(cert));
}

Certificate lift_rational_certificate(const Certificate& c) {
  Certificate out{c.window, {}};
  for (const auto& [g, k] : c.terms) out.terms.emplace_back(triple_of(g.as_rational()), k);
  return out;
}

MembershipVerdict contains_alpha_beta(const MonoidDescriptor& m, const AlgebraicTriple& x, std::size_t depth,
                                      const std::string& label) {
  const MonoidDescriptor mq = MonoidDescriptor::geometric_puiseux(m.q());
  if (x.c1 < 0 || x.c2 < 0) return verdict(Membership::Out, depth);
  if (x.c1 == 0 && x.c2 == 0) {
    auto v = contains_geometric(mq, x.c0, depth, label);
    if (v.in()) v.certificate = lift_rational_certificate(*v.certificate);
    return v;
  }
  // distinct primes in the irrational coordinates force the residues
  if (!is_squarefree(x.c1.get_den()) || !is_squarefree(x.c2.get_den())) return verdict(Membership::Out, depth);
  const auto s = alpha_beta_discovery(m.q(), depth);
  std::map<Integer, std::size_t> slot;
  for (std::size_t i = 0; i < s.size(); ++i) slot[nth_prime(i)] = i;

  struct Part {
    std::vector<Integer> counts;  // per window index
    Integer units;
  };
  auto split = [&](const Rational& c, Part& part) -> Membership {
    part.counts.assign(s.size(), 0);
    Rational rest = c;
    for (const auto& [p, r] : prime_residues(c)) {
      auto it = slot.find(p);
      if (it == slot.end()) return Membership::UnknownAtDepth;
      part.counts[it->second] = r;
      rest -= Rational(r, p);
    }
    rest.canonicalize();
    if (rest < 0) return Membership::Out;
    part.units = rest.get_num();
    return Membership::In;
  };
  Part alpha, beta;
  for (Part* part : {&alpha, &beta}) {
    const auto status = split(part == &alpha ? x.c1 : x.c2, *part);
    if (status != Membership::In) return verdict(status, depth);
  }

  // Rational remainder after removing the forced atoms; every full unit of
  // index i adds s_i to it.
  Rational base = x.c0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Integer p = nth_prime(i);
    base += (alpha.counts[i] + beta.counts[i]) * s[i] / p;
  }
  constexpr std::size_t kBudget = 20000;
  std::size_t visited = 0;
  std::vector<Integer> ua(s.size(), 0), ub(s.size(), 0);
  std::optional<MembershipVerdict> found;
  // distribute units over window indices, nondecreasing index
  std::function<bool(std::vector<Integer>&, std::size_t, Integer, const std::function<bool()>&)> spread =
      [&](std::vector<Integer>& u, std::size_t from, Integer left, const std::function<bool()>& next) -> bool {
    if (left == 0) return next();
    for (std::size_t i = from; i < u.size(); ++i) {
      ++u[i];
      const bool go = spread(u, i, left - 1, next);
      --u[i];
      if (!go) return false;
    }
    return true;
  };
  const std::function<bool()> check = [&]() -> bool {
    if (++visited > kBudget) return false;
    Rational r = base;
    for (std::size_t i = 0; i < s.size(); ++i) r += (ua[i] + ub[i]) * s[i];
    auto v = contains_geometric(mq, r, depth, label);
    if (!v.in()) return true;
    Certificate cert{label, {}};
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Integer p = nth_prime(i);
      const Integer ca = alpha.counts[i] + ua[i] * p, cb = beta.counts[i] + ub[i] * p;
      if (ca != 0) cert.terms.emplace_back(triple_of(-s[i] / p, Rational(1) / p, 0), ca);
      if (cb != 0) cert.terms.emplace_back(triple_of(-s[i] / p, 0, Rational(1) / p), cb);
    }
    for (const auto& t : lift_rational_certificate(*v.certificate).terms) cert.terms.push_back(t);
    found = verdict_in(depth, std::move(cert));
    return false;
  };
  const std::function<bool()> after_alpha = [&]() -> bool { return spread(ub, 0, beta.units, check); };
  spread(ua, 0, alpha.units, after_alpha);
  if (found) return *found;
  return verdict(Membership::UnknownAtDepth, depth);
}

MembershipVerdict contains_nearly(const AlgebraicTriple& x, std::size_t depth, const std::string& label) {
  if (x.c2 != 0 || x.c1 < 0) return verdict(Membership::Out, depth);
  if (x.c1 == 0) {
    if (x.c0 < 0) return verdict(Membership::Out, depth);
    Certificate cert{label, {}};
    if (x.c0 > 0) cert.terms.emplace_back(triple_of(x.c0), Integer(1));
    return verdict_in(depth, std::move(cert));
  }
  if (!is_squarefree(x.c1.get_den())) return verdict(Membership::Out, depth);
  // The forced residue at prime p is paid with the generator (alpha+q_p)/p;
  // whole units go to q = 0 (phi(0) = 2) at no rational cost.
  std::map<Integer, std::pair<Rational, Integer>> atoms;  // prime -> (q_p, count)
  Rational rest = x.c1;
  Rational cost = 0;
  for (const auto& [p, r] : prime_residues(x.c1)) {
    if (p > 10'000'000) return verdict(Membership::UnknownAtDepth, depth);
    const long index = prime_index(p.get_ui());
    const Rational q = nonnegative_rational_at(static_cast<std::uint64_t>(index));
    atoms[p] = {q, r};
    rest -= Rational(r, p);
    cost += r * q / p;
  }
  rest.canonicalize();
  if (rest < 0 || cost > x.c0) return verdict(Membership::Out, depth);
  auto& two = atoms[Integer(2)];
  two.second += 2 * rest.get_num();
  Certificate cert{label, {}};
  for (const auto& [p, entry] : atoms) {
    if (entry.second != 0) cert.terms.emplace_back(triple_of(entry.first / p, Rational(1) / p, 0), entry.second);
  }
  Rational leftover = x.c0 - cost;
  leftover.canonicalize();
  if (leftover > 0) cert.terms.emplace_back(triple_of(leftover), Integer(1));
  return verdict_in(depth, std::move(cert));
}

}  // namespace

MembershipVerdict contains(const MonoidDescriptor& m, const GroupElement& x, std::size_t depth) {
  if (!(x.group() == m.group())) {
    throw GroupMismatch("element of " + x.group().to_string() + " tested against a monoid of " + m.group().to_string());
  }
  if (x.sign() < 0) throw DomainError("membership needs x >= 0, got " + x.to_string());
  const std::string label = m.to_string() + "@depth=" + std::to_string(depth);
  if (x.is_zero()) return verdict_in(depth, Certificate{label, {}});

  switch (m.family()) {
    case Family::FiniteGenerated: {
      KnapsackOptions options;
      options.stop_at_first = true;
      const auto result = solve_knapsack(m.generators(), x, options);
      if (result.solutions.empty()) return verdict(Membership::Out, depth);
      Certificate cert{label, {}};
      for (std::size_t i = 0; i < result.items.size(); ++i) {
        if (result.solutions[0][i] != 0) cert.terms.emplace_back(result.items[i], result.solutions[0][i]);
      }
      return verdict_in(depth, std::move(cert));
    }
    case Family::GeometricPuiseux:
      return contains_geometric(m, x.as_rational(), depth, label);
    case Family::PrimeReciprocal:
      return contains_prime_reciprocal(x.as_rational(), depth, label);
    case Family::LocalizedNonnegative:
      return contains_localized(m.prime(), x.as_rational(), depth, label);
    case Family::Conductive:
      if (x >= m.a()) return verdict_in(depth, Certificate{label, {{x, Integer(1)}}});
      return verdict(Membership::Out, depth);
    case Family::LexCone:
      if (in_cone(x, m.rule())) return verdict_in(depth, Certificate{label, {{x, Integer(1)}}});
      return verdict(Membership::Out, depth);
    case Family::Product: {
      const auto& c = x.as_lex().coords;
      if (c[0] < 0) return verdict(Membership::Out, depth);
      const GroupElement x0 = GroupElement::rational(c[0], m.left().group());
      const auto left = contains(m.left(), x0, depth);
      if (left.out()) return left;
      if (c[1] < 0) return verdict(Membership::Out, depth);
      const GroupElement x1 = GroupElement::rational(c[1], m.right().group());
      const auto right = contains(m.right(), x1, depth);
      if (right.out()) return right;
      if (left.unknown() || right.unknown()) return verdict(Membership::UnknownAtDepth, depth);
      Certificate cert{label, {}};
      for (const auto& [g, k] : left.certificate->terms) {
        cert.terms.emplace_back(GroupElement::lex(m.group(), {g.as_rational(), Rational(0)}), k);
      }
      for (const auto& [g, k] : right.certificate->terms) {
        cert.terms.emplace_back(GroupElement::lex(m.group(), {Rational(0), g.as_rational()}), k);
      }
      return verdict_in(depth, std::move(cert));
    }
    case Family::UnionShift:
      return contains_union(m, x.as_rational(), depth, label);
    case Family::AlphaBeta:
      return contains_alpha_beta(m, x.as_triple(), depth, label);
    case Family::NearlyAtomicAlpha:
      return contains_nearly(x.as_triple(), depth, label);
  }
  throw Unsupported("membership not implemented for " + m.to_string());
}

MembershipVerdict divides(const MonoidDescriptor& m, const GroupElement& d, const GroupElement& x, std::size_t depth) {
  const GroupElement diff = x - d;
  if (diff.sign() < 0) {
    MembershipVerdict v;
    v.status = Membership::Out;
    v.depth = depth;
    return v;
  }
  return contains(m, diff, depth);
}

// ---------------------------------------------------------- difference groups

bool gp_membership(const MonoidDescriptor& m, const GroupElement& x, GroupScope scope) {
  if (!(x.group() == m.group())) throw GroupMismatch("element and monoid live in different groups");
  switch (m.family()) {
    case Family::FiniteGenerated: {
      Integer lcm = 1;
      for (const auto& g : m.generators()) lcm = lcm_of(lcm, g.as_rational().get_den());
      Integer gcd = 0;
      for (const auto& g : m.generators()) gcd = gcd_of(gcd, Rational(g.as_rational() * lcm).get_num());
      const Rational ratio = x.as_rational() * lcm / gcd;
      return is_integer(ratio);
    }
    case Family::GeometricPuiseux:
      return divides_power_exponent(x.as_rational().get_den(), m.q().get_den()) >= 0;
    case Family::PrimeReciprocal:
      return is_squarefree(x.as_rational().get_den());
    case Family::LocalizedNonnegative:
      // antimatter: the atomic submonoid is trivial
      if (scope == GroupScope::AtomicSubmonoid) return x.is_zero();
      return divides_power_exponent(x.as_rational().get_den(), m.prime()) >= 0;
    case Family::UnionShift: {
      const Integer& den = x.as_rational().get_den();
      if (m.tail() == TailRule::DifferenceGroupAtLeast) return is_squarefree(den);
      if (scope == GroupScope::AtomicSubmonoid) return divides_power_exponent(den, m.prime()) >= 0;
      return divides_power_exponent(den, m.prime() * m.base().prime()) >= 0;
    }
    case Family::Conductive:
      if (m.group().kind() == GroupKind::Rational) return true;
      break;
    default:
      break;
  }
  throw Unsupported("difference-group membership is not available for " + m.to_string());
}

}  // namespace posmon
