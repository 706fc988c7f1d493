#include "posmon/group.hpp"

#include <algorithm>
#include <cctype>

#include "posmon/error.hpp"

namespace posmon {

// ---------------------------------------------------------------- GroupId

GroupId GroupId::integers() { return GroupId{}; }

GroupId GroupId::rationals() {
  GroupId g;
  g.rational_mask_ = 1;
  return g;
}

GroupId GroupId::quadratic_span() {
  GroupId g;
  g.kind_ = GroupKind::Algebraic;
  g.rank_ = 3;
  g.rational_mask_ = 0b111;
  return g;
}

GroupId GroupId::lex(const std::vector<bool>& rational_coords, std::size_t priority) {
  if (rational_coords.empty() || rational_coords.size() > kMaxLexRank) {
    throw DomainError("lexicographic rank must be in [1, " + std::to_string(kMaxLexRank) + "]");
  }
  if (priority >= rational_coords.size()) throw DomainError("priority coordinate out of range");
  GroupId g;
  g.kind_ = GroupKind::Lex;
  g.rank_ = static_cast<std::uint8_t>(rational_coords.size());
  g.priority_ = static_cast<std::uint8_t>(priority);
  for (std::size_t i = 0; i < rational_coords.size(); ++i) {
    if (rational_coords[i]) g.rational_mask_ |= static_cast<std::uint8_t>(1U << i);
  }
  return g;
}

GroupId GroupId::lex_integers(std::size_t rank, std::size_t priority) {
  return lex(std::vector<bool>(rank, false), priority);
}

GroupId GroupId::parse(std::string_view text) {
  const std::string original(text);
  std::size_t priority = 0;
  bool lex_marker = false;
  if (const auto at = text.find("@prio="); at != std::string_view::npos) {
    const std::string_view digits = text.substr(at + 6);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw ParseError("bad priority in group '" + original + "'");
    }
    priority = std::stoul(std::string(digits));
    text = text.substr(0, at);
    lex_marker = true;
  }
  if (!lex_marker) {
    if (text == "Z") return integers();
    if (text == "Q") return rationals();
    if (text == "R3") return quadratic_span();
  }
  std::vector<bool> domains;
  if (text.size() >= 2 && (text[0] == 'Z' || text[0] == 'Q') &&
      std::all_of(text.begin() + 1, text.end(), [](unsigned char c) { return std::isdigit(c); })) {
    const std::size_t rank = std::stoul(std::string(text.substr(1)));
    domains.assign(rank, text[0] == 'Q');
  } else {
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if (i % 2 == 1) {
        if (c != 'x') throw ParseError("bad group '" + original + "'");
        continue;
      }
      if (c != 'Z' && c != 'Q') throw ParseError("bad group '" + original + "'");
      domains.push_back(c == 'Q');
    }
    if (text.empty() || text.size() % 2 == 0) throw ParseError("bad group '" + original + "'");
  }
  if (domains.empty() || domains.size() > kMaxLexRank) {
    throw DomainError("lexicographic rank must be in [1, " + std::to_string(kMaxLexRank) + "]: '" + original + "'");
  }
  if (priority >= domains.size()) throw DomainError("priority out of range in '" + original + "'");
  return lex(domains, priority);
}

std::string GroupId::to_string() const {
  switch (kind_) {
    case GroupKind::Rational:
      return coord_is_rational(0) ? "Q" : "Z";
    case GroupKind::Algebraic:
      return "R3";
    case GroupKind::Lex: {
      std::string out;
      for (std::size_t i = 0; i < rank_; ++i) {
        if (i) out += 'x';
        out += coord_is_rational(i) ? 'Q' : 'Z';
      }
      return out + "@prio=" + std::to_string(priority_);
    }
  }
  return {};
}

std::vector<std::size_t> GroupId::comparison_order() const {
  std::vector<std::size_t> order;
  if (kind_ != GroupKind::Lex) {
    order.push_back(0);
    return order;
  }
  order.push_back(priority_);
  for (std::size_t i = 0; i < rank_; ++i) {
    if (i != priority_) order.push_back(i);
  }
  return order;
}

bool GroupId::archimedean() const { return kind_ != GroupKind::Lex || rank_ == 1; }

bool GroupId::cyclic() const {
  if (kind_ == GroupKind::Algebraic) return false;
  return rank_ == 1 && !coord_is_rational(0);
}

std::size_t GroupId::class_count() const { return kind_ == GroupKind::Lex ? rank_ : 1; }

// ----------------------------------------------------------- triple sign

RealEnclosure enclose(const AlgebraicTriple& t, unsigned precision_bits) {
  Integer scale = 1;
  scale <<= precision_bits;
  const Integer scale_sq = scale * scale;
  Integer s2, s3;
  mpz_sqrt(s2.get_mpz_t(), Integer(2 * scale_sq).get_mpz_t());
  mpz_sqrt(s3.get_mpz_t(), Integer(3 * scale_sq).get_mpz_t());
  const Rational r2_lo(s2, scale), r2_hi(s2 + 1, scale);
  const Rational r3_lo(s3, scale), r3_hi(s3 + 1, scale);

  auto term = [](const Rational& c, const Rational& lo, const Rational& hi) {
    return c >= 0 ? RealEnclosure{c * lo, c * hi} : RealEnclosure{c * hi, c * lo};
  };
  const RealEnclosure a = term(t.c1, Rational(r2_lo), Rational(r2_hi));
  const RealEnclosure b = term(t.c2, Rational(r3_lo), Rational(r3_hi));
  RealEnclosure out{t.c0 + a.lo + b.lo, t.c0 + a.hi + b.hi};
  out.lo.canonicalize();
  out.hi.canonicalize();
  return out;
}

int triple_sign(const AlgebraicTriple& t) {
  if (t.c0 == 0 && t.c1 == 0 && t.c2 == 0) return 0;
  // {1, sqrt2, sqrt3} is Q-linearly independent, so a nonzero triple is a
  // nonzero real and the loop terminates.
  for (unsigned bits = 64;; bits *= 2) {
    const RealEnclosure e = enclose(t, bits);
    if (e.lo > 0) return 1;
    if (e.hi < 0) return -1;
  }
}

// ----------------------------------------------------------- GroupElement

namespace {

void require_same(const GroupElement& g, const GroupElement& h) {
  if (!(g.group() == h.group())) {
    throw GroupMismatch("elements of different groups: " + g.group().to_string() + " vs " + h.group().to_string());
  }
}

void check_domain(const GroupId& group, const std::vector<Rational>& coords) {
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const bool rational = group.kind() == GroupKind::Lex ? group.coord_is_rational(i) : group.coord_is_rational(0);
    if (!rational && !is_integer(coords[i])) {
      throw DomainError("non-integral coordinate " + format_rational(coords[i]) + " in group " + group.to_string());
    }
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

AlgebraicTriple parse_triple(std::string_view text) {
  std::string compact;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  }
  // a binary minus becomes "+-" so every term can be split on '+'
  std::string normalized;
  for (std::size_t i = 0; i < compact.size(); ++i) {
    const char c = compact[i];
    if (c == '-' && i > 0 && compact[i - 1] != '+' && compact[i - 1] != '*') normalized += '+';
    normalized += c;
  }
  AlgebraicTriple t;
  std::size_t start = 0;
  bool any = false;
  while (start <= normalized.size()) {
    const auto plus = normalized.find('+', start);
    const std::string term = normalized.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
    start = plus == std::string::npos ? normalized.size() + 1 : plus + 1;
    if (term.empty()) {
      if (plus == 0) continue;  // leading '+'
      throw ParseError("empty term in triple '" + std::string(text) + "'");
    }
    any = true;
    Rational* slot = &t.c0;
    std::string coeff = term;
    for (const auto& [suffix, target] : {std::pair<std::string, Rational*>{"sqrt2", &t.c1}, {"sqrt3", &t.c2}}) {
      if (term.size() >= suffix.size() && term.compare(term.size() - suffix.size(), suffix.size(), suffix) == 0) {
        slot = target;
        coeff = term.substr(0, term.size() - suffix.size());
        if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
        if (coeff.empty() || coeff == "+") coeff = "1";
        if (coeff == "-") coeff = "-1";
        break;
      }
    }
    *slot += parse_rational(coeff);
  }
  if (!any) throw ParseError("empty triple");
  return t;
}

}  // namespace

GroupElement::GroupElement(GroupId group, Value value) : group_(group), value_(std::move(value)) {
  switch (group_.kind()) {
    case GroupKind::Rational:
      if (!std::holds_alternative<Rational>(value_)) throw GroupMismatch("expected a rational for group " + group_.to_string());
      check_domain(group_, {std::get<Rational>(value_)});
      break;
    case GroupKind::Lex: {
      if (!std::holds_alternative<LexVector>(value_)) throw GroupMismatch("expected a lex vector for group " + group_.to_string());
      auto& v = std::get<LexVector>(value_);
      if (v.coords.size() != group_.rank()) throw DomainError("lex vector rank does not match group " + group_.to_string());
      if (v.priority != group_.priority()) throw GroupMismatch("lex vector priority does not match group " + group_.to_string());
      check_domain(group_, v.coords);
      break;
    }
    case GroupKind::Algebraic:
      if (!std::holds_alternative<AlgebraicTriple>(value_)) throw GroupMismatch("expected a triple for group R3");
      break;
  }
}

GroupElement GroupElement::rational(const Rational& q, GroupId group) {
  if (group.kind() != GroupKind::Rational) throw GroupMismatch("rational element needs group Z or Q");
  Rational c(q);
  c.canonicalize();
  return GroupElement(group, std::move(c));
}

GroupElement GroupElement::lex(GroupId group, std::vector<Rational> coords) {
  if (group.kind() != GroupKind::Lex) throw GroupMismatch("lex element needs a lexicographic group");
  for (auto& c : coords) c.canonicalize();
  return GroupElement(group, LexVector{std::move(coords), group.priority()});
}

GroupElement GroupElement::triple(Rational c0, Rational c1, Rational c2) {
  c0.canonicalize();
  c1.canonicalize();
  c2.canonicalize();
  return GroupElement(GroupId::quadratic_span(), AlgebraicTriple{std::move(c0), std::move(c1), std::move(c2)});
}

GroupElement GroupElement::zero(GroupId group) {
  return from_coordinates(group, std::vector<Rational>(group.kind() == GroupKind::Rational ? 1 : group.rank(), Rational(0)));
}

GroupElement GroupElement::from_coordinates(const GroupId& group, std::vector<Rational> coords) {
  switch (group.kind()) {
    case GroupKind::Rational:
      if (coords.size() != 1) throw DomainError("rational element takes one coordinate");
      return rational(coords[0], group);
    case GroupKind::Lex:
      return lex(group, std::move(coords));
    case GroupKind::Algebraic:
      if (coords.size() != 3) throw DomainError("triple takes three coordinates");
      return triple(coords[0], coords[1], coords[2]);
  }
  throw DomainError("unknown group kind");
}

GroupElement GroupElement::parse(const GroupId& group, std::string_view raw) {
  const std::string text = trim(raw);
  switch (group.kind()) {
    case GroupKind::Rational:
      return GroupElement(group, parse_rational(text));
    case GroupKind::Lex: {
      std::string_view body = text;
      if (const auto at = body.find("@prio="); at != std::string_view::npos) {
        const std::string digits(body.substr(at + 6));
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }) ||
            std::stoul(digits) != group.priority()) {
          throw ParseError("priority in '" + text + "' does not match group " + group.to_string());
        }
        body = body.substr(0, at);
      }
      if (body.size() < 2 || body.front() != '(' || body.back() != ')') {
        throw ParseError("lex vector must look like (a,b,...): '" + text + "'");
      }
      body = body.substr(1, body.size() - 2);
      std::vector<Rational> coords;
      std::size_t start = 0;
      while (true) {
        const auto comma = body.find(',', start);
        coords.push_back(parse_rational(trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start))));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      return lex(group, std::move(coords));
    }
    case GroupKind::Algebraic: {
      auto t = parse_triple(text);
      return triple(t.c0, t.c1, t.c2);
    }
  }
  throw ParseError("unknown group kind");
}

std::string GroupElement::to_string() const {
  switch (group_.kind()) {
    case GroupKind::Rational:
      return format_rational(std::get<Rational>(value_));
    case GroupKind::Lex: {
      const auto& v = std::get<LexVector>(value_);
      std::string out = "(";
      for (std::size_t i = 0; i < v.coords.size(); ++i) {
        if (i) out += ',';
        out += format_rational(v.coords[i]);
      }
      return out + ")@prio=" + std::to_string(v.priority);
    }
    case GroupKind::Algebraic: {
      const auto& t = std::get<AlgebraicTriple>(value_);
      return format_rational(t.c0) + " + " + format_rational(t.c1) + "*sqrt2 + " + format_rational(t.c2) + "*sqrt3";
    }
  }
  return {};
}

const Rational& GroupElement::as_rational() const {
  if (const auto* q = std::get_if<Rational>(&value_)) return *q;
  throw GroupMismatch("element of " + group_.to_string() + " is not a rational");
}

const LexVector& GroupElement::as_lex() const {
  if (const auto* v = std::get_if<LexVector>(&value_)) return *v;
  throw GroupMismatch("element of " + group_.to_string() + " is not a lex vector");
}

const AlgebraicTriple& GroupElement::as_triple() const {
  if (const auto* t = std::get_if<AlgebraicTriple>(&value_)) return *t;
  throw GroupMismatch("element of " + group_.to_string() + " is not a triple");
}

std::vector<Rational> GroupElement::coordinates() const {
  switch (group_.kind()) {
    case GroupKind::Rational:
      return {std::get<Rational>(value_)};
    case GroupKind::Lex:
      return std::get<LexVector>(value_).coords;
    case GroupKind::Algebraic: {
      const auto& t = std::get<AlgebraicTriple>(value_);
      return {t.c0, t.c1, t.c2};
    }
  }
  return {};
}

bool GroupElement::is_zero() const {
  for (const auto& c : coordinates()) {
    if (c != 0) return false;
  }
  return true;
}

int GroupElement::sign() const {
  switch (group_.kind()) {
    case GroupKind::Rational:
      return sgn(std::get<Rational>(value_));
    case GroupKind::Lex: {
      const auto& v = std::get<LexVector>(value_);
      for (std::size_t i : group_.comparison_order()) {
        if (const int s = sgn(v.coords[i]); s != 0) return s;
      }
      return 0;
    }
    case GroupKind::Algebraic:
      return triple_sign(std::get<AlgebraicTriple>(value_));
  }
  return 0;
}

// -------------------------------------------------------------- arithmetic

namespace {

template <class Op>
GroupElement coordinatewise(const GroupElement& g, const GroupElement& h, Op op) {
  require_same(g, h);
  auto a = g.coordinates();
  const auto b = h.coordinates();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = op(a[i], b[i]);
  return GroupElement::from_coordinates(g.group(), std::move(a));
}

}  // namespace

Ordering compare(const GroupElement& g, const GroupElement& h) {
  require_same(g, h);
  const int s = subtract(g, h).sign();
  return s < 0 ? Ordering::LT : (s > 0 ? Ordering::GT : Ordering::EQ);
}

std::strong_ordering operator<=>(const GroupElement& g, const GroupElement& h) {
  switch (compare(g, h)) {
    case Ordering::LT:
      return std::strong_ordering::less;
    case Ordering::GT:
      return std::strong_ordering::greater;
    case Ordering::EQ:
      break;
  }
  return std::strong_ordering::equal;
}

GroupElement add(const GroupElement& g, const GroupElement& h) {
  return coordinatewise(g, h, [](const Rational& x, const Rational& y) { return Rational(x + y); });
}

GroupElement subtract(const GroupElement& g, const GroupElement& h) {
  return coordinatewise(g, h, [](const Rational& x, const Rational& y) { return Rational(x - y); });
}

GroupElement negate(const GroupElement& g) {
  auto c = g.coordinates();
  for (auto& x : c) x = -x;
  return GroupElement::from_coordinates(g.group(), std::move(c));
}

GroupElement scale(const Integer& n, const GroupElement& g) {
  auto c = g.coordinates();
  for (auto& x : c) x *= n;
  return GroupElement::from_coordinates(g.group(), std::move(c));
}

GroupElement scale(const Rational& r, const GroupElement& g) {
  auto c = g.coordinates();
  for (auto& x : c) x *= r;
  return GroupElement::from_coordinates(g.group(), std::move(c));
}

GroupElement abs(const GroupElement& g) { return g.sign() < 0 ? negate(g) : g; }

// ------------------------------------------------------------- valuation

namespace {

std::size_t level_of(const GroupElement& g) {
  if (g.group().kind() != GroupKind::Lex) return 0;
  const auto& v = g.as_lex();
  const auto order = g.group().comparison_order();
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (v.coords[order[pos]] != 0) return pos;
  }
  return order.size();
}

}  // namespace

bool big_o(const GroupElement& g, const GroupElement& h) {
  require_same(g, h);
  if (h.is_zero()) throw DomainError("big_o: h must be nonzero");
  if (g.is_zero()) return true;
  if (g.group().archimedean()) return true;
  return level_of(g) >= level_of(h);
}

ArchClass arch_valuation(const GroupElement& g) {
  if (g.is_zero()) throw DomainError("arch_valuation: zero has no Archimedean class");
  return ArchClass{g.group(), level_of(g), g};
}

std::weak_ordering compare_classes(const ArchClass& a, const ArchClass& b) {
  if (!(a.group == b.group)) throw GroupMismatch("classes of different groups");
  return a.level <=> b.level;
}

bool same_class(const GroupElement& g, const GroupElement& h) { return big_o(g, h) && big_o(h, g); }

}  // namespace posmon
