#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "posmon/rational.hpp"

namespace posmon {

inline constexpr std::size_t kMaxLexRank = 8;

enum class GroupKind : std::uint8_t {
  Rational,   // Z or Q inside the reals
  Lex,        // Z/Q coordinates under a lexicographic order
  Algebraic,  // Q + Q*sqrt2 + Q*sqrt3 inside the reals
};

/// Identifies one of the ground groups. Small value type; no heap.
///
/// Text forms: "Z", "Q", "R3" and, for lexicographic groups, the coordinate
/// domains joined by 'x' with the priority suffix, e.g. "ZxZ@prio=0".
/// "Z2", "Q3", ... are accepted shorthands when parsing.
class GroupId {
 public:
  static GroupId integers();
  static GroupId rationals();
  static GroupId quadratic_span();
  /// `rational_coords[i]` is true when coordinate i ranges over Q.
  static GroupId lex(const std::vector<bool>& rational_coords, std::size_t priority = 0);
  static GroupId lex_integers(std::size_t rank, std::size_t priority = 0);

  static GroupId parse(std::string_view text);
  std::string to_string() const;

  GroupKind kind() const { return kind_; }
  std::size_t rank() const { return rank_; }
  std::size_t priority() const { return priority_; }
  bool coord_is_rational(std::size_t i) const { return ((rational_mask_ >> i) & 1U) != 0; }

  /// Coordinates in the order they are compared: the priority coordinate,
  /// then the rest ascending. Trivial for non-lex groups.
  std::vector<std::size_t> comparison_order() const;

  bool archimedean() const;
  /// Infinite cyclic (Z, or lex Z^1).
  bool cyclic() const;
  /// Number of Archimedean classes (size of the value set).
  std::size_t class_count() const;

  friend bool operator==(const GroupId&, const GroupId&) = default;

 private:
  GroupKind kind_ = GroupKind::Rational;
  std::uint8_t rank_ = 1;
  std::uint8_t rational_mask_ = 0;
  std::uint8_t priority_ = 0;
};

struct LexVector {
  std::vector<Rational> coords;
  std::size_t priority = 0;
  friend bool operator==(const LexVector&, const LexVector&) = default;
};

/// c0 + c1*sqrt(2) + c2*sqrt(3).
struct AlgebraicTriple {
  Rational c0, c1, c2;
  friend bool operator==(const AlgebraicTriple&, const AlgebraicTriple&) = default;
};

/// Sign of the real number a triple denotes, via dyadic interval
/// refinement of sqrt2 and sqrt3 (precision doubles from 64 bits).
int triple_sign(const AlgebraicTriple& t);

/// Closed dyadic enclosure [lo, hi] of the real value of a triple.
struct RealEnclosure {
  Rational lo, hi;
};
RealEnclosure enclose(const AlgebraicTriple& t, unsigned precision_bits);

/// Exact element of one of the ground groups.
class GroupElement {
 public:
  using Value = std::variant<Rational, LexVector, AlgebraicTriple>;

  GroupElement() : group_(GroupId::rationals()), value_(Rational(0)) {}
  GroupElement(GroupId group, Value value);

  static GroupElement rational(const Rational& q, GroupId group = GroupId::rationals());
  static GroupElement integer(long n) { return rational(Rational(n), GroupId::integers()); }
  static GroupElement lex(GroupId group, std::vector<Rational> coords);
  static GroupElement triple(Rational c0, Rational c1, Rational c2);
  static GroupElement zero(GroupId group);

  static GroupElement parse(const GroupId& group, std::string_view text);
  std::string to_string() const;

  const GroupId& group() const { return group_; }
  const Value& value() const { return value_; }

  const Rational& as_rational() const;
  const LexVector& as_lex() const;
  const AlgebraicTriple& as_triple() const;

  bool is_zero() const;
  int sign() const;
  bool is_positive() const { return sign() > 0; }
  bool is_nonnegative() const { return sign() >= 0; }

  /// Raw coordinates: 1 for Z/Q, rank for lex, (c0,c1,c2) for triples.
  std::vector<Rational> coordinates() const;
  static GroupElement from_coordinates(const GroupId& group, std::vector<Rational> coords);

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.group_ == b.group_ && a.value_ == b.value_;
  }

 private:
  GroupId group_;
  Value value_;
};

enum class Ordering { LT, EQ, GT };

/// Total order of the group. Throws GroupMismatch across groups.
Ordering compare(const GroupElement& g, const GroupElement& h);
std::strong_ordering operator<=>(const GroupElement& g, const GroupElement& h);

GroupElement add(const GroupElement& g, const GroupElement& h);
GroupElement subtract(const GroupElement& g, const GroupElement& h);
GroupElement negate(const GroupElement& g);
GroupElement scale(const Integer& n, const GroupElement& g);
/// Multiplication by a rational; DomainError if the result leaves the group.
GroupElement scale(const Rational& r, const GroupElement& g);
GroupElement abs(const GroupElement& g);

inline GroupElement operator+(const GroupElement& g, const GroupElement& h) { return add(g, h); }
inline GroupElement operator-(const GroupElement& g, const GroupElement& h) { return subtract(g, h); }
inline GroupElement operator-(const GroupElement& g) { return negate(g); }

/// |g| <= n|h| for some n in N. DomainError when h = 0.
bool big_o(const GroupElement& g, const GroupElement& h);

/// Archimedean class of a nonzero element. `level` is the position of the
/// first nonzero coordinate in comparison order (0 for Archimedean groups);
/// a smaller level is a larger class in magnitude.
struct ArchClass {
  GroupId group;
  std::size_t level = 0;
  GroupElement representative;
};

ArchClass arch_valuation(const GroupElement& g);

/// Order on the value set: v(g) <= v(h) iff h = O(g). Same group required.
std::weak_ordering compare_classes(const ArchClass& a, const ArchClass& b);
bool same_class(const GroupElement& g, const GroupElement& h);

}  // namespace posmon
