#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "posmon/group.hpp"

namespace posmon {

inline constexpr std::size_t kDefaultDepth = 12;

enum class Family : std::uint8_t {
  FiniteGenerated,
  GeometricPuiseux,      // M_q = <q^n | n >= 0>
  PrimeReciprocal,       // M_0 = <1/p | p prime>
  Conductive,            // {0} u G_{>=a}
  LexCone,
  Product,
  UnionShift,
  LocalizedNonnegative,  // Z[1/p]_{>=0}
  AlphaBeta,
  NearlyAtomicAlpha,
};

enum class ConeRule : std::uint8_t {
  OpenHalfSpace,  // {0} u {x : first compared coordinate > 0}
  PositiveCone,   // G^+
};

enum class TailRule : std::uint8_t {
  DifferenceGroupAtLeast,  // base u gp(base)_{>=t}; base must be M_0
  LocalizationAtLeast,     // <base u Z[1/p]_{>=t}>; base must be Z[1/r]_{>=0}
};

/// Finite description of one monoid. Immutable; build with the factories.
class MonoidDescriptor {
 public:
  static MonoidDescriptor finite_generated(std::vector<GroupElement> gens);
  static MonoidDescriptor geometric_puiseux(const Rational& q);
  static MonoidDescriptor prime_reciprocal();
  static MonoidDescriptor conductive(const GroupElement& a);
  static MonoidDescriptor lex_cone(const GroupId& group, ConeRule rule);
  static MonoidDescriptor product(const MonoidDescriptor& left, const MonoidDescriptor& right);
  static MonoidDescriptor union_difference_group(const MonoidDescriptor& base, const Rational& threshold);
  static MonoidDescriptor union_localization(const MonoidDescriptor& base, const Integer& prime, const Rational& threshold);
  static MonoidDescriptor localized_nonnegative(const Integer& prime);
  static MonoidDescriptor alpha_beta(const Rational& q);
  static MonoidDescriptor nearly_atomic_alpha();

  Family family() const { return family_; }
  const GroupId& group() const { return group_; }

  const std::vector<GroupElement>& generators() const { return gens_; }
  const Rational& q() const { return q_; }
  const GroupElement& a() const { return a_; }
  ConeRule rule() const { return rule_; }
  const MonoidDescriptor& left() const { return *left_; }
  const MonoidDescriptor& right() const { return *right_; }
  const MonoidDescriptor& base() const { return *left_; }
  TailRule tail() const { return tail_; }
  const Integer& prime() const { return prime_; }
  const Rational& threshold() const { return threshold_; }

  /// Instance address in the CLI grammar, e.g. "mq:2/3", "nm:3,5".
  /// Parsing it back yields an equal descriptor.
  std::string to_string() const;
  static MonoidDescriptor parse(std::string_view text);

  nlohmann::json to_json() const;
  static MonoidDescriptor from_json(const nlohmann::json& j);

  friend bool operator==(const MonoidDescriptor& a, const MonoidDescriptor& b) { return a.to_string() == b.to_string(); }

 private:
  MonoidDescriptor() = default;

  Family family_ = Family::FiniteGenerated;
  GroupId group_;
  std::vector<GroupElement> gens_;
  Rational q_;
  GroupElement a_;
  ConeRule rule_ = ConeRule::OpenHalfSpace;
  std::shared_ptr<const MonoidDescriptor> left_, right_;
  TailRule tail_ = TailRule::DifferenceGroupAtLeast;
  Integer prime_;
  Rational threshold_;
};

/// Short element text: lex vectors lose their "@prio" suffix.
std::string element_short(const GroupElement& g);

struct GeneratorWindow {
  std::string label;  // "<instance>@depth=<d>"
  std::size_t depth = 0;
  std::vector<GroupElement> gens;  // deterministic order, all > 0
};

/// Memoized; thread safe. Throws DomainError for depth 0.
std::shared_ptr<const GeneratorWindow> generators(const MonoidDescriptor& m, std::size_t depth = kDefaultDepth);

/// Whether g belongs to the family's defining generating set (not just the
/// window). Used to replay certificates independently of any depth.
bool is_defining_generator(const MonoidDescriptor& m, const GroupElement& g);

struct Certificate {
  std::string window;  // label of the window the search ran over
  std::vector<std::pair<GroupElement, Integer>> terms;

  GroupElement total(const GroupId& group) const;
  nlohmann::json to_json() const;
  static Certificate from_json(const GroupId& group, const nlohmann::json& j);
};

enum class Membership : std::uint8_t { In, Out, UnknownAtDepth };

struct MembershipVerdict {
  Membership status = Membership::Out;
  std::size_t depth = 0;
  std::optional<Certificate> certificate;  // present iff In

  bool in() const { return status == Membership::In; }
  bool out() const { return status == Membership::Out; }
  bool unknown() const { return status == Membership::UnknownAtDepth; }
};

std::string to_string(Membership m);

/// Membership of x >= 0. Exact for every family except the tails of
/// AlphaBeta (irrational part) and the NearlyAtomicAlpha family when the
/// relevant primes are beyond the enumeration budget.
MembershipVerdict contains(const MonoidDescriptor& m, const GroupElement& x, std::size_t depth = kDefaultDepth);

/// x - d in m (Out when x - d < 0).
MembershipVerdict divides(const MonoidDescriptor& m, const GroupElement& d, const GroupElement& x,
                          std::size_t depth = kDefaultDepth);

/// Replays a certificate: every term uses a defining generator, coefficients
/// are positive and the sum equals x exactly.
bool replay(const MonoidDescriptor& m, const GroupElement& x, const Certificate& cert);

enum class GroupScope : std::uint8_t {
  Monoid,           // gp(m)
  AtomicSubmonoid,  // gp(<A(m)>)
};

/// Exact membership in a difference group. Unsupported for families
/// without a closed description.
bool gp_membership(const MonoidDescriptor& m, const GroupElement& x, GroupScope scope = GroupScope::Monoid);

// ---- deterministic enumerations behind the injections into the primes

/// n-th element (0-based) of Q_{>=0} in the order 0, then Calkin-Wilf.
Rational nonnegative_rational_at(std::uint64_t index);
/// Inverse of nonnegative_rational_at; nullopt when the index would
/// exceed 2^63.
std::optional<std::uint64_t> nonnegative_rational_index(const Rational& q);

/// First `count` elements of S = {s in M_q : s < sqrt2} in discovery
/// order (stage t adds, ascending, the new sums of at most t terms from
/// q^0..q^t).
std::vector<Rational> alpha_beta_discovery(const Rational& q, std::size_t count);
/// Index of s in discovery order, searching at most `budget` elements.
std::optional<std::size_t> alpha_beta_index(const Rational& q, const Rational& s, std::size_t budget = 20000);

/// The injection into the primes: the n-th element goes to the n-th prime.
Integer nth_prime(std::uint64_t index);

}  // namespace posmon
