#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "posmon/monoid.hpp"

namespace posmon {

struct AtomSet {
  std::string instance;
  std::size_t depth = 0;
  std::vector<GroupElement> atoms;  // ascending
  /// The listed atoms are all the atoms of the monoid.
  bool complete = false;
  /// Every atom <= this bound is listed (implied by `complete`).
  std::optional<GroupElement> exhaustive_below;

  bool covers(const GroupElement& b) const {
    return complete || (exhaustive_below && b <= *exhaustive_below);
  }
  nlohmann::json to_json() const;
};

/// Closed forms where known, each atom re-verified by decomposition search
/// over the generator window; finitely generated monoids are computed
/// exactly. Throws Error if a closed-form atom fails re-verification.
AtomSet atoms(const MonoidDescriptor& m, std::size_t depth = kDefaultDepth);

/// No window generator g with 0 < g < x leaves x - g in the monoid.
bool verify_atom(const MonoidDescriptor& m, const GroupElement& x, std::size_t depth = kDefaultDepth);

struct Factorization {
  GroupElement value;
  std::vector<GroupElement> atoms;  // descending, multiplicities > 0
  std::vector<Integer> mults;
  Integer length;

  nlohmann::json to_json() const;
  static Factorization from_json(const GroupId& group, const nlohmann::json& j);
  /// Sum of mult * atom equals value and length equals the sum of mults.
  bool consistent() const;
  friend bool operator==(const Factorization& a, const Factorization& b) {
    return a.value == b.value && a.atoms == b.atoms && a.mults == b.mults;
  }
};

struct FactorizationList {
  GroupElement value;
  std::vector<Factorization> items;  // lexicographic in the multiplicity vector over descending atoms
  bool complete = false;
  bool truncated = false;
  std::string note;  // e.g. "NotAtomicFamily"
  std::uint64_t nodes = 0;

  nlohmann::json to_json() const;
};

inline constexpr std::size_t kDefaultMaxFactorizations = 10000;

/// Z(b) over the atom window. DomainError if b is not a member.
FactorizationList factorizations(const MonoidDescriptor& m, const GroupElement& b, std::size_t depth = kDefaultDepth,
                                 std::size_t max_count = kDefaultMaxFactorizations);
/// Same, over an explicitly given atom set (used by probes and tests).
FactorizationList factorizations_over(const AtomSet& atom_set, const GroupElement& b,
                                      std::size_t max_count = kDefaultMaxFactorizations);

struct LengthSet {
  GroupElement value;
  std::set<Integer> lengths;
  bool complete = false;

  nlohmann::json to_json() const;
};

LengthSet length_set(const MonoidDescriptor& m, const GroupElement& b, std::size_t depth = kDefaultDepth);
LengthSet length_set_of(const FactorizationList& list);

enum class Atomicity { Yes, No, Unknown };

struct AtomicElementResult {
  Atomicity status = Atomicity::Unknown;
  std::optional<Factorization> witness;
};

AtomicElementResult is_atomic_element(const MonoidDescriptor& m, const GroupElement& b, std::size_t depth = kDefaultDepth);

// ---------------------------------------------------------------- probes

enum class ProbeProperty { ATM, BFM, FFM, HFM, LFM, UFM };
std::string to_string(ProbeProperty p);
ProbeProperty parse_probe_property(std::string_view text);

/// Rational families: a scalar bound. Lex families: a box |x_i| <= box[i]
/// (coordinates indexed as stored).
struct ProbeBound {
  std::optional<Rational> scalar;
  std::vector<Integer> box;

  static ProbeBound parse(std::string_view text);
  std::string to_string() const;
};

enum class ProbeStatus { Consistent, Refuted, Inconclusive };
std::string to_string(ProbeStatus s);

struct ProbeResult {
  ProbeProperty property = ProbeProperty::ATM;
  ProbeStatus status = ProbeStatus::Consistent;
  std::size_t members_checked = 0;
  std::optional<GroupElement> counterexample;
  std::vector<Factorization> evidence;  // two factorizations for refutations
  std::string note;

  nlohmann::json to_json() const;
};

/// Members below the bound, ascending. Unsupported unless membership below
/// the bound is exact and the atoms there are known exhaustively or by
/// closed form.
std::vector<GroupElement> members_below(const MonoidDescriptor& m, const ProbeBound& bound);

ProbeResult probe_property(const MonoidDescriptor& m, ProbeProperty prop, const ProbeBound& bound,
                           std::size_t depth = kDefaultDepth);

/// Checks l(u) = 0 iff u = 0 on the samples and l(b + c) >= l(b) + l(c) on
/// all pairs of samples. Samples must be members.
bool length_function_check(const MonoidDescriptor& m, const std::function<Integer(const GroupElement&)>& length,
                           const std::vector<GroupElement>& samples);

}  // namespace posmon
