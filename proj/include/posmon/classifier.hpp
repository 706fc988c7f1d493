#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "posmon/factor.hpp"
#include "posmon/monoid.hpp"

namespace posmon {

/// Strongest first; the chain UFM => LFM => ... => QAM follows this order,
/// with HFM off to the side (UFM => HFM => BFM).
enum class Property { UFM, HFM, LFM, FFM, BFM, ACCP, SAM, ATM, NAM, AAM, QAM };
inline constexpr std::array<Property, 11> kAllProperties = {
    Property::UFM, Property::HFM, Property::LFM, Property::FFM, Property::BFM, Property::ACCP,
    Property::SAM, Property::ATM, Property::NAM, Property::AAM, Property::QAM};

std::string to_string(Property p);
Property parse_property(std::string_view text);

/// strong => weak edges of the implication diagram.
const std::vector<std::pair<Property, Property>>& implications();

enum class VerdictStatus { Proved, Refuted, ProbeConsistent, Unknown };
std::string to_string(VerdictStatus s);

struct Verdict {
  VerdictStatus status = VerdictStatus::Unknown;
  std::string source;  // theorem tag, "implied", "probe", "certificate:..."
  std::string bound;   // probe bound, for ProbeConsistent
  std::optional<nlohmann::json> witness;

  nlohmann::json to_json() const;
};

enum class ReportScope {
  General,
  RankOne,     // UFM <=> HFM
  Conductive,  // UFM <=> HFM and BFM <=> ... <=> QAM
};

struct PropertyReport {
  std::string instance;
  ReportScope scope = ReportScope::General;
  std::map<Property, Verdict> verdicts;  // every property present
  std::vector<std::string> atoms;        // window-materialized atoms, when reported
  bool chain_ok = true;

  PropertyReport();
  const Verdict& at(Property p) const { return verdicts.at(p); }
  nlohmann::json to_json() const;
};

/// Sets a verdict unless one with the same status is already there.
/// Returns false on a Proved/Refuted clash (the report keeps the first).
bool assert_verdict(PropertyReport& r, Property p, Verdict v);

/// Closes the report under the implications (and the scope's equivalences):
/// proofs flow down, refutations flow up, both tagged "implied".
void propagate(PropertyReport& r);

/// No Proved property above a Refuted one; conductive reports also keep
/// UFM <=> HFM and the BFM..QAM block together.
bool check_chain_consistency(const PropertyReport& r);

/// M_a = {0} u G_{>=a}. DomainError unless a > 0.
PropertyReport classify_conductive(const GroupElement& a, std::size_t depth = kDefaultDepth);

struct LimitPointVerdict {
  bool applicable = false;  // inf M* > 0 certified
  std::optional<GroupElement> infimum;
  std::string note;

  nlohmann::json to_json() const;
};

/// For monoids of Archimedean groups: inf M* > 0 implies BFM.
/// Unsupported for lexicographic families.
LimitPointVerdict limit_point_bfm(const MonoidDescriptor& m);

/// Theorem-backed and asserted verdicts per family, merged with probes where
/// they decide something, closed under implications, chain-checked.
PropertyReport classify_known(const MonoidDescriptor& m, std::size_t depth = kDefaultDepth);

}  // namespace posmon
