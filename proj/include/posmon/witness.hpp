#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "posmon/factor.hpp"
#include "posmon/monoid.hpp"

namespace posmon {

/// Outcome of replaying a certificate; `detail` names the first failed check.
struct Replay {
  bool ok = true;
  std::string detail;

  static Replay fail(std::string why) { return {false, std::move(why)}; }
};

// ------------------------------------------------------------------ chains

/// q_n = q_{n+1} + a_{n+1} with every a_{n+1} a nonzero member, so the
/// principal ideals q_n + M grow strictly.
struct ChainCertificate {
  std::string instance;
  Rational q;
  std::vector<Rational> elements;     // q_0 .. q_N
  std::vector<Rational> differences;  // a_1 .. a_N

  std::size_t depth() const { return differences.size(); }
  nlohmann::json to_json() const;
  static ChainCertificate from_json(const nlohmann::json& j);
};

/// q_n = d(q) q^n and a_{n+1} = (d(q) - n(q)) q^n in M_q.
/// DomainError unless 0 < q < 1 and n(q) >= 2.
ChainCertificate mq_chain(const Rational& q, std::size_t depth);
Replay replay_chain(const ChainCertificate& cert);

// --------------------------------------------------------- hereditary break

/// Exhaustive knapsack run showing target is not in <items>.
struct ExclusionTranscript {
  std::vector<Rational> items;   // distinct, descending
  std::vector<Integer> bounds;   // floor(target / item)
  Rational target;
  std::uint64_t nodes = 0;

  nlohmann::json to_json() const;
  static ExclusionTranscript from_json(const nlohmann::json& j);
};

struct BreakStep {
  std::size_t first = 0;   // a'_k = a_first + a_second
  std::size_t second = 0;
  Rational atom;           // a'_k
  Rational partial_sum;    // s'_k
  std::size_t m = 0;       // s'_k divides s_m in M_q
  Rational s_m;
  Certificate remainder;   // s_m - s'_k as a sum of generators
  ExclusionTranscript exclusion;

  nlohmann::json to_json() const;
  static BreakStep from_json(const nlohmann::json& j);
};

struct HereditaryBreakCertificate {
  std::string instance;
  Rational q;
  Rational q0;
  std::vector<Rational> differences;  // a_1 .. a_K, K = largest index used
  std::vector<BreakStep> steps;

  nlohmann::json to_json() const;
  static HereditaryBreakCertificate from_json(const nlohmann::json& j);
};

/// Builds a'_1 = a_1 + a_i (i >= 2 minimal with q_0 not in <a'_1>), then
/// a'_{k+1} = a_{m+1} + a_j with j > m + 1 minimal keeping q_0 outside
/// <a'_1, ..., a'_{k+1}>. Each candidate index is searched up to `depth`
/// past its lower limit; running out throws Error.
HereditaryBreakCertificate synthesize_break(const Rational& q, std::size_t steps, std::size_t depth = 64);
Replay replay_break(const HereditaryBreakCertificate& cert);

// -------------------------------------------------------- subatomic witnesses

enum class WitnessKind { Quasi, Almost, NearlyRefutation };
std::string to_string(WitnessKind k);

struct SubatomicWitness {
  WitnessKind kind = WitnessKind::Quasi;
  GroupElement element;    // q
  GroupElement companion;  // b
  Factorization evidence;  // of b + q
  std::string note;

  nlohmann::json to_json() const;
};

/// The quasi-atomic monoid generated by Z[1/2]_{>=0} and Z[1/3]_{>=4/3}.
MonoidDescriptor quasi_not_almost();
/// M_0 together with its difference group above 1.
MonoidDescriptor almost_not_nearly();

/// b = (4 d(q) - 1) q, with b + q = 4 n(q) = 3 n(q) * (4/3).
SubatomicWitness verify_quasi_witness(const Rational& q);
Replay replay_quasi(const SubatomicWitness& w);

/// The refuting set S for one candidate q: the shortest prefix of the primes
/// outside P_q for which sum floor(2^K / p) > (q + 2) 2^K. The prefix may
/// need astronomically many primes (q = 5/6 needs p near 10^13), so the
/// search stops at `prime_limit` and reports `certified = false`.
struct NearlyRefutation {
  Rational q;
  bool certified = false;
  std::uint64_t prime_limit = 0;
  std::vector<std::uint64_t> excluded;  // P_q
  std::uint64_t first_prime = 0;
  std::uint64_t last_prime = 0;
  std::uint64_t count = 0;
  unsigned scale_bits = 64;
  Integer floor_sum;
  std::string r;  // 1 + prod_{p in S} 1/p, kept symbolic

  nlohmann::json to_json() const;
  static NearlyRefutation from_json(const nlohmann::json& j);
};

struct AlmostNotNearlyReport {
  std::vector<NearlyRefutation> refutations;
  std::vector<SubatomicWitness> almost_witnesses;

  nlohmann::json to_json() const;
};

/// Candidates: q = 1 and, for each nonempty set P of the first B primes,
/// q = sum_{p in P} 1/p (the least member with support P). Also emits
/// almost-atomic witnesses for a few members.
AlmostNotNearlyReport verify_almost_not_nearly(std::size_t b = 2);
inline constexpr std::uint64_t kRefutationPrimeLimit = std::uint64_t{1} << 26;
NearlyRefutation refute_nearly_witness(const Rational& q, std::uint64_t prime_limit = kRefutationPrimeLimit);
Replay replay_refutation(const NearlyRefutation& r);
/// Atomic b with b + c atomic, for a member c of the almost-not-nearly monoid.
SubatomicWitness almost_witness(const Rational& c);

struct NearlyDecomposition {
  GroupElement r;
  Rational q0;
  Integer phi;                          // phi(q0)
  std::vector<GroupElement> tail;       // atoms a_k
  bool verified = false;

  nlohmann::json to_json() const;
};

struct RationalObstruction {
  Rational x;
  std::size_t factorizations_found = 0;
  bool alpha_coordinate_obstruction = false;

  nlohmann::json to_json() const;
};

struct NearlyAtomicReport {
  std::vector<NearlyDecomposition> decompositions;
  std::vector<RationalObstruction> rational_members;
  bool ok = false;

  nlohmann::json to_json() const;
};

/// alpha + r = phi(q0) (alpha + q0)/phi(q0) + sum a_k, for the members r
/// built from the window, and the irrationality obstruction for rationals.
NearlyAtomicReport verify_nearly_atomic(std::size_t depth = kDefaultDepth);

/// alpha - d = phi(s)(alpha - s)/phi(s) + q^k and the same with beta, where
/// s = d + q^k is in S. k is searched up to `depth`.
struct AlphaBetaIdentity {
  Rational d;
  std::optional<std::size_t> k;
  Rational s;
  Integer phi;
  bool verified = false;

  nlohmann::json to_json() const;
};

std::vector<AlphaBetaIdentity> verify_alpha_beta_identities(const Rational& q, std::size_t count,
                                                            std::size_t depth = kDefaultDepth);

/// Dispatches on the "kind" field of a certificate file.
Replay verify_certificate(const nlohmann::json& j);

}  // namespace posmon
