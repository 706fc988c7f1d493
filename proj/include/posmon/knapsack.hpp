#pragma once

#include <cstdint>
#include <vector>

#include "posmon/group.hpp"

namespace posmon {

struct KnapsackOptions {
  std::size_t max_solutions = 10000;
  bool stop_at_first = false;
};

/// All nonnegative integer vectors c with sum_i c_i * items[i] = target.
struct KnapsackResult {
  std::vector<GroupElement> items;  // descending; solutions index into this
  std::vector<std::vector<Integer>> solutions;
  bool truncated = false;  // stopped at max_solutions or stop_at_first
  std::uint64_t nodes = 0;
};

/// Depth-first enumeration over items sorted descending, multiplicities
/// ascending, so solutions come out in lexicographic order of the
/// multiplicity vector.
///
/// Items must be positive, pairwise distinct and share the target's group.
/// Every multiplicity is bounded because items are positive: in a lex group
/// the items are processed one Archimedean level at a time and each level's
/// leading coordinate caps the counts of that level.
KnapsackResult solve_knapsack(std::vector<GroupElement> items, const GroupElement& target,
                              const KnapsackOptions& options = {});

/// Convenience: is target a nonnegative integer combination of items?
bool representable(const std::vector<GroupElement>& items, const GroupElement& target, std::uint64_t* nodes = nullptr);

}  // namespace posmon
