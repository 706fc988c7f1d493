#include "posmon/knapsack.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>

#include "posmon/error.hpp"

namespace posmon {

namespace {

Integer to_big(long long v) { return Integer(static_cast<long>(v)); }
Integer to_big(const Integer& v) { return v; }

long long gcd_int(long long a, long long b) { return std::gcd(a, b); }
Integer gcd_int(const Integer& a, const Integer& b) { return gcd_of(a, b); }

bool fits(const Integer& v) {
  static const Integer limit = Integer(1) << 62;
  return abs(v) < limit;
}

/// Items already scaled to integer coordinates and ordered by comparison
/// order, so coordinate l is the level-l coordinate.
template <class Int>
class LevelSearch {
 public:
  LevelSearch(std::vector<std::vector<Int>> items, std::vector<std::size_t> levels, std::vector<Int> target,
              const KnapsackOptions& options, KnapsackResult& out)
      : items_(std::move(items)), levels_(std::move(levels)), residual_(std::move(target)), options_(options), out_(out) {
    const std::size_t n = items_.size();
    mult_.assign(n, Int(0));
    suffix_gcd_.assign(n, Int(0));
    for (std::size_t i = n; i-- > 0;) {
      const Int& lead = items_[i][levels_[i]];
      const bool same_level_next = i + 1 < n && levels_[i + 1] == levels_[i];
      suffix_gcd_[i] = same_level_next ? gcd_int(lead, suffix_gcd_[i + 1]) : lead;
    }
  }

  void run() { dfs(0, 0); }

 private:
  // `checked` = number of leading coordinates known to be zero in residual_.
  bool dfs(std::size_t i, std::size_t checked) {
    ++out_.nodes;
    const std::size_t n = items_.size();
    const std::size_t level = i < n ? levels_[i] : residual_.size();
    for (std::size_t l = checked; l < level; ++l) {
      if (residual_[l] != 0) return true;
    }
    checked = std::max(checked, level);
    if (i == n) {
      record();
      return !(options_.stop_at_first || out_.solutions.size() >= options_.max_solutions);
    }
    const Int& r = residual_[level];
    if (r < 0) return true;
    if (r % suffix_gcd_[i] != 0) return true;
    const Int& lead = items_[i][level];
    const bool last_of_level = i + 1 == n || levels_[i + 1] != level;
    if (last_of_level) {
      const Int c = r / lead;
      return apply_and_recurse(i, c, checked);
    }
    const Int cap = r / lead;
    for (Int c = 0; c <= cap; ++c) {
      if (!apply_and_recurse(i, c, checked)) return false;
    }
    return true;
  }

  bool apply_and_recurse(std::size_t i, const Int& c, std::size_t checked) {
    if (c != 0) {
      for (std::size_t j = 0; j < residual_.size(); ++j) residual_[j] -= c * items_[i][j];
    }
    mult_[i] = c;
    const bool keep_going = dfs(i + 1, checked);
    if (c != 0) {
      for (std::size_t j = 0; j < residual_.size(); ++j) residual_[j] += c * items_[i][j];
    }
    mult_[i] = 0;
    if (!keep_going) out_.truncated = true;
    return keep_going;
  }

  void record() {
    std::vector<Integer> sol;
    sol.reserve(mult_.size());
    for (const auto& c : mult_) sol.push_back(to_big(c));
    out_.solutions.push_back(std::move(sol));
  }

  std::vector<std::vector<Int>> items_;
  std::vector<std::size_t> levels_;
  std::vector<Int> residual_;
  const KnapsackOptions& options_;
  KnapsackResult& out_;
  std::vector<Int> mult_;
  std::vector<Int> suffix_gcd_;
};

void solve_ordered_coordinates(KnapsackResult& out, const GroupElement& target, const KnapsackOptions& options) {
  const GroupId& group = target.group();
  const auto order = group.comparison_order();
  const std::size_t dims = order.size();
  const std::size_t n = out.items.size();

  std::vector<Integer> scale(dims, Integer(1));
  const auto target_coords = target.coordinates();
  for (std::size_t l = 0; l < dims; ++l) {
    scale[l] = target_coords[order[l]].get_den();
    for (const auto& item : out.items) scale[l] = lcm_of(scale[l], item.coordinates()[order[l]].get_den());
  }
  auto scaled = [&](const std::vector<Rational>& coords) {
    std::vector<Integer> v(dims);
    for (std::size_t l = 0; l < dims; ++l) {
      Rational s = coords[order[l]] * scale[l];
      v[l] = s.get_num();
    }
    return v;
  };

  std::vector<std::vector<Integer>> items;
  std::vector<std::size_t> levels;
  for (const auto& item : out.items) {
    items.push_back(scaled(item.coordinates()));
    std::size_t level = 0;
    while (items.back()[level] == 0) ++level;
    levels.push_back(level);
  }
  std::vector<Integer> goal = scaled(target_coords);

  // Magnitude bound for every residual coordinate during the search.
  std::vector<Integer> caps(n);
  bool small = true;
  for (const auto& g : goal) small = small && fits(g);
  for (std::size_t i = 0; i < n; ++i) {
    Integer reach = abs(goal[levels[i]]);
    for (std::size_t j = 0; j < i; ++j) {
      if (levels[j] < levels[i]) reach += caps[j] * abs(items[j][levels[i]]);
    }
    caps[i] = reach / items[i][levels[i]];
  }
  for (std::size_t l = 0; l < dims && small; ++l) {
    Integer bound = abs(goal[l]);
    for (std::size_t i = 0; i < n; ++i) bound += caps[i] * abs(items[i][l]);
    small = fits(bound);
  }

  if (small) {
    std::vector<std::vector<long long>> items64;
    for (const auto& v : items) {
      std::vector<long long> w;
      for (const auto& x : v) w.push_back(x.get_si());
      items64.push_back(std::move(w));
    }
    std::vector<long long> goal64;
    for (const auto& x : goal) goal64.push_back(x.get_si());
    LevelSearch<long long>(std::move(items64), std::move(levels), std::move(goal64), options, out).run();
  } else {
    LevelSearch<Integer>(std::move(items), std::move(levels), std::move(goal), options, out).run();
  }
}

// Triples are ordered by their real value; no coordinate is monotone, so
// counts are capped by direct comparison.
void solve_triples(KnapsackResult& out, const GroupElement& target, const KnapsackOptions& options) {
  const std::size_t n = out.items.size();
  std::vector<Integer> mult(n, 0);
  std::function<bool(std::size_t, const GroupElement&)> dfs = [&](std::size_t i, const GroupElement& residual) -> bool {
    ++out.nodes;
    if (residual.sign() < 0) return true;
    if (i == n) {
      if (!residual.is_zero()) return true;
      out.solutions.push_back(mult);
      if (options.stop_at_first || out.solutions.size() >= options.max_solutions) {
        out.truncated = true;
        return false;
      }
      return true;
    }
    const GroupElement& item = out.items[i];
    if (i + 1 == n) {
      // residual must be an exact nonnegative multiple of the last item
      const auto r = residual.coordinates();
      const auto v = item.coordinates();
      std::optional<Rational> ratio;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] != 0) {
          ratio = r[j] / v[j];
          break;
        }
      }
      if (!ratio || !is_integer(*ratio) || *ratio < 0) return residual.is_zero() ? dfs(i + 1, residual) : true;
      if (!(scale(ratio->get_num(), item) == residual)) return true;
      mult[i] = ratio->get_num();
      const bool keep = dfs(i + 1, GroupElement::zero(residual.group()));
      mult[i] = 0;
      return keep;
    }
    GroupElement rest = residual;
    for (Integer c = 0; rest.sign() >= 0; ++c) {
      mult[i] = c;
      if (!dfs(i + 1, rest)) {
        mult[i] = 0;
        return false;
      }
      rest = rest - item;
    }
    mult[i] = 0;
    return true;
  };
  dfs(0, target);
}

}  // namespace

KnapsackResult solve_knapsack(std::vector<GroupElement> items, const GroupElement& target, const KnapsackOptions& options) {
  for (const auto& item : items) {
    if (!(item.group() == target.group())) throw GroupMismatch("knapsack item and target live in different groups");
    if (!item.is_positive()) throw DomainError("knapsack items must be positive: " + item.to_string());
  }
  std::sort(items.begin(), items.end(), [](const GroupElement& a, const GroupElement& b) { return a > b; });
  if (std::adjacent_find(items.begin(), items.end()) != items.end()) throw DomainError("knapsack items must be distinct");

  KnapsackResult out;
  out.items = std::move(items);
  if (target.sign() < 0) return out;
  if (out.items.empty()) {
    ++out.nodes;
    if (target.is_zero()) out.solutions.emplace_back();
    return out;
  }
  if (options.max_solutions == 0) {
    out.truncated = true;
    return out;
  }
  if (target.group().kind() == GroupKind::Algebraic) {
    solve_triples(out, target, options);
  } else {
    solve_ordered_coordinates(out, target, options);
  }
  return out;
}

bool representable(const std::vector<GroupElement>& items, const GroupElement& target, std::uint64_t* nodes) {
  KnapsackOptions options;
  options.stop_at_first = true;
  const auto result = solve_knapsack(items, target, options);
  if (nodes) *nodes = result.nodes;
  return !result.solutions.empty();
}

}  // namespace posmon
