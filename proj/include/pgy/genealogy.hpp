#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgy/engine.hpp"

namespace pgy {

// Parent-link forest over the stages of one run.  Stage s member lists are
// ascending; parents_for(s)[i] is the index of member i's parent at stage
// s-1.  Member values are retained so analytics can report offsets and
// ancestor values without re-running the engine.
class GenealogyForest {
 public:
  // Build by running a variant from its seed up to `horizon`.
  static GenealogyForest build(const VariantRule& variant, std::size_t horizon,
                               unsigned threads = 1);
  // Assemble from already-computed stages (ascending, starting at stage 1).
  GenealogyForest(std::vector<std::vector<mpz_class>> values,
                  std::vector<std::vector<std::uint32_t>> parents);

  std::size_t horizon() const { return values_.size(); }
  std::size_t n(std::size_t s) const { return values_[s - 1].size(); }
  const std::vector<mpz_class>& stage_values(std::size_t s) const { return values_[s - 1]; }
  // Parent indices of stage s members (s >= 2).
  const std::vector<std::uint32_t>& parents_for(std::size_t s) const { return parents_[s - 2]; }

  // Indices of stage-s members that still have a descendant at `horizon`.
  std::vector<std::uint32_t> survivor_indices(std::size_t s, std::size_t horizon) const;
  std::size_t survivors(std::size_t s, std::size_t horizon) const;

  // Deepest stage at which a single member is the ancestor of every horizon
  // member, with that member's stage, index, and value.
  struct Ancestor {
    std::size_t stage = 0;
    std::uint32_t index = 0;  // 0-based
    mpz_class value;
  };
  std::optional<Ancestor> common_ancestor(std::size_t horizon) const;

  // Stage-r ancestor index of stage-s member i (r <= s).
  std::uint32_t ancestor_index(std::size_t s, std::uint32_t i, std::size_t r) const;

  struct TupletHit {
    std::size_t parent_stage = 0;   // stage of the parent member
    std::uint32_t parent_ordinal = 0;  // 1-based among that stage's members
    std::vector<std::int64_t> offsets;  // child - parent * p_{stage+1}
  };
  // First parent (stage ascending, then ordinal) with at least `size`
  // children in its window.
  std::optional<TupletHit> find_tuplets(std::size_t size) const;

  struct DescendantHit {
    std::size_t stage = 0;
    std::uint32_t ordinal = 0;  // 1-based
    std::vector<mpz_class> offsets;  // descendant - member * (product of next t primes)
  };
  // First member whose order-t descendant count equals exactly `count`.
  std::optional<DescendantHit> descendants_of_order(std::size_t order, std::size_t count) const;

  struct StrengthGroup {
    std::uint32_t ancestor_index = 0;  // 0-based index at the split stage
    std::size_t size = 0;
    double percent = 0.0;
  };
  std::vector<StrengthGroup> branch_strength(std::size_t split_stage, std::size_t horizon) const;

  struct BranchBound {
    double c = 0.0;
    std::size_t root_stage = 0;
    std::uint32_t root_ordinal = 0;  // 1-based
    std::size_t peak_stage = 0;
    std::size_t peak_size = 0;
    std::size_t extinct_stage = 0;
  };
  // Max over branches extinct before the horizon of the peak of
  // n_branch(s) / (0.5 sqrt(p_s) log p_s), with the witnessing branch.
  BranchBound branch_bound_c(std::size_t horizon) const;

  // Stages s in (s_min, horizon] with survivors(s) == survivors(s-1).
  std::vector<std::size_t> no_split_stages(std::size_t horizon) const;

  // CSV `s,p,n,n_star` over all stages up to the horizon.
  std::string survivors_csv(std::size_t horizon) const;

 private:
  std::vector<std::vector<mpz_class>> values_;            // [s-1]
  std::vector<std::vector<std::uint32_t>> parents_;       // [s-2]
};

}  // namespace pgy
