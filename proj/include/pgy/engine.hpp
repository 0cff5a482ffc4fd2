#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgy {

// Which game is being played and where primality starts to be enforced.
enum class VariantKind { floor_game, round_game, semi_game };

struct VariantRule {
  VariantKind kind = VariantKind::floor_game;
  std::uint64_t semi_base = 0;          // B: stage-1 members are 2B and 2B+1
  std::size_t primality_from_stage = 1; // members must be probable primes from here on
  bool exclude_even_semi_seed = false;  // optional restriction: drop the even member 2B

  static VariantRule floor_rule() { return {VariantKind::floor_game, 0, 1, false}; }
  static VariantRule round_rule() { return {VariantKind::round_game, 0, 1, false}; }
  static VariantRule semi_rule(std::uint64_t B, bool exclude_even = false) {
    return {VariantKind::semi_game, B, 2, exclude_even};
  }
};

// Live population of a run, stored the memory-friendly way: smallest member
// `a` plus ascending deltas `d` with d[0] = 0.
struct StageState {
  VariantRule variant;
  std::size_t s = 1;
  std::uint64_t p = 2;
  mpz_class a = 0;
  std::vector<mpz_class> d;

  std::size_t n() const { return d.size(); }
  std::vector<mpz_class> members() const;
  static StageState from_members(const VariantRule& v, std::size_t s, std::uint64_t p,
                                 const std::vector<mpz_class>& members);
};

// Exact interval [q/modulus, (q+1)/modulus) of admissible y values pinned by
// one member q at the stage with primorial `modulus`.
struct YInterval {
  mpz_class q;
  mpz_class modulus;

  // Decimal rendering of q/modulus truncated to `digits` fractional digits.
  std::string decimal_lower(std::size_t digits) const;
  // Decimal rendering of (q+1)/modulus truncated likewise.
  std::string decimal_upper(std::size_t digits) const;
};

struct YBounds {
  YInterval lower;   // smallest member
  YInterval upper;   // largest member
  std::string gap;   // ((q_n + 1) - q_1)/modulus as a decimal string
};

// Thrown by import_checkpoint on malformed text or on a state that violates
// the stage invariants; `index` is the first offending member (or -1).
struct CheckpointError : std::runtime_error {
  long index;
  CheckpointError(const std::string& what, long idx = -1)
      : std::runtime_error(what), index(idx) {}
};

StageState seed(const VariantRule& variant);

// All values in the child window of q for the next stage prime p_next that
// survive wheel sieving and (when require_prime) the probable-prime test.
// The sieve steps every odd prime b <= p_next - 2 through the window, marks
// the single multiples of primes in (p_next, p_next^2), and handles b = 2 by
// parity; windows whose values are not safely above p_next^2 fall back to
// direct testing so a sieve prime can never shadow an equal candidate.
std::vector<mpz_class> children(const mpz_class& q, std::uint64_t p_next,
                                const VariantRule& variant, bool require_prime = true);

struct StepResult {
  StageState next;
  std::vector<std::uint32_t> parent_index;  // per member of `next`
  bool extinct = false;
};

// Advance one stage.  Work is split over `threads` contiguous parent blocks
// and merged in parent order, so the output is identical for any thread
// count.
StepResult step(const StageState& state, unsigned threads = 1);

// Called after each computed stage.
using StageSink =
    std::function<void(const StageState&, const std::vector<std::uint32_t>& parent_index,
                       double elapsed_ms)>;

// Run to `to_stage` (inclusive), invoking the sink after every stage.
// Extinction stops early and returns the last live state with .extinct set.
struct RunResult {
  StageState last;
  bool extinct = false;
  std::size_t extinct_at = 0;  // stage whose population came out empty
};
RunResult run(StageState state, std::size_t to_stage, const StageSink& sink = nullptr,
              unsigned threads = 1);

YBounds y_bounds(const StageState& state, std::size_t gap_digits = 40);

// Exact sibling offsets: for each later sibling, (q_j - q_first)/modulus.
struct SplitOffset {
  mpz_class delta;     // q_j - q_i
  mpq_class exact;     // delta / modulus
  std::string decimal; // scientific rendering of the exact value
};
std::vector<SplitOffset> split_offsets(const std::vector<mpz_class>& siblings,
                                       const mpz_class& modulus, std::size_t digits = 25);

// Scientific-notation rendering of num/den (both positive) with `sig`
// significant digits, truncated.
std::string ratio_scientific(const mpz_class& num, const mpz_class& den, std::size_t sig);

// Checkpoint text: `a=<digits>; d=[0, 6, ...]` plus one newline.
std::string export_checkpoint(const StageState& state);

// Rebuild a stage from checkpoint text.  Validates d[0] = 0 and ascending
// members; when recheck_prp is set, re-runs the probable-prime test on every
// member and reports the first failure.
StageState import_checkpoint(const std::string& text, const VariantRule& variant,
                             std::size_t s, bool recheck_prp = false);

}  // namespace pgy
