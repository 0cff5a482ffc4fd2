#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <vector>

namespace pgy {

// Immutable tables of small primes with the prefix sums every other layer
// consumes: pi(x), theta(p) = sum of natural logs of primes <= p, and
// Li*(x) = sum_{t=2..x} 1/log t.  theta and Li* are accumulated in
// compensated long-double arithmetic because downstream identities subtract
// nearly equal large sums.
class PrimeTables {
 public:
  explicit PrimeTables(std::uint64_t limit);

  std::uint64_t limit() const { return limit_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }

  // Number of primes <= x (x <= limit).
  std::uint64_t pi(std::uint64_t x) const;
  // 1-based: nth_prime(1) = 2.  Requires enough primes in the table.
  std::uint64_t nth_prime(std::size_t s) const;
  bool has_nth_prime(std::size_t s) const { return s >= 1 && s <= primes_.size(); }
  bool is_prime_in_table(std::uint64_t n) const;

  // Chebyshev theta: sum of log q over primes q <= p (p <= limit).
  long double theta(std::uint64_t p) const;
  // Li*(x) = sum_{t=2..x} 1/log t (x <= limit).
  long double li_star(std::uint64_t x) const;

 private:
  std::uint64_t limit_;
  std::vector<std::uint64_t> primes_;
  std::vector<long double> theta_prefix_;  // theta at primes_[i]
  std::vector<long double> li_prefix_;     // Li*(x) for x in [2, li_cap_]
  std::uint64_t li_cap_;
};

// Shared, growable access to prime tables.  Snapshots are immutable; asking
// for a larger limit builds and installs a bigger snapshot.  Callers hold the
// returned shared_ptr for the duration of a computation, so concurrent
// readers never see a table change underneath them.
std::shared_ptr<const PrimeTables> shared_tables(std::uint64_t at_least);

// p_s with p_1 = 2; grows the shared table on demand.
std::uint64_t nth_prime(std::size_t s);

// Largest s with p_s <= bound (0 if none).
std::size_t stage_of_prime_bound(std::uint64_t bound);

// Product of all primes <= p, with primorial(1) = 1.
mpz_class primorial(std::uint64_t p);

// Exact density of integers coprime to k#: product over primes u <= k of
// (1 - 1/u).
mpq_class w_density(std::uint64_t k);

// Chebyshev theta / Li* through the shared tables.
long double theta(std::uint64_t p);
long double li_star(std::uint64_t x);

// Right-hand side of the theta identity
//   (log p)(Li*(p) - pi(p)) + 1 - sum_{x=2}^{p-1} log((x+1)/x)(Li*(x) - pi(x)),
// which must equal p - theta(p) up to summation error.
long double theta_gap_from_li_pi(std::uint64_t p);

// (p - 1)/(theta(p) - (1 - log_y_offset_complement)) > 1, the per-stage
// survival inequality.  The 0.77 constant is 1 - 0.23; both are exposed so
// late-stage experiments can substitute a sharper log y.
bool survival_inequality(std::uint64_t p, long double one_minus_log_y = 0.77L);

// Baillie-PSW composite pipeline: trial division by primes < 1000, strong
// Fermat base 2, perfect-square rejection, strong Lucas test with Selfridge
// parameters.  Deterministic for fixed n; exact below 1000^2.
bool is_probable_prime(const mpz_class& n);

}  // namespace pgy
