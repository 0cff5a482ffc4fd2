#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace pgy {

// Twin-prime constant C2 = prod over odd primes (1 - 1/(u-1)^2), evaluated
// through the prime-zeta series (accurate to well past 15 decimals).
long double twin_prime_constant();

// Exact partial product over odd primes u <= cutoff of (1 - 1/(u-1)^2).
mpq_class twin_prime_partial(std::uint64_t cutoff);

// Hardy-Littlewood interval offset for the window length p-1:
//   a = 2 * sum_{x=1}^{(p-1)/2} ( prod_{r odd prime | x} (r-1)/(r-2)  -  1 ),
// exact rational arithmetic.
mpq_class hl_offset_a(std::uint64_t p);

// Expected count of integers coprime to k# in an interval of length len
// immediately following a number coprime to k#.  Evaluated by the closed
// recursive enumeration over squarefree odd products (exact rational):
//   prod_{v odd prime <= k} (v-2)/(v-1)
//     * sum over squarefree odd S (primes <= k, prod <= len/2)
//         floor(len / (2 prod S)) / prod_{v in S} (v-2).
// k must be an odd prime; any len >= 0 is accepted.
mpq_class phi_after_coprime_exact(std::uint64_t len, std::uint64_t k);
long double phi_after_coprime(std::uint64_t len, std::uint64_t k);

// Period-exact brute-force oracle for the same quantity: average over all
// residues t mod k# with gcd(t, k#) = 1 of the count of integers in
// (t, t+len] coprime to k#.  Practical for k <= 13 (period 30030).
mpq_class phi_after_coprime_bruteforce(std::uint64_t len, std::uint64_t k);

// Adjusted-interval-length ratio psi(p, k) = Phi(p-1, k) / (W(k) (p-2)).
long double psi(std::uint64_t p, std::uint64_t k);

// k -> infinity limit: psi_inf(p) = C2 (p - 1 + a(p-1)) / (p - 2).
long double psi_limit(std::uint64_t p);

// Default cutoff policy: smallest prime k with k > max(log p, 13).
std::uint64_t default_k_policy(std::uint64_t p);

// One row of the after-a-prime divisibility table: offset j, per-prime
// divisibility fractions for primes b <= k, the coprime fraction, and the
// running cumulative sum of coprime fractions.
struct Table4Row {
  std::uint64_t j = 0;              // 0 marks the "random interval" row
  std::vector<mpq_class> frac;      // P(divisible by b) per prime b <= k
  mpq_class coprime;                // prod (1 - frac)
  mpq_class cumulative;             // running sum of coprime fractions
};

// Rows j = 1..j_max plus the random reference row (first element).
// After a number coprime to b: an offset j is divisible by odd b with
// probability 1/(b-1) when b does not divide j and 0 when it does; for b = 2
// the offset parity decides.  The random row uses 1/b per prime.
std::vector<Table4Row> table4(std::uint64_t j_max, std::uint64_t k);

std::string table4_csv(std::uint64_t j_max, std::uint64_t k);

// CSV of the Hardy-Littlewood offsets for a list of window lengths.
std::string table5_csv(const std::vector<std::uint64_t>& lengths);

// Cached density bundle used by the heuristics layer: fixed cutoff k, its
// W(k), C2, and a (p, k) -> psi cache tolerant of concurrent readers.
class DensityModel {
 public:
  explicit DensityModel(std::uint64_t k);
  std::uint64_t k() const { return k_; }
  const mpq_class& w_k() const { return w_k_; }
  long double c2() const { return c2_; }
  long double psi_cached(std::uint64_t p, std::uint64_t k);
  long double psi_limit_cached(std::uint64_t p);

 private:
  std::uint64_t k_;
  mpq_class w_k_;
  long double c2_;
  std::mutex mutex_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, long double> cache_;
  std::map<std::uint64_t, long double> limit_cache_;
};

}  // namespace pgy
