#include "pgy/ntcore.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace pgy {
namespace {

// Compensated (Kahan) accumulator; keeps summation error at one ulp even for
// millions of terms.
struct Kahan {
  long double sum = 0.0L;
  long double carry = 0.0L;
  void add(long double x) {
    long double y = x - carry;
    long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

constexpr std::uint64_t kLiCap = 1u << 17;  // per-integer Li* prefix bound

std::vector<std::uint64_t> base_primes(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  std::vector<bool> comp(limit + 1, false);
  for (std::uint64_t i = 2; i * i <= limit; ++i)
    if (!comp[i])
      for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = true;
  for (std::uint64_t i = 2; i <= limit; ++i)
    if (!comp[i]) out.push_back(i);
  return out;
}

}  // namespace

PrimeTables::PrimeTables(std::uint64_t limit) : limit_(std::max<std::uint64_t>(limit, 16)) {
  // Segmented Eratosthenes: mark each block with the base primes <= sqrt(limit).
  const std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit_))) + 1;
  const std::vector<std::uint64_t> base = base_primes(root);
  const std::uint64_t block = 1u << 20;
  std::vector<bool> comp;
  Kahan th;
  for (std::uint64_t lo = 2; lo <= limit_; lo += block) {
    const std::uint64_t hi = std::min(limit_, lo + block - 1);
    comp.assign(hi - lo + 1, false);
    for (std::uint64_t b : base) {
      if (b * b > hi) break;
      std::uint64_t start = std::max(b * b, ((lo + b - 1) / b) * b);
      for (std::uint64_t j = start; j <= hi; j += b) comp[j - lo] = true;
    }
    for (std::uint64_t v = lo; v <= hi; ++v) {
      if (!comp[v - lo]) {
        primes_.push_back(v);
        th.add(std::log(static_cast<long double>(v)));
        theta_prefix_.push_back(th.sum);
      }
    }
  }
  li_cap_ = std::min(limit_, kLiCap);
  li_prefix_.resize(li_cap_ + 1, 0.0L);
  Kahan li;
  for (std::uint64_t x = 2; x <= li_cap_; ++x) {
    li.add(1.0L / std::log(static_cast<long double>(x)));
    li_prefix_[x] = li.sum;
  }
}

std::uint64_t PrimeTables::pi(std::uint64_t x) const {
  auto it = std::upper_bound(primes_.begin(), primes_.end(), x);
  return static_cast<std::uint64_t>(it - primes_.begin());
}

std::uint64_t PrimeTables::nth_prime(std::size_t s) const {
  if (s < 1 || s > primes_.size()) throw std::out_of_range("nth_prime: table too small");
  return primes_[s - 1];
}

bool PrimeTables::is_prime_in_table(std::uint64_t n) const {
  return std::binary_search(primes_.begin(), primes_.end(), n);
}

long double PrimeTables::theta(std::uint64_t p) const {
  std::uint64_t idx = pi(p);
  if (idx == 0) return 0.0L;
  return theta_prefix_[idx - 1];
}

long double PrimeTables::li_star(std::uint64_t x) const {
  if (x < 2) return 0.0L;
  if (x <= li_cap_) return li_prefix_[x];
  Kahan li;
  li.add(li_prefix_[li_cap_]);
  for (std::uint64_t t = li_cap_ + 1; t <= x; ++t)
    li.add(1.0L / std::log(static_cast<long double>(t)));
  return li.sum;
}

namespace {
std::mutex g_tables_mutex;
std::shared_ptr<const PrimeTables> g_tables;
}  // namespace

std::shared_ptr<const PrimeTables> shared_tables(std::uint64_t at_least) {
  std::lock_guard<std::mutex> lock(g_tables_mutex);
  if (!g_tables || g_tables->limit() < at_least) {
    std::uint64_t grown = g_tables ? g_tables->limit() : 1u << 16;
    while (grown < at_least) grown *= 2;
    g_tables = std::make_shared<const PrimeTables>(grown);
  }
  return g_tables;
}

std::uint64_t nth_prime(std::size_t s) {
  auto t = shared_tables(1u << 16);
  while (!t->has_nth_prime(s)) t = shared_tables(t->limit() * 2);
  return t->nth_prime(s);
}

std::size_t stage_of_prime_bound(std::uint64_t bound) {
  auto t = shared_tables(bound + 2);
  return static_cast<std::size_t>(t->pi(bound));
}

mpz_class primorial(std::uint64_t p) {
  mpz_class acc = 1;
  if (p < 2) return acc;
  auto t = shared_tables(p);
  for (std::uint64_t q : t->primes()) {
    if (q > p) break;
    acc *= static_cast<unsigned long>(q);
  }
  return acc;
}

mpq_class w_density(std::uint64_t k) {
  mpq_class acc(1);
  auto t = shared_tables(std::max<std::uint64_t>(k, 2));
  for (std::uint64_t u : t->primes()) {
    if (u > k) break;
    acc *= mpq_class(static_cast<unsigned long>(u - 1), static_cast<unsigned long>(u));
  }
  acc.canonicalize();
  return acc;
}

long double theta(std::uint64_t p) { return shared_tables(p + 2)->theta(p); }

long double li_star(std::uint64_t x) { return shared_tables(x + 2)->li_star(x); }

long double theta_gap_from_li_pi(std::uint64_t p) {
  auto t = shared_tables(p + 2);
  // (log p)(Li*(p) - pi(p)) + 1 - sum_{x=2}^{p-1} log((x+1)/x)(Li*(x) - pi(x))
  Kahan tail;
  for (std::uint64_t x = 2; x < p; ++x) {
    long double w = std::log(static_cast<long double>(x + 1) / static_cast<long double>(x));
    tail.add(w * (t->li_star(x) - static_cast<long double>(t->pi(x))));
  }
  long double head = std::log(static_cast<long double>(p)) *
                     (t->li_star(p) - static_cast<long double>(t->pi(p)));
  return head + 1.0L - tail.sum;
}

bool survival_inequality(std::uint64_t p, long double one_minus_log_y) {
  return static_cast<long double>(p - 1) / (theta(p) - one_minus_log_y) > 1.0L;
}

namespace {

const std::vector<std::uint64_t>& trial_primes() {
  static const std::vector<std::uint64_t> t = base_primes(999);
  return t;
}

// Strong Fermat test base 2: n odd, n > 2.
bool strong_fermat_base2(const mpz_class& n) {
  mpz_class nm1 = n - 1;
  unsigned long sigma = mpz_scan1(nm1.get_mpz_t(), 0);
  mpz_class d = nm1 >> sigma;
  mpz_class two = 2, x;
  mpz_powm(x.get_mpz_t(), two.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == nm1) return true;
  for (unsigned long r = 1; r < sigma; ++r) {
    x = (x * x) % n;
    if (x == nm1) return true;
    if (x == 1) return false;
  }
  return false;
}

// Divide by 2 modulo odd n, operand already reduced into [0, n).
inline void half_mod(mpz_class& x, const mpz_class& n) {
  if (mpz_odd_p(x.get_mpz_t())) x += n;
  x >>= 1;
}

// Strong Lucas probable-prime test with Selfridge "method A" parameters:
// D is the first of 5, -7, 9, -11, ... with Jacobi(D/n) = -1; P = 1,
// Q = (1 - D)/4.  n must be odd, > 5, and not a perfect square (the caller
// rejects squares first, which also guarantees the D search terminates).
bool strong_lucas_selfridge(const mpz_class& n) {
  long d_mag = 5;
  long sign = 1;
  mpz_class D;
  while (true) {
    D = sign * d_mag;
    int j = mpz_jacobi(D.get_mpz_t(), n.get_mpz_t());
    if (j == -1) break;
    if (j == 0) return mpz_cmpabs(n.get_mpz_t(), D.get_mpz_t()) == 0;
    sign = -sign;
    d_mag += 2;
  }
  mpz_class Q = (1 - D) / 4;
  mpz_class Qmod = Q % n;
  if (Qmod < 0) Qmod += n;
  mpz_class Dmod = D % n;
  if (Dmod < 0) Dmod += n;

  mpz_class np1 = n + 1;
  unsigned long sigma = mpz_scan1(np1.get_mpz_t(), 0);
  mpz_class d = np1 >> sigma;

  // Binary ladder for U_d, V_d, Q^d mod n (P = 1).
  mpz_class U = 1, V = 1, Qk = Qmod;
  std::size_t bits = mpz_sizeinbase(d.get_mpz_t(), 2);
  for (std::size_t i = bits - 1; i-- > 0;) {
    // double: (U, V, Qk) for index k -> 2k
    U = (U * V) % n;
    V = (V * V - 2 * Qk) % n;
    if (V < 0) V += n;
    Qk = (Qk * Qk) % n;
    if (mpz_tstbit(d.get_mpz_t(), static_cast<unsigned long>(i))) {
      // increment: k -> k+1 with P = 1
      mpz_class U1 = (U + V) % n;
      mpz_class V1 = (Dmod * U + V) % n;
      half_mod(U1, n);
      half_mod(V1, n);
      U = U1;
      V = V1;
      Qk = (Qk * Qmod) % n;
    }
  }

  if (U == 0 || V == 0) return true;
  for (unsigned long r = 1; r < sigma; ++r) {
    V = (V * V - 2 * Qk) % n;
    if (V < 0) V += n;
    if (V == 0) return true;
    Qk = (Qk * Qk) % n;
  }
  return false;
}

}  // namespace

bool is_probable_prime(const mpz_class& n) {
  if (n < 2) return false;
  for (std::uint64_t b : trial_primes()) {
    if (mpz_cmp_ui(n.get_mpz_t(), b) == 0) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), b)) return false;
  }
  if (n < 1000ul * 1000ul) return true;  // trial division is exhaustive here
  if (!strong_fermat_base2(n)) return false;
  if (mpz_perfect_square_p(n.get_mpz_t())) return false;
  return strong_lucas_selfridge(n);
}

}  // namespace pgy
