#include "pgy/density.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pgy/ntcore.hpp"

namespace pgy {
namespace {

// Riemann zeta at real x >= 2: direct sum plus Euler-Maclaurin tail.
long double zeta_real(long double x) {
  const int N = 1000;
  long double s = 0.0L;
  for (int n = N; n >= 1; --n) s += powl(static_cast<long double>(n), -x);
  long double Nf = static_cast<long double>(N);
  long double tail = powl(Nf, 1.0L - x) / (x - 1.0L) - 0.5L * powl(Nf, -x) +
                     x * powl(Nf, -x - 1.0L) / 12.0L -
                     x * (x + 1.0L) * (x + 2.0L) * powl(Nf, -x - 3.0L) / 720.0L +
                     x * (x + 1.0L) * (x + 2.0L) * (x + 3.0L) * (x + 4.0L) *
                         powl(Nf, -x - 5.0L) / 30240.0L;
  return s + tail;
}

int moebius(int k) {
  int result = 1;
  for (int d = 2; d * d <= k; ++d) {
    if (k % d == 0) {
      k /= d;
      if (k % d == 0) return 0;
      result = -result;
    }
  }
  if (k > 1) result = -result;
  return result;
}

// Prime zeta P(m) = sum over primes p of p^{-m}, via Moebius inversion of
// log zeta.
long double prime_zeta(int m) {
  long double acc = 0.0L;
  for (int k = 1; k * m <= 90; ++k) {
    int mu = moebius(k);
    if (mu == 0) continue;
    acc += static_cast<long double>(mu) / k * logl(zeta_real(static_cast<long double>(k) * m));
  }
  return acc;
}

}  // namespace

long double twin_prime_constant() {
  // log C2 = -sum_{m>=2} ((2^m - 2)/m) (P(m) - 2^{-m}); the summand decays
  // like (2/3)^m / m, so m up to ~140 exhausts long-double precision.
  static const long double value = [] {
    long double log_c2 = 0.0L;
    for (int m = 2; m <= 140; ++m) {
      long double coeff = (powl(2.0L, m) - 2.0L) / m;
      long double tail = prime_zeta(m) - powl(2.0L, -m);
      log_c2 -= coeff * tail;
    }
    return expl(log_c2);
  }();
  return value;
}

mpq_class twin_prime_partial(std::uint64_t cutoff) {
  mpq_class acc(1);
  auto t = shared_tables(std::max<std::uint64_t>(cutoff, 16));
  for (std::uint64_t u : t->primes()) {
    if (u > cutoff) break;
    if (u == 2) continue;
    unsigned long um1 = static_cast<unsigned long>(u - 1);
    acc *= mpq_class(um1 * um1 - 1, um1 * um1);
  }
  acc.canonicalize();
  return acc;
}

namespace {

// Smallest-prime-factor table for [0, n].
std::vector<std::uint32_t> spf_table(std::uint32_t n) {
  std::vector<std::uint32_t> spf(n + 1);
  for (std::uint32_t i = 0; i <= n; ++i) spf[i] = i;
  for (std::uint32_t i = 2; static_cast<std::uint64_t>(i) * i <= n; ++i)
    if (spf[i] == i)
      for (std::uint32_t j = i * i; j <= n; j += i)
        if (spf[j] == j) spf[j] = i;
  return spf;
}

}  // namespace

mpq_class hl_offset_a(std::uint64_t p) {
  if (p < 3 || p % 2 == 0) throw std::invalid_argument("hl_offset_a: p must be an odd prime");
  const std::uint64_t half = (p - 1) / 2;
  static std::mutex m;
  static std::vector<std::uint32_t> spf;
  std::lock_guard<std::mutex> lock(m);
  if (spf.size() < half + 1) spf = spf_table(static_cast<std::uint32_t>(std::max<std::uint64_t>(half, 1024)));
  mpq_class sum(0);
  for (std::uint64_t x = 1; x <= half; ++x) {
    mpq_class prod(1);
    std::uint64_t v = x;
    while (v > 1) {
      std::uint32_t r = spf[v];
      while (v % r == 0) v /= r;
      if (r > 2) prod *= mpq_class(r - 1, r - 2);
    }
    sum += prod - 1;
  }
  mpq_class out = 2 * sum;
  out.canonicalize();
  return out;
}

namespace {

void phi_enumerate(const std::vector<std::uint64_t>& odd_primes, std::size_t idx,
                   std::uint64_t prod, const mpz_class& denom, std::uint64_t len,
                   mpq_class& acc) {
  // Term for the current squarefree product.
  mpz_class num(static_cast<unsigned long>(len / (2 * prod)));
  acc += mpq_class(num, denom);
  for (std::size_t i = idx; i < odd_primes.size(); ++i) {
    std::uint64_t v = odd_primes[i];
    if (prod * v > len / 2) break;  // floor would vanish for this and all later v
    phi_enumerate(odd_primes, i + 1, prod * v,
                  denom * static_cast<unsigned long>(v - 2), len, acc);
  }
}

}  // namespace

mpq_class phi_after_coprime_exact(std::uint64_t len, std::uint64_t k) {
  if (k <= 2) throw std::invalid_argument("phi_after_coprime: k must be an odd prime > 2");
  auto t = shared_tables(k + 2);
  if (!t->is_prime_in_table(k)) throw std::invalid_argument("phi_after_coprime: k must be prime");
  std::vector<std::uint64_t> odd;
  for (std::uint64_t v : t->primes()) {
    if (v > k) break;
    if (v > 2) odd.push_back(v);
  }
  mpq_class pref(1);
  for (std::uint64_t v : odd) pref *= mpq_class(v - 2, v - 1);
  mpq_class acc(0);
  if (len >= 2) {
    phi_enumerate(odd, 0, 1, mpz_class(1), len, acc);
  }
  mpq_class out = pref * acc;
  out.canonicalize();
  return out;
}

long double phi_after_coprime(std::uint64_t len, std::uint64_t k) {
  return static_cast<long double>(phi_after_coprime_exact(len, k).get_d());
}

mpq_class phi_after_coprime_bruteforce(std::uint64_t len, std::uint64_t k) {
  auto t = shared_tables(k + 2);
  if (k <= 2 || !t->is_prime_in_table(k))
    throw std::invalid_argument("phi_after_coprime_bruteforce: k must be an odd prime > 2");
  std::uint64_t period = 1;
  std::vector<std::uint64_t> ks;
  for (std::uint64_t v : t->primes()) {
    if (v > k) break;
    ks.push_back(v);
    period *= v;
  }
  // Indicator of coprimality to k# over one period plus the interval overhang.
  std::vector<std::uint8_t> coprime(period + len + 1, 1);
  for (std::uint64_t v : ks)
    for (std::uint64_t j = 0; j < coprime.size(); j += v) coprime[j] = 0;
  std::vector<std::uint64_t> prefix(coprime.size() + 1, 0);
  for (std::size_t i = 0; i < coprime.size(); ++i) prefix[i + 1] = prefix[i] + coprime[i];
  unsigned long total = 0, residues = 0;
  for (std::uint64_t t0 = 0; t0 < period; ++t0) {
    if (!coprime[t0]) continue;
    ++residues;
    total += static_cast<unsigned long>(prefix[t0 + len + 1] - prefix[t0 + 1]);
  }
  mpq_class out(total, residues);
  out.canonicalize();
  return out;
}

long double psi(std::uint64_t p, std::uint64_t k) {
  mpq_class phi = phi_after_coprime_exact(p - 1, k);
  mpq_class ratio = phi / (w_density(k) * mpq_class(static_cast<unsigned long>(p - 2)));
  return static_cast<long double>(ratio.get_d());
}

long double psi_limit(std::uint64_t p) {
  mpq_class a = hl_offset_a(p);
  mpq_class lin = (mpq_class(static_cast<unsigned long>(p - 1)) + a) /
                  mpq_class(static_cast<unsigned long>(p - 2));
  return twin_prime_constant() * static_cast<long double>(lin.get_d());
}

std::uint64_t default_k_policy(std::uint64_t p) {
  long double bound = std::max<long double>(logl(static_cast<long double>(p)), 13.0L);
  std::uint64_t k = static_cast<std::uint64_t>(bound) + 1;
  auto t = shared_tables(2 * k + 64);
  for (std::uint64_t q : t->primes())
    if (q >= k && static_cast<long double>(q) > bound) return q;
  return 17;  // unreachable at sane p
}

std::vector<Table4Row> table4(std::uint64_t j_max, std::uint64_t k) {
  auto t = shared_tables(k + 2);
  std::vector<std::uint64_t> bs;
  for (std::uint64_t b : t->primes()) {
    if (b > k) break;
    bs.push_back(b);
  }
  std::vector<Table4Row> rows;
  // Random-interval reference row: divisibility 1/b, coprime density W(k).
  Table4Row rnd;
  rnd.j = 0;
  rnd.coprime = 1;
  for (std::uint64_t b : bs) {
    rnd.frac.emplace_back(1, static_cast<unsigned long>(b));
    rnd.coprime *= mpq_class(b - 1, b);
  }
  rnd.cumulative = rnd.coprime * static_cast<unsigned long>(j_max);
  rnd.cumulative.canonicalize();
  rows.push_back(rnd);

  mpq_class running(0);
  for (std::uint64_t j = 1; j <= j_max; ++j) {
    Table4Row row;
    row.j = j;
    row.coprime = 1;
    for (std::uint64_t b : bs) {
      mpq_class f;
      if (b == 2) {
        f = (j % 2 == 1) ? mpq_class(1) : mpq_class(0);
      } else {
        f = (j % b == 0) ? mpq_class(0) : mpq_class(1, static_cast<unsigned long>(b - 1));
      }
      row.frac.push_back(f);
      row.coprime *= (mpq_class(1) - f);
    }
    row.coprime.canonicalize();
    running += row.coprime;
    running.canonicalize();
    row.cumulative = running;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string pct(const mpq_class& q, int decimals) {
  char buf[64];
  double v = q.get_d() * 100.0;
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace

std::string table4_csv(std::uint64_t j_max, std::uint64_t k) {
  auto rows = table4(j_max, k);
  auto t = shared_tables(k + 2);
  std::ostringstream out;
  out << "offset";
  for (std::uint64_t b : t->primes()) {
    if (b > k) break;
    out << ",div_" << b << "_pct";
  }
  out << ",coprime_pct,interval_sum\n";
  for (const auto& row : rows) {
    out << (row.j == 0 ? std::string("random") : "+" + std::to_string(row.j));
    for (const auto& f : row.frac) out << "," << pct(f, 1);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", row.cumulative.get_d());
    out << "," << pct(row.coprime, 1) << "," << buf << "\n";
  }
  return out.str();
}

std::string table5_csv(const std::vector<std::uint64_t>& lengths) {
  std::ostringstream out;
  out << "len,a\n";
  for (std::uint64_t len : lengths) {
    mpq_class a = hl_offset_a(len + 1);
    out << len << "," << a.get_str() << "\n";
  }
  return out.str();
}

DensityModel::DensityModel(std::uint64_t k)
    : k_(k), w_k_(w_density(k)), c2_(twin_prime_constant()) {}

long double DensityModel::psi_cached(std::uint64_t p, std::uint64_t k) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto key = std::make_pair(p, k);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  long double v = psi(p, k);
  cache_[key] = v;
  return v;
}

long double DensityModel::psi_limit_cached(std::uint64_t p) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = limit_cache_.find(p);
  if (it != limit_cache_.end()) return it->second;
  long double v = psi_limit(p);
  limit_cache_[p] = v;
  return v;
}

}  // namespace pgy
