#include "pgy/engine.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <thread>

#include "pgy/ntcore.hpp"

namespace pgy {

std::vector<mpz_class> StageState::members() const {
  std::vector<mpz_class> out;
  out.reserve(d.size());
  mpz_class cur = a;
  for (std::size_t i = 0; i < d.size(); ++i) {
    cur += d[i];
    out.push_back(cur);
  }
  return out;
}

StageState StageState::from_members(const VariantRule& v, std::size_t s, std::uint64_t p,
                                    const std::vector<mpz_class>& members) {
  StageState st;
  st.variant = v;
  st.s = s;
  st.p = p;
  if (!members.empty()) {
    st.a = members.front();
    st.d.reserve(members.size());
    st.d.push_back(0);
    for (std::size_t i = 1; i < members.size(); ++i) st.d.push_back(members[i] - members[i - 1]);
  }
  return st;
}

StageState seed(const VariantRule& variant) {
  std::vector<mpz_class> members;
  switch (variant.kind) {
    case VariantKind::floor_game:
      members = {mpz_class(2)};
      break;
    case VariantKind::round_game:
      members = {mpz_class(2), mpz_class(3)};
      break;
    case VariantKind::semi_game: {
      mpz_class even = 2 * mpz_class(static_cast<unsigned long>(variant.semi_base));
      if (!variant.exclude_even_semi_seed) members.push_back(even);
      members.push_back(even + 1);
      break;
    }
  }
  return StageState::from_members(variant, 1, 2, members);
}

namespace {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void window_bounds(std::uint64_t p, const VariantRule& v, std::int64_t& lo, std::int64_t& hi) {
  if (v.kind == VariantKind::round_game) {
    std::int64_t h = static_cast<std::int64_t>((p - 1) / 2);
    lo = -h;
    hi = h;
  } else {
    lo = 1;
    hi = static_cast<std::int64_t>(p - 1);
  }
}

}  // namespace

std::vector<mpz_class> children(const mpz_class& q, std::uint64_t p_next,
                                const VariantRule& variant, bool require_prime) {
  std::int64_t lo, hi;
  window_bounds(p_next, variant, lo, hi);
  mpz_class o = q * static_cast<unsigned long>(p_next);

  std::vector<mpz_class> out;
  if (!require_prime) {
    for (std::int64_t r = lo; r <= hi; ++r) out.push_back(o + r);
    return out;
  }

  const std::uint64_t sieve_limit = p_next * p_next;
  mpz_class window_start = o + lo;
  // Values at or below the sieve bound (or below the trial-division floor)
  // are tested directly: there a sieve prime could coincide with a candidate.
  if (window_start <= std::max<std::uint64_t>(sieve_limit, 1000000)) {
    for (std::int64_t r = lo; r <= hi; ++r) {
      mpz_class cand = o + r;
      if (r == 0) continue;  // the window center q*p is divisible by p
      if (is_probable_prime(cand)) out.push_back(cand);
    }
    return out;
  }

  const std::int64_t width = hi - lo + 1;
  std::vector<std::uint8_t> dead(static_cast<std::size_t>(width), 0);

  // b = 2 by parity of o.
  bool o_odd = mpz_odd_p(o.get_mpz_t()) != 0;
  std::int64_t first_even = ((o_odd ? 1 : 0) + lo) % 2 == 0 ? lo : lo + 1;
  for (std::int64_t r = first_even; r <= hi; r += 2) dead[static_cast<std::size_t>(r - lo)] = 1;

  auto tables = shared_tables(sieve_limit + 2);
  const auto& primes = tables->primes();
  auto mark_from = [&](std::uint64_t b) {
    std::uint64_t om = mpz_fdiv_ui(o.get_mpz_t(), b);
    std::int64_t r0 = om == 0 ? 0 : static_cast<std::int64_t>(b - om);
    std::int64_t bb = static_cast<std::int64_t>(b);
    std::int64_t r = r0 - bb * floor_div(r0 - lo, bb);
    for (; r <= hi; r += bb) dead[static_cast<std::size_t>(r - lo)] = 1;
  };
  // Odd primes b <= p-2 step through the window...
  for (std::size_t i = 1; i < primes.size() && primes[i] + 2 <= p_next; ++i) mark_from(primes[i]);
  // ...and primes in (p, p^2) hit at most one slot each.
  for (std::size_t i = 1; i < primes.size(); ++i) {
    if (primes[i] <= p_next) continue;
    if (primes[i] > sieve_limit) break;
    mark_from(primes[i]);
  }
  if (lo <= 0 && 0 <= hi) dead[static_cast<std::size_t>(-lo)] = 1;  // center q*p

  for (std::int64_t r = lo; r <= hi; ++r) {
    if (dead[static_cast<std::size_t>(r - lo)]) continue;
    mpz_class cand = o + r;
    if (is_probable_prime(cand)) out.push_back(cand);
  }
  return out;
}

StepResult step(const StageState& state, unsigned threads) {
  const std::size_t next_s = state.s + 1;
  const std::uint64_t p_next = nth_prime(next_s);
  const bool require_prime = next_s >= state.variant.primality_from_stage;
  const std::vector<mpz_class> members = state.members();

  // Pre-extend the shared tables once so workers only read.
  shared_tables(std::max<std::uint64_t>(p_next * p_next + 2, 1u << 16));

  const std::size_t n = members.size();
  unsigned blocks = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::vector<mpz_class>> block_children(blocks);
  std::vector<std::vector<std::uint32_t>> block_parents(blocks);

  auto work = [&](unsigned blk) {
    std::size_t begin = n * blk / blocks;
    std::size_t end = n * (blk + 1) / blocks;
    for (std::size_t i = begin; i < end; ++i) {
      std::vector<mpz_class> ch = children(members[i], p_next, state.variant, require_prime);
      for (auto& c : ch) {
        block_children[blk].push_back(std::move(c));
        block_parents[blk].push_back(static_cast<std::uint32_t>(i));
      }
    }
  };
  if (blocks == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned b = 1; b < blocks; ++b) pool.emplace_back(work, b);
    work(0);
    for (auto& t : pool) t.join();
  }

  // Parent windows are disjoint and ascending, so in-order concatenation
  // yields the globally sorted next population.
  std::vector<mpz_class> next_members;
  std::vector<std::uint32_t> parents;
  for (unsigned b = 0; b < blocks; ++b) {
    for (auto& c : block_children[b]) next_members.push_back(std::move(c));
    parents.insert(parents.end(), block_parents[b].begin(), block_parents[b].end());
  }

  StepResult out;
  out.next = StageState::from_members(state.variant, next_s, p_next, next_members);
  out.parent_index = std::move(parents);
  out.extinct = next_members.empty();
  return out;
}

RunResult run(StageState state, std::size_t to_stage, const StageSink& sink, unsigned threads) {
  RunResult res;
  while (state.s < to_stage) {
    auto t0 = std::chrono::steady_clock::now();
    StepResult sr = step(state, threads);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (sink) sink(sr.next, sr.parent_index, ms);
    if (sr.extinct) {
      res.last = std::move(state);
      res.extinct = true;
      res.extinct_at = sr.next.s;
      return res;
    }
    state = std::move(sr.next);
  }
  res.last = std::move(state);
  return res;
}

namespace {

std::string decimal_of_ratio(const mpz_class& q, const mpz_class& m, std::size_t digits) {
  mpz_class ip = q / m;
  mpz_class rem = q - ip * m;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class frac = rem * scale / m;
  std::string fs = frac.get_str();
  if (fs.size() < digits) fs.insert(fs.begin(), digits - fs.size(), '0');
  return ip.get_str() + "." + fs;
}

}  // namespace

std::string YInterval::decimal_lower(std::size_t digits) const {
  return decimal_of_ratio(q, modulus, digits);
}

std::string YInterval::decimal_upper(std::size_t digits) const {
  return decimal_of_ratio(q + 1, modulus, digits);
}

std::string ratio_scientific(const mpz_class& num, const mpz_class& den, std::size_t sig) {
  if (num == 0) return "0";
  // Scale so the quotient carries `sig` leading digits, then place the point.
  std::size_t nd = num.get_str().size();
  std::size_t dd = den.get_str().size();
  std::size_t shift = sig + 2 + (dd > nd ? dd - nd : 0);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift));
  mpz_class z = num * scale / den;
  std::string s = z.get_str();
  long exp10 = static_cast<long>(s.size()) - 1 - static_cast<long>(shift);
  std::string mant = s.substr(0, std::min(sig, s.size()));
  std::string out = mant.substr(0, 1);
  if (mant.size() > 1) out += "." + mant.substr(1);
  out += "e";
  if (exp10 >= 0) out += "+";
  out += std::to_string(exp10);
  return out;
}

YBounds y_bounds(const StageState& state, std::size_t gap_digits) {
  if (state.n() == 0) throw std::invalid_argument("y_bounds: empty stage");
  mpz_class modulus = primorial(state.p);
  std::vector<mpz_class> m = state.members();
  YBounds out;
  out.lower = YInterval{m.front(), modulus};
  out.upper = YInterval{m.back(), modulus};
  mpz_class width = m.back() + 1 - m.front();
  out.gap = ratio_scientific(width, modulus, gap_digits);
  return out;
}

std::vector<SplitOffset> split_offsets(const std::vector<mpz_class>& siblings,
                                       const mpz_class& modulus, std::size_t digits) {
  std::vector<SplitOffset> out;
  if (siblings.size() < 2) return out;
  for (std::size_t j = 1; j < siblings.size(); ++j) {
    SplitOffset so;
    so.delta = siblings[j] - siblings.front();
    so.exact = mpq_class(so.delta) / mpq_class(modulus);
    so.exact.canonicalize();
    so.decimal = ratio_scientific(so.delta, modulus, digits);
    out.push_back(std::move(so));
  }
  return out;
}

std::string export_checkpoint(const StageState& state) {
  std::string out = "a=" + state.a.get_str() + "; d=[";
  for (std::size_t i = 0; i < state.d.size(); ++i) {
    if (i) out += ", ";
    out += state.d[i].get_str();
  }
  out += "]\n";
  return out;
}

StageState import_checkpoint(const std::string& text, const VariantRule& variant,
                             std::size_t s, bool recheck_prp) {
  std::size_t pos = text.find("a=");
  if (pos == std::string::npos) throw CheckpointError("missing 'a=' field");
  std::size_t semi = text.find(';', pos);
  if (semi == std::string::npos) throw CheckpointError("missing ';' after a");
  std::string a_str = text.substr(pos + 2, semi - pos - 2);
  if (a_str.empty() || a_str.find_first_not_of("0123456789") != std::string::npos)
    throw CheckpointError("malformed a digits");
  std::size_t lb = text.find('[', semi);
  std::size_t rb = text.find(']', semi);
  if (lb == std::string::npos || rb == std::string::npos || rb < lb)
    throw CheckpointError("missing delta list");

  StageState st;
  st.variant = variant;
  st.s = s;
  st.p = nth_prime(s);
  st.a = mpz_class(a_str);

  std::string body = text.substr(lb + 1, rb - lb - 1);
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && (body[i] == ' ' || body[i] == ',')) ++i;
    if (i >= body.size()) break;
    std::size_t j = i;
    while (j < body.size() && std::isdigit(static_cast<unsigned char>(body[j]))) ++j;
    if (j == i) throw CheckpointError("malformed delta list");
    st.d.emplace_back(body.substr(i, j - i));
    i = j;
  }

  if (!st.d.empty() && st.d[0] != 0) throw CheckpointError("first delta must be 0", 0);
  for (std::size_t idx = 1; idx < st.d.size(); ++idx)
    if (st.d[idx] <= 0)
      throw CheckpointError("deltas must keep members strictly ascending", static_cast<long>(idx));
  if (recheck_prp && s >= variant.primality_from_stage) {
    std::vector<mpz_class> m = st.members();
    for (std::size_t idx = 0; idx < m.size(); ++idx)
      if (!is_probable_prime(m[idx]))
        throw CheckpointError("member fails probable-prime recheck", static_cast<long>(idx));
  }
  return st;
}

}  // namespace pgy
