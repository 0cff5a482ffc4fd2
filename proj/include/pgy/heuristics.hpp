#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pgy {

// How the interval-density correction psi is supplied to the recursions:
// the k->infinity limit C2 (p-1+a)/(p-2) (default, matches the published
// extinction values), the finite-k wheel value, or none (psi = 1).
enum class PsiPolicy { limit, finite_k, none };

struct OmegaParams {
  long double log_y_offset = 0.23L;  // log q := theta(p) + this
  PsiPolicy psi_policy = PsiPolicy::limit;
  std::size_t start_offset = 1900;     // t = s_query + offset, capped
  std::uint64_t start_prime_cap = 20000;  // cap t so p_t <= this
};

// Extinction-probability series: values[s] is the probability that a single
// stage-s member fails to found an infinite branch, computed by backward
// recursion from a start stage t with omega(t) = 1 - 1/sqrt(2 p_t).
struct OmegaSeries {
  std::uint64_t k = 1;     // wheel throttle; 1 = plain recursion
  std::size_t t = 0;       // start stage
  long double omega_t = 0; // start value
  OmegaParams params;
  std::map<std::size_t, long double> values;  // stage -> omega(stage)

  long double at(std::size_t s) const { return values.at(s); }
};

// One backward step: from omega(s) at stage s (prime p_s) to omega(s-1).
long double omega_step(std::size_t s, long double omega_s, std::uint64_t k,
                       const OmegaParams& params = {});

// Series over [s_min, t] from the given start.  Rejects omega_t >= 1.
OmegaSeries omega_series(std::size_t s_min, std::size_t t, long double omega_t,
                         std::uint64_t k = 1, const OmegaParams& params = {});

// Default-policy convenience: t = min(s_query + 1900, largest stage with
// p_t <= 20000), omega_t = 1 - 1/sqrt(2 p_t).
OmegaSeries omega_series_default(std::size_t s_query, std::uint64_t k = 1,
                                 const OmegaParams& params = {});

// omega^n in log space; the wide-range variant returns log10 of the result.
long double failure_probability(long double omega, double n);
long double failure_probability_log10(long double omega, double n);

// Distribution of the number of stage-s descendants of one reference member
// at the anchor stage (default 101): probability-generating-function
// composition of per-stage offspring laws (1 - pi + pi x)^(p-1), truncated
// at `degree` (entries 0..degree-1 plus the leftover mass in the last slot).
std::vector<long double> n_distribution(std::size_t s, std::size_t anchor = 101,
                                        std::size_t degree = 8,
                                        const OmegaParams& params = {});

// Expected next-stage population: n * psi(p_{s+1}) (p_{s+1}-1)/(theta+0.23).
long double predict_next_n(double n, std::size_t s, const OmegaParams& params = {});

struct PredictionRecord {
  std::size_t s = 0;
  long double predicted = 0;
  std::size_t actual = 0;
  long double sigma = 0;  // (actual - predicted)/sqrt(predicted)
};

// Per-stage predictions from each stage's actual count to the next;
// actuals[i] is the population at stage first_stage + i.
std::vector<PredictionRecord> deviation_series(const std::vector<std::size_t>& actuals,
                                               std::size_t first_stage,
                                               const OmegaParams& params = {});

// Closed-form population shortcut sqrt(exp(sqrt(3 s)))/8.
long double approx_n(std::size_t s);

// Probability that one parent window at stage s produces at least `fold`
// children that all become stable branches:
//   sum_{x=fold}^{p-1} C(p-1,x) (1/(lq-1))^x (1 - 1/lq)^{p-1}
//                      (1-omega_prev)^x C(x,fold),
// with lq = theta(p_s) + 0.23; terms below 1e-30 of the sum are dropped.
long double split_probability(std::size_t s, std::size_t fold, long double omega_prev,
                              const OmegaParams& params = {});
// Aggregate over a population of n windows: 1 - (1 - v)^n.
long double split_probability_aggregate(long double v, double n);

// First stages at which the modelled population exceeds each threshold,
// iterating log n_{s+1} = log n_s + log(psi (p-1)/(theta+0.23)) from the
// anchor (s0, n0).  Exact psi is used for p <= exact_psi_bound and the
// asymptotic 1 - log p/(2p) beyond it.
std::vector<std::size_t> project_stage_targets(std::size_t s0, double n0,
                                               const std::vector<double>& targets,
                                               std::uint64_t exact_psi_bound = 500000,
                                               const OmegaParams& params = {});

// Limit of f <- exp(z (f - 1)) from f = 0: extinction probability of the
// Poisson branching model (1 for z <= 1).
long double extinction_fixed_point(long double z);

// Leading error terms of the one-step omega drift:
//   (omega - 1)(m/sqrt(p) + 1/p + (1 - omega)/2).
long double omega_delta_estimate(long double m, std::uint64_t p, long double omega);

struct Stability {
  bool stable = false;        // n > p
  bool stable_strong = false; // n > 0.5 sqrt(p) log p
};
Stability stability(std::size_t n, std::uint64_t p);

// CSV emitters.
std::string omega_csv(const OmegaSeries& series);
std::string table6_csv(std::size_t s_from, std::size_t s_to,
                       const std::vector<std::size_t>& extra_rows = {},
                       const OmegaParams& params = {});
std::string predictions_csv(const std::vector<PredictionRecord>& records);

}  // namespace pgy
