#include "pgy/genealogy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pgy/ntcore.hpp"

namespace pgy {

GenealogyForest::GenealogyForest(std::vector<std::vector<mpz_class>> values,
                                 std::vector<std::vector<std::uint32_t>> parents)
    : values_(std::move(values)), parents_(std::move(parents)) {}

GenealogyForest GenealogyForest::build(const VariantRule& variant, std::size_t horizon,
                                       unsigned threads) {
  std::vector<std::vector<mpz_class>> values;
  std::vector<std::vector<std::uint32_t>> parents;
  StageState st = seed(variant);
  values.push_back(st.members());
  auto sink = [&](const StageState& next, const std::vector<std::uint32_t>& par, double) {
    if (next.n() > 0) {
      values.push_back(next.members());
      parents.push_back(par);
    }
  };
  run(st, horizon, sink, threads);
  return GenealogyForest(std::move(values), std::move(parents));
}

std::vector<std::uint32_t> GenealogyForest::survivor_indices(std::size_t s,
                                                             std::size_t horizon) const {
  std::vector<std::uint32_t> alive(n(horizon));
  for (std::uint32_t i = 0; i < alive.size(); ++i) alive[i] = i;
  for (std::size_t t = horizon; t > s; --t) {
    const auto& par = parents_for(t);
    std::set<std::uint32_t> up;
    for (std::uint32_t i : alive) up.insert(par[i]);
    alive.assign(up.begin(), up.end());
  }
  return alive;
}

std::size_t GenealogyForest::survivors(std::size_t s, std::size_t horizon) const {
  return survivor_indices(s, horizon).size();
}

std::optional<GenealogyForest::Ancestor> GenealogyForest::common_ancestor(
    std::size_t horizon) const {
  std::vector<std::uint32_t> alive(n(horizon));
  for (std::uint32_t i = 0; i < alive.size(); ++i) alive[i] = i;
  std::optional<Ancestor> best;
  for (std::size_t s = horizon;; --s) {
    if (alive.size() == 1) {
      best = Ancestor{s, alive[0], values_[s - 1][alive[0]]};
      break;
    }
    if (s == 1) break;
    const auto& par = parents_for(s);
    std::set<std::uint32_t> up;
    for (std::uint32_t i : alive) up.insert(par[i]);
    alive.assign(up.begin(), up.end());
  }
  return best;
}

std::uint32_t GenealogyForest::ancestor_index(std::size_t s, std::uint32_t i,
                                              std::size_t r) const {
  std::uint32_t cur = i;
  for (std::size_t t = s; t > r; --t) cur = parents_for(t)[cur];
  return cur;
}

std::optional<GenealogyForest::TupletHit> GenealogyForest::find_tuplets(std::size_t size) const {
  for (std::size_t s = 2; s <= horizon(); ++s) {
    const auto& par = parents_for(s);
    std::size_t i = 0;
    while (i < par.size()) {
      std::size_t j = i;
      while (j < par.size() && par[j] == par[i]) ++j;
      if (j - i >= size) {
        TupletHit hit;
        hit.parent_stage = s - 1;
        hit.parent_ordinal = par[i] + 1;
        mpz_class base = values_[s - 2][par[i]] * static_cast<unsigned long>(nth_prime(s));
        for (std::size_t t = i; t < j; ++t) {
          mpz_class off = values_[s - 1][t] - base;
          hit.offsets.push_back(off.get_si());
        }
        return hit;
      }
      i = j;
    }
  }
  return std::nullopt;
}

std::optional<GenealogyForest::DescendantHit> GenealogyForest::descendants_of_order(
    std::size_t order, std::size_t count) const {
  for (std::size_t s = 1; s + order <= horizon(); ++s) {
    // Descendant counts at depth `order` for every stage-s member at once.
    std::vector<std::size_t> cnt(n(s + order), 1);
    for (std::size_t t = s + order; t > s; --t) {
      std::vector<std::size_t> up(n(t - 1), 0);
      const auto& par = parents_for(t);
      for (std::size_t i = 0; i < cnt.size(); ++i) up[par[i]] += cnt[i];
      cnt = std::move(up);
    }
    for (std::uint32_t i = 0; i < cnt.size(); ++i) {
      if (cnt[i] == count) {
        DescendantHit hit;
        hit.stage = s;
        hit.ordinal = i + 1;
        mpz_class mult = 1;
        for (std::size_t t = s + 1; t <= s + order; ++t)
          mult *= static_cast<unsigned long>(nth_prime(t));
        mpz_class base = values_[s - 1][i] * mult;
        for (std::uint32_t j = 0; j < n(s + order); ++j)
          if (ancestor_index(s + order, j, s) == i)
            hit.offsets.push_back(values_[s + order - 1][j] - base);
        return hit;
      }
    }
  }
  return std::nullopt;
}

std::vector<GenealogyForest::StrengthGroup> GenealogyForest::branch_strength(
    std::size_t split_stage, std::size_t horizon) const {
  std::vector<std::size_t> sizes(n(split_stage), 0);
  for (std::uint32_t j = 0; j < n(horizon); ++j)
    sizes[ancestor_index(horizon, j, split_stage)]++;
  std::vector<StrengthGroup> out;
  for (std::uint32_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) continue;
    StrengthGroup g;
    g.ancestor_index = i;
    g.size = sizes[i];
    g.percent = 100.0 * static_cast<double>(sizes[i]) / static_cast<double>(n(horizon));
    out.push_back(g);
  }
  return out;
}

GenealogyForest::BranchBound GenealogyForest::branch_bound_c(std::size_t horizon) const {
  BranchBound best;
  for (std::size_t s0 = 1; s0 <= horizon; ++s0) {
    const std::size_t roots = n(s0);
    // Label every later member with its stage-s0 ancestor and track per-root
    // subtree sizes stage by stage.
    std::vector<std::uint32_t> label(roots);
    for (std::uint32_t i = 0; i < roots; ++i) label[i] = i;
    std::vector<std::size_t> cnt(roots, 1);
    struct Track {
      double peak_val = 0.0;
      std::size_t peak_stage = 0, peak_size = 0;
      std::size_t extinct = 0;  // 0 = still alive
    };
    std::vector<Track> tr(roots);
    auto absorb = [&](std::size_t stage) {
      double norm = 0.5 * std::sqrt(static_cast<double>(nth_prime(stage))) *
                    std::log(static_cast<double>(nth_prime(stage)));
      for (std::uint32_t i = 0; i < roots; ++i) {
        if (tr[i].extinct || cnt[i] == 0) continue;
        double v = static_cast<double>(cnt[i]) / norm;
        if (v > tr[i].peak_val) {
          tr[i].peak_val = v;
          tr[i].peak_stage = stage;
          tr[i].peak_size = cnt[i];
        }
      }
    };
    absorb(s0);
    for (std::size_t t = s0 + 1; t <= horizon; ++t) {
      const auto& par = parents_for(t);
      std::vector<std::uint32_t> nl(n(t));
      std::vector<std::size_t> nc(roots, 0);
      for (std::uint32_t j = 0; j < nl.size(); ++j) {
        nl[j] = label[par[j]];
        nc[nl[j]]++;
      }
      for (std::uint32_t i = 0; i < roots; ++i)
        if (!tr[i].extinct && cnt[i] > 0 && nc[i] == 0) tr[i].extinct = t;
      label = std::move(nl);
      cnt = std::move(nc);
      absorb(t);
    }
    for (std::uint32_t i = 0; i < roots; ++i) {
      if (!tr[i].extinct) continue;  // survived to the horizon: not an extinct branch
      if (tr[i].peak_val > best.c) {
        best.c = tr[i].peak_val;
        best.root_stage = s0;
        best.root_ordinal = i + 1;
        best.peak_stage = tr[i].peak_stage;
        best.peak_size = tr[i].peak_size;
        best.extinct_stage = tr[i].extinct;
      }
    }
  }
  return best;
}

std::vector<std::size_t> GenealogyForest::no_split_stages(std::size_t horizon) const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> surv(horizon + 1, 0);
  // One backward sweep: survivor sets per stage.
  std::vector<std::uint32_t> alive(n(horizon));
  for (std::uint32_t i = 0; i < alive.size(); ++i) alive[i] = i;
  surv[horizon] = alive.size();
  for (std::size_t t = horizon; t > 1; --t) {
    const auto& par = parents_for(t);
    std::set<std::uint32_t> up;
    for (std::uint32_t i : alive) up.insert(par[i]);
    alive.assign(up.begin(), up.end());
    surv[t - 1] = alive.size();
  }
  for (std::size_t s = 2; s <= horizon; ++s)
    if (surv[s] == surv[s - 1]) out.push_back(s);
  return out;
}

std::string GenealogyForest::survivors_csv(std::size_t horizon) const {
  std::ostringstream out;
  out << "s,p,n,n_star\n";
  for (std::size_t s = 1; s <= horizon; ++s)
    out << s << "," << nth_prime(s) << "," << n(s) << "," << survivors(s, horizon) << "\n";
  return out.str();
}

}  // namespace pgy
