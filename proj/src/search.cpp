#include "nlpsel/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "nlpsel/parallel.hpp"

namespace nlpsel {

std::string to_string(Algorithm a) { return a == Algorithm::SSS ? "sss" : "rsss"; }

Algorithm parse_algorithm(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "sss") return Algorithm::SSS;
  if (lower == "rsss") return Algorithm::RSSS;
  throw std::invalid_argument("unknown search algorithm '" + name + "' (expected sss or rsss)");
}

void SearchConfig::validate() const {
  if (n_iterations < 1) throw std::invalid_argument("search: n_iterations must be >= 1");
  if (k1 < 0 || k2 < 0) throw std::invalid_argument("search: K1 and K2 must be >= 0");
  if (algorithm == Algorithm::RSSS && k1 + k2 < 1) {
    throw std::invalid_argument("search: RSSS needs K1 + K2 >= 1");
  }
  if (mode.max_iterations < 0) throw std::invalid_argument("search: max_iterations must be >= 0");
}

namespace {

Neighborhood build(const ModelIndex& k, std::vector<int> additions) {
  Neighborhood nb;
  nb.plus.reserve(additions.size());
  nb.zero.reserve(additions.size() * k.size());
  for (int l : additions) nb.plus.push_back(k.with(l));
  for (int j : k) nb.minus.push_back(k.without(j));
  for (int j : k) {
    for (int l : additions) nb.zero.push_back(k.swapped(j, l));
  }
  nb.additions = std::move(additions);
  return nb;
}

}  // namespace

Neighborhood neighborhood(const ModelIndex& k, int p) {
  k.check(p);
  std::vector<int> additions;
  additions.reserve(static_cast<std::size_t>(p) - k.size());
  for (int l = 0; l < p; ++l) {
    if (!k.contains(l)) additions.push_back(l);
  }
  return build(k, std::move(additions));
}

CorrelationScreen::CorrelationScreen(const Dataset& data) {
  const Vector yc = data.y().array() - data.y().mean();
  const double ynorm = yc.norm();
  abs_corr_.resize(data.p());
  for (int j = 0; j < data.p(); ++j) {
    const Vector xc = data.x().col(j).array() - data.x().col(j).mean();
    const double denom = xc.norm() * ynorm;
    abs_corr_[j] = denom > 0.0 ? std::abs(xc.dot(yc)) / denom : 0.0;
  }
  ranking_.resize(static_cast<std::size_t>(data.p()));
  std::iota(ranking_.begin(), ranking_.end(), 0);
  std::stable_sort(ranking_.begin(), ranking_.end(),
                   [&](int a, int b) { return abs_corr_[a] > abs_corr_[b]; });
}

std::vector<int> CorrelationScreen::top_excluding(const ModelIndex& k, int count) const {
  std::vector<int> out;
  for (int j : ranking_) {
    if (static_cast<int>(out.size()) >= count) break;
    if (!k.contains(j)) out.push_back(j);
  }
  return out;
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return static_cast<std::size_t>(draw % bound);
}

Neighborhood reduced_neighborhood(const ModelIndex& k, const CorrelationScreen& screen, int p,
                                  int k1, int k2, Rng& rng) {
  k.check(p);
  std::vector<int> additions = screen.top_excluding(k, k1);
  std::vector<char> taken(static_cast<std::size_t>(p), 0);
  for (int j : k) taken[static_cast<std::size_t>(j)] = 1;
  for (int j : additions) taken[static_cast<std::size_t>(j)] = 1;
  std::vector<int> pool;
  for (int j = 0; j < p; ++j) {
    if (!taken[static_cast<std::size_t>(j)]) pool.push_back(j);
  }
  const std::size_t draws = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(k2));
  // Partial Fisher-Yates: `draws` distinct columns uniformly from the pool.
  for (std::size_t i = 0; i < draws; ++i) {
    const std::size_t pick = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[pick]);
    additions.push_back(pool[i]);
  }
  std::sort(additions.begin(), additions.end());
  return build(k, std::move(additions));
}

std::size_t sample_log_weights(std::span<const double> log_weights, Rng& rng) {
  if (log_weights.empty()) throw std::invalid_argument("sample_log_weights: no candidates");
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> w(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_weights[i] - top);
    total += w[i];
  }
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  // u landed on the rounding gap at the end; take the last positive weight.
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return i;
  }
  return w.size() - 1;
}

const MarginalCache::Entry* MarginalCache::find(const ModelIndex& k) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(k);
  return it == entries_.end() ? nullptr : &it->second;
}

const MarginalCache::Entry& MarginalCache::insert(const ModelIndex& k, Entry value) {
  std::lock_guard lock(mu_);
  return entries_.try_emplace(k, std::move(value)).first->second;
}

std::size_t MarginalCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

namespace {

class SearchRun {
 public:
  SearchRun(const Dataset& data, const HyperPmomConfig& prior, const SearchConfig& cfg,
            const Likelihood& lik)
      : data_(data), prior_(prior), cfg_(cfg), lik_(lik), rng_(cfg.seed) {}

  SearchTrace run() {
    const int p = data_.p();
    std::optional<CorrelationScreen> screen;
    if (cfg_.algorithm == Algorithm::RSSS) screen.emplace(data_);

    ModelIndex current = initial_model();
    score_batch({current});
    auto current_score = posterior_of(current);
    if (!current_score) {
      throw NumericalFailure("run_search: the initial model " + current.to_string(1) +
                             " could not be scored");
    }
    trace_.visited.push_back({1, current, *current_score});

    for (int iter = 1; iter < cfg_.n_iterations; ++iter) {
      Neighborhood nb = cfg_.algorithm == Algorithm::SSS
                            ? neighborhood(current, p)
                            : reduced_neighborhood(current, *screen, p, cfg_.k1, cfg_.k2, rng_);
      // Models above the size cap have prior probability 0 and are never scored.
      std::erase_if(nb.plus, [&](const ModelIndex& k) { return !log_model_prior(prior_, k); });
      std::erase_if(nb.zero, [&](const ModelIndex& k) { return !log_model_prior(prior_, k); });
      if (nb.plus.empty() && nb.minus.empty() && nb.zero.empty()) {
        throw std::logic_error("run_search: empty neighborhood at " + current.to_string(1));
      }

      std::vector<ModelIndex> batch;
      batch.reserve(nb.plus.size() + nb.minus.size() + nb.zero.size());
      for (const auto* set : {&nb.plus, &nb.minus, &nb.zero}) {
        batch.insert(batch.end(), set->begin(), set->end());
      }
      score_batch(batch);

      std::vector<ModelIndex> winners;
      std::vector<double> winner_scores;
      for (const auto* set : {&nb.plus, &nb.minus, &nb.zero}) {
        std::vector<const ModelIndex*> members;
        std::vector<double> scores;
        for (const auto& k : *set) {
          if (auto s = posterior_of(k)) {
            members.push_back(&k);
            scores.push_back(*s);
          }
        }
        if (members.empty()) continue;
        const std::size_t pick = sample_log_weights(scores, rng_);
        winners.push_back(*members[pick]);
        winner_scores.push_back(scores[pick]);
      }
      if (winners.empty()) {
        throw NumericalFailure("run_search: no neighbor of " + current.to_string(1) +
                               " could be scored");
      }
      const std::size_t next = sample_log_weights(winner_scores, rng_);
      current = winners[next];
      trace_.visited.push_back({iter + 1, current, winner_scores[next]});
    }
    return std::move(trace_);
  }

 private:
  ModelIndex initial_model() {
    const int p = data_.p();
    if (cfg_.initial_model) {
      cfg_.initial_model->check(p);
      if (!log_model_prior(prior_, *cfg_.initial_model)) {
        throw std::invalid_argument("run_search: initial model exceeds m_n");
      }
      return *cfg_.initial_model;
    }
    const auto size = static_cast<std::size_t>(std::min({3, p, prior_.m_n}));
    std::vector<int> pool(static_cast<std::size_t>(p));
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < size; ++i) {
      std::swap(pool[i], pool[i + uniform_index(rng_, pool.size() - i)]);
    }
    std::vector<int> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(chosen.begin(), chosen.end());
    return ModelIndex(std::move(chosen));
  }

  std::optional<double> posterior_of(const ModelIndex& k) const {
    const auto* entry = cache_.find(k);
    if (entry == nullptr || !entry->has_value()) return std::nullopt;
    return log_unnormalized_posterior(**entry, prior_);
  }

  MarginalCache::Entry score_one(const ModelIndex& k) const {
    try {
      return log_marginal(data_, prior_, k, lik_, cfg_.mode);
    } catch (const NumericalFailure&) {
      return std::nullopt;
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  }

  // Scores uncached models (in parallel), then records them in batch order so
  // counters and the running best do not depend on the worker count.
  void score_batch(const std::vector<ModelIndex>& batch) {
    std::vector<const ModelIndex*> missing;
    std::unordered_map<ModelIndex, std::size_t, ModelIndexHash> slot;
    for (const auto& k : batch) {
      if (cache_.find(k) != nullptr || slot.contains(k)) {
        ++trace_.cache_hits;
        continue;
      }
      slot.emplace(k, missing.size());
      missing.push_back(&k);
    }
    std::vector<MarginalCache::Entry> results(missing.size());
    parallel_for(missing.size(), cfg_.threads,
                 [&](std::size_t i) { results[i] = score_one(*missing[i]); });

    for (std::size_t i = 0; i < missing.size(); ++i) {
      ++trace_.cache_misses;
      const auto& entry = cache_.insert(*missing[i], std::move(results[i]));
      if (!entry) {
        ++trace_.failed_scores;
        continue;
      }
      const auto lp = log_unnormalized_posterior(*entry, prior_);
      if (!lp) continue;
      if (!have_best_ || *lp > trace_.best_log_posterior) {
        have_best_ = true;
        trace_.best = *entry;
        trace_.best_log_posterior = *lp;
        trace_.models_scored_before_best = trace_.cache_misses;
        trace_.mode_history.push_back({static_cast<int>(trace_.visited.size()),
                                       trace_.cache_misses, entry->k, *lp});
      }
    }
  }

  const Dataset& data_;
  HyperPmomConfig prior_;
  SearchConfig cfg_;
  const Likelihood& lik_;
  Rng rng_;
  MarginalCache cache_;
  SearchTrace trace_;
  bool have_best_ = false;
};

}  // namespace

SearchTrace run_search(const Dataset& data, const HyperPmomConfig& prior,
                       const SearchConfig& search, const Likelihood& lik) {
  prior.validate(data.p());
  search.validate();
  return SearchRun(data, prior, search, lik).run();
}

}  // namespace nlpsel
