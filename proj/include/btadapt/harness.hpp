#pragma once

#include "btadapt/fire.hpp"
#include "btadapt/rng.hpp"
#include "btadapt/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace btadapt {

using ScenarioConfig = std::variant<TerrainScenarioConfig, FireScenarioConfig>;

struct ExperimentSpec {
    ScenarioConfig scenario;
    std::vector<SelectorPolicy> policies;
    std::string label;
};

struct SummaryMetrics {
    std::size_t trials = 0;
    double avg_ticks = 0.0;
    double ticks_stddev = 0.0; ///< sample standard deviation of per-trial leaf ticks
    double avg_cost = 0.0;
    double avg_utility_per_tick = 0.0; ///< sum of utility over sum of leaf ticks
    std::vector<double> ticks_per_step_curve;
    std::size_t walk_trials = 0;
    std::size_t fly_trials = 0;
    std::size_t fail_trials = 0;

    double ticks_stderr() const noexcept
    {
        return trials > 1 ? ticks_stddev / std::sqrt(static_cast<double>(trials)) : 0.0;
    }

    bool operator==(const SummaryMetrics&) const = default;
};

struct PolicySummary {
    SelectorPolicy policy;
    SummaryMetrics metrics;
};

/// Mean fields are plain means over trials; utility per tick is a ratio of
/// sums; the per-step curve is the mean over trials that share its length.
inline SummaryMetrics aggregate_metrics(std::span<const TrialResult> results)
{
    if (results.empty()) throw ConfigError("cannot aggregate zero trials");
    SummaryMetrics m;
    m.trials = results.size();
    const double n = static_cast<double>(results.size());

    double ticks = 0.0, cost = 0.0, utility = 0.0;
    for (const auto& r : results) {
        ticks += static_cast<double>(r.total_leaf_ticks);
        cost += r.total_cost;
        utility += r.total_utility;
        m.walk_trials += r.walked ? 1 : 0;
        m.fly_trials += r.flew ? 1 : 0;
        m.fail_trials += r.mission_failed ? 1 : 0;
    }
    m.avg_ticks = ticks / n;
    m.avg_cost = cost / n;
    m.avg_utility_per_tick = ticks > 0.0 ? utility / ticks : 0.0;

    if (results.size() > 1) {
        double ss = 0.0;
        for (const auto& r : results) {
            const double d = static_cast<double>(r.total_leaf_ticks) - m.avg_ticks;
            ss += d * d;
        }
        m.ticks_stddev = std::sqrt(ss / (n - 1.0));
    }

    const std::size_t steps = results.front().ticks_per_step.size();
    const bool uniform = std::all_of(results.begin(), results.end(),
                                     [&](const TrialResult& r) { return r.ticks_per_step.size() == steps; });
    if (steps > 0 && uniform) {
        m.ticks_per_step_curve.assign(steps, 0.0);
        for (const auto& r : results) {
            for (std::size_t k = 0; k < steps; ++k) m.ticks_per_step_curve[k] += static_cast<double>(r.ticks_per_step[k]);
        }
        for (auto& v : m.ticks_per_step_curve) v /= n;
    }
    return m;
}

/// Seed of trial `trial` of `policy`. Depends only on its arguments, so adding
/// a policy never perturbs another policy's draws.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial, SelectorPolicy policy)
{
    return derive_seed(base_seed, trial, to_string(policy));
}

inline std::size_t default_worker_count()
{
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : std::min<std::size_t>(hw, 16);
}

/// Runs every trial of one policy. Independent terrain trials are spread over
/// `workers` threads; results are stored by trial index so the output does
/// not depend on scheduling. Persistent-learning runs are sequential.
inline std::vector<TrialResult> run_trials(const ScenarioConfig& scenario, SelectorPolicy policy,
                                           std::size_t workers = default_worker_count())
{
    return std::visit(
        [&](const auto& base) -> std::vector<TrialResult> {
            auto cfg = base;
            cfg.policy = policy;
            validate(cfg);
            std::vector<TrialResult> out(cfg.trials);

            using Cfg = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<Cfg, FireScenarioConfig>) {
                FireMission mission(cfg);
                for (std::size_t i = 0; i < cfg.trials; ++i) {
                    RandomStream rng(trial_seed(cfg.seed, i, policy));
                    out[i] = mission.run_trial(rng);
                }
            } else {
                if (cfg.persist_learning || workers <= 1 || cfg.trials < 2) {
                    TerrainWalker walker(cfg);
                    for (std::size_t i = 0; i < cfg.trials; ++i) {
                        RandomStream rng(trial_seed(cfg.seed, i, policy));
                        out[i] = walker.run_trial(rng);
                    }
                } else {
                    const std::size_t n = std::min(workers, cfg.trials);
                    std::vector<std::exception_ptr> errors(n);
                    {
                        std::vector<std::jthread> pool;
                        for (std::size_t w = 0; w < n; ++w) {
                            pool.emplace_back([&, w] {
                                try {
                                    TerrainWalker walker(cfg);
                                    for (std::size_t i = w; i < cfg.trials; i += n) {
                                        RandomStream rng(trial_seed(cfg.seed, i, policy));
                                        out[i] = walker.run_trial(rng);
                                    }
                                } catch (...) {
                                    errors[w] = std::current_exception();
                                }
                            });
                        }
                    }
                    for (auto& e : errors) {
                        if (e) std::rethrow_exception(e);
                    }
                }
            }
            return out;
        },
        scenario);
}

inline std::vector<PolicySummary> run_experiment(const ExperimentSpec& spec, std::size_t workers = default_worker_count())
{
    if (spec.policies.empty()) throw ConfigError("experiment '" + spec.label + "' lists no policies");
    std::vector<PolicySummary> out;
    out.reserve(spec.policies.size());
    for (const auto& p : spec.policies) {
        const auto trials = run_trials(spec.scenario, p, workers);
        out.push_back({p, aggregate_metrics(trials)});
    }
    return out;
}

/// Per-policy metrics plus rank orders (indices into `summaries`, best first).
struct PolicyRanking {
    std::vector<PolicySummary> summaries;
    std::vector<std::size_t> by_ticks;   ///< ascending avg_ticks
    std::vector<std::size_t> by_cost;    ///< ascending avg_cost
    std::vector<std::size_t> by_utility; ///< descending avg_utility_per_tick
};

inline PolicyRanking rank_summaries(std::vector<PolicySummary> summaries)
{
    PolicyRanking r;
    r.summaries = std::move(summaries);
    auto ranked = [&](auto less) {
        std::vector<std::size_t> idx(r.summaries.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return less(r.summaries[a].metrics, r.summaries[b].metrics); });
        return idx;
    };
    r.by_ticks = ranked([](const SummaryMetrics& a, const SummaryMetrics& b) { return a.avg_ticks < b.avg_ticks; });
    r.by_cost = ranked([](const SummaryMetrics& a, const SummaryMetrics& b) { return a.avg_cost < b.avg_cost; });
    r.by_utility = ranked([](const SummaryMetrics& a, const SummaryMetrics& b) {
        return a.avg_utility_per_tick > b.avg_utility_per_tick;
    });
    return r;
}

inline PolicyRanking compare_policies(const ExperimentSpec& spec, std::size_t workers = default_worker_count())
{
    if (spec.policies.size() < 2) throw ConfigError("policy comparison needs at least two policies");
    return rank_summaries(run_experiment(spec, workers));
}

} // namespace btadapt
