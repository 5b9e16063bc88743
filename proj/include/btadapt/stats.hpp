#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace btadapt {

/// Raised for malformed trees, out-of-domain features and invalid scenario
/// parameters. Every error the library reports derives from this type.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Status : std::uint8_t { Success, Failure };

constexpr const char* to_string(Status s) noexcept { return s == Status::Success ? "SUCCESS" : "FAILURE"; }

/// Discrete, pre-quantized sensor cluster id.
using FeatureValue = std::size_t;

/// Estimate returned by both estimators before any evidence exists.
inline constexpr double kUntriedEstimate = 0.5;

/// Per-node tick statistics.
///
/// Counts are kept both in total and per feature value. `cost` is the
/// declared cost per tick. Composite or macro nodes can instead report the
/// observed mean subtree cost per tick (`cost_from_subtree`), with `cost`
/// acting as the prior until the node has been ticked.
struct NodeStats {
    std::uint64_t n_ticks = 0;
    std::uint64_t n_success = 0;
    std::vector<std::uint64_t> n_ticks_by_feature;
    std::vector<std::uint64_t> n_success_by_feature;
    double cost = 0.0;
    bool cost_from_subtree = false;
    double accumulated_cost = 0.0;

    NodeStats() : NodeStats(1) {}

    explicit NodeStats(std::size_t feature_domain, double cost_per_tick = 0.0)
        : n_ticks_by_feature(feature_domain, 0), n_success_by_feature(feature_domain, 0), cost(cost_per_tick)
    {
        if (feature_domain == 0) throw ConfigError("feature domain must contain at least one value");
        if (!(cost_per_tick >= 0.0)) throw ConfigError("node cost must be non-negative, got " + std::to_string(cost_per_tick));
    }

    std::size_t feature_domain() const noexcept { return n_ticks_by_feature.size(); }

    double effective_cost() const noexcept
    {
        if (cost_from_subtree && n_ticks > 0) return accumulated_cost / static_cast<double>(n_ticks);
        return cost;
    }

    bool operator==(const NodeStats&) const = default;
};

inline void check_feature(const NodeStats& stats, FeatureValue feature)
{
    if (feature >= stats.feature_domain()) {
        throw ConfigError("feature value " + std::to_string(feature) + " outside domain of size " +
                          std::to_string(stats.feature_domain()));
    }
}

inline void record_outcome(NodeStats& stats, FeatureValue feature, Status status)
{
    check_feature(stats, feature);
    ++stats.n_ticks;
    ++stats.n_ticks_by_feature[feature];
    if (status == Status::Success) {
        ++stats.n_success;
        ++stats.n_success_by_feature[feature];
    }
}

/// Frequentist P(S): successes over ticks, 0.5 when never ticked.
inline double p_success(const NodeStats& stats) noexcept
{
    if (stats.n_ticks == 0) return kUntriedEstimate;
    return static_cast<double>(stats.n_success) / static_cast<double>(stats.n_ticks);
}

/// Frequentist P(S|F=feature), 0.5 when never ticked under that feature.
inline double p_success_given_feature(const NodeStats& stats, FeatureValue feature)
{
    check_feature(stats, feature);
    const auto ticks = stats.n_ticks_by_feature[feature];
    if (ticks == 0) return kUntriedEstimate;
    return static_cast<double>(stats.n_success_by_feature[feature]) / static_cast<double>(ticks);
}

/// Success probability of a Sequence: product of child probabilities.
inline double sequence_success_prob(std::span<const double> child_probs) noexcept
{
    double p = 1.0;
    for (double c : child_probs) p *= c;
    return p;
}

/// Success probability of a Selector: complement of every child failing.
inline double selector_success_prob(std::span<const double> child_probs) noexcept
{
    double all_fail = 1.0;
    for (double c : child_probs) all_fail *= 1.0 - c;
    return 1.0 - all_fail;
}

/// Zero every counter; cost configuration is kept.
inline void clear_counters(NodeStats& stats) noexcept
{
    stats.n_ticks = 0;
    stats.n_success = 0;
    std::fill(stats.n_ticks_by_feature.begin(), stats.n_ticks_by_feature.end(), 0);
    std::fill(stats.n_success_by_feature.begin(), stats.n_success_by_feature.end(), 0);
    stats.accumulated_cost = 0.0;
}

} // namespace btadapt
