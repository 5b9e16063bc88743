#pragma once

#include "btadapt/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace btadapt {

enum class PolicyKind : std::uint8_t {
    S0,  ///< authored order
    S1,  ///< descending P(S)
    S2,  ///< descending P(S|F)
    S2G, ///< S2 ranking, greedy after a training window
    S3,  ///< ascending cost
    S4,  ///< descending utility from P(S)
    S5,  ///< descending utility from P(S|F)
};

/// Ordering policy of a Selector node.
struct SelectorPolicy {
    PolicyKind kind = PolicyKind::S0;
    std::size_t training_steps = 0; ///< S2G only: course steps run as plain S2 first

    static constexpr SelectorPolicy greedy(std::size_t training) noexcept { return {PolicyKind::S2G, training}; }

    constexpr bool is_greedy() const noexcept { return kind == PolicyKind::S2G; }

    /// Policies whose ranking metric is conditioned on the feature value.
    constexpr bool uses_feature() const noexcept
    {
        return kind == PolicyKind::S2 || kind == PolicyKind::S2G || kind == PolicyKind::S5;
    }

    constexpr bool operator==(const SelectorPolicy&) const = default;
};

/// Labels: S0..S5 and S2gNN (two-digit minimum width, e.g. S2g00, S2g25).
inline std::string to_string(SelectorPolicy p)
{
    switch (p.kind) {
    case PolicyKind::S0: return "S0";
    case PolicyKind::S1: return "S1";
    case PolicyKind::S2: return "S2";
    case PolicyKind::S3: return "S3";
    case PolicyKind::S4: return "S4";
    case PolicyKind::S5: return "S5";
    case PolicyKind::S2G: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "S2g%02zu", p.training_steps);
        return buf;
    }
    }
    return "?";
}

/// Parses S0..S5 and S2g<N> (case-insensitive).
inline SelectorPolicy parse_policy(std::string_view text)
{
    std::string s(text);
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (s.size() == 2 && s[0] == 'S' && s[1] >= '0' && s[1] <= '5') {
        constexpr PolicyKind by_digit[] = {PolicyKind::S0, PolicyKind::S1, PolicyKind::S2,
                                           PolicyKind::S3, PolicyKind::S4, PolicyKind::S5};
        return {by_digit[s[1] - '0'], 0};
    }
    if (s.size() > 3 && s.compare(0, 3, "S2G") == 0) {
        std::size_t steps = 0;
        for (std::size_t i = 3; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw ConfigError("unknown selector policy '" + std::string(text) + "'");
            steps = steps * 10 + static_cast<std::size_t>(s[i] - '0');
        }
        return SelectorPolicy::greedy(steps);
    }
    throw ConfigError("unknown selector policy '" + std::string(text) + "'");
}

/// The policy rows of the walking-terrain summary table.
inline std::vector<SelectorPolicy> all_table_policies()
{
    return {{PolicyKind::S0}, {PolicyKind::S1}, {PolicyKind::S2},    {PolicyKind::S3},
            {PolicyKind::S4}, {PolicyKind::S5}, SelectorPolicy::greedy(0), SelectorPolicy::greedy(25)};
}

enum class UtilityMode : std::uint8_t { Ratio, NegativeCost };

inline std::string to_string(UtilityMode m) { return m == UtilityMode::Ratio ? "ratio" : "negative_cost"; }

inline UtilityMode parse_utility_mode(std::string_view text)
{
    if (text == "ratio" || text == "Ratio") return UtilityMode::Ratio;
    if (text == "negative_cost" || text == "NegativeCost" || text == "negative-cost") return UtilityMode::NegativeCost;
    throw ConfigError("unknown utility mode '" + std::string(text) + "' (expected ratio or negative_cost)");
}

/// Utility of a node: P/C in Ratio mode, -P*C in NegativeCost mode. P is the
/// feature-conditioned estimate when a feature is supplied.
inline double utility(const NodeStats& stats, UtilityMode mode, std::optional<FeatureValue> feature = std::nullopt)
{
    const double p = feature ? p_success_given_feature(stats, *feature) : p_success(stats);
    const double c = stats.effective_cost();
    if (mode == UtilityMode::Ratio) {
        if (!(c > 0.0)) throw ConfigError("ratio utility requires a positive cost");
        return p / c;
    }
    return -(p * c);
}

/// Ranks `count` children whose statistics are returned by `stats_at(i)`.
///
/// S0 yields the identity. Every other policy stable-sorts `current_order`
/// (identity when empty) by its metric, so equal-metric children keep their
/// current relative order.
template <class StatsAt>
std::vector<std::size_t> rank_by(SelectorPolicy policy, std::size_t count, StatsAt&& stats_at, FeatureValue feature,
                                 UtilityMode mode, std::span<const std::size_t> current_order = {})
{
    if (count == 0) throw ConfigError("cannot rank an empty child list");
    std::vector<std::size_t> order(count);
    if (current_order.empty()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
    } else {
        if (current_order.size() != count) throw ConfigError("current order does not match child count");
        order.assign(current_order.begin(), current_order.end());
    }
    if (policy.kind == PolicyKind::S0) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        return order;
    }

    // Larger key ranks first.
    std::vector<double> key(count);
    for (std::size_t i = 0; i < count; ++i) {
        const NodeStats& s = stats_at(i);
        switch (policy.kind) {
        case PolicyKind::S1: key[i] = p_success(s); break;
        case PolicyKind::S2:
        case PolicyKind::S2G: key[i] = p_success_given_feature(s, feature); break;
        case PolicyKind::S3: key[i] = -s.effective_cost(); break;
        case PolicyKind::S4: key[i] = utility(s, mode); break;
        case PolicyKind::S5: key[i] = utility(s, mode, feature); break;
        case PolicyKind::S0: break;
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    return order;
}

inline std::vector<std::size_t> rank_children(SelectorPolicy policy, std::span<const NodeStats> children,
                                              FeatureValue feature, UtilityMode mode,
                                              std::span<const std::size_t> current_order = {})
{
    return rank_by(
        policy, children.size(), [&](std::size_t i) -> const NodeStats& { return children[i]; }, feature, mode,
        current_order);
}

} // namespace btadapt
