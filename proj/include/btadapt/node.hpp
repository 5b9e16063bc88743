#pragma once

#include "btadapt/policy.hpp"
#include "btadapt/rng.hpp"
#include "btadapt/stats.hpp"

#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace btadapt {

enum class NodeKind : std::uint8_t { ActionLeaf, Sequence, Selector, RepeatUntilSuccess };

/// Channel index meaning "no sensor": the node always sees feature 0.
inline constexpr std::size_t kNoFeature = std::numeric_limits<std::size_t>::max();

/// One accounted leaf tick, recorded when tracing is enabled.
struct LeafTick {
    std::string leaf;
    FeatureValue feature = 0;
    Status status = Status::Failure;
    double cost = 0.0;

    bool operator==(const LeafTick&) const = default;
};

/// Running totals over accounted leaf ticks.
struct TickTotals {
    std::uint64_t leaf_ticks = 0;
    double cost = 0.0;
    double utility = 0.0;
};

/// Mutable state threaded through one tick of a tree.
struct TickContext {
    RandomStream* rng = nullptr;
    std::vector<FeatureValue> features{0}; ///< current value per feature channel
    UtilityMode utility_mode = UtilityMode::Ratio; ///< mode used for the utility totals
    std::size_t step_index = 0;            ///< position inside a greedy training window
    TickTotals totals;
    std::vector<LeafTick>* trace = nullptr;

    FeatureValue feature(std::size_t channel) const
    {
        if (channel == kNoFeature) return 0;
        if (channel >= features.size()) throw ConfigError("feature channel " + std::to_string(channel) + " not provided");
        return features[channel];
    }

    RandomStream& random() const
    {
        if (rng == nullptr) throw ConfigError("tick context has no random stream");
        return *rng;
    }
};

class BTNode;

/// Resolves a leaf tick. Receives the leaf's feature value and the context.
using ActionModel = std::function<Status(FeatureValue, TickContext&)>;

/// Behavior-tree node with attached statistics.
///
/// Children are held by value, so copying a tree yields a fully independent
/// instance (statistics and execution orders included).
class BTNode {
public:
    static BTNode action(std::string name, double cost, std::size_t feature_domain, ActionModel model)
    {
        BTNode n(NodeKind::ActionLeaf, std::move(name), feature_domain, cost);
        if (!model) throw ConfigError("action leaf '" + n.name_ + "' has no action model");
        n.model_ = std::move(model);
        return n;
    }

    /// Leaf whose outcome is produced by a nested tree or loop. It is not
    /// itself counted as a leaf tick; the leaves it ticks are. Its cost for
    /// ranking purposes is the observed mean cost per tick, `prior_cost` until
    /// it has been ticked.
    static BTNode macro_action(std::string name, double prior_cost, std::size_t feature_domain, ActionModel model)
    {
        BTNode n = action(std::move(name), prior_cost, feature_domain, std::move(model));
        n.stats_.cost_from_subtree = true;
        return n;
    }

    static BTNode sequence(std::string name, std::vector<BTNode> children, std::size_t feature_domain = 1)
    {
        BTNode n(NodeKind::Sequence, std::move(name), feature_domain, 0.0);
        n.children_ = std::move(children);
        n.stats_.cost_from_subtree = true;
        return n;
    }

    static BTNode selector(std::string name, SelectorPolicy policy, std::vector<BTNode> children,
                           std::size_t feature_domain = 1)
    {
        BTNode n(NodeKind::Selector, std::move(name), feature_domain, 0.0);
        if (children.empty()) throw ConfigError("selector '" + n.name_ + "' needs at least one child");
        n.children_ = std::move(children);
        n.policy_ = policy;
        n.order_.resize(n.children_.size());
        std::iota(n.order_.begin(), n.order_.end(), std::size_t{0});
        n.stats_.cost_from_subtree = true;
        return n;
    }

    static BTNode repeat_until_success(std::string name, std::size_t max_tries, BTNode child,
                                       std::size_t feature_domain = 1)
    {
        BTNode n(NodeKind::RepeatUntilSuccess, std::move(name), feature_domain, 0.0);
        if (max_tries == 0) throw ConfigError("repeat-until-success '" + n.name_ + "' needs max_tries >= 1");
        n.max_tries_ = max_tries;
        n.children_.push_back(std::move(child));
        n.stats_.cost_from_subtree = true;
        return n;
    }

    NodeKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    const NodeStats& stats() const noexcept { return stats_; }
    NodeStats& stats() noexcept { return stats_; }
    const std::vector<BTNode>& children() const noexcept { return children_; }
    BTNode& child(std::size_t i) { return children_.at(i); }
    const BTNode& child(std::size_t i) const { return children_.at(i); }
    SelectorPolicy policy() const noexcept { return policy_; }
    std::size_t max_tries() const noexcept { return max_tries_; }
    bool is_macro() const noexcept { return kind_ == NodeKind::ActionLeaf && stats_.cost_from_subtree; }

    /// Current execution order of a Selector (a permutation of child indices).
    const std::vector<std::size_t>& execution_order() const noexcept { return order_; }

    /// Feature channel this node reads; kNoFeature means constant 0.
    std::size_t feature_channel() const noexcept { return channel_; }
    BTNode& with_feature_channel(std::size_t channel) &
    {
        channel_ = channel;
        return *this;
    }
    BTNode&& with_feature_channel(std::size_t channel) &&
    {
        channel_ = channel;
        return std::move(*this);
    }

    /// UtilityMode used by S4/S5 when ranking this Selector's children.
    UtilityMode ranking_mode() const noexcept { return ranking_mode_; }
    void set_ranking_mode(UtilityMode m) noexcept { ranking_mode_ = m; }

    /// Depth-first pre-order search by name.
    const BTNode* find(std::string_view name) const
    {
        if (name_ == name) return this;
        for (const auto& c : children_) {
            if (const BTNode* hit = c.find(name)) return hit;
        }
        return nullptr;
    }
    BTNode* find(std::string_view name) { return const_cast<BTNode*>(std::as_const(*this).find(name)); }

private:
    BTNode(NodeKind kind, std::string name, std::size_t feature_domain, double cost)
        : kind_(kind), name_(std::move(name)), stats_(feature_domain, cost)
    {
    }

    friend Status tick(BTNode& node, TickContext& ctx);
    friend Status tick_as_child(BTNode& node, TickContext& ctx, bool conditioned_parent);
    friend Status adaptive_selector_tick(BTNode& node, TickContext& ctx);
    friend Status greedy_selector_tick(BTNode& node, TickContext& ctx);
    friend void reset_stats(BTNode& node) noexcept;

    NodeKind kind_;
    std::string name_;
    NodeStats stats_;
    std::vector<BTNode> children_;
    ActionModel model_;
    SelectorPolicy policy_{};
    UtilityMode ranking_mode_ = UtilityMode::Ratio;
    std::vector<std::size_t> order_;
    std::size_t max_tries_ = 0;
    std::size_t channel_ = 0;
};

Status tick_as_child(BTNode& node, TickContext& ctx, bool conditioned_parent);

namespace detail {

inline Status tick_leaf(BTNode& node, const ActionModel& model, FeatureValue f, TickContext& ctx,
                        bool conditioned_parent)
{
    if (node.is_macro()) return model(f, ctx);
    const NodeStats& s = node.stats();
    ctx.totals.utility +=
        utility(s, ctx.utility_mode, conditioned_parent ? std::optional<FeatureValue>(f) : std::nullopt);
    ctx.totals.cost += s.cost;
    ++ctx.totals.leaf_ticks;
    const Status st = model(f, ctx);
    if (ctx.trace != nullptr) ctx.trace->push_back({node.name(), f, st, s.cost});
    return st;
}

inline std::vector<std::size_t> rank_selector(const BTNode& node, FeatureValue f)
{
    const auto& kids = node.children();
    return rank_by(
        node.policy(), kids.size(), [&](std::size_t i) -> const NodeStats& { return kids[i].stats(); }, f,
        node.ranking_mode(), node.execution_order());
}

} // namespace detail

/// Non-greedy Selector: re-rank from current statistics, then tick children
/// in that order until one succeeds. Does not record into the node's own
/// statistics; `tick` does that.
inline Status adaptive_selector_tick(BTNode& node, TickContext& ctx)
{
    const FeatureValue f = ctx.feature(node.channel_);
    check_feature(node.stats_, f);
    node.order_ = detail::rank_selector(node, f);
    const bool conditioned = node.policy_.uses_feature();
    for (std::size_t idx : node.order_) {
        if (tick_as_child(node.children_[idx], ctx, conditioned) == Status::Success) return Status::Success;
    }
    return Status::Failure;
}

/// Greedy Selector (S2G). Inside the training window (ctx.step_index below the
/// policy's training_steps) it behaves as S2; afterwards it ticks only the
/// highest-ranked child and returns that child's status.
inline Status greedy_selector_tick(BTNode& node, TickContext& ctx)
{
    if (ctx.step_index < node.policy_.training_steps) return adaptive_selector_tick(node, ctx);
    const FeatureValue f = ctx.feature(node.channel_);
    check_feature(node.stats_, f);
    node.order_ = detail::rank_selector(node, f);
    return tick_as_child(node.children_[node.order_.front()], ctx, true);
}

/// Ticks `node` as a child of a Selector whose policy does (or does not)
/// condition on features. The flag selects which estimate feeds the utility
/// totals for leaves.
inline Status tick_as_child(BTNode& node, TickContext& ctx, bool conditioned_parent)
{
    const FeatureValue f = ctx.feature(node.channel_);
    check_feature(node.stats_, f);
    const double cost_before = ctx.totals.cost;

    Status result = Status::Failure;
    switch (node.kind_) {
    case NodeKind::ActionLeaf: result = detail::tick_leaf(node, node.model_, f, ctx, conditioned_parent); break;
    case NodeKind::Sequence:
        result = Status::Success;
        for (auto& c : node.children_) {
            if (tick_as_child(c, ctx, false) == Status::Failure) {
                result = Status::Failure;
                break;
            }
        }
        break;
    case NodeKind::Selector:
        result = node.policy_.is_greedy() ? greedy_selector_tick(node, ctx) : adaptive_selector_tick(node, ctx);
        break;
    case NodeKind::RepeatUntilSuccess:
        for (std::size_t i = 0; i < node.max_tries_; ++i) {
            if (tick_as_child(node.children_.front(), ctx, conditioned_parent) == Status::Success) {
                result = Status::Success;
                break;
            }
        }
        break;
    }

    node.stats_.accumulated_cost += ctx.totals.cost - cost_before;
    record_outcome(node.stats_, f, result);
    return result;
}

/// Ticks a tree root and records the outcome at every node visited.
inline Status tick(BTNode& node, TickContext& ctx) { return tick_as_child(node, ctx, false); }

/// Convenience form: single feature channel, default accounting.
inline Status tick(BTNode& node, FeatureValue feature, RandomStream& rng)
{
    TickContext ctx;
    ctx.rng = &rng;
    ctx.features = {feature};
    return tick(node, ctx);
}

/// Zeroes every counter in the subtree and restores authored child order.
inline void reset_stats(BTNode& node) noexcept
{
    clear_counters(node.stats_);
    std::iota(node.order_.begin(), node.order_.end(), std::size_t{0});
    for (auto& c : node.children_) reset_stats(c);
}

/// Calls `fn(node)` for every node in pre-order.
template <class Fn>
void for_each_node(const BTNode& node, Fn&& fn)
{
    fn(node);
    for (const auto& c : node.children()) for_each_node(c, fn);
}

} // namespace btadapt
