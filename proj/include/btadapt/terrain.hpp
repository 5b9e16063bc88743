#pragma once

#include "btadapt/node.hpp"
#include "btadapt/physics.hpp"
#include "btadapt/policy.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace btadapt {

/// How a greedy selector's training window is counted.
enum class GreedyWindow : std::uint8_t {
    PerFeature, ///< steps completed under the current feature value
    PerTrial,   ///< steps completed in the trial, regardless of feature
};

inline std::string to_string(GreedyWindow w) { return w == GreedyWindow::PerFeature ? "per_feature" : "per_trial"; }

inline GreedyWindow parse_greedy_window(std::string_view text)
{
    if (text == "per_feature") return GreedyWindow::PerFeature;
    if (text == "per_trial") return GreedyWindow::PerTrial;
    throw ConfigError("unknown greedy window '" + std::string(text) + "' (expected per_feature or per_trial)");
}

/// Outcome of one traversal or one fire mission.
struct TrialResult {
    std::uint64_t total_leaf_ticks = 0;
    double total_cost = 0.0;
    double total_utility = 0.0;
    std::vector<std::uint64_t> ticks_per_step; ///< terrain runs only
    bool walked = false;                       ///< fire runs: walk leaf ticked
    bool flew = false;                         ///< fire runs: flight leaf ticked
    bool mission_failed = false;               ///< fire runs: root returned FAILURE

    bool operator==(const TrialResult&) const = default;
};

struct TerrainScenarioConfig {
    PhysicsMatrix physics = walking_physics();
    std::vector<double> costs{4.0, 2.0, 1.0};
    Track track = build_default_track();
    std::size_t trials = 250;
    SelectorPolicy policy{};
    UtilityMode utility_mode = UtilityMode::Ratio;  ///< utility totals
    UtilityMode ranking_mode = UtilityMode::Ratio;  ///< S4/S5 ranking metric
    std::uint64_t seed = 0;
    bool persist_learning = false;
    GreedyWindow greedy_window = GreedyWindow::PerFeature;
    std::uint64_t max_attempts_per_step = 1'000'000;

    bool operator==(const TerrainScenarioConfig&) const = default;
};

inline void validate(const TerrainScenarioConfig& cfg)
{
    validate_physics(cfg.physics);
    if (cfg.costs.size() != cfg.physics.rows()) {
        throw ConfigError("costs has " + std::to_string(cfg.costs.size()) + " entries but physics has " +
                          std::to_string(cfg.physics.rows()) + " behaviors");
    }
    for (double c : cfg.costs) {
        if (!(c >= 0.0)) throw ConfigError("costs must be non-negative");
        if (cfg.utility_mode == UtilityMode::Ratio && !(c > 0.0)) throw ConfigError("ratio utility needs positive costs");
        if (cfg.ranking_mode == UtilityMode::Ratio && !(c > 0.0) &&
            (cfg.policy.kind == PolicyKind::S4 || cfg.policy.kind == PolicyKind::S5)) {
            throw ConfigError("ratio utility ranking needs positive costs");
        }
    }
    cfg.track.validate(cfg.physics.cols());
    for (const auto& seg : cfg.track.segments()) {
        const auto col = cfg.physics.column(seg.terrain);
        if (selector_success_prob(col) <= 0.0) {
            throw ConfigError("terrain " + std::to_string(seg.terrain) + " cannot be crossed: every behavior has probability 0");
        }
    }
    if (cfg.trials == 0) throw ConfigError("trials must be at least 1");
    if (cfg.max_attempts_per_step == 0) throw ConfigError("max_attempts_per_step must be at least 1");
}

/// Walking Selector over one stepping leaf per physics row ("W1", "W2", ...),
/// reading terrain from feature channel `channel`.
inline BTNode build_walking_selector(std::shared_ptr<const PhysicsMatrix> physics, const std::vector<double>& costs,
                                     SelectorPolicy policy, UtilityMode ranking_mode, std::size_t channel = 0)
{
    std::vector<BTNode> leaves;
    for (std::size_t i = 0; i < physics->rows(); ++i) {
        leaves.push_back(BTNode::action("W" + std::to_string(i + 1), costs.at(i), physics->cols(),
                                        [physics, i](FeatureValue terrain, TickContext& ctx) {
                                            return step_attempt(*physics, i, terrain, ctx.random());
                                        })
                             .with_feature_channel(channel));
    }
    BTNode sel = BTNode::selector("walk", policy, std::move(leaves), physics->cols()).with_feature_channel(channel);
    sel.set_ranking_mode(ranking_mode);
    return sel;
}

/// Per-trial counters for greedy training windows.
class StepCounter {
public:
    StepCounter(GreedyWindow window, std::size_t feature_domain) : window_(window), by_feature_(feature_domain, 0) {}

    std::size_t window_position(FeatureValue f) const { return window_ == GreedyWindow::PerFeature ? by_feature_.at(f) : total_; }

    void complete(FeatureValue f)
    {
        ++total_;
        ++by_feature_.at(f);
    }

    void reset() noexcept
    {
        total_ = 0;
        std::fill(by_feature_.begin(), by_feature_.end(), 0);
    }

private:
    GreedyWindow window_;
    std::size_t total_ = 0;
    std::vector<std::size_t> by_feature_;
};

/// Robot walking a track under one walking Selector.
///
/// The tree persists between trials; it is reset at the start of each trial
/// unless `persist_learning` is set. Not thread-safe: one walker per thread.
class TerrainWalker {
public:
    explicit TerrainWalker(TerrainScenarioConfig cfg)
        : cfg_(validated(std::move(cfg))),
          physics_(std::make_shared<const PhysicsMatrix>(cfg_.physics)),
          tree_(build_walking_selector(physics_, cfg_.costs, cfg_.policy, cfg_.ranking_mode)),
          terrain_(cfg_.track.expand())
    {
    }

    TrialResult run_trial(RandomStream& rng, std::vector<LeafTick>* trace = nullptr)
    {
        if (!cfg_.persist_learning) reset_stats(tree_);
        StepCounter steps(cfg_.greedy_window, physics_->cols());

        TickContext ctx;
        ctx.rng = &rng;
        ctx.utility_mode = cfg_.utility_mode;
        ctx.trace = trace;

        TrialResult out;
        out.ticks_per_step.reserve(terrain_.size());
        for (FeatureValue terrain : terrain_) {
            ctx.features[0] = terrain;
            const auto before = ctx.totals.leaf_ticks;
            std::uint64_t attempts = 0;
            for (;;) {
                ctx.step_index = steps.window_position(terrain);
                if (tick(tree_, ctx) == Status::Success) break;
                if (++attempts >= cfg_.max_attempts_per_step) {
                    throw ConfigError("step did not complete within " + std::to_string(cfg_.max_attempts_per_step) +
                                      " selector ticks");
                }
            }
            steps.complete(terrain);
            out.ticks_per_step.push_back(ctx.totals.leaf_ticks - before);
        }
        out.total_leaf_ticks = ctx.totals.leaf_ticks;
        out.total_cost = ctx.totals.cost;
        out.total_utility = ctx.totals.utility;
        return out;
    }

    const BTNode& tree() const noexcept { return tree_; }
    const TerrainScenarioConfig& config() const noexcept { return cfg_; }

private:
    static TerrainScenarioConfig validated(TerrainScenarioConfig cfg)
    {
        validate(cfg);
        return cfg;
    }

    TerrainScenarioConfig cfg_;
    std::shared_ptr<const PhysicsMatrix> physics_;
    BTNode tree_;
    std::vector<FeatureValue> terrain_;
};

/// One traversal from untrained state.
inline TrialResult run_terrain_trial(const TerrainScenarioConfig& cfg, std::size_t /*trial_index*/, RandomStream& rng,
                                     std::vector<LeafTick>* trace = nullptr)
{
    TerrainWalker walker(cfg);
    return walker.run_trial(rng, trace);
}

} // namespace btadapt
