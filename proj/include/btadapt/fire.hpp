#pragma once

#include "btadapt/node.hpp"
#include "btadapt/physics.hpp"
#include "btadapt/terrain.hpp"

#include <cmath>
#include <memory>
#include <vector>

namespace btadapt {

struct FireScenarioConfig {
    Track walk_track = build_default_fire_walk_track();
    PhysicsMatrix walk_physics = walking_physics();
    std::size_t walk_limit = 120; ///< step attempts allowed before the walk gives up
    double flight_cost = 350.0;
    double flight_success_prob = 0.9;
    double step_cost = 1.0;
    PhysicsMatrix fire_physics = extinguisher_physics();
    std::vector<double> fire_type_distribution{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    std::vector<double> extinguisher_costs{1.0, 1.0, 1.0};
    std::size_t max_extinguish_tries = 100;
    std::size_t trials = 1000;
    SelectorPolicy policy{};
    UtilityMode utility_mode = UtilityMode::Ratio;
    UtilityMode ranking_mode = UtilityMode::Ratio;
    std::uint64_t seed = 0;
    bool persist_learning = true;
    GreedyWindow greedy_window = GreedyWindow::PerFeature;

    bool operator==(const FireScenarioConfig&) const = default;
};

inline void validate(const FireScenarioConfig& cfg)
{
    validate_physics(cfg.walk_physics);
    validate_physics(cfg.fire_physics);
    cfg.walk_track.validate(cfg.walk_physics.cols());
    for (const auto& seg : cfg.walk_track.segments()) {
        if (selector_success_prob(cfg.walk_physics.column(seg.terrain)) <= 0.0) {
            throw ConfigError("walk terrain " + std::to_string(seg.terrain) + " cannot be crossed");
        }
    }
    if (cfg.fire_type_distribution.size() != cfg.fire_physics.cols()) {
        throw ConfigError("fire_type_distribution has " + std::to_string(cfg.fire_type_distribution.size()) +
                          " entries but fire_physics has " + std::to_string(cfg.fire_physics.cols()) + " fire types");
    }
    double total = 0.0;
    for (double p : cfg.fire_type_distribution) {
        if (!(p >= 0.0)) throw ConfigError("fire_type_distribution entries must be non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("fire_type_distribution must sum to 1");
    if (cfg.extinguisher_costs.size() != cfg.fire_physics.rows()) {
        throw ConfigError("extinguisher_costs has " + std::to_string(cfg.extinguisher_costs.size()) +
                          " entries but fire_physics has " + std::to_string(cfg.fire_physics.rows()) + " extinguishers");
    }
    if (!(cfg.flight_success_prob >= 0.0 && cfg.flight_success_prob <= 1.0)) {
        throw ConfigError("flight_success_prob must lie in [0, 1]");
    }
    const bool ratio = cfg.utility_mode == UtilityMode::Ratio || cfg.ranking_mode == UtilityMode::Ratio;
    auto check_cost = [&](double c, const char* key) {
        if (!(c >= 0.0)) throw ConfigError(std::string(key) + " must be non-negative");
        if (ratio && !(c > 0.0)) throw ConfigError(std::string(key) + " must be positive under ratio utility");
    };
    check_cost(cfg.flight_cost, "flight_cost");
    check_cost(cfg.step_cost, "step_cost");
    for (double c : cfg.extinguisher_costs) check_cost(c, "extinguisher_costs");
    if (cfg.max_extinguish_tries == 0) throw ConfigError("max_extinguish_tries must be at least 1");
    if (cfg.trials == 0) throw ConfigError("trials must be at least 1");
}

/// Fire-rescue mission tree:
///
///     mission (Sequence)
///       transport (Selector, no feature)
///         walk_to_fire   macro leaf running the walking Selector over walk_track
///         fly_to_fire    one flight attempt
///       extinguish (RepeatUntilSuccess)
///         extinguisher (Selector, feature = fire type)
///           E1 .. En
///
/// The walk gives up once `walk_limit` step attempts have been spent. Learning
/// state persists across missions unless `persist_learning` is false.
/// Non-copyable: the walk leaf refers back to its mission.
class FireMission {
public:
    static constexpr std::size_t kTerrainChannel = 0;
    static constexpr std::size_t kFireTypeChannel = 1;

    explicit FireMission(FireScenarioConfig cfg)
        : cfg_(validated(std::move(cfg))),
          walk_physics_(std::make_shared<const PhysicsMatrix>(cfg_.walk_physics)),
          fire_physics_(std::make_shared<const PhysicsMatrix>(cfg_.fire_physics)),
          walking_(build_walking_selector(walk_physics_, std::vector<double>(walk_physics_->rows(), cfg_.step_cost),
                                          cfg_.policy, cfg_.ranking_mode, kTerrainChannel)),
          root_(build_root()),
          terrain_(cfg_.walk_track.expand()),
          steps_(cfg_.greedy_window, walk_physics_->cols())
    {
    }

    FireMission(const FireMission&) = delete;
    FireMission& operator=(const FireMission&) = delete;

    TrialResult run_trial(RandomStream& rng, std::vector<LeafTick>* trace = nullptr)
    {
        if (!cfg_.persist_learning) {
            reset_stats(root_);
            reset_stats(walking_);
            missions_run_ = 0;
        }
        steps_.reset();

        const BTNode& walk = *root_.find("walk_to_fire");
        const BTNode& fly = *root_.find("fly_to_fire");
        const auto walk_before = walk.stats().n_ticks;
        const auto fly_before = fly.stats().n_ticks;

        TickContext ctx;
        ctx.rng = &rng;
        ctx.utility_mode = cfg_.utility_mode;
        ctx.trace = trace;
        ctx.features = {0, rng.categorical(cfg_.fire_type_distribution)};
        // Transport and extinguisher windows count missions; the walk counts steps.
        ctx.step_index = missions_run_;

        const Status result = tick(root_, ctx);
        ++missions_run_;

        TrialResult out;
        out.total_leaf_ticks = ctx.totals.leaf_ticks;
        out.total_cost = ctx.totals.cost;
        out.total_utility = ctx.totals.utility;
        out.walked = walk.stats().n_ticks > walk_before;
        out.flew = fly.stats().n_ticks > fly_before;
        out.mission_failed = result == Status::Failure;
        return out;
    }

    const BTNode& root() const noexcept { return root_; }
    const BTNode& walking() const noexcept { return walking_; }
    const FireScenarioConfig& config() const noexcept { return cfg_; }

private:
    static FireScenarioConfig validated(FireScenarioConfig cfg)
    {
        validate(cfg);
        return cfg;
    }

    BTNode build_root()
    {
        std::vector<BTNode> transport;
        transport.push_back(
            BTNode::macro_action("walk_to_fire", cfg_.step_cost * static_cast<double>(cfg_.walk_track.total_steps()), 1,
                                 [this](FeatureValue, TickContext& ctx) { return walk_to_fire(ctx); })
                .with_feature_channel(kNoFeature));
        transport.push_back(BTNode::action("fly_to_fire", cfg_.flight_cost, 1,
                                           [p = cfg_.flight_success_prob](FeatureValue, TickContext& ctx) {
                                               return ctx.random().bernoulli(p) ? Status::Success : Status::Failure;
                                           })
                                .with_feature_channel(kNoFeature));
        BTNode transport_sel =
            BTNode::selector("transport", cfg_.policy, std::move(transport), 1).with_feature_channel(kNoFeature);
        transport_sel.set_ranking_mode(cfg_.ranking_mode);

        std::vector<BTNode> extinguishers;
        const auto physics = fire_physics_;
        for (std::size_t i = 0; i < physics->rows(); ++i) {
            extinguishers.push_back(BTNode::action("E" + std::to_string(i + 1), cfg_.extinguisher_costs[i],
                                                   physics->cols(),
                                                   [physics, i](FeatureValue fire, TickContext& ctx) {
                                                       return step_attempt(*physics, i, fire, ctx.random());
                                                   })
                                        .with_feature_channel(kFireTypeChannel));
        }
        BTNode ext_sel = BTNode::selector("extinguisher", cfg_.policy, std::move(extinguishers), physics->cols())
                             .with_feature_channel(kFireTypeChannel);
        ext_sel.set_ranking_mode(cfg_.ranking_mode);
        BTNode extinguish =
            BTNode::repeat_until_success("extinguish", cfg_.max_extinguish_tries, std::move(ext_sel), physics->cols())
                .with_feature_channel(kFireTypeChannel);

        std::vector<BTNode> phases;
        phases.push_back(std::move(transport_sel));
        phases.push_back(std::move(extinguish));
        return BTNode::sequence("mission", std::move(phases)).with_feature_channel(kNoFeature);
    }

    Status walk_to_fire(TickContext& ctx)
    {
        struct RestoreIndex {
            TickContext& ctx;
            std::size_t saved;
            ~RestoreIndex() { ctx.step_index = saved; }
        } restore{ctx, ctx.step_index};

        std::size_t attempts = 0;
        std::size_t done = 0;
        while (done < terrain_.size()) {
            if (attempts == cfg_.walk_limit) return Status::Failure;
            ++attempts;
            const FeatureValue terrain = terrain_[done];
            ctx.features[kTerrainChannel] = terrain;
            ctx.step_index = steps_.window_position(terrain);
            if (tick(walking_, ctx) == Status::Success) {
                steps_.complete(terrain);
                ++done;
            }
        }
        return Status::Success;
    }

    FireScenarioConfig cfg_;
    std::shared_ptr<const PhysicsMatrix> walk_physics_;
    std::shared_ptr<const PhysicsMatrix> fire_physics_;
    BTNode walking_;
    BTNode root_;
    std::vector<FeatureValue> terrain_;
    StepCounter steps_;
    std::size_t missions_run_ = 0;
};

/// One mission from untrained state.
inline TrialResult run_fire_trial(const FireScenarioConfig& cfg, std::size_t /*trial_index*/, RandomStream& rng,
                                  std::vector<LeafTick>* trace = nullptr)
{
    FireMission mission(cfg);
    return mission.run_trial(rng, trace);
}

} // namespace btadapt
