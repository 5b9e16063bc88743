#include "btadapt/harness.hpp"

#include <gtest/gtest.h>

using namespace btadapt;

TEST(Aggregate, MeanTicks)
{
    std::vector<TrialResult> r(2);
    r[0].total_leaf_ticks = 500;
    r[1].total_leaf_ticks = 600;
    EXPECT_DOUBLE_EQ(aggregate_metrics(r).avg_ticks, 550.0);
}

TEST(Aggregate, SingleTrialIdentity)
{
    TrialResult t;
    t.total_leaf_ticks = 7;
    t.total_cost = 12.5;
    t.total_utility = 3.5;
    t.ticks_per_step = {3, 4};
    t.flew = true;
    const auto m = aggregate_metrics(std::vector<TrialResult>{t});
    EXPECT_EQ(m.trials, 1u);
    EXPECT_DOUBLE_EQ(m.avg_ticks, 7.0);
    EXPECT_DOUBLE_EQ(m.avg_cost, 12.5);
    EXPECT_DOUBLE_EQ(m.avg_utility_per_tick, 0.5);
    EXPECT_EQ(m.ticks_per_step_curve, (std::vector<double>{3.0, 4.0}));
    EXPECT_EQ(m.fly_trials, 1u);
    EXPECT_EQ(m.walk_trials, 0u);
}

TEST(Aggregate, RatioOfSumsUtility)
{
    std::vector<TrialResult> r(2);
    r[0].total_leaf_ticks = 100;
    r[0].total_utility = 10;
    r[1].total_leaf_ticks = 100;
    r[1].total_utility = 30;
    EXPECT_DOUBLE_EQ(aggregate_metrics(r).avg_utility_per_tick, 0.2);

    r[1].total_leaf_ticks = 300;
    // Ratio of sums 40/400, not the mean of 0.1 and 0.1.
    r[1].total_utility = 30;
    EXPECT_DOUBLE_EQ(aggregate_metrics(r).avg_utility_per_tick, 0.1);
}

TEST(Aggregate, EmptyThrows) { EXPECT_THROW(aggregate_metrics(std::vector<TrialResult>{}), ConfigError); }

TEST(Experiment, OrderingS2S1S0)
{
    TerrainScenarioConfig cfg;
    const auto out = run_experiment({cfg, {{PolicyKind::S0}, {PolicyKind::S1}, {PolicyKind::S2}}, "t"});
    ASSERT_EQ(out.size(), 3u);
    EXPECT_LT(out[2].metrics.avg_ticks, out[1].metrics.avg_ticks);
    EXPECT_LT(out[1].metrics.avg_ticks, out[0].metrics.avg_ticks);
    EXPECT_EQ(out[0].metrics.ticks_per_step_curve.size(), 216u);
}

TEST(Experiment, DeterministicAndScheduleIndependent)
{
    TerrainScenarioConfig cfg;
    cfg.trials = 40;
    cfg.seed = 9;
    const ExperimentSpec spec{cfg, {{PolicyKind::S2}, {PolicyKind::S4}}, "d"};
    const auto a = run_experiment(spec, 1);
    const auto b = run_experiment(spec, 7);
    const auto c = run_experiment(spec, 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].metrics, b[i].metrics);
        EXPECT_EQ(a[i].metrics, c[i].metrics);
    }
}

TEST(Experiment, AddingPolicyDoesNotPerturbOthers)
{
    TerrainScenarioConfig cfg;
    cfg.trials = 20;
    const auto a = run_experiment({cfg, {{PolicyKind::S1}}, "a"});
    const auto b = run_experiment({cfg, {{PolicyKind::S0}, {PolicyKind::S1}}, "b"});
    EXPECT_EQ(a[0].metrics, b[1].metrics);
}

TEST(Experiment, TrialIndependence)
{
    TerrainScenarioConfig cfg;
    cfg.policy = {PolicyKind::S5};
    const auto all = run_trials(cfg, cfg.policy, 3);
    RandomStream rng(trial_seed(cfg.seed, 5, cfg.policy));
    EXPECT_EQ(run_terrain_trial(cfg, 5, rng), all[5]);
}

TEST(Experiment, EmptyPolicyListThrows)
{
    EXPECT_THROW(run_experiment({TerrainScenarioConfig{}, {}, "x"}), ConfigError);
    EXPECT_THROW(compare_policies({TerrainScenarioConfig{}, {{PolicyKind::S0}}, "x"}), ConfigError);
}

TEST(Compare, RatioRankingAndDuplicates)
{
    TerrainScenarioConfig cfg;
    cfg.trials = 100;
    const auto r = compare_policies({cfg, {{PolicyKind::S0}, {PolicyKind::S2}, {PolicyKind::S5}, {PolicyKind::S2}}, "c"});
    const auto pos = [&](std::size_t idx) {
        return std::find(r.by_utility.begin(), r.by_utility.end(), idx) - r.by_utility.begin();
    };
    EXPECT_LT(pos(1), pos(0));
    EXPECT_LT(pos(2), pos(0));
    EXPECT_EQ(r.summaries[1].metrics, r.summaries[3].metrics);
    EXPECT_EQ(r.by_ticks.size(), 4u);
    EXPECT_EQ(r.by_cost.back(), 0u);
}

TEST(Compare, NegativeCostTicksClose)
{
    TerrainScenarioConfig cfg;
    const ExperimentSpec ratio{cfg, {{PolicyKind::S1}, {PolicyKind::S3}}, "r"};
    cfg.utility_mode = UtilityMode::NegativeCost;
    const ExperimentSpec neg{cfg, ratio.policies, "n"};
    const auto a = run_experiment(ratio);
    const auto b = run_experiment(neg);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].metrics.avg_ticks, b[i].metrics.avg_ticks, 5.0);
}

TEST(Curves, S2SettlesBelowTwoTicksPerStep)
{
    TerrainScenarioConfig cfg;
    const auto m = run_experiment({cfg, {{PolicyKind::S2}}, "c"})[0].metrics;
    for (const auto& seg_start : {0, 36, 72, 108, 144, 180}) {
        double tail = 0.0;
        for (int k = seg_start + 16; k < seg_start + 36; ++k) tail += m.ticks_per_step_curve[static_cast<std::size_t>(k)];
        EXPECT_LT(tail / 20.0, 2.0) << "segment at " << seg_start;
    }
    EXPECT_GT(m.ticks_per_step_curve[36], 2.0);
}

TEST(Curves, S0FlatWithinSegments)
{
    TerrainScenarioConfig cfg;
    cfg.trials = 2000;
    const auto m = run_experiment({cfg, {{PolicyKind::S0}}, "c"})[0].metrics;
    const auto physics = walking_physics();
    for (std::size_t k = 0; k < 216; ++k) {
        const double expected = expected_ticks_per_step(physics.column(cfg.track.terrain_at(k)));
        EXPECT_NEAR(m.ticks_per_step_curve[k], expected, 0.12 * expected) << "step " << k;
    }
}
