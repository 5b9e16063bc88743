// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed
// here; a criterion that the model cannot meet is reported as FAIL, not
// loosened.
//
// Usage: acceptance [--properties <path to property-suite binary>]

#include "btadapt/btadapt.hpp"
#include "oracle.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>

using namespace btadapt;

namespace {

// Pinned tolerances.
constexpr double kOracleRelTol = 0.02;
constexpr std::size_t kOracleSteps = 100000;
constexpr double kNoiseSigmas = 2.0;
constexpr double kS2OverS0 = 0.62, kS2OverS0Tol = 0.10;
constexpr double kGreedyPenalty = 1.25;
constexpr double kModeTickTol = 0.01, kModeCostTol = 0.015;
constexpr double kCostWeightTol = 0.01;
constexpr double kFlightFrac = 0.57, kFlightFracTol = 0.07;
constexpr double kFailOfFlights = 0.10, kFailOfFlightsTol = 0.03;
constexpr double kAdaptiveFlightMin = 0.95, kAdaptiveWalkMax = 0.15;
constexpr double kLongWalkFlightMax = 0.01;
constexpr std::uint64_t kConvergeTicks = 200, kConvergeTicksTight = 10000;
constexpr double kConvergeTol = 0.08, kConvergeTolTight = 0.02;
constexpr std::size_t kConvergeTrials = 1000;

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail)
{
    std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

using Table = std::map<std::string, SummaryMetrics>;

Table run_table(const TerrainScenarioConfig& cfg)
{
    Table t;
    for (const auto& s : run_experiment({cfg, all_table_policies(), "acceptance"})) t[to_string(s.policy)] = s.metrics;
    return t;
}

/// a < b, allowing for sampling noise in both means.
bool less_within_noise(const SummaryMetrics& a, const SummaryMetrics& b)
{
    const double se = std::hypot(a.ticks_stderr(), b.ticks_stderr());
    return a.avg_ticks < b.avg_ticks + kNoiseSigmas * se;
}

std::vector<std::string> top_by_utility(const Table& t, std::size_t n)
{
    std::vector<std::pair<double, std::string>> v;
    for (const auto& [name, m] : t) v.emplace_back(m.avg_utility_per_tick, name);
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n && i < v.size(); ++i) out.push_back(v[i].second);
    return out;
}

void criterion1()
{
    bool pass = true;
    std::string detail;
    const auto physics = walking_physics();
    for (FeatureValue col = 0; col < physics.cols(); ++col) {
        TerrainScenarioConfig cfg;
        cfg.track = Track({{col, kOracleSteps}});
        RandomStream rng(trial_seed(0, col, {PolicyKind::S0}));
        const auto r = run_terrain_trial(cfg, 0, rng);
        const double sim = static_cast<double>(r.total_leaf_ticks) / static_cast<double>(kOracleSteps);
        const double lib = expected_ticks_per_step(physics.column(col));
        const double ref = oracle::expected_ticks_value_iteration(physics.column(col));
        const double rel = std::abs(sim - lib) / lib;
        pass = pass && rel < kOracleRelTol && std::abs(lib - ref) < 1e-9;
        detail += fmt("col%zu sim %.4f oracle %.4f (%.2f%%); ", col, sim, lib, 100 * rel);
    }
    report(1, "oracle equivalence", pass, detail);
}

void criterion2(const Table& t)
{
    const char* chain[] = {"S2", "S5", "S1", "S4", "S3", "S0"};
    bool order = true;
    for (std::size_t i = 0; i + 1 < std::size(chain); ++i) order = order && less_within_noise(t.at(chain[i]), t.at(chain[i + 1]));
    const double ratio = t.at("S2").avg_ticks / t.at("S0").avg_ticks;
    const bool ratio_ok = std::abs(ratio - kS2OverS0) <= kS2OverS0Tol;
    std::string detail;
    for (auto name : chain) detail += fmt("%s %.1f, ", name, t.at(name).avg_ticks);
    detail += fmt("S2/S0 %.3f", ratio);
    report(2, "table 1 orderings", order && ratio_ok, detail);
}

void criterion3(const Table& t)
{
    const double g0 = t.at("S2g00").avg_ticks, s2 = t.at("S2").avg_ticks, g25 = t.at("S2g25").avg_ticks;
    bool lowest = true;
    for (const auto& [name, m] : t) {
        if (name != "S2g25") lowest = lowest && g25 < m.avg_ticks;
    }
    const auto top = top_by_utility(t, 2);
    const bool top_two = std::find(top.begin(), top.end(), "S2g25") != top.end();
    report(3, "greedy behavior", g0 >= kGreedyPenalty * s2 && lowest && top_two,
           fmt("S2g00/S2 %.3f, S2g25 %.1f lowest=%d, utility top two {%s, %s}", g0 / s2, g25, lowest, top[0].c_str(),
               top[1].c_str()));
}

void criterion4(const Table& ratio)
{
    TerrainScenarioConfig cfg;
    cfg.utility_mode = UtilityMode::NegativeCost;
    const auto neg = run_table(cfg);
    double worst_ticks = 0.0, worst_cost = 0.0;
    for (const auto& [name, m] : ratio) {
        worst_ticks = std::max(worst_ticks, std::abs(neg.at(name).avg_ticks - m.avg_ticks) / m.avg_ticks);
        worst_cost = std::max(worst_cost, std::abs(neg.at(name).avg_cost - m.avg_cost) / m.avg_cost);
    }
    const auto top = top_by_utility(neg, 2);
    const bool cost_oriented = std::set<std::string>(top.begin(), top.end()) == std::set<std::string>{"S3", "S4"};
    report(4, "mode insensitivity", worst_ticks <= kModeTickTol && worst_cost <= kModeCostTol && cost_oriented,
           fmt("max tick change %.2f%%, max cost change %.2f%%, negative-cost utility top two {%s, %s}",
               100 * worst_ticks, 100 * worst_cost, top[0].c_str(), top[1].c_str()));
}

void criterion5(const Table& base)
{
    TerrainScenarioConfig cfg;
    cfg.costs = {2.0, 1.0, 4.0};
    const auto t = run_table(cfg);
    bool pass = true;
    std::string detail;
    for (const auto& [name, m] : base) {
        const double change = (t.at(name).avg_ticks - m.avg_ticks) / m.avg_ticks;
        const bool moved = std::abs(change) > kCostWeightTol;
        pass = pass && (name == "S3" ? moved : !moved);
        detail += fmt("%s %+.2f%%, ", name.c_str(), 100 * change);
    }
    report(5, "cost-weight sensitivity", pass, detail);
}

SummaryMetrics fire(SelectorPolicy p, std::size_t limit)
{
    FireScenarioConfig cfg;
    cfg.walk_limit = limit;
    return aggregate_metrics(run_trials(cfg, p));
}

void criterion6()
{
    const auto s0_150 = fire({PolicyKind::S0}, 150);
    const auto s0_120 = fire({PolicyKind::S0}, 120);
    const auto s2_900 = fire({PolicyKind::S2}, 900);
    const double n = static_cast<double>(s0_150.trials);

    const bool a = s0_150.fly_trials == 0 && s0_150.fail_trials == 0;
    const double frac = static_cast<double>(s0_120.fly_trials) / n;
    const double fail_frac = s0_120.fly_trials ? double(s0_120.fail_trials) / double(s0_120.fly_trials) : 0.0;
    const bool b = std::abs(frac - kFlightFrac) <= kFlightFracTol &&
                   std::abs(fail_frac - kFailOfFlights) <= kFailOfFlightsTol;
    bool c = true;
    std::string c_detail;
    for (auto kind : {PolicyKind::S1, PolicyKind::S2, PolicyKind::S4, PolicyKind::S5}) {
        const auto m = fire({kind}, 120);
        const double fly = double(m.fly_trials) / n, walk = double(m.walk_trials) / n;
        c = c && fly > kAdaptiveFlightMin && walk < kAdaptiveWalkMax;
        c_detail += fmt("%s fly %.3f walk %.3f; ", to_string(SelectorPolicy{kind}).c_str(), fly, walk);
    }
    const bool d = double(s2_900.fly_trials) / n <= kLongWalkFlightMax && s2_900.avg_cost < s0_150.avg_cost;

    report(6, "fire table relations", a && b && c && d,
           fmt("S0@150 fly %zu fail %zu [%s]; S0@120 flight fraction %.3f, failures/flights %.3f [%s]; ",
               s0_150.fly_trials, s0_150.fail_trials, a ? "ok" : "x", frac, fail_frac, b ? "ok" : "x") +
               c_detail + (c ? "[ok]; " : "[x]; ") +
               fmt("S2@900 fly %zu cost %.1f vs S0@150 cost %.1f [%s]", s2_900.fly_trials, s2_900.avg_cost,
                   s0_150.avg_cost, d ? "ok" : "x"));
}

void criterion7()
{
    TerrainScenarioConfig cfg;
    cfg.persist_learning = true;
    cfg.policy = {PolicyKind::S0};
    TerrainWalker walker(cfg);
    for (std::size_t i = 0; i < kConvergeTrials; ++i) {
        RandomStream rng(trial_seed(cfg.seed, i, cfg.policy));
        walker.run_trial(rng);
    }
    bool pass = true;
    std::size_t checked = 0, tight = 0;
    double worst = 0.0, worst_tight = 0.0;
    const auto physics = walking_physics();
    for (std::size_t leaf = 0; leaf < physics.rows(); ++leaf) {
        const auto& s = walker.tree().child(leaf).stats();
        for (FeatureValue f = 0; f < physics.cols(); ++f) {
            const auto ticks = s.n_ticks_by_feature[f];
            const double err = std::abs(p_success_given_feature(s, f) - physics.at(leaf, f));
            if (ticks >= kConvergeTicks) {
                ++checked;
                worst = std::max(worst, err);
                pass = pass && err < kConvergeTol;
            }
            if (ticks >= kConvergeTicksTight) {
                ++tight;
                worst_tight = std::max(worst_tight, err);
                pass = pass && err < kConvergeTolTight;
            }
        }
    }
    pass = pass && checked == physics.rows() * physics.cols() && tight == checked;
    report(7, "estimator convergence", pass,
           fmt("%zu pairs >= %llu ticks (max err %.4f), %zu pairs >= %llu ticks (max err %.4f)", checked,
               static_cast<unsigned long long>(kConvergeTicks), worst, tight,
               static_cast<unsigned long long>(kConvergeTicksTight), worst_tight));
}

void criterion8(const char* properties)
{
    if (properties == nullptr) {
        report(8, "invariant suites", false, "property suite binary not given (--properties)");
        return;
    }
    const std::string cmd = std::string("\"") + properties + "\" --gtest_brief=1 > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    report(8, "invariant suites", rc == 0, fmt("%s exit status %d", properties, rc));
}

} // namespace

int main(int argc, char** argv)
{
    const char* properties = nullptr;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--properties") properties = argv[i + 1];
    }

    criterion1();
    const auto table1 = run_table(TerrainScenarioConfig{});
    criterion2(table1);
    criterion3(table1);
    criterion4(table1);
    criterion5(table1);
    criterion6();
    criterion7();
    criterion8(properties);

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
