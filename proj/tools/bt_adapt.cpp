#include "btadapt/btadapt.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace btadapt;

enum Exit : int { kOk = 0, kConfigError = 2, kIoError = 3 };

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::vector<std::string> policies;
    std::optional<std::string> utility_mode;
    std::optional<std::string> out_dir;
};

void add_override_flags(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--seed", o.seed, "Base seed (overrides BT_ADAPT_SEED and the config)");
    cmd->add_option("--trials", o.trials, "Trials per policy")->check(CLI::PositiveNumber);
    cmd->add_option("--policy", o.policies, "Policy to run (repeatable), e.g. S2 or S2g25");
    cmd->add_option("--utility-mode", o.utility_mode, "ratio or negative_cost");
    cmd->add_option("--out-dir", o.out_dir, "Output directory");
}

/// Flag > environment > config.
void apply(RunConfig& cfg, const Overrides& o)
{
    if (o.seed) cfg.set_seed(*o.seed);
    else apply_seed_env(cfg);
    if (o.trials) cfg.set_trials(*o.trials);
    if (!o.policies.empty()) {
        cfg.policies.clear();
        for (const auto& p : o.policies) cfg.policies.push_back(parse_policy(p));
    }
    if (o.utility_mode) cfg.set_utility_mode(parse_utility_mode(*o.utility_mode));
    if (o.out_dir) cfg.output.dir = *o.out_dir;
    // Re-validate against the overridden values.
    parse_config(dump_config(cfg));
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_table(const std::vector<PolicySummary>& rows)
{
    std::printf("%-8s %10s %10s %12s %6s %6s %6s\n", "policy", "avg_ticks", "avg_cost", "util/tick", "walk", "fly",
                "fail");
    for (const auto& s : rows) {
        const auto& m = s.metrics;
        std::printf("%-8s %10.1f %10.1f %12.4f %6zu %6zu %6zu\n", to_string(s.policy).c_str(), m.avg_ticks, m.avg_cost,
                    m.avg_utility_per_tick, m.walk_trials, m.fly_trials, m.fail_trials);
    }
}

std::vector<FeatureValue> terrain_of(const RunConfig& cfg)
{
    return cfg.scenario == ScenarioKind::Terrain ? cfg.terrain.track.expand() : std::vector<FeatureValue>{};
}

int run_config(RunConfig cfg, const std::string& label)
{
    const auto summaries = run_experiment(cfg.experiment(label));
    print_table(summaries);

    Report report;
    report.label = label;
    report.summaries = summaries;
    report.terrain = terrain_of(cfg);
    report.scenario = cfg.scenario == ScenarioKind::Fire ? "fire" : "terrain";
    report.seed = cfg.scenario == ScenarioKind::Fire ? cfg.fire.seed : cfg.terrain.seed;
    report.utility_mode = cfg.scenario == ScenarioKind::Fire ? cfg.fire.utility_mode : cfg.terrain.utility_mode;

    if (cfg.output.csv) {
        emit_csv(report, cfg.output.dir);
        emit_meta(report, cfg.output.dir);
    }
    if (cfg.output.svg && cfg.scenario == ScenarioKind::Terrain) emit_plot(report, cfg.output.dir);
    if (cfg.output.csv || cfg.output.svg) std::printf("wrote %s\n", cfg.output.dir.c_str());
    return kOk;
}

int run_table2(const Overrides& o)
{
    struct Row {
        const char* policy;
        std::size_t limit;
    };
    const Row rows[] = {{"S0", 150}, {"S0", 120}, {"S1", 120}, {"S2", 120}, {"S2", 150},
                        {"S2", 900}, {"S3", 120}, {"S4", 120}, {"S5", 120}};

    RunConfig base;
    base.scenario = ScenarioKind::Fire;
    base.output.dir = "out/table2";
    apply(base, o);

    std::string csv = "row,policy,walk_limit,avg_ticks,avg_cost,walk_trials,fly_trials,fail_trials\n";
    std::printf("%-8s %10s %10s %6s %6s %6s\n", "row", "avg_ticks", "avg_cost", "walk", "fly", "fail");
    for (const auto& r : rows) {
        const auto policy = parse_policy(r.policy);
        if (!o.policies.empty() &&
            std::find(base.policies.begin(), base.policies.end(), policy) == base.policies.end()) {
            continue;
        }
        FireScenarioConfig cfg = base.fire;
        cfg.walk_limit = r.limit;
        const auto m = aggregate_metrics(run_trials(cfg, policy));
        const std::string label = std::string(r.policy) + "@" + std::to_string(r.limit);
        std::printf("%-8s %10.1f %10.1f %6zu %6zu %6zu\n", label.c_str(), m.avg_ticks, m.avg_cost, m.walk_trials,
                    m.fly_trials, m.fail_trials);
        csv += label + "," + r.policy + "," + std::to_string(r.limit) + "," + format_number(m.avg_ticks) + "," +
               format_number(m.avg_cost) + "," + std::to_string(m.walk_trials) + "," + std::to_string(m.fly_trials) +
               "," + std::to_string(m.fail_trials) + "\n";
    }
    if (base.output.csv) {
        detail::ensure_dir(base.output.dir);
        detail::write_file(std::filesystem::path(base.output.dir) / "table2.csv", csv);
        std::printf("wrote %s\n", base.output.dir.c_str());
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Adaptive behavior-tree selector simulator"};
    app.require_subcommand(1);

    Overrides run_o, t1_o, t2_o;
    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Config file (JSON)")->required();
    add_override_flags(run, run_o);

    auto* t1 = app.add_subcommand("paper-table1", "Walking-terrain comparison of all selector policies");
    add_override_flags(t1, t1_o);

    auto* t2 = app.add_subcommand("paper-table2", "Fire-rescue comparison over walk limits");
    add_override_flags(t2, t2_o);

    std::vector<double> probs;
    auto* oracle = app.add_subcommand("oracle", "Expected ticks per step for a fixed child order");
    oracle->add_option("probs", probs, "Child success probabilities, in tick order")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            RunConfig cfg = parse_config(read_file(config_path));
            apply(cfg, run_o);
            return run_config(std::move(cfg), std::filesystem::path(config_path).stem().string());
        }
        if (*t1) {
            RunConfig cfg;
            cfg.output.dir = "out/table1";
            apply(cfg, t1_o);
            return run_config(std::move(cfg), "table1");
        }
        if (*t2) return run_table2(t2_o);
        if (*oracle) {
            std::printf("%.6f\n", expected_ticks_per_step(probs));
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIoError;
    }
    return kOk;
}
