#pragma once

// Run configuration documents.
//
// A configuration is a JSON object (comments allowed). Every key is optional;
// omitted keys take the defaults shown below, and unknown keys are rejected.
//
//   {
//     "scenario": "terrain",            // or "fire"
//     "policies": ["S0", "S1", "S2", "S3", "S4", "S5", "S2g00", "S2g25"],
//     "trials": 250,                    // fire default: 1000
//     "seed": 0,
//     "utility_mode": "ratio",          // or "negative_cost"; utility totals
//     "ranking_utility_mode": "ratio",  // metric S4/S5 rank by
//     "persist_learning": false,        // fire default: true
//     "greedy_window": "per_feature",   // or "per_trial"
//     "output": {"dir": "out", "csv": true, "svg": true},
//     "terrain": {
//       "physics": [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]],
//       "costs": [4, 2, 1],
//       "track": [{"terrain": 0, "length": 36}, ...],
//       "max_attempts_per_step": 1000000
//     },
//     "fire": {
//       "walk_limit": 120, "flight_cost": 350, "flight_success_prob": 0.9,
//       "step_cost": 1, "walk_physics": [[...]], "walk_track": [...],
//       "fire_physics": [[...]], "fire_type_distribution": [...],
//       "extinguisher_costs": [1, 1, 1], "max_extinguish_tries": 100
//     }
//   }
//
// trials, seed, the two utility modes, persist_learning and greedy_window
// apply to the selected scenario only.

#include "btadapt/harness.hpp"

#include <json.hpp>

#include <cstdlib>
#include <set>
#include <string>
#include <string_view>

namespace btadapt {

enum class ScenarioKind : std::uint8_t { Terrain, Fire };

struct OutputOptions {
    std::string dir = "out";
    bool csv = true;
    bool svg = true;

    bool operator==(const OutputOptions&) const = default;
};

struct RunConfig {
    ScenarioKind scenario = ScenarioKind::Terrain;
    TerrainScenarioConfig terrain{};
    FireScenarioConfig fire{};
    std::vector<SelectorPolicy> policies = all_table_policies();
    OutputOptions output{};

    ScenarioConfig active() const
    {
        if (scenario == ScenarioKind::Fire) return fire;
        return terrain;
    }

    ExperimentSpec experiment(std::string label) const { return {active(), policies, std::move(label)}; }

    void set_trials(std::size_t n)
    {
        if (scenario == ScenarioKind::Fire) fire.trials = n;
        else terrain.trials = n;
    }

    void set_seed(std::uint64_t s)
    {
        if (scenario == ScenarioKind::Fire) fire.seed = s;
        else terrain.seed = s;
    }

    void set_utility_mode(UtilityMode m)
    {
        if (scenario == ScenarioKind::Fire) fire.utility_mode = m;
        else terrain.utility_mode = m;
    }

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

using nlohmann::json;

inline std::string join_path(std::string_view prefix, std::string_view key)
{
    return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
}

[[noreturn]] inline void semantic_error(const std::string& path, const std::string& what)
{
    throw ConfigError("config error at '" + path + "': " + what);
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> known)
{
    if (!obj.is_object()) semantic_error(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) semantic_error(join_path(path, key), "unknown key");
    }
}

inline double get_number(const json& v, const std::string& path)
{
    if (!v.is_number()) semantic_error(path, "expected a number");
    return v.get<double>();
}

inline std::uint64_t get_count(const json& v, const std::string& path)
{
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        semantic_error(path, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline bool get_bool(const json& v, const std::string& path)
{
    if (!v.is_boolean()) semantic_error(path, "expected true or false");
    return v.get<bool>();
}

inline std::string get_string(const json& v, const std::string& path)
{
    if (!v.is_string()) semantic_error(path, "expected a string");
    return v.get<std::string>();
}

inline std::vector<double> get_numbers(const json& v, const std::string& path)
{
    if (!v.is_array()) semantic_error(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline PhysicsMatrix get_physics(const json& v, const std::string& path)
{
    if (!v.is_array()) semantic_error(path, "expected an array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < v.size(); ++i) rows.push_back(get_numbers(v[i], path + "[" + std::to_string(i) + "]"));
    try {
        auto m = PhysicsMatrix::from_rows(rows);
        validate_physics(m);
        return m;
    } catch (const ConfigError& e) {
        semantic_error(path, e.what());
    }
}

inline Track get_track(const json& v, const std::string& path)
{
    if (!v.is_array()) semantic_error(path, "expected an array of {terrain, length} segments");
    std::vector<TrackSegment> segs;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        reject_unknown(v[i], p, {"terrain", "length"});
        if (!v[i].contains("terrain") || !v[i].contains("length")) semantic_error(p, "segment needs terrain and length");
        segs.push_back({get_count(v[i]["terrain"], p + ".terrain"), get_count(v[i]["length"], p + ".length")});
    }
    return Track(std::move(segs));
}

inline json physics_json(const PhysicsMatrix& m) { return m.to_rows(); }

inline json track_json(const Track& t)
{
    json out = json::array();
    for (const auto& s : t.segments()) out.push_back({{"terrain", s.terrain}, {"length", s.length}});
    return out;
}

struct SharedKeys {
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<UtilityMode> utility_mode;
    std::optional<UtilityMode> ranking_mode;
    std::optional<bool> persist;
    std::optional<GreedyWindow> window;
};

template <class Cfg>
void apply_shared(Cfg& cfg, const SharedKeys& k)
{
    if (k.trials) cfg.trials = *k.trials;
    if (k.seed) cfg.seed = *k.seed;
    if (k.utility_mode) cfg.utility_mode = *k.utility_mode;
    if (k.ranking_mode) cfg.ranking_mode = *k.ranking_mode;
    if (k.persist) cfg.persist_learning = *k.persist;
    if (k.window) cfg.greedy_window = *k.window;
}

inline void parse_terrain(const json& t, TerrainScenarioConfig& cfg)
{
    reject_unknown(t, "terrain", {"physics", "costs", "track", "max_attempts_per_step"});
    if (t.contains("physics")) cfg.physics = get_physics(t["physics"], "terrain.physics");
    if (t.contains("costs")) cfg.costs = get_numbers(t["costs"], "terrain.costs");
    if (t.contains("track")) cfg.track = get_track(t["track"], "terrain.track");
    if (t.contains("max_attempts_per_step")) {
        cfg.max_attempts_per_step = get_count(t["max_attempts_per_step"], "terrain.max_attempts_per_step");
    }
    if (cfg.costs.size() != cfg.physics.rows()) {
        semantic_error("terrain.costs", "has " + std::to_string(cfg.costs.size()) + " entries but terrain.physics has " +
                                            std::to_string(cfg.physics.rows()) + " behaviors");
    }
    try {
        cfg.track.validate(cfg.physics.cols());
    } catch (const ConfigError& e) {
        semantic_error("terrain.track", e.what());
    }
}

inline void parse_fire(const json& f, FireScenarioConfig& cfg)
{
    reject_unknown(f, "fire",
                   {"walk_limit", "flight_cost", "flight_success_prob", "step_cost", "walk_physics", "walk_track",
                    "fire_physics", "fire_type_distribution", "extinguisher_costs", "max_extinguish_tries"});
    if (f.contains("walk_limit")) cfg.walk_limit = get_count(f["walk_limit"], "fire.walk_limit");
    if (f.contains("flight_cost")) cfg.flight_cost = get_number(f["flight_cost"], "fire.flight_cost");
    if (f.contains("flight_success_prob")) {
        cfg.flight_success_prob = get_number(f["flight_success_prob"], "fire.flight_success_prob");
    }
    if (f.contains("step_cost")) cfg.step_cost = get_number(f["step_cost"], "fire.step_cost");
    if (f.contains("walk_physics")) cfg.walk_physics = get_physics(f["walk_physics"], "fire.walk_physics");
    if (f.contains("walk_track")) cfg.walk_track = get_track(f["walk_track"], "fire.walk_track");
    if (f.contains("fire_physics")) cfg.fire_physics = get_physics(f["fire_physics"], "fire.fire_physics");
    if (f.contains("fire_type_distribution")) {
        cfg.fire_type_distribution = get_numbers(f["fire_type_distribution"], "fire.fire_type_distribution");
    }
    if (f.contains("extinguisher_costs")) {
        cfg.extinguisher_costs = get_numbers(f["extinguisher_costs"], "fire.extinguisher_costs");
    }
    if (f.contains("max_extinguish_tries")) {
        cfg.max_extinguish_tries = get_count(f["max_extinguish_tries"], "fire.max_extinguish_tries");
    }
}

inline std::string locate(std::string_view text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace detail

/// Parses and fully validates a configuration document. An empty (or
/// whitespace-only) document yields the default walking-terrain setup.
inline RunConfig parse_config(std::string_view text)
{
    using detail::json;
    json doc;
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        doc = json::object();
    } else {
        try {
            doc = json::parse(text.begin(), text.end(), nullptr, true, true);
        } catch (const json::parse_error& e) {
            throw ConfigError("syntax error at " + detail::locate(text, e.byte) + ": " + e.what());
        }
    }
    detail::reject_unknown(doc, "",
                           {"scenario", "policies", "trials", "seed", "utility_mode", "ranking_utility_mode",
                            "persist_learning", "greedy_window", "output", "terrain", "fire"});

    RunConfig cfg;
    if (doc.contains("scenario")) {
        const auto s = detail::get_string(doc["scenario"], "scenario");
        if (s == "terrain") cfg.scenario = ScenarioKind::Terrain;
        else if (s == "fire") cfg.scenario = ScenarioKind::Fire;
        else detail::semantic_error("scenario", "expected \"terrain\" or \"fire\", got \"" + s + "\"");
    }
    if (doc.contains("policies")) {
        const auto& p = doc["policies"];
        if (!p.is_array() || p.empty()) detail::semantic_error("policies", "expected a non-empty array of policy names");
        cfg.policies.clear();
        for (std::size_t i = 0; i < p.size(); ++i) {
            const std::string path = "policies[" + std::to_string(i) + "]";
            try {
                cfg.policies.push_back(parse_policy(detail::get_string(p[i], path)));
            } catch (const ConfigError& e) {
                if (std::string_view(e.what()).rfind("config error", 0) == 0) throw;
                detail::semantic_error(path, e.what());
            }
        }
    }

    detail::SharedKeys shared;
    try {
        if (doc.contains("trials")) shared.trials = detail::get_count(doc["trials"], "trials");
        if (doc.contains("seed")) shared.seed = detail::get_count(doc["seed"], "seed");
        if (doc.contains("utility_mode")) {
            shared.utility_mode = parse_utility_mode(detail::get_string(doc["utility_mode"], "utility_mode"));
        }
        if (doc.contains("ranking_utility_mode")) {
            shared.ranking_mode =
                parse_utility_mode(detail::get_string(doc["ranking_utility_mode"], "ranking_utility_mode"));
        }
        if (doc.contains("persist_learning")) shared.persist = detail::get_bool(doc["persist_learning"], "persist_learning");
        if (doc.contains("greedy_window")) {
            shared.window = parse_greedy_window(detail::get_string(doc["greedy_window"], "greedy_window"));
        }
    } catch (const ConfigError& e) {
        if (std::string_view(e.what()).rfind("config error", 0) == 0) throw;
        throw ConfigError(std::string("config error: ") + e.what());
    }
    if (shared.trials && *shared.trials == 0) detail::semantic_error("trials", "must be at least 1");

    if (doc.contains("output")) {
        const auto& o = doc["output"];
        detail::reject_unknown(o, "output", {"dir", "csv", "svg"});
        if (o.contains("dir")) cfg.output.dir = detail::get_string(o["dir"], "output.dir");
        if (o.contains("csv")) cfg.output.csv = detail::get_bool(o["csv"], "output.csv");
        if (o.contains("svg")) cfg.output.svg = detail::get_bool(o["svg"], "output.svg");
    }
    if (doc.contains("terrain")) detail::parse_terrain(doc["terrain"], cfg.terrain);
    if (doc.contains("fire")) detail::parse_fire(doc["fire"], cfg.fire);

    if (cfg.scenario == ScenarioKind::Fire) detail::apply_shared(cfg.fire, shared);
    else detail::apply_shared(cfg.terrain, shared);

    // Cross-field checks, once per policy (some constraints are policy-specific).
    const char* section = cfg.scenario == ScenarioKind::Fire ? "fire" : "terrain";
    for (const auto& p : cfg.policies) {
        try {
            std::visit(
                [&](auto c) {
                    c.policy = p;
                    validate(c);
                },
                cfg.active());
        } catch (const ConfigError& e) {
            detail::semantic_error(section, e.what());
        }
    }
    return cfg;
}

/// Serializes every field of the configuration, so parse_config(dump_config(c))
/// reproduces `c` (inactive-scenario shared keys are not written).
inline std::string dump_config(const RunConfig& cfg)
{
    using detail::json;
    json doc;
    doc["scenario"] = cfg.scenario == ScenarioKind::Fire ? "fire" : "terrain";
    json pol = json::array();
    for (const auto& p : cfg.policies) pol.push_back(to_string(p));
    doc["policies"] = pol;

    auto shared = [&](const auto& c) {
        doc["trials"] = c.trials;
        doc["seed"] = c.seed;
        doc["utility_mode"] = to_string(c.utility_mode);
        doc["ranking_utility_mode"] = to_string(c.ranking_mode);
        doc["persist_learning"] = c.persist_learning;
        doc["greedy_window"] = to_string(c.greedy_window);
    };
    if (cfg.scenario == ScenarioKind::Fire) shared(cfg.fire);
    else shared(cfg.terrain);

    doc["output"] = {{"dir", cfg.output.dir}, {"csv", cfg.output.csv}, {"svg", cfg.output.svg}};
    doc["terrain"] = {{"physics", detail::physics_json(cfg.terrain.physics)},
                      {"costs", cfg.terrain.costs},
                      {"track", detail::track_json(cfg.terrain.track)},
                      {"max_attempts_per_step", cfg.terrain.max_attempts_per_step}};
    doc["fire"] = {{"walk_limit", cfg.fire.walk_limit},
                   {"flight_cost", cfg.fire.flight_cost},
                   {"flight_success_prob", cfg.fire.flight_success_prob},
                   {"step_cost", cfg.fire.step_cost},
                   {"walk_physics", detail::physics_json(cfg.fire.walk_physics)},
                   {"walk_track", detail::track_json(cfg.fire.walk_track)},
                   {"fire_physics", detail::physics_json(cfg.fire.fire_physics)},
                   {"fire_type_distribution", cfg.fire.fire_type_distribution},
                   {"extinguisher_costs", cfg.fire.extinguisher_costs},
                   {"max_extinguish_tries", cfg.fire.max_extinguish_tries}};
    return doc.dump(2) + "\n";
}

/// Applies the BT_ADAPT_SEED environment override, if set.
inline void apply_seed_env(RunConfig& cfg)
{
    const char* env = std::getenv("BT_ADAPT_SEED");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigError(std::string("BT_ADAPT_SEED is not an unsigned integer: ") + env);
    cfg.set_seed(v);
}

} // namespace btadapt
