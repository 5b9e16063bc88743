#pragma once

#include "btadapt/harness.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace btadapt {

/// Completed experiment, ready for emission.
struct Report {
    std::string label;
    std::vector<PolicySummary> summaries;
    std::vector<FeatureValue> terrain; ///< terrain id per step; empty for fire runs
    std::string scenario = "terrain";
    std::uint64_t seed = 0;
    UtilityMode utility_mode = UtilityMode::Ratio;
};

/// Six significant digits.
inline std::string format_number(double v)
{
    if (v == 0.0) v = 0.0; // fold -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

namespace detail {

inline std::string fixed2(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

inline void check_report(const Report& report)
{
    if (report.summaries.empty()) throw ConfigError("report has no policies");
    for (const auto& s : report.summaries) {
        if (s.metrics.trials == 0) throw ConfigError("policy " + to_string(s.policy) + " has zero trials");
    }
}

} // namespace detail

inline std::string summary_csv(const Report& report)
{
    detail::check_report(report);
    std::string out = "policy,avg_ticks,avg_cost,avg_utility_per_tick,walk_trials,fly_trials,fail_trials\n";
    for (const auto& s : report.summaries) {
        const auto& m = s.metrics;
        out += to_string(s.policy) + "," + format_number(m.avg_ticks) + "," + format_number(m.avg_cost) + "," +
               format_number(m.avg_utility_per_tick) + "," + std::to_string(m.walk_trials) + "," +
               std::to_string(m.fly_trials) + "," + std::to_string(m.fail_trials) + "\n";
    }
    return out;
}

inline std::string curve_csv(const SummaryMetrics& m)
{
    std::string out = "step_index,mean_ticks\n";
    for (std::size_t k = 0; k < m.ticks_per_step_curve.size(); ++k) {
        out += std::to_string(k) + "," + format_number(m.ticks_per_step_curve[k]) + "\n";
    }
    return out;
}

/// Writes summary.csv and one curve_<policy>.csv per policy that has a curve.
/// Returns the written paths.
inline std::vector<std::filesystem::path> emit_csv(const Report& report, const std::filesystem::path& dir)
{
    detail::check_report(report);
    detail::ensure_dir(dir);
    std::vector<std::filesystem::path> written;
    written.push_back(dir / "summary.csv");
    detail::write_file(written.back(), summary_csv(report));
    for (const auto& s : report.summaries) {
        if (s.metrics.ticks_per_step_curve.empty()) continue;
        written.push_back(dir / ("curve_" + to_string(s.policy) + ".csv"));
        detail::write_file(written.back(), curve_csv(s.metrics));
    }
    return written;
}

/// Static SVG of one policy's mean ticks per step (blue), over the terrain
/// sequence drawn as a step function (red, right-hand scale).
inline std::string curve_svg(const std::string& title, const std::vector<double>& curve,
                             const std::vector<FeatureValue>& terrain)
{
    constexpr double width = 800, height = 400;
    constexpr double left = 60, right = 50, top = 40, bottom = 50;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    double ymax = 1.0;
    for (double v : curve) ymax = std::max(ymax, v);
    ymax = std::ceil(ymax);
    const std::size_t n = curve.size();
    const double xspan = n > 1 ? static_cast<double>(n - 1) : 1.0;
    auto px = [&](double k) { return left + pw * k / xspan; };
    auto py = [&](double v) { return top + ph * (1.0 - v / ymax); };
    using detail::fixed2;

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(width) << "\" height=\"" << fixed2(height)
      << "\" viewBox=\"0 0 " << fixed2(width) << " " << fixed2(height) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fixed2(width) << "\" height=\"" << fixed2(height) << "\" fill=\"white\"/>\n"
      << "<text x=\"" << fixed2(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";

    if (!terrain.empty()) {
        FeatureValue tmax = 1;
        for (auto t : terrain) tmax = std::max(tmax, t);
        auto ty = [&](FeatureValue t) { return top + ph * (1.0 - (static_cast<double>(t) + 0.5) / (static_cast<double>(tmax) + 1.0)); };
        const double tx = terrain.size() > 1 ? pw / static_cast<double>(terrain.size() - 1) : pw;
        s << "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"1.5\" stroke-opacity=\"0.6\" points=\"";
        for (std::size_t k = 0; k < terrain.size(); ++k) {
            const double x0 = left + tx * static_cast<double>(k);
            const double x1 = k + 1 < terrain.size() ? left + tx * static_cast<double>(k + 1) : x0;
            s << fixed2(x0) << "," << fixed2(ty(terrain[k])) << " " << fixed2(x1) << "," << fixed2(ty(terrain[k]));
            if (k + 1 < terrain.size()) s << " ";
        }
        s << "\"/>\n";
        for (FeatureValue t = 0; t <= tmax; ++t) {
            s << "<text x=\"" << fixed2(left + pw + 8) << "\" y=\"" << fixed2(ty(t) + 4)
              << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"red\">T" << t << "</text>\n";
        }
    }

    // Axes, ticks and labels.
    s << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top + ph) << "\" x2=\"" << fixed2(left + pw) << "\" y2=\""
      << fixed2(top + ph) << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top) << "\" x2=\"" << fixed2(left) << "\" y2=\""
      << fixed2(top + ph) << "\" stroke=\"black\"/>\n";
    const int yticks = 5;
    for (int i = 0; i <= yticks; ++i) {
        const double v = ymax * i / yticks;
        s << "<text x=\"" << fixed2(left - 6) << "\" y=\"" << fixed2(py(v) + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_number(v) << "</text>\n";
    }
    const int xticks = 6;
    for (int i = 0; i <= xticks; ++i) {
        const double k = xspan * i / xticks;
        s << "<text x=\"" << fixed2(px(k)) << "\" y=\"" << fixed2(top + ph + 16)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format_number(std::round(k))
          << "</text>\n";
    }
    s << "<text x=\"" << fixed2(left + pw / 2) << "\" y=\"" << fixed2(height - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">step index</text>\n"
      << "<text x=\"16\" y=\"" << fixed2(top + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\" transform=\"rotate(-90 16 " << fixed2(top + ph / 2) << ")\">mean ticks</text>\n";

    if (!curve.empty()) {
        s << "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < n; ++k) {
            s << fixed2(px(static_cast<double>(k))) << "," << fixed2(py(curve[k]));
            if (k + 1 < n) s << " ";
        }
        s << "\"/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

/// One plot_<policy>.svg per policy with a curve. Returns the written paths.
inline std::vector<std::filesystem::path> emit_plot(const Report& report, const std::filesystem::path& dir)
{
    detail::check_report(report);
    detail::ensure_dir(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& s : report.summaries) {
        if (s.metrics.ticks_per_step_curve.empty()) continue;
        const std::string name = to_string(s.policy);
        written.push_back(dir / ("plot_" + name + ".svg"));
        detail::write_file(written.back(),
                           curve_svg(report.label + " " + name, s.metrics.ticks_per_step_curve, report.terrain));
    }
    return written;
}

/// Run metadata, including how utility per tick was averaged.
inline std::string meta_json(const Report& report)
{
    nlohmann::ordered_json j;
    j["label"] = report.label;
    j["scenario"] = report.scenario;
    j["seed"] = report.seed;
    j["utility_mode"] = to_string(report.utility_mode);
    j["avg_utility_per_tick"] = "ratio_of_sums";
    j["policies"] = nlohmann::ordered_json::array();
    for (const auto& s : report.summaries) j["policies"].push_back(to_string(s.policy));
    return j.dump(2) + "\n";
}

inline std::filesystem::path emit_meta(const Report& report, const std::filesystem::path& dir)
{
    detail::check_report(report);
    detail::ensure_dir(dir);
    auto path = dir / "meta.json";
    detail::write_file(path, meta_json(report));
    return path;
}

} // namespace btadapt
