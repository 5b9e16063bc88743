#pragma once

#include "btadapt/rng.hpp"
#include "btadapt/stats.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace btadapt {

/// Invalid physics entry, with its location.
class ValidationError : public ConfigError {
public:
    ValidationError(const std::string& what, std::size_t row, std::size_t col) : ConfigError(what), row_(row), col_(col) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

/// Success probability of behavior `row` in world state `col`.
/// Entries are bounded to [0,1]; rows and columns carry no sum constraint.
class PhysicsMatrix {
public:
    PhysicsMatrix() = default;

    /// Builds from row vectors. Throws ConfigError on ragged or empty input;
    /// call validate_physics for the range check.
    static PhysicsMatrix from_rows(const std::vector<std::vector<double>>& rows)
    {
        if (rows.empty() || rows.front().empty()) throw ConfigError("physics matrix must have at least one row and column");
        PhysicsMatrix m;
        m.rows_ = rows.size();
        m.cols_ = rows.front().size();
        m.entries_.reserve(m.rows_ * m.cols_);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_) {
                throw ConfigError("physics row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                                  " entries, expected " + std::to_string(m.cols_));
            }
            m.entries_.insert(m.entries_.end(), rows[r].begin(), rows[r].end());
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double at(std::size_t row, std::size_t col) const
    {
        if (row >= rows_ || col >= cols_) {
            throw ConfigError("physics index (" + std::to_string(row) + ", " + std::to_string(col) + ") out of range");
        }
        return entries_[row * cols_ + col];
    }

    std::vector<double> column(std::size_t col) const
    {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, col);
        return out;
    }

    std::vector<std::vector<double>> to_rows() const
    {
        std::vector<std::vector<double>> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            out[r].assign(entries_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                          entries_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
        }
        return out;
    }

    bool operator==(const PhysicsMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

inline void validate_physics(const PhysicsMatrix& m)
{
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double v = m.at(r, c);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ValidationError("physics entry (" + std::to_string(r) + ", " + std::to_string(c) + ") = " +
                                          std::to_string(v) + " is outside [0, 1]",
                                      r, c);
            }
        }
    }
}

/// Three stepping behaviors on three terrains, each best on its own terrain.
inline PhysicsMatrix walking_physics()
{
    return PhysicsMatrix::from_rows({{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}});
}

/// Variant with a generalist middle behavior; columns sum above one.
inline PhysicsMatrix asymmetric_walking_physics()
{
    return PhysicsMatrix::from_rows({{0.6, 0.1, 0.1}, {0.4, 0.7, 0.4}, {0.1, 0.1, 0.8}});
}

/// Extinguisher x fire type; every column holds a certain success.
inline PhysicsMatrix extinguisher_physics()
{
    return PhysicsMatrix::from_rows({{1.00, 0.05, 0.05}, {0.05, 1.00, 0.05}, {0.05, 0.05, 1.00}});
}

struct TrackSegment {
    FeatureValue terrain = 0;
    std::size_t length = 0;

    bool operator==(const TrackSegment&) const = default;
};

/// Ordered terrain stretches.
class Track {
public:
    Track() = default;
    explicit Track(std::vector<TrackSegment> segments) : segments_(std::move(segments))
    {
        for (const auto& s : segments_) total_ += s.length;
    }

    const std::vector<TrackSegment>& segments() const noexcept { return segments_; }
    std::size_t total_steps() const noexcept { return total_; }

    /// Terrain id per step.
    std::vector<FeatureValue> expand() const
    {
        std::vector<FeatureValue> out;
        out.reserve(total_);
        for (const auto& s : segments_) out.insert(out.end(), s.length, s.terrain);
        return out;
    }

    FeatureValue terrain_at(std::size_t step) const
    {
        for (const auto& s : segments_) {
            if (step < s.length) return s.terrain;
            step -= s.length;
        }
        throw ConfigError("step index beyond end of track");
    }

    /// Throws unless every terrain id indexes a physics column.
    void validate(std::size_t terrain_count) const
    {
        if (total_ == 0) throw ConfigError("track has no steps");
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            if (segments_[i].terrain >= terrain_count) {
                throw ConfigError("track segment " + std::to_string(i) + " uses terrain " +
                                  std::to_string(segments_[i].terrain) + " but only " + std::to_string(terrain_count) +
                                  " terrains exist");
            }
        }
    }

    bool operator==(const Track& o) const { return segments_ == o.segments_; }

private:
    std::vector<TrackSegment> segments_;
    std::size_t total_ = 0;
};

/// 216 steps: terrains 0,1,2,0,1,2 in 36-step stretches.
inline Track build_default_track()
{
    std::vector<TrackSegment> segs;
    for (int rep = 0; rep < 2; ++rep) {
        for (FeatureValue t = 0; t < 3; ++t) segs.push_back({t, 36});
    }
    return Track(std::move(segs));
}

/// 100 steps to the fire: terrains 0,1,2 in stretches of 33, 33 and 34.
inline Track build_default_fire_walk_track() { return Track({{0, 33}, {1, 33}, {2, 34}}); }

inline Status step_attempt(const PhysicsMatrix& physics, std::size_t leaf, FeatureValue terrain, RandomStream& rng)
{
    return rng.bernoulli(physics.at(leaf, terrain)) ? Status::Success : Status::Failure;
}

/// Mean leaf ticks per completed step for a fixed-order Selector whose
/// children succeed independently with `ordered_probs`, retried until one
/// invocation succeeds: E[ticks per invocation] / P(invocation succeeds).
inline double expected_ticks_per_step(std::span<const double> ordered_probs)
{
    double ticks_per_invocation = 0.0;
    double reach = 1.0; // probability that the k-th child gets ticked
    for (double p : ordered_probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("probabilities must lie in [0, 1]");
        ticks_per_invocation += reach;
        reach *= 1.0 - p;
    }
    const double q = selector_success_prob(ordered_probs);
    if (!(q > 0.0)) throw ConfigError("step can never complete: every probability is zero");
    return ticks_per_invocation / q;
}

} // namespace btadapt
