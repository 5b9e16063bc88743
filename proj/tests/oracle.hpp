#pragma once

// Reference computations used by the tests. Deliberately written without the
// library's closed forms: probabilities by enumerating outcome vectors, tick
// expectations by value iteration on the retry chain.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

/// P(at least one child succeeds), by summing over all 2^n outcome vectors.
inline double selector_prob_enumerated(const std::vector<double>& p)
{
    const std::size_t n = p.size();
    double total = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) w *= (mask >> i & 1) ? p[i] : 1.0 - p[i];
        if (mask != 0) total += w;
    }
    return total;
}

/// P(every child succeeds), by enumeration.
inline double sequence_prob_enumerated(const std::vector<double>& p)
{
    const std::size_t n = p.size();
    double total = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) w *= (mask >> i & 1) ? p[i] : 1.0 - p[i];
        if (mask == (std::size_t{1} << n) - 1) total += w;
    }
    return total;
}

/// Expected leaf ticks to complete one step with a fixed-order selector,
/// retried until success. State k = "about to tick child k"; failing the last
/// child restarts at 0. Solved by value iteration.
inline double expected_ticks_value_iteration(const std::vector<double>& p, int sweeps = 200000)
{
    const std::size_t n = p.size();
    std::vector<double> e(n, 0.0);
    for (int it = 0; it < sweeps; ++it) {
        double delta = 0.0;
        for (std::size_t k = n; k-- > 0;) {
            const double next = k + 1 < n ? e[k + 1] : e[0];
            const double v = 1.0 + (1.0 - p[k]) * next;
            delta = std::max(delta, std::abs(v - e[k]));
            e[k] = v;
        }
        if (delta < 1e-13) break;
    }
    return e[0];
}

/// Expected S0 leaf ticks over a track, given the physics column of each
/// step.
inline double expected_s0_track_ticks(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& terrain)
{
    double total = 0.0;
    for (std::size_t t : terrain) {
        std::vector<double> col;
        for (const auto& r : rows) col.push_back(r[t]);
        total += expected_ticks_value_iteration(col);
    }
    return total;
}

} // namespace oracle
