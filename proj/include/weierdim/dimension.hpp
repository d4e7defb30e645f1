#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "weierdim/measures.hpp"
#include "weierdim/parallel.hpp"
#include "weierdim/series.hpp"
#include "weierdim/types.hpp"

// Box counting for graphs of f on [0, 1] at the scales eps_j = b^-j.
namespace weierdim {

struct BoxLevel {
    double epsilon = 1.0;
    std::uint64_t boxes_hit = 0;
};

struct BoxCountTable {
    std::vector<BoxLevel> levels;
    int b = 2;
    int samples_per_column = 0;
    /// Accuracy to which f was summed at every sample point.
    double f_tolerance = 0.0;
};

inline double theoretical_D(Params const& p) { return p.D(); }

/**
 * Counts eps_j-boxes met by the graph for j = 0..levels-1. Each column of the
 * finest level carries samples_per_column equal steps, endpoints included, so
 * every coarser column sees the union of its children's samples. Within a
 * column the graph is taken to span [min, max] of its samples; the count can
 * only miss oscillation between samples.
 */
inline BoxCountTable box_count(Params const& p, PhiSpec const& phi, int levels, int samples_per_column)
{
    if (levels < 4) throw DomainError("box counting needs at least 4 levels");
    if (samples_per_column < 2) throw DomainError("samples_per_column must be >= 2");
    int const b = p.b();
    double const finest_cols_d = std::pow(static_cast<double>(b), levels - 1);
    if (finest_cols_d * samples_per_column > 1e9) throw BudgetExceeded("box counting grid exceeds 1e9 samples");
    auto const cols = static_cast<std::size_t>(finest_cols_d);
    auto const spc = static_cast<std::size_t>(samples_per_column);
    std::size_t const points = cols * spc + 1;
    double const finest_eps = 1.0 / finest_cols_d;
    double const tol = std::min(1e-9, 1e-6 * finest_eps);

    std::vector<double> f(points);
    parallel_for(points, [&](std::size_t k) {
        double const x = static_cast<double>(k) / static_cast<double>(points - 1);
        f[k] = eval_f(p, phi, x, tol).value;
    });

    std::vector<double> lo(cols), hi(cols);
    parallel_for(cols, [&](std::size_t c) {
        auto const first = f.begin() + static_cast<std::ptrdiff_t>(c * spc);
        auto const [mn, mx] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(spc) + 1);
        lo[c] = *mn;
        hi[c] = *mx;
    });

    BoxCountTable t;
    t.b = b;
    t.samples_per_column = samples_per_column;
    t.f_tolerance = tol;
    t.levels.resize(static_cast<std::size_t>(levels));
    double eps = finest_eps;
    for (int j = levels - 1; j >= 0; --j) {
        std::uint64_t hits = 0;
        for (std::size_t c = 0; c < lo.size(); ++c)
            hits += static_cast<std::uint64_t>(std::floor(hi[c] / eps) - std::floor(lo[c] / eps)) + 1;
        t.levels[static_cast<std::size_t>(j)] = {eps, hits};
        if (j == 0) break;
        std::size_t const parents = lo.size() / static_cast<std::size_t>(b);
        for (std::size_t c = 0; c < parents; ++c) {
            double l = lo[c * b], h = hi[c * b];
            for (int d = 1; d < b; ++d) {
                l = std::min(l, lo[c * b + d]);
                h = std::max(h, hi[c * b + d]);
            }
            lo[c] = l;
            hi[c] = h;
        }
        lo.resize(parents);
        hi.resize(parents);
        eps *= b;
    }
    // eps was accumulated by repeated multiplication; store the exact powers
    for (int j = 0; j < levels; ++j) t.levels[static_cast<std::size_t>(j)].epsilon = std::pow(static_cast<double>(b), -j);
    return t;
}

/// Slope of log(boxes_hit) against log(1/eps) after dropping the coarsest levels.
inline DimFit fit_box_dimension(BoxCountTable const& t, int drop_coarsest = 2)
{
    if (drop_coarsest < 0) throw DomainError("drop_coarsest must be >= 0");
    if (static_cast<int>(t.levels.size()) - drop_coarsest < 4) throw DomainError("fit needs at least 4 levels");
    std::vector<double> lx, ly;
    DimFit fit;
    for (std::size_t j = static_cast<std::size_t>(drop_coarsest); j < t.levels.size(); ++j) {
        auto const& lv = t.levels[j];
        if (!(lv.epsilon > 0.0) || lv.boxes_hit == 0) throw DomainError("invalid box count level");
        lx.push_back(-std::log(lv.epsilon));
        ly.push_back(std::log(static_cast<double>(lv.boxes_hit)));
        fit.radii.push_back(lv.epsilon);
        fit.masses.push_back(static_cast<double>(lv.boxes_hit));
    }
    auto const r = detail::least_squares(lx, ly);
    fit.slope = r[0];
    fit.intercept = r[1];
    fit.std_error = r[2];
    return fit;
}

}  // namespace weierdim
