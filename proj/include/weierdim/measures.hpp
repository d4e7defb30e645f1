#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "weierdim/parallel.hpp"
#include "weierdim/rng.hpp"
#include "weierdim/series.hpp"
#include "weierdim/types.hpp"

// Sampling of the pushforward measures
//   m_{x,gamma} = (Y_{x,gamma})_* P                    transversal measure
//   SBR         = image of Lebesgue x P under (x,i) -> (x, S(x,i))
//   mu          = image of Lebesgue under x -> (x, f(x))
// with P the uniform Bernoulli measure on digit words, plus density and
// local-dimension estimators. Sample k uses the digit stream keyed by
// hash(seed, k); its x coordinate (when random) is counter 0 of that stream.
namespace weierdim {

enum class SampleKind { Transversal, SBR, GraphLift, Synthetic };

inline char const* to_string(SampleKind k)
{
    switch (k) {
    case SampleKind::Transversal: return "transversal";
    case SampleKind::SBR: return "sbr";
    case SampleKind::GraphLift: return "graph-lift";
    case SampleKind::Synthetic: return "synthetic";
    }
    return "?";
}

struct SampleSet {
    SampleKind kind = SampleKind::Synthetic;
    /// 1 for values, 2 for (x, y) pairs stored interleaved.
    int dim = 1;
    std::vector<double> coords;
    std::optional<Params> params;
    std::uint64_t seed = 0;
    int depth = 0;
    /// Absolute truncation error of every sampled coordinate.
    double tail_bound = 0.0;
    /// The base point of a transversal sample.
    double x = 0.0;

    std::size_t size() const { return coords.size() / static_cast<std::size_t>(dim); }
    double at(std::size_t k, int c = 0) const { return coords[k * static_cast<std::size_t>(dim) + c]; }
};

/// Least-squares fit of log(mass or count) against log(r) or log(1/eps).
struct DimFit {
    double slope = 0.0;
    double intercept = 0.0;
    double std_error = 0.0;
    std::vector<double> radii;
    std::vector<double> masses;
};

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    /// Fraction of samples per bin; sums to 1.
    std::vector<double> mass;
};

/// Smallest depth with 2 pi gamma^depth / (1 - gamma) below 1e-9.
inline int default_depth(Params const& p)
{
    double const g = p.gamma();
    return static_cast<int>(std::ceil(std::log(1e-9 * (1.0 - g) / kTwoPi) / std::log(g)));
}

inline DigitWord sample_word(int b, std::uint64_t seed, std::size_t k)
{
    return DigitWord::random(b, rng::hash(seed, k));
}

/// x coordinate of sample k, drawn from counter 0 of its stream.
inline double sample_x(std::uint64_t seed, std::size_t k) { return rng::to_unit(rng::hash(rng::hash(seed, k), 0)); }

namespace detail {

inline void check_sampling(std::size_t count, int depth)
{
    if (count < 1) throw DomainError("count must be >= 1");
    if (depth < 1) throw DomainError("depth must be >= 1");
}

/// Ordinary least squares y = a + s x; returns {s, a, stderr of s}.
inline std::array<double, 3> least_squares(std::vector<double> const& x, std::vector<double> const& y)
{
    std::size_t const n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    double const slope = sxy / sxx;
    double const icept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double const e = y[k] - icept - slope * x[k];
        rss += e * e;
    }
    double const se = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
    return {slope, icept, se};
}

}  // namespace detail

/// Draws Y_{x,gamma}(i) for `count` uniform words truncated after `depth` digits.
inline SampleSet sample_transversal(Params const& p, double x, std::size_t count, int depth, std::uint64_t seed)
{
    detail::check_x(x);
    detail::check_sampling(count, depth);
    SampleSet s;
    s.kind = SampleKind::Transversal;
    s.dim = 1;
    s.params = p;
    s.seed = seed;
    s.depth = depth;
    s.x = x;
    s.coords.resize(count);
    parallel_for(count, [&](std::size_t k) { s.coords[k] = partial_Y(p, sample_word(p.b(), seed, k), x, depth).value; });
    s.tail_bound = kTwoPi * std::pow(p.gamma(), depth + 1) / (1.0 - p.gamma());
    return s;
}

/// Draws (x, S(x, i)) with x uniform on [0, 1) and i uniform.
inline SampleSet sample_sbr(Params const& p, PhiSpec const& psi, std::size_t count, int depth, std::uint64_t seed)
{
    detail::check_sampling(count, depth);
    psi.validate();
    SampleSet s;
    s.kind = SampleKind::SBR;
    s.dim = 2;
    s.params = p;
    s.seed = seed;
    s.depth = depth;
    s.coords.resize(2 * count);
    parallel_for(count, [&](std::size_t k) {
        double const x = sample_x(seed, k);
        s.coords[2 * k] = x;
        s.coords[2 * k + 1] = partial_S(p, psi, sample_word(p.b(), seed, k), x, depth).value;
    });
    s.tail_bound = psi.oscillating_sup_bound() * std::pow(p.gamma(), depth) / (1.0 - p.gamma());
    return s;
}

/// Draws (x, f(x)) with x uniform on [0, 1); f is summed to abs_tol.
inline SampleSet sample_graph_lift(Params const& p, PhiSpec const& phi, std::size_t count, std::uint64_t seed,
                                   double abs_tol = 1e-9)
{
    detail::check_sampling(count, 1);
    SampleSet s;
    s.kind = SampleKind::GraphLift;
    s.dim = 2;
    s.params = p;
    s.seed = seed;
    s.coords.resize(2 * count);
    std::vector<double> tails(count);
    std::vector<int> terms(count);
    parallel_for(count, [&](std::size_t k) {
        double const x = sample_x(seed, k);
        SeriesValue const v = eval_f(p, phi, x, abs_tol);
        s.coords[2 * k] = x;
        s.coords[2 * k + 1] = v.value;
        tails[k] = v.tail_bound;
        terms[k] = v.terms_used;
    });
    s.tail_bound = *std::max_element(tails.begin(), tails.end());
    s.depth = *std::max_element(terms.begin(), terms.end());
    return s;
}

/// Wraps given points (dim 1 or 2, interleaved) as a synthetic sample set.
inline SampleSet synthetic_samples(std::vector<double> coords, int dim)
{
    if (dim != 1 && dim != 2) throw DomainError("sample dimension must be 1 or 2");
    if (coords.empty() || coords.size() % static_cast<std::size_t>(dim) != 0)
        throw DomainError("coordinate count does not match the dimension");
    SampleSet s;
    s.dim = dim;
    s.coords = std::move(coords);
    return s;
}

/**
 * Local dimension from the scaling of ball masses: for `centers` sample points
 * chosen by the seed, fits log mu(B_r(c)) against log r over the given radii
 * and averages the slopes. Balls are intervals in 1D and squares (max norm)
 *  in 2D; the center itself is not counted.
 */
inline DimFit local_dim_estimate(SampleSet const& s, std::vector<double> const& radii, std::size_t centers,
                                 std::uint64_t seed)
{
    if (radii.size() < 4) throw DomainError("local dimension fit needs at least 4 radii");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0)) throw DomainError("radii must be positive");
        if (k > 0 && !(radii[k] < radii[k - 1])) throw DomainError("radii must be strictly decreasing");
    }
    if (s.size() == 0) throw DomainError("empty sample set");
    if (centers < 2) throw DomainError("at least 2 centers are needed");
    if (radii.back() < 10.0 * s.tail_bound)
        throw DomainError("smallest radius is below the truncation resolution of the samples");

    std::size_t const n = s.size();
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.at(a) < s.at(b); });
    std::vector<double> xs(n);
    for (std::size_t k = 0; k < n; ++k) xs[k] = s.at(order[k]);

    std::size_t const R = radii.size();
    std::vector<double> logr(R);
    for (std::size_t j = 0; j < R; ++j) logr[j] = std::log(radii[j]);

    std::vector<double> slopes(centers), icepts(centers);
    std::vector<std::vector<double>> masses(centers, std::vector<double>(R));
    parallel_for(centers, [&](std::size_t c) {
        std::size_t const idx = rng::uniform_below(rng::hash(seed, c), static_cast<std::uint32_t>(n));
        double const cx = s.at(idx, 0);
        double const cy = s.dim == 2 ? s.at(idx, 1) : 0.0;
        std::vector<double> logm(R);
        for (std::size_t j = 0; j < R; ++j) {
            double const r = radii[j];
            auto lo = std::lower_bound(xs.begin(), xs.end(), cx - r);
            auto hi = std::upper_bound(xs.begin(), xs.end(), cx + r);
            std::size_t hits = 0;
            if (s.dim == 1) {
                hits = static_cast<std::size_t>(hi - lo);
            } else {
                for (auto it = lo; it != hi; ++it)
                    if (std::abs(s.at(order[static_cast<std::size_t>(it - xs.begin())], 1) - cy) <= r) ++hits;
            }
            // the center is excluded; an empty ball counts as half a point
            double const others = hits > 1 ? static_cast<double>(hits - 1) : 0.5;
            double const m = others / static_cast<double>(n);
            masses[c][j] = m;
            logm[j] = std::log(m);
        }
        auto const fit = detail::least_squares(logr, logm);
        slopes[c] = fit[0];
        icepts[c] = fit[1];
    });

    DimFit out;
    out.radii = radii;
    out.masses.assign(R, 0.0);
    double mean = 0.0, mean_i = 0.0;
    for (std::size_t c = 0; c < centers; ++c) {
        mean += slopes[c];
        mean_i += icepts[c];
        for (std::size_t j = 0; j < R; ++j) out.masses[j] += masses[c][j] / static_cast<double>(centers);
    }
    mean /= static_cast<double>(centers);
    double var = 0.0;
    for (double v : slopes) var += (v - mean) * (v - mean);
    var /= static_cast<double>(centers - 1);
    out.slope = mean;
    out.intercept = mean_i / static_cast<double>(centers);
    out.std_error = std::sqrt(var / static_cast<double>(centers));
    return out;
}

/// dim mu = 1 + (D - 1) dim nu.
inline double dim_from_transversal(double dim_nu, Params const& p)
{
    if (!(dim_nu >= 0.0 && dim_nu <= 1.0)) throw DomainError("dim_nu must lie in [0, 1]");
    return 1.0 + (p.D() - 1.0) * dim_nu;
}

/// Histogram of the last coordinate over [min, max] with equal-width bins.
inline Histogram density_histogram(SampleSet const& s, int bins)
{
    if (bins < 2) throw DomainError("bins must be >= 2");
    std::size_t const n = s.size();
    if (n == 0) throw DomainError("empty sample set");
    int const c = s.dim - 1;
    Histogram h;
    h.lo = h.hi = s.at(0, c);
    for (std::size_t k = 1; k < n; ++k) {
        h.lo = std::min(h.lo, s.at(k, c));
        h.hi = std::max(h.hi, s.at(k, c));
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    double const width = (h.hi - h.lo) / bins;
    for (std::size_t k = 0; k < n; ++k) {
        int j = width > 0.0 ? static_cast<int>((s.at(k, c) - h.lo) / width) : 0;
        j = std::clamp(j, 0, bins - 1);
        ++counts[static_cast<std::size_t>(j)];
    }
    h.mass.resize(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) h.mass[j] = static_cast<double>(counts[j]) / static_cast<double>(n);
    return h;
}

}  // namespace weierdim
