#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "weierdim/parallel.hpp"
#include "weierdim/rng.hpp"
#include "weierdim/series.hpp"
#include "weierdim/thresholds.hpp"
#include "weierdim/types.hpp"

// Transversality of the stable-slope functions Y_{x,gamma}(i) for pairs of
// words with different first digits: either the values or the x-derivatives
// stay apart. The analytic criterion reduces to the sign of h_b; the numeric
// checks bound the best separation over all word pairs at grid points.
namespace weierdim {

struct TransversalityCheck {
    bool holds = false;
    /// -h_b(lambda); positive exactly when the criterion holds.
    double margin = 0.0;
};

/// Criterion h_b(lambda) < 0, i.e. lambda > lambda_b.
inline TransversalityCheck analytic_transversality_check(int b, double lambda)
{
    double const v = h(b, lambda);
    return {v < 0.0, -v};
}

/**
 * Upper bounds for the b = 2 auxiliary function g in the four cases
 * (i_2, j_2) = (0,0), (1,1), (1,0), (0,1), in that order. The last one is the
 * largest and equals h_2 in the gamma variable.
 */
inline std::array<double, 4> case_bounds_b2(double gamma)
{
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
    double const g = gamma;
    double const g2 = g * g;
    double const common = g2 * g2 / ((1.0 - g) * (1.0 - g)) + g2 * g2 / (4.0 * (2.0 - g) * (2.0 - g));
    double const same = common - g2 / 8.0 + g / 2.0 - 1.0;
    double const c10 = common - 5.0 * g2 / 16.0 - g / 2.0 - 1.0;
    double const c01 = common - g2 / 2.0 + std::sqrt(2.0) * g - 1.0;
    return {same, same, c10, c01};
}

/// Grid and refinement limits for the separation search.
struct DeltaSearch {
    /// Points k/(x_grid-1), k = 0..x_grid-1, in [0, 1].
    int x_grid = 2000;
    /// Maximum prefix length of a refined cylinder pair.
    int depth = 40;
    /// Maximum number of cylinder pairs evaluated per grid point.
    std::size_t pair_budget = 2'000'000;
    /// A pair is not refined once its lower bound is within this relative gap of the best value seen.
    double rel_gap = 0.25;
};

struct DeltaEstimate {
    /// Lower bound on the separation at every grid point, over all word pairs with i_1 != j_1.
    double delta_hat = 0.0;
    double argmin_x = 0.0;
    double argmin_gamma = 0.0;
    /// Cylinder pair attaining delta_hat, as prefixes with zero tails.
    std::pair<DigitWord, DigitWord> argmin_pair;
    /// Tail allowance subtracted at the attaining pair.
    double tail_slack = 0.0;
    /// Smallest separation actually observed on concrete word pairs.
    double best_observed = 0.0;
    std::size_t pairs_examined = 0;
    bool budget_exhausted = false;
};

namespace detail {

struct PrefixState {
    double theta = 0.0;
    double y = 0.0;
    double yx = 0.0;
    double yg = 0.0;
};

struct Leaf {
    double lb = std::numeric_limits<double>::infinity();
    int level = 0;
    std::vector<std::uint32_t> first;
    std::vector<std::uint32_t> second;
    double slack = 0.0;
};

/**
 * Branch and bound over cylinder pairs ([u], [v]) with u_1 != v_1 at a fixed
 * (x, gamma). With partial sums of length L the completions of a prefix move
 * Y by at most TY(L), Y_x by TQ(L) and Y_gamma by TR(L), which gives a lower
 * bound for the whole cylinder pair. Pairs whose bound is not yet close to the
 * best concrete value are split into their b^2 children.
 */
class SeparationSearch {
  public:
    SeparationSearch(int b, double gamma, double x, bool two_variable, DeltaSearch const& cfg)
        : b_(b), g_(gamma), x_(x), two_(two_variable), cfg_(cfg), r_(gamma / b)
    {
        int const levels = cfg.depth + 2;
        ty_.resize(static_cast<std::size_t>(levels));
        tq_.resize(static_cast<std::size_t>(levels));
        tr_.resize(static_cast<std::size_t>(levels));
        for (int L = 0; L < levels; ++L) {
            ty_[L] = kTwoPi * std::pow(g_, L + 1) / (1.0 - g_);
            tq_[L] = 4.0 * kPi * kPi * std::pow(r_, L + 1) / (1.0 - r_);
            tr_[L] = Y_dgamma_tail(g_, L);
        }
        gpow_.resize(static_cast<std::size_t>(levels));
        rpow_.resize(static_cast<std::size_t>(levels));
        for (int L = 0; L < levels; ++L) {
            gpow_[L] = std::pow(g_, L);
            rpow_[L] = std::pow(r_, L);
        }
    }

    void run()
    {
        std::vector<PrefixState> roots(static_cast<std::size_t>(b_));
        for (int d = 0; d < b_; ++d) roots[d] = extend({x_, 0, 0, 0}, d, 1);
        std::vector<Child> kids;
        for (int i = 0; i < b_; ++i)
            for (int j = i + 1; j < b_; ++j) kids.push_back(make_child(roots[i], roots[j], i, j, 1));
        path_.clear();
        process(kids, 1);
    }

    Leaf const& leaf() const { return best_leaf_; }
    double best_observed() const { return ub_; }
    std::size_t examined() const { return examined_; }
    bool budget_exhausted() const { return budget_hit_; }

  private:
    struct Child {
        PrefixState u, v;
        std::uint32_t a, c;
        double lb;
    };

    PrefixState extend(PrefixState const& s, int digit, int n) const
    {
        PrefixState out;
        out.theta = (s.theta + digit) / b_;
        double const sn = std::sin(kTwoPi * out.theta);
        double const cs = std::cos(kTwoPi * out.theta);
        out.y = s.y + kTwoPi * gpow_[n] * sn;
        out.yx = s.yx + 4.0 * kPi * kPi * rpow_[n] * cs;
        out.yg = two_ ? s.yg + kTwoPi * n * gpow_[n - 1] * sn : 0.0;
        return out;
    }

    double lower_bound(PrefixState const& u, PrefixState const& v, int L) const
    {
        double const dy = std::abs(u.y - v.y) - 2.0 * ty_[L];
        double const dx = std::abs(u.yx - v.yx) - 2.0 * tq_[L];
        // in two-variable mode |dY_x| alone is still a lower bound for |dY_x| + |dY_gamma|
        double const dq = two_ ? std::max(dx, dx + std::abs(u.yg - v.yg) - 2.0 * tr_[L]) : dx;
        return std::max({dy, dq, 0.0});
    }

    double slack(int L) const { return two_ ? 2.0 * std::max(ty_[L], tq_[L] + tr_[L]) : 2.0 * std::max(ty_[L], tq_[L]); }

    /// Separation of the concrete pair (u 0 0 ..., v 0 0 ...).
    double zero_completion(PrefixState u, PrefixState v, int L) const
    {
        for (int n = L + 1; n < static_cast<int>(gpow_.size()); ++n) {
            u = extend(u, 0, n);
            v = extend(v, 0, n);
        }
        double const dy = std::abs(u.y - v.y);
        double const dq = two_ ? std::abs(u.yx - v.yx) + std::abs(u.yg - v.yg) : std::abs(u.yx - v.yx);
        return std::max(dy, dq);
    }

    Child make_child(PrefixState const& u, PrefixState const& v, std::uint32_t a, std::uint32_t c, int L)
    {
        ++examined_;
        return {u, v, a, c, lower_bound(u, v, L)};
    }

    void record_leaf(Child const& ch, int L)
    {
        if (ch.lb < best_leaf_.lb) {
            best_leaf_.lb = ch.lb;
            best_leaf_.level = L;
            best_leaf_.first.clear();
            best_leaf_.second.clear();
            for (auto const& [a, c] : path_) {
                best_leaf_.first.push_back(a);
                best_leaf_.second.push_back(c);
            }
            best_leaf_.first.push_back(ch.a);
            best_leaf_.second.push_back(ch.c);
            best_leaf_.slack = slack(L);
        }
    }

    bool settled(double lb) const { return lb >= (1.0 - cfg_.rel_gap) * ub_; }

    void process(std::vector<Child>& kids, int L)
    {
        std::vector<std::size_t> open;
        for (std::size_t k = 0; k < kids.size(); ++k) {
            if (settled(kids[k].lb)) {
                record_leaf(kids[k], L);
                continue;
            }
            ub_ = std::min(ub_, zero_completion(kids[k].u, kids[k].v, L));
            open.push_back(k);
        }
        std::stable_sort(open.begin(), open.end(),
                         [&](std::size_t p, std::size_t q) { return kids[p].lb < kids[q].lb; });
        for (std::size_t k : open) {
            Child const& ch = kids[k];
            if (settled(ch.lb) || L >= cfg_.depth || examined_ >= cfg_.pair_budget) {
                if (!settled(ch.lb) && L < cfg_.depth) budget_hit_ = true;
                record_leaf(ch, L);
                continue;
            }
            std::vector<PrefixState> us(static_cast<std::size_t>(b_)), vs(static_cast<std::size_t>(b_));
            for (int d = 0; d < b_; ++d) {
                us[d] = extend(ch.u, d, L + 1);
                vs[d] = extend(ch.v, d, L + 1);
            }
            std::vector<Child> next;
            next.reserve(static_cast<std::size_t>(b_ * b_));
            for (int a = 0; a < b_; ++a)
                for (int c = 0; c < b_; ++c) next.push_back(make_child(us[a], vs[c], a, c, L + 1));
            path_.emplace_back(ch.a, ch.c);
            process(next, L + 1);
            path_.pop_back();
        }
    }

    int b_;
    double g_;
    double x_;
    bool two_;
    DeltaSearch cfg_;
    double r_;
    std::vector<double> ty_, tq_, tr_, gpow_, rpow_;
    double ub_ = std::numeric_limits<double>::infinity();
    std::size_t examined_ = 0;
    bool budget_hit_ = false;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> path_;
    Leaf best_leaf_;
};

struct PointResult {
    Leaf leaf;
    double observed = 0.0;
    std::size_t examined = 0;
    bool budget = false;
};

inline PointResult separation_at(int b, double gamma, double x, bool two_variable, DeltaSearch const& cfg)
{
    SeparationSearch s(b, gamma, x, two_variable, cfg);
    s.run();
    return {s.leaf(), s.best_observed(), s.examined(), s.budget_exhausted()};
}

inline void check_search(DeltaSearch const& cfg)
{
    if (cfg.x_grid < 2) throw DomainError("x_grid must be >= 2");
    if (cfg.depth < 1 || cfg.depth > 200) throw DomainError("depth must lie in [1, 200]");
    if (cfg.pair_budget < 1) throw DomainError("pair_budget must be positive");
    if (!(cfg.rel_gap >= 0.0 && cfg.rel_gap < 1.0)) throw DomainError("rel_gap must lie in [0, 1)");
}

/// Deterministic reduction: smallest bound, ties to the lowest point index.
inline DeltaEstimate reduce(int b, std::vector<PointResult> const& results, std::vector<double> const& xs,
                            std::vector<double> const& gammas)
{
    DeltaEstimate est;
    est.delta_hat = std::numeric_limits<double>::infinity();
    est.best_observed = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t k = 0; k < results.size(); ++k) {
        auto const& r = results[k];
        if (r.leaf.lb < est.delta_hat) {
            est.delta_hat = r.leaf.lb;
            best = k;
        }
        est.best_observed = std::min(est.best_observed, r.observed);
        est.pairs_examined += r.examined;
        est.budget_exhausted = est.budget_exhausted || r.budget;
    }
    auto const& leaf = results[best].leaf;
    est.argmin_x = xs[best];
    est.argmin_gamma = gammas[best];
    est.argmin_pair = {DigitWord(b, leaf.first), DigitWord(b, leaf.second)};
    est.tail_slack = leaf.slack;
    return est;
}

}  // namespace detail

/**
 * Lower bound delta_hat on
 *   min over x in the grid and words i, j with i_1 != j_1 of
 *   max(|Y(i) - Y(j)|, |Y_x(i) - Y_x(j)|),
 * valid for all infinite words: every cylinder pair enters with its tail
 * allowance subtracted. Off-grid x are not covered.
 */
inline DeltaEstimate empirical_delta(int b, double gamma, DeltaSearch const& cfg = {})
{
    Params const p = Params::from_gamma(b, gamma);
    detail::check_search(cfg);
    std::vector<double> xs(static_cast<std::size_t>(cfg.x_grid));
    for (int k = 0; k < cfg.x_grid; ++k) xs[k] = static_cast<double>(k) / (cfg.x_grid - 1);
    std::vector<detail::PointResult> results(xs.size());
    parallel_for(xs.size(), [&](std::size_t k) {
        results[k] = detail::separation_at(b, p.gamma(), xs[k], false, cfg);
    });
    std::vector<double> gammas(xs.size(), p.gamma());
    return detail::reduce(b, results, xs, gammas);
}

struct TwoVarSearch {
    DeltaSearch base{101, 40, 2'000'000, 0.5};
    /// The gamma lattice splits [1/b, tilde gamma_b] into this many cells; nodes
    /// inside (1/b + eps, tilde gamma_b - eps) are used, so smaller eps gives a superset.
    int gamma_grid = 20;
};

/**
 * Two-variable separation
 *   max(|Y(i) - Y(j)|, |Y_x(i) - Y_x(j)| + |Y_gamma(i) - Y_gamma(j)|)
 * over the (x, gamma) grid with gamma in (1/b + eps, tilde gamma_b - eps).
 * tilde gamma_b is replaced by 1/(b hi) with hi the certified upper bound on
 * tilde lambda_b, which shrinks the rectangle.
 */
inline DeltaEstimate two_var_delta(int b, double eps_margin, TwoVarSearch const& cfg = {})
{
    if (b < 2) throw DomainError("base b must be an integer >= 2");
    if (!(eps_margin > 0.0)) throw DomainError("eps_margin must be positive");
    detail::check_search(cfg.base);
    if (cfg.gamma_grid < 1) throw DomainError("gamma_grid must be positive");
    auto const tilde = solve_tilde_lambda_b(b, kDefaultRootTol, known_certificates());
    double const g_lo = 1.0 / b;
    double const g_hi = std::min(1.0, 1.0 / (b * tilde.hi));
    double const from = g_lo + eps_margin;
    double const to = g_hi - eps_margin;
    if (!(from < to)) throw DomainError("empty gamma interval for this eps_margin");

    std::vector<double> gammas_used;
    for (int k = 0; k <= cfg.gamma_grid; ++k) {
        double const g = g_lo + (g_hi - g_lo) * k / cfg.gamma_grid;
        if (g > from && g < to) gammas_used.push_back(g);
    }
    if (gammas_used.empty()) throw DomainError("gamma grid has no node inside the interval");

    std::vector<double> xs, gs;
    for (double g : gammas_used)
        for (int k = 0; k < cfg.base.x_grid; ++k) {
            xs.push_back(static_cast<double>(k) / (cfg.base.x_grid - 1));
            gs.push_back(g);
        }
    std::vector<detail::PointResult> results(xs.size());
    parallel_for(xs.size(), [&](std::size_t k) {
        results[k] = detail::separation_at(b, gs[k], xs[k], true, cfg.base);
    });
    return detail::reduce(b, results, xs, gs);
}

/// Parameters of the tangency count e(n, m; eps, delta).
struct TangencyQuery {
    int n = 1;
    int m = 1;
    double eps = 0.1;
    double delta = 0.1;
    /// Representatives are truncated after this many digits.
    int depth = 30;
    /// Grid points per interval I_{m,k}, endpoints included.
    int grid_per_interval = 500;
    /// Random tails per cylinder, in addition to the zero tail.
    int random_tails = 4;
    /// Upper limit on b^m * grid * b^(2n) * representatives^2.
    double budget = 2e9;
};

/**
 * Estimate of e(n, m; eps, delta) for S(x, i) with psi = phi' = -2 pi sin(2 pi x):
 * the maximum over intervals I_{m,k} and n-words u of the number of n-words v
 * for which some representatives of [u] and [v] are (eps, delta)-tangent on
 * I_{m,k}. Each cylinder is represented by its zero tail and `random_tails`
 * random tails; tangency is tested on the grid with the truncation allowance
 * added to both thresholds, so the count can only err upwards on the
 * representatives.
 */
inline int tsujii_e_estimate(Params const& p, TangencyQuery const& q, std::uint64_t seed)
{
    if (q.n < 1 || q.m < 1) throw DomainError("n and m must be >= 1");
    if (!(q.eps > 0.0 && q.delta > 0.0)) throw DomainError("eps and delta must be positive");
    if (q.depth < q.n) throw DomainError("depth must be at least n");
    if (q.grid_per_interval < 1 || q.random_tails < 0) throw DomainError("invalid grid");
    int const b = p.b();
    double const words = std::pow(static_cast<double>(b), q.n);
    double const intervals = std::pow(static_cast<double>(b), q.m);
    double const reps = q.random_tails + 1.0;
    double const work = intervals * (q.grid_per_interval + 1.0) * words * words * reps * reps;
    if (work > q.budget) throw BudgetExceeded("tangency count exceeds the work budget");

    auto const W = static_cast<std::size_t>(words);
    auto const R = static_cast<std::size_t>(reps);
    auto const G = static_cast<std::size_t>(q.grid_per_interval) + 1;
    PhiSpec const psi{{}, {{1, -kTwoPi}}, 0.0};

    std::vector<DigitWord> rep_words;
    rep_words.reserve(W * R);
    for (std::size_t w = 0; w < W; ++w) {
        std::vector<std::uint32_t> prefix(static_cast<std::size_t>(q.n));
        std::size_t code = w;
        for (int k = q.n - 1; k >= 0; --k) {
            prefix[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(code % b);
            code /= b;
        }
        rep_words.emplace_back(b, prefix);
        for (std::size_t r = 1; r < R; ++r)
            rep_words.push_back(
                DigitWord(b, prefix, RandomTail{rng::hash(seed, w, r), 0}).materialized(static_cast<std::size_t>(q.depth)));
    }

    double const g = p.gamma();
    double const slack_s = 2.0 * kTwoPi * std::pow(g, q.depth) / (1.0 - g);
    double const slack_sx = 2.0 * 4.0 * kPi * kPi * std::pow(g / b, q.depth) / (b - g);
    double const eps = q.eps + slack_s;
    double const delta = q.delta + slack_sx;

    auto const K = static_cast<std::size_t>(intervals);
    std::vector<int> per_interval(K, 0);
    parallel_for(K, [&](std::size_t k) {
        // same expression as the empirical_delta grid when x_grid - 1 = b^m * grid_per_interval
        double const cells = intervals * static_cast<double>(G - 1);
        std::vector<double> s(W * R * G), sx(W * R * G);
        for (std::size_t wr = 0; wr < W * R; ++wr)
            for (std::size_t gi = 0; gi < G; ++gi) {
                double const x = static_cast<double>(k * (G - 1) + gi) / cells;
                s[wr * G + gi] = partial_S(p, psi, rep_words[wr], x, q.depth).value;
                sx[wr * G + gi] = partial_S_dx(p, psi, rep_words[wr], x, q.depth).value;
            }
        auto tangent = [&](std::size_t u, std::size_t v) {
            for (std::size_t ru = 0; ru < R; ++ru)
                for (std::size_t rv = 0; rv < R; ++rv) {
                    std::size_t const iu = (u * R + ru) * G;
                    std::size_t const iv = (v * R + rv) * G;
                    for (std::size_t gi = 0; gi < G; ++gi)
                        if (std::abs(s[iu + gi] - s[iv + gi]) <= eps && std::abs(sx[iu + gi] - sx[iv + gi]) <= delta)
                            return true;
                }
            return false;
        };
        int best = 0;
        for (std::size_t u = 0; u < W; ++u) {
            int count = 0;
            for (std::size_t v = 0; v < W; ++v)
                if (u == v || tangent(u, v)) ++count;
            best = std::max(best, count);
        }
        per_interval[k] = best;
    });
    return *std::max_element(per_interval.begin(), per_interval.end());
}

}  // namespace weierdim
