#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "weierdim/types.hpp"

// (*)-functions
//   g(t) = 1 - beta sum_{n=1}^{k-1} t^n + eta t^k + beta sum_{n>=k+1} t^n.
// If g(t) > 0 and g'(t) < 0 at some t in (0,1), then every power series
// 1 + sum g_n t^n with |g_n| <= beta has no double zero in (0, t], so the
// smallest such double zero y(beta) exceeds t.
namespace weierdim {

/// Witness (beta, k, eta, t) for the lower bound y(beta) > t.
struct StarCertificate {
    double beta = 1.0;
    int k = 1;
    double eta = 0.0;
    double t = 0.5;
};

struct CertificateReport {
    double g_value = 0.0;
    double g_prime_value = 0.0;
    bool valid = false;
    /// min(g, -g'); validity needs margin > kCertificateMargin.
    double margin = 0.0;
    /// Signs are right but the margin is within rounding reach.
    bool borderline = false;
};

inline constexpr double kCertificateMargin = 1e-9;

namespace detail {

inline void check_certificate(StarCertificate const& c)
{
    if (!(c.t > 0.0 && c.t < 1.0)) throw DomainError("certificate t must lie in (0, 1)");
    if (c.k < 1) throw DomainError("certificate k must be >= 1");
    if (!(c.beta >= 1.0)) throw DomainError("certificate beta must be >= 1");
}

// g = base(t) + eta t^k with base(t) = 1 - beta (t - t^k)/(1-t) + beta t^(k+1)/(1-t)
inline double star_base(double beta, int k, double t)
{
    double const tk = std::pow(t, k);
    return 1.0 - beta * (t - tk) / (1.0 - t) + beta * tk * t / (1.0 - t);
}

inline double star_base_prime(double beta, int k, double t)
{
    double const tk = std::pow(t, k);
    double const tkm1 = std::pow(t, k - 1);
    double const om = 1.0 - t;
    double const low = ((1.0 - k * tkm1) * om + (t - tk)) / (om * om);
    double const high = ((k + 1) * tk * om + tk * t) / (om * om);
    return -beta * low + beta * high;
}

}  // namespace detail

inline double g_star(StarCertificate const& c)
{
    detail::check_certificate(c);
    return detail::star_base(c.beta, c.k, c.t) + c.eta * std::pow(c.t, c.k);
}

inline double g_star_prime(StarCertificate const& c)
{
    detail::check_certificate(c);
    return detail::star_base_prime(c.beta, c.k, c.t) + c.eta * c.k * std::pow(c.t, c.k - 1);
}

/// A valid report licenses y(c.beta) > c.t. eta is not restricted to [-beta, beta].
inline CertificateReport verify_certificate(StarCertificate const& c)
{
    CertificateReport r;
    r.g_value = g_star(c);
    r.g_prime_value = g_star_prime(c);
    r.margin = std::min(r.g_value, -r.g_prime_value);
    r.valid = r.margin > kCertificateMargin;
    r.borderline = !r.valid && r.margin > 0.0;
    return r;
}

/**
 * Scans k in [1, k_max], eta over eta_grid uniform points of [-2 beta, 2 beta]
 * and t over t_target + j t_step < 1. Returns the first valid certificate in
 * lexicographic (k, eta, t) order.
 *
 * For fixed (k, t) the conditions g > m and g' < -m are linear in eta, so the
 * admissible eta form an open interval and the t-scan never loops over eta.
 */
inline std::optional<StarCertificate> search_certificate(double beta, double t_target, int k_max,
                                                         int eta_grid, double t_step = 1e-4)
{
    if (!(beta >= 1.0)) throw DomainError("beta must be >= 1");
    if (!(t_target > 0.0 && t_target < 1.0)) throw DomainError("t_target must lie in (0, 1)");
    if (k_max < 1 || eta_grid < 2 || !(t_step > 0.0)) throw DomainError("invalid search grid");

    double const eta_lo = -2.0 * beta;
    double const eta_step = 4.0 * beta / (eta_grid - 1);
    struct Candidate {
        long eta_index;
        long t_index;
    };
    for (int k = 1; k <= k_max; ++k) {
        std::vector<Candidate> found;
        for (long j = 0;; ++j) {
            double const t = t_target + static_cast<double>(j) * t_step;
            if (t >= 1.0) break;
            double const tk = std::pow(t, k);
            double const dtk = k * std::pow(t, k - 1);
            double const need_above = (kCertificateMargin - detail::star_base(beta, k, t)) / tk;
            double const need_below = (-kCertificateMargin - detail::star_base_prime(beta, k, t)) / dtk;
            if (!(need_above < need_below)) continue;
            long i = static_cast<long>(std::floor((need_above - eta_lo) / eta_step)) + 1;
            i = std::max(i, 0L);
            if (i >= eta_grid) continue;
            if (eta_lo + static_cast<double>(i) * eta_step < need_below) found.push_back({i, j});
        }
        std::sort(found.begin(), found.end(), [](Candidate const& a, Candidate const& b) {
            return a.eta_index != b.eta_index ? a.eta_index < b.eta_index : a.t_index < b.t_index;
        });
        for (auto const& cand : found) {
            StarCertificate c{beta, k, eta_lo + static_cast<double>(cand.eta_index) * eta_step,
                              t_target + static_cast<double>(cand.t_index) * t_step};
            if (verify_certificate(c).valid) return c;
        }
    }
    return std::nullopt;
}

}  // namespace weierdim
