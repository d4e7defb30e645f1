#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "weierdim/star.hpp"
#include "weierdim/types.hpp"

// Threshold functions for the Weierstrass graph: lambda_b is the zero of h_b
// (every lambda above it gives dimension D), and tilde lambda_b is the root of
// y(beta(lambda)) = 1/(b lambda) (almost every lambda above it gives D).
namespace weierdim {

struct RootBracket {
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
    double tol = 0.0;

    double mid() const { return 0.5 * (lo + hi); }
};

enum class BoundMethod { ClosedForm, GenericBound, Certificate };

inline char const* to_string(BoundMethod m)
{
    switch (m) {
    case BoundMethod::ClosedForm: return "closed-form";
    case BoundMethod::GenericBound: return "generic-bound";
    case BoundMethod::Certificate: return "certificate";
    }
    return "?";
}

/// Bounds lower <= y(beta) < upper (upper = 1 means only the trivial bound y < 1).
struct YBetaBounds {
    double beta = 1.0;
    double lower = 0.0;
    double upper = 1.0;
    BoundMethod method = BoundMethod::GenericBound;
};

/// A (*)-certificate attached to the parameter lambda0 it is meant to exclude.
struct LambdaCertificate {
    int b = 2;
    double lambda0 = 0.0;
    StarCertificate cert;
};

inline constexpr double kClosedFormBeta = 3.0 + 2.8284271247461903;  // 3 + sqrt(8)
inline constexpr double kDefaultRootTol = 1e-12;

namespace detail {

inline void check_lambda_closed(int b, double lambda)
{
    if (b < 2) throw DomainError("base b must be an integer >= 2");
    if (!(lambda > 1.0 / b && lambda <= 1.0))
        throw DomainError("lambda must lie in (1/b, 1], got " + std::to_string(lambda));
}

inline double sin2_pi_over(int b)
{
    double const s = std::sin(kPi / b);
    return s * s;
}

/// Bisection for a sign change of f on [lo, hi].
template <typename F>
RootBracket bisect(F&& f, double lo, double hi, double tol)
{
    if (!(tol > 0.0)) throw DomainError("bisection tolerance must be positive");
    double flo = f(lo);
    double fhi = f(hi);
    if (!(flo * fhi < 0.0)) throw std::logic_error("bisection endpoints do not bracket a root");
    while (hi - lo > tol) {
        double const m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        double const fm = f(m);
        if (fm == 0.0) return {m, m, fm, fm, tol};
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = m;
            flo = fm;
        } else {
            hi = m;
            fhi = fm;
        }
    }
    return {lo, hi, flo, fhi, tol};
}

inline double just_above(double v) { return std::nextafter(v, 2.0 * v + 1.0); }

}  // namespace detail

/// h_b(lambda); its sign decides the one-variable transversality for b, lambda.
inline double h(int b, double lambda)
{
    detail::check_lambda_closed(b, lambda);
    double const l = lambda;
    if (b == 2) {
        double const a = 2.0 * l - 1.0;
        double const c = 4.0 * l - 1.0;
        return 1.0 / (4.0 * l * l * a * a) + 1.0 / (16.0 * l * l * c * c) - 1.0 / (8.0 * l * l) +
               std::sqrt(2.0) / (2.0 * l) - 1.0;
    }
    double const a = b * l - 1.0;
    double const c = static_cast<double>(b) * b * l - 1.0;
    return 1.0 / (a * a) + 1.0 / (c * c) - detail::sin2_pi_over(b);
}

/// h_b written in gamma = 1/(b lambda); equals h(b, 1/(b gamma)).
inline double h_gamma_form(int b, double gamma)
{
    if (b < 2) throw DomainError("base b must be an integer >= 2");
    if (!(gamma > 1.0 / b && gamma < 1.0)) throw DomainError("gamma must lie in (1/b, 1)");
    double const g = gamma;
    double const g2 = g * g;
    if (b == 2) {
        double const g4 = g2 * g2;
        return g4 / ((1.0 - g) * (1.0 - g)) + g4 / (4.0 * (2.0 - g) * (2.0 - g)) - g2 / 2.0 +
               std::sqrt(2.0) * g - 1.0;
    }
    return g2 / ((1.0 - g) * (1.0 - g)) + g2 / ((b - g) * (b - g)) - detail::sin2_pi_over(b);
}

inline double tilde_h(int b, double lambda)
{
    detail::check_lambda_closed(b, lambda);
    double const a = b * lambda - 1.0;
    double const c = static_cast<double>(b) * b * lambda - 1.0;
    return 1.0 / (a * a * a * a) + 1.0 / (c * c) - detail::sin2_pi_over(b);
}

/// b^2 times an upper bound for h_b obtained from sin x > x - x^3/6.
inline double H(int b, double lambda)
{
    detail::check_lambda_closed(b, lambda);
    double const a = lambda - 1.0 / b;
    double const c = b * lambda - 1.0 / b;
    return 1.0 / (a * a) + 1.0 / (c * c) + std::pow(kPi, 4) / (3.0 * b * b) - kPi * kPi;
}

/// b^2 times the matching upper bound for tilde h_b.
inline double tilde_H(int b, double lambda)
{
    detail::check_lambda_closed(b, lambda);
    double const sb = std::sqrt(static_cast<double>(b));
    double const a = sb * lambda - 1.0 / sb;
    double const c = b * lambda - 1.0 / b;
    return 1.0 / (a * a * a * a) + 1.0 / (c * c) + std::pow(kPi, 4) / (3.0 * b * b) - kPi * kPi;
}

/// beta(lambda) = 1 / sqrt(sin^2(pi/b) - 1/(b^2 lambda - 1)^2).
inline double beta_of(int b, double lambda)
{
    detail::check_lambda_closed(b, lambda);
    double const c = static_cast<double>(b) * b * lambda - 1.0;
    double const radicand = detail::sin2_pi_over(b) - 1.0 / (c * c);
    if (!(radicand > 0.0)) throw DomainError("beta(lambda) undefined: nonpositive radicand");
    return 1.0 / std::sqrt(radicand);
}

/// Bracket of lambda_b, the unique zero of the strictly decreasing h_b on (1/b, 1).
inline RootBracket solve_lambda_b(int b, double tol = kDefaultRootTol)
{
    if (b < 2) throw DomainError("base b must be an integer >= 2");
    return detail::bisect([b](double l) { return h(b, l); }, detail::just_above(1.0 / b), 1.0, tol);
}

/**
 * Tightest bounds on y(beta) available from the closed form, the generic
 * bounds 1/(1+sqrt beta) <= y < 1, the value y(2) = 1/2 with monotonicity, and
 * valid certificates whose beta is at least the requested one.
 */
inline YBetaBounds y_bounds(double beta, std::vector<StarCertificate> const& certs = {})
{
    if (!(beta >= 1.0)) throw DomainError("beta must be >= 1");
    YBetaBounds r;
    r.beta = beta;
    double const generic = 1.0 / (1.0 + std::sqrt(beta));
    if (beta >= kClosedFormBeta) {
        r.lower = r.upper = generic;
        r.method = BoundMethod::ClosedForm;
        return r;
    }
    r.lower = generic;
    r.upper = 1.0;
    // y is strictly decreasing with y(2) = 1/2
    if (beta == 2.0) {
        r.lower = r.upper = 0.5;
    } else if (beta > 2.0) {
        r.upper = 0.5;
    } else {
        r.lower = std::max(r.lower, 0.5);
    }
    for (auto const& c : certs) {
        if (c.beta < beta) continue;
        if (!verify_certificate(c).valid) continue;
        if (c.t > r.lower) {
            r.lower = c.t;
            r.method = BoundMethod::Certificate;
        }
    }
    return r;
}

/// True if the certificate proves tilde lambda_b < lambda0.
inline bool certifies_upper_bound(LambdaCertificate const& lc)
{
    if (!(lc.lambda0 > 1.0 / lc.b && lc.lambda0 < 1.0)) return false;
    if (lc.cert.beta < beta_of(lc.b, lc.lambda0)) return false;
    if (!verify_certificate(lc.cert).valid) return false;
    return lc.cert.t >= 1.0 / (lc.b * lc.lambda0);
}

struct TildeLambdaResult {
    int b = 2;
    /// tilde lambda_b lies in [lo, hi).
    double lo = 0.0;
    double hi = 1.0;
    /// How hi was obtained.
    BoundMethod method = BoundMethod::GenericBound;
    std::optional<LambdaCertificate> certificate;
};

/**
 * Locates tilde lambda_b. The function lambda -> y(beta(lambda)) - 1/(b lambda)
 * is strictly increasing, so any lambda where it is positive is an upper bound
 * and any lambda where it is negative is a lower bound.
 *
 * When beta >= 3 + sqrt(8) holds at both ends of the bracket of the tilde h_b
 * zero, the closed form for y makes the equation equivalent to tilde h_b = 0
 * and the bracket is returned. Otherwise the upper bound is the best of the
 * tilde h_b zero (from y >= 1/(1+sqrt beta)) and the given certificates.
 */
inline TildeLambdaResult solve_tilde_lambda_b(int b, double tol = kDefaultRootTol,
                                              std::vector<LambdaCertificate> const& certs = {})
{
    if (b < 2) throw DomainError("base b must be an integer >= 2");
    TildeLambdaResult r;
    r.b = b;
    r.lo = 1.0 / b;
    r.hi = 1.0;
    double const start = detail::just_above(1.0 / b);
    auto beta_at = [b](double l) { return beta_of(b, l); };

    std::optional<RootBracket> zero;
    if (tilde_h(b, 1.0) < 0.0)
        zero = detail::bisect([b](double l) { return tilde_h(b, l); }, start, 1.0, tol);

    if (zero && beta_at(zero->lo) >= kClosedFormBeta && beta_at(zero->hi) >= kClosedFormBeta) {
        r.lo = zero->lo;
        r.hi = zero->hi;
        r.method = BoundMethod::ClosedForm;
        return r;
    }
    if (zero) {
        r.hi = zero->hi;
        r.method = BoundMethod::GenericBound;
    }
    for (auto const& lc : certs) {
        if (lc.b != b || !certifies_upper_bound(lc)) continue;
        if (lc.lambda0 < r.hi) {
            r.hi = lc.lambda0;
            r.method = BoundMethod::Certificate;
            r.certificate = lc;
        }
    }

    // lower bounds: beta >= 2 and b lambda <= 2 give y <= 1/2 <= 1/(b lambda)
    auto level_set_lo = [&](double level) -> std::optional<double> {
        if (beta_at(start) < level) return std::nullopt;
        if (beta_at(1.0) >= level) return 1.0;
        return detail::bisect([&](double l) { return beta_at(l) - level; }, start, 1.0, tol).lo;
    };
    if (auto l2 = level_set_lo(2.0)) r.lo = std::max(r.lo, std::min(*l2, 2.0 / b));
    // closed-form regime with tilde h_b > 0 gives y = 1/(1+sqrt beta) < 1/(b lambda)
    if (auto lc = level_set_lo(kClosedFormBeta)) {
        double cand = *lc;
        if (zero) cand = std::min(cand, zero->lo);
        if (tilde_h(b, cand) > 0.0) r.lo = std::max(r.lo, cand);
    }
    return r;
}

/// The three certificates quoted for b = 2, 3, 4.
inline std::vector<LambdaCertificate> known_certificates()
{
    return {
        {2, 0.81, {beta_of(2, 0.81), 4, 0.81, 0.62}},
        {3, 0.55, {beta_of(3, 0.55), 4, 1.43398, 0.6061}},
        {4, 0.44, {beta_of(4, 0.44), 3, -0.298, 0.569}},
    };
}

}  // namespace weierdim
