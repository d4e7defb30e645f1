#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "weierdim/phase.hpp"
#include "weierdim/types.hpp"

// Evaluation of the lacunary series
//   f(x)   = sum_{n>=0} lambda^n phi(b^n x + theta_n)
//   Y(x,i) = 2 pi sum_{n>=1} gamma^n sin(2 pi theta_n(x,i))
//   S(x,i) = sum_{n>=1} gamma^(n-1) psi(theta_n(x,i))
// where theta_n(x,i) = x/b^n + i_1/b^n + ... + i_n/b, together with their
// derivatives. Every value carries an absolute bound on the omitted tail and
// the truncation depth is the smallest one meeting the requested tolerance.
namespace weierdim {

namespace detail {

inline double frac(double t) { return t - std::floor(t); }

inline void check_tol(double abs_tol)
{
    if (!(abs_tol > 0.0)) throw DomainError("abs_tol must be positive");
}

inline void check_x(double x)
{
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x must lie in [0, 1]");
}

inline void check_word(Params const& p, DigitWord const& w)
{
    if (w.base() != p.b()) throw DomainError("digit word base does not match b");
}

/// Smallest N >= first with tail(N) <= tol; tail must be nonincreasing in N.
template <typename Tail>
int terms_for(Tail&& tail, double tol, int first = 0, int cap = 100000)
{
    int n = first;
    while (tail(n) > tol) {
        if (++n > cap) throw DomainError("series tolerance unreachable within term cap");
    }
    return n;
}

/// Smallest N >= 0 with scale * r^N <= tol, for 0 <= r < 1.
inline int geometric_terms(double scale, double r, double tol)
{
    if (scale <= tol) return 0;
    int guess = static_cast<int>(std::ceil(std::log(tol / scale) / std::log(r)));
    guess = std::max(guess - 2, 0);
    return terms_for([&](int n) { return scale * std::pow(r, n); }, tol, guess);
}

/// Calls fn(n, theta_n) for n = 1..terms using theta_n = (theta_{n-1} + i_n) / b.
template <typename Fn>
void for_each_theta(int b, DigitWord const& w, double x, int terms, Fn&& fn)
{
    double t = x;
    double const inv_b = 1.0 / b;
    for (int n = 1; n <= terms; ++n) {
        t = (t + static_cast<double>(w.digit(static_cast<std::uint64_t>(n)))) * inv_b;
        fn(n, t);
    }
}

/// Oscillating part of a trigonometric polynomial at t (constant excluded).
inline double trig_part(PhiSpec const& phi, double t)
{
    double s = 0.0;
    for (auto const& term : phi.cosine) s += term.amplitude * std::cos(kTwoPi * frac(term.frequency * t));
    for (auto const& term : phi.sine) s += term.amplitude * std::sin(kTwoPi * frac(term.frequency * t));
    return s;
}

}  // namespace detail

/// v_k(x) = x/b^n + k_1/b^n + ... + k_n/b for a finite word k of length n.
inline double cylinder_map(int b, std::span<std::uint32_t const> k, double x)
{
    double t = x;
    for (std::uint32_t d : k) t = (t + static_cast<double>(d)) / b;
    return t;
}

inline double eval_phi(PhiSpec const& phi, double x) { return phi.constant + detail::trig_part(phi, x); }

inline double eval_phi_prime(PhiSpec const& phi, double x) { return eval_phi(phi.derivative(), x); }

/**
 * f(x) = sum_{n>=0} lambda^n phi(b^n x + theta_n) with the smallest N such that
 * sup|phi| lambda^N / (1 - lambda) <= abs_tol. Missing phases count as 0.
 *
 * Only 0 < lambda < 1 is needed for convergence, so this overload accepts the
 * closed-interval edge lambda = 1/b as well.
 */
inline SeriesValue eval_f(int b, double lambda, PhiSpec const& phi, double x,
                          std::span<double const> phases, double abs_tol)
{
    detail::check_tol(abs_tol);
    if (b < 2) throw DomainError("base b must be an integer >= 2");
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
    phi.validate();
    double const sup = phi.sup_bound();
    int const N = detail::geometric_terms(sup / (1.0 - lambda), lambda, abs_tol);

    FractionalOrbit orbit(x, b);
    double sum = 0.0;
    double weight = 1.0;
    for (int n = 0; n < N; ++n) {
        double t = orbit.value();
        if (static_cast<std::size_t>(n) < phases.size()) t += phases[static_cast<std::size_t>(n)];
        sum += weight * eval_phi(phi, t);
        weight *= lambda;
        orbit.advance();
    }
    return {sum, sup * std::pow(lambda, N) / (1.0 - lambda), N};
}

inline SeriesValue eval_f(Params const& p, PhiSpec const& phi, double x,
                          std::span<double const> phases, double abs_tol)
{
    return eval_f(p.b(), p.lambda(), phi, x, phases, abs_tol);
}

inline SeriesValue eval_f(Params const& p, PhiSpec const& phi, double x, double abs_tol)
{
    return eval_f(p.b(), p.lambda(), phi, x, {}, abs_tol);
}

/// Y with a fixed number of terms; tail_bound = 2 pi gamma^(N+1) / (1 - gamma).
inline SeriesValue partial_Y(Params const& p, DigitWord const& word, double x, int terms)
{
    double const g = p.gamma();
    double sum = 0.0;
    double weight = 1.0;
    detail::for_each_theta(p.b(), word, x, terms, [&](int, double t) {
        weight *= g;
        sum += weight * std::sin(kTwoPi * t);
    });
    return {kTwoPi * sum, kTwoPi * std::pow(g, terms + 1) / (1.0 - g), terms};
}

/**
 * Y_{x,gamma}(i) = 2 pi sum_{n>=1} gamma^n sin(2 pi theta_n). The vector
 * (1, Y) spans the strong stable direction at x for the word i.
 */
inline SeriesValue eval_Y(Params const& p, DigitWord const& word, double x, double abs_tol)
{
    detail::check_tol(abs_tol);
    detail::check_x(x);
    detail::check_word(p, word);
    double const g = p.gamma();
    int const N = detail::geometric_terms(kTwoPi * g / (1.0 - g), g, abs_tol);
    return partial_Y(p, word, x, N);
}

/// d/dx Y = 4 pi^2 sum (gamma/b)^n cos(2 pi theta_n).
inline SeriesValue eval_Y_dx(Params const& p, DigitWord const& word, double x, double abs_tol)
{
    detail::check_tol(abs_tol);
    detail::check_x(x);
    detail::check_word(p, word);
    double const r = p.gamma() / p.b();
    double const scale = 4.0 * kPi * kPi;
    int const N = detail::geometric_terms(scale * r / (1.0 - r), r, abs_tol);
    double sum = 0.0;
    double weight = 1.0;
    detail::for_each_theta(p.b(), word, x, N, [&](int, double t) {
        weight *= r;
        sum += weight * std::cos(kTwoPi * t);
    });
    return {scale * sum, scale * std::pow(r, N + 1) / (1.0 - r), N};
}

/// Tail 2 pi sum_{n>N} n gamma^(n-1) in closed form.
inline double Y_dgamma_tail(double g, int N)
{
    double const gn = std::pow(g, N);
    return kTwoPi * ((N + 1) * gn * (1.0 - g) + gn * g) / ((1.0 - g) * (1.0 - g));
}

/// d/dgamma Y = 2 pi sum n gamma^(n-1) sin(2 pi theta_n).
inline SeriesValue eval_Y_dgamma(Params const& p, DigitWord const& word, double x, double abs_tol)
{
    detail::check_tol(abs_tol);
    detail::check_x(x);
    detail::check_word(p, word);
    double const g = p.gamma();
    // the tail is decreasing in N, the first estimate only seeds the search
    int const N = detail::terms_for([&](int n) { return Y_dgamma_tail(g, n); }, abs_tol);
    double sum = 0.0;
    double weight = 1.0;  // gamma^(n-1)
    detail::for_each_theta(p.b(), word, x, N, [&](int n, double t) {
        sum += n * weight * std::sin(kTwoPi * t);
        weight *= g;
    });
    return {kTwoPi * sum, Y_dgamma_tail(g, N), N};
}

/**
 * S(x,i) = sum_{n>=1} gamma^(n-1) psi(theta_n). The constant part of psi
 * contributes exactly psi_0 / (1 - gamma); only the oscillating part is
 * truncated. For psi = phi' with phi = cos(2 pi x), Y = -gamma S.
 */
inline SeriesValue eval_S(Params const& p, PhiSpec const& psi, DigitWord const& word, double x,
                          double abs_tol)
{
    detail::check_tol(abs_tol);
    detail::check_x(x);
    detail::check_word(p, word);
    psi.validate();
    double const g = p.gamma();
    double const sup = psi.oscillating_sup_bound();
    int const N = detail::geometric_terms(sup / (1.0 - g), g, abs_tol);
    double sum = 0.0;
    double weight = 1.0;
    detail::for_each_theta(p.b(), word, x, N, [&](int, double t) {
        sum += weight * detail::trig_part(psi, t);
        weight *= g;
    });
    return {sum + psi.constant / (1.0 - g), sup * std::pow(g, N) / (1.0 - g), N};
}

/// S with a fixed number of terms, constant part summed exactly.
inline SeriesValue partial_S(Params const& p, PhiSpec const& psi, DigitWord const& word, double x,
                             int terms)
{
    double const g = p.gamma();
    double sum = 0.0;
    double weight = 1.0;
    detail::for_each_theta(p.b(), word, x, terms, [&](int, double t) {
        sum += weight * detail::trig_part(psi, t);
        weight *= g;
    });
    return {sum + psi.constant / (1.0 - g), psi.oscillating_sup_bound() * std::pow(g, terms) / (1.0 - g),
            terms};
}

/// d/dx S with a fixed number of terms.
inline SeriesValue partial_S_dx(Params const& p, PhiSpec const& psi, DigitWord const& word, double x,
                                int terms)
{
    double const g = p.gamma();
    double const b = p.b();
    PhiSpec const dpsi = psi.derivative();
    double sum = 0.0;
    double weight = 1.0 / b;
    detail::for_each_theta(p.b(), word, x, terms, [&](int, double t) {
        sum += weight * detail::trig_part(dpsi, t);
        weight *= g / b;
    });
    return {sum, dpsi.sup_bound() * std::pow(g / b, terms) / (b - g), terms};
}

/// d/dx S = sum gamma^(n-1) psi'(theta_n) / b^n.
inline SeriesValue eval_S_dx(Params const& p, PhiSpec const& psi, DigitWord const& word, double x,
                             double abs_tol)
{
    detail::check_tol(abs_tol);
    detail::check_x(x);
    detail::check_word(p, word);
    psi.validate();
    double const g = p.gamma();
    double const b = p.b();
    PhiSpec const dpsi = psi.derivative();
    double const sup = dpsi.sup_bound();
    // sum_{n>N} gamma^(n-1) b^-n = (gamma/b)^N / (b - gamma)
    int const N = detail::geometric_terms(sup / (b - g), g / b, abs_tol);
    double sum = 0.0;
    double weight = 1.0 / b;
    detail::for_each_theta(p.b(), word, x, N, [&](int, double t) {
        sum += weight * detail::trig_part(dpsi, t);
        weight *= g / b;
    });
    return {sum, sup * std::pow(g / b, N) / (b - g), N};
}

}  // namespace weierdim
