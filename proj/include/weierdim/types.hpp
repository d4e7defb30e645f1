#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "weierdim/rng.hpp"

namespace weierdim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Thrown when a requested computation would exceed its work budget.
class BudgetExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/**
 * The pair (b, lambda) with its derived quantities gamma = 1/(b lambda) and
 * D = 2 + log(lambda)/log(b).
 *
 * Construction enforces 1/b < lambda < 1, which is equivalent to
 * 1/b < gamma < 1 and 1 < D < 2.
 */
class Params {
  public:
    Params(int base, double lambda) : b_(base), lambda_(lambda)
    {
        if (base < 2) throw DomainError("base b must be an integer >= 2");
        if (!(lambda > 1.0 / base && lambda < 1.0))
            throw DomainError("lambda must lie in (1/b, 1), got " + std::to_string(lambda));
        gamma_ = 1.0 / (base * lambda);
        D_ = 2.0 + std::log(lambda) / std::log(static_cast<double>(base));
    }

    /// Builds the parameters from gamma instead of lambda. gamma is stored verbatim.
    static Params from_gamma(int base, double gamma)
    {
        if (base < 2) throw DomainError("base b must be an integer >= 2");
        if (!(gamma > 1.0 / base && gamma < 1.0))
            throw DomainError("gamma must lie in (1/b, 1), got " + std::to_string(gamma));
        Params p(base, 1.0 / (base * gamma));
        p.gamma_ = gamma;
        return p;
    }

    int b() const { return b_; }
    double lambda() const { return lambda_; }
    double gamma() const { return gamma_; }
    double D() const { return D_; }

  private:
    int b_;
    double lambda_;
    double gamma_ = 0.0;
    double D_ = 0.0;
};

/// One term a * cos(2 pi k x) or a * sin(2 pi k x).
struct TrigTerm {
    int frequency = 1;
    double amplitude = 0.0;
};

/**
 * A Z-periodic trigonometric polynomial
 *   constant + sum a_k cos(2 pi k x) + sum c_k sin(2 pi k x).
 * Frequencies are integers >= 1, so periodicity is automatic.
 */
struct PhiSpec {
    std::vector<TrigTerm> cosine;
    std::vector<TrigTerm> sine;
    double constant = 0.0;

    /// cos(2 pi x), the classical Weierstrass choice.
    static PhiSpec weierstrass() { return PhiSpec{{{1, 1.0}}, {}, 0.0}; }

    static PhiSpec constant_fn(double c) { return PhiSpec{{}, {}, c}; }

    static PhiSpec zero() { return PhiSpec{}; }

    /// Exact term-wise derivative.
    PhiSpec derivative() const
    {
        PhiSpec d;
        for (auto const& t : cosine)
            d.sine.push_back({t.frequency, -kTwoPi * t.frequency * t.amplitude});
        for (auto const& t : sine)
            d.cosine.push_back({t.frequency, kTwoPi * t.frequency * t.amplitude});
        return d;
    }

    PhiSpec plus_constant(double c) const
    {
        PhiSpec r = *this;
        r.constant += c;
        return r;
    }

    /// Upper bound on sup |phi - constant| (sum of absolute amplitudes).
    double oscillating_sup_bound() const
    {
        double s = 0.0;
        for (auto const& t : cosine) s += std::abs(t.amplitude);
        for (auto const& t : sine) s += std::abs(t.amplitude);
        return s;
    }

    /// Upper bound on sup |phi|.
    double sup_bound() const { return std::abs(constant) + oscillating_sup_bound(); }

    void validate() const
    {
        for (auto const& t : cosine)
            if (t.frequency < 1) throw DomainError("PhiSpec frequencies must be >= 1");
        for (auto const& t : sine)
            if (t.frequency < 1) throw DomainError("PhiSpec frequencies must be >= 1");
    }
};

/// Digits beyond the explicit prefix are all 0 (the sequence 0 = (0,0,...)).
struct AllZeroTail {};

/// Digits beyond the prefix are drawn from the counter-based generator keyed by
/// `key`. `offset` shifts the counter, so that shifting a word stays consistent.
struct RandomTail {
    std::uint64_t key = 0;
    std::uint64_t offset = 0;
};

using TailPolicy = std::variant<AllZeroTail, RandomTail>;

inline std::uint32_t random_digit(RandomTail const& tail, std::uint64_t index, int base)
{
    return rng::uniform_below(rng::hash(tail.key, tail.offset + index), static_cast<std::uint32_t>(base));
}

/**
 * An infinite word over {0, ..., b-1}: an explicit finite prefix followed by a
 * tail policy. Digits are indexed from 1 as i_1, i_2, ...
 */
class DigitWord {
  public:
    DigitWord() = default;

    DigitWord(int base, std::vector<std::uint32_t> digits, TailPolicy tail = AllZeroTail{})
        : base_(base), digits_(std::move(digits)), tail_(tail)
    {
        if (base < 2) throw DomainError("digit base must be >= 2");
        for (auto d : digits_)
            if (d >= static_cast<std::uint32_t>(base))
                throw DomainError("digit " + std::to_string(d) + " is not below base " +
                                  std::to_string(base));
    }

    static DigitWord zeros(int base) { return DigitWord(base, {}); }

    static DigitWord random(int base, std::uint64_t key)
    {
        return DigitWord(base, {}, RandomTail{key, 0});
    }

    int base() const { return base_; }
    std::vector<std::uint32_t> const& prefix() const { return digits_; }
    TailPolicy const& tail() const { return tail_; }
    bool has_zero_tail() const { return std::holds_alternative<AllZeroTail>(tail_); }

    /// The digit i_n, n >= 1.
    std::uint32_t digit(std::uint64_t n) const
    {
        if (n == 0) throw std::out_of_range("digits are indexed from 1");
        if (n <= digits_.size()) return digits_[n - 1];
        if (auto const* r = std::get_if<RandomTail>(&tail_)) return random_digit(*r, n, base_);
        return 0;
    }

    /// The left shift sigma^n applied to this word.
    DigitWord shifted(std::size_t n) const
    {
        std::vector<std::uint32_t> rest;
        if (n < digits_.size()) rest.assign(digits_.begin() + n, digits_.end());
        TailPolicy t = tail_;
        if (auto* r = std::get_if<RandomTail>(&t)) r->offset += n;
        return DigitWord(base_, std::move(rest), t);
    }

    /// Materializes the first n digits (including tail digits) as an explicit prefix.
    DigitWord materialized(std::size_t n) const
    {
        std::vector<std::uint32_t> d(n);
        for (std::size_t k = 0; k < n; ++k) d[k] = digit(k + 1);
        // the tail generator is indexed absolutely, so the infinite word is unchanged
        return DigitWord(base_, std::move(d), tail_);
    }

    std::string to_string() const
    {
        std::string s;
        for (std::size_t k = 0; k < digits_.size(); ++k) {
            if (base_ > 10 && k > 0) s += ',';
            s += std::to_string(digits_[k]);
        }
        s += has_zero_tail() ? "(0...)" : "(rnd...)";
        return s;
    }

  private:
    int base_ = 2;
    std::vector<std::uint32_t> digits_;
    TailPolicy tail_;
};

/// A series value with an absolute bound on the omitted remainder.
struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
    int terms_used = 0;
};

}  // namespace weierdim
