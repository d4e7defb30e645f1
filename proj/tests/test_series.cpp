#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "weierdim/phase.hpp"
#include "weierdim/series.hpp"

using namespace weierdim;
using Catch::Matchers::WithinAbs;

namespace {

oracle::Digits digits_of(DigitWord const& w)
{
    return [w](int n) { return w.digit(static_cast<std::uint64_t>(n)); };
}

DigitWord periodic(int b, std::vector<std::uint32_t> const& period, std::size_t len)
{
    std::vector<std::uint32_t> d(len);
    for (std::size_t k = 0; k < len; ++k) d[k] = period[k % period.size()];
    return DigitWord(b, d);
}

}  // namespace

TEST_CASE("Params derives gamma and D and rejects out-of-range lambda")
{
    Params const p(2, 0.9);
    CHECK_THAT(p.gamma() * p.b() * p.lambda(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(p.D(), WithinAbs(2.0 + std::log(0.9) / std::log(2.0), 1e-15));
    CHECK(p.gamma() > 0.5);
    CHECK(p.gamma() < 1.0);
    CHECK_THROWS_AS(Params(2, 0.5), DomainError);
    CHECK_THROWS_AS(Params(2, 1.0), DomainError);
    CHECK_THROWS_AS(Params(1, 0.9), DomainError);
    CHECK_THROWS_AS(Params::from_gamma(3, 0.3), DomainError);
    CHECK(Params::from_gamma(3, 0.45).gamma() == 0.45);

    oracle::Gen gen(1);
    for (int k = 0; k < 200; ++k) {
        int const b = gen.integer(2, 20);
        Params const q(b, gen.uniform(1.0 / b + 1e-9, 1.0 - 1e-9));
        CHECK(q.D() > 1.0);
        CHECK(q.D() < 2.0);
        CHECK(q.gamma() > 1.0 / b);
        CHECK(q.gamma() < 1.0);
    }
}

TEST_CASE("eval_phi and its derivative")
{
    PhiSpec const w = PhiSpec::weierstrass();
    CHECK(eval_phi(w, 0.0) == 1.0);
    CHECK_THAT(eval_phi(w, 0.25), WithinAbs(0.0, 1e-15));
    CHECK_THAT(eval_phi_prime(w, 0.25), WithinAbs(-kTwoPi, 1e-12));

    PhiSpec const mixed{{{1, 0.5}, {3, -1.25}}, {{2, 2.0}}, 0.75};
    oracle::Gen gen(2);
    for (int k = 0; k < 100; ++k) {
        double const x = gen.uniform(-3.0, 3.0);
        CHECK_THAT(eval_phi(mixed, x + 1.0), WithinAbs(eval_phi(mixed, x), 1e-12));
        double const h = 1e-6;
        double const fd = (eval_phi(mixed, x + h) - eval_phi(mixed, x - h)) / (2 * h);
        CHECK_THAT(eval_phi_prime(mixed, x), WithinAbs(fd, 1e-5));
    }
    CHECK_THROWS_AS(PhiSpec({{0, 1.0}}, {}, 0.0).validate(), DomainError);
}

TEST_CASE("FractionalOrbit tracks b^n x mod 1 exactly")
{
    oracle::Gen gen(3);
    for (int k = 0; k < 40; ++k) {
        int const b = gen.integer(2, 12);
        double const x = gen.uniform(0.0, 1.0);
        FractionalOrbit orbit(x, b);
        for (int n = 0; n <= 300; ++n) {
            if (n % 37 == 0) CHECK_THAT(orbit.value(), WithinAbs(static_cast<double>(oracle::frac_power(b, x, n)), 1e-15));
            orbit.advance();
        }
    }
}

TEST_CASE("eval_f on the classical series")
{
    PhiSpec const w = PhiSpec::weierstrass();
    auto const a = eval_f(2, 0.5, w, 0.0, {}, 1e-12);
    CHECK_THAT(a.value, WithinAbs(2.0, a.tail_bound + 1e-14));
    auto const c = eval_f(2, 0.5, w, 0.5, {}, 1e-12);
    CHECK_THAT(c.value, WithinAbs(0.0, c.tail_bound + 1e-14));

    Params const p(3, 0.7);
    auto const v = eval_f(p, w, 0.31, 1e-12);
    double const ref = static_cast<double>(oracle::weierstrass(3, 0.7L, 0.31, 200));
    CHECK_THAT(v.value, WithinAbs(ref, 1e-10));
    CHECK(v.tail_bound <= 1e-12);
    // minimal N: one term fewer misses the tolerance
    CHECK(std::pow(0.7, v.terms_used - 1) / 0.3 > 1e-12);

    CHECK_THROWS_AS(eval_f(p, w, 0.3, 0.0), DomainError);
    CHECK_THROWS_AS(eval_f(p, w, 0.3, -1.0), DomainError);
}

TEST_CASE("eval_f applies phases and treats missing ones as zero")
{
    Params const p(2, 0.8);
    std::vector<double> const phases{0.25};
    auto const shifted = eval_f(p, PhiSpec::weierstrass(), 0.0, phases, 1e-12);
    // first term cos(pi/2) = 0, the rest are cos(0) = 1
    CHECK_THAT(shifted.value, WithinAbs(0.8 / 0.2, 1e-10));
}

TEST_CASE("eval_Y examples")
{
    Params const p2(2, 0.9);
    auto const z = eval_Y(p2, DigitWord::zeros(2), 0.0, 1e-12);
    CHECK(z.value == 0.0);

    Params const p = Params::from_gamma(2, 0.6);
    DigitWord const w(2, {1});
    auto const v = eval_Y(p, w, 0.0, 1e-13);
    double const ref = static_cast<double>(oracle::Y(2, 0.6L, digits_of(w), 0.0L, 150));
    CHECK_THAT(v.value, WithinAbs(ref, 1e-10));
    CHECK(v.tail_bound <= 1e-13);
    CHECK_THAT(v.tail_bound, WithinAbs(kTwoPi * std::pow(0.6, v.terms_used + 1) / 0.4, 1e-25));

    CHECK_THROWS_AS(eval_Y(p, w, 0.5, 0.0), DomainError);
    CHECK_THROWS_AS(eval_Y(p, w, 1.5, 1e-9), DomainError);
    CHECK_THROWS_AS(eval_Y(p, DigitWord::zeros(3), 0.5, 1e-9), DomainError);
}

TEST_CASE("eval_Y averages to zero over uniform words")
{
    Params const p(2, 0.95);
    std::size_t const n = 100000;
    double sum = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double const y = eval_Y(p, DigitWord::random(2, 1000 + k), 0.3, 1e-10).value;
        sum += y;
        sq += y * y;
    }
    double const mean = sum / n;
    double const se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean) < 4.0 * se);
}

TEST_CASE("eval_Y_dx examples")
{
    Params const p(3, 0.5);
    double const r = p.gamma() / 3.0;
    auto const z = eval_Y_dx(p, DigitWord::zeros(3), 0.0, 1e-13);
    CHECK_THAT(z.value, WithinAbs(4 * kPi * kPi * r / (1 - r), z.tail_bound + 1e-13));

    Params const q = Params::from_gamma(2, 0.7);
    DigitWord const w = periodic(2, {1, 0}, 200);
    double const h = 1e-6;
    double const fd = (eval_Y(q, w, 0.3 + h, 1e-14).value - eval_Y(q, w, 0.3 - h, 1e-14).value) / (2 * h);
    CHECK_THAT(eval_Y_dx(q, w, 0.3, 1e-13).value, WithinAbs(fd, 1e-5));

    Params const p3 = Params::from_gamma(3, 0.5);
    DigitWord const rnd = DigitWord::random(3, 7);
    double const ref = static_cast<double>(oracle::Y_dx(3, 0.5L, digits_of(rnd), 0.1L, 100));
    CHECK_THAT(eval_Y_dx(p3, rnd, 0.1, 1e-13).value, WithinAbs(ref, 1e-10));
}

TEST_CASE("eval_Y_dgamma examples")
{
    Params const p(2, 0.9);
    CHECK(eval_Y_dgamma(p, DigitWord::zeros(2), 0.0, 1e-12).value == 0.0);

    std::vector<std::uint32_t> d(200, 1);
    d[0] = 0;
    DigitWord const w011(2, d);
    double const h = 1e-6;
    double const g = 0.65;
    double const fd = (eval_Y(Params::from_gamma(2, g + h), w011, 0.4, 1e-14).value -
                       eval_Y(Params::from_gamma(2, g - h), w011, 0.4, 1e-14).value) /
                      (2 * h);
    CHECK_THAT(eval_Y_dgamma(Params::from_gamma(2, g), w011, 0.4, 1e-13).value, WithinAbs(fd, 1e-5));

    Params const p4 = Params::from_gamma(4, 0.3);
    DigitWord const rnd = DigitWord::random(4, 11);
    double const ref = static_cast<double>(oracle::Y_dgamma(4, 0.3L, digits_of(rnd), 0.2L, 100));
    CHECK_THAT(eval_Y_dgamma(p4, rnd, 0.2, 1e-13).value, WithinAbs(ref, 1e-10));
}

TEST_CASE("eval_S examples")
{
    Params const p(3, 0.6);
    auto const c = eval_S(p, PhiSpec::constant_fn(2.5), DigitWord::random(3, 5), 0.4, 1e-12);
    CHECK(c.value == 2.5 / (1.0 - p.gamma()));
    CHECK(c.tail_bound == 0.0);

    Params const q = Params::from_gamma(2, 0.55);
    PhiSpec const psi{{}, {{2, 1.0}}, 0.0};
    DigitWord const w(2, {1, 1});
    double const ref = static_cast<double>(oracle::S(
        2, 0.55L, [](long double t) { return std::sin(4 * oracle::kPiL * t); }, digits_of(w), 0.37L, 120));
    CHECK_THAT(eval_S(q, psi, w, 0.37, 1e-13).value, WithinAbs(ref, 1e-10));

    oracle::Gen gen(4);
    PhiSpec const dphi = PhiSpec::weierstrass().derivative();
    for (int k = 0; k < 20; ++k) {
        int const b = gen.integer(2, 6);
        Params const r(b, gen.uniform(1.0 / b + 0.01, 0.99));
        DigitWord const word = DigitWord::random(b, static_cast<std::uint64_t>(k));
        double const x = gen.uniform(0.0, 1.0);
        auto const y = eval_Y(r, word, x, 1e-12);
        auto const s = eval_S(r, dphi, word, x, 1e-12);
        CHECK_THAT(-r.gamma() * s.value, WithinAbs(y.value, y.tail_bound + r.gamma() * s.tail_bound + 1e-12));
    }
}

TEST_CASE("property: Y = -gamma S on random tuples")
{
    oracle::Gen gen(5);
    PhiSpec const dphi = PhiSpec::weierstrass().derivative();
    for (int k = 0; k < 200; ++k) {
        int const b = gen.integer(2, 10);
        Params const p(b, gen.uniform(1.0 / b + 1e-3, 0.999));
        DigitWord const w(b, gen.digits(b, gen.integer(0, 30)), RandomTail{static_cast<std::uint64_t>(k), 0});
        double const x = gen.uniform(0.0, 1.0);
        double const tol = 1e-11;
        auto const y = eval_Y(p, w, x, tol);
        auto const s = eval_S(p, dphi, w, x, tol);
        CHECK(std::abs(y.value + p.gamma() * s.value) <= y.tail_bound + p.gamma() * s.tail_bound + 1e-12);
    }
}

TEST_CASE("property: analytic derivatives match finite differences")
{
    oracle::Gen gen(6);
    for (int k = 0; k < 100; ++k) {
        int const b = gen.integer(2, 8);
        double const g = gen.uniform(1.0 / b + 0.01, 0.9);
        DigitWord const w = DigitWord(b, {}, RandomTail{static_cast<std::uint64_t>(k) + 77, 0}).materialized(400);
        double const x = gen.uniform(0.01, 0.99);
        double const h = 1e-6;
        Params const p = Params::from_gamma(b, g);
        // |Y_xxx| <= 8 pi^4 sum (gamma/b^3)^n
        double const third = 8 * std::pow(kPi, 4) * (g / (b * b * b)) / (1 - g / (b * b * b));
        double const fdx = (eval_Y(p, w, x + h, 1e-14).value - eval_Y(p, w, x - h, 1e-14).value) / (2 * h);
        CHECK(std::abs(eval_Y_dx(p, w, x, 1e-13).value - fdx) <= 10 * h * h * third + 1e-7);
        double const fdg = (eval_Y(Params::from_gamma(b, g + h), w, x, 1e-14).value -
                            eval_Y(Params::from_gamma(b, g - h), w, x, 1e-14).value) /
                           (2 * h);
        CHECK(std::abs(eval_Y_dgamma(p, w, x, 1e-13).value - fdg) <= 1e-5);
    }
}

TEST_CASE("property: tail bounds are sound and shrink with N")
{
    oracle::Gen gen(7);
    for (int k = 0; k < 100; ++k) {
        int const b = gen.integer(2, 9);
        Params const p(b, gen.uniform(1.0 / b + 1e-3, 0.999));
        DigitWord const w(b, {}, RandomTail{static_cast<std::uint64_t>(k), 0});
        double const x = gen.uniform(0.0, 1.0);
        int const n1 = gen.integer(1, 30);
        int const n2 = n1 + gen.integer(1, 200);
        auto const a = partial_Y(p, w, x, n1);
        auto const c = partial_Y(p, w, x, n2);
        CHECK(std::abs(a.value - c.value) <= a.tail_bound * (1 + 1e-12) + 1e-13);
        CHECK(c.tail_bound < a.tail_bound);

        PhiSpec const psi{{{1, 1.0}}, {{3, -0.5}}, 0.2};
        auto const s1 = partial_S(p, psi, w, x, n1);
        auto const s2 = partial_S(p, psi, w, x, n2);
        CHECK(std::abs(s1.value - s2.value) <= s1.tail_bound * (1 + 1e-12) + 1e-13);
        auto const d1 = partial_S_dx(p, psi, w, x, n1);
        auto const d2 = partial_S_dx(p, psi, w, x, n2);
        CHECK(std::abs(d1.value - d2.value) <= d1.tail_bound * (1 + 1e-12) + 1e-13);
    }
}

TEST_CASE("property: digit-shift identity for Y")
{
    oracle::Gen gen(8);
    for (int k = 0; k < 200; ++k) {
        int const b = gen.integer(2, 10);
        Params const p(b, gen.uniform(1.0 / b + 1e-3, 0.999));
        DigitWord const w(b, gen.digits(b, 5), RandomTail{static_cast<std::uint64_t>(k), 0});
        double const x = gen.uniform(0.0, 1.0);
        double const g = p.gamma();
        double const i1 = w.digit(1);
        double const lhs = eval_Y(p, w, x, 1e-14).value;
        double const rhs = kTwoPi * g * std::sin(kTwoPi * (x + i1) / b) + g * eval_Y(p, w.shifted(1), (x + i1) / b, 1e-14).value;
        CHECK_THAT(lhs, WithinAbs(rhs, 1e-12));
    }
}

TEST_CASE("DigitWord digits, shifts and validation")
{
    DigitWord const w(3, {2, 0, 1});
    CHECK(w.digit(1) == 2);
    CHECK(w.digit(3) == 1);
    CHECK(w.digit(4) == 0);
    CHECK(w.digit(1000) == 0);
    CHECK_THROWS_AS(DigitWord(3, {3}), DomainError);
    CHECK_THROWS(w.digit(0));

    DigitWord const r = DigitWord::random(5, 9);
    DigitWord const s = r.shifted(7);
    for (std::uint64_t n = 1; n < 50; ++n) {
        CHECK(r.digit(n) < 5);
        CHECK(s.digit(n) == r.digit(n + 7));
    }
    DigitWord const m = r.materialized(10);
    for (std::uint64_t n = 1; n < 50; ++n) CHECK(m.digit(n) == r.digit(n));
}
