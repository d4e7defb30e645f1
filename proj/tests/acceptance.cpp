// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "weierdim/weierdim.hpp"

using namespace weierdim;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, std::string const& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
        }
    }
    void note(std::string const& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string num(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

Outcome sign_facts()
{
    Outcome o;
    o.require(h(2, 0.9352) < 0, "h_2(0.9352) < 0");
    o.require(h(2, 0.9) > 0, "h_2(0.9) > 0");
    o.require(h(3, 0.7269) < 0, "h_3(0.7269) < 0");
    o.require(h(4, 0.6083) < 0, "h_4(0.6083) < 0");
    o.require(H(3, 1.0) < 0, "H_3(1) < 0");
    o.require(H(5, 0.5448) < 0, "H_5(0.5448) < 0");
    o.require(tilde_H(5, 1.04 / std::sqrt(5.0)) < 0, "tilde H_5(1.04/sqrt 5) < 0");
    if (o.pass) o.note("7 of 7 signs hold");
    return o;
}

Outcome threshold_brackets()
{
    Outcome o;
    auto const l2 = solve_lambda_b(2);
    o.require(l2.lo > 0.9 && l2.hi < 0.9352, "lambda_2 in (0.9, 0.9352)");
    for (int b = 5; b <= 20; ++b) o.require(solve_lambda_b(b).hi < 0.5448, "lambda_" + std::to_string(b) + " < 0.5448");
    double const big = solve_lambda_b(10000).mid();
    o.require(std::abs(big - 1.0 / kPi) < 0.01, "|lambda_1e4 - 1/pi| < 0.01");
    auto const t = solve_tilde_lambda_b(10000);
    double const scaled = 100.0 * 0.5 * (t.lo + t.hi);
    o.require(std::abs(scaled - 1.0 / std::sqrt(kPi)) < 0.02, "|100 tilde lambda_1e4 - 1/sqrt(pi)| < 0.02");
    o.note("lambda_2 = " + num(l2.mid()) + ", lambda_1e4 = " + num(big) + ", 100 tilde lambda_1e4 = " + num(scaled));
    return o;
}

Outcome certificates()
{
    Outcome o;
    auto const certs = known_certificates();
    for (auto const& lc : certs) {
        auto const r = verify_certificate(lc.cert);
        o.require(r.valid && r.margin > 1e-6, "certificate b=" + std::to_string(lc.b));
        auto const t = solve_tilde_lambda_b(lc.b, kDefaultRootTol, certs);
        o.require(t.hi == lc.lambda0 && t.method == BoundMethod::Certificate,
                  "tilde lambda_" + std::to_string(lc.b) + " <= " + num(lc.lambda0));
        o.note("b=" + std::to_string(lc.b) + " g=" + num(r.g_value));
    }
    return o;
}

Outcome series_identities()
{
    Outcome o;
    std::mt19937_64 eng(2024);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); };
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); };
    auto digits = [&](int b, int n) {
        std::vector<std::uint32_t> d(static_cast<std::size_t>(n));
        for (auto& v : d) v = static_cast<std::uint32_t>(pick(0, b - 1));
        return d;
    };
    PhiSpec const dphi = PhiSpec::weierstrass().derivative();

    double worst_ys = 0, worst_fd = 0, worst_scale = 0;
    for (int k = 0; k < 100; ++k) {
        int const b = pick(2, 10);
        Params const p(b, uni(1.0 / b + 1e-3, 0.999));
        DigitWord const w(b, digits(b, pick(0, 20)), RandomTail{static_cast<std::uint64_t>(k), 0});
        double const x = uni(0.0, 1.0);
        auto const y = eval_Y(p, w, x, 1e-11);
        auto const s = eval_S(p, dphi, w, x, 1e-11);
        double const gap = std::abs(y.value + p.gamma() * s.value);
        double const allowed = y.tail_bound + p.gamma() * s.tail_bound + 1e-12;
        worst_ys = std::max(worst_ys, gap / allowed);
        o.require(gap <= allowed, "Y = -gamma S at tuple " + std::to_string(k));
    }
    for (int k = 0; k < 100; ++k) {
        int const b = pick(2, 8);
        double const g = uni(1.0 / b + 0.01, 0.9);
        Params const p = Params::from_gamma(b, g);
        DigitWord const w = DigitWord(b, {}, RandomTail{static_cast<std::uint64_t>(k) + 500, 0}).materialized(400);
        double const x = uni(0.01, 0.99);
        double const step = 1e-6;
        double const fdx = (eval_Y(p, w, x + step, 1e-14).value - eval_Y(p, w, x - step, 1e-14).value) / (2 * step);
        double const fdg = (eval_Y(Params::from_gamma(b, g + step), w, x, 1e-14).value -
                            eval_Y(Params::from_gamma(b, g - step), w, x, 1e-14).value) /
                           (2 * step);
        double const ex = std::abs(eval_Y_dx(p, w, x, 1e-13).value - fdx);
        double const eg = std::abs(eval_Y_dgamma(p, w, x, 1e-13).value - fdg);
        worst_fd = std::max({worst_fd, ex, eg});
        o.require(ex <= 1e-5 && eg <= 1e-5, "finite differences at sample " + std::to_string(k));
    }
    for (int k = 0; k < 100; ++k) {
        int const b = pick(2, 8);
        Params const p(b, uni(1.0 / b + 1e-3, 0.99));
        int const n = pick(1, 6);
        auto const prefix = digits(b, n);
        auto di = prefix, dj = prefix;
        auto const ti = digits(b, 8), tj = digits(b, 8);
        di.insert(di.end(), ti.begin(), ti.end());
        dj.insert(dj.end(), tj.begin(), tj.end());
        DigitWord const wi(b, di, RandomTail{static_cast<std::uint64_t>(2 * k) + 1000, 0});
        DigitWord const wj(b, dj, RandomTail{static_cast<std::uint64_t>(2 * k) + 1001, 0});
        double const x = uni(0.0, 1.0);
        double const tol = 1e-13;
        double const lhs = std::abs(eval_Y(p, wi, x, tol).value - eval_Y(p, wj, x, tol).value);
        double const v = cylinder_map(b, prefix, x);
        auto const n_sz = static_cast<std::size_t>(n);
        double const rhs = std::pow(p.gamma(), n) *
                           std::abs(eval_Y(p, wi.shifted(n_sz), v, tol).value - eval_Y(p, wj.shifted(n_sz), v, tol).value);
        worst_scale = std::max(worst_scale, std::abs(lhs - rhs));
        o.require(std::abs(lhs - rhs) <= 4 * tol + 1e-12, "scale identity at sample " + std::to_string(k));
    }
    o.note("worst Y+gamma S / tail = " + num(worst_ys) + ", worst derivative error = " + num(worst_fd) +
           ", worst scale gap = " + num(worst_scale));
    return o;
}

Outcome transversality()
{
    Outcome o;
    int cells = 0;
    double smallest = 1e300;
    for (int b = 2; b <= 8; ++b) {
        double const lb = solve_lambda_b(b).hi;
        for (int k = 1; lb + 0.02 * k < 1.0; ++k) {
            double const lambda = lb + 0.02 * k;
            auto const e = empirical_delta(b, 1.0 / (b * lambda), DeltaSearch{});
            ++cells;
            smallest = std::min(smallest, e.delta_hat);
            o.require(e.delta_hat > 0.0, "delta_hat > 0 at b=" + std::to_string(b) + " lambda=" + num(lambda));
        }
    }
    o.note(std::to_string(cells) + " (b, lambda) cells, min delta_hat = " + num(smallest));

    for (int b = 2; b <= 4; ++b) {
        Params const p(b, solve_lambda_b(b).hi + 0.05);
        TangencyQuery q;
        q.grid_per_interval = 200;
        DeltaSearch cfg;
        cfg.x_grid = b * q.grid_per_interval + 1;
        auto const est = empirical_delta(b, p.gamma(), cfg);
        q.eps = q.delta = est.delta_hat / p.gamma();
        int const e = tsujii_e_estimate(p, q, 1);
        o.require(e == 1, "e(1,1) = 1 at b=" + std::to_string(b));
        o.require(e < p.gamma() * b, "e(1,1) < gamma b at b=" + std::to_string(b));
    }

    std::mt19937_64 eng(7);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        double const g = std::uniform_real_distribution<double>(0.5 + 1e-9, 1.0 - 1e-9)(eng);
        auto const c = case_bounds_b2(g);
        double const gap = std::abs(std::max({c[0], c[1], c[2], c[3]}) - h_gamma_form(2, g));
        worst = std::max(worst, gap);
        o.require(gap <= 1e-12, "max case bound = h_gamma_form at gamma=" + num(g));
    }
    o.note("case bound gap <= " + num(worst));
    return o;
}

Outcome dimension()
{
    Outcome o;
    int const levels = 14, spc = 64;
    double const w = fit_box_dimension(box_count(Params(2, 0.9), PhiSpec::weierstrass(), levels, spc)).slope;
    o.require(std::abs(w - 1.8480) < 0.1, "W_{0.9,2} slope within 0.1 of 1.8480");
    double const flat = fit_box_dimension(box_count(Params(2, 0.9), PhiSpec::zero(), levels, spc)).slope;
    o.require(std::abs(flat - 1.0) <= 1e-6, "flat slope = 1");
    std::string series;
    double prev = -1e300;
    for (double lambda : {0.8, 0.85, 0.9, 0.95}) {
        double const s = lambda == 0.9 ? w
                                       : fit_box_dimension(box_count(Params(2, lambda), PhiSpec::weierstrass(), levels, spc)).slope;
        o.require(s >= prev - 0.05, "slope monotone at lambda=" + num(lambda));
        prev = s;
        series += (series.empty() ? "" : ", ") + num(s);
    }
    o.note("W_{0.9,2} slope = " + num(w) + ", flat slope = " + num(flat) + ", slopes over lambda = [" + series + "]");
    return o;
}

Outcome measures()
{
    Outcome o;
    Params const p(2, 0.95);
    std::size_t const n = 100000;
    auto const s = sample_transversal(p, 0.3, n, default_depth(p), 1);
    double sum = 0, sq = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sum += s.at(k);
        sq += s.at(k) * s.at(k);
    }
    double const mean = sum / n;
    double const se = std::sqrt((sq / n - mean * mean) / n);
    o.require(std::abs(mean) <= 4 * se, "transversal mean within 4 sigma");

    std::mt19937_64 eng(11);
    std::vector<double> line(n);
    for (auto& v : line) v = std::uniform_real_distribution<double>(0.0, 1.0)(eng);
    std::vector<double> radii;
    for (int j = 0; j < 6; ++j) radii.push_back(0.02 * std::pow(0.5, j));
    double const uni = local_dim_estimate(synthetic_samples(line, 1), radii, 200, 1).slope;
    o.require(std::abs(uni - 1.0) <= 0.05, "uniform local dimension 1 +- 0.05");
    double const pt = local_dim_estimate(synthetic_samples(std::vector<double>(1000, 0.4), 1), radii, 50, 1).slope;
    o.require(std::abs(pt) <= 0.05, "point mass local dimension 0 +- 0.05");

    Params const q(3, 0.8);
    double const c = 0.75;
    auto const a = sample_sbr(q, PhiSpec::weierstrass(), 20000, 40, 5);
    auto const b = sample_sbr(q, PhiSpec::weierstrass().plus_constant(c), 20000, 40, 5);
    double const shift = c / (1 - q.gamma());
    double worst = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        o.require(a.at(k, 0) == b.at(k, 0), "SBR x coordinate unchanged");
        worst = std::max(worst, std::abs(b.at(k, 1) - a.at(k, 1) - shift));
    }
    // one rounding of the shift plus one of the sum
    o.require(worst <= 4 * std::numeric_limits<double>::epsilon() * (std::abs(shift) + 10.0), "SBR translation equivariance");
    o.note("mean = " + num(mean) + " (se " + num(se) + "), uniform dim = " + num(uni) + ", point dim = " + num(pt) +
           ", SBR shift error = " + num(worst));
    return o;
}

std::string capture(std::string const& cmd, int& status)
{
    std::string data;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        status = -1;
        return data;
    }
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) data.append(buf.data(), got);
    status = ::pclose(pipe);
    return data;
}

Outcome determinism()
{
    Outcome o;
    std::string const cli = std::string("'") + WEIERDIM_CLI_PATH + "' reproduce";
    int s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    std::string const first = capture(cli, s1);
    std::string const second = capture(cli, s2);
    std::string const one = capture("WEIERDIM_THREADS=1 " + cli, s3);
    std::string const eight = capture("WEIERDIM_THREADS=8 " + cli, s4);
    o.require(s1 == 0 && s2 == 0 && s3 == 0 && s4 == 0, "reproduce exits 0");
    o.require(!first.empty(), "reproduce writes output");
    o.require(first == second, "identical across runs");
    o.require(one == eight, "identical across WEIERDIM_THREADS 1 and 8");
    o.require(first == one, "identical with and without WEIERDIM_THREADS");
    o.note(std::to_string(first.size()) + " bytes compared");
    return o;
}

struct Criterion {
    int id;
    char const* name;
    double limit_s;
    std::function<Outcome()> fn;
};

}  // namespace

int main()
{
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    std::vector<Criterion> const all{
        {1, "sign facts", 1.0, sign_facts},
        {2, "threshold brackets", 1.0, threshold_brackets},
        {3, "certificates", 1.0, certificates},
        {4, "series identities", 10.0, series_identities},
        {5, "transversality", 120.0, transversality},
        {6, "dimension estimation", 180.0, dimension},
        {7, "measure diagnostics", 60.0, measures},
        {8, "determinism", 0.0, determinism},
    };
    int failed = 0;
    for (auto const& c : all) {
        auto const start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (std::exception const& e) {
            o.pass = false;
            o.note(std::string("exception: ") + e.what());
        }
        double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0 && secs > c.limit_s) o.require(false, "runtime " + num(secs) + " s over " + num(c.limit_s) + " s");
        if (!o.pass) ++failed;
        std::printf("[%s] %d %s (%.3f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
