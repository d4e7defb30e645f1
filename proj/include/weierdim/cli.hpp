#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weierdim/dimension.hpp"
#include "weierdim/measures.hpp"
#include "weierdim/series.hpp"
#include "weierdim/star.hpp"
#include "weierdim/thresholds.hpp"
#include "weierdim/transversality.hpp"
#include "weierdim/types.hpp"

// Command-line front end. Every subcommand builds a Report (its configuration,
// a result object and optionally a table) which is then written as JSON, CSV
// or plain text. No timings or environment details enter the output, so it is
// byte-identical across runs and worker counts.
namespace weierdim::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kClaimFailed = 1, kUsage = 2, kDomain = 3 };

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Json>> rows;
};

struct Report {
    std::string command;
    Json config = Json::object();
    Json result = Json::object();
    std::optional<Table> table;
    int exit_code = kOk;
};

namespace detail {

inline std::string cell(Json const& v)
{
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

inline void flatten(Json const& v, std::string const& prefix, std::vector<std::pair<std::string, std::string>>& out)
{
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else {
        out.emplace_back(prefix, cell(v));
    }
}

inline void write_json(Report const& r, std::ostream& os)
{
    Json doc = Json::object();
    doc["command"] = r.command;
    doc["config"] = r.config;
    doc["result"] = r.result;
    if (r.table) {
        Json rows = Json::array();
        for (auto const& row : r.table->rows) {
            Json obj = Json::object();
            for (std::size_t c = 0; c < row.size(); ++c) obj[r.table->header[c]] = row[c];
            rows.push_back(obj);
        }
        doc["rows"] = rows;
    }
    os << doc.dump(2) << '\n';
}

inline void write_header_comments(Report const& r, std::ostream& os)
{
    os << "# command=" << r.command << '\n';
    std::vector<std::pair<std::string, std::string>> cfg;
    flatten(r.config, "", cfg);
    for (auto const& [k, v] : cfg) os << "# " << k << '=' << v << '\n';
}

inline void write_csv(Report const& r, std::ostream& os)
{
    write_header_comments(r, os);
    if (r.table) {
        for (std::size_t c = 0; c < r.table->header.size(); ++c) os << (c ? "," : "") << r.table->header[c];
        os << '\n';
        for (auto const& row : r.table->rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell(row[c]);
            os << '\n';
        }
        return;
    }
    std::vector<std::pair<std::string, std::string>> res;
    flatten(r.result, "", res);
    os << "key,value\n";
    for (auto const& [k, v] : res) os << k << ',' << v << '\n';
}

inline void write_text(Report const& r, std::ostream& os)
{
    write_header_comments(r, os);
    std::vector<std::pair<std::string, std::string>> res;
    flatten(r.result, "", res);
    for (auto const& [k, v] : res) os << k << ": " << v << '\n';
    if (r.table) {
        std::vector<std::size_t> width(r.table->header.size());
        for (std::size_t c = 0; c < width.size(); ++c) width[c] = r.table->header[c].size();
        for (auto const& row : r.table->rows)
            for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], cell(row[c]).size());
        auto line = [&](auto const& get) {
            for (std::size_t c = 0; c < width.size(); ++c)
                os << (c ? "  " : "") << std::left << std::setw(static_cast<int>(width[c])) << get(c);
            os << '\n';
        };
        line([&](std::size_t c) { return r.table->header[c]; });
        for (auto const& row : r.table->rows) line([&](std::size_t c) { return cell(row[c]); });
    }
}

/// Parses "101" (one digit per character) or "1,0,12" (comma separated).
inline std::vector<std::uint32_t> parse_digits(std::string const& s)
{
    std::vector<std::uint32_t> d;
    if (s.empty()) return d;
    if (s.find(',') != std::string::npos) {
        std::stringstream ss(s);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
                throw DomainError("invalid digit '" + part + "' in word");
            d.push_back(static_cast<std::uint32_t>(std::stoul(part)));
        }
        return d;
    }
    for (char ch : s) {
        if (ch < '0' || ch > '9') throw DomainError(std::string("invalid digit '") + ch + "' in word");
        d.push_back(static_cast<std::uint32_t>(ch - '0'));
    }
    return d;
}

inline Json series_json(SeriesValue const& v)
{
    return Json{{"value", v.value}, {"tail_bound", v.tail_bound}, {"terms_used", v.terms_used}};
}

inline Json word_json(DigitWord const& w) { return w.to_string(); }

inline Json delta_json(DeltaEstimate const& e)
{
    return Json{{"delta_hat", e.delta_hat},
                {"argmin_x", e.argmin_x},
                {"argmin_gamma", e.argmin_gamma},
                {"argmin_first", word_json(e.argmin_pair.first)},
                {"argmin_second", word_json(e.argmin_pair.second)},
                {"tail_slack", e.tail_slack},
                {"best_observed", e.best_observed},
                {"pairs_examined", e.pairs_examined},
                {"budget_exhausted", e.budget_exhausted}};
}

inline PhiSpec phi_by_name(std::string const& name)
{
    if (name == "cos") return PhiSpec::weierstrass();
    if (name == "zero") return PhiSpec::zero();
    if (name == "sin") return PhiSpec{{}, {{1, 1.0}}, 0.0};
    if (name == "dcos") return PhiSpec::weierstrass().derivative();
    throw DomainError("unknown function '" + name + "' (use cos, sin, dcos or zero)");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// subcommands

struct EvalArgs {
    int b = 2;
    double lambda = 0.9;
    double x = 0.0;
    std::string word;
    std::string tail = "zero";
    std::uint64_t seed = 0;
    std::string what = "f";
    std::string phi = "cos";
    double c = 0.0;
    double tol = 1e-12;
};

inline Report cmd_eval(EvalArgs const& a)
{
    Report r;
    r.command = "eval";
    r.config = Json{{"b", a.b}, {"lambda", a.lambda}, {"x", a.x},       {"what", a.what}, {"word", a.word},
                    {"tail", a.tail}, {"seed", a.seed}, {"phi", a.phi}, {"c", a.c},       {"tol", a.tol}};
    if (a.what == "f") {
        PhiSpec const phi = detail::phi_by_name(a.phi).plus_constant(a.c);
        r.result = detail::series_json(eval_f(a.b, a.lambda, phi, a.x, {}, a.tol));
        return r;
    }
    Params const p(a.b, a.lambda);
    TailPolicy tail = AllZeroTail{};
    if (a.tail == "random") tail = RandomTail{a.seed, 0};
    else if (a.tail != "zero") throw DomainError("tail must be 'zero' or 'random'");
    DigitWord const w(a.b, detail::parse_digits(a.word), tail);
    SeriesValue v;
    if (a.what == "Y") v = eval_Y(p, w, a.x, a.tol);
    else if (a.what == "Ydx") v = eval_Y_dx(p, w, a.x, a.tol);
    else if (a.what == "Ydgamma") v = eval_Y_dgamma(p, w, a.x, a.tol);
    else if (a.what == "S") v = eval_S(p, detail::phi_by_name(a.phi == "cos" ? "dcos" : a.phi).plus_constant(a.c), w, a.x, a.tol);
    else throw DomainError("unknown quantity '" + a.what + "' (use f, Y, Ydx, Ydgamma or S)");
    r.result = detail::series_json(v);
    r.result["gamma"] = p.gamma();
    return r;
}

struct ThresholdArgs {
    int b_min = 2;
    int b_max = 12;
    double tol = kDefaultRootTol;
};

inline Report cmd_thresholds(ThresholdArgs const& a)
{
    if (a.b_min < 2 || a.b_max < a.b_min) throw DomainError("need 2 <= b-min <= b-max");
    if (a.b_max - a.b_min > 100000) throw DomainError("b range too large");
    Report r;
    r.command = "thresholds";
    r.config = Json{{"b_min", a.b_min}, {"b_max", a.b_max}, {"tol", a.tol}, {"certificates", "known"}};
    Table t;
    t.header = {"b", "lambda_b_lo", "lambda_b_hi", "tilde_lo", "tilde_hi", "tilde_method"};
    auto const certs = known_certificates();
    for (int b = a.b_min; b <= a.b_max; ++b) {
        auto const lb = solve_lambda_b(b, a.tol);
        auto const tl = solve_tilde_lambda_b(b, a.tol, certs);
        t.rows.push_back({b, lb.lo, lb.hi, tl.lo, tl.hi, to_string(tl.method)});
    }
    r.table = std::move(t);
    return r;
}

struct StarArgs {
    std::optional<double> beta;
    std::optional<int> b;
    std::optional<double> lambda0;
    int k = 4;
    double eta = 0.0;
    double t = 0.5;
    bool search = false;
    double t_target = 0.5;
    int k_max = 6;
    int eta_grid = 4001;
    double t_step = 1e-4;
};

inline Report cmd_star_verify(StarArgs const& a)
{
    Report r;
    r.command = "star-verify";
    auto report_json = [](StarCertificate const& c) {
        auto const rep = verify_certificate(c);
        return Json{{"beta", c.beta},           {"k", c.k},
                    {"eta", c.eta},             {"t", c.t},
                    {"g", rep.g_value},         {"g_prime", rep.g_prime_value},
                    {"margin", rep.margin},     {"valid", rep.valid},
                    {"borderline", rep.borderline}};
    };
    bool const explicit_beta = a.beta.has_value() || a.b.has_value();
    if (!explicit_beta) {
        r.config = Json{{"certificates", "known"}};
        Table t;
        t.header = {"b", "lambda0", "beta", "k", "eta", "t", "g", "g_prime", "valid", "certifies_upper_bound"};
        for (auto const& lc : known_certificates()) {
            auto const rep = verify_certificate(lc.cert);
            bool const up = certifies_upper_bound(lc);
            t.rows.push_back({lc.b, lc.lambda0, lc.cert.beta, lc.cert.k, lc.cert.eta, lc.cert.t, rep.g_value,
                              rep.g_prime_value, rep.valid, up});
            if (!up) r.exit_code = kClaimFailed;
        }
        r.table = std::move(t);
        return r;
    }
    double beta = 0.0;
    if (a.beta) {
        beta = *a.beta;
    } else {
        if (!a.lambda0) throw DomainError("--b needs --lambda0");
        beta = beta_of(*a.b, *a.lambda0);
    }
    r.config = Json{{"beta", beta}};
    if (a.b) r.config["b"] = *a.b;
    if (a.lambda0) r.config["lambda0"] = *a.lambda0;
    if (a.search) {
        r.config["t_target"] = a.t_target;
        r.config["k_max"] = a.k_max;
        r.config["eta_grid"] = a.eta_grid;
        r.config["t_step"] = a.t_step;
        auto const found = search_certificate(beta, a.t_target, a.k_max, a.eta_grid, a.t_step);
        r.result["found"] = found.has_value();
        if (found) r.result["certificate"] = report_json(*found);
        return r;
    }
    r.config["k"] = a.k;
    r.config["eta"] = a.eta;
    r.config["t"] = a.t;
    StarCertificate const c{beta, a.k, a.eta, a.t};
    r.result = report_json(c);
    if (!verify_certificate(c).valid) r.exit_code = kClaimFailed;
    return r;
}

struct TransversalityArgs {
    int b = 3;
    double lambda = 0.8;
    DeltaSearch search{};
    bool two_var = false;
    double eps_margin = 0.05;
    int gamma_grid = 20;
    bool tangency = false;
    int n = 1;
    int m = 1;
    std::optional<double> eps;
    std::optional<double> delta;
    int rep_depth = 30;
    int grid_per_interval = 200;
    int random_tails = 4;
    std::uint64_t seed = 1;
};

inline Report cmd_transversality(TransversalityArgs const& a)
{
    Report r;
    r.command = "transversality";
    Json search{{"x_grid", a.search.x_grid},
                {"depth", a.search.depth},
                {"pair_budget", a.search.pair_budget},
                {"rel_gap", a.search.rel_gap}};
    if (a.two_var) {
        r.config = Json{{"b", a.b}, {"mode", "two-variable"}, {"eps_margin", a.eps_margin}, {"gamma_grid", a.gamma_grid}};
        r.config["search"] = search;
        TwoVarSearch cfg;
        cfg.base = a.search;
        cfg.gamma_grid = a.gamma_grid;
        r.result = detail::delta_json(two_var_delta(a.b, a.eps_margin, cfg));
        return r;
    }
    Params const p(a.b, a.lambda);
    r.config = Json{{"b", a.b}, {"lambda", a.lambda}, {"mode", "one-variable"}};
    r.config["search"] = search;
    auto const check = analytic_transversality_check(a.b, a.lambda);
    r.result["gamma"] = p.gamma();
    r.result["analytic"] = Json{{"holds", check.holds}, {"margin", check.margin}};
    if (a.b == 2) {
        auto const cb = case_bounds_b2(p.gamma());
        r.result["case_bounds_b2"] = Json{{"00", cb[0]}, {"11", cb[1]}, {"10", cb[2]}, {"01", cb[3]}};
    }
    auto const est = empirical_delta(a.b, p.gamma(), a.search);
    r.result["empirical"] = detail::delta_json(est);
    if (a.tangency) {
        TangencyQuery q;
        q.n = a.n;
        q.m = a.m;
        q.eps = a.eps.value_or(est.delta_hat / p.gamma());
        q.delta = a.delta.value_or(est.delta_hat / p.gamma());
        q.depth = a.rep_depth;
        q.grid_per_interval = a.grid_per_interval;
        q.random_tails = a.random_tails;
        r.config["tangency"] = Json{{"n", q.n},
                                    {"m", q.m},
                                    {"eps", q.eps},
                                    {"delta", q.delta},
                                    {"depth", q.depth},
                                    {"grid_per_interval", q.grid_per_interval},
                                    {"random_tails", q.random_tails},
                                    {"seed", a.seed}};
        int const e = tsujii_e_estimate(p, q, a.seed);
        double const bound = std::pow(p.gamma() * a.b, q.n);
        r.result["tangency"] = Json{{"e", e}, {"gamma_b_pow_n", bound}, {"below", e < bound}};
    }
    return r;
}

struct BoxdimArgs {
    int b = 2;
    double lambda = 0.9;
    int levels = 14;
    int samples_per_column = 64;
    int drop_coarsest = 2;
    std::string phi = "cos";
};

inline Report cmd_boxdim(BoxdimArgs const& a)
{
    Params const p(a.b, a.lambda);
    Report r;
    r.command = "boxdim";
    r.config = Json{{"b", a.b},
                    {"lambda", a.lambda},
                    {"levels", a.levels},
                    {"samples_per_column", a.samples_per_column},
                    {"drop_coarsest", a.drop_coarsest},
                    {"phi", a.phi},
                    {"note", "oscillation is bracketed by sampling and may be undercounted"}};
    auto const t = box_count(p, detail::phi_by_name(a.phi), a.levels, a.samples_per_column);
    auto const fit = fit_box_dimension(t, a.drop_coarsest);
    r.result = Json{{"slope", fit.slope},
                    {"intercept", fit.intercept},
                    {"stderr", fit.std_error},
                    {"theoretical_D", theoretical_D(p)},
                    {"f_tolerance", t.f_tolerance}};
    Table tab;
    tab.header = {"level", "epsilon", "boxes_hit"};
    for (std::size_t j = 0; j < t.levels.size(); ++j) tab.rows.push_back({j, t.levels[j].epsilon, t.levels[j].boxes_hit});
    r.table = std::move(tab);
    return r;
}

struct MeasureArgs {
    std::string kind = "transversal";
    int b = 2;
    double lambda = 0.95;
    double x = 0.3;
    std::size_t count = 100000;
    std::optional<int> depth;
    std::uint64_t seed = 1;
    std::string psi = "dcos";
    double c = 0.0;
    int bins = 0;
    bool local_dim = false;
    double r0 = 0.02;
    int radii = 6;
    std::size_t centers = 500;
    bool points = false;
};

inline Report cmd_measure(MeasureArgs const& a)
{
    Params const p(a.b, a.lambda);
    int const depth = a.depth.value_or(default_depth(p));
    Report r;
    r.command = "measure";
    r.config = Json{{"kind", a.kind}, {"b", a.b}, {"lambda", a.lambda}, {"count", a.count}, {"seed", a.seed}};
    SampleSet s;
    if (a.kind == "transversal") {
        r.config["x"] = a.x;
        r.config["depth"] = depth;
        s = sample_transversal(p, a.x, a.count, depth, a.seed);
    } else if (a.kind == "sbr") {
        r.config["psi"] = a.psi;
        r.config["c"] = a.c;
        r.config["depth"] = depth;
        s = sample_sbr(p, detail::phi_by_name(a.psi).plus_constant(a.c), a.count, depth, a.seed);
    } else if (a.kind == "graph-lift") {
        r.config["phi"] = a.psi;
        s = sample_graph_lift(p, detail::phi_by_name(a.psi).plus_constant(a.c), a.count, a.seed);
    } else {
        throw DomainError("kind must be transversal, sbr or graph-lift");
    }
    int const c = s.dim - 1;
    std::size_t const n = s.size();
    double mean = 0.0, lo = s.at(0, c), hi = s.at(0, c);
    for (std::size_t k = 0; k < n; ++k) {
        mean += s.at(k, c);
        lo = std::min(lo, s.at(k, c));
        hi = std::max(hi, s.at(k, c));
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t k = 0; k < n; ++k) var += (s.at(k, c) - mean) * (s.at(k, c) - mean);
    var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
    r.result = Json{{"count", n},
                    {"mean", mean},
                    {"stddev", std::sqrt(var)},
                    {"stderr", std::sqrt(var / static_cast<double>(n))},
                    {"min", lo},
                    {"max", hi},
                    {"tail_bound", s.tail_bound}};
    if (a.local_dim) {
        std::vector<double> radii;
        for (int j = 0; j < a.radii; ++j) radii.push_back(a.r0 * std::pow(2.0, -j));
        r.config["local_dim"] = Json{{"r0", a.r0}, {"radii", a.radii}, {"centers", a.centers}};
        auto const fit = local_dim_estimate(s, radii, a.centers, a.seed);
        r.result["local_dim"] = Json{{"slope", fit.slope}, {"stderr", fit.std_error}};
        if (s.kind == SampleKind::Transversal)
            r.result["local_dim"]["dim_mu_if_dim_nu_equals_slope"] = dim_from_transversal(std::clamp(fit.slope, 0.0, 1.0), p);
    }
    if (a.bins > 0) {
        r.config["bins"] = a.bins;
        auto const h = density_histogram(s, a.bins);
        r.result["histogram"] = Json{{"lo", h.lo}, {"hi", h.hi}};
        Table t;
        t.header = {"bin", "left", "right", "mass"};
        double const w = (h.hi - h.lo) / a.bins;
        for (int j = 0; j < a.bins; ++j) t.rows.push_back({j, h.lo + j * w, h.lo + (j + 1) * w, h.mass[static_cast<std::size_t>(j)]});
        r.table = std::move(t);
    } else if (a.points) {
        Table t;
        t.header = s.dim == 1 ? std::vector<std::string>{"y"} : std::vector<std::string>{"x", "y"};
        for (std::size_t k = 0; k < n; ++k) {
            if (s.dim == 1) t.rows.push_back({s.at(k)});
            else t.rows.push_back({s.at(k, 0), s.at(k, 1)});
        }
        r.table = std::move(t);
    }
    return r;
}

struct ReproduceArgs {
    double perturb_eta = 0.0;
    int perturb_b = 3;
    int grid_per_interval = 200;
};

/**
 * Re-checks the numeric claims: sign facts of h_b, H_b and tilde H_b, the
 * threshold brackets and limits, the three certificates with the upper bounds
 * they give for tilde lambda_b, and e(1,1; delta/gamma, delta/gamma) = 1 at
 * lambda_b + 0.05 for b = 2, 3, 4.
 */
inline Report cmd_reproduce(ReproduceArgs const& a)
{
    Report r;
    r.command = "reproduce";
    r.config = Json{{"perturb_eta", a.perturb_eta},
                    {"perturb_b", a.perturb_b},
                    {"grid_per_interval", a.grid_per_interval},
                    {"root_tol", kDefaultRootTol}};
    Table t;
    t.header = {"claim", "pass", "value"};
    bool all = true;
    auto claim = [&](std::string const& name, bool pass, Json value) {
        all = all && pass;
        t.rows.push_back({name, pass, std::move(value)});
    };

    claim("h_2(0.9352) < 0", h(2, 0.9352) < 0.0, h(2, 0.9352));
    claim("h_2(0.9) > 0", h(2, 0.9) > 0.0, h(2, 0.9));
    claim("h_3(0.7269) < 0", h(3, 0.7269) < 0.0, h(3, 0.7269));
    claim("h_4(0.6083) < 0", h(4, 0.6083) < 0.0, h(4, 0.6083));
    claim("H_3(1) < 0", H(3, 1.0) < 0.0, H(3, 1.0));
    claim("H_5(0.5448) < 0", H(5, 0.5448) < 0.0, H(5, 0.5448));
    double const tH = tilde_H(5, 1.04 / std::sqrt(5.0));
    claim("tilde H_5(1.04/sqrt 5) < 0", tH < 0.0, tH);

    auto const l2 = solve_lambda_b(2);
    claim("0.9 < lambda_2 < 0.9352", l2.lo > 0.9 && l2.hi < 0.9352, Json{l2.lo, l2.hi});
    double worst = 0.0;
    for (int b = 5; b <= 20; ++b) worst = std::max(worst, solve_lambda_b(b).hi);
    claim("lambda_b < 0.5448 for 5 <= b <= 20", worst < 0.5448, worst);
    double const lbig = solve_lambda_b(10000).mid();
    claim("|lambda_10000 - 1/pi| < 0.01", std::abs(lbig - 1.0 / kPi) < 0.01, lbig);
    auto const tbig = solve_tilde_lambda_b(10000);
    double const scaled = 100.0 * 0.5 * (tbig.lo + tbig.hi);
    claim("|sqrt(10000) tilde lambda_10000 - 1/sqrt(pi)| < 0.02", std::abs(scaled - 1.0 / std::sqrt(kPi)) < 0.02,
          scaled);

    auto certs = known_certificates();
    for (auto& lc : certs)
        if (lc.b == a.perturb_b) lc.cert.eta += a.perturb_eta;
    for (auto const& lc : certs) {
        auto const rep = verify_certificate(lc.cert);
        std::string const tag = "certificate b=" + std::to_string(lc.b);
        claim(tag + " g > 0, g' < 0, margin > 1e-6", rep.valid && rep.margin > 1e-6,
              Json{{"g", rep.g_value}, {"g_prime", rep.g_prime_value}});
        auto const tl = solve_tilde_lambda_b(lc.b, kDefaultRootTol, certs);
        std::ostringstream name;
        name << "tilde lambda_" << lc.b << " <= " << lc.lambda0;
        claim(name.str(), tl.hi <= lc.lambda0 && tl.method == BoundMethod::Certificate, tl.hi);
    }

    for (int b = 2; b <= 4; ++b) {
        double const lambda = solve_lambda_b(b).hi + 0.05;
        Params const p(b, lambda);
        TangencyQuery q;
        q.grid_per_interval = a.grid_per_interval;
        DeltaSearch cfg;
        cfg.x_grid = b * q.grid_per_interval + 1;
        auto const est = empirical_delta(b, p.gamma(), cfg);
        q.eps = q.delta = est.delta_hat / p.gamma();
        int const e = est.delta_hat > 0.0 ? tsujii_e_estimate(p, q, 1) : -1;
        claim("e(1,1; delta/gamma, delta/gamma) = 1 for b=" + std::to_string(b), e == 1,
              Json{{"lambda", lambda}, {"delta_hat", est.delta_hat}, {"e", e}});
    }

    r.result = Json{{"all_pass", all}, {"claims", t.rows.size()}};
    r.table = std::move(t);
    r.exit_code = all ? kOk : kClaimFailed;
    return r;
}

// ---------------------------------------------------------------------------

/// Runs the tool; returns the process exit code.
inline int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Dimension of Weierstrass-type graphs: series, thresholds, certificates, estimators"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "json";
    std::string output;
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--output,-o", output, "Write to this file instead of stdout");

    std::function<Report()> action;

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Evaluate f, Y, Y_x, Y_gamma or S with a tail bound");
    eval->add_option("--b", ev.b)->required();
    eval->add_option("--lambda", ev.lambda)->required();
    eval->add_option("--x", ev.x)->required();
    eval->add_option("--word", ev.word, "Digit prefix, e.g. 101 or 1,0,12");
    eval->add_option("--tail", ev.tail, "zero or random")->capture_default_str();
    eval->add_option("--seed", ev.seed, "Key of a random tail")->capture_default_str();
    eval->add_option("--what", ev.what, "f, Y, Ydx, Ydgamma or S")->capture_default_str();
    eval->add_option("--phi", ev.phi, "cos, sin, dcos or zero (psi for S; cos means phi')")->capture_default_str();
    eval->add_option("--constant", ev.c, "Constant added to phi or psi")->capture_default_str();
    eval->add_option("--tol", ev.tol)->capture_default_str();
    eval->callback([&] { action = [&] { return cmd_eval(ev); }; });

    ThresholdArgs th;
    auto* thr = app.add_subcommand("thresholds", "Tabulate lambda_b and tilde lambda_b");
    thr->add_option("--b-min", th.b_min)->capture_default_str();
    thr->add_option("--b-max", th.b_max)->capture_default_str();
    thr->add_option("--tol", th.tol)->capture_default_str();
    thr->callback([&] { action = [&] { return cmd_thresholds(th); }; });

    StarArgs st;
    auto* star = app.add_subcommand("star-verify", "Verify or search (*)-certificates");
    star->add_option("--beta", st.beta);
    star->add_option("--b", st.b);
    star->add_option("--lambda0", st.lambda0);
    star->add_option("--k", st.k)->capture_default_str();
    star->add_option("--eta", st.eta)->capture_default_str();
    star->add_option("--t", st.t)->capture_default_str();
    star->add_flag("--search", st.search);
    star->add_option("--t-target", st.t_target)->capture_default_str();
    star->add_option("--k-max", st.k_max)->capture_default_str();
    star->add_option("--eta-grid", st.eta_grid)->capture_default_str();
    star->add_option("--t-step", st.t_step)->capture_default_str();
    star->callback([&] { action = [&] { return cmd_star_verify(st); }; });

    TransversalityArgs tr;
    auto* trv = app.add_subcommand("transversality", "Analytic and empirical transversality checks");
    trv->add_option("--b", tr.b)->capture_default_str();
    trv->add_option("--lambda", tr.lambda)->capture_default_str();
    trv->add_option("--x-grid", tr.search.x_grid)->capture_default_str();
    trv->add_option("--depth", tr.search.depth)->capture_default_str();
    trv->add_option("--pair-budget", tr.search.pair_budget)->capture_default_str();
    trv->add_option("--rel-gap", tr.search.rel_gap)->capture_default_str();
    trv->add_flag("--two-var", tr.two_var);
    trv->add_option("--eps-margin", tr.eps_margin)->capture_default_str();
    trv->add_option("--gamma-grid", tr.gamma_grid)->capture_default_str();
    trv->add_flag("--tangency", tr.tangency);
    trv->add_option("--n", tr.n)->capture_default_str();
    trv->add_option("--m", tr.m)->capture_default_str();
    trv->add_option("--eps", tr.eps);
    trv->add_option("--delta", tr.delta);
    trv->add_option("--rep-depth", tr.rep_depth)->capture_default_str();
    trv->add_option("--grid-per-interval", tr.grid_per_interval)->capture_default_str();
    trv->add_option("--random-tails", tr.random_tails)->capture_default_str();
    trv->add_option("--seed", tr.seed)->capture_default_str();
    trv->callback([&] {
        if (tr.two_var) {
            auto const* xg = trv->get_option("--x-grid");
            if (xg->count() == 0) tr.search = TwoVarSearch{}.base;
        }
        action = [&] { return cmd_transversality(tr); };
    });

    BoxdimArgs bd;
    auto* box = app.add_subcommand("boxdim", "Box-counting dimension of the graph of f");
    box->add_option("--b", bd.b)->capture_default_str();
    box->add_option("--lambda", bd.lambda)->capture_default_str();
    box->add_option("--levels", bd.levels)->capture_default_str();
    box->add_option("--samples-per-column", bd.samples_per_column)->capture_default_str();
    box->add_option("--drop-coarsest", bd.drop_coarsest)->capture_default_str();
    box->add_option("--phi", bd.phi)->capture_default_str();
    box->callback([&] { action = [&] { return cmd_boxdim(bd); }; });

    MeasureArgs ms;
    auto* mea = app.add_subcommand("measure", "Sample transversal, SBR or lifted graph measures");
    mea->add_option("--kind", ms.kind)->capture_default_str();
    mea->add_option("--b", ms.b)->capture_default_str();
    mea->add_option("--lambda", ms.lambda)->capture_default_str();
    mea->add_option("--x", ms.x)->capture_default_str();
    mea->add_option("--count", ms.count)->capture_default_str();
    mea->add_option("--depth", ms.depth, "Default: tail below 1e-9");
    mea->add_option("--seed", ms.seed)->capture_default_str();
    mea->add_option("--psi", ms.psi, "cos, sin, dcos or zero")->capture_default_str();
    mea->add_option("--constant", ms.c)->capture_default_str();
    mea->add_option("--bins", ms.bins, "Emit a density histogram")->capture_default_str();
    mea->add_flag("--local-dim", ms.local_dim);
    mea->add_option("--r0", ms.r0)->capture_default_str();
    mea->add_option("--radii", ms.radii)->capture_default_str();
    mea->add_option("--centers", ms.centers)->capture_default_str();
    mea->add_flag("--points", ms.points, "Emit every sample");
    mea->callback([&] {
        if (ms.kind == "graph-lift" && mea->get_option("--psi")->count() == 0) ms.psi = "cos";
        action = [&] { return cmd_measure(ms); };
    });

    ReproduceArgs rp;
    auto* rep = app.add_subcommand("reproduce", "Re-check every numeric claim");
    rep->add_option("--perturb-eta", rp.perturb_eta)->capture_default_str();
    rep->add_option("--perturb-b", rp.perturb_b)->capture_default_str();
    rep->add_option("--grid-per-interval", rp.grid_per_interval)->capture_default_str();
    rep->callback([&] { action = [&] { return cmd_reproduce(rp); }; });

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return kOk;
    } catch (CLI::CallForAllHelp const&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (CLI::ParseError const& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    Report report;
    try {
        worker_count();
        report = action();
    } catch (DomainError const& e) {
        err << "domain error: " << e.what() << '\n';
        return kDomain;
    } catch (BudgetExceeded const& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return kDomain;
    } catch (std::invalid_argument const& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    std::ofstream file;
    std::ostream* os = &out;
    if (!output.empty()) {
        file.open(output);
        if (!file) {
            err << "error: cannot open " << output << '\n';
            return kUsage;
        }
        os = &file;
    }
    if (format == "json") detail::write_json(report, *os);
    else if (format == "csv") detail::write_csv(report, *os);
    else detail::write_text(report, *os);
    if (report.exit_code == kClaimFailed) {
        if (report.table && report.command == "reproduce")
            for (auto const& row : report.table->rows)
                if (!row[1].get<bool>()) err << "claim failed: " << row[0].get<std::string>() << '\n';
    }
    return report.exit_code;
}

}  // namespace weierdim::cli
