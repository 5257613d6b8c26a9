/*
 * Acceptance gate: twelve end-to-end checks, one printed line each
 *     [PASS|FAIL] criterion <k>: <what was measured> (measured vs pinned bound)
 *
 * Run with a criterion number (1-12) to execute one check (the ctest wiring),
 * or with no arguments to execute all twelve. Exit code 0 iff everything
 * passed. Tolerances are pinned in the code next to each measurement.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "impact/asymmetry.hpp"
#include "impact/entropy.hpp"
#include "impact/errors.hpp"
#include "impact/io.hpp"
#include "impact/network.hpp"
#include "impact/pairing.hpp"
#include "impact/reconstruct.hpp"
#include "impact/response.hpp"
#include "impact/spectra.hpp"
#include "impact/stable.hpp"
#include "impact/synth.hpp"

namespace fs = std::filesystem;
using namespace impact;

namespace {

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(const char* format, ...) {
    va_list args;
    va_start(args, format);
    char buffer[512];
    std::vsnprintf(buffer, sizeof buffer, format, args);
    va_end(args);
    return buffer;
}

struct Sample {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;

    double se() const { return n > 1 ? sd / std::sqrt(static_cast<double>(n)) : 0.0; }
};

Sample summarize(const std::vector<double>& xs) {
    Sample s;
    s.n = xs.size();
    if (s.n == 0) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(s.n);
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
    return s;
}

// Two-sided Kolmogorov-Smirnov distance of a sample against a CDF.
double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(static_cast<double>(i) / n - f));
    }
    return d;
}

// Reconstructed per-stock midpoint tapes and deduplicated trade tapes.
struct Tapes {
    std::vector<std::vector<MidPoint>> mids;
    std::vector<std::vector<TradeEvent>> trades;
};

Tapes tapes_from_synth(const SynthConfig& config) {
    const auto synth = generate_synthetic_flow(config);
    auto recon = reconstruct(synth.messages);
    const auto symbols = synth_symbols(config.n_stocks);
    Tapes t;
    t.mids.resize(static_cast<std::size_t>(config.n_stocks));
    t.trades.resize(static_cast<std::size_t>(config.n_stocks));
    for (int i = 0; i < config.n_stocks; ++i) {
        auto& series = recon.by_stock.at(symbols[static_cast<std::size_t>(i)]);
        dedupe_millisecond_trades(series.trades);
        t.mids[static_cast<std::size_t>(i)] = midpoint_series(series.quotes);
        t.trades[static_cast<std::size_t>(i)] = std::move(series.trades);
    }
    return t;
}

// ---- criterion 1: the golden message fixture replays exactly --------------

bool criterion1(std::string& detail) {
    const double t0 = now_s();
    const auto messages = read_messages_csv(fs::path(IMPACT_FIXTURE_DIR) / "golden_messages.csv",
                                            true);
    const auto result = reconstruct(messages);
    const auto& series = result.by_stock.at("ABC");
    const auto expected_quotes = read_quotes_csv(fs::path(IMPACT_FIXTURE_DIR) / "golden_quotes.csv");
    const auto expected_trades = read_trades_csv(fs::path(IMPACT_FIXTURE_DIR) / "golden_trades.csv");
    const bool tapes_ok = messages.size() == 20 && series.quotes == expected_quotes &&
                          series.trades == expected_trades;

    const fs::path tmp = fs::temp_directory_path() / "impact_accept1";
    fs::create_directories(tmp);
    write_quotes_csv(tmp / "q.csv", series.quotes);
    write_trades_csv(tmp / "t.csv", series.trades);
    const bool bytes_ok =
        read_text_file(tmp / "q.csv") ==
            read_text_file(fs::path(IMPACT_FIXTURE_DIR) / "golden_quotes.csv") &&
        read_text_file(tmp / "t.csv") ==
            read_text_file(fs::path(IMPACT_FIXTURE_DIR) / "golden_trades.csv");
    fs::remove_all(tmp);
    const double dt = now_s() - t0;
    detail = fmt("20 messages -> %zu quotes + %zu trades, tape and byte equality exact, "
                 "%.2f s (budget 1 s)",
                 series.quotes.size(), series.trades.size(), dt);
    return tapes_ok && bytes_ok && dt < 1.0;
}

// ---- criterion 2: asymmetry of i.i.d. Gaussian matrices -------------------

bool criterion2(std::string& detail) {
    const double t0 = now_s();
    double sum = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        SommersConfig cfg;
        cfg.n = 96;
        cfg.c = 0.0; // independent entries: i.i.d. N(0,1)
        cfg.seed = 100 + static_cast<std::uint64_t>(s);
        sum += lambda(sommers_sample(cfg));
    }
    const double avg = sum / seeds;
    const double dt = now_s() - t0;
    detail = fmt("<Lambda> over %d seeds of 96x96 i.i.d. N(0,1) = %.4f (pinned [0.69, 0.73], "
                 "1/sqrt(2) = 0.7071), %.2f s (budget 30 s)",
                 seeds, avg, dt);
    return avg >= 0.69 && avg <= 0.73 && dt < 30.0;
}

// ---- criterion 3: asymmetry boundary values -------------------------------

bool criterion3(std::string& detail) {
    SommersConfig cfg;
    cfg.n = 64;
    cfg.c = 0.0;
    cfg.seed = 7;
    const auto parts = decompose(sommers_sample(cfg));
    const double lam_sym = lambda(parts.symmetric);
    const double lam_anti = lambda(parts.antisymmetric); // zero diagonal by construction
    detail = fmt("Lambda(symmetric) = %.17g, Lambda(antisymmetric, zero diagonal) = %.17g "
                 "(pinned exactly 0 and 1)",
                 lam_sym, lam_anti);
    return lam_sym == 0.0 && lam_anti == 1.0;
}

// ---- criterion 4: semicircle law of the c = -1 ensemble --------------------

bool criterion4(std::string& detail) {
    const double t0 = now_s();
    const int n = 1000;
    const int seeds = 20;
    const double b = 2.0;
    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(n) * seeds);
    for (int s = 0; s < seeds; ++s) {
        SommersConfig cfg;
        cfg.n = n;
        cfg.c = -1.0;
        cfg.seed = 4000 + static_cast<std::uint64_t>(s);
        const auto anti = decompose(sommers_sample(cfg)).antisymmetric;
        for (double y : antisym_eigs(anti)) pooled.push_back(y / std::sqrt(double(n)));
    }

    const double ks =
        ks_distance(pooled, [b](double y) { return semicircle_cdf(y, b); });

    const auto hist = zero_centered_histogram(pooled, 20);
    double p0 = 0.0; // the grid is zero-anchored: one bin is centered on 0
    for (std::size_t k = 0; k + 1 < hist.edges.size(); ++k) {
        if (hist.edges[k] <= 0.0 && 0.0 < hist.edges[k + 1]) p0 = hist.density[k];
    }
    const double p0_target = 1.0 / std::numbers::pi;

    double max_abs = 0.0;
    for (double y : pooled) max_abs = std::max(max_abs, std::abs(y));
    const bool endpoints_ok = semicircle_density(b, b) == 0.0 &&
                              semicircle_density(-b, b) == 0.0 && max_abs < b + 0.05;

    const double dt = now_s() - t0;
    detail = fmt("KS = %.4f (pinned < 0.03), p(0) = %.4f vs 1/pi = %.4f (pinned within 5%%), "
                 "support max|y| = %.3f (pinned < b + 0.05), density(+-b) = 0 exact, "
                 "%.1f s (budget 120 s)",
                 ks, p0, p0_target, max_abs, dt);
    return ks < 0.03 && std::abs(p0 - p0_target) <= 0.05 * p0_target && endpoints_ok &&
           dt < 120.0;
}

// ---- criterion 5: antisymmetric spectra are exact --------------------------

bool criterion5(std::string& detail) {
    // (a) exact +-pairing and the Frobenius identity at N = 201 (odd: one 0)
    SommersConfig cfg;
    cfg.n = 201;
    cfg.c = 0.0;
    cfg.seed = 55;
    const auto anti = decompose(sommers_sample(cfg)).antisymmetric;
    const auto eigs = antisym_eigs(anti); // ascending
    bool paired = eigs.size() == 201;
    for (std::size_t k = 0; k < eigs.size(); ++k) {
        if (eigs[k] != -eigs[eigs.size() - 1 - k]) paired = false;
    }
    double sum_sq = 0.0;
    for (double y : eigs) sum_sq += y * y;
    const double frob = anti.squaredNorm();
    const double frob_rel = std::abs(sum_sq - frob) / frob;

    // (b) general eigensolver oracle at N <= 8
    double max_re = 0.0;
    double max_im_diff = 0.0;
    for (int n = 2; n <= 8; ++n) {
        SommersConfig small;
        small.n = n;
        small.c = 0.0;
        small.seed = 500 + static_cast<std::uint64_t>(n);
        const auto a = decompose(sommers_sample(small)).antisymmetric;
        const Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
        std::vector<double> oracle;
        for (int k = 0; k < n; ++k) {
            max_re = std::max(max_re, std::abs(solver.eigenvalues()[k].real()));
            oracle.push_back(solver.eigenvalues()[k].imag());
        }
        std::sort(oracle.begin(), oracle.end());
        const auto mine = antisym_eigs(a);
        for (int k = 0; k < n; ++k)
            max_im_diff = std::max(max_im_diff, std::abs(mine[static_cast<std::size_t>(k)] -
                                                         oracle[static_cast<std::size_t>(k)]));
    }

    detail = fmt("pairing exact = %s, |sum Im^2 - ||X_A||_F^2| rel = %.2e (pinned <= 1e-9), "
                 "oracle N<=8: max|Re| = %.2e (pinned < 1e-10), max Im mismatch = %.2e "
                 "(pinned < 1e-10)",
                 paired ? "yes" : "NO", frob_rel, max_re, max_im_diff);
    return paired && frob_rel <= 1e-9 && max_re < 1e-10 && max_im_diff < 1e-10;
}

// ---- criterion 6: stable-law parameter recovery ----------------------------

bool criterion6(std::string& detail) {
    const double t0 = now_s();
    const double alphas[] = {1.3, 1.7, 2.0};
    const double betas[] = {0.0, 0.5};
    double worst_da = 0.0, worst_db = 0.0, worst_dg = 0.0, worst_dm = 0.0;
    bool ok = true;
    for (double a : alphas) {
        for (double b : betas) {
            const StableParams truth{a, b, 1.0, 0.0};
            const auto samples = stable_sample(100000, truth, 42);
            const auto fit = fit_stable(samples);
            worst_da = std::max(worst_da, std::abs(fit.params.alpha - a));
            worst_dg = std::max(worst_dg, std::abs(fit.params.gamma - 1.0));
            worst_dm = std::max(worst_dm, std::abs(fit.params.mu0 - 0.0));
            ok = ok && std::abs(fit.params.alpha - a) <= 0.05 &&
                 std::abs(fit.params.gamma - 1.0) <= 0.05 &&
                 std::abs(fit.params.mu0 - 0.0) <= 0.05;
            if (a < 2.0) {
                // At alpha = 2 the characteristic function does not depend on
                // beta (the skew term carries a tan(pi alpha / 2) factor), so
                // beta recovery is checked only away from the Gaussian point.
                worst_db = std::max(worst_db, std::abs(fit.params.beta - b));
                ok = ok && std::abs(fit.params.beta - b) <= 0.1;
            }
        }
    }

    // closed-form spot checks
    double worst_pdf = 0.0;
    const double xs[] = {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0};
    const StableParams gauss{2.0, 0.0, 1.0, 0.0};  // N(0, 2)
    const StableParams cauchy{1.0, 0.0, 1.0, 0.0}; // Cauchy(0, 1)
    for (double x : xs) {
        const double g_ref = std::exp(-x * x / 4.0) / (2.0 * std::sqrt(std::numbers::pi));
        const double c_ref = 1.0 / (std::numbers::pi * (1.0 + x * x));
        worst_pdf = std::max(worst_pdf, std::abs(stable_pdf(x, gauss) - g_ref));
        worst_pdf = std::max(worst_pdf, std::abs(stable_pdf(x, cauchy) - c_ref));
    }

    const double dt = now_s() - t0;
    detail = fmt("1e5-sample fits, worst |err|: alpha %.4f, beta %.4f (alpha<2 only: "
                 "beta is unidentifiable at alpha=2), gamma %.4f, mu0 %.4f "
                 "(pinned 0.05/0.1/0.05/0.05); Gaussian+Cauchy pdf max err %.2e "
                 "(pinned 1e-6); %.0f s (budget 300 s)",
                 worst_da, worst_db, worst_dg, worst_dm, worst_pdf, dt);
    return ok && worst_pdf <= 1e-6 && dt < 300.0;
}

// ---- criterion 7: random-response moments and tail index -------------------

bool criterion7(std::string& detail) {
    const int n = 96;
    const int L = 25;
    std::vector<double> entries;
    for (std::uint64_t seed : {701u, 702u}) {
        const auto r = random_response(n, L, seed);
        entries.insert(entries.end(), r.data(), r.data() + r.size());
    }
    const auto s = summarize(entries);
    const double sigma_mean = (1.0 / std::sqrt(double(L))) / std::sqrt(double(s.n));
    const double var = s.sd * s.sd;
    const double var_target = 1.0 / L;
    const auto fit = fit_stable(entries);

    detail = fmt("%zu entries: |mean| = %.2e (pinned <= 3 sigma = %.2e), "
                 "var*L = %.4f (pinned within 5%% of 1), fitted alpha = %.4f "
                 "(pinned [1.95, 2])",
                 s.n, std::abs(s.mean), 3.0 * sigma_mean, var / var_target, fit.params.alpha);
    return std::abs(s.mean) <= 3.0 * sigma_mean &&
           std::abs(var - var_target) <= 0.05 * var_target && fit.params.alpha >= 1.95 &&
           fit.params.alpha <= 2.0;
}

// ---- criterion 8: planted impacts are recovered ----------------------------

bool criterion8(std::string& detail) {
    SynthConfig cfg;
    cfg.n_stocks = 6;
    cfg.session_ms = 3600000; // 60 minutes
    cfg.trades_per_minute = {8.0};
    cfg.quotes_per_minute = {40.0};
    cfg.seed = 13;
    const double delta = 1e-3;
    // One pair carries the shift; five more carry an explicit delta = 0
    // impact. A planted pair (even at zero shift) gets a re-quote after each
    // episode, so its trade classification realizes the configured cluster
    // design; these six source -> target pairs cover every stock as a source
    // exactly once.
    const std::pair<int, int> planted_pairs[] = {{1, 0}, {0, 1}, {3, 2},
                                                 {2, 3}, {5, 4}, {4, 5}};
    for (const auto& [src, dst] : planted_pairs)
        cfg.impacts.push_back(PlantedImpact{src, dst, src == 1 ? delta : 0.0, 1.0, 1.0});
    const auto tapes = tapes_from_synth(cfg);

    // planted pair: single-trade responses of stock 0 to trades of stock 1
    ResponseBuilder builder(6);
    std::vector<double> planted_single;
    double worst_null_z = 0.0; // max |mean| / SE over the 35 zero-shift pairs
    std::size_t n_multi = 0, n_obs = 0;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            const auto obs = observations_for_pair(tapes.mids[static_cast<std::size_t>(i)],
                                                   tapes.trades[static_cast<std::size_t>(j)], i, j);
            builder.add(obs);
            std::vector<double> singles;
            for (const auto& o : obs)
                if (o.trade_case == TradeCase::single) singles.push_back(o.log_return * o.sign);
            if (i == 0 && j == 1) {
                planted_single = singles;
            } else {
                const auto s = summarize(singles);
                if (s.se() > 0.0) worst_null_z = std::max(worst_null_z, std::abs(s.mean) / s.se());
            }
            // classification fraction over the separated (planted) pairs,
            // one classification per trade
            if (std::find(std::begin(planted_pairs), std::end(planted_pairs),
                          std::pair<int, int>{j, i}) != std::end(planted_pairs)) {
                n_obs += obs.size();
                for (const auto& o : obs)
                    if (o.trade_case == TradeCase::multiple) ++n_multi;
            }
        }
    }
    const auto matrices = builder.finalize();
    const auto ps = summarize(planted_single);
    const double planted_z = std::abs(matrices.single(0, 1) - delta) / ps.se();
    const bool planted_matches_obs = matrices.single(0, 1) == ps.mean;

    const double frac = static_cast<double>(n_multi) / static_cast<double>(n_obs);
    const double frac_sigma = std::sqrt(0.35 * 0.65 / static_cast<double>(n_obs));

    // weight-boundary identities: w = 0 reproduces multiple, w = 1 single
    const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(6, 6);
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(6, 6);
    const auto equal_with_nan = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j) {
                const bool both_nan = std::isnan(a(i, j)) && std::isnan(b(i, j));
                if (!both_nan && a(i, j) != b(i, j)) return false;
            }
        return true;
    };
    const bool w_ok =
        equal_with_nan(weighted_response(matrices.single, matrices.multiple, zeros),
                       matrices.multiple) &&
        equal_with_nan(weighted_response(matrices.single, matrices.multiple, ones),
                       matrices.single);

    detail = fmt("planted pair |R - 1e-3| = %.1f SE (pinned <= 3), worst unplanted |R| = %.2f SE "
                 "(pinned <= 3, 35 pairs), multiple fraction %.4f vs 0.35 (|dev| = %.1f sigma, "
                 "pinned <= 3), w=0/w=1 identities %s (pinned exact)",
                 planted_z, worst_null_z, frac, std::abs(frac - 0.35) / frac_sigma,
                 w_ok ? "exact" : "BROKEN");
    return planted_z <= 3.0 && planted_matches_obs && worst_null_z <= 3.0 &&
           std::abs(frac - 0.35) <= 3.0 * frac_sigma && w_ok;
}

// ---- criterion 9: entropy identities ---------------------------------------

bool criterion9(std::string& detail) {
    // uniform occupancy over a power-of-two bin count: ln K exactly
    std::vector<double> uniform;
    for (int i = 0; i < 8; ++i) uniform.push_back(0.5 + i);
    const double h_uniform = spectrum_entropy(uniform, 8);
    const bool lnk_ok = h_uniform == std::log(8.0);

    // probability-matrix identities on a dense Gaussian response matrix
    const int n = 96;
    const Eigen::MatrixXd responses = random_response(n, 25, 909);
    const StableParams law{2.0, 0.0, 0.2 / std::numbers::sqrt2, 0.0}; // N(0, 1/25)
    const auto pm = probability_matrix(responses, law, 50);
    double offdiag_sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) offdiag_sum += pm.p(i, j);

    const auto [hu, hv] = row_col_entropies(pm.p);
    const double row_total = std::accumulate(hu.begin(), hu.end(), 0.0);
    const double col_total = std::accumulate(hv.begin(), hv.end(), 0.0);

    const auto impact = impact_entropy_matrix(hu, hv);
    bool geometric_ok = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (impact(i, j) != std::sqrt(hu[static_cast<std::size_t>(i)] *
                                          hv[static_cast<std::size_t>(j)]))
                geometric_ok = false;

    detail = fmt("uniform 8-bin H = ln 8 %s (pinned exact), |sum P - 1| = %.2e (pinned <= 1e-9), "
                 "|sum H(u) - sum H(v)| = %.2e (pinned <= 1e-12), I_ij = sqrt(H(u_i) H(v_j)) %s "
                 "(pinned exact)",
                 lnk_ok ? "exact" : "BROKEN", std::abs(offdiag_sum - 1.0),
                 std::abs(row_total - col_total), geometric_ok ? "exact" : "BROKEN");
    return lnk_ok && std::abs(offdiag_sum - 1.0) <= 1e-9 &&
           std::abs(row_total - col_total) <= 1e-12 && geometric_ok;
}

// ---- criterion 10: group-network bookkeeping -------------------------------

bool criterion10(std::string& detail) {
    const int n = 96;
    const int q_count = 40;
    SommersConfig cfg;
    cfg.n = n;
    cfg.c = 0.0;
    cfg.seed = 1010;
    const Eigen::MatrixXd values = sommers_sample(cfg);
    const auto groups = group_networks(values, q_count);

    bool sizes_ok = groups.size() == static_cast<std::size_t>(q_count);
    std::size_t total_edges = 0;
    bool degrees_ok = true;
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(n, n);
    double prev_max = -std::numeric_limits<double>::infinity();
    bool ascending_ok = true;
    for (const auto& g : groups) {
        sizes_ok = sizes_ok && g.network.edges.size() == 228;
        total_edges += g.network.edges.size();
        const int in_total = std::accumulate(g.network.in_degree.begin(),
                                             g.network.in_degree.end(), 0);
        const int out_total = std::accumulate(g.network.out_degree.begin(),
                                              g.network.out_degree.end(), 0);
        degrees_ok = degrees_ok && in_total == static_cast<int>(g.network.edges.size()) &&
                     out_total == static_cast<int>(g.network.edges.size());
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& e : g.network.edges) {
            seen(e.dst, e.src) += 1; // edge src -> dst renders cell (dst, src)
            lo = std::min(lo, e.weight);
            hi = std::max(hi, e.weight);
        }
        ascending_ok = ascending_ok && lo >= prev_max;
        prev_max = hi;
    }
    bool partition_ok = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (seen(i, j) != (i == j ? 0 : 1)) partition_ok = false;

    detail = fmt("N=96, Q=40: %zu cells in %zu groups of 228 (pinned 9120/40/228), "
                 "off-diagonal partition %s, per-group in = out = edges %s, "
                 "value-ascending groups %s",
                 total_edges, groups.size(), partition_ok ? "exact" : "BROKEN",
                 degrees_ok ? "exact" : "BROKEN", ascending_ok ? "yes" : "NO");
    return sizes_ok && total_edges == 9120 && partition_ok && degrees_ok && ascending_ok;
}

// ---- criterion 11: entropy networks expose planted structure ---------------

bool criterion11(std::string& detail) {
    // Three hub stocks impact every other stock; hub 0 (largest shift, both
    // the strongest column and part of every other hub's column) is the
    // lowest-randomness stock by design.
    SynthConfig cfg;
    cfg.n_stocks = 12;
    cfg.session_ms = 1800000; // 30 minutes
    cfg.trades_per_minute = {8.0};
    cfg.quotes_per_minute = {40.0};
    cfg.response_noise = 3e-4;
    cfg.seed = 7;
    for (int i = 0; i < 12; ++i) {
        if (i != 0) cfg.impacts.push_back(PlantedImpact{0, i, 5e-4, 1.0, 1.0});
        if (i != 1) cfg.impacts.push_back(PlantedImpact{1, i, 3e-4, 1.0, 1.0});
        if (i != 2) cfg.impacts.push_back(PlantedImpact{2, i, 3e-4, 1.0, 1.0});
    }
    const auto tapes = tapes_from_synth(cfg);
    ResponseBuilder builder(12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            builder.add(observations_for_pair(tapes.mids[static_cast<std::size_t>(i)],
                                              tapes.trades[static_cast<std::size_t>(j)], i, j));
    const Eigen::MatrixXd all = builder.finalize().all;

    std::vector<double> pool;
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            if (i != j && std::isfinite(all(i, j))) pool.push_back(all(i, j));
    const auto fit = fit_stable(pool);
    const auto pm = probability_matrix(all, fit.params, 50);
    const auto [hu, hv] = row_col_entropies(pm.p);
    const Eigen::MatrixXd impact = impact_entropy_matrix(hu, hv);

    int argmin = 0;
    for (int i = 1; i < 12; ++i)
        if (impact(i, i) < impact(argmin, argmin)) argmin = i;

    const auto groups = group_networks(impact, 4);
    const auto mean_abs_connectivity = [](const GroupNetwork& g) {
        double sum = 0.0;
        for (int c : g.network.signed_connectivity) sum += std::abs(c);
        return sum / static_cast<double>(g.network.signed_connectivity.size());
    };
    const double lowest = mean_abs_connectivity(groups.front());
    const double highest = mean_abs_connectivity(groups.back());

    detail = fmt("min I_ii at stock %d (pinned 0, the most-planted hub; I_00 = %.3f, next %.3f), "
                 "mean |connectivity|: lowest-entropy group %.2f > highest %.2f (pinned strict)",
                 argmin, impact(0, 0),
                 std::min(impact(1, 1), impact(2, 2)), lowest, highest);
    return argmin == 0 && lowest > highest;
}

// ---- criterion 12: end-to-end CLI determinism ------------------------------

bool criterion12(std::string& detail) {
    const double t0 = now_s();
    const fs::path dir = fs::temp_directory_path() / "impact_accept12";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path out = dir / "run";
    const fs::path kept = dir / "first";

    std::ostringstream cfg;
    cfg << "{\n"
        << "  \"synth\": {\"n_stocks\": 12, \"session_ms\": 600000,\n"
        << "            \"trades_per_minute\": 8, \"quotes_per_minute\": 40,\n"
        << "            \"impacts\": [{\"source\": 1, \"target\": 0, \"delta\": 0.001}]},\n"
        << "  \"seed\": 12,\n"
        << "  \"out_dir\": \"" << out.string() << "\"\n"
        << "}\n";
    write_text_file(dir / "config.json", cfg.str());

    const std::string cmd = std::string(IMPACT_CLI_PATH) + " run-all --config " +
                            (dir / "config.json").string() + " > " + (dir / "log.txt").string() +
                            " 2>&1";
    const bool run1_ok = std::system(cmd.c_str()) == 0;
    fs::rename(out, kept);
    const bool run2_ok = std::system(cmd.c_str()) == 0;

    auto names = [](const fs::path& d) {
        std::vector<std::string> v;
        for (const auto& e : fs::directory_iterator(d))
            if (e.is_regular_file()) v.push_back(e.path().filename().string());
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto first = names(kept);
    const auto second = names(out);
    bool identical = run1_ok && run2_ok && first == second;
    std::size_t compared = 0;
    if (identical) {
        for (const auto& name : first) {
            if (name == "timings.json") continue; // wall-clock durations only
            ++compared;
            if (read_text_file(kept / name) != read_text_file(out / name)) {
                identical = false;
                detail = "file differs between runs: " + name;
            }
        }
    }
    const double dt = now_s() - t0;
    fs::remove_all(dir);
    if (!identical && detail.empty())
        detail = fmt("run-all failed (exit codes %d/%d) or file sets differ", run1_ok, run2_ok);
    if (identical)
        detail = fmt("two N=12 run-all invocations: %zu of %zu files byte-identical "
                     "(timings.json excluded), %.1f s for both (budget 60 s)",
                     compared, first.size(), dt);
    return identical && dt < 60.0;
}

struct Criterion {
    int number;
    const char* name;
    bool (*run)(std::string&);
};

const Criterion kCriteria[] = {
    {1, "order-book golden fixture", criterion1},
    {2, "Gaussian-matrix asymmetry level", criterion2},
    {3, "asymmetry boundary values", criterion3},
    {4, "semicircle law of the antisymmetric ensemble", criterion4},
    {5, "antisymmetric spectrum exactness", criterion5},
    {6, "stable-law parameter recovery", criterion6},
    {7, "random-response moments", criterion7},
    {8, "planted-impact recovery", criterion8},
    {9, "entropy identities", criterion9},
    {10, "group-network bookkeeping", criterion10},
    {11, "entropy networks expose planted structure", criterion11},
    {12, "end-to-end CLI determinism", criterion12},
};

int run_one(const Criterion& c) {
    std::string detail;
    bool pass = false;
    try {
        pass = c.run(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
        pass = false;
    }
    std::printf("[%s] criterion %d: %s -- %s\n", pass ? "PASS" : "FAIL", c.number, c.name,
                detail.c_str());
    std::fflush(stdout);
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) {
        const int k = std::atoi(argv[1]);
        if (k < 1 || k > 12) {
            std::fprintf(stderr, "usage: %s [criterion 1-12]\n", argv[0]);
            return 2;
        }
        return run_one(kCriteria[k - 1]);
    }
    int failures = 0;
    for (const auto& c : kCriteria) failures += run_one(c);
    if (failures > 0) std::printf("%d of 12 criteria FAILED\n", failures);
    return failures > 0 ? 1 : 0;
}
