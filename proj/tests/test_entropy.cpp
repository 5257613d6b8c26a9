#include "doctest.h"

#include "impact/entropy.hpp"
#include "impact/errors.hpp"
#include "impact/io.hpp"
#include "test_util.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

using namespace impact;

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

// Gaussian-branch mass over [a, b] for unit-scale fits, via the closed form.
double gauss_mass(double a, double b, double gamma = 1.0, double mu0 = 0.0) {
    return 0.5 * (std::erf((b - mu0) / (2.0 * gamma)) - std::erf((a - mu0) / (2.0 * gamma)));
}

} // namespace

TEST_CASE("binned Shannon entropy") {
    // Degenerate data: everything in one bin.
    CHECK(spectrum_entropy(std::vector<double>{2.0, 2.0, 2.0}, 8) == 0.0);
    CHECK(spectrum_entropy(std::vector<double>{1.0, 1.1, 1.2}, 1) == 0.0);

    // Exactly uniform occupancy over a power-of-two bin count: ln K, exactly.
    std::vector<double> uniform;
    for (int i = 0; i < 8; ++i) uniform.push_back(0.5 + static_cast<double>(i));
    CHECK(spectrum_entropy(uniform, 8) == std::log(8.0));

    // Probabilities {1/2, 1/4, 1/4} -> (3/2) ln 2.
    const std::vector<double> skewed{0.5, 0.5, 1.5, 3.5};
    CHECK(spectrum_entropy(skewed, 4) == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-14));

    // More bins than values: zero-count bins contribute nothing.
    CHECK(spectrum_entropy(std::vector<double>{0.0, 1.0}, 64) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(spectrum_entropy(std::vector<double>{1.0}, 4), ValidationError);
    CHECK_THROWS_AS(spectrum_entropy(std::vector<double>{1.0, 2.0}, 0), ValidationError);
    CHECK_THROWS_AS(spectrum_entropy(std::vector<double>{1.0, nan_v}, 4), ValidationError);
}

TEST_CASE("bin masses of a fitted law") {
    // A law far wider than the binned range is locally uniform: every bin
    // carries ~1/K after normalization.
    const StableParams wide{2.0, 0.0, 1000.0, 0.0};
    std::vector<double> edges;
    for (int k = 0; k <= 10; ++k) edges.push_back(-1.0 + 0.2 * static_cast<double>(k));
    const auto masses = stable_bin_masses(wide, edges);
    REQUIRE(masses.size() == 10);
    double total = 0.0;
    for (double m : masses) {
        CHECK(m == doctest::Approx(0.1).epsilon(1e-6));
        total += m;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // Gaussian-branch masses match the closed-form normal CDF differences.
    const StableParams gauss{2.0, 0.0, 0.003, 0.0005};
    const std::vector<double> ge{-0.01, -0.002, 0.0005, 0.004, 0.012};
    const auto gm = stable_bin_masses(gauss, ge);
    double gtotal = 0.0;
    for (std::size_t k = 0; k + 1 < ge.size(); ++k) gtotal += gauss_mass(ge[k], ge[k + 1], 0.003, 0.0005);
    for (std::size_t k = 0; k + 1 < ge.size(); ++k)
        CHECK(gm[k] ==
              doctest::Approx(gauss_mass(ge[k], ge[k + 1], 0.003, 0.0005) / gtotal).epsilon(1e-10));

    CHECK_THROWS_AS(stable_bin_masses(gauss, std::vector<double>{1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(stable_bin_masses(gauss, std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("containing-bin probability and clamping") {
    const StableParams gauss{2.0, 0.0, 1.0, 0.0};
    const std::vector<double> edges{-2.0, -1.0, 0.0, 1.0, 2.0};
    const auto masses = stable_bin_masses(gauss, edges);

    std::size_t clamped = 0;
    CHECK(bin_probability(-1.5, gauss, edges, &clamped) == masses[0]);
    CHECK(bin_probability(0.25, gauss, edges, &clamped) == masses[2]);
    // Interior left edges belong to the bin on their right.
    CHECK(bin_probability(0.0, gauss, edges, &clamped) == masses[2]);
    CHECK(bin_probability(-2.0, gauss, edges, &clamped) == masses[0]);
    // The last bin is right-closed.
    CHECK(bin_probability(2.0, gauss, edges, &clamped) == masses[3]);
    CHECK(clamped == 0);

    CHECK(bin_probability(-7.0, gauss, edges, &clamped) == masses[0]);
    CHECK(clamped == 1);
    CHECK(bin_probability(11.0, gauss, edges, &clamped) == masses[3]);
    CHECK(clamped == 2);

    CHECK_THROWS_AS(bin_probability(nan_v, gauss, edges, nullptr), ValidationError);
}

TEST_CASE("probability matrix from responses") {
    // Equal off-diagonal responses split the normalization evenly.
    Eigen::MatrixXd equal(2, 2);
    equal << 0.1, 0.004, 0.004, -0.2;
    const StableParams fit{2.0, 0.0, 0.01, 0.0};
    const std::vector<double> edges{-0.01, 0.0, 0.01};
    const auto pm = probability_matrix(equal, fit, edges);
    CHECK(pm.p(0, 1) == 0.5);
    CHECK(pm.p(1, 0) == 0.5);
    CHECK(pm.p(0, 0) == 1.0);
    CHECK(pm.p(1, 1) == 1.0);

    // 3x3 fixture against hand-normalized Gaussian bin masses.
    Eigen::MatrixXd r(3, 3);
    r << 0.0, -1.2, 0.4,
         2.1, 0.0, -0.3,
         1.7, 0.9, 0.0;
    const StableParams unit{2.0, 0.0, 1.0, 0.0};
    const std::vector<double> e3{-2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
    const auto pm3 = probability_matrix(r, unit, e3);
    const double norm = gauss_mass(-2.0, 3.0);
    const auto cell = [&](double lo, double hi) { return gauss_mass(lo, hi) / norm; };
    const double denom = cell(-2.0, -1.0) + cell(0.0, 1.0) + cell(2.0, 3.0) + cell(-1.0, 0.0) +
                         cell(1.0, 2.0) + cell(0.0, 1.0);
    CHECK(pm3.p(0, 1) == doctest::Approx(cell(-2.0, -1.0) / denom).epsilon(1e-12));
    CHECK(pm3.p(0, 2) == doctest::Approx(cell(0.0, 1.0) / denom).epsilon(1e-12));
    CHECK(pm3.p(1, 0) == doctest::Approx(cell(2.0, 3.0) / denom).epsilon(1e-12));
    CHECK(pm3.p(2, 1) == doctest::Approx(cell(0.0, 1.0) / denom).epsilon(1e-12));
    double offdiag_sum = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) offdiag_sum += pm3.p(i, j);
    CHECK(offdiag_sum == doctest::Approx(1.0).epsilon(1e-9));

    // Missing cells: excluded from normalization, probability 0.
    Eigen::MatrixXd holes = r;
    holes(0, 1) = nan_v;
    const auto pmh = probability_matrix(holes, unit, e3);
    CHECK(pmh.p(0, 1) == 0.0);
    CHECK(std::isnan(pmh.raw_p0(0, 1)));
    double present_sum = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) present_sum += pmh.p(i, j);
    CHECK(present_sum == doctest::Approx(1.0).epsilon(1e-9));

    // Out-of-range responses clamp and count.
    Eigen::MatrixXd wild = r;
    wild(1, 0) = 50.0;
    const auto pmw = probability_matrix(wild, unit, e3);
    CHECK(pmw.clamped == 1);

    // Default edge construction pools the off-diagonal range.
    const auto pmd = probability_matrix(r, unit, 10);
    REQUIRE(pmd.edges.size() == 11);
    CHECK(pmd.edges.front() == -1.2);
    CHECK(pmd.edges.back() == 2.1);
    CHECK(pmd.clamped == 0);

    Eigen::MatrixXd all_nan = Eigen::MatrixXd::Constant(2, 2, nan_v);
    CHECK_THROWS_AS(probability_matrix(all_nan, unit, edges), ValidationError);
    Eigen::MatrixXd flat(2, 2);
    flat << 0.0, 0.5, 0.5, 0.0;
    CHECK_THROWS_AS(probability_matrix(flat, unit, 10), ValidationError);
    CHECK_THROWS_AS(probability_matrix(r, unit, 1), ValidationError);
}

TEST_CASE("row and column entropies") {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3, 3);
    p.diagonal().setOnes();
    p(0, 1) = 0.3;
    const auto [hu, hv] = row_col_entropies(p);
    CHECK(hu[0] == doctest::Approx(-0.3 * std::log(0.3)).epsilon(1e-15));
    CHECK(hu[1] == 0.0);
    CHECK(hu[2] == 0.0);
    CHECK(hv[0] == 0.0);
    CHECK(hv[1] == doctest::Approx(-0.3 * std::log(0.3)).epsilon(1e-15));
    CHECK(hv[2] == 0.0);

    // All 12 off-diagonal cells equal in a 4x4 matrix.
    Eigen::MatrixXd eq = Eigen::MatrixXd::Constant(4, 4, 1.0 / 12.0);
    eq.diagonal().setOnes();
    const auto [hu4, hv4] = row_col_entropies(eq);
    const double expected = 3.0 * (1.0 / 12.0) * std::log(12.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(hu4[static_cast<std::size_t>(i)] == doctest::Approx(expected).epsilon(1e-14));
        CHECK(hv4[static_cast<std::size_t>(i)] == doctest::Approx(expected).epsilon(1e-14));
    }

    // Row and column totals agree, and the per-row bound (N-1)/e holds.
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 0.002);
    Eigen::MatrixXd r(8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) r(i, j) = normal(rng);
    const auto pm = probability_matrix(r, StableParams{2.0, 0.0, 0.002, 0.0}, 20);
    const auto [hur, hvr] = row_col_entropies(pm.p);
    double su = 0.0;
    double sv = 0.0;
    for (int i = 0; i < 8; ++i) {
        su += hur[static_cast<std::size_t>(i)];
        sv += hvr[static_cast<std::size_t>(i)];
        CHECK(hur[static_cast<std::size_t>(i)] <= 7.0 / std::numbers::e);
        CHECK(hur[static_cast<std::size_t>(i)] >= 0.0);
    }
    CHECK(su == doctest::Approx(sv).epsilon(1e-12));

    Eigen::MatrixXd bad = p;
    bad(1, 2) = -0.1;
    CHECK_THROWS_AS(row_col_entropies(bad), ValidationError);
    bad(1, 2) = nan_v;
    CHECK_THROWS_AS(row_col_entropies(bad), ValidationError);
}

TEST_CASE("impact entropy matrix") {
    const std::vector<double> equal{0.7, 0.7, 0.7};
    const auto ieq = impact_entropy_matrix(equal, equal);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(ieq(i, j) == doctest::Approx(0.7).epsilon(1e-15));

    const std::vector<double> hu{4.0, 1.0};
    const std::vector<double> hv{1.0, 4.0};
    const auto im = impact_entropy_matrix(hu, hv);
    CHECK(im(0, 0) == 2.0);
    CHECK(im(0, 1) == 4.0);
    CHECK(im(1, 0) == 1.0);
    CHECK(im(1, 1) == 2.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(im(i, j) == std::sqrt(hu[static_cast<std::size_t>(i)] *
                                        hv[static_cast<std::size_t>(j)]));

    CHECK_THROWS_AS(impact_entropy_matrix(std::vector<double>{1.0},
                                          std::vector<double>{1.0, 2.0}),
                    ValidationError);
    CHECK_THROWS_AS(impact_entropy_matrix(std::vector<double>{-0.1, 1.0},
                                          std::vector<double>{1.0, 2.0}),
                    ValidationError);
}

TEST_CASE("per-stock entropy scatter table") {
    const std::vector<std::string> symbols{"AAA", "BBB"};
    const std::vector<double> hu{1.0, 3.0};
    const std::vector<double> hv{4.0, 3.0};
    const std::vector<double> trades{120.0, 35.5};
    const auto table = scatter_table(symbols, hu, hv, trades);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].i_self == 2.0);
    CHECK(table.rows[1].i_self == 3.0);
    CHECK(table.mean_h_row == doctest::Approx(2.0));
    CHECK(table.mean_h_col == doctest::Approx(3.5));
    CHECK(table.mean_i_self == doctest::Approx(2.5));

    testutil::TempDir tmp;
    write_entropies_csv(tmp.path / "entropies_all.csv", table);
    const auto text = read_text_file(tmp.path / "entropies_all.csv");
    CHECK(text.rfind("symbol,h_u,h_v,i_ii,avg_daily_trades\n", 0) == 0);
    CHECK(text.find("AAA,1,4,2,120\n") != std::string::npos);
    CHECK(text.find("mean,2,3.5,2.5,\n") != std::string::npos);
    CHECK(text.find("ref_075,1.5,2.625,1.875,\n") != std::string::npos);

    CHECK_THROWS_AS(scatter_table(symbols, hu, hv, std::vector<double>{1.0}), ValidationError);
}
