#include "doctest.h"

#include <cmath>

#include "impact/errors.hpp"
#include "impact/response.hpp"

using namespace impact;

namespace {

PairedObservation obs(int i, int j, double log_return, int sign, TradeCase c) {
    PairedObservation o;
    o.impacted = i;
    o.impacting = j;
    o.sign = sign;
    o.log_return = log_return;
    o.trade_case = c;
    return o;
}

} // namespace

TEST_CASE("response matrices average sign-aligned log returns per cell and case") {
    std::vector<PairedObservation> observations = {
        obs(0, 1, 1e-3, +1, TradeCase::single),
        obs(0, 1, 3e-3, +1, TradeCase::single),
        obs(0, 1, -2e-3, -1, TradeCase::multiple),
        obs(1, 1, 5e-4, +1, TradeCase::single),
    };
    const auto m = response_matrices(observations, 2);

    CHECK(m.single(0, 1) == doctest::Approx(2e-3));
    CHECK(m.multiple(0, 1) == doctest::Approx(2e-3)); // (-2e-3)*(-1)
    CHECK(m.all(0, 1) == doctest::Approx(2e-3));
    CHECK(m.counts_all(0, 1) == 3);
    CHECK(m.counts_single(0, 1) == 2);
    CHECK(m.counts_multiple(0, 1) == 1);
    CHECK(m.weights(0, 1) == doctest::Approx(2.0 / 3.0));

    // empty cells stay missing, not zero
    CHECK(std::isnan(m.all(1, 0)));
    CHECK(std::isnan(m.single(1, 0)));
    CHECK(std::isnan(m.weights(1, 0)));
    CHECK(m.counts_all(1, 0) == 0);

    // single-only cell: weight 1, weighted equals single, multiple missing
    CHECK(m.weights(1, 1) == 1.0);
    CHECK(m.weighted(1, 1) == m.single(1, 1));
    CHECK(std::isnan(m.multiple(1, 1)));
}

TEST_CASE("counts identity: all = single + multiple") {
    std::vector<PairedObservation> observations;
    for (int k = 0; k < 20; ++k) {
        observations.push_back(
            obs(k % 3, (k + 1) % 3, 1e-4 * k, k % 2 ? +1 : -1,
                k % 5 == 0 ? TradeCase::multiple : TradeCase::single));
    }
    const auto m = response_matrices(observations, 3);
    CHECK(((m.counts_single + m.counts_multiple - m.counts_all).array() == 0).all());
}

TEST_CASE("weighted response implements w*single + (1-w)*multiple") {
    Eigen::MatrixXd s(1, 1), mlt(1, 1), w(1, 1);
    s << 3e-6;
    mlt << 1e-6;
    w << 0.65;
    const auto r = weighted_response(s, mlt, w);
    CHECK(r(0, 0) == doctest::Approx(2.3e-6).epsilon(1e-12));
}

TEST_CASE("degenerate weights reproduce the surviving case bitwise") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd s(2, 1), mlt(2, 1), w(2, 1);
    s << 0.123456789e-5, nan;
    mlt << nan, -7.5e-6;
    w << 1.0, 0.0;
    const auto r = weighted_response(s, mlt, w);
    CHECK(r(0, 0) == s(0, 0));
    CHECK(r(1, 0) == mlt(1, 0));
}

TEST_CASE("interior weights require both sides") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd s(1, 1), mlt(1, 1), w(1, 1);
    s << 1e-6;
    mlt << nan;
    w << 0.5;
    CHECK(std::isnan(weighted_response(s, mlt, w)(0, 0)));
    w << nan;
    CHECK(std::isnan(weighted_response(s, mlt, w)(0, 0)));
}

TEST_CASE("weighted response rejects shape mismatches") {
    Eigen::MatrixXd a(2, 2), b(2, 3), w(2, 2);
    a.setZero();
    b.setZero();
    w.setZero();
    CHECK_THROWS_AS(weighted_response(a, b, w), DimensionError);
}

TEST_CASE("random response with injected matrices matches the hand result") {
    Eigen::MatrixXd A(2, 1), B(2, 1);
    A << 1.0, 2.0;
    B << -3.0, 4.0;
    const auto r = random_response_from(A, B);
    CHECK(r(0, 0) == -1.0);
    CHECK(r(0, 1) == 1.0);
    CHECK(r(1, 0) == -2.0);
    CHECK(r(1, 1) == 2.0);
}

TEST_CASE("sgn maps zero to +1") {
    Eigen::MatrixXd A(1, 1), B(1, 1);
    A << 2.0;
    B << 0.0;
    CHECK(random_response_from(A, B)(0, 0) == 2.0);
}

TEST_CASE("random response is seed-deterministic with N(0,1/L) entries") {
    const int n = 96;
    const int L = 25;
    const auto r1 = random_response(n, L, 777);
    const auto r2 = random_response(n, L, 777);
    CHECK(r1 == r2);
    const auto r3 = random_response(n, L, 778);
    CHECK(r1 != r3);

    const double mean = r1.mean();
    const double var = (r1.array() - mean).square().sum() / (n * n - 1);
    // entries are exactly N(0, 1/L) marginally; 3-sigma band on the mean
    const double sigma_mean = (1.0 / std::sqrt(double(L))) / std::sqrt(double(n) * n);
    CHECK(std::abs(mean) < 3.0 * sigma_mean);
    CHECK(var == doctest::Approx(1.0 / L).epsilon(0.05));
}

TEST_CASE("default random depth is the median cell count, floored at one") {
    Eigen::MatrixXi counts(2, 2);
    counts << 1, 5, 3, 7;
    CHECK(default_random_L(counts) == 3);
    counts << 0, 0, 0, 0;
    CHECK(default_random_L(counts) == 1);
    counts << 9, 9, 9, 9;
    CHECK(default_random_L(counts) == 9);
}
