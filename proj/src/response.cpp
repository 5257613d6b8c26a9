#include "impact/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "impact/errors.hpp"

namespace impact {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

bool missing(double v) {
    return std::isnan(v);
}

} // namespace

std::string case_name(ResponseCase c) {
    switch (c) {
    case ResponseCase::all: return "all";
    case ResponseCase::single: return "single";
    case ResponseCase::multiple: return "multiple";
    case ResponseCase::weighted: return "weighted";
    case ResponseCase::random: return "random";
    }
    throw ValidationError("unknown response case");
}

const Eigen::MatrixXd& ResponseMatrices::matrix(ResponseCase c) const {
    switch (c) {
    case ResponseCase::all: return all;
    case ResponseCase::single: return single;
    case ResponseCase::multiple: return multiple;
    case ResponseCase::weighted: return weighted;
    default: throw ValidationError("case has no stored matrix here: " + case_name(c));
    }
}

ResponseBuilder::ResponseBuilder(int n_stocks) : n_(n_stocks) {
    if (n_stocks <= 0) {
        throw ValidationError("response builder needs a positive stock count");
    }
    sum_single_.setZero(n_, n_);
    sum_multiple_.setZero(n_, n_);
    count_single_.setZero(n_, n_);
    count_multiple_.setZero(n_, n_);
}

void ResponseBuilder::add(const PairedObservation& obs) {
    if (obs.impacted < 0 || obs.impacted >= n_ || obs.impacting < 0 || obs.impacting >= n_) {
        throw DimensionError("observation stock index out of range");
    }
    const double term = obs.log_return * obs.sign;
    if (obs.trade_case == TradeCase::single) {
        sum_single_(obs.impacted, obs.impacting) += term;
        count_single_(obs.impacted, obs.impacting) += 1;
    } else {
        sum_multiple_(obs.impacted, obs.impacting) += term;
        count_multiple_(obs.impacted, obs.impacting) += 1;
    }
}

void ResponseBuilder::add(const std::vector<PairedObservation>& observations) {
    for (const auto& obs : observations) {
        add(obs);
    }
}

ResponseMatrices ResponseBuilder::finalize() const {
    ResponseMatrices out;
    out.counts_single = count_single_;
    out.counts_multiple = count_multiple_;
    out.counts_all = count_single_ + count_multiple_;
    out.single.setConstant(n_, n_, nan_value);
    out.multiple.setConstant(n_, n_, nan_value);
    out.all.setConstant(n_, n_, nan_value);
    out.weights.setConstant(n_, n_, nan_value);

    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            const int ns = count_single_(i, j);
            const int nm = count_multiple_(i, j);
            if (ns > 0) {
                out.single(i, j) = sum_single_(i, j) / ns;
            }
            if (nm > 0) {
                out.multiple(i, j) = sum_multiple_(i, j) / nm;
            }
            if (ns + nm > 0) {
                out.all(i, j) = (sum_single_(i, j) + sum_multiple_(i, j)) / (ns + nm);
                out.weights(i, j) = static_cast<double>(ns) / (ns + nm);
            }
        }
    }
    out.weighted = weighted_response(out.single, out.multiple, out.weights);
    return out;
}

ResponseMatrices response_matrices(const std::vector<PairedObservation>& observations, int n_stocks) {
    ResponseBuilder builder(n_stocks);
    builder.add(observations);
    return builder.finalize();
}

Eigen::MatrixXd weighted_response(const Eigen::MatrixXd& single, const Eigen::MatrixXd& multiple,
                                  const Eigen::MatrixXd& weights) {
    if (single.rows() != multiple.rows() || single.cols() != multiple.cols() ||
        single.rows() != weights.rows() || single.cols() != weights.cols()) {
        throw DimensionError("weighted response: shape mismatch");
    }
    Eigen::MatrixXd out(single.rows(), single.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            const double w = weights(i, j);
            if (missing(w)) {
                out(i, j) = nan_value;
            } else if (w == 0.0) {
                out(i, j) = multiple(i, j);
            } else if (w == 1.0) {
                out(i, j) = single(i, j);
            } else if (missing(single(i, j)) || missing(multiple(i, j))) {
                out(i, j) = nan_value;
            } else {
                out(i, j) = w * single(i, j) + (1.0 - w) * multiple(i, j);
            }
        }
    }
    return out;
}

Eigen::MatrixXd random_response_from(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw DimensionError("random response: A and B must share their shape");
    }
    if (A.cols() < 1) {
        throw ValidationError("random response: L must be >= 1");
    }
    const Eigen::MatrixXd signs =
        B.unaryExpr([](double x) { return x >= 0.0 ? 1.0 : -1.0; });
    return (A * signs.transpose()) / static_cast<double>(A.cols());
}

Eigen::MatrixXd random_response(int n_stocks, int L, std::uint64_t seed) {
    if (n_stocks <= 0 || L <= 0) {
        throw ValidationError("random response: N and L must be positive");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd A(n_stocks, L);
    Eigen::MatrixXd B(n_stocks, L);
    // fill order is part of the artifact's determinism contract: A first,
    // then B, each row by row
    for (int i = 0; i < n_stocks; ++i) {
        for (int l = 0; l < L; ++l) {
            A(i, l) = gauss(rng);
        }
    }
    for (int i = 0; i < n_stocks; ++i) {
        for (int l = 0; l < L; ++l) {
            B(i, l) = gauss(rng);
        }
    }
    return random_response_from(A, B);
}

int default_random_L(const Eigen::MatrixXi& counts_all) {
    std::vector<int> counts;
    counts.reserve(static_cast<std::size_t>(counts_all.size()));
    for (Eigen::Index i = 0; i < counts_all.rows(); ++i) {
        for (Eigen::Index j = 0; j < counts_all.cols(); ++j) {
            counts.push_back(counts_all(i, j));
        }
    }
    if (counts.empty()) {
        return 1;
    }
    const auto mid = counts.begin() + static_cast<std::ptrdiff_t>((counts.size() - 1) / 2);
    std::nth_element(counts.begin(), mid, counts.end());
    return std::max(1, *mid);
}

} // namespace impact
