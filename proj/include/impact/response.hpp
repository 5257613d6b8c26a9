#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "impact/pairing.hpp"

namespace impact {

/*
 * Immediate price-impact (response) matrices in event time.
 *
 * Entry (i, j) is the average of  (log m_f - log m_p) * sign  over paired
 * trades of stock j observed against stock i's midpoints:
 *   all       every paired trade
 *   single    trades with an exclusive (prev, foll) quote pair
 *   multiple  trades sharing their quote pair with other trades of j
 *
 * Cells with no observations are NaN ("missing"), never zero: zero is a
 * meaningful response value.
 */

enum class ResponseCase { all, single, multiple, weighted, random };

// File-name suffix for a case ("all", "single", ...).
std::string case_name(ResponseCase c);

struct ResponseMatrices {
    Eigen::MatrixXd all;
    Eigen::MatrixXd single;
    Eigen::MatrixXd multiple;
    Eigen::MatrixXd weighted;
    // observation counts per cell
    Eigen::MatrixXi counts_all;
    Eigen::MatrixXi counts_single;
    Eigen::MatrixXi counts_multiple;
    // single-trade weight w = n_single / n_all (NaN when n_all == 0)
    Eigen::MatrixXd weights;

    const Eigen::MatrixXd& matrix(ResponseCase c) const;
};

// Streaming accumulator: feed observations pair by pair, then finalize.
class ResponseBuilder {
public:
    explicit ResponseBuilder(int n_stocks);

    void add(const PairedObservation& obs);
    void add(const std::vector<PairedObservation>& observations);

    // Computes means, weights and the weighted combination.
    ResponseMatrices finalize() const;

private:
    int n_;
    Eigen::MatrixXd sum_single_, sum_multiple_;
    Eigen::MatrixXi count_single_, count_multiple_;
};

// Convenience wrapper for a full observation set.
ResponseMatrices response_matrices(const std::vector<PairedObservation>& observations, int n_stocks);

// Entrywise weighted combination w*single + (1-w)*multiple. A weight of
// exactly 0 or 1 ignores the unused side entirely (its value may be missing);
// interior weights need both sides. Shape mismatches throw DimensionError.
Eigen::MatrixXd weighted_response(const Eigen::MatrixXd& single, const Eigen::MatrixXd& multiple,
                                  const Eigen::MatrixXd& weights);

/*
 * Structureless baseline with matched dimensions: R = (1/L) * A * sgn(B)^T
 * with A, B independent N x L standard normal matrices and sgn(x) = +1 for
 * x >= 0, -1 otherwise. Every entry is exactly N(0, 1/L) marginally.
 */
Eigen::MatrixXd random_response_from(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
Eigen::MatrixXd random_response(int n_stocks, int L, std::uint64_t seed);

// Default L: the median observation count per cell (all N^2 cells of the
// "all" case), never below 1.
int default_random_L(const Eigen::MatrixXi& counts_all);

} // namespace impact
