#pragma once

#include "impact/stable.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace impact {

// Shannon entropy (nats) of the empirical distribution of `values` over
// k_bins equal-width bins spanning [min, max]; the last bin also contains the
// right edge. Zero-count bins contribute 0. All values equal -> 0.
// Per-bin terms are pairwise-summed so that an exactly uniform occupancy over
// a power-of-two bin count yields ln(k) exactly.
double spectrum_entropy(std::span<const double> values, int k_bins);

// Masses of the fitted stable law over the bins defined by `edges`,
// normalized to sum to 1 over the binned range.
std::vector<double> stable_bin_masses(const StableParams& fit, std::span<const double> edges);

// Normalized mass of the bin containing r (last bin right-closed). Values
// outside [edges.front(), edges.back()] are clamped to the nearest boundary
// bin; when `clamped` is non-null it is incremented for each such value.
double bin_probability(double r, const StableParams& fit, std::span<const double> edges,
                       std::size_t* clamped = nullptr);

// Probability matrix built from a response matrix and its fitted law:
//   P_ij = P_0(R_ij) / sum over present off-diagonal cells of P_0,  i != j
//   P_ii = 1 by convention.
// Missing (NaN) responses get P = 0 and are excluded from the normalization.
struct ProbabilityMatrix {
    Eigen::MatrixXd p;      // N x N; diagonal 1, missing cells 0
    Eigen::MatrixXd raw_p0; // per-cell normalized bin mass; NaN where missing
    std::vector<double> edges;
    std::size_t clamped = 0; // off-diagonal responses outside the edge range
};

// Bin edges: k equal-width bins spanning the pooled present off-diagonal
// responses of this matrix.
ProbabilityMatrix probability_matrix(const Eigen::MatrixXd& responses, const StableParams& fit,
                                     int k_bins = 50);
ProbabilityMatrix probability_matrix(const Eigen::MatrixXd& responses, const StableParams& fit,
                                     std::span<const double> edges);

// Row entropies H(u_i) = -sum_j P_ij ln P_ij and column entropies
// H(v_j) = -sum_i P_ij ln P_ij (nats). Cells with P = 0 and the diagonal
// (P = 1) contribute nothing. Row and column totals are equal by reordering.
std::pair<std::vector<double>, std::vector<double>> row_col_entropies(const Eigen::MatrixXd& p);

// Impact entropy I_ij = sqrt(H(u_i) H(v_j)), diagonal included. Negative
// entropies are rejected.
Eigen::MatrixXd impact_entropy_matrix(std::span<const double> row_entropies,
                                      std::span<const double> col_entropies);

// Per-stock scatter table (one point per stock): entropies, the self impact
// entropy I_ii, and average daily trades, plus the table means.
struct ScatterRow {
    std::string symbol;
    double h_row = 0.0;
    double h_col = 0.0;
    double i_self = 0.0;
    double avg_daily_trades = 0.0;
};

struct ScatterTable {
    std::vector<ScatterRow> rows;
    double mean_h_row = 0.0;
    double mean_h_col = 0.0;
    double mean_i_self = 0.0;
};

ScatterTable scatter_table(std::span<const std::string> symbols,
                           std::span<const double> row_entropies,
                           std::span<const double> col_entropies,
                           std::span<const double> avg_daily_trades);

// Rows "symbol,h_u,h_v,i_ii,avg_daily_trades", then footer rows "mean,..."
// and "ref_075,..." carrying the means and the 0.75 x mean reference values.
void write_entropies_csv(const std::filesystem::path& path, const ScatterTable& table);

} // namespace impact
