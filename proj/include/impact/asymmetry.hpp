#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace impact {

// Asymmetry measure of a square matrix,
//   lambda(X) = ||X - X^T|| / (2 ||Y||),
// where Y is X with its diagonal zeroed and ||.|| is the Frobenius norm.
// It is 0 exactly for symmetric X and 1 exactly for zero-diagonal
// antisymmetric X, scale invariant, and insensitive to diagonal shifts.
//
// Requires N >= 2, finite entries, and a nonzero off-diagonal part (a matrix
// whose off-diagonal part vanishes has no defined asymmetry).
double lambda(const Eigen::MatrixXd& x);

// Mean of lambda over the N-k+1 k-by-k sub-matrices anchored on the main
// diagonal (rows/cols i..i+k-1 for each i). Sub-matrices with undefined
// asymmetry (zero off-diagonal part) are skipped; throws if every sub-matrix
// is undefined. Requires 2 <= k <= N.
double avg_lambda_k(const Eigen::MatrixXd& x, int k);

// Mean of avg_lambda_k over k = 1..N, with the k = 1 term defined as 0
// (1x1 matrices are symmetric).
double overall_asymmetry(const Eigen::MatrixXd& x);

struct AsymmetryReport {
    std::string label;
    std::vector<double> avg_lambda; // index k-1 holds the k-th average, k = 1..N
    double overall = 0.0;
    std::size_t imputed_cells = 0; // NaN cells replaced by 0 before computing
};

// Full per-k asymmetry curve plus the overall value. NaN cells (missing
// responses) are imputed as 0 for this computation only; the count of
// imputations is reported.
AsymmetryReport asymmetry_report(const Eigen::MatrixXd& x, const std::string& label);

// Rows "k,avg_lambda" for k = 1..N followed by a footer row "overall,<value>".
void write_asymmetry_csv(const std::filesystem::path& path, const AsymmetryReport& report);

} // namespace impact
