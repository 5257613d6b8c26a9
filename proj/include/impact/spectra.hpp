#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace impact {

struct SymmetricAntisymmetric {
    Eigen::MatrixXd symmetric;     // (X + X^T) / 2
    Eigen::MatrixXd antisymmetric; // (X - X^T) / 2
};

// Split a square matrix into its symmetric and antisymmetric parts. The parts
// sum back to X (bit-exactly for integer-valued X).
SymmetricAntisymmetric decompose(const Eigen::MatrixXd& x);

// Imaginary parts of the eigenvalues of an antisymmetric matrix, computed
// through its singular values: the nonzero eigenvalues are +-i*sigma, so the
// result is {-sigma_k} and {+sigma_k} (plus one exact 0 when N is odd),
// sorted ascending. The input must be antisymmetric within 1e-12 (absolute,
// entry-wise |A_ij + A_ji|), otherwise a validation error is thrown.
std::vector<double> antisym_eigs(const Eigen::MatrixXd& x_a);

// Random-matrix ensemble with correlated transpose pairs: diagonal entries
// are standard normal; each off-diagonal pair (M_ij, M_ji), i<j, is bivariate
// normal with unit variances and correlation c. c = -1 gives M_ji = -M_ij
// exactly; c = +1 gives M_ji = M_ij exactly.
struct SommersConfig {
    int n = 2;
    double c = 0.0; // transpose-pair correlation, in [-1, 1]
    std::uint64_t seed = 0;
};

Eigen::MatrixXd sommers_sample(const SommersConfig& config);

// Generalized semicircle density (2 / (pi b^2)) sqrt(b^2 - y^2) on |y| <= b,
// zero outside; and its CDF.
double semicircle_density(double y, double b);
double semicircle_cdf(double y, double b);

// Histogram on a zero-anchored uniform grid: every edge sits at (m - 1/2) * h
// for integer m, so one bin is exactly centered on 0 (the bin used to
// estimate p(0)). `density` is normalized so the histogram integrates to 1.
struct Histogram {
    std::vector<double> edges;   // size = bins + 1, ascending
    std::vector<double> density; // size = bins
};

// Build a zero-anchored histogram of `values`. nbins = 0 selects the
// Freedman-Diaconis width (2 IQR / n^(1/3)); a positive nbins sets the target
// width to range/nbins (the anchored grid may cover the range with one bin
// more). Degenerate data (zero spread) is rejected.
Histogram zero_centered_histogram(const std::vector<double>& values, int nbins = 0);

// Rescaled semicircle parameter b = 2 / (pi p(0)), with p(0) read from the
// bin containing 0. Throws a numeric error if p(0) is zero or 0 lies outside
// the histogram.
double fit_b_from_histogram(const Histogram& histogram);

// One column "im_lambda", one row per value.
void write_spectrum_csv(const std::filesystem::path& path, const std::vector<double>& eigs);

// Rows "left_edge,right_edge,density,semicircle": per-bin density plus the
// semicircle overlay evaluated with parameter b at the bin center.
void write_spectrum_hist_csv(const std::filesystem::path& path, const Histogram& histogram,
                             double b);

} // namespace impact
