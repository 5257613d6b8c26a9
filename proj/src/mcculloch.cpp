#include "impact/errors.hpp"
#include "impact/stable.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace impact {

namespace detail {

double percentile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw ValidationError("percentile of empty sample");
    if (sorted.size() == 1) return sorted[0];
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

// Quantile lookup tables for the McCulloch initial estimator. Values follow
// McCulloch (1986), tables III, IV, V and VII.
constexpr std::array<double, 15> nu_alpha_grid = {
    2.439, 2.5, 2.6, 2.7, 2.8, 3.0, 3.2, 3.5, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 25.0};
constexpr std::array<double, 7> nu_beta_grid = {0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0};

// alpha = psi1(nu_alpha, nu_beta); rows follow nu_alpha_grid.
constexpr double alpha_table[15][7] = {
    {2.000, 2.000, 2.000, 2.000, 2.000, 2.000, 2.000},
    {1.916, 1.924, 1.924, 1.924, 1.924, 1.924, 1.924},
    {1.808, 1.813, 1.829, 1.829, 1.829, 1.829, 1.829},
    {1.729, 1.730, 1.737, 1.745, 1.745, 1.745, 1.745},
    {1.664, 1.663, 1.663, 1.668, 1.676, 1.676, 1.676},
    {1.563, 1.560, 1.553, 1.548, 1.547, 1.547, 1.547},
    {1.484, 1.480, 1.471, 1.460, 1.448, 1.438, 1.438},
    {1.391, 1.386, 1.378, 1.364, 1.337, 1.318, 1.318},
    {1.279, 1.273, 1.266, 1.250, 1.210, 1.184, 1.150},
    {1.128, 1.121, 1.114, 1.101, 1.067, 1.027, 0.973},
    {1.029, 1.021, 1.014, 1.004, 0.974, 0.935, 0.874},
    {0.896, 0.892, 0.884, 0.883, 0.855, 0.823, 0.769},
    {0.818, 0.812, 0.806, 0.801, 0.780, 0.756, 0.691},
    {0.698, 0.695, 0.692, 0.689, 0.676, 0.656, 0.597},
    {0.593, 0.590, 0.588, 0.586, 0.579, 0.563, 0.513}};

// beta = psi2(nu_alpha, nu_beta); rows follow nu_alpha_grid.
constexpr double beta_table[15][7] = {
    {0.0, 2.160, 1.000, 1.000, 1.000, 1.000, 1.000},
    {0.0, 1.592, 3.390, 1.000, 1.000, 1.000, 1.000},
    {0.0, 0.759, 1.800, 1.000, 1.000, 1.000, 1.000},
    {0.0, 0.482, 1.048, 1.694, 1.000, 1.000, 1.000},
    {0.0, 0.360, 0.760, 1.232, 2.229, 1.000, 1.000},
    {0.0, 0.253, 0.518, 0.823, 1.575, 1.000, 1.000},
    {0.0, 0.203, 0.410, 0.632, 1.244, 1.906, 1.000},
    {0.0, 0.165, 0.332, 0.499, 0.943, 1.560, 1.000},
    {0.0, 0.136, 0.271, 0.404, 0.689, 1.230, 2.195},
    {0.0, 0.109, 0.216, 0.323, 0.539, 0.827, 1.917},
    {0.0, 0.096, 0.190, 0.284, 0.472, 0.693, 1.759},
    {0.0, 0.082, 0.163, 0.243, 0.412, 0.601, 1.596},
    {0.0, 0.074, 0.147, 0.220, 0.377, 0.546, 1.482},
    {0.0, 0.064, 0.128, 0.191, 0.330, 0.478, 1.362},
    {0.0, 0.056, 0.112, 0.167, 0.285, 0.428, 1.274}};

// Rows of the next two tables follow alpha descending from 2.0 to 0.5; they
// are flipped to ascending order at load time.
constexpr std::array<double, 16> alpha_grid_ascending = {
    0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0};
constexpr std::array<double, 5> beta_grid = {0.0, 0.25, 0.5, 0.75, 1.0};

// nu_c = phi3(alpha, beta): (p75 - p25) / gamma.
constexpr double nu_c_table_desc[16][5] = {
    {1.908, 1.908, 1.908, 1.908, 1.908},
    {1.914, 1.915, 1.916, 1.918, 1.921},
    {1.921, 1.922, 1.927, 1.936, 1.947},
    {1.927, 1.930, 1.943, 1.961, 1.987},
    {1.933, 1.940, 1.962, 1.997, 2.043},
    {1.939, 1.952, 1.988, 2.045, 2.116},
    {1.946, 1.967, 2.022, 2.106, 2.211},
    {1.955, 1.984, 2.067, 2.188, 2.333},
    {1.965, 2.007, 2.125, 2.294, 2.491},
    {1.980, 2.040, 2.205, 2.435, 2.696},
    {2.000, 2.085, 2.311, 2.624, 2.973},
    {2.040, 2.149, 2.461, 2.886, 3.356},
    {2.098, 2.244, 2.676, 3.265, 3.912},
    {2.189, 2.392, 3.004, 3.844, 4.775},
    {2.337, 2.634, 3.542, 4.808, 6.247},
    {2.588, 3.073, 4.534, 6.636, 9.144}};

// nu_zeta = phi5(alpha, beta): (zeta - p50) / gamma.
constexpr double nu_zeta_table_desc[16][5] = {
    {0.0, 0.000, 0.000, 0.000, 0.000},
    {0.0, -0.017, -0.032, -0.049, -0.064},
    {0.0, -0.030, -0.061, -0.092, -0.123},
    {0.0, -0.043, -0.088, -0.132, -0.179},
    {0.0, -0.056, -0.111, -0.170, -0.232},
    {0.0, -0.066, -0.134, -0.206, -0.283},
    {0.0, -0.075, -0.154, -0.241, -0.335},
    {0.0, -0.084, -0.173, -0.276, -0.390},
    {0.0, -0.090, -0.192, -0.310, -0.447},
    {0.0, -0.095, -0.208, -0.346, -0.508},
    {0.0, -0.098, -0.223, -0.380, -0.576},
    {0.0, -0.099, -0.237, -0.424, -0.652},
    {0.0, -0.096, -0.250, -0.469, -0.742},
    {0.0, -0.089, -0.262, -0.520, -0.853},
    {0.0, -0.078, -0.272, -0.581, -0.997},
    {0.0, -0.061, -0.279, -0.659, -1.198}};

// Index of the grid cell containing x (clamping x into the grid range first,
// which mirrors how the reference implementation treats out-of-range inputs).
template <std::size_t N>
std::pair<std::size_t, double> cell_weight(const std::array<double, N>& grid, double x) {
    x = std::clamp(x, grid.front(), grid.back());
    std::size_t i = 0;
    while (i + 2 < N && x >= grid[i + 1]) ++i;
    const double w = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return {i, w};
}

template <std::size_t NR, std::size_t NC>
double bilinear(const double (&table)[NR][NC], const std::array<double, NR>& rows,
                const std::array<double, NC>& cols, double r, double c) {
    const auto [i, wr] = cell_weight(rows, r);
    const auto [j, wc] = cell_weight(cols, c);
    const double top = table[i][j] * (1.0 - wc) + table[i][j + 1] * wc;
    const double bot = table[i + 1][j] * (1.0 - wc) + table[i + 1][j + 1] * wc;
    return top * (1.0 - wr) + bot * wr;
}

double psi1(double nu_alpha, double nu_beta) {
    return bilinear(alpha_table, nu_alpha_grid, nu_beta_grid, nu_alpha, std::abs(nu_beta));
}

double psi2(double nu_alpha, double nu_beta) {
    const double v = bilinear(beta_table, nu_alpha_grid, nu_beta_grid, nu_alpha, std::abs(nu_beta));
    return nu_beta >= 0.0 ? v : -v;
}

struct ScaleTables {
    double nu_c[16][5];
    double nu_zeta[16][5];
    ScaleTables() {
        for (std::size_t i = 0; i < 16; ++i)
            for (std::size_t j = 0; j < 5; ++j) {
                nu_c[i][j] = nu_c_table_desc[15 - i][j];
                nu_zeta[i][j] = nu_zeta_table_desc[15 - i][j];
            }
    }
};

const ScaleTables& scale_tables() {
    static const ScaleTables t;
    return t;
}

double phi3(double alpha, double beta) {
    return bilinear(scale_tables().nu_c, alpha_grid_ascending, beta_grid, alpha, std::abs(beta));
}

double phi5(double alpha, double beta) {
    const double v =
        bilinear(scale_tables().nu_zeta, alpha_grid_ascending, beta_grid, alpha, std::abs(beta));
    return beta >= 0.0 ? v : -v;
}

} // namespace

} // namespace detail

StableParams quantile_initial_params(std::span<const double> samples) {
    if (samples.size() < 5) throw ValidationError("quantile initialization needs at least 5 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    const double p05 = detail::percentile_sorted(sorted, 5.0);
    const double p25 = detail::percentile_sorted(sorted, 25.0);
    const double p50 = detail::percentile_sorted(sorted, 50.0);
    const double p75 = detail::percentile_sorted(sorted, 75.0);
    const double p95 = detail::percentile_sorted(sorted, 95.0);

    if (!(p95 > p05) || !(p75 > p25))
        throw ValidationError("quantile initialization: degenerate sample (zero interquantile range)");

    const double nu_alpha = (p95 - p05) / (p75 - p25);
    const double nu_beta = (p95 + p05 - 2.0 * p50) / (p95 - p05);

    double alpha;
    double beta;
    if (nu_alpha >= 2.439) {
        alpha = std::clamp(detail::psi1(nu_alpha, nu_beta), 1e-16, 2.0);
        beta = std::clamp(detail::psi2(nu_alpha, nu_beta), -1.0, 1.0);
    } else {
        alpha = 2.0;
        beta = nu_beta > 0.0 ? 1.0 : (nu_beta < 0.0 ? -1.0 : 0.0);
    }

    const double c = (p75 - p25) / detail::phi3(alpha, beta);
    const double zeta = p50 + c * detail::phi5(alpha, beta);

    StableParams out;
    out.alpha = alpha;
    out.beta = beta;
    out.gamma = c;
    // Location in this parameterization: for alpha != 1 it equals zeta; on the
    // alpha == 1 branch the skew correction is logarithmic in the scale.
    out.mu0 = (alpha == 1.0) ? zeta + 2.0 * beta * c * std::log(c) / std::numbers::pi : zeta;
    return out;
}

} // namespace impact
