#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace impact {

/*
 * Stable distributions in the continuous ("S0"-style) parameterization used
 * throughout this project:
 *
 *   alpha in (0, 2]   tail exponent (2 = Gaussian; the skew term vanishes)
 *   beta  in [-1, 1]  skew
 *   gamma > 0         scale
 *   mu0               location
 *
 * Characteristic function, alpha != 1:
 *   phi(k) = exp( -gamma^alpha |k|^alpha
 *                 * [1 + i beta sgn(k) tan(pi alpha/2) ((gamma|k|)^(1-alpha) - 1)]
 *                 + i mu0 k )
 * alpha == 1:
 *   phi(k) = exp( -gamma |k| [1 + i beta (2/pi) sgn(k) log(gamma|k|)] + i mu0 k )
 *
 * alpha within 1e-3 of 1 is evaluated on the alpha == 1 branch; alpha within
 * 1e-9 of 2 uses the exact Gaussian N(mu0, 2 gamma^2) closed forms.
 */
struct StableParams {
    double alpha = 2.0;
    double beta = 0.0;
    double gamma = 1.0;
    double mu0 = 0.0;

    void validate() const; // throws ValidationError on out-of-domain values
};

std::complex<double> stable_cf(double kappa, const StableParams& p);

// Density via Fourier inversion (adaptive Gauss-Kronrod over [0, K_max] with
// oscillation-aware splitting; K_max chosen so |phi(K_max)| < 1e-12) with an
// asymptotic tail series beyond ~30 standardized units. Absolute accuracy in
// the core is ~1e-9.
double stable_pdf(double x, const StableParams& p);

// Integral of the density over [a, b] (piecewise adaptive quadrature).
double stable_mass(double a, double b, const StableParams& p);

// Chambers-Mallows-Stuck sampler (continuity-corrected), deterministic in the
// seed.
std::vector<double> stable_sample(std::size_t n, const StableParams& p, std::uint64_t seed);

/*
 * Maximum-likelihood fit initialized by McCulloch-style quantile estimators.
 * Requires at least 100 samples. Optimizer runs in a smooth reparameterized
 * space (alpha in (0.5, 2), beta in (-1, 1), gamma > 0); parameters that end
 * at an effective bound are reported in boundary_flags ("alpha_upper",
 * "alpha_lower", "beta_lower", "beta_upper").
 */
struct StableFit {
    StableParams params;
    double loglik = 0.0;
    std::size_t n = 0;
    std::vector<std::string> boundary_flags;
};

StableFit fit_stable(std::span<const double> samples);

// Quantile-table initialization alone (exposed for tests and diagnostics).
StableParams quantile_initial_params(std::span<const double> samples);

/*
 * Location/shape summary of a fitted sample: the mode comes from the fitted
 * density (bracketed 1-D maximization); mean, median, standard deviation and
 * classical skewness <(x-<x>)^3>/sigma^3 are sample statistics.
 */
struct DistStats {
    double mode = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0;
    double skewness = 0.0;
};

DistStats dist_stats(std::span<const double> samples, const StableParams& fitted);

namespace detail {

// Standard S1 density evaluated by the two internal methods; exposed so the
// tail series and the quadrature can be cross-validated in their overlap.
double p1_standard(double z, double alpha, double beta);
double p1_quadrature(double z, double alpha, double beta);
double p1_series(double z, double alpha, double beta);

// Shift between this parameterization's standardized argument and the S1
// standard argument: z1 = (x - mu0)/gamma + s1_shift(alpha, beta, gamma).
double s1_shift(double alpha, double beta, double gamma);

// Linear-interpolation percentile (p in [0, 100]) over sorted data.
double percentile_sorted(std::span<const double> sorted, double p);

} // namespace detail

} // namespace impact
