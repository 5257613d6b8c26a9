#include "impact/spectra.hpp"

#include "impact/errors.hpp"
#include "impact/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace impact {

namespace {

constexpr double pi = std::numbers::pi;

void check_square(const Eigen::MatrixXd& x, const char* op) {
    if (x.rows() != x.cols()) {
        std::ostringstream os;
        os << op << ": matrix must be square, got " << x.rows() << "x" << x.cols();
        throw ValidationError(os.str());
    }
}

} // namespace

SymmetricAntisymmetric decompose(const Eigen::MatrixXd& x) {
    check_square(x, "decompose");
    SymmetricAntisymmetric parts;
    parts.symmetric = 0.5 * (x + x.transpose());
    parts.antisymmetric = 0.5 * (x - x.transpose());
    return parts;
}

std::vector<double> antisym_eigs(const Eigen::MatrixXd& x_a) {
    check_square(x_a, "antisym_eigs");
    const auto n = x_a.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            if (std::abs(x_a(i, j) + x_a(j, i)) > 1e-12) {
                std::ostringstream os;
                os << "antisym_eigs: input not antisymmetric at (" << i << "," << j
                   << "): |A_ij + A_ji| = " << std::abs(x_a(i, j) + x_a(j, i));
                throw ValidationError(os.str());
            }
        }
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(x_a);
    const auto& sv = svd.singularValues(); // descending, pairs of equal values
    std::vector<double> eigs;
    eigs.reserve(static_cast<std::size_t>(n));
    const auto pairs = n / 2;
    std::vector<double> pos;
    pos.reserve(static_cast<std::size_t>(pairs));
    for (Eigen::Index k = 0; k < pairs; ++k)
        pos.push_back(0.5 * (sv(2 * k) + sv(2 * k + 1)));
    // Descending positive branch -> ascending negative branch first.
    for (double s : pos) eigs.push_back(-s);
    if (n % 2 == 1) eigs.push_back(0.0);
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) eigs.push_back(*it);
    return eigs;
}

Eigen::MatrixXd sommers_sample(const SommersConfig& config) {
    if (config.n < 2) throw ValidationError("sommers_sample: N must be >= 2");
    if (!(config.c >= -1.0 && config.c <= 1.0))
        throw ValidationError("sommers_sample: correlation must lie in [-1, 1]");

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double c = config.c;
    const double ortho = std::sqrt(std::max(0.0, 1.0 - c * c));

    Eigen::MatrixXd m(config.n, config.n);
    for (int i = 0; i < config.n; ++i) {
        m(i, i) = normal(rng);
        for (int j = i + 1; j < config.n; ++j) {
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            m(i, j) = z1;
            m(j, i) = (c == -1.0) ? -z1 : (c == 1.0 ? z1 : c * z1 + ortho * z2);
        }
    }
    return m;
}

double semicircle_density(double y, double b) {
    if (!(b > 0.0)) throw ValidationError("semicircle_density: b must be positive");
    if (std::abs(y) >= b) return 0.0;
    return 2.0 / (pi * b * b) * std::sqrt(b * b - y * y);
}

double semicircle_cdf(double y, double b) {
    if (!(b > 0.0)) throw ValidationError("semicircle_cdf: b must be positive");
    if (y <= -b) return 0.0;
    if (y >= b) return 1.0;
    return 0.5 + y * std::sqrt(b * b - y * y) / (pi * b * b) + std::asin(y / b) / pi;
}

Histogram zero_centered_histogram(const std::vector<double>& values, int nbins) {
    if (values.size() < 2)
        throw ValidationError("zero_centered_histogram: need at least 2 values");
    if (nbins < 0) throw ValidationError("zero_centered_histogram: nbins must be >= 0");
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();
    const double hi = sorted.back();
    if (!(std::isfinite(lo) && std::isfinite(hi)))
        throw ValidationError("zero_centered_histogram: non-finite values");
    if (hi == lo) throw ValidationError("zero_centered_histogram: zero data spread");

    const auto n = sorted.size();
    double h = 0.0;
    if (nbins > 0) {
        h = (hi - lo) / static_cast<double>(nbins);
    } else {
        const auto quart = [&](double p) {
            const double pos = p * static_cast<double>(n - 1);
            const auto k = static_cast<std::size_t>(pos);
            const double w = pos - static_cast<double>(k);
            return sorted[k] + w * (sorted[std::min(k + 1, n - 1)] - sorted[k]);
        };
        const double iqr = quart(0.75) - quart(0.25);
        h = 2.0 * iqr / std::cbrt(static_cast<double>(n));
        if (h <= 0.0) h = (hi - lo) / std::ceil(std::sqrt(static_cast<double>(n)));
    }

    // Edges at (m - 1/2) h: find the minimal covering run of integer m.
    auto edge = [&](long m) { return (static_cast<double>(m) - 0.5) * h; };
    long m_first = static_cast<long>(std::floor(lo / h + 0.5));
    while (edge(m_first) > lo) --m_first;
    long m_last = static_cast<long>(std::ceil(hi / h + 0.5));
    while (edge(m_last) < hi) ++m_last;
    while (m_last - 1 > m_first && edge(m_last - 1) >= hi) --m_last;

    const auto bins = static_cast<std::size_t>(m_last - m_first);
    Histogram out;
    out.edges.reserve(bins + 1);
    for (long m = m_first; m <= m_last; ++m) out.edges.push_back(edge(m));
    std::vector<std::size_t> counts(bins, 0);
    for (double v : sorted) {
        auto idx = static_cast<long>(std::floor((v - out.edges.front()) / h));
        idx = std::clamp<long>(idx, 0, static_cast<long>(bins) - 1);
        // Guard against boundary rounding: keep v inside its bin.
        while (idx > 0 && v < out.edges[static_cast<std::size_t>(idx)]) --idx;
        while (idx + 1 < static_cast<long>(bins) &&
               v >= out.edges[static_cast<std::size_t>(idx) + 1])
            ++idx;
        ++counts[static_cast<std::size_t>(idx)];
    }
    out.density.resize(bins);
    for (std::size_t k = 0; k < bins; ++k)
        out.density[k] =
            static_cast<double>(counts[k]) / (static_cast<double>(n) * h);
    return out;
}

double fit_b_from_histogram(const Histogram& histogram) {
    if (histogram.edges.size() < 2 || histogram.density.size() + 1 != histogram.edges.size())
        throw ValidationError("fit_b_from_histogram: malformed histogram");
    if (histogram.edges.front() > 0.0 || histogram.edges.back() <= 0.0)
        throw NumericError("fit_b_from_histogram: 0 lies outside the histogram range");
    const auto it =
        std::upper_bound(histogram.edges.begin(), histogram.edges.end(), 0.0);
    const auto idx = static_cast<std::size_t>(it - histogram.edges.begin()) - 1;
    const double p0 = histogram.density[std::min(idx, histogram.density.size() - 1)];
    if (p0 <= 0.0)
        throw NumericError("fit_b_from_histogram: estimated p(0) is zero, cannot rescale");
    return 2.0 / (pi * p0);
}

void write_spectrum_csv(const std::filesystem::path& path, const std::vector<double>& eigs) {
    std::string out = "im_lambda\n";
    for (double v : eigs) {
        out += format_double(v);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_spectrum_hist_csv(const std::filesystem::path& path, const Histogram& histogram,
                             double b) {
    std::string out = "left_edge,right_edge,density,semicircle\n";
    for (std::size_t k = 0; k < histogram.density.size(); ++k) {
        const double center = 0.5 * (histogram.edges[k] + histogram.edges[k + 1]);
        out += format_double(histogram.edges[k]);
        out += ',';
        out += format_double(histogram.edges[k + 1]);
        out += ',';
        out += format_double(histogram.density[k]);
        out += ',';
        out += format_double(semicircle_density(center, b));
        out += '\n';
    }
    write_text_file(path, out);
}

} // namespace impact
