#include "impact/asymmetry.hpp"

#include "impact/errors.hpp"
#include "impact/io.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace impact {

namespace {

// lambda() without the throwing contract: nullopt when the off-diagonal part
// is zero (undefined asymmetry).
std::optional<double> lambda_if_defined(const Eigen::Ref<const Eigen::MatrixXd>& x) {
    const auto n = x.rows();
    double antisym_sq = 0.0; // ||X - X^T||^2
    double offdiag_sq = 0.0; // ||Y||^2
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = x(i, j) - x(j, i);
            antisym_sq += d * d;
            offdiag_sq += x(i, j) * x(i, j);
        }
    }
    if (offdiag_sq == 0.0) return std::nullopt;
    return std::sqrt(antisym_sq) / (2.0 * std::sqrt(offdiag_sq));
}

void check_input(const Eigen::MatrixXd& x, const char* op) {
    if (x.rows() != x.cols()) {
        std::ostringstream os;
        os << op << ": matrix must be square, got " << x.rows() << "x" << x.cols();
        throw ValidationError(os.str());
    }
    if (x.rows() < 2) {
        std::ostringstream os;
        os << op << ": matrix must be at least 2x2, got " << x.rows();
        throw ValidationError(os.str());
    }
    if (!x.allFinite())
        throw ValidationError(std::string(op) + ": matrix has non-finite entries");
}

} // namespace

double lambda(const Eigen::MatrixXd& x) {
    check_input(x, "lambda");
    const auto value = lambda_if_defined(x);
    if (!value)
        throw ValidationError("lambda: asymmetry undefined (off-diagonal part is zero)");
    return *value;
}

double avg_lambda_k(const Eigen::MatrixXd& x, int k) {
    check_input(x, "avg_lambda_k");
    const auto n = static_cast<int>(x.rows());
    if (k < 2 || k > n) {
        std::ostringstream os;
        os << "avg_lambda_k: k must be in [2, " << n << "], got " << k;
        throw ValidationError(os.str());
    }
    double sum = 0.0;
    int defined = 0;
    for (int i = 0; i + k <= n; ++i) {
        if (const auto v = lambda_if_defined(x.block(i, i, k, k))) {
            sum += *v;
            ++defined;
        }
    }
    if (defined == 0) {
        std::ostringstream os;
        os << "avg_lambda_k: all " << (n - k + 1) << " sub-matrices of size " << k
           << " have undefined asymmetry";
        throw ValidationError(os.str());
    }
    return sum / static_cast<double>(defined);
}

double overall_asymmetry(const Eigen::MatrixXd& x) {
    check_input(x, "overall_asymmetry");
    const auto n = static_cast<int>(x.rows());
    double sum = 0.0; // k = 1 contributes 0
    for (int k = 2; k <= n; ++k) sum += avg_lambda_k(x, k);
    return sum / static_cast<double>(n);
}

AsymmetryReport asymmetry_report(const Eigen::MatrixXd& x, const std::string& label) {
    if (x.rows() != x.cols() || x.rows() < 2)
        throw ValidationError("asymmetry_report: matrix must be square with N >= 2");
    Eigen::MatrixXd filled = x;
    std::size_t imputed = 0;
    for (Eigen::Index i = 0; i < filled.rows(); ++i) {
        for (Eigen::Index j = 0; j < filled.cols(); ++j) {
            if (std::isnan(filled(i, j))) {
                filled(i, j) = 0.0;
                ++imputed;
            }
        }
    }
    AsymmetryReport report;
    report.label = label;
    report.imputed_cells = imputed;
    const auto n = static_cast<int>(filled.rows());
    report.avg_lambda.reserve(static_cast<std::size_t>(n));
    report.avg_lambda.push_back(0.0);
    double sum = 0.0;
    for (int k = 2; k <= n; ++k) {
        const double v = avg_lambda_k(filled, k);
        report.avg_lambda.push_back(v);
        sum += v;
    }
    report.overall = sum / static_cast<double>(n);
    return report;
}

void write_asymmetry_csv(const std::filesystem::path& path, const AsymmetryReport& report) {
    std::string out = "k,avg_lambda\n";
    for (std::size_t i = 0; i < report.avg_lambda.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += format_double(report.avg_lambda[i]);
        out += '\n';
    }
    out += "overall,";
    out += format_double(report.overall);
    out += '\n';
    write_text_file(path, out);
}

} // namespace impact
