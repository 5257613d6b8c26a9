#include "impact/entropy.hpp"

#include "impact/errors.hpp"
#include "impact/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace impact {

namespace {

// Pairwise (tree) summation: keeps sums of equal terms exact and bounds
// rounding growth at O(log n).
double pairwise_sum(std::vector<double>& terms) {
    if (terms.empty()) return 0.0;
    std::size_t n = terms.size();
    while (n > 1) {
        std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
        if (n % 2 == 1) {
            terms[half] = terms[n - 1];
            ++half;
        }
        n = half;
    }
    return terms[0];
}

void check_edges(std::span<const double> edges, const char* op) {
    if (edges.size() < 2) throw ValidationError(std::string(op) + ": need at least 2 edges");
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        if (!(edges[k] < edges[k + 1]))
            throw ValidationError(std::string(op) + ": edges must be strictly increasing");
    }
}

// Bin index with the last bin right-closed; out-of-range values clamp to the
// boundary bins (reported through `clamped`).
std::size_t bin_index(double r, std::span<const double> edges, std::size_t* clamped) {
    const std::size_t bins = edges.size() - 1;
    if (r < edges.front()) {
        if (clamped) ++*clamped;
        return 0;
    }
    if (r > edges.back()) {
        if (clamped) ++*clamped;
        return bins - 1;
    }
    const auto it = std::upper_bound(edges.begin(), edges.end(), r);
    const auto idx = static_cast<std::size_t>(it - edges.begin());
    if (idx == 0) return 0;                 // r == edges.front()
    if (idx > bins) return bins - 1;        // r == edges.back(): right-closed last bin
    return idx - 1;
}

std::vector<double> pooled_offdiag_edges(const Eigen::MatrixXd& responses, int k_bins) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < responses.rows(); ++i) {
        for (Eigen::Index j = 0; j < responses.cols(); ++j) {
            if (i == j || std::isnan(responses(i, j))) continue;
            lo = std::min(lo, responses(i, j));
            hi = std::max(hi, responses(i, j));
        }
    }
    if (!(lo < hi))
        throw ValidationError(
            "probability_matrix: off-diagonal responses have no spread to bin");
    std::vector<double> edges(static_cast<std::size_t>(k_bins) + 1);
    const double width = (hi - lo) / static_cast<double>(k_bins);
    for (std::size_t k = 0; k < edges.size(); ++k)
        edges[k] = lo + static_cast<double>(k) * width;
    edges.back() = hi; // exact right end regardless of rounding
    return edges;
}

} // namespace

double spectrum_entropy(std::span<const double> values, int k_bins) {
    if (values.size() < 2)
        throw ValidationError("spectrum_entropy: need at least 2 values");
    if (k_bins < 1) throw ValidationError("spectrum_entropy: need at least 1 bin");
    // NaN never orders before or after anything, so minmax alone would miss it.
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("spectrum_entropy: non-finite values");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (lo == hi) return 0.0;

    const auto bins = static_cast<std::size_t>(k_bins);
    const double width = (hi - lo) / static_cast<double>(k_bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double v : values) {
        auto idx = static_cast<std::size_t>(
            std::min<double>(std::floor((v - lo) / width), static_cast<double>(bins - 1)));
        ++counts[idx];
    }
    const double n = static_cast<double>(values.size());
    std::vector<double> terms;
    terms.reserve(bins);
    for (std::size_t c : counts) {
        if (c == 0) continue; // zero-probability bins contribute nothing
        const double p = static_cast<double>(c) / n;
        terms.push_back(-p * std::log(p));
    }
    return pairwise_sum(terms);
}

std::vector<double> stable_bin_masses(const StableParams& fit, std::span<const double> edges) {
    check_edges(edges, "stable_bin_masses");
    std::vector<double> masses(edges.size() - 1);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        masses[k] = stable_mass(edges[k], edges[k + 1], fit);
        total += masses[k];
    }
    if (!(total > 0.0))
        throw NumericError("stable_bin_masses: fitted law carries no mass over the bin range");
    for (double& m : masses) m /= total;
    return masses;
}

double bin_probability(double r, const StableParams& fit, std::span<const double> edges,
                       std::size_t* clamped) {
    check_edges(edges, "bin_probability");
    if (std::isnan(r)) throw ValidationError("bin_probability: response value is NaN");
    const auto masses = stable_bin_masses(fit, edges);
    return masses[bin_index(r, edges, clamped)];
}

ProbabilityMatrix probability_matrix(const Eigen::MatrixXd& responses, const StableParams& fit,
                                     int k_bins) {
    if (k_bins < 2) throw ValidationError("probability_matrix: need at least 2 bins");
    return probability_matrix(responses, fit, pooled_offdiag_edges(responses, k_bins));
}

ProbabilityMatrix probability_matrix(const Eigen::MatrixXd& responses, const StableParams& fit,
                                     std::span<const double> edges) {
    if (responses.rows() != responses.cols() || responses.rows() < 2)
        throw ValidationError("probability_matrix: responses must be square with N >= 2");
    check_edges(edges, "probability_matrix");

    const auto n = responses.rows();
    const auto masses = stable_bin_masses(fit, edges);

    ProbabilityMatrix out;
    out.edges.assign(edges.begin(), edges.end());
    out.p = Eigen::MatrixXd::Zero(n, n);
    out.raw_p0 = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());

    double denom = 0.0;
    std::size_t present = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double r = responses(i, j);
            if (std::isnan(r)) continue;
            if (i == j) {
                // Raw mass recorded for completeness; the probability is 1 by
                // convention and the diagonal never enters the normalization.
                out.raw_p0(i, j) = masses[bin_index(r, edges, nullptr)];
                continue;
            }
            out.raw_p0(i, j) = masses[bin_index(r, edges, &out.clamped)];
            denom += out.raw_p0(i, j);
            ++present;
        }
    }
    if (present == 0)
        throw ValidationError("probability_matrix: all off-diagonal responses missing");
    if (!(denom > 0.0))
        throw NumericError("probability_matrix: off-diagonal bin masses sum to zero");

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                out.p(i, j) = 1.0;
            } else if (!std::isnan(out.raw_p0(i, j))) {
                out.p(i, j) = out.raw_p0(i, j) / denom;
            }
        }
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> row_col_entropies(const Eigen::MatrixXd& p) {
    if (p.rows() != p.cols() || p.rows() < 2)
        throw ValidationError("row_col_entropies: matrix must be square with N >= 2");
    const auto n = p.rows();
    std::vector<double> h_row(static_cast<std::size_t>(n), 0.0);
    std::vector<double> h_col(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = p(i, j);
            if (std::isnan(v) || v < 0.0) {
                std::ostringstream os;
                os << "row_col_entropies: invalid probability " << v << " at (" << i << "," << j
                   << ")";
                throw ValidationError(os.str());
            }
            if (v <= 0.0) continue;
            const double term = -v * std::log(v); // v = 1 (diagonal) gives exactly 0
            h_row[static_cast<std::size_t>(i)] += term;
            h_col[static_cast<std::size_t>(j)] += term;
        }
    }
    return {std::move(h_row), std::move(h_col)};
}

Eigen::MatrixXd impact_entropy_matrix(std::span<const double> row_entropies,
                                      std::span<const double> col_entropies) {
    if (row_entropies.size() != col_entropies.size() || row_entropies.empty())
        throw ValidationError("impact_entropy_matrix: entropy vectors must have equal size");
    const auto n = static_cast<Eigen::Index>(row_entropies.size());
    for (std::size_t k = 0; k < row_entropies.size(); ++k) {
        if (!(row_entropies[k] >= 0.0) || !(col_entropies[k] >= 0.0))
            throw ValidationError("impact_entropy_matrix: entropies must be non-negative");
    }
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out(i, j) = std::sqrt(row_entropies[static_cast<std::size_t>(i)] *
                                  col_entropies[static_cast<std::size_t>(j)]);
    return out;
}

ScatterTable scatter_table(std::span<const std::string> symbols,
                           std::span<const double> row_entropies,
                           std::span<const double> col_entropies,
                           std::span<const double> avg_daily_trades) {
    const auto n = symbols.size();
    if (n == 0 || row_entropies.size() != n || col_entropies.size() != n ||
        avg_daily_trades.size() != n)
        throw ValidationError("scatter_table: all inputs must have the same nonzero length");
    ScatterTable table;
    table.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ScatterRow row;
        row.symbol = symbols[i];
        row.h_row = row_entropies[i];
        row.h_col = col_entropies[i];
        row.i_self = std::sqrt(row_entropies[i] * col_entropies[i]);
        row.avg_daily_trades = avg_daily_trades[i];
        table.rows.push_back(std::move(row));
        table.mean_h_row += row_entropies[i];
        table.mean_h_col += col_entropies[i];
        table.mean_i_self += table.rows.back().i_self;
    }
    const auto dn = static_cast<double>(n);
    table.mean_h_row /= dn;
    table.mean_h_col /= dn;
    table.mean_i_self /= dn;
    return table;
}

void write_entropies_csv(const std::filesystem::path& path, const ScatterTable& table) {
    std::string out = "symbol,h_u,h_v,i_ii,avg_daily_trades\n";
    for (const auto& row : table.rows) {
        out += row.symbol;
        out += ',';
        out += format_double(row.h_row);
        out += ',';
        out += format_double(row.h_col);
        out += ',';
        out += format_double(row.i_self);
        out += ',';
        out += format_double(row.avg_daily_trades);
        out += '\n';
    }
    out += "mean," + format_double(table.mean_h_row) + ',' + format_double(table.mean_h_col) +
           ',' + format_double(table.mean_i_self) + ",\n";
    out += "ref_075," + format_double(0.75 * table.mean_h_row) + ',' +
           format_double(0.75 * table.mean_h_col) + ',' + format_double(0.75 * table.mean_i_self) +
           ",\n";
    write_text_file(path, out);
}

} // namespace impact
