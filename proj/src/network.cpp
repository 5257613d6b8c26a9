#include "impact/network.hpp"

#include "impact/errors.hpp"
#include "impact/io.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace impact {

namespace {

void check_entropy_matrix(const Eigen::MatrixXd& m, const char* op) {
    if (m.rows() != m.cols() || m.rows() < 2)
        throw ValidationError(std::string(op) + ": matrix must be square with N >= 2");
    if (!m.allFinite())
        throw ValidationError(std::string(op) + ": matrix has non-finite entries");
}

void finalize_degrees(ImpactNetwork& net) {
    net.in_degree.assign(static_cast<std::size_t>(net.n), 0);
    net.out_degree.assign(static_cast<std::size_t>(net.n), 0);
    for (const auto& e : net.edges) {
        ++net.in_degree[static_cast<std::size_t>(e.dst)];
        ++net.out_degree[static_cast<std::size_t>(e.src)];
    }
    net.signed_connectivity.resize(static_cast<std::size_t>(net.n));
    for (std::size_t i = 0; i < net.signed_connectivity.size(); ++i) {
        const int in = net.in_degree[i];
        const int out = net.out_degree[i];
        net.signed_connectivity[i] = in > out ? in : (out > in ? -out : 0);
    }
}

std::string check_symbols(std::span<const std::string> symbols, int n, const char* op) {
    if (static_cast<int>(symbols.size()) != n) {
        std::ostringstream os;
        os << op << ": got " << symbols.size() << " symbols for " << n << " nodes";
        throw ValidationError(os.str());
    }
    return {};
}

void append_edge_rows(std::string& out, const ImpactNetwork& network, int group,
                      std::span<const std::string> symbols) {
    for (const auto& e : network.edges) {
        out += symbols[static_cast<std::size_t>(e.src)];
        out += ',';
        out += symbols[static_cast<std::size_t>(e.dst)];
        out += ',';
        out += format_double(e.weight);
        out += ',';
        out += std::to_string(group);
        out += '\n';
    }
}

} // namespace

ImpactNetwork threshold_network(const Eigen::MatrixXd& entropy_matrix, double lo_frac,
                                double hi_frac) {
    check_entropy_matrix(entropy_matrix, "threshold_network");
    if (!(lo_frac >= 0.0) || !(lo_frac < hi_frac))
        throw ValidationError("threshold_network: need 0 <= lo_frac < hi_frac");

    const auto n = entropy_matrix.rows();
    double mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) mean += entropy_matrix(i, j);
    mean /= static_cast<double>(n * (n - 1));

    ImpactNetwork net;
    net.n = static_cast<int>(n);
    net.mean_offdiag = mean;
    net.lo_threshold = lo_frac * mean;
    net.hi_threshold = hi_frac * mean;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double v = entropy_matrix(i, j);
            if (v > net.lo_threshold && v <= net.hi_threshold)
                net.edges.push_back({static_cast<int>(j), static_cast<int>(i), v});
        }
    }
    finalize_degrees(net);
    return net;
}

std::vector<GroupNetwork> group_networks(const Eigen::MatrixXd& entropy_matrix, int q_count) {
    check_entropy_matrix(entropy_matrix, "group_networks");
    const auto n = entropy_matrix.rows();
    const auto total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1);
    if (q_count < 1) throw ValidationError("group_networks: need at least 1 group");
    if (static_cast<std::size_t>(q_count) > total) {
        std::ostringstream os;
        os << "group_networks: " << q_count << " groups exceed the " << total
           << " off-diagonal values";
        throw ValidationError(os.str());
    }

    struct Cell {
        double value;
        Eigen::Index i, j;
    };
    std::vector<Cell> cells;
    cells.reserve(total);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) cells.push_back({entropy_matrix(i, j), i, j});
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        return std::tie(a.value, a.i, a.j) < std::tie(b.value, b.i, b.j);
    });

    const std::size_t base = total / static_cast<std::size_t>(q_count);
    std::vector<GroupNetwork> groups;
    groups.reserve(static_cast<std::size_t>(q_count));
    std::size_t offset = 0;
    for (int q = 1; q <= q_count; ++q) {
        const std::size_t size =
            (q == q_count) ? total - offset : base; // last group takes the remainder
        GroupNetwork g;
        g.q = q;
        g.masked = Eigen::MatrixXd::Zero(n, n);
        g.network.n = static_cast<int>(n);
        g.network.mean_offdiag = 0.0;

        std::vector<Cell> slice(cells.begin() + static_cast<std::ptrdiff_t>(offset),
                                cells.begin() + static_cast<std::ptrdiff_t>(offset + size));
        if (!slice.empty()) {
            g.network.lo_threshold = slice.front().value; // group value range
            g.network.hi_threshold = slice.back().value;
        }
        std::sort(slice.begin(), slice.end(), [](const Cell& a, const Cell& b) {
            return std::tie(a.i, a.j) < std::tie(b.i, b.j);
        });
        for (const auto& cell : slice) {
            g.masked(cell.i, cell.j) = cell.value;
            g.network.edges.push_back(
                {static_cast<int>(cell.j), static_cast<int>(cell.i), cell.value});
        }
        finalize_degrees(g.network);
        groups.push_back(std::move(g));
        offset += size;
    }
    return groups;
}

void write_network_dot(const std::filesystem::path& path, const ImpactNetwork& network,
                       std::span<const std::string> symbols) {
    check_symbols(symbols, network.n, "write_network_dot");
    std::string out = "digraph impact {\n";
    for (int i = 0; i < network.n; ++i) {
        out += "  \"" + symbols[static_cast<std::size_t>(i)] + "\" [signed_connectivity=" +
               std::to_string(network.signed_connectivity[static_cast<std::size_t>(i)]) + "];\n";
    }
    for (const auto& e : network.edges) {
        out += "  \"" + symbols[static_cast<std::size_t>(e.src)] + "\" -> \"" +
               symbols[static_cast<std::size_t>(e.dst)] + "\" [weight=" + format_double(e.weight) +
               "];\n";
    }
    out += "}\n";
    write_text_file(path, out);
}

void write_edges_csv(const std::filesystem::path& path, const ImpactNetwork& network, int group,
                     std::span<const std::string> symbols) {
    check_symbols(symbols, network.n, "write_edges_csv");
    std::string out = "src,dst,I_ij,group\n";
    append_edge_rows(out, network, group, symbols);
    write_text_file(path, out);
}

void write_edges_csv(const std::filesystem::path& path, const std::vector<GroupNetwork>& groups,
                     std::span<const std::string> symbols) {
    std::string out = "src,dst,I_ij,group\n";
    for (const auto& g : groups) {
        check_symbols(symbols, g.network.n, "write_edges_csv");
        append_edge_rows(out, g.network, g.q, symbols);
    }
    write_text_file(path, out);
}

void write_connectivity_by_group_csv(const std::filesystem::path& path,
                                     const std::vector<GroupNetwork>& groups,
                                     std::span<const std::string> symbols) {
    std::string out = "symbol,group,in_degree,out_degree,signed_connectivity\n";
    for (const auto& g : groups) {
        check_symbols(symbols, g.network.n, "write_connectivity_by_group_csv");
        for (int i = 0; i < g.network.n; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            out += symbols[idx];
            out += ',';
            out += std::to_string(g.q);
            out += ',';
            out += std::to_string(g.network.in_degree[idx]);
            out += ',';
            out += std::to_string(g.network.out_degree[idx]);
            out += ',';
            out += std::to_string(g.network.signed_connectivity[idx]);
            out += '\n';
        }
    }
    write_text_file(path, out);
}

} // namespace impact
