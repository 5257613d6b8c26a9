#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace impact {

// Directed impact edge: the matrix cell I(i, j) describes how stock j impacts
// stock i, drawn as an arrow src = j -> dst = i.
struct NetworkEdge {
    int src = 0;
    int dst = 0;
    double weight = 0.0;
};

struct ImpactNetwork {
    int n = 0;
    std::vector<NetworkEdge> edges; // row-major cell order (by dst, then src)
    std::vector<int> in_degree;
    std::vector<int> out_degree;
    // in-degree if in > out, -out-degree if out > in, 0 on a tie.
    std::vector<int> signed_connectivity;
    double mean_offdiag = 0.0;
    double lo_threshold = 0.0;
    double hi_threshold = 0.0;
};

// Network of the off-diagonal cells whose value lies in the half-open band
//   lo_frac * <I> < I_ij <= hi_frac * <I>,
// where <I> is the mean over off-diagonal entries. Requires 0 <= lo < hi.
// An empty band yields an empty (edge-free) network.
ImpactNetwork threshold_network(const Eigen::MatrixXd& entropy_matrix, double lo_frac = 0.6,
                                double hi_frac = 0.75);

// Ascending-rank partition of the N(N-1) off-diagonal values (ties broken by
// (row, col) lexicographic order) into q_count groups of floor(N(N-1)/Q)
// values, the last group absorbing any remainder. Each group yields the
// masked matrix I^(q) (non-group cells zeroed) and the network of exactly the
// group's cells.
struct GroupNetwork {
    int q = 0;               // 1-based group index
    Eigen::MatrixXd masked;  // I with non-group cells set to 0
    ImpactNetwork network;
};

std::vector<GroupNetwork> group_networks(const Eigen::MatrixXd& entropy_matrix, int q_count);

// Deterministic DOT rendering: all nodes (with signed connectivity as an
// attribute), then all edges with their weights.
void write_network_dot(const std::filesystem::path& path, const ImpactNetwork& network,
                       std::span<const std::string> symbols);

// Edge lists as "src,dst,I_ij,group" rows.
void write_edges_csv(const std::filesystem::path& path, const ImpactNetwork& network, int group,
                     std::span<const std::string> symbols);
void write_edges_csv(const std::filesystem::path& path, const std::vector<GroupNetwork>& groups,
                     std::span<const std::string> symbols);

// Long-format per-stock, per-group degree table:
// "symbol,group,in_degree,out_degree,signed_connectivity".
void write_connectivity_by_group_csv(const std::filesystem::path& path,
                                     const std::vector<GroupNetwork>& groups,
                                     std::span<const std::string> symbols);

} // namespace impact
