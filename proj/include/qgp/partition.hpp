#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgp/graph.hpp"
#include "qgp/spectral.hpp"

namespace qgp {

/// Combinatorial cut description: per-edge interior cut offsets (each dummy
/// vertex created there is always split into two singletons) plus a
/// set-partition of each vertex's slot class.  An empty blocks entry means
/// the vertex is left uncut.
struct CutPattern {
    std::vector<std::vector<double>> cuts;                // per base edge, sorted offsets
    std::vector<std::vector<std::vector<int>>> blocks;    // per base vertex, partition of slot ids
};

struct PartitionFlags {
    bool loose = true;
    bool rigid = false;
    bool faithful = false;
    bool internally_connected = false;
    bool proper = false;
};

struct Cluster {
    MetricGraph graph;              // cut points carried in graph.dirichlet for reference only
    std::vector<int> support;       // subdivided-base edge ids
    std::vector<int> cut_vertices;  // cluster vertex ids that are cut points
    std::vector<int> vertex_parent; // cluster vertex -> subdivided vertex
    std::vector<int> edge_parent;   // cluster edge -> subdivided edge
};

/// An exhaustive partition of a base graph determined by a cut pattern:
/// clusters are all connected components of the cut.
struct Partition {
    CutPattern pattern;
    MetricGraph subdivided;                    // base with dummy vertices at the interior cuts
    std::vector<std::vector<int>> base_chain;  // base edge -> chain of subdivided edges
    std::vector<Cluster> clusters;
    std::vector<int> cut_set;         // subdivided vertex ids, nontrivially cut
    std::vector<int> separation_set;  // subset of cut_set on >= 2 support boundaries
    PartitionFlags flags;

    int k() const { return static_cast<int>(clusters.size()); }
};

/// classify_flags=false skips the classification (it is position-independent,
/// so repeated builds within one template do not need it).
Partition make_partition(const MetricGraph& g, const CutPattern& pattern, bool classify_flags = true);

PartitionFlags classify(const Partition& p);

/// Cluster pairs whose support boundaries intersect.
std::vector<std::pair<int, int>> neighbours(const Partition& p);

enum class Problem { dirichlet, natural };

struct EnergyReport {
    Problem problem;
    double p = 0.0;  // INFINITY for the max
    std::vector<double> cluster_values;
    double lambda_p = 0.0;
    double lambda_min = 0.0;
};

/// Per-cluster lambda_1 (Dirichlet at the cut points) or mu_2, combined into
/// the p-mean energy and the min energy.
EnergyReport energy(const Partition& p, Problem problem, double p_exponent,
                    const SpectralOptions& opts = {});

bool equipartition_check(const Partition& p, Problem problem, double tol = 1e-8,
                         const SpectralOptions& opts = {});

/// Sign assignment with neighbours differently signed, if one exists.
std::optional<std::vector<int>> bipartite_check(const Partition& p);

/// All rigid clusters over a connected edge-subset support: one per choice of
/// block sub-partition at each boundary vertex that keeps the result
/// connected.  boundary_override supplies the boundary vertices when the
/// support is the whole graph (e.g. a cluster of a wider partition).
std::vector<MetricGraph> rho(const MetricGraph& g, const std::vector<int>& support,
                             const std::vector<int>* boundary_override = nullptr);

/// Canonical combinatorial descriptor of a partition's pattern (cut counts,
/// block structure and cluster topology), minimised over base-graph
/// automorphisms.  Two partitions of the same base are similar iff their
/// descriptors coincide.
std::vector<int> pattern_descriptor(const MetricGraph& g, const Partition& p);

/// Same canonical key for a bare (cut-count, blocks) combinatorial pattern;
/// `autos` is the slot-automorphism list of g.
std::vector<int> pattern_canonical_key(const MetricGraph& g, const std::vector<int>& cut_counts,
                                       const std::vector<std::vector<std::vector<int>>>& blocks,
                                       const std::vector<std::vector<int>>& autos);

bool similar(const MetricGraph& g, const Partition& a, const Partition& b);

/// Sum over matched clusters of the edge-length-vector Euclidean distance.
/// Requires similar(a, b).
double partition_distance(const MetricGraph& g, const Partition& a, const Partition& b);

std::string partition_to_json(const MetricGraph& g, const Partition& p,
                              const EnergyReport* energies = nullptr);

}  // namespace qgp
