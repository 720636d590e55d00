#pragma once

#include <optional>
#include <vector>

#include "qgp/partition.hpp"

namespace qgp {

struct ZeroSet {
    std::vector<PointOnGraph> interior_zeros;
    std::vector<int> vanishing_vertices;
    std::vector<int> zero_edges;  // edges where the wave vanishes identically
};

ZeroSet zero_set(const MetricGraph& g, const EdgeWave& w);

/// Nodal partition of an eigenfunction: clusters are the sign components of
/// the support after cutting at the zero set; possibly non-exhaustive, in
/// which case the partition lives on the support subgraph.
struct NodalResult {
    double eigenvalue = 0.0;
    ZeroSet zeros;
    int nu = 0;
    MetricGraph support_graph;
    std::vector<int> support_edges;  // support edge -> base edge
    Partition partition;             // over support_graph
};

NodalResult nodal_partition(const MetricGraph& g, const EdgeWave& w, const SpectralOptions& opts = {});

struct CourantReport {
    double eigenvalue = 0.0;
    int kappa = 0;
    std::vector<int> nu;  // per kernel basis function
    bool pass = false;
};

/// Weak Courant check for the k-th natural eigenvalue (1-based).
CourantReport courant_check(const MetricGraph& g, int k_index, const SpectralOptions& opts = {});

struct GlueResult {
    EdgeWave wave;               // on the partition's subdivided base graph
    double residual = 0.0;       // max vertex-condition violation, relative
    std::vector<double> coefficients;
};

/// Glue cluster ground states of a Dirichlet equipartition of a tree into an
/// eigenfunction of the base graph by solving the Kirchhoff constraints at
/// the separating vertices.
std::optional<GlueResult> glue_equipartition(const MetricGraph& g, const Partition& p,
                                             const SpectralOptions& opts = {});

enum class NodalVerdict { nodal, generalised_nodal, neither, inconclusive };

struct GeneralisedNodalReport {
    NodalVerdict verdict = NodalVerdict::neither;
    double energy = 0.0;
    std::vector<double> coefficients;
    std::string note;
};

/// Decide whether an equipartition is nodal / generalised nodal by searching
/// Kirchhoff-consistent gluings of cluster ground states; eigenspaces of
/// dimension > 3 are reported inconclusive.
GeneralisedNodalReport generalised_nodal_check(const MetricGraph& g, const Partition& p,
                                               const SpectralOptions& opts = {});

struct DoubleCover {
    MetricGraph cover;
    std::vector<int> base_edge;     // cover edge -> base edge
    std::vector<int> sheet;        // cover edge -> 0/1
    std::vector<int> sigma_slot;   // deck involution on slots
    std::vector<int> sigma_vertex; // deck involution on vertices
};

/// Two copies of the graph glued crosswise at each marked degree-2 vertex.
DoubleCover build_double_cover(const MetricGraph& g, const std::vector<int>& marked_vertices);

struct ParitySpectrum {
    std::vector<double> antisymmetric;
    std::vector<double> symmetric;
};

/// Eigenvalues of the cover split by parity under the deck involution.
ParitySpectrum antisymmetric_spectrum(const DoubleCover& c, int count, const SpectralOptions& opts = {});

/// JSON report: eigenvalue, zeros, nodal count and the induced partition.
std::string nodal_report_to_json(const MetricGraph& g, const NodalResult& r);

}  // namespace qgp
