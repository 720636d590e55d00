#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qgp/partition.hpp"

namespace qgp {

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PartitionClass { rigid, loose, proper, faithful, internally_connected };

/// Combinatorial cut pattern with symbolic interior-cut positions: per-edge
/// cut counts plus vertex block partitions.  Component count and class flags
/// are position-independent.
struct CutPatternTemplate {
    std::vector<int> cuts_per_edge;
    std::vector<std::vector<std::vector<int>>> blocks;  // base slot ids
    int k = 0;
    int dim = 0;  // number of symbolic positions
    PartitionFlags flags;
    std::vector<int> canon_key;
    std::string name;

    CutPattern pattern(const MetricGraph& g, const std::vector<double>& positions) const;
    std::vector<double> representative_positions(const MetricGraph& g) const;
};

struct EnumerateOptions {
    int max_cuts_per_edge = -1;  // default k-1
    long long cap = 1'000'000;   // raw assignments visited
    PartitionClass filter = PartitionClass::rigid;
    bool tree_clusters_only = false;
};

std::vector<CutPatternTemplate> enumerate_templates(const MetricGraph& g, int k, const EnumerateOptions& opts);

struct SearchOptions {
    EnumerateOptions enumerate;
    SpectralOptions spectral;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: hardware
    int nm_max_iter = 500;
};

struct TemplateOutcome {
    std::string name;
    double value = 0.0;
    std::vector<double> positions;
    bool boundary = false;  // optimum pinned at a position clamp
    bool failed = false;
    PartitionFlags flags;   // position-independent class flags of the template
};

TemplateOutcome optimize_template(const MetricGraph& g, const CutPatternTemplate& t, Problem problem, double p,
                                  bool maximize, const SearchOptions& opts);

struct OptResult {
    Problem problem;
    double p = 0.0;
    bool maximize = false;
    double value = 0.0;
    CutPatternTemplate winner;
    std::vector<double> positions;
    EnergyReport report;
    PartitionFlags flags;
    std::vector<TemplateOutcome> audit;
    int max_cuts_per_edge = 0;
    double wall_ms = 0.0;
    bool boundary_degenerate = false;  // no interior winner existed

    Partition realize(const MetricGraph& g) const;
};

/// Minimal p-energy over all exhaustive partitions of the class.
OptResult minimize(const MetricGraph& g, int k, Problem problem, double p,
                   PartitionClass cls = PartitionClass::rigid, const SearchOptions& opts = {});

/// Max-min energy over exhaustive rigid partitions.
OptResult maximize(const MetricGraph& g, int k, Problem problem, const SearchOptions& opts = {});

struct SweepRow {
    double parameter = 0.0;  // p or edge length
    double value = 0.0;
    std::string winner;
    std::vector<double> positions;
    double runner_up_gap = 0.0;  // winner vs best other template
    bool template_switch = false;
};

std::vector<SweepRow> sweep_p(const MetricGraph& g, int k, Problem problem, const std::vector<double>& p_grid,
                              PartitionClass cls = PartitionClass::rigid, const SearchOptions& opts = {});

std::vector<SweepRow> sweep_length(const MetricGraph& g, int edge, const std::vector<double>& length_grid, int k,
                                   Problem problem, double p, PartitionClass cls = PartitionClass::rigid,
                                   const SearchOptions& opts = {});

std::string opt_result_to_json(const MetricGraph& g, const OptResult& r);
std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& parameter_name);

}  // namespace qgp
