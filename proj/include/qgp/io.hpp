#pragma once

#include <string>

#include "qgp/graph.hpp"

namespace qgp {

/// Graph file format:
/// {"edges":[{"id":str,"length":num}],
///  "vertices":[{"id":str,"slots":[["edgeId","a"|"b"],...]}],
///  "dirichlet":["vertexId",...]}
MetricGraph load_graph_json(const std::string& path);
MetricGraph parse_graph_json(const std::string& text);
std::string graph_to_json(const MetricGraph& g);
void save_graph_json(const MetricGraph& g, const std::string& path);

/// 17-significant-digit float formatting used for all emitted numbers.
std::string format_double(double x);

}  // namespace qgp
