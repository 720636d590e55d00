#pragma once

#include <random>
#include <string>
#include <vector>

#include "qgp/graph.hpp"

namespace qgp {
namespace fixtures {

MetricGraph interval(double length, bool dirichlet_left = false, bool dirichlet_right = false);
MetricGraph loop(double length);
MetricGraph path(const std::vector<double>& lengths);
MetricGraph star(const std::vector<double>& lengths);
MetricGraph pumpkin(const std::vector<double>& lengths);
/// Pendant edge of length `stem` attached to a loop made of two arcs.
MetricGraph lasso(double stem, double arc1, double arc2);
/// Two single-edge loops joined by a handle.
MetricGraph dumbbell(double loop1, double handle, double loop2);
/// The 3-pumpkin with edge lengths (pi, 2pi, 2pi).
MetricGraph pumpkin_H();
/// Loop of two length-1 edges reinforced by two short parallel pairs.
MetricGraph reinforced_loop(double short_len);
/// Handle of length 1 with a chain of two loops (total eps) at each end.
MetricGraph double_dumbbell(double eps);

/// Connected random graph with <= max_edges edges and mild degrees.
MetricGraph random_connected(std::mt19937_64& rng, int max_edges = 6);
MetricGraph random_tree(std::mt19937_64& rng, int edges);

/// Writes the named fixture set as JSON graph files under dir.
std::vector<std::string> write_fixture_files(const std::string& dir);

}  // namespace fixtures
}  // namespace qgp
