#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qgp {

/// A compact metric graph: edges carry positive lengths, and the vertex
/// structure is a partition of the edge-endpoint slots.  Slot 2*m is the
/// offset-0 end of edge m, slot 2*m+1 the offset-length end.  A vertex IS
/// its slot class, so cutting through a vertex is a set-partition operation.
struct MetricGraph {
    struct Edge {
        std::string id;
        double length = 0.0;
    };

    std::vector<Edge> edges;
    std::vector<std::vector<int>> vertices;  // slot classes, each sorted
    std::vector<std::string> vertex_ids;
    std::vector<char> dirichlet;  // per vertex

    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_slots() const { return 2 * num_edges(); }
    int degree(int v) const { return static_cast<int>(vertices[v].size()); }
    double total_length() const;
    bool has_dirichlet() const;

    /// slot -> owning vertex; rebuilt by validate()
    const std::vector<int>& slot_vertex() const { return slot_vertex_; }
    int vertex_of_slot(int slot) const { return slot_vertex_[slot]; }

    static int slot(int edge, int end) { return 2 * edge + end; }
    static int slot_edge(int s) { return s / 2; }
    static int slot_end(int s) { return s % 2; }

    int vertex_index(const std::string& id) const;
    int edge_index(const std::string& id) const;

    /// Checks all invariants (slots partitioned, positive lengths) and
    /// rebuilds the slot->vertex map.  Throws std::invalid_argument.
    void validate();

  private:
    std::vector<int> slot_vertex_;
};

/// A point of the graph: an offset in [0, length] along an edge.
struct PointOnGraph {
    int edge = -1;
    double offset = 0.0;
};

/// Length-erased multigraph image of a MetricGraph.
struct DiscreteGraph {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;  // unordered endpoint pairs
};

MetricGraph build_graph(std::vector<std::pair<std::string, double>> edge_spec,
                        std::vector<std::pair<std::string, std::vector<std::pair<std::string, char>>>> vertex_spec,
                        std::vector<std::string> dirichlet_ids = {});

DiscreteGraph discrete_graph(const MetricGraph& g);

/// Result of suppressing degree-two vertices (single-loop components keep
/// one marker vertex).  vertex_position maps each original vertex to its
/// location on the canonical graph.
struct CanonicalForm {
    MetricGraph graph;
    std::vector<PointOnGraph> vertex_position;  // per original vertex
};

CanonicalForm canonicalize(const MetricGraph& g);

struct SubdivideResult {
    MetricGraph graph;
    std::vector<int> new_edges;    // chain replacing the edge, in order
    std::vector<int> new_vertices; // dummy vertices, one per position
};

/// Insert dummy degree-2 vertices at the given strictly increasing interior
/// positions of one edge.  Total length is preserved.
SubdivideResult subdivide(const MetricGraph& g, int edge, const std::vector<double>& positions);

/// Replace a vertex by one new vertex per block.  Edge set and lengths are
/// untouched; Dirichlet marking is inherited by every image.
MetricGraph cut_vertex(const MetricGraph& g, int vertex, const std::vector<std::vector<int>>& blocks);

struct Component {
    MetricGraph graph;
    std::vector<int> edge_map;    // component edge -> parent edge
    std::vector<int> vertex_map;  // component vertex -> parent vertex
};

/// Connected components, ordered by smallest parent edge index.
std::vector<Component> components(const MetricGraph& g);

int component_count(const MetricGraph& g);
bool is_connected(const MetricGraph& g);
bool is_tree(const MetricGraph& g);

/// Shortest-path metric; +infinity across components.
double path_distance(const MetricGraph& g, PointOnGraph a, PointOnGraph b);

/// Euclidean distance of edge-length vectors under an edge bijection that
/// must extend to a discrete-graph isomorphism; throws otherwise.
double graph_space_distance(const MetricGraph& g1, const MetricGraph& g2, const std::vector<int>& edge_bijection);

struct CollapseResult {
    MetricGraph graph;
    std::vector<int> vertex_class;  // original vertex -> new vertex
    std::vector<int> edge_map;      // new edge -> original edge
};

/// Contract the listed edges to points, merging their endpoint classes.
/// The merged vertex is Dirichlet iff any member was.
CollapseResult collapse_zero_edges(const MetricGraph& g, const std::vector<int>& shrink_set);

struct Isomorphism {
    std::vector<int> vertex_map;
    std::vector<int> edge_map;
};

/// Brute-force multigraph isomorphism with degree-sequence pruning.
/// Graphs above ~12 edges are rejected.
std::optional<Isomorphism> discrete_isomorphic(const DiscreteGraph& a, const DiscreteGraph& b);

/// Dirichlet-preserving automorphisms as slot permutations, respecting edge
/// lengths by default (length-blind ones act on the discrete structure only).
/// Falls back to {identity} if the group order exceeds the cap.
std::vector<std::vector<int>> slot_automorphisms(const MetricGraph& g, std::size_t cap = 20000,
                                                 bool respect_lengths = true);

}  // namespace qgp
