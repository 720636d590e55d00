#include "qgp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qgp/io.hpp"

namespace qgp {

namespace {

// Set partitions of {0..n-1} as restricted growth strings.
void set_partitions(int n, const std::function<void(const std::vector<int>&)>& emit) {
    std::vector<int> rgs(n, 0), maxv(n, 0);
    if (n == 0) {
        emit(rgs);
        return;
    }
    while (true) {
        emit(rgs);
        int i = n - 1;
        while (i > 0 && rgs[i] == maxv[i - 1] + 1) --i;
        if (i == 0) break;
        rgs[i]++;
        maxv[i] = std::max(maxv[i - 1], rgs[i]);
        for (int j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            maxv[j] = maxv[i];
        }
    }
}

}  // namespace

Partition make_partition(const MetricGraph& g, const CutPattern& pattern, bool classify_flags) {
    if (static_cast<int>(pattern.cuts.size()) > g.num_edges() ||
        static_cast<int>(pattern.blocks.size()) > g.num_vertices())
        throw std::invalid_argument("make_partition: pattern does not fit the graph");

    Partition p;
    p.pattern = pattern;
    p.pattern.cuts.resize(g.num_edges());
    p.pattern.blocks.resize(g.num_vertices());

    // Build the subdivided graph in one pass.
    MetricGraph S;
    p.base_chain.assign(g.num_edges(), {});
    struct Dummy {
        int vertex;  // subdivided vertex id (assigned later)
    };
    std::vector<std::vector<int>> chain(g.num_edges());
    for (int m = 0; m < g.num_edges(); ++m) {
        const auto& cuts = p.pattern.cuts[m];
        double len = g.edges[m].length, prev = 0.0;
        for (double x : cuts) {
            if (!(x > prev) || !(x < len))
                throw std::invalid_argument("make_partition: cut offsets must be strictly increasing in (0,len)");
            prev = x;
        }
        int nseg = static_cast<int>(cuts.size()) + 1;
        for (int i = 0; i < nseg; ++i) {
            double a = (i == 0) ? 0.0 : cuts[i - 1];
            double b = (i == nseg - 1) ? len : cuts[i];
            MetricGraph::Edge e;
            e.id = nseg == 1 ? g.edges[m].id : g.edges[m].id + "." + std::to_string(i);
            e.length = b - a;
            chain[m].push_back(S.num_edges());
            S.edges.push_back(e);
        }
    }
    p.base_chain = chain;
    // original vertices
    std::vector<int> orig_vertex(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) {
        std::vector<int> cls;
        for (int s : g.vertices[v]) {
            int m = MetricGraph::slot_edge(s);
            cls.push_back(MetricGraph::slot_end(s) == 0 ? MetricGraph::slot(chain[m].front(), 0)
                                                        : MetricGraph::slot(chain[m].back(), 1));
        }
        orig_vertex[v] = S.num_vertices();
        S.vertices.push_back(std::move(cls));
        S.vertex_ids.push_back(g.vertex_ids[v]);
        S.dirichlet.push_back(g.dirichlet[v]);
    }
    // dummy vertices at the interior cuts
    std::vector<int> dummies;
    for (int m = 0; m < g.num_edges(); ++m) {
        for (std::size_t i = 0; i + 1 < chain[m].size(); ++i) {
            S.vertices.push_back(
                {MetricGraph::slot(chain[m][i], 1), MetricGraph::slot(chain[m][i + 1], 0)});
            S.vertex_ids.push_back(g.edges[m].id + "@" + std::to_string(i));
            S.dirichlet.push_back(0);
            dummies.push_back(S.num_vertices() - 1);
        }
    }
    S.validate();
    p.subdivided = S;

    // Cut: dummies always split in two; original vertices split per blocks.
    MetricGraph C;
    C.edges = S.edges;
    std::vector<int> cvertex_parent;      // C vertex -> S vertex
    std::vector<char> parent_cut(S.num_vertices(), 0);
    for (int v = 0; v < g.num_vertices(); ++v) {
        const auto& blocks = p.pattern.blocks[v];
        int sv = orig_vertex[v];
        if (blocks.empty()) {
            C.vertices.push_back(S.vertices[sv]);
            C.vertex_ids.push_back(S.vertex_ids[sv]);
            C.dirichlet.push_back(S.dirichlet[sv]);
            cvertex_parent.push_back(sv);
            continue;
        }
        // validate blocks against base slots, translate to subdivided slots
        std::set<int> seen;
        std::size_t total = 0;
        for (const auto& b : blocks) {
            if (b.empty()) throw std::invalid_argument("make_partition: empty block");
            for (int s : b) {
                if (!seen.insert(s).second) throw std::invalid_argument("make_partition: repeated slot in blocks");
                ++total;
            }
        }
        if (total != g.vertices[v].size())
            throw std::invalid_argument("make_partition: blocks must partition the vertex class");
        for (int s : g.vertices[v])
            if (!seen.count(s)) throw std::invalid_argument("make_partition: blocks must partition the vertex class");
        if (blocks.size() > 1) parent_cut[sv] = 1;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            std::vector<int> cls;
            for (int s : blocks[i]) {
                int m = MetricGraph::slot_edge(s);
                cls.push_back(MetricGraph::slot_end(s) == 0 ? MetricGraph::slot(chain[m].front(), 0)
                                                            : MetricGraph::slot(chain[m].back(), 1));
            }
            C.vertices.push_back(std::move(cls));
            C.vertex_ids.push_back(S.vertex_ids[sv] + (blocks.size() > 1 ? "/" + std::to_string(i) : ""));
            C.dirichlet.push_back(S.dirichlet[sv]);
            cvertex_parent.push_back(sv);
        }
    }
    for (int dv : dummies) {
        parent_cut[dv] = 1;
        for (int i = 0; i < 2; ++i) {
            C.vertices.push_back({S.vertices[dv][i]});
            C.vertex_ids.push_back(S.vertex_ids[dv] + "/" + std::to_string(i));
            C.dirichlet.push_back(0);
            cvertex_parent.push_back(dv);
        }
    }
    C.validate();

    for (int v = 0; v < S.num_vertices(); ++v)
        if (parent_cut[v]) p.cut_set.push_back(v);

    // Components of the cut graph are the clusters.
    auto comps = components(C);
    std::vector<int> edge_cluster(S.num_edges(), -1);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        Cluster cl;
        cl.graph = comps[c].graph;
        cl.edge_parent = comps[c].edge_map;  // C and S share edge indexing
        cl.support = comps[c].edge_map;
        for (int e : cl.support) edge_cluster[e] = static_cast<int>(c);
        cl.vertex_parent.resize(comps[c].vertex_map.size());
        for (std::size_t i = 0; i < comps[c].vertex_map.size(); ++i) {
            int sv = cvertex_parent[comps[c].vertex_map[i]];
            cl.vertex_parent[i] = sv;
            if (parent_cut[sv]) cl.cut_vertices.push_back(static_cast<int>(i));
        }
        // mark cut points as Dirichlet on the cluster graph for convenience
        for (int cv : cl.cut_vertices) cl.graph.dirichlet[cv] = 1;
        cl.graph.validate();
        p.clusters.push_back(std::move(cl));
    }

    // Separation set: cut vertices whose incident subdivided edges span >= 2 clusters.
    for (int v : p.cut_set) {
        std::set<int> touch;
        for (int s : S.vertices[v]) touch.insert(edge_cluster[MetricGraph::slot_edge(s)]);
        if (touch.size() >= 2) p.separation_set.push_back(v);
    }
    if (classify_flags) p.flags = classify(p);
    return p;
}

PartitionFlags classify(const Partition& p) {
    PartitionFlags f;
    f.loose = true;
    f.rigid = p.cut_set == p.separation_set;
    if (!f.rigid) return f;

    // faithful: at each cut vertex, each cluster keeps at most one block
    f.faithful = true;
    for (const auto& cl : p.clusters) {
        std::map<int, int> blocks_here;
        for (int cv : cl.cut_vertices) blocks_here[cl.vertex_parent[cv]]++;
        for (auto& [sv, n] : blocks_here)
            if (n > 1) f.faithful = false;
    }
    // internally connected: cluster minus its cut points stays connected
    f.internally_connected = true;
    for (const auto& cl : p.clusters) {
        MetricGraph h = cl.graph;
        // split every cut vertex into singletons
        for (auto it = cl.cut_vertices.rbegin(); it != cl.cut_vertices.rend(); ++it) {
            std::vector<std::vector<int>> singles;
            for (int s : h.vertices[*it]) singles.push_back({s});
            if (singles.size() > 1) h = cut_vertex(h, *it, singles);
        }
        if (!is_connected(h)) f.internally_connected = false;
    }
    // proper: every separating point has degree 2 in the subdivided base
    f.proper = true;
    for (int v : p.separation_set)
        if (p.subdivided.degree(v) != 2) f.proper = false;
    return f;
}

std::vector<std::pair<int, int>> neighbours(const Partition& p) {
    std::vector<int> edge_cluster(p.subdivided.num_edges(), -1);
    for (std::size_t c = 0; c < p.clusters.size(); ++c)
        for (int e : p.clusters[c].support) edge_cluster[e] = static_cast<int>(c);
    std::set<std::pair<int, int>> pairs;
    for (int v : p.separation_set) {
        std::vector<int> touch;
        for (int s : p.subdivided.vertices[v]) touch.push_back(edge_cluster[MetricGraph::slot_edge(s)]);
        std::sort(touch.begin(), touch.end());
        touch.erase(std::unique(touch.begin(), touch.end()), touch.end());
        for (std::size_t i = 0; i < touch.size(); ++i)
            for (std::size_t j = i + 1; j < touch.size(); ++j) pairs.insert({touch[i], touch[j]});
    }
    return {pairs.begin(), pairs.end()};
}

EnergyReport energy(const Partition& p, Problem problem, double p_exponent, const SpectralOptions& opts) {
    EnergyReport rep;
    rep.problem = problem;
    rep.p = p_exponent;
    for (const auto& cl : p.clusters) {
        if (problem == Problem::dirichlet) {
            if (cl.cut_vertices.empty() && !cl.graph.has_dirichlet())
                throw std::invalid_argument("energy: Dirichlet problem needs a cut point in every cluster");
            rep.cluster_values.push_back(lambda1(cl.graph, opts));
        } else {
            rep.cluster_values.push_back(mu2(cl.graph, opts));
        }
    }
    const auto& vals = rep.cluster_values;
    rep.lambda_min = *std::min_element(vals.begin(), vals.end());
    if (std::isinf(p_exponent)) {
        rep.lambda_p = *std::max_element(vals.begin(), vals.end());
    } else {
        if (!(p_exponent > 0)) throw std::invalid_argument("energy: p must be positive or inf");
        double s = 0.0;
        for (double v : vals) s += std::pow(v, p_exponent);
        rep.lambda_p = std::pow(s / vals.size(), 1.0 / p_exponent);
    }
    return rep;
}

bool equipartition_check(const Partition& p, Problem problem, double tol, const SpectralOptions& opts) {
    auto rep = energy(p, problem, std::numeric_limits<double>::infinity(), opts);
    double lo = *std::min_element(rep.cluster_values.begin(), rep.cluster_values.end());
    double hi = *std::max_element(rep.cluster_values.begin(), rep.cluster_values.end());
    return (hi - lo) <= tol * hi;
}

std::optional<std::vector<int>> bipartite_check(const Partition& p) {
    auto adj_pairs = neighbours(p);
    std::vector<std::vector<int>> adj(p.k());
    for (auto [a, b] : adj_pairs) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> color(p.k(), -1);
    for (int start = 0; start < p.k(); ++start) {
        if (color[start] != -1) continue;
        color[start] = 0;
        std::vector<int> stack{start};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int w : adj[u]) {
                if (color[w] == -1) {
                    color[w] = 1 - color[u];
                    stack.push_back(w);
                } else if (color[w] == color[u]) {
                    return std::nullopt;
                }
            }
        }
    }
    return color;
}

std::vector<MetricGraph> rho(const MetricGraph& g, const std::vector<int>& support,
                             const std::vector<int>* boundary_override) {
    std::set<int> sup(support.begin(), support.end());
    for (int e : sup)
        if (e < 0 || e >= g.num_edges()) throw std::invalid_argument("rho: bad support edge");
    // boundary vertices
    std::vector<int> boundary;
    if (boundary_override) {
        boundary = *boundary_override;
    } else {
        for (int v = 0; v < g.num_vertices(); ++v) {
            bool in = false, out = false;
            for (int s : g.vertices[v])
                (sup.count(MetricGraph::slot_edge(s)) ? in : out) = true;
            if (in && out) boundary.push_back(v);
        }
    }
    // subgraph construction helper given block partitions at boundary vertices
    std::vector<int> sup_edges(sup.begin(), sup.end());
    std::vector<int> edge_local(g.num_edges(), -1);
    for (std::size_t i = 0; i < sup_edges.size(); ++i) edge_local[sup_edges[i]] = static_cast<int>(i);
    auto local_slot = [&](int s) {
        return MetricGraph::slot(edge_local[MetricGraph::slot_edge(s)], MetricGraph::slot_end(s));
    };

    std::vector<std::vector<int>> boundary_slots(boundary.size());
    for (std::size_t i = 0; i < boundary.size(); ++i)
        for (int s : g.vertices[boundary[i]])
            if (sup.count(MetricGraph::slot_edge(s))) boundary_slots[i].push_back(s);
    for (std::size_t i = 0; i < boundary.size(); ++i)
        if (boundary_slots[i].empty()) throw std::invalid_argument("rho: boundary vertex without support slot");

    std::vector<MetricGraph> out;
    // enumerate products of set partitions across boundary vertices
    std::vector<std::vector<std::vector<std::vector<int>>>> choices(boundary.size());
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        const auto& slots = boundary_slots[i];
        set_partitions(static_cast<int>(slots.size()), [&](const std::vector<int>& rgs) {
            int nb = rgs.empty() ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
            std::vector<std::vector<int>> blocks(std::max(nb, 1));
            for (std::size_t j = 0; j < slots.size(); ++j) blocks[rgs[j]].push_back(slots[j]);
            choices[i].push_back(blocks);
        });
    }
    std::vector<std::size_t> idx(boundary.size(), 0);
    std::set<int> boundary_set(boundary.begin(), boundary.end());
    while (true) {
        MetricGraph h;
        for (int e : sup_edges) h.edges.push_back(g.edges[e]);
        // interior vertices keep their support slots glued
        for (int v = 0; v < g.num_vertices(); ++v) {
            if (boundary_set.count(v)) continue;
            std::vector<int> cls;
            for (int s : g.vertices[v])
                if (sup.count(MetricGraph::slot_edge(s))) cls.push_back(local_slot(s));
            if (cls.empty()) continue;
            h.vertices.push_back(std::move(cls));
            h.vertex_ids.push_back(g.vertex_ids[v]);
            h.dirichlet.push_back(g.dirichlet[v]);
        }
        for (std::size_t i = 0; i < boundary.size(); ++i) {
            const auto& blocks = choices[i][idx[i]];
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                std::vector<int> cls;
                for (int s : blocks[b]) cls.push_back(local_slot(s));
                h.vertices.push_back(std::move(cls));
                h.vertex_ids.push_back(g.vertex_ids[boundary[i]] + "/" + std::to_string(b));
                h.dirichlet.push_back(1);  // cut points carry the Dirichlet marking
            }
        }
        h.validate();
        if (is_connected(h)) out.push_back(h);
        // next combination
        std::size_t pos = 0;
        while (pos < idx.size()) {
            if (++idx[pos] < choices[pos].size()) break;
            idx[pos] = 0;
            ++pos;
        }
        if (pos == idx.size()) break;
        if (idx.empty()) break;
    }
    if (out.empty()) throw std::invalid_argument("rho: support is not connected");
    return out;
}

// ---------------------------------------------------------------------------
// descriptors, similarity, distance

namespace {

std::vector<int> serialize_pattern(const MetricGraph& g, const std::vector<int>& cut_counts,
                                   const std::vector<std::vector<std::vector<int>>>& blocks) {
    std::vector<int> s;
    s.reserve(4 * g.num_slots());
    for (int m = 0; m < g.num_edges(); ++m) s.push_back(cut_counts[m]);
    for (int v = 0; v < g.num_vertices(); ++v) {
        std::vector<std::vector<int>> bl = blocks[v];
        if (bl.empty()) bl = {g.vertices[v]};
        for (auto& b : bl) std::sort(b.begin(), b.end());
        std::sort(bl.begin(), bl.end());
        s.push_back(-1);  // vertex delimiter
        for (const auto& b : bl) {
            s.push_back(-2);
            for (int x : b) s.push_back(x);
        }
    }
    return s;
}

// Apply a slot automorphism to the combinatorial part of a pattern.
void apply_automorphism(const MetricGraph& g, const std::vector<int>& perm, const std::vector<int>& cut_counts,
                        const std::vector<std::vector<std::vector<int>>>& blocks, std::vector<int>& out_counts,
                        std::vector<std::vector<std::vector<int>>>& out_blocks) {
    out_counts.assign(g.num_edges(), 0);
    out_blocks.assign(g.num_vertices(), {});
    for (int m = 0; m < g.num_edges(); ++m) {
        int im = MetricGraph::slot_edge(perm[MetricGraph::slot(m, 0)]);
        out_counts[im] = cut_counts[m];
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (blocks[v].empty()) continue;
        int iv = g.vertex_of_slot(perm[g.vertices[v][0]]);
        std::vector<std::vector<int>> bl;
        for (const auto& b : blocks[v]) {
            std::vector<int> nb;
            for (int s : b) nb.push_back(perm[s]);
            std::sort(nb.begin(), nb.end());
            bl.push_back(std::move(nb));
        }
        std::sort(bl.begin(), bl.end());
        out_blocks[iv] = std::move(bl);
    }
}

std::vector<int> combinatorics_counts(const MetricGraph& g, const Partition& p) {
    std::vector<int> counts(g.num_edges());
    for (int m = 0; m < g.num_edges(); ++m) counts[m] = static_cast<int>(p.pattern.cuts[m].size());
    return counts;
}

}  // namespace

std::vector<int> pattern_canonical_key(const MetricGraph& g, const std::vector<int>& cut_counts,
                                       const std::vector<std::vector<std::vector<int>>>& blocks,
                                       const std::vector<std::vector<int>>& autos) {
    const int M = g.num_edges();
    const int V = g.num_vertices();
    // flat, allocation-free serialisation of the image pattern per automorphism
    std::vector<int> best, buf;
    std::vector<std::vector<int>> vert_enc(V);  // per image vertex, reused
    std::vector<int> blockbuf;
    std::vector<std::pair<int, int>> spans;
    for (const auto& perm : autos) {
        buf.clear();
        buf.resize(M, 0);
        for (int e = 0; e < M; ++e) buf[MetricGraph::slot_edge(perm[MetricGraph::slot(e, 0)])] = cut_counts[e];
        for (int v = 0; v < V; ++v) {
            int iv = g.vertex_of_slot(perm[g.vertices[v][0]]);
            auto& enc = vert_enc[iv];
            enc.clear();
            if (blocks[v].empty()) {
                enc.push_back(-2);
                for (int s : g.vertices[v]) enc.push_back(perm[s]);
                std::sort(enc.begin() + 1, enc.end());
            } else {
                // encode each block as (-2, sorted slots), then order blocks
                spans.clear();
                blockbuf.clear();
                for (const auto& b : blocks[v]) {
                    int start = static_cast<int>(blockbuf.size());
                    for (int s : b) blockbuf.push_back(perm[s]);
                    std::sort(blockbuf.begin() + start, blockbuf.end());
                    spans.emplace_back(start, static_cast<int>(blockbuf.size()));
                }
                std::sort(spans.begin(), spans.end(), [&](auto a, auto b2) {
                    return std::lexicographical_compare(blockbuf.begin() + a.first, blockbuf.begin() + a.second,
                                                        blockbuf.begin() + b2.first, blockbuf.begin() + b2.second);
                });
                for (auto [s0, s1] : spans) {
                    enc.push_back(-2);
                    for (int i = s0; i < s1; ++i) enc.push_back(blockbuf[i]);
                }
            }
        }
        for (int iv = 0; iv < V; ++iv) {
            buf.push_back(-1);
            buf.insert(buf.end(), vert_enc[iv].begin(), vert_enc[iv].end());
        }
        if (best.empty() || buf < best) best = buf;
    }
    return best;
}

std::vector<int> pattern_descriptor(const MetricGraph& g, const Partition& p) {
    // similarity compares discrete structure only, so the relabeling group is
    // length-blind
    return pattern_canonical_key(g, combinatorics_counts(g, p), p.pattern.blocks,
                                 slot_automorphisms(g, 20000, false));
}

bool similar(const MetricGraph& g, const Partition& a, const Partition& b) {
    if (a.k() != b.k()) return false;
    return pattern_descriptor(g, a) == pattern_descriptor(g, b);
}

double partition_distance(const MetricGraph& g, const Partition& a, const Partition& b) {
    if (a.k() != b.k()) throw std::invalid_argument("partition_distance: partitions are not similar");
    auto counts_a = combinatorics_counts(g, a);
    auto counts_b = combinatorics_counts(g, b);
    auto ser_b = serialize_pattern(g, counts_b, b.pattern.blocks);
    auto autos = slot_automorphisms(g, 20000, false);
    const std::vector<int>* gamma = nullptr;
    for (const auto& perm : autos) {
        std::vector<int> c2;
        std::vector<std::vector<std::vector<int>>> b2;
        apply_automorphism(g, perm, counts_a, a.pattern.blocks, c2, b2);
        if (serialize_pattern(g, c2, b2) == ser_b) {
            gamma = &perm;
            break;
        }
    }
    if (!gamma) throw std::invalid_argument("partition_distance: partitions are not similar");
    const auto& perm = *gamma;

    // subdivided-edge correspondence under gamma
    std::vector<int> seg_image(a.subdivided.num_edges(), -1);
    for (int m = 0; m < g.num_edges(); ++m) {
        int s0 = perm[MetricGraph::slot(m, 0)];
        int im = MetricGraph::slot_edge(s0);
        bool flipped = MetricGraph::slot_end(s0) == 1;
        const auto& ca = a.base_chain[m];
        const auto& cb = b.base_chain[im];
        if (ca.size() != cb.size()) throw std::invalid_argument("partition_distance: pattern mismatch");
        for (std::size_t i = 0; i < ca.size(); ++i)
            seg_image[ca[i]] = flipped ? cb[cb.size() - 1 - i] : cb[i];
    }
    std::vector<int> edge_cluster_b(b.subdivided.num_edges(), -1);
    for (std::size_t c = 0; c < b.clusters.size(); ++c)
        for (int e : b.clusters[c].support) edge_cluster_b[e] = static_cast<int>(c);

    double total = 0.0;
    for (const auto& cl : a.clusters) {
        int target = edge_cluster_b[seg_image[cl.support.front()]];
        double ss = 0.0;
        for (int e : cl.support) {
            if (edge_cluster_b[seg_image[e]] != target)
                throw std::invalid_argument("partition_distance: cluster matching failed");
            double d = a.subdivided.edges[e].length - b.subdivided.edges[seg_image[e]].length;
            ss += d * d;
        }
        total += std::sqrt(ss);
    }
    return total;
}

std::string partition_to_json(const MetricGraph& g, const Partition& p, const EnergyReport* energies) {
    nlohmann::json j;
    j["k"] = p.k();
    nlohmann::json base;
    base["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges) base["edges"].push_back(e.id);
    base["total_length"] = g.total_length();
    j["base"] = base;
    if (energies) {
        nlohmann::json je;
        je["problem"] = energies->problem == Problem::dirichlet ? "dirichlet" : "natural";
        je["p"] = std::isinf(energies->p) ? nlohmann::json("inf") : nlohmann::json(energies->p);
        je["cluster_values"] = energies->cluster_values;
        je["lambda_p"] = energies->lambda_p;
        je["lambda_min"] = energies->lambda_min;
        j["energy"] = je;
    }
    nlohmann::json cuts = nlohmann::json::object();
    for (int m = 0; m < g.num_edges(); ++m)
        if (!p.pattern.cuts[m].empty()) cuts[g.edges[m].id] = p.pattern.cuts[m];
    j["cuts"] = cuts;
    nlohmann::json blocks = nlohmann::json::object();
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (p.pattern.blocks[v].empty()) continue;
        nlohmann::json jb = nlohmann::json::array();
        for (const auto& b : p.pattern.blocks[v]) {
            nlohmann::json slots = nlohmann::json::array();
            for (int s : b) {
                nlohmann::json js = nlohmann::json::array();
                js.push_back(g.edges[MetricGraph::slot_edge(s)].id);
                js.push_back(MetricGraph::slot_end(s) == 0 ? "a" : "b");
                slots.push_back(js);
            }
            jb.push_back(slots);
        }
        blocks[g.vertex_ids[v]] = jb;
    }
    j["blocks"] = blocks;
    j["flags"] = {{"loose", p.flags.loose},
                  {"rigid", p.flags.rigid},
                  {"faithful", p.flags.faithful},
                  {"internally_connected", p.flags.internally_connected},
                  {"proper", p.flags.proper}};
    nlohmann::json supports = nlohmann::json::array();
    for (const auto& cl : p.clusters) {
        nlohmann::json sup = nlohmann::json::array();
        for (int e : cl.support) sup.push_back(p.subdivided.edges[e].id);
        supports.push_back(sup);
    }
    j["supports"] = supports;
    return j.dump(2);
}

}  // namespace qgp
