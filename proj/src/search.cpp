#include "qgp/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include <json.hpp>

#include "qgp/io.hpp"

namespace qgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    void reset() { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<std::vector<std::vector<int>>> all_set_partitions(const std::vector<int>& elems) {
    std::vector<std::vector<std::vector<int>>> out;
    int n = static_cast<int>(elems.size());
    std::vector<int> rgs(n, 0), maxv(n, 0);
    while (true) {
        int nb = 0;
        for (int i = 0; i < n; ++i) nb = std::max(nb, rgs[i] + 1);
        std::vector<std::vector<int>> blocks(std::max(nb, 1));
        for (int i = 0; i < n; ++i) blocks[rgs[i]].push_back(elems[i]);
        out.push_back(blocks);
        int i = n - 1;
        while (i > 0 && rgs[i] == maxv[i - 1] + 1) --i;
        if (i <= 0) break;
        rgs[i]++;
        maxv[i] = std::max(maxv[i - 1], rgs[i]);
        for (int j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            maxv[j] = maxv[i];
        }
    }
    return out;
}

enum class UnassignedMode { glued, split };

// components of the cut determined by per-edge cut counts and per-vertex
// blocks; vertices not yet assigned are treated per `mode`
int count_components(const MetricGraph& g, const std::vector<int>& counts,
                     const std::vector<std::vector<std::vector<int>>>& blocks, UnionFind& uf,
                     const std::vector<int>& seg_offset, const std::vector<char>& assigned,
                     UnassignedMode mode) {
    uf.reset();
    int nseg = seg_offset.back();
    auto seg_of_slot = [&](int s) {
        int m = MetricGraph::slot_edge(s);
        return MetricGraph::slot_end(s) == 0 ? seg_offset[m] : seg_offset[m] + counts[m];
    };
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (!assigned[v]) {
            if (mode == UnassignedMode::split) continue;
            const auto& cls = g.vertices[v];
            for (std::size_t i = 1; i < cls.size(); ++i) uf.unite(seg_of_slot(cls[0]), seg_of_slot(cls[i]));
        } else if (blocks[v].empty()) {
            const auto& cls = g.vertices[v];
            for (std::size_t i = 1; i < cls.size(); ++i) uf.unite(seg_of_slot(cls[0]), seg_of_slot(cls[i]));
        } else {
            for (const auto& b : blocks[v])
                for (std::size_t i = 1; i < b.size(); ++i) uf.unite(seg_of_slot(b[0]), seg_of_slot(b[i]));
        }
    }
    int roots = 0;
    for (int s = 0; s < nseg; ++s)
        if (uf.find(s) == s) ++roots;
    return roots;
}

}  // namespace

CutPattern CutPatternTemplate::pattern(const MetricGraph& g, const std::vector<double>& positions) const {
    CutPattern c;
    c.cuts.assign(g.num_edges(), {});
    c.blocks = blocks;
    std::size_t idx = 0;
    for (int m = 0; m < g.num_edges(); ++m) {
        int n = cuts_per_edge[m];
        if (n == 0) continue;
        double len = g.edges[m].length;
        double delta = 1e-6 * len;
        std::vector<double> xs(positions.begin() + idx, positions.begin() + idx + n);
        idx += n;
        std::sort(xs.begin(), xs.end());
        for (double& x : xs) x = std::clamp(x, delta, len - delta);
        for (int i = 1; i < n; ++i) xs[i] = std::max(xs[i], xs[i - 1] + 1e-12 * len);
        c.cuts[m] = xs;
    }
    if (idx != positions.size()) throw std::invalid_argument("pattern: position count mismatch");
    return c;
}

std::vector<double> CutPatternTemplate::representative_positions(const MetricGraph& g) const {
    std::vector<double> xs;
    for (int m = 0; m < g.num_edges(); ++m)
        for (int i = 1; i <= cuts_per_edge[m]; ++i)
            xs.push_back(g.edges[m].length * i / (cuts_per_edge[m] + 1.0));
    return xs;
}

std::vector<CutPatternTemplate> enumerate_templates(const MetricGraph& g, int k, const EnumerateOptions& opts) {
    if (k < 1) throw std::invalid_argument("enumerate_templates: k must be >= 1");
    const int M = g.num_edges();
    const int V = g.num_vertices();
    const int cmax = opts.max_cuts_per_edge >= 0 ? opts.max_cuts_per_edge : k - 1;

    auto autos = slot_automorphisms(g);

    // vertex processing order: largest class first (strongest symmetry gain)
    std::vector<int> vorder(V);
    std::iota(vorder.begin(), vorder.end(), 0);
    std::stable_sort(vorder.begin(), vorder.end(), [&](int a, int b) { return g.degree(a) > g.degree(b); });
    const int v0 = vorder.empty() ? -1 : vorder[0];

    // per-vertex partition choices; the first vertex is restricted to orbit
    // representatives under its automorphism stabiliser, and the second to
    // representatives under the stabiliser of the first vertex's choice
    std::vector<std::vector<std::vector<std::vector<int>>>> vchoices(V);
    for (int v = 0; v < V; ++v) vchoices[v] = all_set_partitions(g.vertices[v]);

    auto serialize_blocks = [](std::vector<std::vector<int>> bl) {
        for (auto& b : bl) std::sort(b.begin(), b.end());
        std::sort(bl.begin(), bl.end());
        std::vector<int> s;
        for (const auto& b : bl) {
            s.push_back(-1);
            s.insert(s.end(), b.begin(), b.end());
        }
        return s;
    };
    auto map_blocks = [](const std::vector<std::vector<int>>& bl, const std::vector<int>& perm) {
        std::vector<std::vector<int>> img;
        img.reserve(bl.size());
        for (const auto& b : bl) {
            std::vector<int> nb;
            nb.reserve(b.size());
            for (int s : b) nb.push_back(perm[s]);
            img.push_back(std::move(nb));
        }
        return img;
    };
    auto orbit_reps = [&](const std::vector<std::vector<std::vector<int>>>& choices,
                          const std::vector<std::vector<int>>& group) {
        std::vector<std::vector<std::vector<int>>> reps;
        for (const auto& bl : choices) {
            auto self_key = serialize_blocks(bl);
            bool canonical = true;
            for (const auto& perm : group) {
                if (serialize_blocks(map_blocks(bl, perm)) < self_key) {
                    canonical = false;
                    break;
                }
            }
            if (canonical) reps.push_back(bl);
        }
        return reps;
    };

    std::vector<std::vector<int>> stab0;
    if (v0 >= 0 && autos.size() > 1) {
        for (const auto& perm : autos)
            if (g.vertex_of_slot(perm[g.vertices[v0][0]]) == v0) stab0.push_back(perm);
        if (stab0.size() > 1) vchoices[v0] = orbit_reps(vchoices[v0], stab0);
    }
    // second-vertex reduction, keyed by the first vertex's choice
    const int v1 = V >= 2 ? vorder[1] : -1;
    std::vector<std::vector<std::vector<std::vector<int>>>> v1choices_by_v0;
    bool use_v1_reduction = false;
    if (v1 >= 0 && stab0.size() > 1 && vchoices[v1].size() > 4) {
        std::vector<std::vector<int>> stab01;
        for (const auto& perm : stab0)
            if (g.vertex_of_slot(perm[g.vertices[v1][0]]) == v1) stab01.push_back(perm);
        if (stab01.size() > 1) {
            use_v1_reduction = true;
            for (const auto& choice0 : vchoices[v0]) {
                auto key0 = serialize_blocks(choice0);
                std::vector<std::vector<int>> fix;
                for (const auto& perm : stab01)
                    if (serialize_blocks(map_blocks(choice0, perm)) == key0) fix.push_back(perm);
                v1choices_by_v0.push_back(fix.size() > 1 ? orbit_reps(vchoices[v1], fix) : vchoices[v1]);
            }
        }
    }

    // segment bookkeeping for a given edge-cut assignment
    std::vector<int> counts(M, 0);
    std::vector<int> seg_offset(M + 1, 0);
    std::vector<std::vector<std::vector<int>>> blocks(V);
    long long visited = 0;
    std::vector<std::pair<std::vector<int>, std::vector<std::vector<std::vector<int>>>>> found;

    UnionFind uf(M * (cmax + 1) + 1);

    std::vector<char> assigned(V, 0);
    std::size_t v0_choice_index = 0;
    std::function<void(int)> recurse_vertex = [&](int vi) {
        // bound checks: gluing the remaining vertices minimises the component
        // count, splitting them maximises it
        int lo = count_components(g, counts, blocks, uf, seg_offset, assigned, UnassignedMode::glued);
        if (lo > k) return;
        if (vi == V) {
            ++visited;
            if (visited > opts.cap) throw CapExceeded("enumerate_templates: raw template cap exceeded");
            if (lo == k) found.push_back({counts, blocks});
            return;
        }
        int hi = count_components(g, counts, blocks, uf, seg_offset, assigned, UnassignedMode::split);
        if (hi < k) return;
        int v = vorder[vi];
        const auto& choices =
            (vi == 1 && use_v1_reduction) ? v1choices_by_v0[v0_choice_index] : vchoices[v];
        assigned[v] = 1;
        for (std::size_t ci = 0; ci < choices.size(); ++ci) {
            if (vi == 0) v0_choice_index = ci;
            blocks[v] = choices[ci];
            recurse_vertex(vi + 1);
        }
        blocks[v] = {};
        assigned[v] = 0;
    };

    std::function<void(int)> recurse_edge = [&](int m) {
        if (m == M) {
            seg_offset[0] = 0;
            for (int e = 0; e < M; ++e) seg_offset[e + 1] = seg_offset[e] + counts[e] + 1;
            recurse_vertex(0);
            return;
        }
        for (int n = 0; n <= cmax; ++n) {
            counts[m] = n;
            recurse_edge(m + 1);
        }
        counts[m] = 0;
    };
    recurse_edge(0);

    // deduplicate by canonical key, classify, filter
    std::map<std::vector<int>, CutPatternTemplate> dedup;
    for (auto& [cnt, blk] : found) {
        auto key = pattern_canonical_key(g, cnt, blk, autos);
        if (dedup.count(key)) continue;
        CutPatternTemplate t;
        t.cuts_per_edge = cnt;
        t.blocks = blk;
        t.k = k;
        t.dim = std::accumulate(cnt.begin(), cnt.end(), 0);
        t.canon_key = key;
        Partition rep = make_partition(g, t.pattern(g, t.representative_positions(g)));
        if (rep.k() != k) continue;  // clamp collisions cannot occur with representative spacing
        t.flags = rep.flags;
        bool keep = true;
        switch (opts.filter) {
            case PartitionClass::rigid: keep = t.flags.rigid; break;
            case PartitionClass::loose: keep = true; break;
            case PartitionClass::proper: keep = t.flags.proper; break;
            case PartitionClass::faithful: keep = t.flags.faithful; break;
            case PartitionClass::internally_connected: keep = t.flags.internally_connected; break;
        }
        if (keep && opts.tree_clusters_only)
            for (const auto& cl : rep.clusters)
                if (!is_tree(cl.graph)) keep = false;
        if (keep) dedup.emplace(key, std::move(t));
    }
    std::vector<CutPatternTemplate> out;
    int idx = 0;
    for (auto& [key, t] : dedup) {
        t.name = "t" + std::to_string(idx++);
        out.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// optimisation

namespace {

// The cut topology of a template is position-independent, so the partition is
// built once and only segment lengths are rewritten per evaluation.
struct Objective {
    const MetricGraph* g;
    const CutPatternTemplate* t;
    Problem problem;
    double p;
    bool maximize;
    const SpectralOptions* spectral;

    Partition proto;
    // per base edge: subdivided segment -> (cluster, cluster-local edge)
    std::vector<std::pair<int, int>> seg_home;  // indexed by subdivided edge

    Objective(const MetricGraph& graph, const CutPatternTemplate& tmpl, Problem prob, double pexp, bool maxi,
              const SpectralOptions& sp)
        : g(&graph), t(&tmpl), problem(prob), p(pexp), maximize(maxi), spectral(&sp) {
        proto = make_partition(graph, tmpl.pattern(graph, tmpl.representative_positions(graph)),
                               /*classify_flags=*/false);
        if (problem == Problem::natural)
            for (auto& cl : proto.clusters)
                std::fill(cl.graph.dirichlet.begin(), cl.graph.dirichlet.end(), 0);
        seg_home.assign(proto.subdivided.num_edges(), {-1, -1});
        for (std::size_t c = 0; c < proto.clusters.size(); ++c)
            for (std::size_t le = 0; le < proto.clusters[c].edge_parent.size(); ++le)
                seg_home[proto.clusters[c].edge_parent[le]] = {static_cast<int>(c), static_cast<int>(le)};
    }

    bool apply_positions(const std::vector<double>& xs) {
        std::size_t idx = 0;
        for (int m = 0; m < g->num_edges(); ++m) {
            int n = t->cuts_per_edge[m];
            if (n == 0) continue;
            double len = g->edges[m].length;
            double delta = 1e-6 * len;
            std::array<double, 16> cut{};
            if (n > 14) return false;
            for (int i = 0; i < n; ++i) cut[i] = xs[idx + i];
            idx += n;
            std::sort(cut.begin(), cut.begin() + n);
            for (int i = 0; i < n; ++i) {
                cut[i] = std::clamp(cut[i], delta, len - delta);
                if (i > 0) cut[i] = std::max(cut[i], cut[i - 1] + 1e-12 * len);
            }
            for (int i = 0; i <= n; ++i) {
                double a = i == 0 ? 0.0 : cut[i - 1];
                double b = i == n ? len : cut[i];
                int seg = proto.base_chain[m][i];
                auto [c, le] = seg_home[seg];
                proto.clusters[c].graph.edges[le].length = b - a;
                proto.subdivided.edges[seg].length = b - a;
            }
        }
        return true;
    }

    double operator()(const std::vector<double>& xs) {
        try {
            if (!apply_positions(xs)) return kInf;
            EnergyReport rep = energy(proto, problem, p, *spectral);
            return maximize ? -rep.lambda_min : rep.lambda_p;
        } catch (const std::exception&) {
            return kInf;
        }
    }

    // the two clusters adjacent to the i-th interior cut (flat coordinate
    // ordering); identical indices mean the cut does not separate them
    std::pair<int, int> cut_clusters(int coord) const {
        int idx = 0;
        for (int m = 0; m < g->num_edges(); ++m) {
            int n = t->cuts_per_edge[m];
            if (coord < idx + n) {
                int i = coord - idx;
                int left = proto.base_chain[m][i];
                int right = proto.base_chain[m][i + 1];
                return {seg_home[left].first, seg_home[right].first};
            }
            idx += n;
        }
        return {-1, -1};
    }

    // max (or min, when maximizing) of the pair of clusters adjacent to the
    // given coordinate; moving that cut affects exactly these two clusters
    double pair_measure(const std::vector<double>& xs, int c1, int c2) {
        try {
            if (!apply_positions(xs)) return kInf;
            EnergyReport rep = energy(proto, problem, p, *spectral);
            double a = rep.cluster_values[c1], b = rep.cluster_values[c2];
            return maximize ? -std::min(a, b) : std::max(a, b);
        } catch (const std::exception&) {
            return kInf;
        }
    }
};

double golden_1d(const std::function<double(double)>& f, double a, double b, double tol, double* xout) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    double xm = 0.5 * (a + b), fm = f(xm);
    *xout = xm;
    return fm;
}

struct NelderMead {
    double reflection = 1.0, expansion = 2.0, contraction = 0.5, shrink = 0.5;
    int max_iter = 500;
    double diameter_tol;

    double run(const std::function<double(const std::vector<double>&)>& f, std::vector<std::vector<double>> simplex,
               std::vector<double>* best) const {
        const int n = static_cast<int>(simplex[0].size());
        std::vector<double> fv(simplex.size());
        for (std::size_t i = 0; i < simplex.size(); ++i) fv[i] = f(simplex[i]);
        for (int iter = 0; iter < max_iter; ++iter) {
            // order
            std::vector<int> idx(simplex.size());
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
            std::vector<std::vector<double>> sx(simplex.size());
            std::vector<double> sf(simplex.size());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                sx[i] = simplex[idx[i]];
                sf[i] = fv[idx[i]];
            }
            simplex = sx;
            fv = sf;
            double diam = 0.0;
            for (std::size_t i = 1; i < simplex.size(); ++i)
                for (int j = 0; j < n; ++j) diam = std::max(diam, std::abs(simplex[i][j] - simplex[0][j]));
            if (diam < diameter_tol) break;
            std::vector<double> centroid(n, 0.0);
            for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
                for (int j = 0; j < n; ++j) centroid[j] += simplex[i][j];
            for (int j = 0; j < n; ++j) centroid[j] /= static_cast<double>(simplex.size() - 1);
            auto blend = [&](double c) {
                std::vector<double> x(n);
                for (int j = 0; j < n; ++j) x[j] = centroid[j] + c * (centroid[j] - simplex.back()[j]);
                return x;
            };
            auto xr = blend(reflection);
            double fr = f(xr);
            if (fr < fv[0]) {
                auto xe = blend(expansion);
                double fe = f(xe);
                if (fe < fr) {
                    simplex.back() = xe;
                    fv.back() = fe;
                } else {
                    simplex.back() = xr;
                    fv.back() = fr;
                }
            } else if (fr < fv[fv.size() - 2]) {
                simplex.back() = xr;
                fv.back() = fr;
            } else {
                auto xc = blend(fr < fv.back() ? contraction : -contraction);
                double fc = f(xc);
                if (fc < std::min(fr, fv.back())) {
                    simplex.back() = xc;
                    fv.back() = fc;
                } else {
                    for (std::size_t i = 1; i < simplex.size(); ++i) {
                        for (int j = 0; j < n; ++j)
                            simplex[i][j] = simplex[0][j] + shrink * (simplex[i][j] - simplex[0][j]);
                        fv[i] = f(simplex[i]);
                    }
                }
            }
        }
        std::size_t bi = std::min_element(fv.begin(), fv.end()) - fv.begin();
        *best = simplex[bi];
        return fv[bi];
    }
};

}  // namespace

TemplateOutcome optimize_template(const MetricGraph& g, const CutPatternTemplate& t, Problem problem, double p,
                                  bool maximize, const SearchOptions& opts) {
    TemplateOutcome out;
    out.name = t.name;
    Objective obj(g, t, problem, p, maximize, opts.spectral);
    const int d = t.dim;
    // per-coordinate edge lengths
    std::vector<double> coord_len;
    for (int m = 0; m < g.num_edges(); ++m)
        for (int i = 0; i < t.cuts_per_edge[m]; ++i) coord_len.push_back(g.edges[m].length);

    double best = kInf;
    std::vector<double> best_x;
    if (d == 0) {
        best = obj({});
    } else if (d == 1) {
        double len = coord_len[0];
        double delta = 1e-6 * len;
        double seed_x = delta, seed_f = kInf;
        for (int i = 0; i < 64; ++i) {
            double x = delta + (len - 2 * delta) * (i + 0.5) / 64.0;
            double f = obj({x});
            if (f < seed_f) {
                seed_f = f;
                seed_x = x;
            }
        }
        double width = (len - 2 * delta) / 64.0;
        double xr;
        double fr = golden_1d([&](double x) { return obj({x}); }, std::max(delta, seed_x - width),
                              std::min(len - delta, seed_x + width), 1e-10 * len, &xr);
        if (fr < seed_f) {
            best = fr;
            best_x = {xr};
        } else {
            best = seed_f;
            best_x = {seed_x};
        }
    } else {
        // multi-start Nelder-Mead: simplex centre + 2d Latin hypercube points
        std::seed_seq seq{static_cast<std::uint64_t>(opts.seed),
                          static_cast<std::uint64_t>(std::hash<std::string>{}(t.name)),
                          static_cast<std::uint64_t>(d)};
        std::mt19937_64 rng(seq);
        std::vector<std::vector<double>> starts;
        {
            std::vector<double> centre(d);
            for (int j = 0; j < d; ++j) centre[j] = 0.5 * coord_len[j];
            starts.push_back(centre);
        }
        const int ns = 2 * d;
        std::vector<std::vector<int>> strata(d);
        for (int j = 0; j < d; ++j) {
            strata[j].resize(ns);
            std::iota(strata[j].begin(), strata[j].end(), 0);
            std::shuffle(strata[j].begin(), strata[j].end(), rng);
        }
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int s = 0; s < ns; ++s) {
            std::vector<double> x(d);
            for (int j = 0; j < d; ++j) {
                double frac = (strata[j][s] + unit(rng)) / ns;
                x[j] = coord_len[j] * (0.02 + 0.96 * frac);
            }
            starts.push_back(x);
        }
        NelderMead nm;
        nm.max_iter = opts.nm_max_iter;
        nm.diameter_tol = 1e-9 * g.total_length();
        for (const auto& s : starts) {
            std::vector<std::vector<double>> simplex{s};
            for (int j = 0; j < d; ++j) {
                auto v = s;
                double step = 0.15 * coord_len[j];
                v[j] = (v[j] + step > coord_len[j]) ? v[j] - step : v[j] + step;
                simplex.push_back(v);
            }
            std::vector<double> xbest;
            double f = nm.run(obj, simplex, &xbest);
            if (f < best) {
                best = f;
                best_x = xbest;
            }
        }
    }
    // golden polish per coordinate; a max-type objective can stall coordinate
    // descent in a diagonal valley, so alternate with warm Nelder-Mead
    // restarts from the incumbent until neither improves
    if (d >= 1 && std::isfinite(best)) {
        NelderMead nm;
        nm.max_iter = opts.nm_max_iter;
        nm.diameter_tol = 1e-9 * g.total_length();
        // minimax objectives are flat in any coordinate whose adjacent
        // clusters are not the current extremum; balancing the adjacent pair
        // never worsens the overall max/min, so polish against the pair
        const bool minimax = maximize || std::isinf(p);
        for (int round = 0; round < 3; ++round) {
            double round_start = best;
            std::vector<double> round_start_x = best_x;
            for (int pass = 0; pass < 4; ++pass) {
                double before = best;
                for (int j = 0; j < d; ++j) {
                    double len = coord_len[j];
                    double delta = 1e-6 * len;
                    auto [c1, c2] = obj.cut_clusters(j);
                    bool use_pair = minimax && c1 >= 0 && c2 >= 0 && c1 != c2;
                    auto x = best_x;
                    double xr;
                    double fr = golden_1d(
                        [&](double xx) {
                            x[j] = xx;
                            return use_pair ? obj.pair_measure(x, c1, c2) : obj(x);
                        },
                        delta, len - delta, 1e-11 * len, &xr);
                    if (use_pair) {
                        // accept if the global objective did not degrade
                        x[j] = xr;
                        double fg = obj(x);
                        if (fg <= best + 1e-12 * std::max(1.0, std::abs(best))) {
                            best = std::min(best, fg);
                            best_x[j] = xr;
                        }
                    } else if (fr < best) {
                        best = fr;
                        best_x[j] = xr;
                    }
                }
                if (best >= before - 1e-12 * std::max(1.0, std::abs(before))) break;
            }
            if (d < 2) break;
            std::vector<std::vector<double>> simplex{best_x};
            for (int j = 0; j < d; ++j) {
                auto v = best_x;
                double step = 0.02 * coord_len[j];
                v[j] = (v[j] + step > coord_len[j]) ? v[j] - step : v[j] + step;
                simplex.push_back(v);
            }
            std::vector<double> xb;
            double fb = nm.run(obj, simplex, &xb);
            if (fb < best) {
                best = fb;
                best_x = xb;
            }
            // line search along the round's net displacement: descends the
            // diagonal valleys that stall per-coordinate moves
            double disp = 0.0;
            for (int j = 0; j < d; ++j) disp += std::abs(best_x[j] - round_start_x[j]);
            if (disp > 1e-13 * g.total_length()) {
                auto along = [&](double s) {
                    auto x = best_x;
                    for (int j = 0; j < d; ++j) x[j] += s * (best_x[j] - round_start_x[j]);
                    return obj(x);
                };
                double sr;
                double fs = golden_1d(along, -1.0, 4.0, 1e-10, &sr);
                if (fs < best) {
                    best = fs;
                    for (int j = 0; j < d; ++j) best_x[j] += sr * (best_x[j] - round_start_x[j]);
                }
            }
            if (best >= round_start - 1e-11 * std::max(1.0, std::abs(round_start))) break;
        }
    }
    if (!std::isfinite(best)) {
        out.failed = true;
        return out;
    }
    // canonicalise the reported positions exactly as the pattern would
    if (d > 0) {
        CutPattern c = t.pattern(g, best_x);
        best_x.clear();
        for (int m = 0; m < g.num_edges(); ++m)
            for (double x : c.cuts[m]) best_x.push_back(x);
    }
    out.value = maximize ? -best : best;
    out.positions = best_x;
    std::size_t ci = 0;
    for (int m = 0; m < g.num_edges(); ++m)
        for (int i = 0; i < t.cuts_per_edge[m]; ++i, ++ci) {
            double len = g.edges[m].length;
            if (best_x[ci] <= 2.5e-6 * len || best_x[ci] >= len * (1 - 2.5e-6)) out.boundary = true;
        }
    return out;
}

// ---------------------------------------------------------------------------
// top level searches

namespace {

struct RankedOutcome {
    TemplateOutcome outcome;
    std::size_t index;
};

std::vector<TemplateOutcome> optimize_all(const MetricGraph& g, const std::vector<CutPatternTemplate>& ts,
                                          Problem problem, double p, bool maximize, const SearchOptions& opts) {
    std::vector<TemplateOutcome> results(ts.size());
    int nthreads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(ts.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= ts.size()) break;
            results[i] = optimize_template(g, ts[i], problem, p, maximize, opts);
            results[i].flags = ts[i].flags;
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return results;
}

OptResult assemble_result(const MetricGraph& g, const std::vector<CutPatternTemplate>& ts,
                          std::vector<TemplateOutcome> results, Problem problem, double p, bool maximize,
                          const SearchOptions& opts, double wall_ms) {
    auto better = [&](double a, double b) { return maximize ? a > b : a < b; };
    int best = -1, best_any = -1;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].failed) continue;
        if (best_any < 0 || better(results[i].value, results[best_any].value)) best_any = static_cast<int>(i);
        if (results[i].boundary) continue;  // adjacent vertex-cut template covers the limit
        if (best < 0 || better(results[i].value, results[best].value)) best = static_cast<int>(i);
    }
    bool degenerate = false;
    if (best < 0) {
        best = best_any;
        degenerate = true;
    }
    if (best < 0) throw std::runtime_error("search: no feasible template");
    OptResult r;
    r.problem = problem;
    r.p = p;
    r.maximize = maximize;
    r.value = results[best].value;
    r.winner = ts[best];
    r.positions = results[best].positions;
    r.audit = std::move(results);
    r.max_cuts_per_edge = opts.enumerate.max_cuts_per_edge >= 0 ? opts.enumerate.max_cuts_per_edge
                                                                : ts.empty() ? 0 : ts.front().k - 1;
    r.wall_ms = wall_ms;
    r.boundary_degenerate = degenerate;
    Partition part = make_partition(g, r.winner.pattern(g, r.positions));
    r.report = energy(part, problem, p, opts.spectral);
    r.flags = part.flags;
    double recomputed = maximize ? r.report.lambda_min : r.report.lambda_p;
    if (std::abs(recomputed - r.value) > 1e-9 * std::max(1.0, std::abs(r.value)))
        r.value = recomputed;  // report the re-evaluated energy
    return r;
}

}  // namespace

Partition OptResult::realize(const MetricGraph& g) const {
    return make_partition(g, winner.pattern(g, positions));
}

OptResult minimize(const MetricGraph& g, int k, Problem problem, double p, PartitionClass cls,
                   const SearchOptions& opts) {
    if (k < 1 || (problem == Problem::dirichlet && k < 2))
        throw std::invalid_argument("minimize: k must be >= 1 (>= 2 for Dirichlet)");
    if (!is_connected(g)) throw std::invalid_argument("minimize: base graph must be connected");
    auto t0 = std::chrono::steady_clock::now();
    EnumerateOptions eo = opts.enumerate;
    eo.filter = cls;
    if (eo.max_cuts_per_edge < 0) eo.max_cuts_per_edge = k - 1;
    // Loose natural minimisers can always be taken with tree clusters.
    if (cls == PartitionClass::loose && problem == Problem::natural) eo.tree_clusters_only = true;
    auto ts = enumerate_templates(g, k, eo);
    if (ts.empty()) throw std::invalid_argument("minimize: no admissible template (k infeasible?)");
    SearchOptions so = opts;
    so.enumerate = eo;
    auto results = optimize_all(g, ts, problem, p, false, so);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return assemble_result(g, ts, std::move(results), problem, p, false, so, ms);
}

OptResult maximize(const MetricGraph& g, int k, Problem problem, const SearchOptions& opts) {
    if (k < 1) throw std::invalid_argument("maximize: k must be >= 1");
    if (!is_connected(g)) throw std::invalid_argument("maximize: base graph must be connected");
    auto t0 = std::chrono::steady_clock::now();
    EnumerateOptions eo = opts.enumerate;
    eo.filter = PartitionClass::rigid;
    if (eo.max_cuts_per_edge < 0) eo.max_cuts_per_edge = k - 1;
    auto ts = enumerate_templates(g, k, eo);
    if (ts.empty()) throw std::invalid_argument("maximize: no admissible template (k infeasible?)");
    SearchOptions so = opts;
    so.enumerate = eo;
    auto results = optimize_all(g, ts, problem, std::numeric_limits<double>::infinity(), true, so);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return assemble_result(g, ts, std::move(results), problem, std::numeric_limits<double>::infinity(), true, so,
                           ms);
}

std::vector<SweepRow> sweep_p(const MetricGraph& g, int k, Problem problem, const std::vector<double>& p_grid,
                              PartitionClass cls, const SearchOptions& opts) {
    if (p_grid.empty()) throw std::invalid_argument("sweep_p: empty grid");
    std::vector<SweepRow> rows;
    std::string prev_winner;
    for (double p : p_grid) {
        OptResult r = minimize(g, k, problem, p, cls, opts);
        SweepRow row;
        row.parameter = p;
        row.value = r.value;
        row.winner = r.winner.name;
        row.positions = r.positions;
        double second = std::numeric_limits<double>::infinity();
        for (const auto& o : r.audit)
            if (!o.failed && o.name != r.winner.name) second = std::min(second, o.value);
        row.runner_up_gap = second - r.value;
        row.template_switch = !prev_winner.empty() && prev_winner != row.winner;
        prev_winner = row.winner;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SweepRow> sweep_length(const MetricGraph& g, int edge, const std::vector<double>& length_grid, int k,
                                   Problem problem, double p, PartitionClass cls, const SearchOptions& opts) {
    if (length_grid.empty()) throw std::invalid_argument("sweep_length: empty grid");
    if (edge < 0 || edge >= g.num_edges()) throw std::invalid_argument("sweep_length: bad edge");
    std::vector<SweepRow> rows;
    std::string prev_winner;
    for (double len : length_grid) {
        MetricGraph h = g;
        h.edges[edge].length = len;
        h.validate();
        OptResult r = minimize(h, k, problem, p, cls, opts);
        SweepRow row;
        row.parameter = len;
        row.value = r.value;
        row.winner = r.winner.name;
        row.positions = r.positions;
        double second = std::numeric_limits<double>::infinity();
        for (const auto& o : r.audit)
            if (!o.failed && o.name != r.winner.name) second = std::min(second, o.value);
        row.runner_up_gap = second - r.value;
        row.template_switch = !prev_winner.empty() && prev_winner != row.winner;
        prev_winner = row.winner;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string opt_result_to_json(const MetricGraph& g, const OptResult& r) {
    nlohmann::json j;
    j["problem"] = r.problem == Problem::dirichlet ? "dirichlet" : "natural";
    j["p"] = std::isinf(r.p) ? nlohmann::json("inf") : nlohmann::json(r.p);
    j["direction"] = r.maximize ? "max-min" : "min";
    j["value"] = r.value;
    j["winner"] = r.winner.name;
    j["positions"] = r.positions;
    j["cluster_values"] = r.report.cluster_values;
    j["flags"] = {{"rigid", r.flags.rigid},
                  {"faithful", r.flags.faithful},
                  {"internally_connected", r.flags.internally_connected},
                  {"proper", r.flags.proper}};
    j["max_cuts_per_edge"] = r.max_cuts_per_edge;
    j["boundary_degenerate"] = r.boundary_degenerate;
    nlohmann::json audit = nlohmann::json::array();
    for (const auto& o : r.audit) {
        nlohmann::json ja;
        ja["template"] = o.name;
        ja["value"] = o.failed ? nlohmann::json(nullptr) : nlohmann::json(o.value);
        ja["boundary"] = o.boundary;
        audit.push_back(ja);
    }
    j["audit"] = audit;
    Partition part = r.realize(g);
    j["partition"] = nlohmann::json::parse(partition_to_json(g, part));
    return j.dump(2);
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& parameter_name) {
    std::string out = parameter_name + ",value,template,switch,runner_up_gap,positions\n";
    for (const auto& r : rows) {
        out += format_double(r.parameter) + "," + format_double(r.value) + "," + r.winner + "," +
               (r.template_switch ? "1" : "0") + "," + format_double(r.runner_up_gap) + ",";
        for (std::size_t i = 0; i < r.positions.size(); ++i) {
            if (i) out += ";";
            out += format_double(r.positions[i]);
        }
        out += "\n";
    }
    return out;
}

}  // namespace qgp
