#include "qgp/nodal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace qgp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kZeroEdgeTol = 1e-10;  // relative to the wave amplitude
constexpr double kVertexZeroTol = 1e-8;

double wave_amplitude(const EdgeWave& w) {
    double amp = 0.0;
    for (const auto& c : w.coeff) amp = std::max(amp, std::hypot(c[0], c[1]));
    return amp;
}

}  // namespace

ZeroSet zero_set(const MetricGraph& g, const EdgeWave& w) {
    ZeroSet z;
    double amp = wave_amplitude(w);
    if (amp == 0.0) {
        for (int m = 0; m < g.num_edges(); ++m) z.zero_edges.push_back(m);
        return z;
    }
    std::vector<char> edge_zero(g.num_edges(), 0);
    for (int m = 0; m < g.num_edges(); ++m) {
        double l = g.edges[m].length;
        double r = (w.k == 0.0) ? std::abs(w.coeff[m][0]) + std::abs(w.coeff[m][1]) * l
                                : std::hypot(w.coeff[m][0], w.coeff[m][1]);
        if (r < kZeroEdgeTol * amp) {
            edge_zero[m] = 1;
            z.zero_edges.push_back(m);
            continue;
        }
        if (w.k == 0.0) continue;  // affine with nonzero amplitude: at most a vertex zero
        // zeros of R cos(kx - phi): x = (phi + pi/2 + j*pi) / k
        double phi = std::atan2(w.coeff[m][1], w.coeff[m][0]);
        double guard = std::max(1e-9 * l, 1e-12);
        for (int j = -2;; ++j) {
            double x = (phi + kPi / 2.0 + j * kPi) / w.k;
            if (x >= l - guard) break;
            if (x > guard) z.interior_zeros.push_back({m, x});
        }
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        bool live = false;
        for (int s : g.vertices[v])
            if (!edge_zero[MetricGraph::slot_edge(s)]) live = true;
        if (!live) continue;
        double val = 0.0;
        for (int s : g.vertices[v])
            if (!edge_zero[MetricGraph::slot_edge(s)]) val = std::max(val, std::abs(wave_value_at_slot(g, w, s)));
        if (val < kVertexZeroTol * amp) z.vanishing_vertices.push_back(v);
    }
    return z;
}

NodalResult nodal_partition(const MetricGraph& g, const EdgeWave& w, const SpectralOptions& opts) {
    (void)opts;
    NodalResult res;
    res.eigenvalue = w.k * w.k;
    res.zeros = zero_set(g, w);
    std::set<int> zero(res.zeros.zero_edges.begin(), res.zeros.zero_edges.end());
    if (static_cast<int>(zero.size()) == g.num_edges())
        throw std::invalid_argument("nodal_partition: eigenfunction is numerically zero");

    // support subgraph
    std::vector<int> local_edge(g.num_edges(), -1);
    for (int m = 0; m < g.num_edges(); ++m) {
        if (zero.count(m)) continue;
        local_edge[m] = res.support_graph.num_edges();
        res.support_graph.edges.push_back(g.edges[m]);
        res.support_edges.push_back(m);
    }
    std::vector<int> vlocal(g.num_vertices(), -1);
    for (int v = 0; v < g.num_vertices(); ++v) {
        std::vector<int> cls;
        for (int s : g.vertices[v])
            if (local_edge[MetricGraph::slot_edge(s)] >= 0)
                cls.push_back(MetricGraph::slot(local_edge[MetricGraph::slot_edge(s)], MetricGraph::slot_end(s)));
        if (cls.empty()) continue;
        vlocal[v] = res.support_graph.num_vertices();
        res.support_graph.vertices.push_back(std::move(cls));
        res.support_graph.vertex_ids.push_back(g.vertex_ids[v]);
        res.support_graph.dirichlet.push_back(0);
    }
    res.support_graph.validate();

    CutPattern pattern;
    pattern.cuts.assign(res.support_graph.num_edges(), {});
    pattern.blocks.assign(res.support_graph.num_vertices(), {});
    for (const auto& pz : res.zeros.interior_zeros)
        pattern.cuts[local_edge[pz.edge]].push_back(pz.offset);
    for (auto& c : pattern.cuts) std::sort(c.begin(), c.end());
    for (int v : res.zeros.vanishing_vertices) {
        if (vlocal[v] < 0) continue;
        std::vector<std::vector<int>> singles;
        for (int s : res.support_graph.vertices[vlocal[v]]) singles.push_back({s});
        pattern.blocks[vlocal[v]] = singles;
    }
    res.partition = make_partition(res.support_graph, pattern);
    res.nu = res.partition.k();
    return res;
}

CourantReport courant_check(const MetricGraph& g, int k_index, const SpectralOptions& opts) {
    if (k_index < 1) throw std::invalid_argument("courant_check: 1-based index required");
    SpectralResult sp = eigenvalues(g, k_index + 6, EigMethod::secular, opts);
    CourantReport rep;
    rep.eigenvalue = sp.values[k_index - 1];
    double tol = 1e-8 * (1.0 + rep.eigenvalue);
    int kappa = 0;
    for (std::size_t j = 0; j < sp.values.size(); ++j)
        if (std::abs(sp.values[j] - rep.eigenvalue) < tol) kappa = static_cast<int>(j) + 1;
    rep.kappa = kappa;
    if (rep.eigenvalue < 1e-12) {
        rep.nu.push_back(1);
        rep.pass = 1 <= kappa;
        return rep;
    }
    for (const auto& w : eigenfunction(g, rep.eigenvalue, opts)) {
        NodalResult nr = nodal_partition(g, w, opts);
        rep.nu.push_back(nr.nu);
    }
    rep.pass = true;
    for (int nu : rep.nu)
        if (nu > kappa) rep.pass = false;
    return rep;
}

// ---------------------------------------------------------------------------
// gluing machinery

namespace {

struct GlueEnvironment {
    const Partition* p;
    double common_k = 0.0;
    // one entry per (cluster, ground-basis function)
    struct Column {
        int cluster;
        EdgeWave wave;  // on the cluster graph
    };
    std::vector<Column> columns;
    std::vector<int> constraint_vertices;  // subdivided vertex ids
    Eigen::MatrixXd kirchhoff;             // constraints x columns
};

// Assemble ground-state columns and Kirchhoff constraint rows at the cut
// vertices of the partition.
GlueEnvironment build_glue_environment(const Partition& p, const SpectralOptions& opts) {
    GlueEnvironment env;
    env.p = &p;
    double lam = 0.0;
    std::vector<double> lams;
    for (const auto& cl : p.clusters) {
        double li = lambda1(cl.graph, opts);
        lams.push_back(li);
        lam += li;
    }
    lam /= p.clusters.size();
    env.common_k = std::sqrt(lam);
    for (std::size_t c = 0; c < p.clusters.size(); ++c) {
        auto basis = eigenfunction(p.clusters[c].graph, lams[c], opts);
        for (auto& w : basis) env.columns.push_back({static_cast<int>(c), std::move(w)});
    }
    env.constraint_vertices = p.cut_set;
    const int nc = static_cast<int>(env.constraint_vertices.size());
    env.kirchhoff = Eigen::MatrixXd::Zero(nc, static_cast<int>(env.columns.size()));
    // map subdivided slots into cluster slots
    for (std::size_t j = 0; j < env.columns.size(); ++j) {
        const auto& col = env.columns[j];
        const Cluster& cl = p.clusters[col.cluster];
        for (int r = 0; r < nc; ++r) {
            int sv = env.constraint_vertices[r];
            double sum = 0.0;
            // cluster vertices sitting over sv contribute their inward derivatives
            for (std::size_t cv = 0; cv < cl.vertex_parent.size(); ++cv) {
                if (cl.vertex_parent[cv] != sv) continue;
                for (int s : cl.graph.vertices[static_cast<int>(cv)])
                    sum += wave_inward_derivative(cl.graph, col.wave, s);
            }
            env.kirchhoff(r, static_cast<int>(j)) = sum;
        }
    }
    return env;
}

Eigen::MatrixXd kirchhoff_nullspace(const Eigen::MatrixXd& A) {
    if (A.cols() == 0) return Eigen::MatrixXd(0, 0);
    if (A.rows() == 0) return Eigen::MatrixXd::Identity(A.cols(), A.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? std::max(sv(0), 1.0) : 1.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-8 * smax) ++rank;
    int dim = static_cast<int>(A.cols()) - rank;
    return svd.matrixV().rightCols(dim);
}

EdgeWave materialize(const GlueEnvironment& env, const Eigen::VectorXd& coeff) {
    const Partition& p = *env.p;
    EdgeWave w;
    w.k = env.common_k;
    w.coeff.assign(p.subdivided.num_edges(), {0.0, 0.0});
    for (std::size_t j = 0; j < env.columns.size(); ++j) {
        const auto& col = env.columns[j];
        const Cluster& cl = p.clusters[col.cluster];
        for (std::size_t e = 0; e < cl.edge_parent.size(); ++e) {
            w.coeff[cl.edge_parent[e]][0] += coeff(static_cast<int>(j)) * col.wave.coeff[e][0];
            w.coeff[cl.edge_parent[e]][1] += coeff(static_cast<int>(j)) * col.wave.coeff[e][1];
        }
    }
    return w;
}

double glue_residual(const Partition& p, const EdgeWave& w) {
    MetricGraph base = p.subdivided;
    std::fill(base.dirichlet.begin(), base.dirichlet.end(), 0);
    base.validate();
    return wave_residual(base, w);
}

}  // namespace

std::optional<GlueResult> glue_equipartition(const MetricGraph& g, const Partition& p,
                                             const SpectralOptions& opts) {
    if (!is_tree(g)) throw std::invalid_argument("glue_equipartition: base graph must be a tree");
    if (!equipartition_check(p, Problem::dirichlet, 1e-6, opts))
        throw std::invalid_argument("glue_equipartition: not a Dirichlet equipartition");
    GlueEnvironment env = build_glue_environment(p, opts);
    Eigen::MatrixXd null = kirchhoff_nullspace(env.kirchhoff);
    if (null.cols() == 0) return std::nullopt;
    // prefer a combination activating every cluster
    std::mt19937_64 rng(20240817u);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd best = null.col(0);
    double best_min = -1.0;
    for (int trial = 0; trial < 64; ++trial) {
        Eigen::VectorXd mix(null.cols());
        if (trial < null.cols())
            mix = Eigen::VectorXd::Unit(null.cols(), trial);
        else
            for (int i = 0; i < mix.size(); ++i) mix(i) = gauss(rng);
        Eigen::VectorXd c = null * mix;
        if (c.norm() == 0) continue;
        c.normalize();
        double min_cluster = std::numeric_limits<double>::infinity();
        for (std::size_t cl = 0; cl < env.p->clusters.size(); ++cl) {
            double n = 0.0;
            for (std::size_t j = 0; j < env.columns.size(); ++j)
                if (env.columns[j].cluster == static_cast<int>(cl)) n += c(static_cast<int>(j)) * c(static_cast<int>(j));
            min_cluster = std::min(min_cluster, n);
        }
        if (min_cluster > best_min) {
            best_min = min_cluster;
            best = c;
        }
    }
    GlueResult res;
    res.wave = materialize(env, best);
    res.residual = glue_residual(p, res.wave);
    res.coefficients.assign(best.data(), best.data() + best.size());
    return res;
}

// ---------------------------------------------------------------------------
// generalised nodal check

namespace {

// sorted cluster supports (as sets of subdivided-base edge ids mapped through
// a support injection), used to compare nodal partitions with a reference
std::vector<std::vector<int>> cluster_support_sets(const Partition& p, const std::vector<int>& edge_map) {
    std::vector<std::vector<int>> out;
    for (const auto& cl : p.clusters) {
        std::vector<int> sup;
        for (int e : cl.support) sup.push_back(edge_map.empty() ? e : edge_map[e]);
        std::sort(sup.begin(), sup.end());
        out.push_back(std::move(sup));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

GeneralisedNodalReport generalised_nodal_check(const MetricGraph& g, const Partition& p,
                                               const SpectralOptions& opts) {
    GeneralisedNodalReport rep;
    // equipartition of the Dirichlet problem is necessary
    EnergyReport er = energy(p, Problem::dirichlet, std::numeric_limits<double>::infinity(), opts);
    double lo = *std::min_element(er.cluster_values.begin(), er.cluster_values.end());
    double hi = *std::max_element(er.cluster_values.begin(), er.cluster_values.end());
    rep.energy = 0.5 * (lo + hi);
    if ((hi - lo) > 1e-6 * hi) {
        rep.note = "not an equipartition";
        return rep;
    }
    // energy must match a natural eigenvalue of the base graph
    MetricGraph base = g;
    std::fill(base.dirichlet.begin(), base.dirichlet.end(), 0);
    base.validate();
    int upto = 12;
    SpectralResult sp = eigenvalues(base, upto, EigMethod::secular, opts);
    int match = -1;
    for (int j = 0; j < upto; ++j)
        if (std::abs(sp.values[j] - rep.energy) < 1e-6 * (1.0 + rep.energy)) match = j;
    if (match < 0) {
        rep.note = "energy is not a natural eigenvalue of the base graph";
        return rep;
    }
    if (sp.kernel_dim[match] > 3) {
        rep.verdict = NodalVerdict::inconclusive;
        rep.note = "eigenspace dimension exceeds the exhaustive search cap";
        return rep;
    }

    GlueEnvironment env = build_glue_environment(p, opts);
    Eigen::MatrixXd null = kirchhoff_nullspace(env.kirchhoff);
    if (null.cols() == 0) {
        rep.note = "no Kirchhoff-consistent gluing of cluster ground states";
        return rep;
    }
    // reference supports of p in subdivided-edge terms
    auto ref = cluster_support_sets(p, {});

    bool found_generalised = false;
    std::vector<double> generalised_coeff;
    std::mt19937_64 rng(914151617u);
    std::normal_distribution<double> gauss;
    int tries = 16 + (1 << null.cols());
    for (int trial = 0; trial < tries; ++trial) {
        Eigen::VectorXd mix(null.cols());
        if (trial < (1 << null.cols())) {
            // deterministic sign patterns over the nullspace basis
            for (int i = 0; i < mix.size(); ++i) mix(i) = (trial >> i) & 1 ? -1.0 : 1.0;
        } else {
            for (int i = 0; i < mix.size(); ++i) mix(i) = gauss(rng);
        }
        Eigen::VectorXd c = null * mix;
        if (c.norm() < 1e-12) continue;
        c.normalize();
        EdgeWave w = materialize(env, c);
        if (glue_residual(p, w) > 1e-7) continue;
        MetricGraph sub = p.subdivided;
        std::fill(sub.dirichlet.begin(), sub.dirichlet.end(), 0);
        sub.validate();
        NodalResult nr;
        try {
            nr = nodal_partition(sub, w, opts);
        } catch (const std::exception&) {
            continue;
        }
        auto got = cluster_support_sets(nr.partition, nr.support_edges);
        if (got == ref) {
            rep.verdict = NodalVerdict::nodal;
            rep.coefficients.assign(c.data(), c.data() + c.size());
            return rep;
        }
        // generalised: every nodal cluster contained in exactly one p-cluster,
        // and every p-cluster keeps at least one nodal cluster
        std::vector<int> owner(p.subdivided.num_edges(), -1);
        for (std::size_t ci = 0; ci < p.clusters.size(); ++ci)
            for (int e : p.clusters[ci].support) owner[e] = static_cast<int>(ci);
        bool ok = true;
        std::set<int> covered;
        for (const auto& sup : got) {
            std::set<int> owners;
            for (int e : sup) owners.insert(owner[e]);
            if (owners.size() != 1) ok = false;
            covered.insert(*owners.begin());
        }
        if (ok && static_cast<int>(covered.size()) == p.k() && !found_generalised) {
            found_generalised = true;
            generalised_coeff.assign(c.data(), c.data() + c.size());
        }
    }
    if (found_generalised) {
        rep.verdict = NodalVerdict::generalised_nodal;
        rep.coefficients = generalised_coeff;
        return rep;
    }
    rep.note = "no gluing reproduces the partition";
    return rep;
}

// ---------------------------------------------------------------------------
// double covers

DoubleCover build_double_cover(const MetricGraph& g, const std::vector<int>& marked_vertices) {
    for (int v : marked_vertices) {
        if (v < 0 || v >= g.num_vertices()) throw std::invalid_argument("build_double_cover: bad vertex");
        if (g.degree(v) != 2) throw std::invalid_argument("build_double_cover: marked vertex must have degree 2");
    }
    std::set<int> marked(marked_vertices.begin(), marked_vertices.end());
    const int M = g.num_edges();
    DoubleCover dc;
    for (int t = 0; t < 2; ++t)
        for (int m = 0; m < M; ++m) {
            MetricGraph::Edge e = g.edges[m];
            e.id += t == 0 ? "#0" : "#1";
            dc.cover.edges.push_back(e);
            dc.base_edge.push_back(m);
            dc.sheet.push_back(t);
        }
    auto lift = [&](int t, int s) {
        return MetricGraph::slot(t * M + MetricGraph::slot_edge(s), MetricGraph::slot_end(s));
    };
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (marked.count(v)) {
            int s1 = g.vertices[v][0], s2 = g.vertices[v][1];
            // crosswise gluing: the sheets swap when passing the marked point
            dc.cover.vertices.push_back({lift(0, s1), lift(1, s2)});
            dc.cover.vertex_ids.push_back(g.vertex_ids[v] + "#a");
            dc.cover.dirichlet.push_back(g.dirichlet[v]);
            dc.cover.vertices.push_back({lift(1, s1), lift(0, s2)});
            dc.cover.vertex_ids.push_back(g.vertex_ids[v] + "#b");
            dc.cover.dirichlet.push_back(g.dirichlet[v]);
        } else {
            for (int t = 0; t < 2; ++t) {
                std::vector<int> cls;
                for (int s : g.vertices[v]) cls.push_back(lift(t, s));
                dc.cover.vertices.push_back(std::move(cls));
                dc.cover.vertex_ids.push_back(g.vertex_ids[v] + (t == 0 ? "#0" : "#1"));
                dc.cover.dirichlet.push_back(g.dirichlet[v]);
            }
        }
    }
    dc.cover.validate();
    dc.sigma_slot.resize(2 * dc.cover.num_edges());
    for (int m = 0; m < M; ++m)
        for (int end = 0; end < 2; ++end) {
            dc.sigma_slot[MetricGraph::slot(m, end)] = MetricGraph::slot(M + m, end);
            dc.sigma_slot[MetricGraph::slot(M + m, end)] = MetricGraph::slot(m, end);
        }
    dc.sigma_vertex.resize(dc.cover.num_vertices());
    for (int v = 0; v < dc.cover.num_vertices(); ++v)
        dc.sigma_vertex[v] = dc.cover.vertex_of_slot(dc.sigma_slot[dc.cover.vertices[v][0]]);
    // invariants
    for (int v = 0; v < dc.cover.num_vertices(); ++v) {
        if (dc.sigma_vertex[dc.sigma_vertex[v]] != v) throw std::logic_error("double cover: sigma not involutive");
        if (dc.sigma_vertex[v] == v) throw std::logic_error("double cover: sigma has a fixed point");
    }
    for (int v = 0; v < dc.cover.num_vertices(); ++v)
        for (int s : dc.cover.vertices[v])
            if (dc.cover.vertex_of_slot(dc.sigma_slot[s]) != dc.sigma_vertex[v])
                throw std::logic_error("double cover: sigma is not a graph map");
    return dc;
}

ParitySpectrum antisymmetric_spectrum(const DoubleCover& dc, int count, const SpectralOptions& opts) {
    ParitySpectrum out;
    int window = 2 * count + 4;
    SpectralResult sp = eigenvalues(dc.cover, window, EigMethod::secular, opts);
    const int M = dc.cover.num_edges();
    std::size_t i = 0;
    while (i < sp.values.size() &&
           (static_cast<int>(out.antisymmetric.size()) < count || static_cast<int>(out.symmetric.size()) < count)) {
        double lam = sp.values[i];
        std::size_t j = i;
        while (j < sp.values.size() && std::abs(sp.values[j] - lam) < 1e-8 * (1.0 + lam)) ++j;
        auto basis = eigenfunction(dc.cover, lam, opts);
        int m = static_cast<int>(basis.size());
        // sigma action matrix on the (orthonormal) eigenspace
        Eigen::MatrixXd S(m, m);
        for (int a = 0; a < m; ++a) {
            EdgeWave wa;
            wa.k = basis[a].k;
            wa.coeff.resize(M);
            for (int e = 0; e < M; ++e) {
                int se = MetricGraph::slot_edge(dc.sigma_slot[MetricGraph::slot(e, 0)]);
                wa.coeff[e] = basis[a].coeff[se];
            }
            for (int b = 0; b < m; ++b) S(a, b) = wave_inner_product(dc.cover, wa, basis[b]);
        }
        double tr = S.trace();
        if (std::abs(tr - std::round(tr)) > 1e-6 || ((m - static_cast<long>(std::round(tr))) % 2) != 0)
            throw std::runtime_error("antisymmetric_spectrum: parity projection is ambiguous");
        int anti = (m - static_cast<int>(std::round(tr))) / 2;
        for (int a = 0; a < anti; ++a) out.antisymmetric.push_back(lam);
        for (int a = 0; a < m - anti; ++a) out.symmetric.push_back(lam);
        i = j;
    }
    if (static_cast<int>(out.antisymmetric.size()) > count) out.antisymmetric.resize(count);
    if (static_cast<int>(out.symmetric.size()) > count) out.symmetric.resize(count);
    return out;
}

std::string nodal_report_to_json(const MetricGraph& g, const NodalResult& r) {
    nlohmann::json j;
    j["eigenvalue"] = r.eigenvalue;
    j["nu"] = r.nu;
    nlohmann::json zeros = nlohmann::json::array();
    for (const auto& z : r.zeros.interior_zeros) {
        nlohmann::json jz;
        jz["edge"] = g.edges[z.edge].id;
        jz["offset"] = z.offset;
        zeros.push_back(jz);
    }
    j["interior_zeros"] = zeros;
    nlohmann::json vv = nlohmann::json::array();
    for (int v : r.zeros.vanishing_vertices) vv.push_back(g.vertex_ids[v]);
    j["vanishing_vertices"] = vv;
    nlohmann::json ze = nlohmann::json::array();
    for (int m : r.zeros.zero_edges) ze.push_back(g.edges[m].id);
    j["zero_edges"] = ze;
    nlohmann::json sup = nlohmann::json::array();
    for (int m : r.support_edges) sup.push_back(g.edges[m].id);
    j["support"] = sup;
    j["exhaustive"] = r.support_edges.size() == static_cast<std::size_t>(g.num_edges());
    j["partition"] = nlohmann::json::parse(partition_to_json(r.support_graph, r.partition));
    return j.dump(2);
}

}  // namespace qgp
