#include "qgp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "qgp/fixtures.hpp"
#include "qgp/io.hpp"
#include "qgp/nodal.hpp"
#include "qgp/search.hpp"

namespace qgp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ctx {
    double tol = 1.0;  // tolerance scale
    int threads = 0;
    std::ostringstream log;
    bool ok = true;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << "FAILED: " << what << "; ";
        }
    }
    void near(double got, double want, double rel, const std::string& what) {
        double d = std::abs(got - want);
        if (d > rel * tol * std::max(1.0, std::abs(want))) {
            ok = false;
            log << "FAILED: " << what << " got " << format_double(got) << " want " << format_double(want)
                << " (|d|=" << format_double(d) << "); ";
        }
    }
};

SearchOptions search_opts(const Ctx& c) {
    SearchOptions o;
    o.threads = c.threads;
    o.seed = 12345;
    return o;
}

using CheckFn = std::function<void(Ctx&)>;

// ---------------------------------------------------------------------------

void check_exact_spectra(Ctx& c) {
    c.near(mu2(fixtures::interval(1.0)), kPi * kPi, 1e-9, "mu2(interval)");
    c.near(lambda1(fixtures::interval(1.0, true, false)), kPi * kPi / 4.0, 1e-9, "lambda1(interval DN)");
    c.near(mu2(fixtures::loop(1.0)), 4.0 * kPi * kPi, 1e-9, "mu2(loop)");
    c.near(mu2(fixtures::star({1.0, 1.0, 1.0})), kPi * kPi / 4.0, 1e-9, "mu2(3-star)");
}

void check_von_below(Ctx& c) {
    MetricGraph H = fixtures::pumpkin_H();
    // subdivide the two long edges at their midpoints: equilateral on 5 edges
    auto s1 = subdivide(H, 1, {kPi});
    auto s2 = subdivide(s1.graph, 2, {kPi});
    MetricGraph He = s2.graph;
    SpectralResult oracle = von_below_equilateral(He, 6);
    SpectralResult sec = eigenvalues(H, 6);
    for (int i = 0; i < 6; ++i) c.near(sec.values[i], oracle.values[i], 1e-9, "H eigenvalue " + std::to_string(i + 1));
    c.near(sec.values[4], 1.0, 1e-9, "mu5(H)");
    c.expect(sec.kernel_dim[4] == 1, "mu5(H) simple");
    // secular and fem agree within combined estimates
    SpectralResult cx = eigenvalues(H, 5, EigMethod::cross_check);
    c.expect(cx.method == "cross-check", "cross-check ran");
}

// best value among templates that neither failed nor degenerated to a clamp
// (boundary optima approximate the winner's own limit partition)
double runner_up(const OptResult& r) {
    double second = kInf;
    for (const auto& o : r.audit)
        if (!o.failed && !o.boundary && o.name != r.winner.name) second = std::min(second, o.value);
    return second;
}

void check_pumpkin3_neumann(Ctx& c) {
    MetricGraph g = fixtures::pumpkin({1.0, 1.0, 1.0});
    for (double p : {1.0, 2.0, kInf}) {
        OptResult r = minimize(g, 2, Problem::natural, p, PartitionClass::rigid, search_opts(c));
        c.near(r.value, 4.0 * kPi * kPi / 9.0, 1e-7, "L^N_{2,p}(3-pumpkin), p=" + format_double(p));
        c.expect(runner_up(r) > r.value * (1.0 + 1e-6), "3-pumpkin winner unique, p=" + format_double(p));
    }
}

void check_pumpkin6_neumann(Ctx& c) {
    MetricGraph g = fixtures::pumpkin({1, 1, 1, 1, 1, 1});
    SearchOptions o = search_opts(c);
    OptResult r = minimize(g, 2, Problem::natural, kInf, PartitionClass::rigid, o);
    c.near(r.value, kPi * kPi / 9.0, 1e-7, "L^N_{2,inf}(6-pumpkin)");
    Partition part = r.realize(g);
    for (const auto& cl : part.clusters) {
        bool pathlike = is_tree(cl.graph);
        for (int v = 0; v < cl.graph.num_vertices(); ++v)
            if (cl.graph.degree(v) > 2) pathlike = false;
        c.expect(pathlike, "6-pumpkin cluster is a path");
        c.near(cl.graph.total_length(), 3.0, 1e-7, "6-pumpkin cluster length");
    }
}

void check_dirichlet_link(Ctx& c) {
    std::vector<std::pair<std::string, MetricGraph>> corpus = {
        {"lasso", fixtures::lasso(2.0, 1.0, 1.0)},
        {"star3-eq", fixtures::star({1.0, 1.0, 1.0})},
        {"star3-near-eq", fixtures::star({1.1, 1.0, 1.0})},
        {"pumpkin3", fixtures::pumpkin({1, 1, 1})},
        {"pumpkin6", fixtures::pumpkin({1, 1, 1, 1, 1, 1})},
        {"dumbbell", fixtures::dumbbell(1.0, 1.0, 1.0)},
        {"reinforced-loop", fixtures::reinforced_loop(0.25)},
    };
    for (auto& [name, g] : corpus) {
        OptResult r = minimize(g, 2, Problem::dirichlet, kInf, PartitionClass::rigid, search_opts(c));
        c.near(r.value, mu2(g), 1e-6, "L^D_{2,inf} = mu2 on " + name);
    }
}

void check_H_partitions(Ctx& c) {
    MetricGraph H = fixtures::pumpkin_H();
    OptResult r4 = minimize(H, 4, Problem::dirichlet, kInf, PartitionClass::rigid, search_opts(c));
    c.near(r4.value, 1.0, 1e-6, "L^D_{4,inf}(H)");
    OptResult r5 = minimize(H, 5, Problem::dirichlet, kInf, PartitionClass::rigid, search_opts(c));
    c.near(r5.value, 1.0, 1e-6, "L^D_{5,inf}(H)");
}

void check_star_p_sweep(Ctx& c) {
    MetricGraph g = fixtures::star({1.0, 1.0, 1.0});
    std::vector<double> grid = {1.0, 1.5, 2.0, 4.0, 8.0, 16.0};
    auto rows = sweep_p(g, 2, Problem::dirichlet, grid, PartitionClass::rigid, search_opts(c));
    double prev = 1.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        c.expect(rows[i].positions.size() == 1, "p-sweep winner has one cut");
        if (rows[i].positions.empty()) return;
        double a = rows[i].positions[0];
        c.expect(a > 1e-5, "a_p > 0 at p=" + format_double(grid[i]));
        c.expect(a < prev - 1e-6, "a_p strictly decreasing at p=" + format_double(grid[i]));
        prev = a;
    }
    OptResult rinf = minimize(g, 2, Problem::dirichlet, kInf, PartitionClass::rigid, search_opts(c));
    c.expect(rinf.winner.dim == 0, "p=inf winner is the vertex-cut template");
    c.near(rinf.value, kPi * kPi / 4.0, 1e-7, "L^D_{2,inf}(3-star)");
    // brute-force oracle for a_1: scan F(a,1) = (pi/(2(1-a)))^2 + omega(a)^2
    // on 2000 points, then sharpen the grid argmin with a parabola through
    // its neighbours (the grid alone resolves the position only to ~2.5e-4)
    auto F = [](double a) {
        double w = solve_fork(a);
        return std::pow(kPi / (2.0 * (1.0 - a)), 2.0) + w * w;
    };
    const int n = 2000;
    int best_i = 1;
    double best_f = kInf;
    for (int i = 1; i < n; ++i) {
        double f = F(i / double(n));
        if (f < best_f) {
            best_f = f;
            best_i = i;
        }
    }
    double h = 1.0 / n;
    double fm = F((best_i - 1) * h), f0 = best_f, fp = F((best_i + 1) * h);
    double best_a = best_i * h + 0.5 * h * (fm - fp) / (fm - 2.0 * f0 + fp);
    c.expect(std::abs(rows[0].positions[0] - best_a) <= 1e-4 * c.tol,
             "a_1 matches brute scan (" + format_double(rows[0].positions[0]) + " vs " + format_double(best_a) + ")");
}

void check_near_equilateral_star(Ctx& c) {
    MetricGraph g = fixtures::star({1.1, 1.0, 1.0});
    for (double p : {1.0, 2.0, kInf}) {
        OptResult r = minimize(g, 3, Problem::dirichlet, p, PartitionClass::rigid, search_opts(c));
        c.expect(r.winner.dim == 0, "near-eq star winner is the centre cut, p=" + format_double(p));
        // The centre cut is the unique internally connected minimiser.  At
        // p=inf a plateau of non-internally-connected rigid partitions ties
        // exactly (a cluster with a Dirichlet point at an interior vertex is
        // pinned at pi^2/4), so uniqueness is asserted within the class.
        double second = kInf;
        for (const auto& o : r.audit)
            if (!o.failed && !o.boundary && o.flags.internally_connected && o.name != r.winner.name)
                second = std::min(second, o.value);
        c.expect(second > r.value * (1.0 + 1e-6), "near-eq star winner unique, p=" + format_double(p));
        if (!std::isinf(p))
            c.expect(runner_up(r) > r.value * (1.0 + 1e-6),
                     "near-eq star winner unique among all rigid, p=" + format_double(p));
        Partition part = r.realize(g);
        c.expect(!equipartition_check(part, Problem::dirichlet), "near-eq star: not an equipartition");
    }
    // the equilateral variant's centre 3-partition is not bipartite
    MetricGraph ge = fixtures::star({1.0, 1.0, 1.0});
    CutPattern pat;
    pat.cuts.assign(3, {});
    pat.blocks.assign(ge.num_vertices(), {});
    int centre = ge.vertex_index("c");
    for (int s : ge.vertices[centre]) pat.blocks[centre].push_back({s});
    Partition p3 = make_partition(ge, pat);
    c.expect(p3.k() == 3, "equilateral star centre cut gives 3 clusters");
    c.expect(!bipartite_check(p3).has_value(), "equilateral star centre 3-partition not bipartite");
}

void check_lasso_sweep(Ctx& c) {
    MetricGraph g = fixtures::lasso(2.0, 1.0, 1.0);
    std::vector<double> grid;
    for (double a = 2.0; a <= 3.5 + 1e-9; a += 0.25) grid.push_back(a);
    auto rows = sweep_length(g, 0, grid, 2, Problem::natural, kInf, PartitionClass::rigid, search_opts(c));
    double plateau = kPi * kPi / 4.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (grid[i] <= 3.0 + 1e-9)
            c.near(rows[i].value, plateau, 1e-7, "lasso sweep value at a=" + format_double(grid[i]));
        else
            c.expect(rows[i].value < rows[i - 1].value - 1e-9,
                     "lasso sweep strictly decreasing at a=" + format_double(grid[i]));
    }
    // two templates tie within 1e-6 at a=3
    std::size_t i3 = 4;  // grid[4] == 3.0
    c.expect(std::abs(grid[i3] - 3.0) < 1e-12, "grid alignment");
    c.expect(rows[i3].runner_up_gap <= 1e-6 * c.tol * plateau, "two minimisers tie at a=3");
    bool switched = false;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].template_switch && grid[i] >= 3.0 - 1e-9) switched = true;
    c.expect(switched, "template switch detected at the kink");
}

// ---------------------------------------------------------------------------
// property suites

MetricGraph with_random_dirichlet(MetricGraph g, std::mt19937_64& rng) {
    g.dirichlet[rng() % g.num_vertices()] = 1;
    g.validate();
    return g;
}

void check_properties(Ctx& c) {
    std::mt19937_64 rng(424243u);
    std::vector<MetricGraph> corpus;
    for (int i = 0; i < 50; ++i) corpus.push_back(fixtures::random_connected(rng, 6));

    // Nicaise bounds with path-equality detection
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const MetricGraph& g = corpus[i];
        double L = g.total_length();
        double m2 = mu2(g);
        bool path = is_tree(g);
        for (int v = 0; v < g.num_vertices() && path; ++v)
            if (g.degree(v) > 2) path = false;
        double bound = kPi * kPi / (L * L);
        c.expect(m2 >= bound * (1.0 - 1e-9), "Nicaise mu2 bound, graph " + std::to_string(i));
        if (path)
            c.near(m2, bound, 1e-9, "Nicaise equality on path " + std::to_string(i));
        else
            c.expect(m2 > bound * (1.0 + 1e-6), "Nicaise strict on non-path " + std::to_string(i));
        MetricGraph gd = with_random_dirichlet(g, rng);
        double l1 = lambda1(gd);
        c.expect(l1 >= kPi * kPi / (4.0 * L * L) * (1.0 - 1e-9), "Nicaise lambda1 bound, graph " + std::to_string(i));
    }

    // Hoelder sandwich on sampled partitions
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    int sampled = 0;
    for (std::size_t i = 0; i < corpus.size() && sampled < 50; ++i) {
        const MetricGraph& g = corpus[i];
        EnumerateOptions eo;
        eo.filter = PartitionClass::rigid;
        eo.max_cuts_per_edge = 1;
        std::vector<CutPatternTemplate> ts;
        try {
            ts = enumerate_templates(g, 2, eo);
        } catch (const CapExceeded&) {
            continue;
        }
        if (ts.empty()) continue;
        const auto& t = ts[rng() % ts.size()];
        std::vector<double> xs;
        for (int m = 0; m < g.num_edges(); ++m)
            for (int j = 0; j < t.cuts_per_edge[m]; ++j) xs.push_back(g.edges[m].length * unit(rng));
        Partition part = make_partition(g, t.pattern(g, xs));
        if (part.k() != 2) continue;
        ++sampled;
        for (auto problem : {Problem::natural, Problem::dirichlet}) {
            auto lam = [&](double p) { return energy(part, problem, p).lambda_p; };
            double l1 = lam(1.0), l2 = lam(2.0), linf = lam(kInf);
            double k = 2.0;
            c.expect(l1 <= l2 * (1 + 1e-9) && l2 <= linf * (1 + 1e-9), "Hoelder monotone, graph " + std::to_string(i));
            c.expect(l2 <= std::pow(k, 0.5) * l1 * (1 + 1e-9), "Hoelder upper 1-2, graph " + std::to_string(i));
            c.expect(linf <= std::pow(k, 0.5) * l2 * (1 + 1e-9), "Hoelder upper 2-inf, graph " + std::to_string(i));
        }
    }
    c.expect(sampled >= 30, "enough Hoelder samples");

    // mu_k <= L^D_{k,inf}
    for (int i = 0; i < 12; ++i) {
        const MetricGraph& g = corpus[i];
        SpectralResult sp = eigenvalues(g, 3);
        for (int k = 2; k <= 3; ++k) {
            OptResult r = minimize(g, k, Problem::dirichlet, kInf, PartitionClass::rigid, search_opts(c));
            c.expect(sp.values[k - 1] <= r.value * (1.0 + 1e-6),
                     "mu_k <= L^D_{k,inf}, graph " + std::to_string(i) + " k=" + std::to_string(k));
        }
    }

    // weak Courant, first 6 eigenvalues (one spectrum per graph, distinct
    // eigenvalues checked once)
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const MetricGraph& g = corpus[i];
        SpectralResult sp = eigenvalues(g, 12);
        double prev_mu = -1.0;
        for (int k = 2; k <= 6; ++k) {
            double mu = sp.values[k - 1];
            double tol = 1e-8 * (1.0 + mu);
            if (std::abs(mu - prev_mu) < tol) continue;
            prev_mu = mu;
            int kappa = 0;
            for (std::size_t j = 0; j < sp.values.size(); ++j)
                if (std::abs(sp.values[j] - mu) < tol) kappa = static_cast<int>(j) + 1;
            for (const auto& w : eigenfunction(g, mu)) {
                int nu = nodal_partition(g, w).nu;
                c.expect(nu <= kappa,
                         "weak Courant, graph " + std::to_string(i) + " k=" + std::to_string(k));
            }
        }
    }

    // rigid closure under degeneration of a cut position to a vertex
    int closure_checked = 0;
    for (std::size_t i = 0; i < corpus.size() && closure_checked < 10; ++i) {
        const MetricGraph& g = corpus[i];
        EnumerateOptions eo;
        eo.filter = PartitionClass::rigid;
        eo.max_cuts_per_edge = 1;
        std::vector<CutPatternTemplate> ts;
        try {
            ts = enumerate_templates(g, 2, eo);
        } catch (const CapExceeded&) {
            continue;
        }
        for (const auto& t : ts) {
            int cut_edge = -1;
            for (int m = 0; m < g.num_edges(); ++m)
                if (t.cuts_per_edge[m] == 1) cut_edge = m;
            if (cut_edge < 0) continue;
            // the sliding stub must not be an entire cluster: a vanishing
            // cluster may heal its remaining cut into a loose one
            {
                Partition rep = make_partition(g, t.pattern(g, t.representative_positions(g)));
                int stub = rep.base_chain[cut_edge][0];
                bool stub_is_whole_cluster = false;
                for (const auto& cl : rep.clusters)
                    if (cl.support.size() == 1 && cl.support[0] == stub) stub_is_whole_cluster = true;
                if (stub_is_whole_cluster) continue;
            }
            // limit pattern: the interior cut slides into the edge's 'a' endpoint
            CutPattern limit;
            limit.cuts.assign(g.num_edges(), {});
            limit.blocks = t.blocks;
            for (int m = 0; m < g.num_edges(); ++m)
                if (m != cut_edge)
                    for (int j = 0; j < t.cuts_per_edge[m]; ++j)
                        limit.cuts[m].push_back(g.edges[m].length * (j + 1) / (t.cuts_per_edge[m] + 1.0));
            int va = g.vertex_of_slot(MetricGraph::slot(cut_edge, 0));
            auto blocks = limit.blocks[va];
            if (blocks.empty()) blocks = {g.vertices[va]};
            int moved = MetricGraph::slot(cut_edge, 0);
            for (auto& b : blocks) b.erase(std::remove(b.begin(), b.end(), moved), b.end());
            blocks.erase(std::remove_if(blocks.begin(), blocks.end(), [](auto& b) { return b.empty(); }),
                         blocks.end());
            blocks.push_back({moved});
            limit.blocks[va] = blocks;
            Partition lp = make_partition(g, limit);
            c.expect(lp.flags.rigid, "rigid closure, graph " + std::to_string(i));
            ++closure_checked;
            break;
        }
    }
    c.expect(closure_checked >= 8, "enough closure samples");

    // partition distance metric axioms within one primitive class
    int metric_checked = 0;
    for (std::size_t i = 0; i < corpus.size() && metric_checked < 10; ++i) {
        const MetricGraph& g = corpus[i];
        EnumerateOptions eo;
        eo.filter = PartitionClass::rigid;
        eo.max_cuts_per_edge = 1;
        std::vector<CutPatternTemplate> ts;
        try {
            ts = enumerate_templates(g, 2, eo);
        } catch (const CapExceeded&) {
            continue;
        }
        const CutPatternTemplate* pick = nullptr;
        for (const auto& t : ts)
            if (t.dim >= 1) pick = &t;
        if (!pick) continue;
        auto sample = [&]() {
            std::vector<double> xs;
            for (int m = 0; m < g.num_edges(); ++m)
                for (int j = 0; j < pick->cuts_per_edge[m]; ++j) xs.push_back(g.edges[m].length * unit(rng));
            return make_partition(g, pick->pattern(g, xs));
        };
        Partition a = sample(), b = sample(), d = sample();
        if (a.k() != 2 || b.k() != 2 || d.k() != 2) continue;
        if (!similar(g, a, b) || !similar(g, b, d)) continue;
        double dab = partition_distance(g, a, b);
        double dba = partition_distance(g, b, a);
        double dad = partition_distance(g, a, d);
        double ddb = partition_distance(g, d, b);
        double daa = partition_distance(g, a, a);
        c.expect(std::abs(dab - dba) < 1e-12, "distance symmetry, graph " + std::to_string(i));
        c.expect(daa < 1e-12, "distance identity, graph " + std::to_string(i));
        c.expect(dab <= dad + ddb + 1e-12, "triangle inequality, graph " + std::to_string(i));
        ++metric_checked;
    }
    c.expect(metric_checked >= 8, "enough metric samples");

    // bridge graphs admit a rigid 2-partition with min mu2 >= mu2(G)
    int bridge_checked = 0;
    for (std::size_t i = 0; i < corpus.size() && bridge_checked < 10; ++i) {
        const MetricGraph& g = corpus[i];
        if (!is_tree(g)) continue;  // trees always have bridges
        double m2 = mu2(g);
        OptResult r = maximize(g, 2, Problem::natural, search_opts(c));
        c.expect(r.value >= m2 * (1.0 - 1e-6), "bridge 2-cut property, graph " + std::to_string(i));
        ++bridge_checked;
    }
    c.expect(bridge_checked >= 5, "enough bridge samples");
}

void check_tree_gluing(Ctx& c) {
    std::mt19937_64 rng(777001u);
    int equis = 0;
    for (int t = 0; t < 20; ++t) {
        MetricGraph g = fixtures::random_tree(rng, 2 + static_cast<int>(rng() % 5));
        int k = 2 + static_cast<int>(rng() % 2);
        OptResult r;
        try {
            r = maximize(g, k, Problem::dirichlet, search_opts(c));
        } catch (const std::exception&) {
            continue;
        }
        Partition part = r.realize(g);
        if (part.k() != k) continue;
        if (!equipartition_check(part, Problem::dirichlet, 1e-6)) continue;
        ++equis;
        auto glued = glue_equipartition(g, part);
        c.expect(glued.has_value(), "tree gluing solvable, tree " + std::to_string(t));
        if (glued) c.expect(glued->residual <= 1e-8 * c.tol, "tree gluing residual, tree " + std::to_string(t));
    }
    c.expect(equis >= 10, "enough equipartitions produced (" + std::to_string(equis) + ")");
}

void check_double_cover(Ctx& c) {
    // equal-thirds 3-partition of the unit loop
    MetricGraph g = fixtures::loop(1.0);
    auto sub = subdivide(g, 0, {1.0 / 3.0, 2.0 / 3.0});
    MetricGraph l3 = sub.graph;
    CutPattern pat;
    pat.cuts.assign(l3.num_edges(), {});
    pat.blocks.assign(l3.num_vertices(), {});
    for (int v = 0; v < l3.num_vertices(); ++v)
        for (int s : l3.vertices[v]) pat.blocks[v].push_back({s});
    Partition p = make_partition(l3, pat);
    c.expect(p.k() == 3, "equal-thirds loop partition has 3 clusters");
    c.expect(p.flags.proper, "equal-thirds loop partition is proper");
    c.expect(!bipartite_check(p).has_value(), "equal-thirds loop partition is not bipartite");
    EnergyReport er = energy(p, Problem::dirichlet, kInf);
    c.near(er.lambda_p, 9.0 * kPi * kPi, 1e-8, "Lambda^D_inf of equal-thirds loop");

    std::vector<int> marked;
    for (int v = 0; v < l3.num_vertices(); ++v) marked.push_back(v);
    DoubleCover dc = build_double_cover(l3, marked);
    c.near(dc.cover.total_length(), 2.0, 1e-12, "cover has twice the length");
    c.expect(is_connected(dc.cover), "odd marked count gives a connected cover");
    ParitySpectrum ps = antisymmetric_spectrum(dc, 6);
    c.expect(ps.antisymmetric.size() >= 3, "antisymmetric spectrum computed");
    if (ps.antisymmetric.size() >= 3)
        c.near(ps.antisymmetric[2], 9.0 * kPi * kPi, 1e-8, "mu^a_3 equals Lambda^D_inf");
    // parity split merges back to the full spectrum
    SpectralResult full = eigenvalues(dc.cover, 8);
    std::vector<double> merged = ps.antisymmetric;
    merged.insert(merged.end(), ps.symmetric.begin(), ps.symmetric.end());
    std::sort(merged.begin(), merged.end());
    for (int i = 0; i < 8 && i < static_cast<int>(merged.size()); ++i)
        c.near(merged[i], full.values[i], 1e-8, "parity split merges, entry " + std::to_string(i));
}

void check_dumbbell(Ctx& c) {
    MetricGraph g = fixtures::dumbbell(1.0, 1.0, 1.0);
    OptResult rigid = minimize(g, 2, Problem::natural, kInf, PartitionClass::rigid, search_opts(c));
    OptResult loose = minimize(g, 2, Problem::natural, kInf, PartitionClass::loose, search_opts(c));
    double L = g.total_length();
    c.near(loose.value, 4.0 * kPi * kPi / (L * L), 1e-7, "loose natural minimum of the dumbbell");
    c.expect(rigid.value > loose.value * (1.0 + 1e-6), "rigid and loose natural minimisers differ");
}

}  // namespace

std::vector<CheckResult> run_acceptance(const std::string& filter, double tol_scale, int threads) {
    std::vector<std::pair<std::string, CheckFn>> checks = {
        {"1-exact-spectra", check_exact_spectra},
        {"2-von-below-pumpkin-H", check_von_below},
        {"3-pumpkin3-neumann", check_pumpkin3_neumann},
        {"4-pumpkin6-neumann", check_pumpkin6_neumann},
        {"5-dirichlet-mu2-link", check_dirichlet_link},
        {"6-pumpkin-H-partitions", check_H_partitions},
        {"7-star-p-sweep", check_star_p_sweep},
        {"8-near-equilateral-star", check_near_equilateral_star},
        {"9-lasso-length-sweep", check_lasso_sweep},
        {"10-property-suites", check_properties},
        {"11-tree-gluing", check_tree_gluing},
        {"12-double-cover", check_double_cover},
        {"13-dumbbell-fixture", check_dumbbell},
    };
    std::vector<CheckResult> out;
    for (auto& [id, fn] : checks) {
        if (!filter.empty() && id.find(filter) == std::string::npos) continue;
        Ctx ctx;
        ctx.tol = tol_scale;
        ctx.threads = threads;
        CheckResult res;
        res.id = id;
        res.name = id;
        try {
            fn(ctx);
            res.pass = ctx.ok;
            res.detail = ctx.log.str();
        } catch (const std::exception& e) {
            res.pass = false;
            res.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace qgp
