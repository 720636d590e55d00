#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "qgp/fixtures.hpp"
#include "qgp/nodal.hpp"
#include "qgp/search.hpp"

using namespace qgp;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

CutPattern empty_pattern(const MetricGraph& g) {
    CutPattern c;
    c.cuts.assign(g.num_edges(), {});
    c.blocks.assign(g.num_vertices(), {});
    return c;
}
}  // namespace

TEST_CASE("zero sets") {
    MetricGraph e = fixtures::interval(1.0);
    auto basis = eigenfunction(e, kPi * kPi);
    REQUIRE(basis.size() == 1);
    ZeroSet z = zero_set(e, basis[0]);
    REQUIRE(z.interior_zeros.size() == 1);
    CHECK(z.interior_zeros[0].offset == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(z.zero_edges.empty());

    MetricGraph loop = fixtures::loop(1.0);
    auto lb = eigenfunction(loop, 4 * kPi * kPi);
    REQUIRE(lb.size() == 2);
    NodalResult nr = nodal_partition(loop, lb[0]);
    CHECK(nr.nu == 2);
}

TEST_CASE("pumpkin H nodal structure") {
    MetricGraph H = fixtures::pumpkin_H();
    auto basis = eigenfunction(H, 1.0);
    REQUIRE(basis.size() == 1);
    ZeroSet z = zero_set(H, basis[0]);
    REQUIRE(z.zero_edges.size() == 1);
    CHECK(z.zero_edges[0] == 0);  // the short edge e1
    NodalResult nr = nodal_partition(H, basis[0]);
    CHECK(nr.nu == 4);
    CHECK(nr.support_edges.size() == 2);  // non-exhaustive: e2, e3 only
    CourantReport cr = courant_check(H, 5);
    CHECK(cr.kappa == 5);
    CHECK(cr.pass);
    REQUIRE(!cr.nu.empty());
    CHECK(cr.nu[0] == 4);
}

TEST_CASE("weak Courant on model graphs") {
    for (int k = 2; k <= 5; ++k) {
        CourantReport c1 = courant_check(fixtures::interval(1.0), k);
        CHECK(c1.pass);
        CourantReport c2 = courant_check(fixtures::pumpkin({1, 1, 1}), k);
        CHECK(c2.pass);
    }
    // equilateral 3-star at mu2 = mu3: transversal eigenfunctions have 2 domains
    CourantReport cs = courant_check(fixtures::star({1, 1, 1}), 2);
    CHECK(cs.kappa == 3);
    for (int nu : cs.nu) CHECK(nu <= 3);
    CHECK(cs.pass);
}

TEST_CASE("nodal partitions are rigid Dirichlet equipartitions") {
    MetricGraph g = fixtures::lasso(2.0, 1.0, 1.0);
    SpectralResult sp = eigenvalues(g, 4);
    for (int j = 1; j < 4; ++j) {
        if (sp.values[j] - sp.values[j - 1] < 1e-9) continue;
        for (const auto& w : eigenfunction(g, sp.values[j])) {
            NodalResult nr = nodal_partition(g, w);
            CHECK(nr.partition.flags.rigid);
            EnergyReport er = energy(nr.partition, Problem::dirichlet, kInf);
            for (double v : er.cluster_values) CHECK(v == doctest::Approx(sp.values[j]).epsilon(1e-7));
        }
    }
}

TEST_CASE("glue equipartition on trees") {
    MetricGraph e = fixtures::interval(2.0);
    CutPattern mid = empty_pattern(e);
    mid.cuts[0] = {1.0};
    Partition p = make_partition(e, mid);
    auto glued = glue_equipartition(e, p);
    REQUIRE(glued.has_value());
    CHECK(glued->residual < 1e-10);

    MetricGraph star = fixtures::star({1, 1, 1});
    CutPattern centre = empty_pattern(star);
    int c = star.vertex_index("c");
    for (int s : star.vertices[c]) centre.blocks[c].push_back({s});
    Partition ps = make_partition(star, centre);
    auto gs = glue_equipartition(star, ps);
    REQUIRE(gs.has_value());
    CHECK(gs->residual < 1e-8);

    // a loop is not a tree
    MetricGraph loop = fixtures::loop(1.0);
    Partition pl = make_partition(loop, empty_pattern(loop));
    CHECK_THROWS_AS(glue_equipartition(loop, pl), std::invalid_argument);
}

TEST_CASE("generalised nodal verdicts") {
    // star (1,1,eps): {e1 | e2 u e3} is generalised nodal but not nodal
    MetricGraph star = fixtures::star({1.0, 1.0, 0.5});
    CutPattern pat = empty_pattern(star);
    int c = star.vertex_index("c");
    pat.blocks[c] = {{MetricGraph::slot(0, 0)}, {MetricGraph::slot(1, 0), MetricGraph::slot(2, 0)}};
    Partition p = make_partition(star, pat);
    REQUIRE(p.k() == 2);
    GeneralisedNodalReport rep = generalised_nodal_check(star, p);
    CHECK(rep.verdict == NodalVerdict::generalised_nodal);

    // 3-pumpkin partitioned into its edges: nodal with signs (+,+,-)
    MetricGraph pk = fixtures::pumpkin({1, 1, 1});
    CutPattern edges = empty_pattern(pk);
    for (int v = 0; v < 2; ++v)
        for (int s : pk.vertices[v]) edges.blocks[v].push_back({s});
    Partition pe = make_partition(pk, edges);
    REQUIRE(pe.k() == 3);
    GeneralisedNodalReport re = generalised_nodal_check(pk, pe);
    CHECK(re.verdict == NodalVerdict::nodal);

    // equal-thirds loop partition: proper, minimal, non-bipartite -> neither
    MetricGraph loop = fixtures::loop(1.0);
    auto sub = subdivide(loop, 0, {1.0 / 3.0, 2.0 / 3.0});
    MetricGraph l3 = sub.graph;
    CutPattern thirds = empty_pattern(l3);
    for (int v = 0; v < l3.num_vertices(); ++v)
        for (int s : l3.vertices[v]) thirds.blocks[v].push_back({s});
    Partition pt = make_partition(l3, thirds);
    GeneralisedNodalReport rt = generalised_nodal_check(l3, pt);
    CHECK(rt.verdict == NodalVerdict::neither);
}

TEST_CASE("proper nodal minimisers are Courant sharp") {
    // wherever the Dirichlet minimiser is proper and nodal, its value is mu_k
    struct Fix {
        MetricGraph g;
        int k;
    };
    std::vector<Fix> fixture_list = {{fixtures::interval(1.0), 2},
                                     {fixtures::interval(1.0), 3},
                                     {fixtures::loop(1.0), 2}};
    for (auto& [g, k] : fixture_list) {
        SearchOptions so;
        so.seed = 5;
        OptResult r = minimize(g, k, Problem::dirichlet, std::numeric_limits<double>::infinity(),
                               PartitionClass::rigid, so);
        Partition p = r.realize(g);
        if (!p.flags.proper) continue;
        GeneralisedNodalReport rep = generalised_nodal_check(g, p);
        if (rep.verdict != NodalVerdict::nodal) continue;
        SpectralResult sp = eigenvalues(g, k);
        CHECK(r.value == doctest::Approx(sp.values[k - 1]).epsilon(1e-7));
    }
}

TEST_CASE("transversal eigenfunctions of the 3-pumpkin") {
    // the eigenspace at pi^2 contains functions supported on two edges only
    MetricGraph pk = fixtures::pumpkin({1, 1, 1});
    auto basis = eigenfunction(pk, kPi * kPi);
    REQUIRE(basis.size() == 3);
    // solve for a combination vanishing on edge 2 (two linear constraints)
    Eigen::MatrixXd A(2, 3);
    for (int j = 0; j < 3; ++j) {
        A(0, j) = basis[j].coeff[2][0];
        A(1, j) = basis[j].coeff[2][1];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    Eigen::VectorXd c = svd.matrixV().col(2);
    EdgeWave w;
    w.k = kPi;
    w.coeff.assign(3, {0.0, 0.0});
    for (int j = 0; j < 3; ++j)
        for (int m = 0; m < 3; ++m) {
            w.coeff[m][0] += c(j) * basis[j].coeff[m][0];
            w.coeff[m][1] += c(j) * basis[j].coeff[m][1];
        }
    CHECK(std::hypot(w.coeff[2][0], w.coeff[2][1]) < 1e-9);
    CHECK(wave_residual(pk, w) < 1e-8);
    NodalResult nr = nodal_partition(pk, w);
    CHECK(nr.support_edges.size() == 2);
    CHECK(nr.nu == 2);
}

TEST_CASE("nodal report json") {
    MetricGraph H = fixtures::pumpkin_H();
    auto basis = eigenfunction(H, 1.0);
    REQUIRE(basis.size() == 1);
    NodalResult nr = nodal_partition(H, basis[0]);
    std::string j = nodal_report_to_json(H, nr);
    CHECK(j.find("\"nu\": 4") != std::string::npos);
    CHECK(j.find("\"exhaustive\": false") != std::string::npos);
    CHECK(j.find("e1") != std::string::npos);
}

TEST_CASE("exhaustive nodal partitions verify as nodal") {
    std::mt19937_64 rng(515253);
    int checked = 0;
    for (int t = 0; t < 12 && checked < 6; ++t) {
        MetricGraph g = fixtures::random_connected(rng, 5);
        SpectralResult sp = eigenvalues(g, 4);
        for (int j = 1; j < 4; ++j) {
            if (sp.kernel_dim[j] != 1) continue;
            auto basis = eigenfunction(g, sp.values[j]);
            if (basis.size() != 1) continue;
            NodalResult nr = nodal_partition(g, basis[0]);
            if (nr.support_edges.size() != static_cast<std::size_t>(g.num_edges())) continue;
            CutPattern pat;
            pat.cuts.assign(g.num_edges(), {});
            pat.blocks.assign(g.num_vertices(), {});
            for (auto& z : nr.zeros.interior_zeros) pat.cuts[nr.support_edges[z.edge]].push_back(z.offset);
            for (int v : nr.zeros.vanishing_vertices)
                for (int sl : g.vertices[v]) pat.blocks[v].push_back({sl});
            Partition p = make_partition(g, pat);
            GeneralisedNodalReport rep = generalised_nodal_check(g, p);
            bool ok = rep.verdict == NodalVerdict::nodal || rep.verdict == NodalVerdict::inconclusive;
            CHECK(ok);
            ++checked;
            break;
        }
    }
    CHECK(checked >= 4);
}

TEST_CASE("double covers") {
    MetricGraph loop = fixtures::loop(1.0);
    DoubleCover one = build_double_cover(loop, {0});
    CHECK(one.cover.total_length() == doctest::Approx(2.0));
    CHECK(is_connected(one.cover));
    ParitySpectrum ps = antisymmetric_spectrum(one, 4);
    REQUIRE(ps.antisymmetric.size() == 4);
    CHECK(ps.antisymmetric[0] == doctest::Approx(kPi * kPi).epsilon(1e-9));
    CHECK(ps.antisymmetric[1] == doctest::Approx(kPi * kPi).epsilon(1e-9));
    CHECK(ps.antisymmetric[2] == doctest::Approx(9 * kPi * kPi).epsilon(1e-9));
    CHECK(ps.antisymmetric[3] == doctest::Approx(9 * kPi * kPi).epsilon(1e-9));

    // two marked points: even number of swaps, disconnected trivial cover
    auto sub = subdivide(loop, 0, {0.5});
    DoubleCover two = build_double_cover(sub.graph, {0, 1});
    CHECK(component_count(two.cover) == 2);
    ParitySpectrum pt = antisymmetric_spectrum(two, 3);
    SpectralResult base = eigenvalues(loop, 3);
    REQUIRE(pt.antisymmetric.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(pt.antisymmetric[i] == doctest::Approx(base.values[i]).epsilon(1e-9));

    // interval with one interior marked point: two unit paths, sheets swapped
    MetricGraph e = fixtures::interval(1.0);
    auto se = subdivide(e, 0, {0.4});
    DoubleCover ie = build_double_cover(se.graph, {se.new_vertices[0]});
    CHECK(ie.cover.total_length() == doctest::Approx(2.0));
    CHECK(component_count(ie.cover) == 2);
    for (const auto& comp : components(ie.cover)) CHECK(comp.graph.total_length() == doctest::Approx(1.0));

    // marked vertex of degree 3 is rejected
    MetricGraph lasso = fixtures::lasso(2.0, 1.0, 1.0);
    CHECK_THROWS_AS(build_double_cover(lasso, {lasso.vertex_index("v")}), std::invalid_argument);
}
