#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "qgp/fixtures.hpp"
#include "qgp/graph.hpp"
#include "qgp/io.hpp"

using namespace qgp;

TEST_CASE("build_graph basics") {
    MetricGraph loop = fixtures::loop(1.0);
    CHECK(loop.num_edges() == 1);
    CHECK(loop.total_length() == doctest::Approx(1.0));
    CHECK(loop.degree(0) == 2);

    MetricGraph star = fixtures::star({1.0, 1.0, 1.0});
    CHECK(star.num_vertices() == 4);
    CHECK(star.degree(star.vertex_index("c")) == 3);

    CHECK_THROWS_AS(build_graph({{"e1", 0.0}}, {{"v", {{"e1", 'a'}, {"e1", 'b'}}}}), std::invalid_argument);
    // duplicate slot assignment
    CHECK_THROWS_AS(build_graph({{"e1", 1.0}}, {{"v", {{"e1", 'a'}, {"e1", 'a'}}}, {"w", {{"e1", 'b'}}}}),
                    std::invalid_argument);
    // dangling slot
    CHECK_THROWS_AS(build_graph({{"e1", 1.0}}, {{"v", {{"e1", 'a'}}}}), std::invalid_argument);
}

TEST_CASE("canonicalize merges degree-2 vertices") {
    MetricGraph p = fixtures::path({1.0, 1.0});
    CanonicalForm cf = canonicalize(p);
    CHECK(cf.graph.num_edges() == 1);
    CHECK(cf.graph.edges[0].length == doctest::Approx(2.0));
    // middle vertex lands at offset 1 of the merged edge
    int mid = p.vertex_index("v1");
    CHECK(cf.vertex_position[mid].offset == doctest::Approx(1.0));

    // the two-arc lasso has a degree-2 vertex opposite the stem: the arcs
    // merge into one loop edge, after which the form is stable
    MetricGraph lasso = fixtures::lasso(2.0, 1.0, 1.0);
    CanonicalForm cl = canonicalize(lasso);
    CHECK(cl.graph.num_edges() == 2);
    CHECK(cl.graph.total_length() == doctest::Approx(4.0));
    CanonicalForm cl2 = canonicalize(cl.graph);
    CHECK(cl2.graph.num_edges() == 2);

    // subdivided loop: canonical form keeps exactly one marker vertex
    MetricGraph loop = fixtures::loop(1.0);
    auto sub = subdivide(loop, 0, {0.25, 0.75});
    CanonicalForm cc = canonicalize(sub.graph);
    CHECK(cc.graph.num_edges() == 1);
    CHECK(cc.graph.num_vertices() == 1);
    CHECK(cc.graph.total_length() == doctest::Approx(1.0));
    // idempotent
    CanonicalForm cc2 = canonicalize(cc.graph);
    CHECK(cc2.graph.num_edges() == cc.graph.num_edges());
    CHECK(cc2.graph.total_length() == doctest::Approx(cc.graph.total_length()));
}

TEST_CASE("subdivide") {
    MetricGraph e = fixtures::interval(2.0);
    auto s = subdivide(e, 0, {0.9});
    CHECK(s.graph.num_edges() == 2);
    CHECK(s.graph.edges[s.new_edges[0]].length == doctest::Approx(0.9));
    CHECK(s.graph.edges[s.new_edges[1]].length == doctest::Approx(1.1));
    CHECK(s.graph.total_length() == doctest::Approx(2.0));

    MetricGraph loop = fixtures::loop(1.0);
    auto sl = subdivide(loop, 0, {0.25, 0.75});
    CHECK(sl.graph.num_edges() == 3);
    CHECK(sl.graph.num_vertices() == 3);

    CHECK_THROWS_AS(subdivide(e, 0, {2.0}), std::invalid_argument);
    CHECK_THROWS_AS(subdivide(e, 0, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("cut_vertex and components") {
    MetricGraph lasso = fixtures::lasso(2.0, 1.0, 1.0);
    int v = lasso.vertex_index("v");
    int s_e1 = MetricGraph::slot(0, 1);
    int s_e2 = MetricGraph::slot(1, 0);
    int s_e3 = MetricGraph::slot(2, 0);

    // faithful split: stem | loop
    MetricGraph cut1 = cut_vertex(lasso, v, {{s_e1}, {s_e2, s_e3}});
    CHECK(cut1.num_edges() == 3);
    for (int m = 0; m < 3; ++m) CHECK(cut1.edges[m].length == doctest::Approx(lasso.edges[m].length));
    auto comp1 = components(cut1);
    CHECK(comp1.size() == 2);
    CHECK(comp1[0].edge_map == std::vector<int>{0});       // interval
    CHECK(comp1[1].edge_map == std::vector<int>{1, 2});    // loop

    // full split: stem | two arcs forming a path through z
    MetricGraph cut2 = cut_vertex(lasso, v, {{s_e1}, {s_e2}, {s_e3}});
    auto comp2 = components(cut2);
    CHECK(comp2.size() == 2);
    CHECK(comp2[1].graph.num_vertices() == 3);  // path on two edges

    // cutting z as well disconnects the arcs: a faithful 3-partition
    int z = cut2.vertex_index("z");
    MetricGraph cut3 = cut_vertex(cut2, z, {{cut2.vertices[z][0]}, {cut2.vertices[z][1]}});
    CHECK(components(cut3).size() == 3);

    // trivial one-block cut changes nothing structurally
    MetricGraph cut0 = cut_vertex(lasso, v, {{s_e1, s_e2, s_e3}});
    CHECK(cut0.num_vertices() == lasso.num_vertices());
    CHECK(components(cut0).size() == 1);

    CHECK_THROWS_AS(cut_vertex(lasso, v, {{s_e1}, {s_e2}}), std::invalid_argument);
}

TEST_CASE("path_distance") {
    MetricGraph e = fixtures::interval(1.0);
    CHECK(path_distance(e, {0, 0.2}, {0, 0.7}) == doctest::Approx(0.5));
    MetricGraph loop = fixtures::loop(1.0);
    CHECK(path_distance(loop, {0, 0.0}, {0, 0.5}) == doctest::Approx(0.5));
    CHECK(path_distance(loop, {0, 0.1}, {0, 0.7}) == doctest::Approx(0.4));
    MetricGraph two = build_graph({{"e1", 1.0}, {"e2", 1.0}},
                                  {{"a", {{"e1", 'a'}}}, {"b", {{"e1", 'b'}}}, {"c", {{"e2", 'a'}}}, {"d", {{"e2", 'b'}}}});
    CHECK(std::isinf(path_distance(two, {0, 0.5}, {1, 0.5})));
    CHECK_THROWS_AS(path_distance(e, {0, 5.0}, {0, 0.0}), std::invalid_argument);

    // triangle inequality on sampled triples of the lasso
    MetricGraph lasso = fixtures::lasso(2.0, 1.0, 1.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        auto pt = [&]() {
            int m = static_cast<int>(rng() % 3);
            return PointOnGraph{m, u(rng) * lasso.edges[m].length};
        };
        PointOnGraph a = pt(), b = pt(), cpt = pt();
        CHECK(path_distance(lasso, a, b) <=
              path_distance(lasso, a, cpt) + path_distance(lasso, cpt, b) + 1e-12);
    }
}

TEST_CASE("graph_space_distance") {
    MetricGraph a = fixtures::path({0.9, 1.1});
    MetricGraph b = fixtures::path({1.1, 0.9});
    CHECK(graph_space_distance(a, a, {0, 1}) == doctest::Approx(0.0));
    CHECK(graph_space_distance(a, b, {0, 1}) == doctest::Approx(std::sqrt(0.08)));
    MetricGraph c = fixtures::path({1.0});
    CHECK_THROWS_AS(graph_space_distance(a, c, {0, 1}), std::invalid_argument);

    // metric axioms on random length vectors over a fixed topology
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    for (int t = 0; t < 25; ++t) {
        MetricGraph x = fixtures::path({u(rng), u(rng), u(rng)});
        MetricGraph y = fixtures::path({u(rng), u(rng), u(rng)});
        MetricGraph z = fixtures::path({u(rng), u(rng), u(rng)});
        std::vector<int> id{0, 1, 2};
        double dxy = graph_space_distance(x, y, id);
        double dyx = graph_space_distance(y, x, id);
        CHECK(dxy == doctest::Approx(dyx));
        CHECK(graph_space_distance(x, z, id) <= dxy + graph_space_distance(y, z, id) + 1e-12);
    }
}

TEST_CASE("collapse_zero_edges") {
    MetricGraph p = fixtures::path({1.0, 1e-3});
    auto col = collapse_zero_edges(p, {1});
    CHECK(col.graph.num_edges() == 1);
    CHECK(col.graph.edges[0].length == doctest::Approx(1.0));
    CHECK(col.vertex_class[1] == col.vertex_class[2]);  // merged endpoint classes

    MetricGraph pk = fixtures::pumpkin({1.0, 1.0, 1.0});
    auto c2 = collapse_zero_edges(pk, {0});
    CHECK(c2.graph.num_edges() == 2);
    CHECK(c2.graph.num_vertices() == 1);  // figure-8

    CHECK_THROWS_AS(collapse_zero_edges(pk, {0, 1, 2}), std::invalid_argument);

    // Dirichlet marking is inherited by the merged class
    MetricGraph pd = fixtures::path({1.0, 1e-3});
    pd.dirichlet[pd.vertex_index("v2")] = 1;
    pd.validate();
    auto c3 = collapse_zero_edges(pd, {1});
    CHECK(c3.graph.dirichlet[c3.vertex_class[1]] == 1);
}

TEST_CASE("discrete isomorphism") {
    auto d1 = discrete_graph(fixtures::loop(1.0));
    auto d2 = discrete_graph(fixtures::loop(2.5));
    CHECK(discrete_isomorphic(d1, d2).has_value());

    auto star = discrete_graph(fixtures::star({1, 1, 1}));
    auto path = discrete_graph(fixtures::path({1, 1, 1}));
    CHECK(!discrete_isomorphic(star, path).has_value());

    MetricGraph lasso = fixtures::lasso(2.0, 1.0, 1.0);
    MetricGraph lasso_perm = build_graph({{"x", 1.0}, {"y", 2.0}, {"z", 1.0}},
                                         {{"w", {{"y", 'a'}}},
                                          {"v", {{"y", 'b'}, {"x", 'a'}, {"z", 'a'}}},
                                          {"u", {{"x", 'b'}, {"z", 'b'}}}});
    CHECK(discrete_isomorphic(discrete_graph(lasso), discrete_graph(lasso_perm)).has_value());
}

TEST_CASE("slot automorphisms respect lengths") {
    auto autos_eq = slot_automorphisms(fixtures::star({1, 1, 1}));
    auto autos_ne = slot_automorphisms(fixtures::star({1.1, 1, 1}));
    CHECK(autos_eq.size() == 6);
    CHECK(autos_ne.size() == 2);
    auto autos_pumpkin = slot_automorphisms(fixtures::pumpkin({1, 1, 1}));
    CHECK(autos_pumpkin.size() == 12);  // S3 on edges x vertex swap
}

TEST_CASE("graph json round trip") {
    MetricGraph g = fixtures::lasso(2.0, 1.0, 1.0 / 3.0);
    g.dirichlet[g.vertex_index("w")] = 1;
    g.validate();
    MetricGraph h = parse_graph_json(graph_to_json(g));
    REQUIRE(h.num_edges() == g.num_edges());
    for (int m = 0; m < g.num_edges(); ++m) {
        CHECK(h.edges[m].id == g.edges[m].id);
        CHECK(h.edges[m].length == g.edges[m].length);  // bit-exact round trip
    }
    REQUIRE(h.num_vertices() == g.num_vertices());
    CHECK(h.dirichlet == g.dirichlet);
}
