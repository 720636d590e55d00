#include "qgp/fixtures.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <stdexcept>

#include "qgp/io.hpp"

namespace qgp {
namespace fixtures {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

MetricGraph interval(double length, bool dl, bool dr) {
    std::vector<std::string> dir;
    if (dl) dir.push_back("v0");
    if (dr) dir.push_back("v1");
    return build_graph({{"e1", length}}, {{"v0", {{"e1", 'a'}}}, {"v1", {{"e1", 'b'}}}}, dir);
}

MetricGraph loop(double length) {
    return build_graph({{"e1", length}}, {{"v", {{"e1", 'a'}, {"e1", 'b'}}}});
}

MetricGraph path(const std::vector<double>& lengths) {
    std::vector<std::pair<std::string, double>> edges;
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, char>>>> vertices;
    for (std::size_t i = 0; i < lengths.size(); ++i) edges.push_back({"e" + std::to_string(i + 1), lengths[i]});
    vertices.push_back({"v0", {{"e1", 'a'}}});
    for (std::size_t i = 1; i < lengths.size(); ++i)
        vertices.push_back({"v" + std::to_string(i),
                            {{"e" + std::to_string(i), 'b'}, {"e" + std::to_string(i + 1), 'a'}}});
    vertices.push_back({"v" + std::to_string(lengths.size()), {{"e" + std::to_string(lengths.size()), 'b'}}});
    return build_graph(edges, vertices);
}

MetricGraph star(const std::vector<double>& lengths) {
    std::vector<std::pair<std::string, double>> edges;
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, char>>>> vertices;
    std::vector<std::pair<std::string, char>> centre;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        std::string id = "e" + std::to_string(i + 1);
        edges.push_back({id, lengths[i]});
        centre.push_back({id, 'a'});
    }
    vertices.push_back({"c", centre});
    for (std::size_t i = 0; i < lengths.size(); ++i)
        vertices.push_back({"p" + std::to_string(i + 1), {{"e" + std::to_string(i + 1), 'b'}}});
    return build_graph(edges, vertices);
}

MetricGraph pumpkin(const std::vector<double>& lengths) {
    std::vector<std::pair<std::string, double>> edges;
    std::vector<std::pair<std::string, char>> v, w;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        std::string id = "e" + std::to_string(i + 1);
        edges.push_back({id, lengths[i]});
        v.push_back({id, 'a'});
        w.push_back({id, 'b'});
    }
    return build_graph(edges, {{"v", v}, {"w", w}});
}

MetricGraph lasso(double stem, double arc1, double arc2) {
    return build_graph({{"e1", stem}, {"e2", arc1}, {"e3", arc2}},
                       {{"w", {{"e1", 'a'}}},
                        {"v", {{"e1", 'b'}, {"e2", 'a'}, {"e3", 'a'}}},
                        {"z", {{"e2", 'b'}, {"e3", 'b'}}}});
}

MetricGraph dumbbell(double loop1, double handle, double loop2) {
    return build_graph({{"l1", loop1}, {"h", handle}, {"l2", loop2}},
                       {{"v", {{"l1", 'a'}, {"l1", 'b'}, {"h", 'a'}}},
                        {"w", {{"l2", 'a'}, {"l2", 'b'}, {"h", 'b'}}}});
}

MetricGraph pumpkin_H() { return pumpkin({kPi, 2 * kPi, 2 * kPi}); }

MetricGraph reinforced_loop(double a) {
    return build_graph({{"L1", 1.0}, {"L2", 1.0}, {"s1", a}, {"s2", a}, {"s3", a}, {"s4", a}},
                       {{"v1", {{"L1", 'a'}, {"s1", 'a'}, {"s2", 'a'}}},
                        {"v2", {{"L2", 'a'}, {"s1", 'b'}, {"s2", 'b'}}},
                        {"v3", {{"L1", 'b'}, {"s3", 'a'}, {"s4", 'a'}}},
                        {"v4", {{"L2", 'b'}, {"s3", 'b'}, {"s4", 'b'}}}});
}

MetricGraph double_dumbbell(double eps) {
    double q = eps / 2.0;
    return build_graph(
        {{"h", 1.0}, {"a1", q}, {"a2", q}, {"b1", q}, {"b2", q}},
        {{"u1", {{"h", 'a'}, {"a1", 'a'}, {"a1", 'b'}, {"a2", 'a'}}},
         {"u2", {{"a2", 'b'}}},
         {"w1", {{"h", 'b'}, {"b1", 'a'}, {"b1", 'b'}, {"b2", 'a'}}},
         {"w2", {{"b2", 'b'}}}});
}

MetricGraph random_tree(std::mt19937_64& rng, int edges) {
    std::uniform_real_distribution<double> len(0.4, 2.0);
    std::vector<std::pair<std::string, double>> es;
    std::map<int, std::vector<std::pair<std::string, char>>> slots;  // vertex -> slots
    for (int i = 0; i < edges; ++i) {
        std::string id = "e" + std::to_string(i + 1);
        es.push_back({id, len(rng)});
        int attach = i == 0 ? 0 : static_cast<int>(rng() % (i + 1));
        slots[attach].push_back({id, 'a'});
        slots[i + 1].push_back({id, 'b'});
    }
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, char>>>> vs;
    for (auto& [v, sl] : slots) vs.push_back({"v" + std::to_string(v), sl});
    return build_graph(es, vs);
}

MetricGraph random_connected(std::mt19937_64& rng, int max_edges) {
    int m = 2 + static_cast<int>(rng() % std::max(1, max_edges - 1));
    int tree_edges = 1 + static_cast<int>(rng() % m);
    tree_edges = std::min(tree_edges, m);
    std::uniform_real_distribution<double> len(0.4, 2.0);
    std::vector<std::pair<std::string, double>> es;
    std::map<int, std::vector<std::pair<std::string, char>>> slots;
    int vcount = tree_edges + 1;
    for (int i = 0; i < tree_edges; ++i) {
        std::string id = "e" + std::to_string(i + 1);
        es.push_back({id, len(rng)});
        int attach = i == 0 ? 0 : static_cast<int>(rng() % (i + 1));
        slots[attach].push_back({id, 'a'});
        slots[i + 1].push_back({id, 'b'});
    }
    auto degree_of = [&](int v) { return slots.count(v) ? slots[v].size() : 0u; };
    for (int i = tree_edges; i < m; ++i) {
        std::string id = "e" + std::to_string(i + 1);
        int u = static_cast<int>(rng() % vcount);
        int w = static_cast<int>(rng() % vcount);
        if (degree_of(u) >= 5 || degree_of(w) >= 5) continue;
        es.push_back({id, len(rng)});
        slots[u].push_back({id, 'a'});
        slots[w].push_back({id, 'b'});
    }
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, char>>>> vs;
    for (auto& [v, sl] : slots) vs.push_back({"v" + std::to_string(v), sl});
    return build_graph(es, vs);
}

std::vector<std::string> write_fixture_files(const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::pair<std::string, MetricGraph>> all = {
        {"lasso", lasso(2.0, 1.0, 1.0)},
        {"star3-eq", star({1.0, 1.0, 1.0})},
        {"star3-near-eq", star({1.1, 1.0, 1.0})},
        {"pumpkin3", pumpkin({1.0, 1.0, 1.0})},
        {"pumpkin6", pumpkin({1.0, 1.0, 1.0, 1.0, 1.0, 1.0})},
        {"pumpkin-H", pumpkin_H()},
        {"dumbbell", dumbbell(1.0, 1.0, 1.0)},
        {"reinforced-loop", reinforced_loop(0.25)},
        {"double-dumbbell", double_dumbbell(0.25)},
        {"interval", interval(1.0)},
        {"loop", loop(1.0)},
    };
    std::vector<std::string> paths;
    for (auto& [name, g] : all) {
        std::string p = dir + "/" + name + ".json";
        save_graph_json(g, p);
        paths.push_back(p);
    }
    return paths;
}

}  // namespace fixtures
}  // namespace qgp
