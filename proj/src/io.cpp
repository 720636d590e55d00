#include "qgp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qgp {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

MetricGraph parse_graph_json(const std::string& text) {
    json j = json::parse(text);
    std::vector<std::pair<std::string, double>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at("id").get<std::string>(), e.at("length").get<double>());
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, char>>>> vertices;
    for (const auto& v : j.at("vertices")) {
        std::vector<std::pair<std::string, char>> slots;
        for (const auto& s : v.at("slots"))
            slots.emplace_back(s.at(0).get<std::string>(), s.at(1).get<std::string>().at(0));
        vertices.emplace_back(v.at("id").get<std::string>(), std::move(slots));
    }
    std::vector<std::string> dir;
    if (j.contains("dirichlet"))
        for (const auto& d : j["dirichlet"]) dir.push_back(d.get<std::string>());
    return build_graph(std::move(edges), std::move(vertices), std::move(dir));
}

MetricGraph load_graph_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open graph file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_graph_json(ss.str());
}

std::string graph_to_json(const MetricGraph& g) {
    json j;
    j["edges"] = json::array();
    for (const auto& e : g.edges) {
        json je;
        je["id"] = e.id;
        // store as raw double; serialization below keeps 17 digits
        je["length"] = e.length;
        j["edges"].push_back(je);
    }
    j["vertices"] = json::array();
    for (int v = 0; v < g.num_vertices(); ++v) {
        json jv;
        jv["id"] = g.vertex_ids[v];
        jv["slots"] = json::array();
        for (int s : g.vertices[v]) {
            json js = json::array();
            js.push_back(g.edges[MetricGraph::slot_edge(s)].id);
            js.push_back(MetricGraph::slot_end(s) == 0 ? "a" : "b");
            jv["slots"].push_back(js);
        }
        j["vertices"].push_back(jv);
    }
    j["dirichlet"] = json::array();
    for (int v = 0; v < g.num_vertices(); ++v)
        if (g.dirichlet[v]) j["dirichlet"].push_back(g.vertex_ids[v]);
    return j.dump(2);
}

void save_graph_json(const MetricGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write graph file: " + path);
    out << graph_to_json(g) << "\n";
}

}  // namespace qgp
