#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "qgp/fixtures.hpp"
#include "qgp/io.hpp"
#include "qgp/nodal.hpp"
#include "qgp/search.hpp"
#include "qgp/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;

double parse_p(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF") return std::numeric_limits<double>::infinity();
    double p = std::stod(s);
    if (!(p > 0)) throw std::invalid_argument("p must be positive or 'inf'");
    return p;
}

std::vector<double> parse_grid(const std::string& s, bool allow_inf) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        double a, b, step;
        char c1, c2;
        std::istringstream is(s);
        if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':')
            throw std::invalid_argument("grid range must be start:stop:step");
        for (double x = a; x <= b + 1e-12; x += step) out.push_back(x);
        return out;
    }
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        if (allow_inf && (tok == "inf" || tok == "Inf")) {
            out.push_back(std::numeric_limits<double>::infinity());
        } else {
            out.push_back(std::stod(tok));
        }
    }
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw std::ios_base::failure("cannot write " + out_path);
    f << text;
}

qgp::Problem parse_problem(const std::string& s) {
    if (s == "dirichlet") return qgp::Problem::dirichlet;
    if (s == "natural") return qgp::Problem::natural;
    throw std::invalid_argument("problem must be dirichlet or natural");
}

qgp::PartitionClass parse_class(const std::string& s) {
    if (s == "rigid") return qgp::PartitionClass::rigid;
    if (s == "loose") return qgp::PartitionClass::loose;
    if (s == "proper") return qgp::PartitionClass::proper;
    if (s == "faithful") return qgp::PartitionClass::faithful;
    if (s == "internally-connected") return qgp::PartitionClass::internally_connected;
    throw std::invalid_argument("unknown partition class: " + s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral minimal and maximal partitions of compact metric graphs"};
    app.require_subcommand(1);

    std::string graph_path, out_path, format = "text";
    std::string problem_s = "natural", class_s = "rigid", p_s = "inf";
    int k = 2, count = 6, threads = 0, max_cuts = -1;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_graph) {
        if (needs_graph) cmd->add_option("--graph", graph_path, "graph JSON file")->required();
        cmd->add_option("--out", out_path, "output file (default: stdout)");
        cmd->add_option("--format", format, "output format: text|json|csv");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--threads", threads, "worker threads (0: all cores)");
    };

    auto* eig = app.add_subcommand("eig", "first eigenvalues of the graph Laplacian");
    add_common(eig, true);
    std::string method_s = "secular";
    eig->add_option("--count", count, "number of eigenvalues");
    eig->add_option("--method", method_s, "secular|fem|cross-check");

    auto* cmd_min = app.add_subcommand("minimize", "minimal partition energy");
    auto* cmd_max = app.add_subcommand("maximize", "maximal min-energy partition");
    for (auto* cmd : {cmd_min, cmd_max}) {
        add_common(cmd, true);
        cmd->add_option("--k", k, "number of clusters")->required();
        cmd->add_option("--problem", problem_s, "dirichlet|natural");
        cmd->add_option("--class", class_s, "rigid|loose|proper|faithful|internally-connected");
        cmd->add_option("--max-cuts-per-edge", max_cuts, "interior cut cap per edge (default k-1)");
    }
    cmd_min->add_option("--p", p_s, "energy exponent, number or 'inf'");

    auto* cmd_sweep = app.add_subcommand("sweep", "p- or edge-length sweep of the minimal energy");
    add_common(cmd_sweep, true);
    std::string p_grid_s, length_grid_s, edge_id;
    cmd_sweep->add_option("--k", k, "number of clusters")->required();
    cmd_sweep->add_option("--problem", problem_s, "dirichlet|natural");
    cmd_sweep->add_option("--class", class_s, "partition class");
    cmd_sweep->add_option("--p", p_s, "fixed p for length sweeps");
    cmd_sweep->add_option("--p-grid", p_grid_s, "comma list of p values ('inf' allowed)");
    cmd_sweep->add_option("--length-grid", length_grid_s, "comma list or start:stop:step");
    cmd_sweep->add_option("--edge", edge_id, "edge id whose length is swept");
    cmd_sweep->add_option("--max-cuts-per-edge", max_cuts, "interior cut cap per edge");

    auto* cmd_verify = app.add_subcommand("verify", "run the acceptance fixture suite");
    std::string fixture_filter;
    double tol_scale = 1.0;
    cmd_verify->add_option("--fixture", fixture_filter, "only run checks matching this substring");
    cmd_verify->add_option("--tol-scale", tol_scale, "tolerance multiplier (diagnostic)");
    cmd_verify->add_option("--threads", threads, "worker threads");

    auto* cmd_fixtures = app.add_subcommand("write-fixtures", "write the fixture graph files");
    std::string fixture_dir = "data";
    cmd_fixtures->add_option("--dir", fixture_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (eig->parsed()) {
            qgp::MetricGraph g = qgp::load_graph_json(graph_path);
            qgp::EigMethod m = qgp::EigMethod::secular;
            if (method_s == "fem") m = qgp::EigMethod::fem;
            else if (method_s == "cross-check") m = qgp::EigMethod::cross_check;
            else if (method_s != "secular") throw std::invalid_argument("unknown method " + method_s);
            qgp::SpectralResult r = qgp::eigenvalues(g, count, m);
            std::ostringstream os;
            if (format == "json") {
                os << "{\n  \"method\": \"" << r.method << "\",\n  \"values\": [";
                for (std::size_t i = 0; i < r.values.size(); ++i)
                    os << (i ? ", " : "") << qgp::format_double(r.values[i]);
                os << "],\n  \"multiplicity\": [";
                for (std::size_t i = 0; i < r.kernel_dim.size(); ++i) os << (i ? ", " : "") << r.kernel_dim[i];
                os << "],\n  \"error\": [";
                for (std::size_t i = 0; i < r.error.size(); ++i)
                    os << (i ? ", " : "") << qgp::format_double(r.error[i]);
                os << "]\n}\n";
            } else {
                os << "# idx  value  multiplicity  error (" << r.method << ")\n";
                for (std::size_t i = 0; i < r.values.size(); ++i)
                    os << i + 1 << "  " << qgp::format_double(r.values[i]) << "  " << r.kernel_dim[i] << "  "
                       << qgp::format_double(r.error[i]) << "\n";
            }
            emit(os.str(), out_path);
            return kExitOk;
        }
        if (cmd_min->parsed() || cmd_max->parsed()) {
            qgp::MetricGraph g = qgp::load_graph_json(graph_path);
            qgp::SearchOptions opts;
            opts.seed = seed;
            opts.threads = threads;
            opts.enumerate.max_cuts_per_edge = max_cuts;
            qgp::OptResult r;
            if (cmd_min->parsed())
                r = qgp::minimize(g, k, parse_problem(problem_s), parse_p(p_s), parse_class(class_s), opts);
            else
                r = qgp::maximize(g, k, parse_problem(problem_s), opts);
            if (format == "json") {
                emit(qgp::opt_result_to_json(g, r), out_path);
            } else {
                std::ostringstream os;
                os << (cmd_min->parsed() ? "minimal" : "max-min") << " energy: " << qgp::format_double(r.value)
                   << "\nwinner: " << r.winner.name << " (dim " << r.winner.dim << ")\npositions:";
                for (double x : r.positions) os << " " << qgp::format_double(x);
                os << "\ncluster values:";
                for (double v : r.report.cluster_values) os << " " << qgp::format_double(v);
                os << "\nflags: rigid=" << r.flags.rigid << " faithful=" << r.flags.faithful
                   << " internally_connected=" << r.flags.internally_connected << " proper=" << r.flags.proper
                   << "\nboundary_degenerate=" << r.boundary_degenerate << "\n";
                emit(os.str(), out_path);
            }
            return kExitOk;
        }
        if (cmd_sweep->parsed()) {
            qgp::MetricGraph g = qgp::load_graph_json(graph_path);
            qgp::SearchOptions opts;
            opts.seed = seed;
            opts.threads = threads;
            opts.enumerate.max_cuts_per_edge = max_cuts;
            std::vector<qgp::SweepRow> rows;
            std::string param;
            if (!p_grid_s.empty()) {
                auto grid = parse_grid(p_grid_s, true);
                if (grid.empty()) throw std::invalid_argument("empty p grid");
                rows = qgp::sweep_p(g, k, parse_problem(problem_s), grid, parse_class(class_s), opts);
                param = "p";
            } else if (!length_grid_s.empty()) {
                if (edge_id.empty()) throw std::invalid_argument("--edge is required for a length sweep");
                auto grid = parse_grid(length_grid_s, false);
                if (grid.empty()) throw std::invalid_argument("empty length grid");
                rows = qgp::sweep_length(g, g.edge_index(edge_id), grid, k, parse_problem(problem_s),
                                         parse_p(p_s), parse_class(class_s), opts);
                param = "length";
            } else {
                throw std::invalid_argument("either --p-grid or --length-grid is required");
            }
            emit(qgp::sweep_to_csv(rows, param), out_path);
            return kExitOk;
        }
        if (cmd_verify->parsed()) {
            auto results = qgp::run_acceptance(fixture_filter, tol_scale, threads);
            if (results.empty()) {
                std::cerr << "no checks match filter '" << fixture_filter << "'\n";
                return kExitConfig;
            }
            bool all = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.id;
                if (!r.pass && !r.detail.empty()) std::cout << "  [" << r.detail << "]";
                std::cout << "\n";
                all = all && r.pass;
            }
            return all ? kExitOk : kExitVerifyFail;
        }
        if (cmd_fixtures->parsed()) {
            auto paths = qgp::fixtures::write_fixture_files(fixture_dir);
            for (const auto& p : paths) std::cout << p << "\n";
            return kExitOk;
        }
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const qgp::CapExceeded& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
