#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ndist/bench.hpp"
#include "ndist/nested.hpp"
#include "ndist/plan_export.hpp"
#include "ndist/sinkhorn.hpp"
#include "ndist/tree.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

ndist::ScenarioTree load_tree(const std::string& path) {
    try {
        return ndist::parse_tree(read_file(path));
    } catch (const ndist::TreeParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

int env_threads() {
    const char* s = std::getenv("NDIST_THREADS");
    if (!s) return 1;
    const int t = std::atoi(s);
    return t >= 1 ? t : 1;
}

struct GenArgs {
    ndist::GenSpec spec;
    std::string output;
};

int run_gen(const GenArgs& a) {
    const ndist::ScenarioTree tree = ndist::generate(a.spec);
    write_file(a.output, ndist::serialize_tree(tree));
    std::printf("wrote %s: %zu nodes, %zu leaves, depth %d\n", a.output.c_str(),
                tree.nodes().size(), tree.leaves().size(), tree.depth());
    return 0;
}

struct NdArgs {
    std::string file_x, file_y;
    double r = 2.0;
    bool entropic = false;
    double gamma_divisor = 30.0;
    double tol = 1e-9;
    int max_iter = 10000;
    bool plain_mode = false;
    std::string report;
};

int run_nd(const NdArgs& a) {
    const auto x = load_tree(a.file_x);
    const auto y = load_tree(a.file_y);
    const int threads = env_threads();

    ndist::NDResult res;
    if (a.entropic) {
        ndist::EntropicOptions eo;
        eo.gamma_divisor = a.gamma_divisor;
        eo.tol = a.tol;
        eo.max_iter = a.max_iter;
        eo.log_domain = !a.plain_mode;
        res = ndist::entropic_nested_distance(x, y, a.r, eo, threads);
    } else {
        res = ndist::nested_distance(x, y, a.r, threads);
    }
    std::printf("%.12g\n", res.value);

    if (!a.report.empty()) {
        nlohmann::ordered_json doc;
        doc["value"] = res.value;
        doc["r"] = a.r;
        doc["entropic"] = a.entropic;
        if (a.entropic) doc["gamma_divisor"] = a.gamma_divisor;
        doc["subproblem_count"] = res.subproblem_count;
        doc["wall_time_ms"] = res.wall_time.count() * 1e3;
        doc["stages"] = nlohmann::ordered_json::array();
        for (size_t t = 0; t < res.stage_costs.cost.size(); ++t) {
            nlohmann::ordered_json js;
            js["stage"] = t + 1;
            js["x_nodes"] = res.stage_costs.x_node_ids[t];
            js["y_nodes"] = res.stage_costs.y_node_ids[t];
            const auto& m = res.stage_costs.cost[t];
            auto rows = nlohmann::ordered_json::array();
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                std::vector<double> row(m.cols());
                for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
                rows.push_back(row);
            }
            js["cost"] = std::move(rows);
            doc["stages"].push_back(std::move(js));
        }
        write_file(a.report, doc.dump(2) + "\n");
    }
    return 0;
}

struct PlanArgs {
    std::string tree_a, tree_b, cloud_a, cloud_b;
    double gamma = 0.0;
    std::vector<double> thresholds = {0.3, 0.2};
    double r = 2.0;
    double tol = 1e-9;
    int max_iter = 10000;
    std::string output;
};

int run_plan(const PlanArgs& a) {
    Eigen::VectorXd p, q;
    Eigen::MatrixXd cost;
    if (!a.tree_a.empty()) {
        const auto x = load_tree(a.tree_a);
        const auto y = load_tree(a.tree_b);
        p = ndist::path_law(x).probs;
        q = ndist::path_law(y).probs;
        cost = ndist::path_cost_matrix(x, y, a.r);
    } else {
        const auto ca = ndist::parse_point_cloud_csv(read_file(a.cloud_a));
        const auto cb = ndist::parse_point_cloud_csv(read_file(a.cloud_b));
        p = ca.weights;
        q = cb.weights;
        cost = ndist::euclidean_cost(ca, cb);
    }

    ndist::SinkhornConfig cfg;
    cfg.gamma = a.gamma;
    cfg.tol = a.tol;
    cfg.max_iter = a.max_iter;
    const ndist::SinkhornResult res = ndist::sinkhorn(p, q, cost, cfg);

    ndist::write_plan_csv(res.plan.entries, a.output);
    const auto edges = ndist::threshold_edges(res.plan.entries, p, a.thresholds);
    ndist::write_edges_csv(edges, a.output + ".edges.csv");
    std::printf("reg_cost %.12g, %d iterations, %zu threshold edges\n", res.reg_cost,
                res.iterations, edges.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nested Distance between scenario trees and its entropic regularization"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* cgen = app.add_subcommand("gen", "generate a random scenario tree");
    cgen->add_option("--depth", gen.spec.depth, "number of stages T")->required();
    cgen->add_option("--max-children", gen.spec.max_children, "max children per node");
    cgen->add_option("--value-dim", gen.spec.value_dim, "value dimension N");
    cgen->add_option("--seed", gen.spec.seed, "RNG seed");
    cgen->add_option("--increment-scale", gen.spec.increment_scale,
                     "std dev of the value increments");
    cgen->add_option("-o,--output", gen.output, "output tree JSON")->required();

    NdArgs nd;
    auto* cnd = app.add_subcommand("nd", "compute the (entropic) Nested Distance");
    cnd->add_option("tree_x", nd.file_x, "first tree JSON")->required();
    cnd->add_option("tree_y", nd.file_y, "second tree JSON")->required();
    cnd->add_option("--r", nd.r, "order r of the distance");
    cnd->add_flag("--entropic", nd.entropic, "use Sinkhorn subproblems (END)");
    cnd->add_option("--gamma-divisor", nd.gamma_divisor, "gamma = max cost / divisor");
    cnd->add_option("--tol", nd.tol, "Sinkhorn marginal tolerance");
    cnd->add_option("--max-iter", nd.max_iter, "Sinkhorn iteration cap");
    cnd->add_flag("--plain-mode", nd.plain_mode, "disable log-domain Sinkhorn");
    cnd->add_option("--report", nd.report, "write a JSON report (stage costs, timing)");

    ndist::BenchConfig bench;
    bench.depths = {2, 4, 6};
    auto* cbench = app.add_subcommand("bench", "ND vs END timing/accuracy protocol");
    cbench->add_option("--depths", bench.depths, "tree depths to benchmark")
        ->delimiter(',');
    cbench->add_option("--runs", bench.runs, "tree pairs per depth");
    cbench->add_option("--max-children", bench.max_children, "max children per node");
    cbench->add_option("--value-dim", bench.value_dim, "value dimension N");
    cbench->add_option("--r", bench.r, "order r of the distance");
    cbench->add_option("--gamma-divisor", bench.gamma_divisor, "gamma heuristic divisor");
    cbench->add_option("--seed", bench.seed, "RNG seed for the tree sequence");
    cbench->add_option("--increment-scale", bench.increment_scale,
                       "std dev of the value increments");
    cbench->add_option("--tol", bench.sinkhorn_tol, "Sinkhorn marginal tolerance");
    cbench->add_flag("--log-domain", bench.sinkhorn_log_domain,
                     "log-domain Sinkhorn in the END timings");
    cbench->add_option("--timing-reps", bench.timing_reps,
                       "timed repeats per solve (minimum is reported)");
    cbench->add_option("-o,--output", bench.output, "summary CSV path")->required();

    PlanArgs plan;
    auto* cplan = app.add_subcommand("plan", "export a regularized transport plan");
    auto* ta = cplan->add_option("--tree-a", plan.tree_a, "first tree JSON");
    auto* tb = cplan->add_option("--tree-b", plan.tree_b, "second tree JSON");
    auto* ca = cplan->add_option("--cloud-a", plan.cloud_a, "first point cloud CSV");
    auto* cb = cplan->add_option("--cloud-b", plan.cloud_b, "second point cloud CSV");
    ta->needs(tb);
    tb->needs(ta);
    ca->needs(cb);
    cb->needs(ca);
    ta->excludes(ca);
    cplan->add_option("--gamma", plan.gamma, "regularization strength")
        ->required()
        ->check(CLI::PositiveNumber);
    cplan->add_option("--thresholds", plan.thresholds,
                      "source-mass fractions for the edge lists")
        ->delimiter(',');
    cplan->add_option("--r", plan.r, "path ground-metric order (tree inputs)");
    cplan->add_option("--tol", plan.tol, "Sinkhorn marginal tolerance");
    cplan->add_option("--max-iter", plan.max_iter, "Sinkhorn iteration cap");
    cplan->add_option("-o,--output", plan.output, "plan CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cgen->parsed()) return run_gen(gen);
        if (cnd->parsed()) return run_nd(nd);
        if (cbench->parsed()) {
            const auto report = ndist::run_bench(bench);
            for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
            std::printf("wrote %s (%zu rows) and %s.raw.csv (%zu pairs)\n",
                        bench.output.c_str(), report.rows.size(), bench.output.c_str(),
                        report.pairs.size());
            return 0;
        }
        if (cplan->parsed()) {
            if (plan.tree_a.empty() == plan.cloud_a.empty()) {
                std::cerr << "plan: give either --tree-a/--tree-b or --cloud-a/--cloud-b\n";
                return 2;
            }
            return run_plan(plan);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
