#include "ndist/nested.hpp"

#include <cmath>
#include <functional>
#include <future>

namespace ndist {

namespace {

double lr_norm(const Eigen::VectorXd& d, double r) {
    if (r == 1.0) return d.cwiseAbs().sum();
    if (r == 2.0) return d.norm();
    double s = 0.0;
    for (Eigen::Index k = 0; k < d.size(); ++k) s += std::pow(std::abs(d[k]), r);
    return std::pow(s, 1.0 / r);
}

void check_pair(const ScenarioTree& x, const ScenarioTree& y, double r) {
    if (r < 1.0) throw std::invalid_argument("r must be >= 1");
    require_valid(x);
    require_valid(y);
    if (x.depth() != y.depth())
        throw std::invalid_argument("trees have different depths (" +
                                    std::to_string(x.depth()) + " vs " +
                                    std::to_string(y.depth()) + ")");
    if (x.value_dim() != y.value_dim())
        throw std::invalid_argument("trees have different value dimensions (" +
                                    std::to_string(x.value_dim()) + " vs " +
                                    std::to_string(y.value_dim()) + ")");
}

// Subproblem solver: OT value and plan for marginals p, q under cost c.
using SubSolver = std::function<OtSolution(
    const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::MatrixXd&)>;

NDResult backward_recursion(const ScenarioTree& x, const ScenarioTree& y,
                            double r, const SubSolver& solve, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    const int depth = x.depth();

    NDResult res;
    res.stage_costs.cost.resize(depth);
    res.stage_costs.x_node_ids.resize(depth);
    res.stage_costs.y_node_ids.resize(depth);
    for (int t = 1; t <= depth; ++t) {
        res.stage_costs.x_node_ids[t - 1] = x.stage_nodes(t);
        res.stage_costs.y_node_ids[t - 1] = y.stage_nodes(t);
    }

    // Position of a node within its stage list, per tree.
    auto positions = [depth](const ScenarioTree& tree) {
        std::unordered_map<int, int> pos;
        for (int t = 1; t <= depth; ++t) {
            const auto& ids = tree.stage_nodes(t);
            for (int k = 0; k < static_cast<int>(ids.size()); ++k) pos[ids[k]] = k;
        }
        return pos;
    };
    const std::unordered_map<int, int> xpos = positions(x);
    const std::unordered_map<int, int> ypos = positions(y);

    // Terminal condition: ground path distances between leaves.
    res.stage_costs.cost[depth - 1] = path_cost_matrix(x, y, r);

    long count = 0;
    for (int t = depth - 1; t >= 1; --t) {
        const auto& xids = x.stage_nodes(t);
        const auto& yids = y.stage_nodes(t);
        const Eigen::MatrixXd& next = res.stage_costs.cost[t];
        Eigen::MatrixXd cur(xids.size(), yids.size());

        auto solve_block = [&](int a, int b) {
            const auto px = children_distribution(x, xids[a]);
            const auto py = children_distribution(y, yids[b]);
            Eigen::MatrixXd block(px.size(), py.size());
            for (int i = 0; i < px.size(); ++i)
                for (int j = 0; j < py.size(); ++j)
                    block(i, j) = std::pow(
                        next(xpos.at(px.support[i]), ypos.at(py.support[j])), r);
            try {
                cur(a, b) = std::pow(solve(px.weights, py.weights, block).value, 1.0 / r);
            } catch (const SinkhornError& e) {
                throw std::runtime_error(
                    "entropic nested distance: stage " + std::to_string(t) +
                    ", nodes (" + std::to_string(xids[a]) + "," +
                    std::to_string(yids[b]) + "): " + e.what());
            }
        };

        const int npairs = static_cast<int>(xids.size() * yids.size());
        count += npairs;
        if (threads > 1 && npairs > 1) {
            const int nw = std::min(threads, npairs);
            std::vector<std::future<void>> futs;
            for (int w = 0; w < nw; ++w)
                futs.push_back(std::async(std::launch::async, [&, w] {
                    for (int k = w; k < npairs; k += nw)
                        solve_block(k / static_cast<int>(yids.size()),
                                    k % static_cast<int>(yids.size()));
                }));
            for (auto& f : futs) f.get();
        } else {
            for (int a = 0; a < static_cast<int>(xids.size()); ++a)
                for (int b = 0; b < static_cast<int>(yids.size()); ++b) solve_block(a, b);
        }
        res.stage_costs.cost[t - 1] = std::move(cur);
    }

    // Top level: OT between the two root laws (single roots, so a 1x1
    // problem) with cost c_1^r; routed through the solver for uniformity.
    Eigen::VectorXd one(1);
    one[0] = 1.0;
    Eigen::MatrixXd top_cost(1, 1);
    top_cost(0, 0) = std::pow(res.stage_costs.cost[0](0, 0), r);
    const OtSolution top = solve(one, one, top_cost);
    res.value = std::pow(top.value, 1.0 / r);
    res.top_plan = top.plan;
    res.subproblem_count = count + 1;
    res.wall_time = std::chrono::steady_clock::now() - t0;
    return res;
}

}  // namespace

Eigen::MatrixXd path_cost_matrix(const ScenarioTree& x, const ScenarioTree& y,
                                 double r) {
    check_pair(x, y, r);
    const auto& xl = x.leaves();
    const auto& yl = y.leaves();
    Eigen::MatrixXd c(xl.size(), yl.size());
    std::vector<Eigen::VectorXd> ypaths;
    ypaths.reserve(yl.size());
    for (int id : yl) ypaths.push_back(y.path_values(id));
    for (size_t i = 0; i < xl.size(); ++i) {
        const Eigen::VectorXd xi = x.path_values(xl[i]);
        for (size_t j = 0; j < yl.size(); ++j)
            c(i, j) = lr_norm(xi - ypaths[j], r);
    }
    return c;
}

NDResult nested_distance(const ScenarioTree& x, const ScenarioTree& y, double r,
                         int threads) {
    check_pair(x, y, r);
    return backward_recursion(
        x, y, r,
        [](const Eigen::VectorXd& p, const Eigen::VectorXd& q,
           const Eigen::MatrixXd& c) { return solve_exact(p, q, c); },
        threads);
}

NDResult entropic_nested_distance(const ScenarioTree& x, const ScenarioTree& y,
                                  double r, const EntropicOptions& opts,
                                  int threads) {
    check_pair(x, y, r);
    RegOtOptions ro;
    ro.gamma_divisor = opts.gamma_divisor;
    ro.tol = opts.tol;
    ro.max_iter = opts.max_iter;
    ro.log_domain = opts.log_domain;
    return backward_recursion(
        x, y, r,
        [ro](const Eigen::VectorXd& p, const Eigen::VectorXd& q,
             const Eigen::MatrixXd& c) {
            const SinkhornResult sr = reg_ot(p, q, c, ro);
            return OtSolution{sr.reg_cost, sr.plan};
        },
        threads);
}

double wasserstein_paths(const ScenarioTree& x, const ScenarioTree& y, double r) {
    check_pair(x, y, r);
    const PathLaw lx = path_law(x);
    const PathLaw ly = path_law(y);
    return wasserstein(lx.probs, ly.probs, path_cost_matrix(x, y, r), r);
}

}  // namespace ndist
