#pragma once

#include <chrono>

#include "ndist/sinkhorn.hpp"
#include "ndist/tree.hpp"

namespace ndist {

// Backward cost tables c_t, one dense matrix per stage, rows indexed by the
// stage-t nodes of X and columns by the stage-t nodes of Y (ascending id).
struct StageCostTable {
    std::vector<Eigen::MatrixXd> cost;          // [t-1] -> stage-t matrix
    std::vector<std::vector<int>> x_node_ids;   // [t-1]
    std::vector<std::vector<int>> y_node_ids;
};

struct NDResult {
    double value = 0.0;
    StageCostTable stage_costs;
    TransportPlan top_plan;
    long subproblem_count = 0;
    std::chrono::duration<double> wall_time{0};
};

// Ground cost between full value paths: entry (i,j) is the l_r norm of the
// difference of the root-to-leaf value sequences of the i-th leaf of X and
// the j-th leaf of Y (leaves ascending by id).
Eigen::MatrixXd path_cost_matrix(const ScenarioTree& x, const ScenarioTree& y,
                                 double r);

// Nested Distance via the backward recursion with exact OT subproblems.
// threads > 1 parallelizes the independent node-pair subproblems within a
// stage; results are identical to the sequential run.
NDResult nested_distance(const ScenarioTree& x, const ScenarioTree& y, double r,
                         int threads = 1);

struct EntropicOptions {
    double gamma_divisor = 30.0;
    double tol = 1e-9;
    int max_iter = 10000;
    bool log_domain = true;
};

// Same recursion with each OT replaced by its entropic regularization,
// gamma = (max of the children-block cost) / gamma_divisor per subproblem.
NDResult entropic_nested_distance(const ScenarioTree& x, const ScenarioTree& y,
                                  double r, const EntropicOptions& opts = {},
                                  int threads = 1);

// Plain r-Wasserstein distance between the two path laws under the same
// ground path metric; a relaxation of the Nested Distance.
double wasserstein_paths(const ScenarioTree& x, const ScenarioTree& y, double r);

}  // namespace ndist
