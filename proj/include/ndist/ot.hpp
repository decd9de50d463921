#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ndist {

// Finite probability vector with strictly positive weights summing to 1.
// `support` optionally carries the ids of the underlying atoms (e.g. node
// ids of a scenario tree); it is ignored by the solvers.
struct DiscreteDistribution {
    Eigen::VectorXd weights;
    std::vector<int> support;

    int size() const { return static_cast<int>(weights.size()); }
};

using CostMatrix = Eigen::MatrixXd;

// Nonnegative coupling matrix together with the achieved L-inf marginal
// errors against the two prescribed marginals.
struct TransportPlan {
    Eigen::MatrixXd entries;
    double row_marginal_err = 0.0;
    double col_marginal_err = 0.0;
};

struct OtSolution {
    double value = 0.0;
    TransportPlan plan;
};

// Throws std::invalid_argument if w is not a probability vector
// (positive entries, sum 1 within 1e-12).
void check_distribution(const Eigen::VectorXd& w, const std::string& what);

// Exact discrete optimal transport: min <c, pi> over couplings of p and q.
// Transportation simplex with Bland's rule; deterministic given inputs.
OtSolution solve_exact(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                       const CostMatrix& c);
OtSolution solve_exact(const DiscreteDistribution& p, const DiscreteDistribution& q,
                       const CostMatrix& c);

// r-th Wasserstein distance: OT(p, q; ground^r)^(1/r), ground holding the
// pairwise ground-metric distances.
double wasserstein(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                   const CostMatrix& ground, double r);

}  // namespace ndist
