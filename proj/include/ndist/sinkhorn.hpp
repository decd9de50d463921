#pragma once

#include <optional>
#include <stdexcept>

#include "ndist/ot.hpp"

namespace ndist {

struct SinkhornConfig {
    double gamma = 1.0;
    double tol = 1e-9;     // max L1 marginal violation
    int max_iter = 10000;
    bool log_domain = true;
};

struct SinkhornResult {
    TransportPlan plan;
    Eigen::VectorXd u, v;  // plan = diag(u) G diag(v)
    int iterations = 0;
    double marginal_err = 0.0;
    double reg_cost = 0.0;  // sum c_ij pi_ij
};

class SinkhornError : public std::runtime_error {
public:
    SinkhornError(const std::string& msg, double marginal_err_, int iterations_)
        : std::runtime_error(msg), marginal_err(marginal_err_), iterations(iterations_) {}
    double marginal_err;
    int iterations;
};

// Shannon entropy -sum p_i log p_i.
double entropy(const DiscreteDistribution& p);
double entropy(const Eigen::VectorXd& weights);

// G_ij = exp(-c_ij / gamma).
Eigen::MatrixXd gibbs_kernel(const CostMatrix& c, double gamma);

// gamma = max_ij c_ij / divisor; nullopt when the cost matrix is
// (numerically) all zero and no regularization strength is defined.
std::optional<double> gamma_heuristic(const CostMatrix& c, double divisor = 30.0);

// Alternating scaling u = p ./ (G v), v = q ./ (G^T u) until both marginal
// L1 violations drop below cfg.tol. Throws SinkhornError on non-convergence
// or on overflow/underflow in non-log mode.
SinkhornResult sinkhorn(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                        const CostMatrix& c, const SinkhornConfig& cfg);

struct RegOtOptions {
    double gamma_divisor = 30.0;
    double tol = 1e-9;
    int max_iter = 10000;
    bool log_domain = true;
};

// Regularized OT value with the per-matrix gamma heuristic. A degenerate
// (all-zero) cost matrix short-circuits to the product coupling with cost 0.
SinkhornResult reg_ot(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                      const CostMatrix& c, const RegOtOptions& opts = {});

}  // namespace ndist
