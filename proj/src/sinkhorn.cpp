#include "ndist/sinkhorn.hpp"

#include <cmath>
#include <limits>

namespace ndist {

double entropy(const Eigen::VectorXd& weights) {
    check_distribution(weights, "entropy");
    double h = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        h -= weights[i] * std::log(weights[i]);
    return h < 0.0 ? 0.0 : h;  // clip -0.0 from the degenerate law
}

double entropy(const DiscreteDistribution& p) { return entropy(p.weights); }

Eigen::MatrixXd gibbs_kernel(const CostMatrix& c, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gibbs_kernel: gamma must be > 0");
    return (-c.array() / gamma).exp().matrix();
}

std::optional<double> gamma_heuristic(const CostMatrix& c, double divisor) {
    if (!(divisor > 0.0))
        throw std::invalid_argument("gamma_heuristic: divisor must be > 0");
    const double cmax = c.size() == 0 ? 0.0 : c.maxCoeff();
    if (cmax <= std::numeric_limits<double>::epsilon()) return std::nullopt;
    return cmax / divisor;
}

namespace {

// Fixed ascending-index summation everywhere, for run-to-run reproducibility.

double dot_row(const Eigen::MatrixXd& a, int i, const Eigen::VectorXd& x) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) s += a(i, j) * x[j];
    return s;
}

double dot_col(const Eigen::MatrixXd& a, int j, const Eigen::VectorXd& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += a(i, j) * x[i];
    return s;
}

double marginal_l1(const Eigen::MatrixXd& plan, const Eigen::VectorXd& p,
                   const Eigen::VectorXd& q) {
    double row_err = 0.0, col_err = 0.0;
    for (Eigen::Index i = 0; i < plan.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < plan.cols(); ++j) s += plan(i, j);
        row_err += std::abs(s - p[i]);
    }
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < plan.rows(); ++i) s += plan(i, j);
        col_err += std::abs(s - q[j]);
    }
    return std::max(row_err, col_err);
}

SinkhornResult finish(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                      const CostMatrix& c, Eigen::MatrixXd plan,
                      Eigen::VectorXd u, Eigen::VectorXd v, int iter) {
    SinkhornResult res;
    res.plan.entries = std::move(plan);
    res.plan.row_marginal_err =
        (res.plan.entries.rowwise().sum() - p).cwiseAbs().maxCoeff();
    res.plan.col_marginal_err =
        (res.plan.entries.colwise().sum().transpose() - q).cwiseAbs().maxCoeff();
    res.u = std::move(u);
    res.v = std::move(v);
    res.iterations = iter;
    res.marginal_err = marginal_l1(res.plan.entries, p, q);
    double cost = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            cost += c(i, j) * res.plan.entries(i, j);
    res.reg_cost = cost;
    return res;
}

SinkhornResult sinkhorn_plain(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                              const CostMatrix& c, const SinkhornConfig& cfg) {
    const int n = static_cast<int>(p.size());
    const int m = static_cast<int>(q.size());
    const Eigen::MatrixXd g = gibbs_kernel(c, cfg.gamma);
    Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
    Eigen::VectorXd gv(n);
    double err = std::numeric_limits<double>::infinity();

    for (int i = 0; i < n; ++i) gv[i] = dot_row(g, i, v);
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        for (int i = 0; i < n; ++i) {
            if (!(gv[i] > 0.0) || !std::isfinite(gv[i]))
                throw SinkhornError(
                    "sinkhorn: underflow/overflow in plain mode; use log_domain",
                    err, iter);
            u[i] = p[i] / gv[i];
        }
        for (int j = 0; j < m; ++j) {
            const double gu = dot_col(g, j, u);
            if (!(gu > 0.0) || !std::isfinite(gu))
                throw SinkhornError(
                    "sinkhorn: underflow/overflow in plain mode; use log_domain",
                    err, iter);
            v[j] = q[j] / gu;
        }
        // Column marginals are exact right after the v-update, so only the
        // row violation of diag(u) G diag(v) needs checking.
        for (int i = 0; i < n; ++i) gv[i] = dot_row(g, i, v);
        err = 0.0;
        for (int i = 0; i < n; ++i) err += std::abs(u[i] * gv[i] - p[i]);
        if (err <= cfg.tol) {
            Eigen::MatrixXd plan(n, m);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < m; ++j) plan(i, j) = u[i] * g(i, j) * v[j];
            return finish(p, q, c, std::move(plan), std::move(u), std::move(v), iter);
        }
    }
    throw SinkhornError("sinkhorn: no convergence after " +
                            std::to_string(cfg.max_iter) +
                            " iterations, marginal_err=" + std::to_string(err),
                        err, cfg.max_iter);
}

SinkhornResult sinkhorn_log(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                            const CostMatrix& c, const SinkhornConfig& cfg) {
    const int n = static_cast<int>(p.size());
    const int m = static_cast<int>(q.size());
    const double gamma = cfg.gamma;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);  // f = gamma log u
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);  // g = gamma log v
    Eigen::VectorXd logp(n), logq(m);
    for (int i = 0; i < n; ++i) logp[i] = std::log(p[i]);
    for (int j = 0; j < m; ++j) logq[j] = std::log(q[j]);
    Eigen::MatrixXd plan(n, m);
    double err = std::numeric_limits<double>::infinity();

    auto lse_row = [&](int i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j)
            mx = std::max(mx, (g[j] - c(i, j)) / gamma);
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += std::exp((g[j] - c(i, j)) / gamma - mx);
        return mx + std::log(s);
    };
    auto lse_col = [&](int j) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            mx = std::max(mx, (f[i] - c(i, j)) / gamma);
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::exp((f[i] - c(i, j)) / gamma - mx);
        return mx + std::log(s);
    };

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        for (int i = 0; i < n; ++i) f[i] = gamma * (logp[i] - lse_row(i));
        for (int j = 0; j < m; ++j) g[j] = gamma * (logq[j] - lse_col(j));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                plan(i, j) = std::exp((f[i] + g[j] - c(i, j)) / gamma);
        err = marginal_l1(plan, p, q);
        if (err <= cfg.tol) {
            Eigen::VectorXd u(n), v(m);
            for (int i = 0; i < n; ++i) u[i] = std::exp(f[i] / gamma);
            for (int j = 0; j < m; ++j) v[j] = std::exp(g[j] / gamma);
            return finish(p, q, c, std::move(plan), std::move(u), std::move(v), iter);
        }
    }
    throw SinkhornError("sinkhorn: no convergence after " +
                            std::to_string(cfg.max_iter) +
                            " iterations, marginal_err=" + std::to_string(err),
                        err, cfg.max_iter);
}

}  // namespace

SinkhornResult sinkhorn(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                        const CostMatrix& c, const SinkhornConfig& cfg) {
    check_distribution(p, "p");
    check_distribution(q, "q");
    if (c.rows() != p.size() || c.cols() != q.size())
        throw std::invalid_argument("sinkhorn: cost matrix dimension mismatch");
    if (!(cfg.gamma > 0.0)) throw std::invalid_argument("sinkhorn: gamma must be > 0");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("sinkhorn: tol must be > 0");
    if (cfg.max_iter < 1) throw std::invalid_argument("sinkhorn: max_iter must be >= 1");
    return cfg.log_domain ? sinkhorn_log(p, q, c, cfg) : sinkhorn_plain(p, q, c, cfg);
}

SinkhornResult reg_ot(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                      const CostMatrix& c, const RegOtOptions& opts) {
    const auto gamma = gamma_heuristic(c, opts.gamma_divisor);
    if (!gamma) {
        // All-zero cost: every coupling has cost 0; report the product plan.
        SinkhornResult res;
        res.plan.entries = p * q.transpose();
        res.u = p;
        res.v = q;
        res.iterations = 0;
        res.marginal_err = marginal_l1(res.plan.entries, p, q);
        res.reg_cost = 0.0;
        return res;
    }
    SinkhornConfig cfg;
    cfg.gamma = *gamma;
    cfg.tol = opts.tol;
    cfg.max_iter = opts.max_iter;
    cfg.log_domain = opts.log_domain;
    return sinkhorn(p, q, c, cfg);
}

}  // namespace ndist
