#include "ndist/ot.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ndist {

void check_distribution(const Eigen::VectorXd& w, const std::string& what) {
    if (w.size() == 0)
        throw std::invalid_argument(what + ": empty probability vector");
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (!(w[i] > 0.0) || !std::isfinite(w[i]))
            throw std::invalid_argument(what + ": weight " + std::to_string(i) +
                                        " is not strictly positive");
    }
    if (std::abs(w.sum() - 1.0) > 1e-12)
        throw std::invalid_argument(what + ": weights sum to " +
                                    std::to_string(w.sum()) + ", expected 1");
}

namespace {

void check_inputs(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                  const CostMatrix& c) {
    check_distribution(p, "p");
    check_distribution(q, "q");
    if (c.rows() != p.size() || c.cols() != q.size())
        throw std::invalid_argument("cost matrix is " + std::to_string(c.rows()) +
                                    "x" + std::to_string(c.cols()) + ", expected " +
                                    std::to_string(p.size()) + "x" +
                                    std::to_string(q.size()));
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            if (!std::isfinite(c(i, j)) || c(i, j) < 0.0)
                throw std::invalid_argument("cost entry (" + std::to_string(i) + "," +
                                            std::to_string(j) +
                                            ") is negative or non-finite");
        }
}

// Basis of the transportation simplex: n+m-1 cells forming a spanning tree
// of the bipartite row/column graph.
struct Basis {
    int n, m;
    std::vector<char> basic;            // n*m flags
    std::vector<std::vector<int>> adj;  // node -> incident nodes; rows 0..n-1, cols n..n+m-1

    Basis(int n_, int m_) : n(n_), m(m_), basic(n_ * m_, 0), adj(n_ + m_) {}

    void add(int i, int j) {
        basic[i * m + j] = 1;
        adj[i].push_back(n + j);
        adj[n + j].push_back(i);
    }
    void remove(int i, int j) {
        basic[i * m + j] = 0;
        auto drop = [](std::vector<int>& v, int x) {
            for (size_t k = 0; k < v.size(); ++k)
                if (v[k] == x) {
                    v.erase(v.begin() + k);
                    return;
                }
        };
        drop(adj[i], n + j);
        drop(adj[n + j], i);
    }
};

}  // namespace

OtSolution solve_exact(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                       const CostMatrix& c) {
    check_inputs(p, q, c);
    const int n = static_cast<int>(p.size());
    const int m = static_cast<int>(q.size());
    const double cmax = c.maxCoeff();
    const double opt_tol = 1e-11 * (1.0 + cmax);

    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(n, m);
    Basis basis(n, m);

    // Northwest-corner initial basic feasible solution.
    {
        Eigen::VectorXd a = p, b = q;
        int i = 0, j = 0;
        while (true) {
            const double t = std::min(a[i], b[j]);
            flow(i, j) = t;
            basis.add(i, j);
            a[i] -= t;
            b[j] -= t;
            if (i == n - 1 && j == m - 1) break;
            if (i < n - 1 && a[i] < b[j])
                ++i;
            else if (j < m - 1)
                ++j;
            else
                ++i;
        }
    }

    std::vector<double> u(n), v(m);
    std::vector<int> parent(n + m), parent_other(n + m);
    std::vector<char> seen(n + m);

    while (true) {
        // Potentials from the basis tree: u_i + v_j = c_ij on basic cells.
        {
            std::fill(seen.begin(), seen.end(), 0);
            std::queue<int> bfs;
            u[0] = 0.0;
            seen[0] = 1;
            bfs.push(0);
            while (!bfs.empty()) {
                const int x = bfs.front();
                bfs.pop();
                for (int y : basis.adj[x]) {
                    if (seen[y]) continue;
                    seen[y] = 1;
                    if (x < n)
                        v[y - n] = c(x, y - n) - u[x];
                    else
                        u[y] = c(y, x - n) - v[x - n];
                    bfs.push(y);
                }
            }
        }

        // Entering cell, Bland's rule: first (row-major) with negative
        // reduced cost.
        int ei = -1, ej = -1;
        for (int i = 0; i < n && ei < 0; ++i)
            for (int j = 0; j < m; ++j) {
                if (basis.basic[i * m + j]) continue;
                if (c(i, j) - u[i] - v[j] < -opt_tol) {
                    ei = i;
                    ej = j;
                    break;
                }
            }
        if (ei < 0) break;  // optimal

        // Unique path in the basis tree from row ei to column ej.
        {
            std::fill(seen.begin(), seen.end(), 0);
            std::queue<int> bfs;
            seen[ei] = 1;
            parent[ei] = -1;
            bfs.push(ei);
            while (!bfs.empty()) {
                const int x = bfs.front();
                bfs.pop();
                if (x == n + ej) break;
                for (int y : basis.adj[x]) {
                    if (seen[y]) continue;
                    seen[y] = 1;
                    parent[y] = x;
                    bfs.push(y);
                }
            }
        }
        // Cycle cells: entering first (sign +), then path edges from the
        // column end back toward the entering row, alternating signs.
        std::vector<std::pair<int, int>> cyc_cell;
        std::vector<int> cyc_sign;
        cyc_cell.emplace_back(ei, ej);
        cyc_sign.push_back(+1);
        {
            int x = n + ej;
            int s = -1;
            while (parent[x] != -1) {
                const int y = parent[x];
                const int row = x < n ? x : y;
                const int col = x < n ? y - n : x - n;
                cyc_cell.emplace_back(row, col);
                cyc_sign.push_back(s);
                s = -s;
                x = y;
            }
        }

        // Leaving cell: minimum flow among the minus positions, ties broken
        // by lexicographically smallest (i, j).
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        for (size_t k = 0; k < cyc_cell.size(); ++k) {
            if (cyc_sign[k] != -1) continue;
            const double f = flow(cyc_cell[k].first, cyc_cell[k].second);
            if (f < theta - 1e-15 ||
                (f <= theta + 1e-15 &&
                 (leave < 0 || cyc_cell[k] < cyc_cell[leave]))) {
                if (f < theta) theta = f;
                leave = static_cast<int>(k);
            }
        }
        assert(leave >= 0);

        for (size_t k = 0; k < cyc_cell.size(); ++k) {
            double& f = flow(cyc_cell[k].first, cyc_cell[k].second);
            f += cyc_sign[k] * theta;
            if (f < 0.0) f = 0.0;
        }
        basis.remove(cyc_cell[leave].first, cyc_cell[leave].second);
        basis.add(ei, ej);
    }

    OtSolution sol;
    sol.plan.entries = flow;
    sol.plan.row_marginal_err = (flow.rowwise().sum() - p).cwiseAbs().maxCoeff();
    sol.plan.col_marginal_err =
        (flow.colwise().sum().transpose() - q).cwiseAbs().maxCoeff();
    assert(sol.plan.row_marginal_err <= 1e-10 && sol.plan.col_marginal_err <= 1e-10);
    double value = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) value += c(i, j) * flow(i, j);
    sol.value = value;
    return sol;
}

OtSolution solve_exact(const DiscreteDistribution& p, const DiscreteDistribution& q,
                       const CostMatrix& c) {
    return solve_exact(p.weights, q.weights, c);
}

double wasserstein(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                   const CostMatrix& ground, double r) {
    if (r < 1.0) throw std::invalid_argument("wasserstein: r must be >= 1");
    const CostMatrix cr = ground.array().pow(r).matrix();
    return std::pow(solve_exact(p, q, cr).value, 1.0 / r);
}

}  // namespace ndist
