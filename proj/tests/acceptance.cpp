// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "ndist/bench.hpp"
#include "ndist/nested.hpp"
#include "ndist/sinkhorn.hpp"
#include "oracle.hpp"

using namespace ndist;
using namespace ndist_test;

namespace {

using Check = std::function<bool(std::string&)>;

bool expect(bool ok, const std::string& msg, std::string& detail) {
    if (!ok && detail.empty()) detail = msg;
    return ok;
}

// 1. solve_exact vs the basic-feasible-solution enumeration oracle.
bool criterion_oracle_equivalence(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int m = 1 + static_cast<int>(rng() % 4);
        const auto p = random_distribution(rng, n);
        const auto q = random_distribution(rng, m);
        const auto c = random_cost(rng, n, m);
        const double solved = solve_exact(p, q, c).value;
        const double ref = oracle_exact(p, q, c);
        ok &= expect(std::abs(solved - ref) <= 1e-9,
                     "trial " + std::to_string(trial) + ": |" + std::to_string(solved) +
                         " - " + std::to_string(ref) + "| > 1e-9",
                     detail);
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    ok &= expect(secs < 10.0, "runtime " + std::to_string(secs) + "s >= 10s", detail);
    return ok;
}

// 2. Sinkhorn contract: marginals, factorization, dominance.
bool criterion_sinkhorn_contract(std::string& detail) {
    std::mt19937_64 rng(1002);
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 10);
        const int m = 1 + static_cast<int>(rng() % 10);
        const auto p = random_distribution(rng, n);
        const auto q = random_distribution(rng, m);
        const auto c = random_cost(rng, n, m);
        const auto gamma = gamma_heuristic(c);
        if (!gamma) continue;
        SinkhornConfig cfg;
        cfg.gamma = *gamma;
        cfg.tol = 1e-13;  // tight enough that reg_cost cannot dip below the
        cfg.max_iter = 200000;  // exact value through marginal slack
        const auto res = sinkhorn(p, q, c, cfg);
        ok &= expect(res.marginal_err <= 1e-9, "marginal violation > 1e-9", detail);
        const auto g = gibbs_kernel(c, cfg.gamma);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                const double ref = res.u[i] * g(i, j) * res.v[j];
                ok &= expect(std::abs(res.plan.entries(i, j) - ref) <=
                                 1e-12 * std::max(std::abs(ref), 1e-300),
                             "plan does not factorize as diag(u) G diag(v)", detail);
            }
        const double exact = solve_exact(p, q, c).value;
        ok &= expect(res.reg_cost >= exact - 1e-12,
                     "reg_cost " + std::to_string(res.reg_cost) + " < exact " +
                         std::to_string(exact),
                     detail);
    }
    return ok;
}

// 3. gamma -> 0 convergence on a fixed seeded 5x5 instance.
bool criterion_gamma_convergence(std::string& detail) {
    std::mt19937_64 rng(1003);
    const auto p = random_distribution(rng, 5);
    const auto q = random_distribution(rng, 5);
    const auto c = random_cost(rng, 5, 5);
    RegOtOptions opts;
    opts.gamma_divisor = 1000.0;
    opts.log_domain = true;
    opts.max_iter = 10000;
    const auto res = reg_ot(p, q, c, opts);
    const double exact = solve_exact(p, q, c).value;
    bool ok = expect(std::abs(res.reg_cost - exact) <= 1e-3 * c.maxCoeff(),
                     "|reg_cost - exact| = " + std::to_string(std::abs(res.reg_cost - exact)) +
                         " > 1e-3 * max c",
                     detail);
    ok &= expect(res.iterations <= 10000,
                 std::to_string(res.iterations) + " iterations > 10000", detail);
    return ok;
}

// 4. Epsilon-fork fixtures, A = 1, eps = 0.1, r = 1.
bool criterion_fork_fixtures(std::string& detail) {
    const auto x = fork_x(1.0, 0.1);
    const auto y = fork_y(1.0);
    bool ok = true;
    const double nd = nested_distance(x, y, 1.0).value;
    ok &= expect(std::abs(nd - 1.1) <= 1e-9,
                 "ND_1 = " + std::to_string(nd) + ", expected 1.1", detail);
    ok &= expect(std::abs(nd - oracle_nested(x, y, 1.0)) <= 1e-9,
                 "ND_1 disagrees with the nested enumeration oracle", detail);
    const auto lx = path_law(x);
    const auto ly = path_law(y);
    const double ref = oracle_exact(lx.probs, ly.probs, path_cost_matrix(x, y, 1.0));
    const double w = wasserstein_paths(x, y, 1.0);
    ok &= expect(std::abs(w - ref) <= 1e-12,
                 "W_1 = " + std::to_string(w) + " != oracle " + std::to_string(ref),
                 detail);
    ok &= expect(w <= nd + 1e-12, "W_1 > ND_1", detail);
    return ok;
}

// 5. Metric axioms for ND_2 on random depth-4 trees.
bool criterion_metric_axioms(std::string& detail) {
    bool ok = true;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto x = random_tree(4, 2000 + 3 * k);
        const auto y = random_tree(4, 2001 + 3 * k);
        const auto z = random_tree(4, 2002 + 3 * k);
        ok &= expect(std::abs(nested_distance(x, x, 2.0).value) <= 1e-10,
                     "identity violated", detail);
        const double xy = nested_distance(x, y, 2.0).value;
        const double yx = nested_distance(y, x, 2.0).value;
        ok &= expect(std::abs(xy - yx) <= 1e-9, "symmetry violated", detail);
        const double yz = nested_distance(y, z, 2.0).value;
        const double xz = nested_distance(x, z, 2.0).value;
        ok &= expect(xz <= xy + yz + 1e-9, "triangle inequality violated", detail);
    }
    return ok;
}

// 6. Structural reductions: depth-2 trees and chain trees.
bool criterion_reductions(std::string& detail) {
    bool ok = true;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto x = random_tree(2, 3000 + 2 * k);
        const auto y = random_tree(2, 3001 + 2 * k);
        const double nd = nested_distance(x, y, 2.0).value;
        const double w = wasserstein_paths(x, y, 2.0);
        ok &= expect(std::abs(nd - w) <= 1e-10,
                     "depth-2 reduction: |ND - W| = " + std::to_string(std::abs(nd - w)),
                     detail);
    }
    for (std::uint64_t k = 0; k < 10; ++k) {
        const auto x = chain_tree(5, 3100 + 2 * k);
        const auto y = chain_tree(5, 3101 + 2 * k);
        const double ground = path_cost_matrix(x, y, 2.0)(0, 0);
        const double nd = nested_distance(x, y, 2.0).value;
        const double en = entropic_nested_distance(x, y, 2.0).value;
        ok &= expect(std::abs(nd - ground) <= 1e-10, "chain ND != path distance", detail);
        ok &= expect(std::abs(en - ground) <= 1e-10, "chain END != path distance", detail);
    }
    return ok;
}

// 7. Scale equivariance of ND and END, plus plan invariance under joint
// (c, gamma) scaling.
bool criterion_scale_equivariance(std::string& detail) {
    bool ok = true;
    for (double lambda : {0.5, 3.0}) {
        for (std::uint64_t k = 0; k < 20; ++k) {
            const auto x = random_tree(3, 4000 + 2 * k);
            const auto y = random_tree(3, 4001 + 2 * k);
            const auto xs = scale_tree(x, lambda);
            const auto ys = scale_tree(y, lambda);
            const double nd = nested_distance(x, y, 2.0).value;
            const double en = entropic_nested_distance(x, y, 2.0).value;
            ok &= expect(std::abs(nested_distance(xs, ys, 2.0).value - lambda * nd) <= 1e-9,
                         "ND scale equivariance violated", detail);
            ok &= expect(
                std::abs(entropic_nested_distance(xs, ys, 2.0).value - lambda * en) <= 1e-9,
                "END scale equivariance violated", detail);
        }
    }
    std::mt19937_64 rng(1007);
    const auto p = random_distribution(rng, 4);
    const auto q = random_distribution(rng, 4);
    const auto c = random_cost(rng, 4, 4);
    SinkhornConfig cfg;
    cfg.gamma = gamma_heuristic(c).value();
    const auto base = sinkhorn(p, q, c, cfg);
    for (double lambda : {0.5, 3.0}) {
        SinkhornConfig scaled = cfg;
        scaled.gamma = lambda * cfg.gamma;
        const auto res = sinkhorn(p, q, (lambda * c).eval(), scaled);
        ok &= expect(
            (res.plan.entries - base.plan.entries).cwiseAbs().maxCoeff() <= 1e-10,
            "plan changed under joint (c, gamma) scaling", detail);
    }
    return ok;
}

// 8. Benchmark trends at desk scale: bounded relative error, depth-6 speedup,
// and larger relative error for r = 1 than r = 2 on identical tree pairs.
bool criterion_bench_trends(std::string& detail) {
    BenchConfig cfg;
    cfg.depths = {2, 4, 6};
    cfg.runs = 10;
    cfg.max_children = 3;
    cfg.value_dim = 2;
    cfg.r = 2.0;
    cfg.seed = 20240817;
    auto r2 = run_bench(cfg);
    bool ok = expect(r2.warnings.empty(), "r=2 bench had failed pairs", detail);
    double mean_rel_r2 = 0.0;
    for (const auto& row : r2.rows) {
        ok &= expect(row.relative_error_pct <= 2.0,
                     "depth " + std::to_string(row.depth) + ": relative error " +
                         std::to_string(row.relative_error_pct) + "% > 2%",
                     detail);
        ok &= expect(row.relative_error_pct >= 0.0, "negative relative error", detail);
        mean_rel_r2 += row.relative_error_pct;
        if (row.depth == 6)
            ok &= expect(row.speedup >= 1.0,
                         "depth-6 speedup " + std::to_string(row.speedup) + " < 1",
                         detail);
    }
    mean_rel_r2 /= static_cast<double>(r2.rows.size());

    cfg.r = 1.0;  // identical tree pairs: generation does not depend on r
    auto r1 = run_bench(cfg);
    ok &= expect(r1.warnings.empty(), "r=1 bench had failed pairs", detail);
    double mean_rel_r1 = 0.0;
    for (const auto& row : r1.rows) mean_rel_r1 += row.relative_error_pct;
    mean_rel_r1 /= static_cast<double>(r1.rows.size());
    ok &= expect(mean_rel_r1 > mean_rel_r2,
                 "r=1 mean relative error " + std::to_string(mean_rel_r1) +
                     "% not larger than r=2 (" + std::to_string(mean_rel_r2) + "%)",
                 detail);
    return ok;
}

// 9. END dominance and subproblem accounting across depths 2..6.
bool criterion_end_dominance(std::string& detail) {
    bool ok = true;
    std::uint64_t seed = 5000;
    for (int depth = 2; depth <= 6; ++depth) {
        for (int k = 0; k < 10; ++k) {
            const auto x = random_tree(depth, seed++);
            const auto y = random_tree(depth, seed++);
            const auto nd = nested_distance(x, y, 2.0);
            const auto en = entropic_nested_distance(x, y, 2.0);
            ok &= expect(en.value >= nd.value - 1e-12, "END < ND - 1e-12", detail);
            long expected = 1;
            for (int t = 1; t < depth; ++t)
                expected += static_cast<long>(x.stage_nodes(t).size()) *
                            static_cast<long>(y.stage_nodes(t).size());
            ok &= expect(nd.subproblem_count == expected,
                         "subproblem_count " + std::to_string(nd.subproblem_count) +
                             " != non-leaf pairs + 1 = " + std::to_string(expected),
                         detail);
        }
    }
    return ok;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, Check>> criteria = {
        {"oracle equivalence of the exact OT solver", criterion_oracle_equivalence},
        {"Sinkhorn marginal/factorization/dominance contract", criterion_sinkhorn_contract},
        {"gamma -> 0 convergence on the fixed 5x5 instance", criterion_gamma_convergence},
        {"epsilon-fork fixtures (ND_1 = 1.1, path Wasserstein oracle)", criterion_fork_fixtures},
        {"metric axioms of ND_2 on random depth-4 trees", criterion_metric_axioms},
        {"structural reductions (depth-2 and chain trees)", criterion_reductions},
        {"scale equivariance of ND and END", criterion_scale_equivariance},
        {"benchmark trend reproduction (r=2 and r=1)", criterion_bench_trends},
        {"END dominance and subproblem accounting", criterion_end_dominance},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].second(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (ok) {
            std::printf("[PASS] criterion %zu: %s\n", i + 1, criteria[i].first.c_str());
        } else {
            ++failures;
            std::printf("[FAIL] criterion %zu: %s (%s)\n", i + 1,
                        criteria[i].first.c_str(), detail.c_str());
        }
        std::fflush(stdout);
    }
    if (failures == 0)
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    else
        std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
    return failures;
}
