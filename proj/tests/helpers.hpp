#pragma once

#include <random>

#include "ndist/tree.hpp"

namespace ndist_test {

inline ndist::Node make_node(int id, int stage, std::vector<double> value,
                             double cond_prob, std::optional<int> parent) {
    ndist::Node nd;
    nd.id = id;
    nd.stage = stage;
    nd.value = Eigen::Map<Eigen::VectorXd>(value.data(), value.size());
    nd.cond_prob = cond_prob;
    nd.parent = parent;
    return nd;
}

// Three-stage tree: root A, children A+eps / A-eps (prob 1/2 each), then a
// deterministic jump to 2A / 0.
inline ndist::ScenarioTree fork_x(double a = 1.0, double eps = 0.1) {
    std::vector<ndist::Node> nodes;
    nodes.push_back(make_node(0, 1, {a}, 1.0, std::nullopt));
    nodes.push_back(make_node(1, 2, {a + eps}, 0.5, 0));
    nodes.push_back(make_node(2, 2, {a - eps}, 0.5, 0));
    nodes.push_back(make_node(3, 3, {2 * a}, 1.0, 1));
    nodes.push_back(make_node(4, 3, {0.0}, 1.0, 2));
    return ndist::ScenarioTree(3, 1, std::move(nodes));
}

// Three-stage tree: root A, deterministic middle A, then 2A / 0 with prob 1/2.
inline ndist::ScenarioTree fork_y(double a = 1.0) {
    std::vector<ndist::Node> nodes;
    nodes.push_back(make_node(0, 1, {a}, 1.0, std::nullopt));
    nodes.push_back(make_node(1, 2, {a}, 1.0, 0));
    nodes.push_back(make_node(2, 3, {2 * a}, 0.5, 1));
    nodes.push_back(make_node(3, 3, {0.0}, 0.5, 1));
    return ndist::ScenarioTree(3, 1, std::move(nodes));
}

inline ndist::ScenarioTree random_tree(int depth, std::uint64_t seed,
                                       int max_children = 3, int value_dim = 1) {
    ndist::GenSpec gs;
    gs.depth = depth;
    gs.max_children = max_children;
    gs.value_dim = value_dim;
    gs.seed = seed;
    gs.increment_scale = 1.0;
    return ndist::generate(gs);
}

inline ndist::ScenarioTree chain_tree(int depth, std::uint64_t seed) {
    return random_tree(depth, seed, 1);
}

inline ndist::ScenarioTree scale_tree(const ndist::ScenarioTree& t, double lambda) {
    std::vector<ndist::Node> nodes = t.nodes();
    for (auto& nd : nodes) nd.value *= lambda;
    return ndist::ScenarioTree(t.depth(), t.value_dim(), std::move(nodes));
}

inline Eigen::VectorXd random_distribution(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = unif(rng);
    w /= w.sum();
    return w;
}

inline Eigen::MatrixXd random_cost(std::mt19937_64& rng, int n, int m,
                                   double scale = 1.0) {
    std::uniform_real_distribution<double> unif(0.0, scale);
    Eigen::MatrixXd c(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) c(i, j) = unif(rng);
    return c;
}

}  // namespace ndist_test
