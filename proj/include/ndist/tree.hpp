#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ndist/ot.hpp"

namespace ndist {

struct Node {
    int id = 0;
    int stage = 1;              // 1..T
    Eigen::VectorXd value;
    double cond_prob = 1.0;     // probability given the parent; 1 for the root
    std::optional<int> parent;
};

// Rooted tree of valued nodes: a finite discrete-time stochastic process.
// Immutable after construction; validate() reports invariant violations.
class ScenarioTree {
public:
    ScenarioTree(int depth, int value_dim, std::vector<Node> nodes);

    int depth() const { return depth_; }
    int value_dim() const { return value_dim_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    bool has_node(int id) const { return index_.count(id) != 0; }
    const Node& node(int id) const;
    const std::vector<int>& children(int id) const;

    // Node ids at a given stage, ascending. Stages outside [1, depth] are empty.
    const std::vector<int>& stage_nodes(int stage) const;
    const std::vector<int>& leaves() const { return stage_nodes(depth_); }
    int root_id() const;

    // Concatenated values along the root-to-leaf path, length depth * value_dim.
    Eigen::VectorXd path_values(int leaf_id) const;

private:
    int depth_;
    int value_dim_;
    std::vector<Node> nodes_;  // sorted by id
    std::unordered_map<int, int> index_;
    std::unordered_map<int, std::vector<int>> children_;
    std::vector<std::vector<int>> stages_;  // [0] unused, [t] = stage-t ids
    std::vector<int> empty_;
};

struct PathLaw {
    std::vector<int> leaf_ids;             // ascending
    std::vector<Eigen::VectorXd> values;   // full paths, length T*N each
    Eigen::VectorXd probs;
};

struct GenSpec {
    int depth = 1;
    int max_children = 3;
    int value_dim = 1;
    std::uint64_t seed = 0;
    double increment_scale = 1.0;
};

std::vector<std::string> validate(const ScenarioTree& tree);

// Throws std::invalid_argument listing the violations if the tree is invalid.
void require_valid(const ScenarioTree& tree);

PathLaw path_law(const ScenarioTree& tree);

DiscreteDistribution children_distribution(const ScenarioTree& tree, int node_id);

// Seeded random tree: child counts uniform on {1..max_children}, values a
// Gaussian random walk, child probabilities uniform-then-normalized.
ScenarioTree generate(const GenSpec& spec);

class TreeParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ScenarioTree parse_tree(const std::string& text);
std::string serialize_tree(const ScenarioTree& tree);

}  // namespace ndist
