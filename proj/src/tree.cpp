#include "ndist/tree.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

namespace ndist {

ScenarioTree::ScenarioTree(int depth, int value_dim, std::vector<Node> nodes)
    : depth_(depth), value_dim_(value_dim), nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const Node& a, const Node& b) { return a.id < b.id; });
    stages_.resize(std::max(depth_, 0) + 1);
    for (int k = 0; k < static_cast<int>(nodes_.size()); ++k) {
        const Node& nd = nodes_[k];
        index_.emplace(nd.id, k);  // duplicates reported by validate()
        if (nd.stage >= 1 && nd.stage <= depth_) stages_[nd.stage].push_back(nd.id);
        if (nd.parent) children_[*nd.parent].push_back(nd.id);
    }
    for (auto& [id, ch] : children_) std::sort(ch.begin(), ch.end());
}

const Node& ScenarioTree::node(int id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw std::invalid_argument("unknown node id " + std::to_string(id));
    return nodes_[it->second];
}

const std::vector<int>& ScenarioTree::children(int id) const {
    auto it = children_.find(id);
    return it == children_.end() ? empty_ : it->second;
}

const std::vector<int>& ScenarioTree::stage_nodes(int stage) const {
    if (stage < 1 || stage >= static_cast<int>(stages_.size())) return empty_;
    return stages_[stage];
}

int ScenarioTree::root_id() const {
    for (const Node& nd : nodes_)
        if (!nd.parent) return nd.id;
    throw std::logic_error("tree has no root");
}

Eigen::VectorXd ScenarioTree::path_values(int leaf_id) const {
    Eigen::VectorXd path(depth_ * value_dim_);
    int id = leaf_id;
    for (int t = depth_; t >= 1; --t) {
        const Node& nd = node(id);
        path.segment(static_cast<Eigen::Index>(t - 1) * value_dim_, value_dim_) = nd.value;
        if (t > 1) id = *nd.parent;
    }
    return path;
}

std::vector<std::string> validate(const ScenarioTree& tree) {
    std::vector<std::string> out;
    auto bad = [&out](const std::string& msg) { out.push_back(msg); };

    if (tree.depth() < 1) bad("depth must be >= 1, got " + std::to_string(tree.depth()));
    if (tree.value_dim() < 1)
        bad("value_dim must be >= 1, got " + std::to_string(tree.value_dim()));

    std::vector<int> roots;
    std::vector<int> seen;
    for (const Node& nd : tree.nodes()) {
        const std::string tag = "node " + std::to_string(nd.id) + ": ";
        if (std::binary_search(seen.begin(), seen.end(), nd.id))
            bad(tag + "duplicate id");
        seen.insert(std::lower_bound(seen.begin(), seen.end(), nd.id), nd.id);
        if (nd.stage < 1 || nd.stage > tree.depth())
            bad(tag + "stage " + std::to_string(nd.stage) + " outside [1," +
                std::to_string(tree.depth()) + "]");
        if (nd.value.size() != tree.value_dim())
            bad(tag + "value has length " + std::to_string(nd.value.size()) +
                ", expected " + std::to_string(tree.value_dim()));
        for (Eigen::Index k = 0; k < nd.value.size(); ++k)
            if (!std::isfinite(nd.value[k])) {
                bad(tag + "non-finite value");
                break;
            }
        if (!(nd.cond_prob > 0.0 && nd.cond_prob <= 1.0))
            bad(tag + "cond_prob " + std::to_string(nd.cond_prob) + " outside (0,1]");
        if (!nd.parent) {
            roots.push_back(nd.id);
            if (nd.stage != 1) bad(tag + "root must be at stage 1");
            if (nd.cond_prob != 1.0) bad(tag + "root cond_prob must be 1");
        } else if (!tree.has_node(*nd.parent)) {
            bad(tag + "parent " + std::to_string(*nd.parent) + " does not exist");
        } else if (tree.node(*nd.parent).stage != nd.stage - 1) {
            bad(tag + "parent is at stage " +
                std::to_string(tree.node(*nd.parent).stage) + ", expected " +
                std::to_string(nd.stage - 1));
        }
    }
    if (roots.size() != 1)
        bad("tree must have exactly one root, found " + std::to_string(roots.size()));

    for (const Node& nd : tree.nodes()) {
        const auto& ch = tree.children(nd.id);
        if (ch.empty()) {
            if (nd.stage != tree.depth())
                bad("node " + std::to_string(nd.id) + ": leaf at stage " +
                    std::to_string(nd.stage) + ", expected " +
                    std::to_string(tree.depth()));
            continue;
        }
        double sum = 0.0;
        for (int cid : ch) sum += tree.node(cid).cond_prob;
        if (std::abs(sum - 1.0) > 1e-12)
            bad("node " + std::to_string(nd.id) +
                ": children probabilities sum to " + std::to_string(sum) +
                ", expected 1");
    }
    return out;
}

void require_valid(const ScenarioTree& tree) {
    const auto violations = validate(tree);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid tree:";
    for (const auto& v : violations) msg << "\n  " << v;
    throw std::invalid_argument(msg.str());
}

PathLaw path_law(const ScenarioTree& tree) {
    require_valid(tree);
    PathLaw law;
    law.leaf_ids = tree.leaves();
    law.probs.resize(law.leaf_ids.size());
    for (size_t k = 0; k < law.leaf_ids.size(); ++k) {
        law.values.push_back(tree.path_values(law.leaf_ids[k]));
        double prob = 1.0;
        int id = law.leaf_ids[k];
        while (true) {
            const Node& nd = tree.node(id);
            prob *= nd.cond_prob;
            if (!nd.parent) break;
            id = *nd.parent;
        }
        law.probs[static_cast<Eigen::Index>(k)] = prob;
    }
    return law;
}

DiscreteDistribution children_distribution(const ScenarioTree& tree, int node_id) {
    const auto& ch = tree.children(node_id);  // node() below throws on unknown id
    tree.node(node_id);
    if (ch.empty())
        throw std::invalid_argument("node " + std::to_string(node_id) +
                                    " has no children");
    DiscreteDistribution d;
    d.support = ch;
    d.weights.resize(ch.size());
    for (size_t k = 0; k < ch.size(); ++k)
        d.weights[static_cast<Eigen::Index>(k)] = tree.node(ch[k]).cond_prob;
    return d;
}

ScenarioTree generate(const GenSpec& spec) {
    if (spec.depth < 1 || spec.max_children < 1 || spec.value_dim < 1 ||
        !(spec.increment_scale > 0.0))
        throw std::invalid_argument("generate: invalid GenSpec");

    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<int> child_count(1, spec.max_children);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Node> nodes;
    Node root;
    root.id = 0;
    root.stage = 1;
    root.value = Eigen::VectorXd::Zero(spec.value_dim);
    nodes.push_back(root);

    std::vector<int> frontier = {0};
    int next_id = 1;
    for (int t = 1; t < spec.depth; ++t) {
        std::vector<int> next_frontier;
        for (int pid : frontier) {
            const int k = child_count(rng);
            std::vector<double> w(k);
            double sum = 0.0;
            for (int c = 0; c < k; ++c) {
                double x;
                do {
                    x = unif(rng);
                } while (x <= 0.0);
                w[c] = x;
                sum += x;
            }
            for (int c = 0; c < k; ++c) {
                Node child;
                child.id = next_id++;
                child.stage = t + 1;
                child.parent = pid;
                child.cond_prob = w[c] / sum;
                child.value.resize(spec.value_dim);
                for (int d = 0; d < spec.value_dim; ++d)
                    child.value[d] =
                        nodes[pid].value[d] + spec.increment_scale * gauss(rng);
                next_frontier.push_back(child.id);
                nodes.push_back(std::move(child));
            }
        }
        frontier = std::move(next_frontier);
    }
    return ScenarioTree(spec.depth, spec.value_dim, std::move(nodes));
}

ScenarioTree parse_tree(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw TreeParseError(std::string("malformed JSON: ") + e.what());
    }

    auto require = [](const nlohmann::json& obj, const char* field,
                      const std::string& where) -> const nlohmann::json& {
        auto it = obj.find(field);
        if (it == obj.end())
            throw TreeParseError("schema error: missing field '" +
                                 std::string(field) + "' in " + where);
        return *it;
    };

    if (!doc.is_object()) throw TreeParseError("schema error: document must be an object");
    const auto& jdepth = require(doc, "depth", "document");
    const auto& jdim = require(doc, "value_dim", "document");
    const auto& jnodes = require(doc, "nodes", "document");
    if (!jdepth.is_number_integer() || !jdim.is_number_integer())
        throw TreeParseError("schema error: 'depth' and 'value_dim' must be integers");
    if (!jnodes.is_array()) throw TreeParseError("schema error: 'nodes' must be an array");

    std::vector<Node> nodes;
    for (size_t k = 0; k < jnodes.size(); ++k) {
        const auto& jn = jnodes[k];
        const std::string where = "node " + std::to_string(k);
        if (!jn.is_object())
            throw TreeParseError("schema error: " + where + " must be an object");
        Node nd;
        const auto& jid = require(jn, "id", where);
        const auto& jstage = require(jn, "stage", where);
        const auto& jparent = require(jn, "parent", where);
        const auto& jvalue = require(jn, "value", where);
        const auto& jprob = require(jn, "cond_prob", where);
        if (!jid.is_number_integer() || !jstage.is_number_integer())
            throw TreeParseError("schema error: " + where +
                                 ": 'id' and 'stage' must be integers");
        if (!jparent.is_null() && !jparent.is_number_integer())
            throw TreeParseError("schema error: " + where +
                                 ": 'parent' must be an integer or null");
        if (!jvalue.is_array())
            throw TreeParseError("schema error: " + where + ": 'value' must be an array");
        if (!jprob.is_number())
            throw TreeParseError("schema error: " + where + ": 'cond_prob' must be a number");
        nd.id = jid.get<int>();
        nd.stage = jstage.get<int>();
        if (!jparent.is_null()) nd.parent = jparent.get<int>();
        nd.value.resize(jvalue.size());
        for (size_t d = 0; d < jvalue.size(); ++d) {
            if (!jvalue[d].is_number())
                throw TreeParseError("schema error: " + where +
                                     ": 'value' entries must be numbers");
            nd.value[static_cast<Eigen::Index>(d)] = jvalue[d].get<double>();
        }
        nd.cond_prob = jprob.get<double>();
        nodes.push_back(std::move(nd));
    }

    ScenarioTree tree(jdepth.get<int>(), jdim.get<int>(), std::move(nodes));
    const auto violations = validate(tree);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "invariant violation:";
        for (const auto& v : violations) msg << "\n  " << v;
        throw TreeParseError(msg.str());
    }
    return tree;
}

std::string serialize_tree(const ScenarioTree& tree) {
    nlohmann::ordered_json doc;
    doc["depth"] = tree.depth();
    doc["value_dim"] = tree.value_dim();
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const Node& nd : tree.nodes()) {  // nodes() is sorted by id
        nlohmann::ordered_json jn;
        jn["id"] = nd.id;
        jn["stage"] = nd.stage;
        if (nd.parent)
            jn["parent"] = *nd.parent;
        else
            jn["parent"] = nullptr;
        jn["value"] = std::vector<double>(nd.value.data(), nd.value.data() + nd.value.size());
        jn["cond_prob"] = nd.cond_prob;
        doc["nodes"].push_back(std::move(jn));
    }
    return doc.dump(2) + "\n";
}

}  // namespace ndist
