#include "ndist/plan_export.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ndist {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

}  // namespace

PointCloud parse_point_cloud_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("point cloud CSV: empty input");
    const auto header = split_csv_line(line);
    if (header.empty()) throw std::runtime_error("point cloud CSV: empty header");
    const bool has_weights = header[0] == "w";
    const int dim = static_cast<int>(header.size()) - (has_weights ? 1 : 0);
    if (dim < 1)
        throw std::runtime_error("point cloud CSV: no coordinate columns");

    std::vector<double> weights;
    PointCloud cloud;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != static_cast<int>(header.size()))
            throw std::runtime_error("point cloud CSV: line " + std::to_string(lineno) +
                                     " has " + std::to_string(cells.size()) +
                                     " cells, expected " + std::to_string(header.size()));
        std::vector<double> vals;
        for (const auto& cell : cells) {
            try {
                size_t pos = 0;
                vals.push_back(std::stod(cell, &pos));
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::runtime_error("point cloud CSV: line " +
                                         std::to_string(lineno) +
                                         ": cannot parse number '" + cell + "'");
            }
        }
        int off = 0;
        if (has_weights) {
            if (!(vals[0] > 0.0))
                throw std::runtime_error("point cloud CSV: line " +
                                         std::to_string(lineno) +
                                         ": weight must be > 0");
            weights.push_back(vals[0]);
            off = 1;
        }
        Eigen::VectorXd pt(dim);
        for (int d = 0; d < dim; ++d) pt[d] = vals[off + d];
        cloud.points.push_back(std::move(pt));
    }
    if (cloud.points.empty())
        throw std::runtime_error("point cloud CSV: no data rows");

    const int n = cloud.size();
    cloud.weights.resize(n);
    if (has_weights) {
        double sum = 0.0;
        for (double w : weights) sum += w;
        for (int i = 0; i < n; ++i) cloud.weights[i] = weights[i] / sum;
    } else {
        cloud.weights.setConstant(1.0 / n);
    }
    return cloud;
}

Eigen::MatrixXd euclidean_cost(const PointCloud& a, const PointCloud& b) {
    if (!a.points.empty() && !b.points.empty() &&
        a.points[0].size() != b.points[0].size())
        throw std::invalid_argument("point clouds have different dimensions");
    Eigen::MatrixXd c(a.size(), b.size());
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j)
            c(i, j) = (a.points[i] - b.points[j]).norm();
    return c;
}

std::vector<PlanEdge> threshold_edges(const Eigen::MatrixXd& plan,
                                      const Eigen::VectorXd& p,
                                      const std::vector<double>& thresholds) {
    if (plan.rows() != p.size())
        throw std::invalid_argument("threshold_edges: plan/marginal size mismatch");
    std::vector<PlanEdge> out;
    for (double theta : thresholds)
        for (Eigen::Index i = 0; i < plan.rows(); ++i)
            for (Eigen::Index j = 0; j < plan.cols(); ++j)
                if (plan(i, j) >= theta * p[i])
                    out.push_back({theta, static_cast<int>(i), static_cast<int>(j),
                                   plan(i, j), plan(i, j) / p[i]});
    return out;
}

void write_plan_csv(const Eigen::MatrixXd& plan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "i,j,pi\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < plan.rows(); ++i)
        for (Eigen::Index j = 0; j < plan.cols(); ++j)
            out << i << ',' << j << ',' << plan(i, j) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path);
}

void write_edges_csv(const std::vector<PlanEdge>& edges, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "threshold,i,j,pi,share\n";
    out.precision(17);
    for (const PlanEdge& e : edges)
        out << e.threshold << ',' << e.i << ',' << e.j << ',' << e.mass << ','
            << e.share << '\n';
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace ndist
