#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "ndist/ot.hpp"

namespace ndist {

// Weighted point cloud, the empirical measure of a cloud of dots.
struct PointCloud {
    Eigen::VectorXd weights;
    std::vector<Eigen::VectorXd> points;

    int size() const { return static_cast<int>(points.size()); }
};

// CSV with a header row; an optional leading "w" column carries weights
// (normalized to sum 1), all other columns are coordinates. Missing "w"
// means uniform weights.
PointCloud parse_point_cloud_csv(const std::string& text);

Eigen::MatrixXd euclidean_cost(const PointCloud& a, const PointCloud& b);

struct PlanEdge {
    double threshold;
    int i, j;
    double mass;   // pi_ij
    double share;  // pi_ij / p_i, the fraction of source mass moved
};

// Edges (i, j) with pi_ij >= threshold * p_i, for each threshold, ordered by
// (threshold desc as given, i, j).
std::vector<PlanEdge> threshold_edges(const Eigen::MatrixXd& plan,
                                      const Eigen::VectorXd& p,
                                      const std::vector<double>& thresholds);

// Header "i,j,pi", one row per matrix entry in row-major order.
void write_plan_csv(const Eigen::MatrixXd& plan, const std::string& path);

// Header "threshold,i,j,pi,share".
void write_edges_csv(const std::vector<PlanEdge>& edges, const std::string& path);

}  // namespace ndist
