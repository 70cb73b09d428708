#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "elastonet/errors.hpp"

namespace elastonet {

/// Convex hull of 2D points (counter-clockwise, no repeated last point).
/// Degenerate inputs collapse to a point or a segment.
std::vector<Eigen::Vector2d> convex_hull_2d(const std::vector<Eigen::Vector2d>& pts);

/// Distance from a point to the convex hull of a point set (0 inside).
double distance_to_hull(const Eigen::Vector2d& p,
                        const std::vector<Eigen::Vector2d>& hull);

/// Uniform sampler over the eps-neighborhood of the convex hull of a point
/// set, with rejection of points near a forbidden list.
class HullSampler {
public:
    HullSampler(const std::vector<Eigen::Vector2d>& points, double eps);

    /// A point with dist(p, hull) <= eps and |p - q| >= min_separation for
    /// every q in forbidden. Throws RetryExhausted after max_tries draws.
    Eigen::Vector2d sample(std::mt19937_64& rng,
                           const std::vector<Eigen::Vector2d>& forbidden,
                           double min_separation, int max_tries = 4096) const;

    bool contains(const Eigen::Vector2d& p) const;

private:
    std::vector<Eigen::Vector2d> hull_;
    double eps_;
    Eigen::Vector2d lo_, hi_;  // bounding box of the neighborhood
};

/// Number of properly crossing segment pairs among the springs of a planar
/// layout (shared endpoints do not count). Diagnostic only.
int count_crossings(const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& segments);

}  // namespace elastonet
