#include "elastonet/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace elastonet {

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a,
              const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

}  // namespace

std::vector<Eigen::Vector2d> convex_hull_2d(const std::vector<Eigen::Vector2d>& pts) {
    std::vector<Eigen::Vector2d> p = pts;
    std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    p.erase(std::unique(p.begin(), p.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            p.end());
    const int n = static_cast<int>(p.size());
    if (n <= 2) return p;

    // Andrew monotone chain
    std::vector<Eigen::Vector2d> hull(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
        hull[k++] = p[i];
    }
    const int lower = k + 1;
    for (int i = n - 2; i >= 0; --i) {
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
        hull[k++] = p[i];
    }
    hull.resize(k - 1);
    return hull;
}

double distance_to_hull(const Eigen::Vector2d& p,
                        const std::vector<Eigen::Vector2d>& hull) {
    if (hull.empty()) throw Error("empty hull");
    if (hull.size() == 1) return (p - hull[0]).norm();
    if (hull.size() == 2) return point_segment_distance(p, hull[0], hull[1]);

    bool inside = true;
    double min_edge = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(hull.size());
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d& a = hull[i];
        const Eigen::Vector2d& b = hull[(i + 1) % n];
        if (cross2(a, b, p) < 0) inside = false;
        min_edge = std::min(min_edge, point_segment_distance(p, a, b));
    }
    return inside ? 0.0 : min_edge;
}

HullSampler::HullSampler(const std::vector<Eigen::Vector2d>& points, double eps)
    : hull_(convex_hull_2d(points)), eps_(eps) {
    if (hull_.empty()) throw Error("hull sampler needs at least one point");
    if (!(eps > 0.0)) throw Error("eps must be positive");
    lo_ = hull_[0];
    hi_ = hull_[0];
    for (const auto& p : hull_) {
        lo_ = lo_.cwiseMin(p);
        hi_ = hi_.cwiseMax(p);
    }
    lo_.array() -= eps;
    hi_.array() += eps;
}

bool HullSampler::contains(const Eigen::Vector2d& p) const {
    return distance_to_hull(p, hull_) <= eps_;
}

Eigen::Vector2d HullSampler::sample(std::mt19937_64& rng,
                                    const std::vector<Eigen::Vector2d>& forbidden,
                                    double min_separation, int max_tries) const {
    std::uniform_real_distribution<double> ux(lo_.x(), hi_.x());
    std::uniform_real_distribution<double> uy(lo_.y(), hi_.y());
    for (int t = 0; t < max_tries; ++t) {
        Eigen::Vector2d p(ux(rng), uy(rng));
        if (!contains(p)) continue;
        bool clear = true;
        for (const auto& q : forbidden) {
            if ((p - q).norm() < min_separation) {
                clear = false;
                break;
            }
        }
        if (clear) return p;
    }
    throw RetryExhausted("could not place a point in the hull neighborhood");
}

int count_crossings(
    const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& segments) {
    auto proper_cross = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                           const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
        const double eps = 1e-12;
        if ((a - c).norm() < eps || (a - d).norm() < eps || (b - c).norm() < eps ||
            (b - d).norm() < eps) {
            return false;  // shared endpoint
        }
        const double d1 = cross2(c, d, a);
        const double d2 = cross2(c, d, b);
        const double d3 = cross2(a, b, c);
        const double d4 = cross2(a, b, d);
        return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
    };
    int count = 0;
    for (size_t i = 0; i < segments.size(); ++i) {
        for (size_t j = i + 1; j < segments.size(); ++j) {
            if (proper_cross(segments[i].first, segments[i].second,
                             segments[j].first, segments[j].second)) {
                ++count;
            }
        }
    }
    return count;
}

}  // namespace elastonet
