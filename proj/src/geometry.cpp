#include "bsswitch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsswitch/errors.hpp"

namespace bsswitch {

double distance(const Vec2& a, const Vec2& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

UePositionSet::UePositionSet(std::vector<Vec2> points, double grid) : points_(std::move(points)), grid_(grid)
{
    if (!(grid_ > 0.0)) {
        throw ContractViolation("UePositionSet: grid size must be positive");
    }
    if (points_.empty()) {
        throw ContractViolation("UePositionSet: empty state");
    }
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

double snap(double v, double grid)
{
    return std::floor(v / grid + 0.5) * grid;
}

UePositionSet quantize(std::span<const Vec2> raw, double grid)
{
    if (!(grid > 0.0)) {
        throw ContractViolation("quantize: grid size must be positive");
    }
    if (raw.empty()) {
        throw ContractViolation("quantize: empty position list");
    }
    std::vector<Vec2> pts;
    pts.reserve(raw.size());
    for (const Vec2& p : raw) {
        pts.push_back({snap(p.x, grid), snap(p.y, grid)});
    }
    return UePositionSet(std::move(pts), grid);
}

double directed_hausdorff(std::span<const Vec2> from, std::span<const Vec2> to)
{
    double worst = 0.0;
    for (const Vec2& p : from) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const Vec2& q : to) {
            const double dx = p.x - q.x;
            const double dy = p.y - q.y;
            nearest = std::min(nearest, dx * dx + dy * dy);
            if (nearest <= worst) {
                break;  // cannot raise the max any more
            }
        }
        worst = std::max(worst, nearest);
    }
    return std::sqrt(worst);
}

double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b)
{
    if (a.empty() || b.empty()) {
        throw ContractViolation("hausdorff: empty point set");
    }
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double hausdorff(const UePositionSet& a, const UePositionSet& b)
{
    return hausdorff(std::span<const Vec2>(a.points()), std::span<const Vec2>(b.points()));
}

}  // namespace bsswitch
