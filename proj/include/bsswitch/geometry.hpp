#pragma once

#include <span>
#include <vector>

namespace bsswitch {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
    friend auto operator<=>(const Vec2&, const Vec2&) = default;
};

double distance(const Vec2& a, const Vec2& b);

// Grid-quantized UE positions. Points are kept as a sorted set: two UEs in
// the same grid cell collapse to one point.
class UePositionSet {
public:
    // Takes already-quantized points; see quantize() for raw input.
    UePositionSet(std::vector<Vec2> points, double grid);

    const std::vector<Vec2>& points() const { return points_; }
    double grid() const { return grid_; }
    std::size_t size() const { return points_.size(); }

    friend bool operator==(const UePositionSet&, const UePositionSet&) = default;

private:
    std::vector<Vec2> points_;
    double grid_;
};

// Rounds a coordinate to the nearest multiple of `grid`; exact half-way
// values go toward +infinity.
double snap(double v, double grid);

UePositionSet quantize(std::span<const Vec2> raw, double grid);

// Directed distance: max over `from` of the distance to the nearest point of `to`.
double directed_hausdorff(std::span<const Vec2> from, std::span<const Vec2> to);

double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b);
double hausdorff(const UePositionSet& a, const UePositionSet& b);

}  // namespace bsswitch
