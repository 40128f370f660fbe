#pragma once

#include <algorithm>

namespace evoman {

/// Screen-space vector in pixels. y grows downward.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

/// Axis-aligned rectangle, min is the top-left corner.
struct Rect {
    Vec2 min;
    Vec2 max;

    static constexpr Rect from_size(Vec2 top_left, Vec2 size) { return {top_left, top_left + size}; }

    /// Rectangle of `size` whose bottom edge is centered on `foot`.
    static constexpr Rect standing_at(Vec2 foot, Vec2 size) {
        return {{foot.x - size.x / 2, foot.y - size.y}, {foot.x + size.x / 2, foot.y}};
    }

    constexpr double width() const { return max.x - min.x; }
    constexpr double height() const { return max.y - min.y; }
    constexpr Vec2 center() const { return {(min.x + max.x) / 2, (min.y + max.y) / 2}; }

    constexpr Rect translated(Vec2 d) const { return {min + d, max + d}; }

    /// Strict overlap: rectangles that only touch along an edge do not overlap.
    constexpr bool overlaps(const Rect& o) const {
        return min.x < o.max.x && o.min.x < max.x && min.y < o.max.y && o.min.y < max.y;
    }

    constexpr bool contains(const Rect& inner) const {
        return inner.min.x >= min.x && inner.max.x <= max.x && inner.min.y >= min.y && inner.max.y <= max.y;
    }

    friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

}  // namespace evoman
