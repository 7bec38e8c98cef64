#pragma once

// Axis-aligned boxes in image coordinates (y grows downward) and the
// qualitative spatial relations used by interpretation rules.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "scenerule/error.hpp"

namespace scenerule {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct BoundingBox {
  double x = 0.0;  // left edge
  double y = 0.0;  // top edge
  double w = 0.0;
  double h = 0.0;

  double left() const { return x; }
  double right() const { return x + w; }
  double top() const { return y; }
  double bottom() const { return y + h; }
  Point center() const { return {x + w / 2.0, y + h / 2.0}; }
  double diagonal() const { return std::hypot(w, h); }

  bool valid() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) &&
           w > 0.0 && h > 0.0;
  }

  BoundingBox scaled(double f) const { return {x * f, y * f, w * f, h * f}; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

enum class HorizontalPos { left, right };
enum class VerticalPos { up, down };
enum class DiagonalPos { ne, nw, se, sw };
enum class NearMode { abs, rel };

inline std::optional<HorizontalPos> parse_horizontal_pos(std::string_view s) {
  if (s == "left") return HorizontalPos::left;
  if (s == "right") return HorizontalPos::right;
  return std::nullopt;
}

inline std::optional<VerticalPos> parse_vertical_pos(std::string_view s) {
  if (s == "up") return VerticalPos::up;
  if (s == "down") return VerticalPos::down;
  return std::nullopt;
}

inline std::optional<DiagonalPos> parse_diagonal_pos(std::string_view s) {
  if (s == "ne") return DiagonalPos::ne;
  if (s == "nw") return DiagonalPos::nw;
  if (s == "se") return DiagonalPos::se;
  if (s == "sw") return DiagonalPos::sw;
  return std::nullopt;
}

namespace detail {

// Closed-interval intersection test.
inline bool intervals_meet(double a0, double a1, double b0, double b1) {
  return a0 <= b1 && b0 <= a1;
}

// Open-interval intersection test.
inline bool interiors_meet(double a0, double a1, double b0, double b1) {
  return a0 < b1 && b0 < a1;
}

inline bool x_meet(const BoundingBox& a, const BoundingBox& b) {
  return intervals_meet(a.left(), a.right(), b.left(), b.right());
}

inline bool y_meet(const BoundingBox& a, const BoundingBox& b) {
  return intervals_meet(a.top(), a.bottom(), b.top(), b.bottom());
}

}  // namespace detail

/// Euclidean gap between two closed rectangles; 0 when they touch or intersect.
inline double distance(const BoundingBox& a, const BoundingBox& b) {
  const double dx = std::max({0.0, b.left() - a.right(), a.left() - b.right()});
  const double dy = std::max({0.0, b.top() - a.bottom(), a.top() - b.bottom()});
  return std::hypot(dx, dy);
}

/// Smallest box covering both arguments.
inline BoundingBox merge(const BoundingBox& a, const BoundingBox& b) {
  const double l = std::min(a.left(), b.left());
  const double t = std::min(a.top(), b.top());
  const double r = std::max(a.right(), b.right());
  const double bt = std::max(a.bottom(), b.bottom());
  return {l, t, r - l, bt - t};
}

inline BoundingBox merge(std::span<const BoundingBox> boxes) {
  if (boxes.empty()) throw Error(Stage::geometry, "cannot merge an empty list of boxes");
  BoundingBox out = boxes.front();
  for (const auto& b : boxes.subspan(1)) out = merge(out, b);
  return out;
}

/// Boundary-inclusive containment of b in a.
inline bool contains(const BoundingBox& a, const BoundingBox& b) {
  return a.left() <= b.left() && b.right() <= a.right() && a.top() <= b.top() &&
         b.bottom() <= a.bottom();
}

/// Closed rectangles share no point.
inline bool disjoint(const BoundingBox& a, const BoundingBox& b) {
  return !(detail::x_meet(a, b) && detail::y_meet(a, b));
}

/// Interiors intersect and neither box contains the other.
inline bool overlap(const BoundingBox& a, const BoundingBox& b) {
  const bool interiors = detail::interiors_meet(a.left(), a.right(), b.left(), b.right()) &&
                         detail::interiors_meet(a.top(), a.bottom(), b.top(), b.bottom());
  return interiors && !contains(a, b) && !contains(b, a);
}

/// Side by side: y projections meet. With a position, `left` means a lies
/// left of b by center.
inline bool horizontal(const BoundingBox& a, const BoundingBox& b,
                       std::optional<HorizontalPos> pos = std::nullopt) {
  if (!detail::y_meet(a, b)) return false;
  if (!pos) return true;
  const double ca = a.center().x;
  const double cb = b.center().x;
  return *pos == HorizontalPos::left ? ca < cb : ca > cb;
}

/// Stacked: x projections meet. `up` means a lies above b (smaller center y).
inline bool vertical(const BoundingBox& a, const BoundingBox& b,
                     std::optional<VerticalPos> pos = std::nullopt) {
  if (!detail::x_meet(a, b)) return false;
  if (!pos) return true;
  const double ca = a.center().y;
  const double cb = b.center().y;
  return *pos == VerticalPos::up ? ca < cb : ca > cb;
}

/// Neither projection meets. With a position, the quadrant of a's center
/// relative to b's center (north = smaller y).
inline bool diagonal(const BoundingBox& a, const BoundingBox& b,
                     std::optional<DiagonalPos> pos = std::nullopt) {
  if (detail::x_meet(a, b) || detail::y_meet(a, b)) return false;
  if (!pos) return true;
  const Point ca = a.center();
  const Point cb = b.center();
  const bool east = ca.x > cb.x;
  const bool north = ca.y < cb.y;
  switch (*pos) {
    case DiagonalPos::ne: return east && north;
    case DiagonalPos::nw: return !east && north;
    case DiagonalPos::se: return east && !north;
    case DiagonalPos::sw: return !east && !north;
  }
  return false;
}

inline void check_abs_threshold(double th) {
  if (!(th >= 0.0) || !std::isfinite(th))
    throw Error(Stage::geometry, "absolute proximity threshold must be a finite value >= 0");
}

inline void check_rel_threshold(double th) {
  if (!(th >= 0.0 && th <= 1.0))
    throw Error(Stage::geometry, "relative proximity threshold must lie in [0, 1]");
}

/// Gap strictly below `th` pixels.
inline bool abs_near(const BoundingBox& a, const BoundingBox& b, double th) {
  check_abs_threshold(th);
  return distance(a, b) < th;
}

/// Gap divided by the diagonal of the merged box.
inline double rel_distance(const BoundingBox& a, const BoundingBox& b) {
  return distance(a, b) / merge(a, b).diagonal();
}

/// Scale-invariant proximity: rel_distance(a, b) <= th.
inline bool rel_near(const BoundingBox& a, const BoundingBox& b, double th) {
  check_rel_threshold(th);
  return rel_distance(a, b) <= th;
}

inline bool near(const BoundingBox& a, const BoundingBox& b, double th, NearMode mode) {
  return mode == NearMode::abs ? abs_near(a, b, th) : rel_near(a, b, th);
}

/// True when there are at least two boxes and the proximity graph over them
/// is connected.
inline bool group(std::span<const BoundingBox> boxes, double th, NearMode mode) {
  if (mode == NearMode::abs)
    check_abs_threshold(th);
  else
    check_rel_threshold(th);
  const std::size_t n = boxes.size();
  if (n < 2) return false;

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::size_t components = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!near(boxes[i], boxes[j], th, mode)) continue;
      const auto ri = find(i);
      const auto rj = find(j);
      if (ri != rj) {
        parent[ri] = rj;
        --components;
      }
    }
  }
  return components == 1;
}

inline bool abs_group(std::span<const BoundingBox> boxes, double th) {
  return group(boxes, th, NearMode::abs);
}

inline bool rel_group(std::span<const BoundingBox> boxes, double th) {
  return group(boxes, th, NearMode::rel);
}

/// Sorted by center y, every consecutive pair is vertical.
inline bool vertical_chain(std::span<const BoundingBox> boxes) {
  if (boxes.size() < 2) return false;
  std::vector<BoundingBox> sorted(boxes.begin(), boxes.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.center().y < b.center().y;
  });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (!vertical(sorted[i], sorted[i + 1])) return false;
  return true;
}

/// Sorted by center x, every consecutive pair is horizontal.
inline bool horizontal_chain(std::span<const BoundingBox> boxes) {
  if (boxes.size() < 2) return false;
  std::vector<BoundingBox> sorted(boxes.begin(), boxes.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.center().x < b.center().x;
  });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (!horizontal(sorted[i], sorted[i + 1])) return false;
  return true;
}

}  // namespace scenerule
