#include "isoflow/polygon.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace isoflow {

double polygon_area(const Polygon& poly) {
  const size_t n = poly.size();
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += cross2(poly[i], poly[(i + 1) % n]);
  return 0.5 * acc;
}

double polyline_shoelace(const Polyline& line) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < line.size(); ++i) acc += cross2(line[i], line[i + 1]);
  return 0.5 * acc;
}

double polyline_length(const Polyline& line) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < line.size(); ++i) acc += (line[i + 1] - line[i]).norm();
  return acc;
}

int winding_number(const Polyline& closed, const Vec2& q) {
  double total = 0.0;
  const size_t n = closed.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = closed[i] - q;
    const Vec2 b = closed[(i + 1) % n] - q;
    total += std::atan2(cross2(a, b), a.dot(b));
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

bool point_in_polygon(const Polygon& poly, const Vec2& q) {
  // Even-odd crossing rule.
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = a.x() + (q.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (q.x() < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

bool segments_cross(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  const Vec2 r = a1 - a0, s = b1 - b0;
  const double denom = cross2(r, s);
  const double scale = r.norm() * s.norm();
  if (std::abs(denom) < 1e-14 * scale) return false;  // parallel: ignore
  const double t = cross2(b0 - a0, s) / denom;
  const double u = cross2(b0 - a0, r) / denom;
  const double eps = 1e-12;
  return t > eps && t < 1 - eps && u > eps && u < 1 - eps;
}

}  // namespace

std::optional<double> segment_intersection_param(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                                                 const Vec2& b1) {
  const Vec2 r = a1 - a0, s = b1 - b0;
  const double denom = cross2(r, s);
  if (std::abs(denom) < 1e-16 * r.norm() * s.norm()) return std::nullopt;
  const double t = cross2(b0 - a0, s) / denom;
  const double u = cross2(b0 - a0, r) / denom;
  if (t < -1e-12 || t > 1 + 1e-12 || u < -1e-12 || u > 1 + 1e-12) return std::nullopt;
  return std::clamp(t, 0.0, 1.0);
}

bool polygon_self_intersects(const Polygon& poly) {
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return true;
    }
  }
  return false;
}

bool polyline_self_intersects(const Polyline& line) {
  if (line.size() < 4) return false;
  const size_t m = line.size() - 1;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 2; j < m; ++j)
      if (segments_cross(line[i], line[i + 1], line[j], line[j + 1])) return true;
  return false;
}

std::vector<std::array<Vec2, 3>> triangulate(const Polygon& input) {
  std::vector<Vec2> poly = input;
  if (polygon_area(poly) < 0) std::reverse(poly.begin(), poly.end());
  std::vector<std::array<Vec2, 3>> tris;
  const double scale2 = [&] {
    double m = 0;
    for (const auto& p : poly) m = std::max(m, p.squaredNorm());
    return std::max(m, 1e-300);
  }();

  auto is_ear = [&](size_t i) {
    const size_t n = poly.size();
    const Vec2& a = poly[(i + n - 1) % n];
    const Vec2& b = poly[i];
    const Vec2& c = poly[(i + 1) % n];
    const double cr = cross2(b - a, c - b);
    if (cr <= 1e-16 * scale2) return false;  // reflex or flat corner
    const double eps = 1e-12 * scale2;
    for (size_t j = 0; j < n; ++j) {
      if (j == (i + n - 1) % n || j == i || j == (i + 1) % n) continue;
      const Vec2& p = poly[j];
      const double d0 = cross2(b - a, p - a);
      const double d1 = cross2(c - b, p - b);
      const double d2 = cross2(a - c, p - c);
      // on-edge vertices block the ear too
      if (d0 > -eps && d1 > -eps && d2 > -eps) return false;
    }
    return true;
  };

  size_t guard = 0;
  while (poly.size() > 3) {
    const size_t n = poly.size();
    bool clipped = false;
    for (size_t i = 0; i < n; ++i) {
      if (is_ear(i)) {
        tris.push_back({poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]});
        poly.erase(poly.begin() + static_cast<long>(i));
        clipped = true;
        break;
      }
    }
    if (!clipped) {
      // Collinear runs can defeat the strict ear test; drop the flattest corner.
      size_t flat = 0;
      double best = std::numeric_limits<double>::max();
      for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[(i + n - 1) % n];
        const Vec2& b = poly[i];
        const Vec2& c = poly[(i + 1) % n];
        const double cr = std::abs(cross2(b - a, c - b));
        if (cr < best) {
          best = cr;
          flat = i;
        }
      }
      tris.push_back({poly[(flat + n - 1) % n], poly[flat], poly[(flat + 1) % n]});
      poly.erase(poly.begin() + static_cast<long>(flat));
    }
    if (++guard > 4 * input.size() + 16) throw NumericalError("triangulation did not terminate");
  }
  if (poly.size() == 3) tris.push_back({poly[0], poly[1], poly[2]});
  return tris;
}

Polygon clip_half_plane(const Polygon& poly, const Vec2& n, double c) {
  Polygon out;
  const size_t m = poly.size();
  if (m == 0) return out;
  out.reserve(m + 4);
  for (size_t i = 0; i < m; ++i) {
    const Vec2& cur = poly[i];
    const Vec2& nxt = poly[(i + 1) % m];
    const double dc = n.dot(cur) - c, dn = n.dot(nxt) - c;
    if (dc <= 0) out.push_back(cur);
    if ((dc < 0 && dn > 0) || (dc > 0 && dn < 0)) {
      const double t = dc / (dc - dn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

namespace {

double clipped_area_against_triangle(const Polygon& subject, const std::array<Vec2, 3>& tri) {
  Polygon p = subject;
  for (int e = 0; e < 3 && !p.empty(); ++e) {
    const Vec2 a = tri[e], b = tri[(e + 1) % 3];
    const Vec2 inward = rot90(b - a);  // ccw triangle: interior is left of ab
    p = clip_half_plane(p, -inward, -inward.dot(a));
  }
  return p.empty() ? 0.0 : std::abs(polygon_area(p));
}

}  // namespace

double intersection_area(const Polygon& a, const Polygon& b) {
  if (a.size() < 3 || b.size() < 3) return 0.0;
  Polygon subject = b;
  if (polygon_area(subject) < 0) std::reverse(subject.begin(), subject.end());
  double acc = 0.0;
  for (const auto& tri : triangulate(a)) acc += clipped_area_against_triangle(subject, tri);
  return acc;
}

double symmetric_difference_area(const Polygon& a, const Polygon& b) {
  if (polygon_self_intersects(a) || polygon_self_intersects(b))
    throw NumericalError("self-intersecting region polygon");
  return std::abs(polygon_area(a)) + std::abs(polygon_area(b)) - 2.0 * intersection_area(a, b);
}

double signed_set_area(const std::vector<SignedPolygon>& set) {
  double acc = 0.0;
  for (const auto& p : set) acc += p.sign * std::abs(polygon_area(p.vertices));
  return acc;
}

double intersection_area(const std::vector<SignedPolygon>& a,
                         const std::vector<SignedPolygon>& b) {
  double acc = 0.0;
  for (const auto& p : a)
    for (const auto& q : b)
      acc += p.sign * q.sign * intersection_area(p.vertices, q.vertices);
  return acc;
}

double symmetric_difference_area(const std::vector<SignedPolygon>& a,
                                 const std::vector<SignedPolygon>& b) {
  return signed_set_area(a) + signed_set_area(b) - 2.0 * intersection_area(a, b);
}

Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& p, const Vec2& q) {
    return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& p, const Vec2& q) { return (p - q).norm() == 0.0; }),
            pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Vec2> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double point_polyline_distance(const Vec2& p, const Polyline& line) {
  double best = std::numeric_limits<double>::max();
  for (size_t i = 0; i + 1 < line.size(); ++i)
    best = std::min(best, point_segment_distance(p, line[i], line[i + 1]));
  if (line.size() == 1) best = (p - line[0]).norm();
  return best;
}

Polyline densify(const Polyline& line, double max_edge) {
  Polyline out;
  out.reserve(line.size());
  for (size_t i = 0; i + 1 < line.size(); ++i) {
    const Vec2 a = line[i], b = line[i + 1];
    out.push_back(a);
    const double len = (b - a).norm();
    const int k = static_cast<int>(std::ceil(len / max_edge));
    for (int j = 1; j < k; ++j) out.push_back(a + (static_cast<double>(j) / k) * (b - a));
  }
  if (!line.empty()) out.push_back(line.back());
  return out;
}

double hausdorff_distance(const Polyline& a, const Polyline& b, double resolution) {
  if (a.empty() || b.empty()) throw ConfigError("hausdorff of empty polyline");
  if (resolution <= 0) resolution = 5e-5 * (polyline_length(a) + polyline_length(b) + 1e-300);
  const Polyline da = densify(a, resolution), db = densify(b, resolution);
  double h = 0.0;
  for (const auto& p : da) h = std::max(h, point_polyline_distance(p, b));
  for (const auto& p : db) h = std::max(h, point_polyline_distance(p, a));
  return h;
}

}  // namespace isoflow
