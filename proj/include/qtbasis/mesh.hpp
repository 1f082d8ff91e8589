#ifndef QTBASIS_MESH_HPP
#define QTBASIS_MESH_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qtbasis/poly.hpp"

namespace qtb {

/// Structured triangular mesh; immutable after construction. Each grid cell
/// is split along the lower-left to upper-right diagonal.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;

  std::size_t size() const { return triangles.size(); }

  Point centroid(std::size_t t) const {
    const auto& tri = triangles.at(t);
    Point c{0.0, 0.0};
    for (int v : tri) {
      c[0] += vertices[static_cast<std::size_t>(v)][0] / 3.0;
      c[1] += vertices[static_cast<std::size_t>(v)][1] / 3.0;
    }
    return c;
  }

  std::vector<Point> centroids() const {
    std::vector<Point> cs(size());
    for (std::size_t t = 0; t < size(); ++t) cs[t] = centroid(t);
    return cs;
  }

  double triangle_area(std::size_t t) const {
    const auto& tri = triangles.at(t);
    const Point a = vertices[static_cast<std::size_t>(tri[0])];
    const Point b = vertices[static_cast<std::size_t>(tri[1])];
    const Point c = vertices[static_cast<std::size_t>(tri[2])];
    return 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
  }

  double area() const {
    double s = 0.0;
    for (std::size_t t = 0; t < size(); ++t) s += triangle_area(t);
    return s;
  }

  /// Largest element diameter.
  double hmax() const {
    double h = 0.0;
    for (const auto& tri : triangles)
      for (int i = 0; i < 3; ++i) {
        const Point a = vertices[static_cast<std::size_t>(tri[i])];
        const Point b = vertices[static_cast<std::size_t>(tri[(i + 1) % 3])];
        h = std::max(h, std::hypot(b[0] - a[0], b[1] - a[1]));
      }
    return h;
  }

  void validate() const {
    for (std::size_t t = 0; t < size(); ++t)
      if (!(triangle_area(t) > 0.0))
        throw std::invalid_argument("TriMesh: degenerate triangle");
  }
};

/// Uniform nx x ny grid over [x0,x1] x [y0,y1], 2*nx*ny triangles.
inline TriMesh structured_rect(double x0, double x1, double y0, double y1, int nx,
                               int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("structured_rect: need nx, ny >= 1");
  if (!(x1 > x0) || !(y1 > y0))
    throw std::invalid_argument("structured_rect: degenerate bounds");
  TriMesh m;
  m.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      // cell split along the lower-left to upper-right diagonal
      m.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      m.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  return m;
}

/// n x n grid over the unit square; n = 20 gives 800 elements.
inline TriMesh structured_square(int n) { return structured_rect(0.0, 1.0, 0.0, 1.0, n, n); }

/// Whether element t lies on the right side of a vertical seam, judged by
/// its centroid.
inline bool right_of_seam(const TriMesh& m, std::size_t t, double seam_x) {
  return m.centroid(t)[0] > seam_x;
}

inline json mesh_to_json(const TriMesh& m) {
  json verts = json::array();
  for (const auto& v : m.vertices) verts.push_back(json::array({v[0], v[1]}));
  json tris = json::array();
  for (const auto& t : m.triangles) tris.push_back(json::array({t[0], t[1], t[2]}));
  return json{{"vertices", std::move(verts)}, {"triangles", std::move(tris)}};
}

inline TriMesh mesh_from_json(const json& j) {
  TriMesh m;
  for (const auto& v : j.at("vertices"))
    m.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
  for (const auto& t : j.at("triangles"))
    m.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
  m.validate();
  return m;
}

}  // namespace qtb

#endif
