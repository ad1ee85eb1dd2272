#include "gimcf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gimcf {

namespace {
double signed_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                   const std::array<double, 2>& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}
}  // namespace

double Mesh::triangle_area(int t) const {
  const auto& T = triangles[t];
  return signed_area(vertices[T[0]], vertices[T[1]], vertices[T[2]]);
}

std::vector<int> Mesh::tagged_vertices(BoundaryTag tag) const {
  std::vector<char> mark(vertices.size(), 0);
  for (const auto& e : boundary) {
    if (e.tag == tag) mark[e.a] = mark[e.b] = 1;
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < mark.size(); ++i) {
    if (mark[i]) out.push_back(int(i));
  }
  return out;
}

std::array<double, 2> Mesh::angle_range() const {
  double amin = std::numbers::pi, amax = 0;
  for (const auto& T : triangles) {
    for (int k = 0; k < 3; ++k) {
      const auto& p = vertices[T[k]];
      const auto& q = vertices[T[(k + 1) % 3]];
      const auto& r = vertices[T[(k + 2) % 3]];
      double ux = q[0] - p[0], uy = q[1] - p[1];
      double vx = r[0] - p[0], vy = r[1] - p[1];
      double ang = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
      amin = std::min(amin, ang);
      amax = std::max(amax, ang);
    }
  }
  return {amin, amax};
}

void Mesh::validate() const {
  if (vertices.empty() || triangles.empty()) {
    throw std::invalid_argument("mesh: empty");
  }
  double bx0 = vertices[0][0], bx1 = bx0, by0 = vertices[0][1], by1 = by0;
  for (const auto& v : vertices) {
    bx0 = std::min(bx0, v[0]); bx1 = std::max(bx1, v[0]);
    by0 = std::min(by0, v[1]); by1 = std::max(by1, v[1]);
  }
  double bbox2 = std::max(bx1 - bx0, by1 - by0);
  bbox2 *= bbox2;
  std::map<std::pair<int, int>, int> edge_count;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& T = triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (T[k] < 0 || T[k] >= num_vertices()) {
        throw std::invalid_argument("mesh: triangle vertex index out of range");
      }
    }
    double area = triangle_area(int(t));
    if (!(area > 1e-14 * bbox2)) {
      throw std::invalid_argument("mesh: degenerate or inverted triangle " +
                                  std::to_string(t));
    }
    for (int k = 0; k < 3; ++k) {
      int a = T[k], b = T[(k + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  for (const auto& [e, c] : edge_count) {
    if (c > 2) {
      throw std::invalid_argument("mesh: non-conforming edge shared by " +
                                  std::to_string(c) + " triangles");
    }
  }
  for (const auto& e : boundary) {
    if (e.a < 0 || e.a >= num_vertices() || e.b < 0 || e.b >= num_vertices()) {
      throw std::invalid_argument("mesh: boundary edge index out of range");
    }
    auto it = edge_count.find({std::min(e.a, e.b), std::max(e.a, e.b)});
    if (it == edge_count.end() || it->second != 1) {
      throw std::invalid_argument("mesh: tagged edge is not a boundary edge");
    }
  }
}

Mesh make_annulus_structured(double r0, double R, int n_rings, int n_theta) {
  if (!(0 < r0) || !(r0 < R) || n_rings < 2 || n_theta < 8) {
    throw std::invalid_argument("make_annulus: bad parameters");
  }
  Mesh m;
  const double dr = (R - r0) / n_rings;
  const double dth = 2 * std::numbers::pi / n_theta;
  m.char_size = std::max(dr, 0.5 * (r0 + R) * dth);
  auto vid = [&](int i, int j) { return i * n_theta + ((j % n_theta + n_theta) % n_theta); };
  for (int i = 0; i <= n_rings; ++i) {
    double r = r0 + i * dr;
    double off = (i % 2) * 0.5;
    for (int j = 0; j < n_theta; ++j) {
      double th = (j + off) * dth;
      m.vertices.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  auto push = [&](int a, int b, int c) {
    if (signed_area(m.vertices[a], m.vertices[b], m.vertices[c]) < 0) {
      std::swap(b, c);
    }
    m.triangles.push_back({a, b, c});
  };
  for (int i = 0; i < n_rings; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      if (i % 2 == 0) {
        // ring i at offset 0, ring i+1 at offset 1/2
        push(vid(i, j), vid(i, j + 1), vid(i + 1, j));
        push(vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
      } else {
        push(vid(i, j), vid(i, j + 1), vid(i + 1, j + 1));
        push(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1));
      }
    }
  }
  for (int j = 0; j < n_theta; ++j) {
    m.boundary.push_back({vid(0, j), vid(0, j + 1), BoundaryTag::Inner});
    m.boundary.push_back({vid(n_rings, j), vid(n_rings, j + 1), BoundaryTag::Outer});
  }
  m.validate();
  return m;
}

Mesh make_annulus(double r0, double R, double h) {
  if (!(h > 0)) throw std::invalid_argument("make_annulus: h must be positive");
  int n_rings = std::max(2, int(std::lround((R - r0) / h)));
  double dr = (R - r0) / n_rings;
  // ring spacing dr and arc spacing w satisfy dr = (sqrt(3)/2) w at the mid
  // radius, which keeps every triangle acute for R/r0 up to ~3
  double rmid = 0.5 * (r0 + R);
  double w = dr * 2.0 / std::numbers::sqrt3;
  int n_theta = std::max(8, int(std::lround(2 * std::numbers::pi * rmid / w)));
  return make_annulus_structured(r0, R, n_rings, n_theta);
}

std::string to_string(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Inner: return "inner";
    case BoundaryTag::Outer: return "outer";
    case BoundaryTag::Free: return "free";
  }
  return "?";
}

namespace {
BoundaryTag tag_from_string(const std::string& s, int line) {
  if (s == "inner") return BoundaryTag::Inner;
  if (s == "outer") return BoundaryTag::Outer;
  if (s == "free") return BoundaryTag::Free;
  throw std::invalid_argument("mesh line " + std::to_string(line) +
                              ": unknown boundary tag '" + s + "'");
}
}  // namespace

Mesh read_mesh(std::istream& in) {
  Mesh m;
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> std::istringstream {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line[0] != '#') return std::istringstream(line);
    }
    throw std::invalid_argument("mesh line " + std::to_string(lineno + 1) +
                                ": unexpected end of file");
  };
  int nv, nt, nbe;
  {
    auto ls = next_line();
    if (!(ls >> nv >> nt >> nbe) || nv <= 0 || nt <= 0 || nbe < 0) {
      throw std::invalid_argument("mesh line " + std::to_string(lineno) +
                                  ": expected 'nv nt nbe'");
    }
  }
  for (int i = 0; i < nv; ++i) {
    auto ls = next_line();
    double x, y;
    if (!(ls >> x >> y)) {
      throw std::invalid_argument("mesh line " + std::to_string(lineno) +
                                  ": expected 'x y'");
    }
    m.vertices.push_back({x, y});
  }
  for (int i = 0; i < nt; ++i) {
    auto ls = next_line();
    int a, b, c;
    if (!(ls >> a >> b >> c)) {
      throw std::invalid_argument("mesh line " + std::to_string(lineno) +
                                  ": expected 'i j k'");
    }
    m.triangles.push_back({a, b, c});
  }
  for (int i = 0; i < nbe; ++i) {
    auto ls = next_line();
    int a, b;
    std::string tag;
    if (!(ls >> a >> b >> tag)) {
      throw std::invalid_argument("mesh line " + std::to_string(lineno) +
                                  ": expected 'i j tag'");
    }
    m.boundary.push_back({a, b, tag_from_string(tag, lineno)});
  }
  double hsum = 0;
  for (const auto& T : m.triangles) {
    if (T[0] >= 0 && T[0] < nv && T[1] >= 0 && T[1] < nv) {
      double dx = m.vertices[T[1]][0] - m.vertices[T[0]][0];
      double dy = m.vertices[T[1]][1] - m.vertices[T[0]][1];
      hsum += std::hypot(dx, dy);
    }
  }
  m.char_size = hsum / std::max<std::size_t>(1, m.triangles.size());
  m.validate();
  return m;
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open mesh file: " + path);
  try {
    return read_mesh(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_mesh(const Mesh& m, std::ostream& out) {
  out << m.num_vertices() << " " << m.num_triangles() << " "
      << m.boundary.size() << "\n";
  char buf[128];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v[0], v[1]);
    out << buf;
  }
  for (const auto& T : m.triangles) {
    out << T[0] << " " << T[1] << " " << T[2] << "\n";
  }
  for (const auto& e : m.boundary) {
    out << e.a << " " << e.b << " " << to_string(e.tag) << "\n";
  }
}

}  // namespace gimcf
