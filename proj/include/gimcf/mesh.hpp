#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace gimcf {

enum class BoundaryTag { Inner, Outer, Free };

// Conforming 2D triangulation with tagged boundary edges. Triangles are
// stored counterclockwise; validate() checks conformity and area floors.
struct Mesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;
  struct BoundaryEdge {
    int a, b;
    BoundaryTag tag;
  };
  std::vector<BoundaryEdge> boundary;
  double char_size = 0;  // h

  int num_vertices() const { return int(vertices.size()); }
  int num_triangles() const { return int(triangles.size()); }
  double triangle_area(int t) const;
  std::vector<int> tagged_vertices(BoundaryTag tag) const;
  // min/max interior angle over all triangles, in radians
  std::array<double, 2> angle_range() const;
  void validate() const;
};

// Structured annulus r0 < |x| < R with staggered rings (near-equilateral,
// acute triangles). Ring spacing targets equilateral shape at the mid
// radius; inner ring is tagged Inner, outer ring Outer.
Mesh make_annulus(double r0, double R, double h);
Mesh make_annulus_structured(double r0, double R, int n_rings, int n_theta);

// Plain-text format: "nv nt nbe" then nv lines "x y", nt lines "i j k"
// (0-based), nbe lines "i j tag" with tag in {inner, outer, free}.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(const Mesh& m, std::ostream& out);

std::string to_string(BoundaryTag t);

}  // namespace gimcf
