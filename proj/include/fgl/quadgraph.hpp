#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "fgl/sphere.hpp"

namespace fgl {

enum class Part : std::uint8_t { primal, dual };

std::string to_string(Part part);
Part part_from_string(const std::string& s);

struct Vertex {
  Part part = Part::primal;
  IntVec n;                    // position in Z^d
  std::optional<Complex> pos;  // planar embedding, plots only
};

// A D-edge. With sign = +1, n(v) - n(u) = e_label; with sign = -1 the edge
// points the other way. Labels are 0-based direction indices.
struct Edge {
  int u = 0;
  int v = 0;
  int label = 0;
  int sign = +1;
};

// Face corners in positive cyclic order (x0, y0, x1, y1); x0 and x1 primal.
using Face = std::array<int, 4>;

/// Corners of a face relabelled by the minimal-corner rule:
/// p2 = p1 + e_x, p3 = p1 + e_y, p4 = p1 + e_x + e_y, and the stored cyclic
/// order of the face is (p1, p2, p4, p3).
struct FaceFrame {
  int face = -1;
  int p1 = -1;
  int p2 = -1;
  int p3 = -1;
  int p4 = -1;
  int x = -1;  // direction of p1 -> p2
  int y = -1;  // direction of p1 -> p3
  bool p1_primal = true;
};

/// The quad-graph D together with its integer map n: V(D) -> Z^d.
///
/// The graph is immutable after construction. Incidence data (faces around
/// each vertex, interior flags) is derived once in the constructor.
class QuadGraph {
 public:
  QuadGraph(int dimension, std::vector<Vertex> vertices, std::vector<Face> faces,
            std::vector<Edge> edges);

  int dimension() const { return dimension_; }
  std::span<const Vertex> vertices() const { return vertices_; }
  std::span<const Face> faces() const { return faces_; }
  std::span<const Edge> edges() const { return edges_; }

  const Vertex& vertex(int id) const { return vertices_.at(static_cast<std::size_t>(id)); }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }

  /// Faces incident to a vertex, in ascending index order.
  std::span<const int> faces_of(int vertex) const;

  /// True when every D-edge at the vertex is shared by two faces, i.e. the
  /// full neighbourhood of the vertex lies in the patch.
  bool is_interior(int vertex) const { return interior_.at(static_cast<std::size_t>(vertex)); }

  std::optional<int> find_vertex(const IntVec& n) const;

  /// Neighbours of a vertex in G (primal vertex) or G* (dual vertex): the
  /// opposite corner of every incident face, paired with that face index.
  std::vector<std::pair<int, int>> diagonal_neighbors(int vertex) const;

 private:
  int dimension_;
  std::vector<Vertex> vertices_;
  std::vector<Face> faces_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> faces_of_vertex_;
  std::vector<bool> interior_;
  std::map<IntVec, int> by_coordinate_;
};

QuadGraph build_square_lattice_patch(int width, int height);

/// de Bruijn multigrid dual: family j consists of the lines
/// Re(z * conj(u_j)) + offset_j in Z with u_j = directions[j] / |directions[j]|.
/// Every pairwise intersection inside |z| <= radius becomes one rhombic face.
QuadGraph build_multigrid_quadgraph(std::span<const Complex> directions,
                                    std::span<const double> offsets, double radius);

struct Violation {
  std::string kind;
  std::string detail;
};

/// Empty iff the graph satisfies every structural invariant.
std::vector<Violation> validate(const QuadGraph& g);

FaceFrame face_frame(const QuadGraph& g, int face);

nlohmann::json to_json(const QuadGraph& g);
QuadGraph quadgraph_from_json(const nlohmann::json& j);

}  // namespace fgl
