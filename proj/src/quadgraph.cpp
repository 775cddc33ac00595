#include "fgl/quadgraph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fgl/errors.hpp"

namespace fgl {

namespace {

std::string format_n(const IntVec& n) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < n.size(); ++i) os << (i ? "," : "") << n[i];
  os << ')';
  return os.str();
}

Part parity_part(const IntVec& n) {
  return (coordinate_sum(n) % 2 == 0) ? Part::primal : Part::dual;
}

std::pair<int, int> undirected(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Direction index j with b - a = sign * e_j, or nullopt when not a unit step.
std::optional<std::pair<int, int>> unit_step(const IntVec& a, const IntVec& b) {
  if (a.size() != b.size()) return std::nullopt;
  int dir = -1;
  int sign = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const int d = b[j] - a[j];
    if (d == 0) continue;
    if (dir >= 0 || std::abs(d) != 1) return std::nullopt;
    dir = static_cast<int>(j);
    sign = d;
  }
  if (dir < 0) return std::nullopt;
  return std::make_pair(dir, sign);
}

// Edges implied by the sides of the faces, oriented toward increasing coordinate.
std::vector<Edge> edges_from_faces(const std::vector<Vertex>& vertices,
                                   const std::vector<Face>& faces) {
  std::map<std::pair<int, int>, Edge> found;
  for (const Face& f : faces) {
    for (int s = 0; s < 4; ++s) {
      const int a = f[static_cast<std::size_t>(s)];
      const int b = f[static_cast<std::size_t>((s + 1) % 4)];
      const auto step = unit_step(vertices[static_cast<std::size_t>(a)].n,
                                  vertices[static_cast<std::size_t>(b)].n);
      if (!step) throw MalformedFace("side " + std::to_string(a) + "-" + std::to_string(b));
      Edge e = step->second > 0 ? Edge{a, b, step->first, +1} : Edge{b, a, step->first, +1};
      found.emplace(undirected(a, b), e);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(found.size());
  for (const auto& [key, e] : found) edges.push_back(e);
  return edges;
}

}  // namespace

std::string to_string(Part part) { return part == Part::primal ? "primal" : "dual"; }

Part part_from_string(const std::string& s) {
  if (s == "primal") return Part::primal;
  if (s == "dual") return Part::dual;
  throw GraphFormatError("unknown part '" + s + "'");
}

QuadGraph::QuadGraph(int dimension, std::vector<Vertex> vertices, std::vector<Face> faces,
                     std::vector<Edge> edges)
    : dimension_(dimension),
      vertices_(std::move(vertices)),
      faces_(std::move(faces)),
      edges_(std::move(edges)) {
  if (dimension_ < 2) throw GraphFormatError("dimension must be at least 2");
  const int nv = vertex_count();
  auto check_id = [nv](int id, const char* what) {
    if (id < 0 || id >= nv) {
      throw GraphFormatError(std::string(what) + " references missing vertex " +
                             std::to_string(id));
    }
  };
  for (int id = 0; id < nv; ++id) {
    const Vertex& v = vertices_[static_cast<std::size_t>(id)];
    if (static_cast<int>(v.n.size()) != dimension_) {
      throw GraphFormatError("vertex " + std::to_string(id) + " has coordinate of length " +
                             std::to_string(v.n.size()));
    }
    by_coordinate_.emplace(v.n, id);
  }
  faces_of_vertex_.assign(static_cast<std::size_t>(nv), {});
  for (int f = 0; f < face_count(); ++f) {
    for (int c : faces_[static_cast<std::size_t>(f)]) {
      check_id(c, "face");
      faces_of_vertex_[static_cast<std::size_t>(c)].push_back(f);
    }
  }
  std::map<std::pair<int, int>, int> side_count;
  for (const Face& f : faces_) {
    for (int s = 0; s < 4; ++s) {
      ++side_count[undirected(f[static_cast<std::size_t>(s)], f[static_cast<std::size_t>((s + 1) % 4)])];
    }
  }
  interior_.assign(static_cast<std::size_t>(nv), true);
  std::vector<int> degree(static_cast<std::size_t>(nv), 0);
  for (const Edge& e : edges_) {
    check_id(e.u, "edge");
    check_id(e.v, "edge");
    if (e.label < 0 || e.label >= dimension_) {
      throw GraphFormatError("edge label " + std::to_string(e.label + 1) + " out of range");
    }
    if (e.sign != 1 && e.sign != -1) throw GraphFormatError("edge sign must be +1 or -1");
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
    const auto it = side_count.find(undirected(e.u, e.v));
    if (it == side_count.end() || it->second < 2) {
      interior_[static_cast<std::size_t>(e.u)] = false;
      interior_[static_cast<std::size_t>(e.v)] = false;
    }
  }
  for (int id = 0; id < nv; ++id) {
    if (degree[static_cast<std::size_t>(id)] == 0) interior_[static_cast<std::size_t>(id)] = false;
  }
}

std::span<const int> QuadGraph::faces_of(int vertex) const {
  return faces_of_vertex_.at(static_cast<std::size_t>(vertex));
}

std::optional<int> QuadGraph::find_vertex(const IntVec& n) const {
  const auto it = by_coordinate_.find(n);
  if (it == by_coordinate_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<int, int>> QuadGraph::diagonal_neighbors(int vertex) const {
  std::vector<std::pair<int, int>> out;
  for (int f : faces_of(vertex)) {
    const Face& face = faces_[static_cast<std::size_t>(f)];
    for (std::size_t k = 0; k < 4; ++k) {
      if (face[k] == vertex) out.emplace_back(face[(k + 2) % 4], f);
    }
  }
  return out;
}

QuadGraph build_square_lattice_patch(int width, int height) {
  if (width < 1 || height < 1) throw GraphFormatError("patch width and height must be >= 1");
  const auto id = [width](int i, int j) { return j * (width + 1) + i; };
  std::vector<Vertex> vertices;
  vertices.reserve(static_cast<std::size_t>((width + 1) * (height + 1)));
  for (int j = 0; j <= height; ++j) {
    for (int i = 0; i <= width; ++i) {
      IntVec n{i, j};
      vertices.push_back({parity_part(n), n, Complex(i, j)});
    }
  }
  std::vector<Face> faces;
  faces.reserve(static_cast<std::size_t>(width * height));
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      Face ccw{id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)};
      if ((i + j) % 2 != 0) std::rotate(ccw.begin(), ccw.begin() + 1, ccw.end());
      faces.push_back(ccw);
    }
  }
  std::vector<Edge> edges;
  for (int j = 0; j <= height; ++j) {
    for (int i = 0; i <= width; ++i) {
      if (i < width) edges.push_back({id(i, j), id(i + 1, j), 0, +1});
      if (j < height) edges.push_back({id(i, j), id(i, j + 1), 1, +1});
    }
  }
  return QuadGraph(2, std::move(vertices), std::move(faces), std::move(edges));
}

QuadGraph build_multigrid_quadgraph(std::span<const Complex> directions,
                                    std::span<const double> offsets, double radius) {
  const int d = static_cast<int>(directions.size());
  if (d < 2) throw DegenerateDirections("multigrid needs at least two directions");
  if (static_cast<int>(offsets.size()) != d) {
    throw DegenerateDirections("offsets and directions differ in length");
  }
  if (!(radius > 0)) throw DegenerateDirections("multigrid radius must be positive");
  std::vector<Complex> unit(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const Complex a = directions[static_cast<std::size_t>(j)];
    if (std::abs(a) == 0) throw DegenerateDirections("zero direction " + std::to_string(j + 1));
    unit[static_cast<std::size_t>(j)] = a / std::abs(a);
  }
  for (int j = 0; j < d; ++j) {
    for (int l = j + 1; l < d; ++l) {
      if (std::abs(std::imag(std::conj(unit[static_cast<std::size_t>(j)]) *
                             unit[static_cast<std::size_t>(l)])) < 1e-12) {
        throw DegenerateDirections("directions " + std::to_string(j + 1) + " and " +
                                   std::to_string(l + 1) + " are parallel");
      }
    }
  }
  const auto xi = [&](int j, Complex z) {
    return std::real(z * std::conj(unit[static_cast<std::size_t>(j)])) +
           offsets[static_cast<std::size_t>(j)];
  };
  constexpr double kDegeneracy = 1e-9;

  std::vector<Vertex> vertices;
  std::map<IntVec, int> index;
  const auto vertex_of = [&](const IntVec& n) {
    const auto [it, inserted] = index.emplace(n, static_cast<int>(vertices.size()));
    if (inserted) {
      Complex pos = 0;
      for (int m = 0; m < d; ++m) pos += static_cast<double>(n[static_cast<std::size_t>(m)]) *
                                         directions[static_cast<std::size_t>(m)];
      vertices.push_back({parity_part(n), n, pos});
    }
    return it->second;
  };

  std::vector<Face> faces;
  for (int j = 0; j < d; ++j) {
    for (int l = j + 1; l < d; ++l) {
      const Complex uj = unit[static_cast<std::size_t>(j)];
      const Complex ul = unit[static_cast<std::size_t>(l)];
      // Re(z conj u) = x u_re + y u_im; solve the 2x2 system for z.
      const double det = uj.real() * ul.imag() - uj.imag() * ul.real();
      const double gj = offsets[static_cast<std::size_t>(j)];
      const double gl = offsets[static_cast<std::size_t>(l)];
      const bool ccw = std::imag(std::conj(directions[static_cast<std::size_t>(j)]) *
                                 directions[static_cast<std::size_t>(l)]) > 0;
      for (int a = static_cast<int>(std::ceil(gj - radius)); a <= std::floor(gj + radius); ++a) {
        for (int b = static_cast<int>(std::ceil(gl - radius)); b <= std::floor(gl + radius); ++b) {
          const double rj = a - gj;
          const double rl = b - gl;
          const Complex z((rj * ul.imag() - rl * uj.imag()) / det,
                          (uj.real() * rl - ul.real() * rj) / det);
          if (std::abs(z) > radius) continue;
          IntVec base(static_cast<std::size_t>(d));
          for (int m = 0; m < d; ++m) {
            if (m == j) {
              base[static_cast<std::size_t>(m)] = a;
            } else if (m == l) {
              base[static_cast<std::size_t>(m)] = b;
            } else {
              const double v = xi(m, z);
              if (std::abs(v - std::round(v)) < kDegeneracy) {
                throw DegenerateOffsets("families " + std::to_string(j + 1) + ", " +
                                        std::to_string(l + 1) + ", " + std::to_string(m + 1) +
                                        " meet near z = (" + std::to_string(z.real()) + ", " +
                                        std::to_string(z.imag()) + ")");
              }
              base[static_cast<std::size_t>(m)] = static_cast<int>(std::ceil(v));
            }
          }
          IntVec pj = base;
          ++pj[static_cast<std::size_t>(j)];
          IntVec pl = base;
          ++pl[static_cast<std::size_t>(l)];
          IntVec top = pj;
          ++top[static_cast<std::size_t>(l)];
          Face f = ccw ? Face{vertex_of(base), vertex_of(pj), vertex_of(top), vertex_of(pl)}
                       : Face{vertex_of(base), vertex_of(pl), vertex_of(top), vertex_of(pj)};
          if (vertices[static_cast<std::size_t>(f[0])].part != Part::primal) {
            std::rotate(f.begin(), f.begin() + 1, f.end());
          }
          faces.push_back(f);
        }
      }
    }
  }
  std::vector<Edge> edges = edges_from_faces(vertices, faces);
  return QuadGraph(d, std::move(vertices), std::move(faces), std::move(edges));
}

std::vector<Violation> validate(const QuadGraph& g) {
  std::vector<Violation> out;
  const auto report = [&out](std::string kind, std::string detail) {
    out.push_back({std::move(kind), std::move(detail)});
  };
  const auto n_of = [&g](int id) -> const IntVec& { return g.vertex(id).n; };

  std::set<IntVec> seen;
  for (int id = 0; id < g.vertex_count(); ++id) {
    const Vertex& v = g.vertex(id);
    if (v.part != parity_part(v.n)) {
      report("parity", "vertex " + std::to_string(id) + " n=" + format_n(v.n) + " marked " +
                           to_string(v.part));
    }
    if (!seen.insert(v.n).second) {
      report("duplicate_coordinate", "vertex " + std::to_string(id) + " n=" + format_n(v.n));
    }
  }

  std::set<std::pair<int, int>> edge_set;
  for (const Edge& e : g.edges()) {
    const std::string name = "edge " + std::to_string(e.u) + "-" + std::to_string(e.v);
    if (g.vertex(e.u).part == g.vertex(e.v).part) report("not_bipartite", name);
    IntVec expected = n_of(e.u);
    expected[static_cast<std::size_t>(e.label)] += e.sign;
    if (expected != n_of(e.v)) {
      report("non_unit_edge", name + " from " + format_n(n_of(e.u)) + " to " +
                                  format_n(n_of(e.v)) + " label " + std::to_string(e.label + 1));
    }
    if (!edge_set.insert(undirected(e.u, e.v)).second) report("duplicate_edge", name);
  }

  std::set<std::pair<int, int>> directed_sides;
  std::map<std::pair<int, int>, int> diagonal_use;
  for (int fi = 0; fi < g.face_count(); ++fi) {
    const Face& f = g.faces()[static_cast<std::size_t>(fi)];
    const std::string name = "face " + std::to_string(fi);
    if (g.vertex(f[0]).part != Part::primal || g.vertex(f[2]).part != Part::primal ||
        g.vertex(f[1]).part != Part::dual || g.vertex(f[3]).part != Part::dual) {
      report("face_parts", name + " corners are not (primal, dual, primal, dual)");
    }
    std::array<std::optional<std::pair<int, int>>, 4> steps;
    for (std::size_t s = 0; s < 4; ++s) {
      const int a = f[s];
      const int b = f[(s + 1) % 4];
      steps[s] = unit_step(n_of(a), n_of(b));
      if (!steps[s]) {
        report("non_unit_side", name + " side " + std::to_string(a) + "-" + std::to_string(b));
      }
      if (!edge_set.count(undirected(a, b))) {
        report("missing_edge", name + " side " + std::to_string(a) + "-" + std::to_string(b));
      }
      if (!directed_sides.insert({a, b}).second) {
        report("orientation", name + " repeats directed side " + std::to_string(a) + "->" +
                                  std::to_string(b));
      }
    }
    if (steps[0] && steps[1] && steps[2] && steps[3]) {
      const bool square = steps[0]->first == steps[2]->first &&
                          steps[0]->second == -steps[2]->second &&
                          steps[1]->first == steps[3]->first &&
                          steps[1]->second == -steps[3]->second &&
                          steps[0]->first != steps[1]->first;
      if (!square) report("not_square", name);
    }
    ++diagonal_use[undirected(f[0], f[2])];
    ++diagonal_use[undirected(f[1], f[3])];
    bool has_pos = true;
    for (int c : f) has_pos = has_pos && g.vertex(c).pos.has_value();
    if (has_pos) {
      double area = 0;
      for (std::size_t s = 0; s < 4; ++s) {
        const Complex p = *g.vertex(f[s]).pos;
        const Complex q = *g.vertex(f[(s + 1) % 4]).pos;
        area += std::imag(std::conj(p) * q);
      }
      if (area <= 0) report("orientation", name + " is not positively oriented in the plane");
    }
  }
  for (const auto& [diag, count] : diagonal_use) {
    if (count != 1) {
      report("duality", "diagonal " + std::to_string(diag.first) + "-" +
                            std::to_string(diag.second) + " lies in " + std::to_string(count) +
                            " faces");
    }
  }
  return out;
}

FaceFrame face_frame(const QuadGraph& g, int face) {
  if (face < 0 || face >= g.face_count()) {
    throw MalformedFace("face " + std::to_string(face) + " does not exist");
  }
  const Face& f = g.faces()[static_cast<std::size_t>(face)];
  const IntVec& ref = g.vertex(f[0]).n;
  std::vector<int> active;
  for (std::size_t j = 0; j < ref.size(); ++j) {
    for (int c : f) {
      if (g.vertex(c).n[j] != ref[j]) {
        active.push_back(static_cast<int>(j));
        break;
      }
    }
  }
  if (active.size() != 2) {
    throw MalformedFace("face " + std::to_string(face) + " spans " +
                        std::to_string(active.size()) + " directions");
  }
  std::size_t k = 0;
  for (std::size_t c = 1; c < 4; ++c) {
    const IntVec& best = g.vertex(f[k]).n;
    const IntVec& cur = g.vertex(f[c]).n;
    if (cur[static_cast<std::size_t>(active[0])] <= best[static_cast<std::size_t>(active[0])] &&
        cur[static_cast<std::size_t>(active[1])] <= best[static_cast<std::size_t>(active[1])]) {
      k = c;
    }
  }
  FaceFrame fr;
  fr.face = face;
  fr.p1 = f[k];
  fr.p2 = f[(k + 1) % 4];
  fr.p4 = f[(k + 2) % 4];
  fr.p3 = f[(k + 3) % 4];
  const IntVec& n1 = g.vertex(fr.p1).n;
  const auto s12 = unit_step(n1, g.vertex(fr.p2).n);
  const auto s13 = unit_step(n1, g.vertex(fr.p3).n);
  if (!s12 || !s13 || s12->second != 1 || s13->second != 1 || s12->first == s13->first) {
    throw MalformedFace("face " + std::to_string(face) + " has no minimal corner");
  }
  fr.x = s12->first;
  fr.y = s13->first;
  IntVec n4 = n1;
  ++n4[static_cast<std::size_t>(fr.x)];
  ++n4[static_cast<std::size_t>(fr.y)];
  if (g.vertex(fr.p4).n != n4) {
    throw MalformedFace("face " + std::to_string(face) + " corners do not form a unit square");
  }
  fr.p1_primal = g.vertex(fr.p1).part == Part::primal;
  return fr;
}

nlohmann::json to_json(const QuadGraph& g) {
  nlohmann::json vertices = nlohmann::json::array();
  for (int id = 0; id < g.vertex_count(); ++id) {
    const Vertex& v = g.vertex(id);
    nlohmann::json jv{{"id", id}, {"part", to_string(v.part)}, {"n", v.n}};
    if (v.pos) jv["pos"] = {v.pos->real(), v.pos->imag()};
    vertices.push_back(std::move(jv));
  }
  nlohmann::json faces = nlohmann::json::array();
  for (const Face& f : g.faces()) faces.push_back(f);
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : g.edges()) {
    edges.push_back({{"u", e.u}, {"v", e.v}, {"label", e.label + 1}, {"sign", e.sign}});
  }
  return {{"dimension", g.dimension()},
          {"vertices", std::move(vertices)},
          {"faces", std::move(faces)},
          {"edges", std::move(edges)}};
}

QuadGraph quadgraph_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("dimension").get<int>();
    const auto& jv = j.at("vertices");
    std::vector<Vertex> vertices(jv.size());
    std::vector<bool> filled(jv.size(), false);
    for (const auto& v : jv) {
      const int id = v.at("id").get<int>();
      if (id < 0 || static_cast<std::size_t>(id) >= jv.size() || filled[static_cast<std::size_t>(id)]) {
        throw GraphFormatError("vertex ids must be 0..N-1 without repeats (got " +
                               std::to_string(id) + ")");
      }
      filled[static_cast<std::size_t>(id)] = true;
      Vertex& out = vertices[static_cast<std::size_t>(id)];
      out.part = part_from_string(v.at("part").get<std::string>());
      out.n = v.at("n").get<IntVec>();
      if (v.contains("pos")) {
        const auto p = v.at("pos").get<std::vector<double>>();
        if (p.size() != 2) throw GraphFormatError("pos must be [re, im]");
        out.pos = Complex(p[0], p[1]);
      }
    }
    std::vector<Face> faces;
    for (const auto& f : j.at("faces")) faces.push_back(f.get<Face>());
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back({e.at("u").get<int>(), e.at("v").get<int>(), e.at("label").get<int>() - 1,
                       e.at("sign").get<int>()});
    }
    return QuadGraph(d, std::move(vertices), std::move(faces), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw GraphFormatError(e.what());
  }
}

}  // namespace fgl
