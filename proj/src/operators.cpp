#include "fgl/operators.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fgl/errors.hpp"

namespace fgl {

namespace {

bool in_domain(Part part, Domain domain) {
  return domain == Domain::quad || (domain == Domain::primal) == (part == Part::primal);
}

Complex neighbour_weight(const WeightFunction& nu, int face, Part part) {
  return part == Part::primal ? nu.face(face).primal : nu.face(face).dual;
}

const Complex& value_at(const VertexField& f, int v, int at) {
  const auto it = f.values.find(v);
  if (it == f.values.end()) {
    throw MissingNeighbor("no value at vertex " + std::to_string(v) + " (needed at vertex " +
                          std::to_string(at) + ")");
  }
  return it->second;
}

}  // namespace

void check_domain(const QuadGraph& g, const VertexField& f) {
  for (const auto& [v, value] : f.values) {
    if (v < 0 || v >= g.vertex_count()) {
      throw GraphFormatError("field references missing vertex " + std::to_string(v));
    }
    if (!in_domain(g.vertex(v).part, f.domain)) {
      throw GraphFormatError("vertex " + std::to_string(v) + " is outside the field's graph");
    }
  }
}

VertexField laplacian_apply(const QuadGraph& g, const WeightFunction& nu, const VertexField& f,
                            Part part, std::optional<std::span<const int>> targets) {
  std::vector<int> chosen;
  if (targets) {
    chosen.assign(targets->begin(), targets->end());
  } else {
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (g.vertex(v).part == part && g.is_interior(v)) chosen.push_back(v);
    }
  }
  VertexField out{part == Part::primal ? Domain::primal : Domain::dual, {}};
  for (int x0 : chosen) {
    if (g.vertex(x0).part != part) {
      throw GraphFormatError("vertex " + std::to_string(x0) + " is not " + to_string(part));
    }
    if (!g.is_interior(x0)) throw BoundaryVertex("vertex " + std::to_string(x0));
    const Complex f0 = value_at(f, x0, x0);
    Complex sum = 0;
    for (const auto& [x, face] : g.diagonal_neighbors(x0)) {
      sum += neighbour_weight(nu, face, part) * (value_at(f, x, x0) - f0);
    }
    out.values.emplace(x0, sum);
  }
  return out;
}

std::vector<Complex> cauchy_riemann_residual(const QuadGraph& g, const WeightFunction& nu,
                                             const VertexField& f) {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(g.face_count()));
  for (int fi = 0; fi < g.face_count(); ++fi) {
    const Face& q = g.faces()[static_cast<std::size_t>(fi)];
    std::array<Complex, 4> v;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto it = f.values.find(q[k]);
      if (it == f.values.end()) {
        throw MissingVertexValue("vertex " + std::to_string(q[k]) + " of face " +
                                 std::to_string(fi));
      }
      v[k] = it->second;
    }
    out.push_back((v[3] - v[1]) - kI * nu.face(fi).primal * (v[2] - v[0]));
  }
  return out;
}

Complex vertex_weight_sum(const QuadGraph& g, const WeightFunction& nu, int vertex) {
  if (!g.is_interior(vertex)) throw BoundaryVertex("vertex " + std::to_string(vertex));
  const Part part = g.vertex(vertex).part;
  Complex k = 0;
  for (const auto& [x, face] : g.diagonal_neighbors(vertex)) k += neighbour_weight(nu, face, part);
  return k;
}

HarmonicityReport harmonicity_report(const QuadGraph& g, const WeightFunction& nu,
                                     const VertexField& f, Part part) {
  const VertexField lf = laplacian_apply(g, nu, f, part);
  HarmonicityReport r;
  for (const auto& [x0, value] : lf.values) {
    const double a = std::abs(value);
    if (a > r.max_residual || r.argmax_vertex < 0) {
      r.max_residual = a;
      r.argmax_vertex = x0;
    }
    double scale = std::abs(f.values.at(x0));
    for (const auto& [x, face] : g.diagonal_neighbors(x0)) {
      scale = std::max(scale, std::abs(f.values.at(x)));
    }
    if (scale > 0) r.max_relative = std::max(r.max_relative, a / scale);
  }
  return r;
}

nlohmann::json to_json(const HarmonicityReport& r) {
  return {{"max_residual", r.max_residual},
          {"argmax_vertex", r.argmax_vertex},
          {"max_relative", r.max_relative}};
}

VertexField sample_wave_function(const SpectralData& sd, const QuadGraph& g, SpherePoint z,
                                 Domain domain) {
  VertexField f{domain, {}};
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (in_domain(g.vertex(v).part, domain)) {
      f.values.emplace(v, wave_function(sd, g.vertex(v).n, z));
    }
  }
  return f;
}

void write_field_csv(std::ostream& os, const VertexField& f) {
  os.precision(std::numeric_limits<double>::max_digits10);
  os << "vertex_id,re,im\n";
  for (const auto& [v, value] : f.values) os << v << ',' << value.real() << ',' << value.imag() << '\n';
}

VertexField read_field_csv(std::istream& is, Domain domain) {
  VertexField f{domain, {}};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || (line_no == 1 && line.rfind("vertex_id", 0) == 0)) continue;
    std::istringstream row(line);
    std::string id;
    std::string re;
    std::string im;
    if (!std::getline(row, id, ',') || !std::getline(row, re, ',') || !std::getline(row, im)) {
      throw IoError("line " + std::to_string(line_no) + ": expected vertex_id,re,im");
    }
    try {
      std::size_t used = 0;
      const int v = std::stoi(id, &used);
      if (used != id.size()) throw std::invalid_argument(id);
      if (!f.values.emplace(v, Complex(std::stod(re), std::stod(im))).second) {
        throw IoError("line " + std::to_string(line_no) + ": duplicate vertex " + id);
      }
    } catch (const std::logic_error&) {
      throw IoError("line " + std::to_string(line_no) + ": cannot parse '" + line + "'");
    }
  }
  return f;
}

}  // namespace fgl
