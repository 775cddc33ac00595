#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "fgl/quadgraph.hpp"
#include "fgl/spectral.hpp"

namespace fgl {

enum class Domain : std::uint8_t { primal, dual, quad };

struct VertexField {
  Domain domain = Domain::quad;
  std::map<int, Complex> values;

  bool has(int v) const { return values.count(v) != 0; }
};

/// Throws GraphFormatError if some vertex of the field lies outside its domain.
void check_domain(const QuadGraph& g, const VertexField& f);

/// (Lf)(x0) = sum over G-neighbours (or G*-neighbours) x of nu(x0, x)(f(x) - f(x0)).
/// Evaluated at the given targets, or at every interior vertex of the part.
VertexField laplacian_apply(const QuadGraph& g, const WeightFunction& nu, const VertexField& f,
                            Part part, std::optional<std::span<const int>> targets = std::nullopt);

/// Per face: (f(y1) - f(y0)) - i nu(x0, x1)(f(x1) - f(x0)).
std::vector<Complex> cauchy_riemann_residual(const QuadGraph& g, const WeightFunction& nu,
                                             const VertexField& f);

/// k(x) = sum of nu(x, x1) over the neighbours of an interior vertex.
Complex vertex_weight_sum(const QuadGraph& g, const WeightFunction& nu, int vertex);

struct HarmonicityReport {
  double max_residual = 0;
  int argmax_vertex = -1;
  /// max over vertices of |Lf(x)| / max |f| on x and its neighbours.
  double max_relative = 0;
};

HarmonicityReport harmonicity_report(const QuadGraph& g, const WeightFunction& nu,
                                     const VertexField& f, Part part);

nlohmann::json to_json(const HarmonicityReport& r);

/// Psi(n(v), z) at every vertex of the domain.
VertexField sample_wave_function(const SpectralData& sd, const QuadGraph& g, SpherePoint z,
                                 Domain domain);

void write_field_csv(std::ostream& os, const VertexField& f);
VertexField read_field_csv(std::istream& is, Domain domain);

}  // namespace fgl
