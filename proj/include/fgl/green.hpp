#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "fgl/contour.hpp"
#include "fgl/operators.hpp"

namespace fgl {

/// Psi(n; z) Psi+(n~; z) Omega as a density on both charts:
/// f(z) = Psi(n, z) Psi(n~, -z) (-1/(2z)), and in w = 1/z,
/// f_w(w) = Psi_w(n, w) Psi_w(n~, -w) / (2w) with Psi_w(n, w) = prod ((1 + a w)/(1 - a w))^n.
ChartDensity green_integrand(const SpectralData& sd, const IntVec& n, const IntVec& n_source);

/// Vertex form; both vertices must be primal.
ChartDensity green_integrand(const SpectralData& sd, const QuadGraph& g, int x, int x_source);

struct HValue {
  Complex value;
  MomentumVector k;  // n(x) - n(x~)
  double level = 0;
  Contour contour;
};

/// Integral of the integrand for (n, n~) over C_{n - n~}(lambda).
HValue h_value(const LevelSetTracer& tracer, const IntVec& n, const IntVec& n_source,
               SpherePoint lambda);

/// H(x, x~, lambda); zero on the diagonal by definition.
Complex h_function(const LevelSetTracer& tracer, const QuadGraph& g, int x, int x_source,
                   SpherePoint lambda);

/// Residue of f dz at p by the trapezoid rule on a circle of radius r
/// (in the w chart when p is infinity).
Complex residue_at(const ChartDensity& density, SpherePoint p, double r, int samples = 256);

struct ResidueTerm {
  SpherePoint pole;
  int winding = 0;
  Complex residue;
  double radius = 0;
};

struct OracleResult {
  Complex value;
  std::vector<ResidueTerm> terms;
};

/// 2 pi i sum_p wind(C, p) Res_p over p in {0, inf, +-alpha_j}, with
/// residues from small circles. Throws PoleTooCloseToContour when a pole
/// with nonzero winding cannot be isolated from the contour.
OracleResult residue_oracle_on(const SpectralData& sd, const Contour& contour, const IntVec& n,
                               const IntVec& n_source);

OracleResult residue_oracle(const LevelSetTracer& tracer, const QuadGraph& g, int x,
                            int x_source, SpherePoint lambda);

struct GreenValue {
  int vertex = -1;
  IntVec dn;
  Complex value;
  std::string method;  // "quadrature" or "calibrated"
  Complex oracle;      // residue-oracle value of G, off-diagonal only
  double level = 0;
};

struct GreenField {
  int source = -1;
  SpherePoint lambda{Complex(0.0)};
  int radius = 0;
  Complex k_source;
  Complex gamma0;                   // calibrated diagonal value
  Complex paper_diagonal{1.0, 0.0};  // the printed normalization, for comparison
  std::map<int, GreenValue> values;
  double oracle_max_dev = 0;  // max |quadrature - oracle| / (1 + |value|) over H values
};

/// G(x, x~, lambda) for primal x with |n(x) - n(x~)|_1 <= radius + 1.
GreenField green_field(const LevelSetTracer& tracer, const QuadGraph& g, const WeightFunction& nu,
                       int source, SpherePoint lambda, int radius, bool with_oracle = true);

struct DeltaReport {
  Complex diagonal;         // (LG)(x~, x~)
  double max_offdiag = 0;   // max |LG| over interior x != x~ within radius - 1
  int argmax_offdiag = -1;
  std::map<int, Complex> lg;
};

DeltaReport delta_report(const QuadGraph& g, const WeightFunction& nu, const GreenField& field);

struct LhRow {
  std::string kind;  // "diagonal", "neighbour", "far"
  double max_abs = 0;
  int count = 0;
};

struct ReplacementCheck {
  double primal_max_dev = 0;
  double dual_max_dev = 0;
  int faces = 0;
  int corner_checks = 0;
  int mismatches = 0;  // corners whose value moved by more than 1e-8
};

struct LhReport {
  std::vector<LhRow> rows;
  double max_far_l1_ge2 = 0;  // max |LH| over x with |n(x) - n(x~)|_1 >= 2
  ReplacementCheck replacement;
};

LhReport verify_lh_zero(const LevelSetTracer& tracer, const QuadGraph& g, const WeightFunction& nu,
                        int source, SpherePoint lambda, int radius);

struct GrowthRow {
  int vertex = -1;
  int l1 = 0;
  double ratio = 0;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  double max_ratio = 0;
};

/// |G(x)| / exp(sum_j dn_j Im p_j(lambda)) for every off-diagonal value.
GrowthReport growth_report(const GreenField& field, const SpectralData& sd);

/// max relative deviation of |Psi(n, lambda)| from exp(sign * <n, Im p(lambda)>).
double psi_growth_deviation(const SpectralData& sd, const IntVec& n, SpherePoint lambda,
                            double sign);

nlohmann::json to_json(const GreenField& f, const DeltaReport& d);
nlohmann::json to_json(const LhReport& r);
void write_green_csv(std::ostream& os, const GreenField& f, const GrowthReport& growth);

}  // namespace fgl
