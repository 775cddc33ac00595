#include <random>
#include <sstream>

#include "doctest.h"
#include "fgl/errors.hpp"
#include "fgl/green.hpp"

using namespace fgl;

namespace {

SpectralData rotated_square() {
  const Complex rot = std::polar(1.0, kPi / 7);
  return SpectralData({rot, kI * rot}, 1.0);
}

const std::vector<SpherePoint> kLambdas{Complex(0.31, 0.72), Complex(-0.55, 0.18),
                                         Complex(1.7, -0.4)};

}  // namespace

TEST_CASE("diagonal integrand has residues -1/2 at 0 and +1/2 at infinity") {
  const SpectralData sd = rotated_square();
  for (const IntVec& n : {IntVec{0, 0}, IntVec{2, -1}, IntVec{3, 4}}) {
    const ChartDensity d = green_integrand(sd, n, n);
    CHECK(std::abs(residue_at(d, Complex(0.0), 0.1) + 0.5) < 1e-12);
    CHECK(std::abs(residue_at(d, SpherePoint::infinity(), 0.1) - 0.5) < 1e-12);
  }
}

TEST_CASE("a single step gives a simple pole at alpha_1 only") {
  const SpectralData sd = rotated_square();
  const ChartDensity d = green_integrand(sd, {1, 0}, {0, 0});
  // (z + a)(-1/(2z)) at z = a.
  CHECK(std::abs(residue_at(d, sd.alpha(0), 0.05) + 1.0) < 1e-12);
  CHECK(std::abs(residue_at(d, -sd.alpha(0), 0.05)) < 1e-12);
  CHECK(std::abs(residue_at(d, sd.alpha(1), 0.05)) < 1e-12);
  CHECK_THROWS_AS(d.f_z(sd.alpha(0)), PoleEvaluation);
}

TEST_CASE("residues do not depend on the circle radius") {
  const SpectralData sd = rotated_square();
  const ChartDensity d = green_integrand(sd, {3, -1}, {0, 1});
  for (const SpherePoint p : {SpherePoint(sd.alpha(0)), SpherePoint(-sd.alpha(1)),
                              SpherePoint(0.0), SpherePoint::infinity()}) {
    const Complex a = residue_at(d, p, 0.02);
    const Complex b = residue_at(d, p, 0.04);
    CHECK(std::abs(a - b) < 1e-9 * (1 + std::abs(a)));
  }
}

TEST_CASE("H vanishes on the diagonal and rejects equal coordinates") {
  const QuadGraph g = build_square_lattice_patch(4, 4);
  const LevelSetTracer tracer(rotated_square(), 256);
  const int x = *g.find_vertex({2, 2});
  CHECK(h_function(tracer, g, x, x, kLambdas[0]) == Complex(0.0));
  CHECK_THROWS_AS(h_value(tracer, {1, 1}, {1, 1}, kLambdas[0]), DegenerateDifference);
  CHECK(residue_oracle(tracer, g, x, x, kLambdas[0]).value == Complex(0.0));
}

TEST_CASE("oracle on an arbitrary contour returns 0 for x = x~") {
  const SpectralData sd = rotated_square();
  const LevelSetTracer tracer(sd, 512);
  const Contour c = tracer.trace(MomentumVector{1.0, -2.0}, kLambdas[1]);
  const OracleResult o = residue_oracle_on(sd, c, {2, 3}, {2, 3});
  CHECK(std::abs(o.value) < 1e-12);
  CHECK(o.terms[0].winding == o.terms[1].winding);
}

TEST_CASE("single-pole contour: the value is 2 pi i times the residue at alpha_1") {
  const SpectralData sd = rotated_square();
  const LevelSetTracer tracer(sd, 512);
  // Level -1 of ln|(z - a)/(z + a)| is an Apollonius circle around a alone.
  const HValue h = [&] {
    HValue out;
    out.k = {1.0, 0.0};
    out.contour = tracer.trace_level(out.k, -1.0);
    out.value = contour_integral(out.contour, green_integrand(sd, {1, 0}, {0, 0}));
    return out;
  }();
  const OracleResult o = residue_oracle_on(sd, h.contour, {1, 0}, {0, 0});
  int nonzero = 0;
  for (const ResidueTerm& t : o.terms) {
    if (t.winding == 0) continue;
    ++nonzero;
    CHECK(t.pole == SpherePoint(sd.alpha(0)));
    CHECK(std::abs(t.winding) == 1);
  }
  CHECK(nonzero == 1);
  CHECK(std::abs(std::abs(h.value) - 2 * kPi) < 1e-8);
  CHECK(std::abs(h.value - o.value) < 1e-8 * (1 + std::abs(h.value)));
}

TEST_CASE("quadrature agrees with the residue oracle") {
  const SpectralData sd = rotated_square();
  const LevelSetTracer tracer(sd, 512);
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> coord(-2, 2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  int checked = 0;
  int nonzero = 0;
  while (checked < 12) {
    const IntVec n{coord(rng), coord(rng)};
    const IntVec ns{coord(rng), coord(rng)};
    if (n == ns || l1_norm({n[0] - ns[0], n[1] - ns[1]}) > 4) continue;
    const SpherePoint lambda = Complex(u(rng), u(rng));
    HValue h;
    try {
      h = h_value(tracer, n, ns, lambda);
    } catch (const SaddleLevel&) {
      continue;
    }
    const OracleResult o = residue_oracle_on(sd, h.contour, n, ns);
    CHECK(std::abs(h.value - o.value) <= 1e-8 * (1 + std::abs(h.value)));
    if (std::abs(h.value) > 1) ++nonzero;
    ++checked;
  }
  CHECK(nonzero > 0);
}

TEST_CASE("|H| is invariant under lambda -> tau lambda") {
  const SpectralData sd = rotated_square();
  const LevelSetTracer tracer(sd, 512);
  for (const SpherePoint lambda : kLambdas) {
    const Complex a = h_value(tracer, {2, 1}, {0, 0}, lambda).value;
    const Complex b = h_value(tracer, {2, 1}, {0, 0}, sd.tau(lambda)).value;
    CHECK(std::abs(std::abs(a) - std::abs(b)) < 1e-8);
  }
}

TEST_CASE("Green field on the square lattice: off-diagonal H vanishes, gamma0 = -1/k") {
  const SpectralData sd = rotated_square();
  const QuadGraph g = build_square_lattice_patch(8, 8);
  const WeightFunction nu = build_weights(sd, g);
  const LevelSetTracer tracer(sd, 512);
  const int source = *g.find_vertex({4, 4});
  for (const SpherePoint lambda : kLambdas) {
    const GreenField f = green_field(tracer, g, nu, source, lambda, 3);
    CHECK(f.values.at(source).method == "calibrated");
    CHECK(f.paper_diagonal == Complex(1.0));
    CHECK(f.oracle_max_dev < 1e-8);
    for (const auto& [v, gv] : f.values) {
      if (v == source) continue;
      CHECK(gv.method == "quadrature");
      CHECK(std::abs(gv.value) < 1e-9);
      CHECK(l1_norm(gv.dn) <= 4);
    }
    CHECK(std::abs(f.gamma0 + 1.0 / f.k_source) < 1e-9);

    const DeltaReport d = delta_report(g, nu, f);
    CHECK(std::abs(d.diagonal - 1.0) < 1e-12);
    // Neighbours see -nu(x, x~) gamma0 ... = -nu / k, so the delta property fails there.
    for (const auto& [x1, face] : g.diagonal_neighbors(source)) {
      const Complex expected = -nu.diagonal(g, face, x1, source) / f.k_source;
      CHECK(std::abs(d.lg.at(x1) - expected) < 1e-9);
    }
    CHECK(d.max_offdiag > 0.1);
  }
}

TEST_CASE("Green values are stable under resolution doubling") {
  const SpectralData sd = rotated_square();
  const QuadGraph g = build_square_lattice_patch(6, 6);
  const WeightFunction nu = build_weights(sd, g);
  const int source = *g.find_vertex({3, 3});
  const GreenField a = green_field(LevelSetTracer(sd, 256), g, nu, source, kLambdas[2], 1, false);
  const GreenField b = green_field(LevelSetTracer(sd, 512), g, nu, source, kLambdas[2], 1, false);
  REQUIRE(a.values.size() == b.values.size());
  for (const auto& [v, gv] : a.values) {
    CHECK(std::abs(gv.value - b.values.at(v).value) < 1e-7);
  }
}

TEST_CASE("LH report rows and contour replacement") {
  const SpectralData sd = rotated_square();
  const QuadGraph g = build_square_lattice_patch(8, 8);
  const WeightFunction nu = build_weights(sd, g);
  const LevelSetTracer tracer(sd, 512);
  const int source = *g.find_vertex({4, 4});
  const LhReport r = verify_lh_zero(tracer, g, nu, source, kLambdas[0], 3);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].kind == "diagonal");
  CHECK(r.rows[0].count == 1);
  CHECK(r.rows[1].count == 4);
  CHECK(r.rows[2].count > 0);
  for (const LhRow& row : r.rows) CHECK(row.max_abs < 1e-6);
  CHECK(r.max_far_l1_ge2 < 1e-6);
  CHECK(r.replacement.faces > 0);
  CHECK(r.replacement.corner_checks == 4 * r.replacement.faces);
  CHECK(std::isfinite(r.replacement.primal_max_dev));
  CHECK(std::isfinite(r.replacement.dual_max_dev));
  const nlohmann::json j = to_json(r);
  CHECK(j.at("rows").size() == 3);
}

TEST_CASE("Psi growth holds with exp(-<n, Im p>), not with the printed sign") {
  const SpectralData sd = rotated_square();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coord(-6, 6);
  std::uniform_real_distribution<double> u(-2, 2);
  double worst = 0;
  double literal_best = 1e300;
  for (int t = 0; t < 100; ++t) {
    const IntVec n{coord(rng), coord(rng)};
    const SpherePoint lambda = Complex(u(rng), u(rng));
    worst = std::max(worst, psi_growth_deviation(sd, n, lambda, -1.0));
    if (n != IntVec{0, 0}) {
      literal_best = std::min(literal_best, psi_growth_deviation(sd, n, lambda, +1.0));
    }
  }
  CHECK(worst < 1e-12);
  CHECK(literal_best > 1e-6);
}

TEST_CASE("growth report and exports") {
  const SpectralData sd = rotated_square();
  const QuadGraph g = build_square_lattice_patch(6, 6);
  const WeightFunction nu = build_weights(sd, g);
  const int source = *g.find_vertex({3, 3});
  const GreenField f = green_field(LevelSetTracer(sd, 256), g, nu, source, kLambdas[0], 1);
  const GrowthReport gr = growth_report(f, sd);
  CHECK(gr.rows.size() == f.values.size() - 1);
  CHECK(std::isfinite(gr.max_ratio));

  std::ostringstream os;
  write_green_csv(os, f, gr);
  const std::string csv = os.str();
  CHECK(csv.rfind("vertex_id,dn1,dn2,re,im,method,ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(f.values.size()) + 1);

  const nlohmann::json j = to_json(f, delta_report(g, nu, f));
  for (const char* key : {"lambda", "k_xtilde", "gamma0", "max_LG_offdiag", "oracle_max_dev"}) {
    CHECK(j.contains(key));
  }
}
