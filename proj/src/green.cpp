#include "fgl/green.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <thread>

#include "fgl/errors.hpp"

namespace fgl {

namespace {

constexpr int kResidueSamples = 256;

// Runs body(i) for i in [0, n) on a small pool. Each index writes its own
// slot, so the result does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, F body) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> jobs;
  for (std::size_t t = 0; t < workers; ++t) {
    jobs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

Complex psi_w(const SpectralData& sd, const IntVec& n, Complex w) {
  Complex r = 1.0;
  for (int j = 0; j < sd.dimension(); ++j) {
    const int nj = n[static_cast<std::size_t>(j)];
    if (nj == 0) continue;
    const Complex a = sd.alpha(j);
    r *= ipow((1.0 + a * w) / (1.0 - a * w), nj);
  }
  return r;
}

IntVec difference(const IntVec& a, const IntVec& b) {
  IntVec d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

bool is_zero(const IntVec& n) {
  return std::all_of(n.begin(), n.end(), [](int v) { return v == 0; });
}

double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  double t = len2 > 0 ? std::real((p - a) * std::conj(d)) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

// Distance from p to the polyline, measured in z for finite p and in w for infinity.
double contour_distance(const Contour& c, SpherePoint p) {
  const auto coord = [&](const ContourNode& n) -> Complex {
    if (p.is_infinite()) return n.chart == Chart::w ? n.value : 1.0 / n.value;
    if (n.chart == Chart::z) return n.value;
    if (n.value == Complex(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
    return 1.0 / n.value;
  };
  const Complex target = p.is_infinite() ? Complex(0.0) : p.value();
  double best = std::numeric_limits<double>::infinity();
  for (const Polyline& poly : c.components) {
    const std::size_t m = poly.nodes.size();
    for (std::size_t s = 0; s < m; ++s) {
      const Complex a = coord(poly.nodes[s]);
      const Complex b = coord(poly.nodes[(s + 1) % m]);
      if (!std::isfinite(a.real()) || !std::isfinite(b.real())) continue;
      best = std::min(best, point_segment_distance(target, a, b));
    }
  }
  return best;
}

std::string describe(SpherePoint p) {
  if (p.is_infinite()) return "infinity";
  return "(" + std::to_string(p.value().real()) + ", " + std::to_string(p.value().imag()) + ")";
}

}  // namespace

ChartDensity green_integrand(const SpectralData& sd, const IntVec& n, const IntVec& n_source) {
  if (static_cast<int>(n.size()) != sd.dimension() ||
      static_cast<int>(n_source.size()) != sd.dimension()) {
    throw InvalidSpectralData("lattice coordinates do not match the number of directions");
  }
  ChartDensity d;
  d.f_z = [&sd, n, n_source](Complex z) {
    if (z == Complex(0.0)) throw PoleEvaluation("Omega has a pole at 0");
    return wave_function(sd, n, z) * wave_function(sd, n_source, -z) * (-1.0 / (2.0 * z));
  };
  d.f_w = [&sd, n, n_source](Complex w) {
    if (w == Complex(0.0)) throw PoleEvaluation("Omega has a pole at infinity");
    return psi_w(sd, n, w) * psi_w(sd, n_source, -w) / (2.0 * w);
  };
  return d;
}

ChartDensity green_integrand(const SpectralData& sd, const QuadGraph& g, int x, int x_source) {
  if (g.vertex(x).part != Part::primal || g.vertex(x_source).part != Part::primal) {
    throw GraphFormatError("Green integrand needs primal vertices");
  }
  return green_integrand(sd, g.vertex(x).n, g.vertex(x_source).n);
}

HValue h_value(const LevelSetTracer& tracer, const IntVec& n, const IntVec& n_source,
               SpherePoint lambda) {
  const IntVec dn = difference(n, n_source);
  if (is_zero(dn)) throw DegenerateDifference("n(x) = n(x~) leaves no contour");
  HValue h;
  h.k = to_momentum(dn);
  h.contour = tracer.trace(h.k, lambda);
  h.level = h.contour.level;
  h.value = contour_integral(h.contour, green_integrand(tracer.spectral(), n, n_source));
  return h;
}

Complex h_function(const LevelSetTracer& tracer, const QuadGraph& g, int x, int x_source,
                   SpherePoint lambda) {
  if (g.vertex(x).part != Part::primal || g.vertex(x_source).part != Part::primal) {
    throw GraphFormatError("H is defined on primal vertices");
  }
  if (x == x_source) return 0.0;
  return h_value(tracer, g.vertex(x).n, g.vertex(x_source).n, lambda).value;
}

Complex residue_at(const ChartDensity& density, SpherePoint p, double r, int samples) {
  const std::function<Complex(Complex)> f_w =
      density.f_w ? density.f_w
                  : std::function<Complex(Complex)>(
                        [f = density.f_z](Complex w) { return f(1.0 / w) * (-1.0 / (w * w)); });
  const Complex centre = p.is_infinite() ? Complex(0.0) : p.value();
  const auto& f = p.is_infinite() ? f_w : density.f_z;
  Complex sum = 0;
  for (int s = 0; s < samples; ++s) {
    const Complex u = std::polar(1.0, 2 * kPi * (s + 0.5) / samples);
    sum += f(centre + r * u) * r * u;
  }
  return sum / static_cast<double>(samples);
}

OracleResult residue_oracle_on(const SpectralData& sd, const Contour& contour, const IntVec& n,
                               const IntVec& n_source) {
  const IntVec m = difference(n, n_source);
  std::vector<SpherePoint> poles{Complex(0.0), SpherePoint::infinity()};
  for (int j = 0; j < sd.dimension(); ++j) {
    if (m[static_cast<std::size_t>(j)] == 0) continue;
    poles.emplace_back(sd.alpha(j));
    poles.emplace_back(-sd.alpha(j));
  }
  std::vector<int> wind;
  try {
    wind = winding_numbers(contour, poles);
  } catch (const PointOnContour& e) {
    throw PoleTooCloseToContour(e.what());
  }
  const ChartDensity density = green_integrand(sd, n, n_source);

  OracleResult out;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const SpherePoint p = poles[i];
    ResidueTerm term{p, wind[i], 0.0, 0.0};
    if (term.winding != 0) {
      // Isolation from the other poles in the chart of p; 0 and infinity
      // do not see each other.
      double iso = std::numeric_limits<double>::infinity();
      for (const SpherePoint& q : poles) {
        if (q == p || q.is_infinite() || (p.is_infinite() && q.value() == Complex(0.0))) continue;
        const double d = p.is_infinite() ? std::abs(1.0 / q.value()) : std::abs(q.value() - p.value());
        iso = std::min(iso, d);
      }
      const double dist = contour_distance(contour, p);
      double r = 0.25 * iso;
      while (dist < 1.5 * r) {
        r *= 0.5;
        if (r < 1e-3 * iso) {
          throw PoleTooCloseToContour("pole at " + describe(p) + " is " + std::to_string(dist) +
                                      " from the contour");
        }
      }
      term.radius = r;
      term.residue = residue_at(density, p, r, kResidueSamples);
      out.value += 2.0 * kPi * kI * static_cast<double>(term.winding) * term.residue;
    }
    out.terms.push_back(term);
  }
  return out;
}

OracleResult residue_oracle(const LevelSetTracer& tracer, const QuadGraph& g, int x,
                            int x_source, SpherePoint lambda) {
  if (x == x_source) return {};
  const IntVec& n = g.vertex(x).n;
  const IntVec& ns = g.vertex(x_source).n;
  const IntVec dn = difference(n, ns);
  if (is_zero(dn)) throw DegenerateDifference("n(x) = n(x~) leaves no contour");
  const Contour c = tracer.trace(to_momentum(dn), lambda);
  return residue_oracle_on(tracer.spectral(), c, n, ns);
}

GreenField green_field(const LevelSetTracer& tracer, const QuadGraph& g, const WeightFunction& nu,
                       int source, SpherePoint lambda, int radius, bool with_oracle) {
  if (g.vertex(source).part != Part::primal) throw GraphFormatError("source must be primal");
  GreenField field;
  field.source = source;
  field.lambda = lambda;
  field.radius = radius;
  field.k_source = vertex_weight_sum(g, nu, source);
  if (std::abs(field.k_source) < 1e-13) {
    throw ZeroWeightSum("k(x~) = " + std::to_string(std::abs(field.k_source)));
  }
  const IntVec& ns = g.vertex(source).n;

  std::vector<int> targets;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (v == source || g.vertex(v).part != Part::primal) continue;
    if (l1_norm(difference(g.vertex(v).n, ns)) <= radius + 1) targets.push_back(v);
  }
  std::vector<GreenValue> values(targets.size());
  std::vector<double> dev(targets.size(), 0.0);
  parallel_for(targets.size(), [&](std::size_t i) {
    const int x = targets[i];
    const HValue h = h_value(tracer, g.vertex(x).n, ns, lambda);
    GreenValue& gv = values[i];
    gv.vertex = x;
    gv.dn = difference(g.vertex(x).n, ns);
    gv.value = h.value / field.k_source;
    gv.method = "quadrature";
    gv.level = h.level;
    if (with_oracle) {
      const OracleResult o = residue_oracle_on(tracer.spectral(), h.contour, g.vertex(x).n, ns);
      gv.oracle = o.value / field.k_source;
      dev[i] = std::abs(h.value - o.value) / (1.0 + std::abs(h.value));
    }
  });
  for (std::size_t i = 0; i < targets.size(); ++i) {
    field.values[targets[i]] = std::move(values[i]);
    field.oracle_max_dev = std::max(field.oracle_max_dev, dev[i]);
  }

  // gamma0 forces (LG)(x~) = 1 given the neighbour values.
  Complex s = 0;
  for (const auto& [x1, f] : g.diagonal_neighbors(source)) {
    s += nu.diagonal(g, f, source, x1) * field.values.at(x1).value;
  }
  field.gamma0 = (s - 1.0) / field.k_source;
  GreenValue diag;
  diag.vertex = source;
  diag.dn = IntVec(ns.size(), 0);
  diag.value = field.gamma0;
  diag.method = "calibrated";
  field.values[source] = diag;
  return field;
}

DeltaReport delta_report(const QuadGraph& g, const WeightFunction& nu, const GreenField& field) {
  const IntVec& ns = g.vertex(field.source).n;
  VertexField f{Domain::primal, {}};
  for (const auto& [v, gv] : field.values) f.values[v] = gv.value;
  std::vector<int> targets;
  for (const auto& [v, gv] : field.values) {
    if (g.is_interior(v) && l1_norm(difference(g.vertex(v).n, ns)) <= field.radius - 1) {
      targets.push_back(v);
    }
  }
  const VertexField lg = laplacian_apply(g, nu, f, Part::primal, targets);
  DeltaReport r;
  r.lg = lg.values;
  for (const auto& [v, val] : lg.values) {
    if (v == field.source) {
      r.diagonal = val;
    } else if (std::abs(val) > r.max_offdiag) {
      r.max_offdiag = std::abs(val);
      r.argmax_offdiag = v;
    }
  }
  return r;
}

LhReport verify_lh_zero(const LevelSetTracer& tracer, const QuadGraph& g, const WeightFunction& nu,
                        int source, SpherePoint lambda, int radius) {
  if (g.vertex(source).part != Part::primal) throw GraphFormatError("source must be primal");
  if (std::abs(vertex_weight_sum(g, nu, source)) < 1e-13) throw ZeroWeightSum("k(x~) vanishes");
  const IntVec& ns = g.vertex(source).n;
  const SpectralData& sd = tracer.spectral();

  // Every coordinate difference needed below, primal and dual, traced once.
  std::map<IntVec, std::size_t> index;
  std::vector<IntVec> diffs;
  const auto need = [&](const IntVec& dn) {
    if (!is_zero(dn) && index.emplace(dn, diffs.size()).second) diffs.push_back(dn);
  };
  for (int v = 0; v < g.vertex_count(); ++v) {
    const IntVec dn = difference(g.vertex(v).n, ns);
    const int l1 = l1_norm(dn);
    if (g.vertex(v).part == Part::primal ? l1 <= radius + 1 : l1 <= radius) need(dn);
  }
  std::vector<Contour> contours(diffs.size());
  parallel_for(diffs.size(), [&](std::size_t i) {
    contours[i] = tracer.trace(to_momentum(diffs[i]), lambda);
  });
  const auto contour_of = [&](const IntVec& dn) -> const Contour& {
    return contours[index.at(dn)];
  };

  VertexField h{Domain::primal, {}};
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.vertex(v).part != Part::primal) continue;
    const IntVec dn = difference(g.vertex(v).n, ns);
    if (l1_norm(dn) > radius + 1) continue;
    h.values[v] = is_zero(dn) ? Complex(0.0)
                              : contour_integral(contour_of(dn),
                                                 green_integrand(sd, g.vertex(v).n, ns));
  }
  std::vector<int> targets;
  for (const auto& [v, val] : h.values) {
    if (g.is_interior(v) && l1_norm(difference(g.vertex(v).n, ns)) <= radius - 1) {
      targets.push_back(v);
    }
  }
  const VertexField lh = laplacian_apply(g, nu, h, Part::primal, targets);

  std::vector<int> neighbours;
  for (const auto& [x1, f] : g.diagonal_neighbors(source)) neighbours.push_back(x1);
  LhReport report;
  report.rows = {{"diagonal", 0, 0}, {"neighbour", 0, 0}, {"far", 0, 0}};
  for (const auto& [v, val] : lh.values) {
    const int l1 = l1_norm(difference(g.vertex(v).n, ns));
    LhRow& row = v == source ? report.rows[0]
                 : std::find(neighbours.begin(), neighbours.end(), v) != neighbours.end()
                     ? report.rows[1]
                     : report.rows[2];
    row.max_abs = std::max(row.max_abs, std::abs(val));
    ++row.count;
    if (l1 >= 2) report.max_far_l1_ge2 = std::max(report.max_far_l1_ge2, std::abs(val));
  }

  // Contour replacement on each face: every corner integrated over the
  // contour of the lexicographically largest corner difference.
  for (int f = 0; f < g.face_count(); ++f) {
    const Face& face = g.faces()[static_cast<std::size_t>(f)];
    std::array<IntVec, 4> dn;
    bool inside = true;
    for (int c = 0; c < 4; ++c) {
      dn[c] = difference(g.vertex(face[c]).n, ns);
      if (l1_norm(dn[c]) > radius) inside = false;
    }
    if (!inside) continue;
    const IntVec& top = *std::max_element(dn.begin(), dn.end());
    if (is_zero(top)) continue;
    const Contour& common = contour_of(top);
    for (int c = 0; c < 4; ++c) {
      const IntVec& nc = g.vertex(face[c]).n;
      const Complex own = is_zero(dn[c]) ? Complex(0.0)
                                         : contour_integral(contour_of(dn[c]),
                                                            green_integrand(sd, nc, ns));
      const Complex shared = contour_integral(common, green_integrand(sd, nc, ns));
      const double d = std::abs(own - shared);
      double& slot = g.vertex(face[c]).part == Part::primal ? report.replacement.primal_max_dev
                                                            : report.replacement.dual_max_dev;
      slot = std::max(slot, d);
      ++report.replacement.corner_checks;
      if (d > 1e-8) ++report.replacement.mismatches;
    }
    ++report.replacement.faces;
  }
  return report;
}

GrowthReport growth_report(const GreenField& field, const SpectralData& sd) {
  GrowthReport r;
  for (const auto& [v, gv] : field.values) {
    if (v == field.source) continue;
    double e = 0;
    for (int j = 0; j < sd.dimension(); ++j) {
      const int nj = gv.dn[static_cast<std::size_t>(j)];
      if (nj != 0) e += nj * im_quasimomentum(sd, j, field.lambda);
    }
    const GrowthRow row{v, l1_norm(gv.dn), std::abs(gv.value) / std::exp(e)};
    r.max_ratio = std::max(r.max_ratio, row.ratio);
    r.rows.push_back(row);
  }
  return r;
}

double psi_growth_deviation(const SpectralData& sd, const IntVec& n, SpherePoint lambda,
                            double sign) {
  double e = 0;
  for (int j = 0; j < sd.dimension(); ++j) {
    const int nj = n[static_cast<std::size_t>(j)];
    if (nj != 0) e += nj * im_quasimomentum(sd, j, lambda);
  }
  const double expected = std::exp(sign * e);
  return std::abs(std::abs(wave_function(sd, n, lambda)) - expected) / expected;
}

namespace {

nlohmann::json complex_json(Complex c) { return {c.real(), c.imag()}; }

}  // namespace

nlohmann::json to_json(const GreenField& f, const DeltaReport& d) {
  nlohmann::json lambda =
      f.lambda.is_infinite() ? nlohmann::json(nullptr) : complex_json(f.lambda.value());
  return {{"lambda", std::move(lambda)},
          {"source", f.source},
          {"radius", f.radius},
          {"k_xtilde", complex_json(f.k_source)},
          {"gamma0", complex_json(f.gamma0)},
          {"paper_diagonal", complex_json(f.paper_diagonal)},
          {"LG_diagonal", complex_json(d.diagonal)},
          {"max_LG_offdiag", d.max_offdiag},
          {"oracle_max_dev", f.oracle_max_dev}};
}

nlohmann::json to_json(const LhReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const LhRow& row : r.rows) {
    rows.push_back({{"kind", row.kind}, {"max_abs", row.max_abs}, {"count", row.count}});
  }
  return {{"rows", std::move(rows)},
          {"max_LH_l1_ge2", r.max_far_l1_ge2},
          {"replacement",
           {{"faces", r.replacement.faces},
            {"primal_max_dev", r.replacement.primal_max_dev},
            {"dual_max_dev", r.replacement.dual_max_dev},
            {"corner_checks", r.replacement.corner_checks},
            {"mismatches", r.replacement.mismatches}}}};
}

void write_green_csv(std::ostream& os, const GreenField& f, const GrowthReport& growth) {
  std::map<int, double> ratio;
  for (const GrowthRow& r : growth.rows) ratio[r.vertex] = r.ratio;
  const std::size_t d = f.values.empty() ? 0 : f.values.begin()->second.dn.size();
  os << "vertex_id";
  for (std::size_t j = 0; j < d; ++j) os << ",dn" << (j + 1);
  os << ",re,im,method,ratio\n";
  os.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& [v, gv] : f.values) {
    os << v;
    for (int c : gv.dn) os << ',' << c;
    os << ',' << gv.value.real() << ',' << gv.value.imag() << ',' << gv.method << ',';
    if (ratio.count(v)) os << ratio[v];
    os << '\n';
  }
}

}  // namespace fgl
