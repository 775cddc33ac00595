#include <fstream>
#include <random>
#include <sstream>

#include "fgl/cli_io.hpp"
#include "fgl/errors.hpp"

#ifndef FGL_VERSION
#define FGL_VERSION "unknown"
#endif

namespace fgl {

const char* tool_version() { return FGL_VERSION; }

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

json cjson(Complex z) { return {z.real(), z.imag()}; }

struct Context {
  const RunConfig& config;
  fs::path dir;
  std::mt19937_64 rng;
  RunResult result;

  void check(const std::string& name, double value, double tol, bool asserted = true) {
    Check c{name, value, tol, asserted, value <= tol};
    if (asserted && !c.pass) result.pass = false;
    result.checks.push_back(c);
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = dir / name;
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    result.files.push_back(p);
    return out;
  }

  int samples(int fallback) const { return config.samples > 0 ? config.samples : fallback; }
  double tolerance(double fallback) const { return config.tolerance.value_or(fallback); }
};

// A common |alpha_j| when all moduli agree, which enables the reality checks.
std::optional<double> common_modulus(const RunConfig& c) {
  if (c.reality_modulus) return c.reality_modulus;
  const double m0 = std::abs(c.alphas.front());
  for (Complex a : c.alphas) {
    if (std::abs(std::abs(a) - m0) > 1e-12 * m0) return std::nullopt;
  }
  return m0;
}

SpectralData make_spectral(const RunConfig& c) { return SpectralData(c.alphas, common_modulus(c)); }

std::vector<Complex> unit_roots(int d) {
  std::vector<Complex> out;
  for (int j = 0; j < d; ++j) out.push_back(std::polar(1.0, 2 * kPi * j / d));
  return out;
}

QuadGraph make_graph(const RunConfig& c, int dimension) {
  const GraphSource& s = c.graph;
  QuadGraph g = [&] {
    if (s.generator == "square") return build_square_lattice_patch(s.width, s.height);
    if (s.generator == "multigrid") {
      std::vector<double> offsets = s.offsets;
      if (offsets.empty()) {
        for (int j = 0; j < s.directions; ++j) offsets.push_back(0.1 + 0.13 * j);
      }
      return build_multigrid_quadgraph(unit_roots(s.directions), offsets, s.radius);
    }
    std::ifstream in(s.file);
    if (!in) throw IoError("cannot read graph file " + s.file);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw GraphFormatError(e.what());
    }
    return quadgraph_from_json(j);
  }();
  if (g.dimension() != dimension) {
    throw ConfigError("graph has " + std::to_string(g.dimension()) + " directions but " +
                      std::to_string(dimension) + " alphas are given");
  }
  return g;
}

bool near_special(const SpectralData& sd, Complex z, double eps) {
  if (std::abs(z) < eps) return true;
  for (Complex a : sd.alphas()) {
    if (std::abs(z - a) < eps || std::abs(z + a) < eps) return true;
  }
  return false;
}

Complex draw_point(Context& ctx, const SpectralData& sd, double box) {
  std::uniform_real_distribution<double> u(-box, box);
  for (;;) {
    const Complex z(u(ctx.rng), u(ctx.rng));
    if (!near_special(sd, z, 1e-3 * sd.max_modulus())) return z;
  }
}

// Calls body(index, lambda) for the configured lambda samples. Random draws
// that hit a singular level are replaced; explicit points are not.
template <class F>
void for_each_lambda(Context& ctx, const SpectralData& sd, F body) {
  const RunConfig& c = ctx.config;
  if (!c.lambdas.empty()) {
    for (std::size_t i = 0; i < c.lambdas.size(); ++i) body(static_cast<int>(i), c.lambdas[i]);
    return;
  }
  int done = 0;
  int rejected = 0;
  while (done < c.lambda_count) {
    const Complex lambda = draw_point(ctx, sd, c.lambda_box * sd.max_modulus());
    try {
      body(done, lambda);
      ++done;
    } catch (const SaddleLevel&) {
      if (++rejected > 20 * c.lambda_count) throw;
    }
  }
}

int pick_source(const RunConfig& c, const QuadGraph& g) {
  if (c.source) {
    const auto v = g.find_vertex(*c.source);
    if (!v) throw ConfigError("green.source: no vertex with these coordinates");
    if (g.vertex(*v).part != Part::primal || !g.is_interior(*v)) {
      throw ConfigError("green.source: vertex must be primal and interior");
    }
    return *v;
  }
  // Interior primal vertex closest to the coordinate centroid.
  std::vector<double> mean(static_cast<std::size_t>(g.dimension()), 0.0);
  for (const Vertex& v : g.vertices()) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += v.n[j];
  }
  for (double& m : mean) m /= g.vertex_count();
  int best = -1;
  double best_d = 0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.vertex(v).part != Part::primal || !g.is_interior(v)) continue;
    double d = 0;
    for (std::size_t j = 0; j < mean.size(); ++j) d += std::pow(g.vertex(v).n[j] - mean[j], 2);
    if (best < 0 || d < best_d - 1e-12) {
      best = v;
      best_d = d;
    }
  }
  if (best < 0) throw ConfigError("graph has no interior primal vertex");
  return best;
}

MomentumVector draw_momentum(Context& ctx, int d, std::optional<int> only) {
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution sign;
  MomentumVector k(static_cast<std::size_t>(d), 0.0);
  for (int j = 0; j < d; ++j) {
    const double v = (sign(ctx.rng) ? 1.0 : -1.0) * mag(ctx.rng);
    if (!only || *only == j) k[static_cast<std::size_t>(j)] = v;
  }
  return k;
}

// Windings of 0 and infinity against the first reference point that is
// safely off the contour.
std::pair<int, int> zero_infinity_windings(const Contour& c, double scale) {
  const std::vector<SpherePoint> pts{Complex(0.0), SpherePoint::infinity()};
  for (Complex ref : {Complex(0.37, 1.91), Complex(-1.3, 0.77), Complex(0.9, -1.6),
                      Complex(2.2, 0.3), Complex(-0.6, -2.4)}) {
    try {
      const auto w = winding_numbers(c, pts, ref * scale);
      return {w[0], w[1]};
    } catch (const PointOnContour&) {
    }
  }
  throw PointOnContour("no usable reference point for the windings of 0 and infinity");
}

// max distance of the nodes from the Apollonius circle |z - a| = s |z + a|,
// in cells of each node's chart.
double apollonius_cells(const SpectralData& sd, const Contour& c, int j) {
  const double kj = c.k[static_cast<std::size_t>(j)];
  const double s = std::exp(c.level / kj);
  double worst = 0;
  for (const Polyline& p : c.components) {
    for (const ContourNode& n : p.nodes) {
      const Complex a = n.chart == Chart::z ? sd.alpha(j) : 1.0 / sd.alpha(j);
      const Complex centre = a * (1 + s * s) / (1 - s * s);
      const double radius = 2 * s * std::abs(a) / std::abs(1 - s * s);
      const double cell = n.chart == Chart::z ? c.cell_z : c.cell_w;
      worst = std::max(worst, std::abs(std::abs(n.value - centre) - radius) / cell);
    }
  }
  return worst;
}

const ChartDensity kOmega{[](Complex z) { return -1.0 / (2.0 * z); },
                          [](Complex w) { return 1.0 / (2.0 * w); }};

void run_weights(Context& ctx) {
  const SpectralData sd = make_spectral(ctx.config);
  const QuadGraph g = make_graph(ctx.config, sd.dimension());
  const WeightFunction nu = build_weights(sd, g);
  const bool equal_moduli = common_modulus(ctx.config).has_value();
  ctx.check("max_abs_imag_nu", nu.max_abs_imag(), ctx.tolerance(1e-12), equal_moduli);
  ctx.check("max_duality_defect", nu.max_duality_defect(), 1e-12);
  std::ofstream out = ctx.open("weights.csv");
  out.precision(17);
  out << "face,p1p4_re,p1p4_im,p2p3_re,p2p3_im\n";
  for (int f = 0; f < g.face_count(); ++f) {
    const FaceWeights& w = nu.face(f);
    out << f << ',' << w.p1p4.real() << ',' << w.p1p4.imag() << ',' << w.p2p3.real() << ','
        << w.p2p3.imag() << '\n';
  }
  const WeightConvention& cv = sd.convention();
  ctx.result.summary["results"] = {
      {"faces", g.face_count()},
      {"vertices", g.vertex_count()},
      {"equal_moduli", equal_moduli},
      {"convention",
       {{"ratio_on_p1p4", cv.ratio_on_p1p4}, {"weight_sign", cv.weight_sign}, {"a1_sign", cv.a1_sign}}}};
}

void run_psi_check(Context& ctx) {
  const SpectralData sd = make_spectral(ctx.config);
  const QuadGraph g = make_graph(ctx.config, sd.dimension());
  const WeightFunction nu = build_weights(sd, g);
  const int samples = ctx.samples(50);
  std::vector<FaceFrame> frames;
  std::vector<FourPointCoefficients> coeffs;
  for (int f = 0; f < g.face_count(); ++f) {
    frames.push_back(face_frame(g, f));
    coeffs.push_back(four_point_coefficients(sd, frames.back()));
  }
  std::vector<double> face_cr(frames.size(), 0.0);
  std::vector<double> face_fp(frames.size(), 0.0);
  double tau_dev = 0;
  double harm = 0;
  for (int t = 0; t < samples; ++t) {
    const Complex z = draw_point(ctx, sd, 2 * sd.max_modulus());
    const VertexField psi = sample_wave_function(sd, g, z, Domain::quad);
    const std::vector<Complex> cr = cauchy_riemann_residual(g, nu, psi);
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const Face& face = g.faces()[f];
      double scale = 0;
      for (int v : face) scale = std::max(scale, std::abs(psi.values.at(v)));
      face_cr[f] = std::max(face_cr[f], std::abs(cr[f]) / scale);
      const FaceFrame& fr = frames[f];
      const FourPointCoefficients& c = coeffs[f];
      const Complex r = psi.values.at(fr.p4) + c.a1 * psi.values.at(fr.p2) +
                        c.a2 * psi.values.at(fr.p3) + c.a3 * psi.values.at(fr.p1);
      face_fp[f] = std::max(face_fp[f], std::abs(r) / scale);
    }
    if (sd.reality_modulus()) {
      const SpherePoint tz = sd.tau(z);
      for (const auto& [v, value] : psi.values) {
        const IntVec& n = g.vertex(v).n;
        const double sign = coordinate_sum(n) % 2 == 0 ? 1.0 : -1.0;
        const Complex m = wave_function(sd, n, tz);
        tau_dev = std::max(tau_dev, std::abs(m - sign * std::conj(value)) / std::abs(value));
      }
    }
    if (t < 20) {
      for (Part part : {Part::primal, Part::dual}) {
        harm = std::max(harm, harmonicity_report(g, nu, psi, part).max_relative);
      }
    }
  }
  int origin_mismatch = 0;
  for (const Vertex& v : g.vertices()) {
    const double expected = coordinate_sum(v.n) % 2 == 0 ? 1.0 : -1.0;
    if (wave_function(sd, v.n, Complex(0.0)) != Complex(expected)) ++origin_mismatch;
  }
  const double tol = ctx.tolerance(1e-10);
  ctx.check("max_cr_residual", *std::max_element(face_cr.begin(), face_cr.end()), tol);
  ctx.check("max_four_point_residual", *std::max_element(face_fp.begin(), face_fp.end()), tol);
  ctx.check("origin_sign_mismatches", origin_mismatch, 0);
  ctx.check("max_harmonicity_relative", harm, tol);
  if (sd.reality_modulus()) ctx.check("max_tau_symmetry_relative", tau_dev, 1e-12);

  std::ofstream out = ctx.open("psi_faces.csv");
  out.precision(17);
  out << "face,max_cr,max_four_point\n";
  for (std::size_t f = 0; f < frames.size(); ++f) out << f << ',' << face_cr[f] << ',' << face_fp[f] << '\n';
  ctx.result.summary["results"] = {{"faces", g.face_count()}, {"samples", samples}};
}

void run_contours(Context& ctx) {
  const SpectralData sd = make_spectral(ctx.config);
  const LevelSetTracer tracer(sd, ctx.config.resolution);
  const int d = sd.dimension();
  const int samples = ctx.samples(20);
  std::uniform_int_distribution<int> pick(0, d - 1);
  std::uniform_real_distribution<double> u(-ctx.config.lambda_box, ctx.config.lambda_box);

  PlotArtifacts plots;
  json rows = json::array();
  double worst_level = 0;
  double worst_apollonius = 0;
  double worst_omega = 0;
  int winding_mismatch = 0;
  int violations = 0;
  int rejected = 0;
  int grazing = 0;
  while (static_cast<int>(plots.contours.size()) < samples) {
    const int i = static_cast<int>(plots.contours.size());
    const std::optional<int> only = i % 4 == 0 ? std::optional<int>(pick(ctx.rng)) : std::nullopt;
    const MomentumVector k = draw_momentum(ctx, d, only);
    const Complex lambda = draw_point(ctx, sd, ctx.config.lambda_box * sd.max_modulus());
    Contour c;
    try {
      c = tracer.trace(k, lambda);
    } catch (const SaddleLevel&) {
      if (++rejected > 20 * samples) throw;
      continue;
    }
    std::pair<int, int> w0inf;
    try {
      w0inf = zero_infinity_windings(c, sd.max_modulus());
    } catch (const PointOnContour&) {
      // The contour grazes 0; the winding is not resolvable at this resolution.
      if (++grazing > 20 * samples) throw;
      continue;
    }
    const auto [w0, winf] = w0inf;
    const double level = level_accuracy_cells(sd, c);
    const double omega = std::abs(contour_integral(c, kOmega));
    json row{{"k", k},
             {"lambda", cjson(lambda)},
             {"level", c.level},
             {"level_cells", level},
             {"omega_integral_abs", omega},
             {"winding_0", w0},
             {"winding_inf", winf},
             {"orientation_violations", c.orientation_violations},
             {"nodes", c.node_count()}};
    if (only) {
      const double ap = apollonius_cells(sd, c, *only);
      worst_apollonius = std::max(worst_apollonius, ap);
      row["apollonius_cells"] = ap;
    }
    worst_level = std::max(worst_level, level);
    worst_omega = std::max(worst_omega, omega);
    if (w0 != winf) ++winding_mismatch;
    violations += c.orientation_violations;
    rows.push_back(std::move(row));
    plots.contours.push_back(std::move(c));
  }

  // Homology of C_k and C_k' when k_j k'_j > 0 on J: windings around +-alpha_j,
  // j in J, agree up to a common constant.
  std::uniform_int_distribution<int> mask_dist(1, (1 << d) - 1);
  std::bernoulli_distribution coin;
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  int homology_mismatch = 0;
  json triples = json::array();
  for (int t = 0; t < 10;) {
    const int mask = mask_dist(ctx.rng);
    MomentumVector k(static_cast<std::size_t>(d));
    MomentumVector k2(static_cast<std::size_t>(d));
    std::vector<SpherePoint> pts;
    for (int j = 0; j < d; ++j) {
      const double s = coin(ctx.rng) ? 1.0 : -1.0;
      k[static_cast<std::size_t>(j)] = s * mag(ctx.rng);
      const double s2 = (mask >> j & 1) ? s : (coin(ctx.rng) ? 1.0 : -1.0);
      k2[static_cast<std::size_t>(j)] = s2 * mag(ctx.rng);
      if (mask >> j & 1) {
        pts.emplace_back(sd.alpha(j));
        pts.emplace_back(-sd.alpha(j));
      }
    }
    const Complex lambda = draw_point(ctx, sd, ctx.config.lambda_box * sd.max_modulus());
    std::vector<int> wa;
    std::vector<int> wb;
    try {
      wa = winding_numbers(tracer.trace(k, lambda), pts);
      wb = winding_numbers(tracer.trace(k2, lambda), pts);
    } catch (const SaddleLevel&) {
      if (++rejected > 20 * samples) throw;
      continue;
    } catch (const PointOnContour&) {
      if (++grazing > 20 * samples) throw;
      continue;
    }
    bool same = true;
    for (std::size_t p = 1; p < pts.size(); ++p) {
      if (wa[p] - wa[0] != wb[p] - wb[0]) same = false;
    }
    if (!same) ++homology_mismatch;
    triples.push_back({{"k", k}, {"k_prime", k2}, {"J_mask", mask}, {"windings", wa},
                       {"windings_prime", wb}, {"agree", same}});
    ++t;
  }

  ctx.check("max_level_cells", worst_level, 2.0);
  ctx.check("max_apollonius_cells", worst_apollonius, 2.0);
  ctx.check("max_omega_integral", worst_omega, ctx.tolerance(1e-6));
  ctx.check("winding_0_inf_mismatches", winding_mismatch, 0);
  ctx.check("orientation_violations", violations, 0);
  ctx.check("homology_winding_mismatches", homology_mismatch, 0);

  json all = json::array();
  for (const Contour& c : plots.contours) all.push_back(to_json(c));
  ctx.open("contours.json") << all.dump() << '\n';
  for (const fs::path& p : emit_plots(plots, ctx.dir)) ctx.result.files.push_back(p);
  ctx.result.summary["results"] = {{"contours", std::move(rows)},
                                   {"homology", std::move(triples)},
                                   {"saddle_rejections", rejected},
                                   {"grazing_rejections", grazing}};
}

void run_green(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const SpectralData sd = make_spectral(cfg);
  const QuadGraph g = make_graph(cfg, sd.dimension());
  const WeightFunction nu = build_weights(sd, g);
  const int source = pick_source(cfg, g);
  const LevelSetTracer tracer(sd, cfg.resolution);
  const int half = std::max(16, cfg.resolution / 2 + (cfg.resolution / 2) % 2);
  const LevelSetTracer coarse(sd, half);

  double max_offdiag = 0;
  double diag_dev = 0;
  double oracle_dev = 0;
  double stability = 0;
  PlotArtifacts plots;
  json per_lambda = json::array();
  for_each_lambda(ctx, sd, [&](int i, Complex lambda) {
    const GreenField f = green_field(tracer, g, nu, source, lambda, cfg.patch_radius);
    const GreenField fc = green_field(coarse, g, nu, source, lambda, cfg.patch_radius, false);
    const DeltaReport d = delta_report(g, nu, f);
    const GrowthReport gr = growth_report(f, sd);
    double stab = 0;
    for (const auto& [v, gv] : f.values) stab = std::max(stab, std::abs(gv.value - fc.values.at(v).value));

    max_offdiag = std::max(max_offdiag, d.max_offdiag);
    diag_dev = std::max(diag_dev, std::abs(d.diagonal - 1.0));
    oracle_dev = std::max(oracle_dev, f.oracle_max_dev);
    stability = std::max(stability, stab);

    std::map<int, DecayRow> decay;
    for (const GrowthRow& r : gr.rows) {
      DecayRow& row = decay[r.l1];
      row.series = i;
      row.l1 = r.l1;
      row.max_abs_g = std::max(row.max_abs_g, std::abs(f.values.at(r.vertex).value));
      row.max_ratio = std::max(row.max_ratio, r.ratio);
    }
    for (const auto& [l1, row] : decay) plots.decay.push_back(row);

    json neighbours = json::array();
    for (const auto& [x1, face] : g.diagonal_neighbors(source)) {
      neighbours.push_back({{"vertex", x1}, {"LG", cjson(d.lg.at(x1))}});
    }
    json s = to_json(f, d);
    s["minus_inv_k"] = cjson(-1.0 / f.k_source);
    s["resolution_stability"] = stab;
    s["neighbour_LG"] = std::move(neighbours);
    s["growth_max_ratio"] = gr.max_ratio;
    per_lambda.push_back(std::move(s));
    std::ofstream out = ctx.open(i == 0 ? "green.csv" : "green_" + std::to_string(i) + ".csv");
    write_green_csv(out, f, gr);
  });
  ctx.check("max_LG_offdiag", max_offdiag, ctx.tolerance(1e-6));
  ctx.check("max_LG_diagonal_deviation", diag_dev, 1e-12);
  ctx.check("oracle_max_dev", oracle_dev, 1e-8);
  ctx.check("resolution_stability", stability, 1e-7);
  for (const fs::path& p : emit_plots(plots, ctx.dir)) ctx.result.files.push_back(p);
  ctx.result.summary["results"] = {{"source", source},
                                   {"source_n", g.vertex(source).n},
                                   {"lambdas", std::move(per_lambda)}};
}

void run_verify_lh(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const SpectralData sd = make_spectral(cfg);
  const QuadGraph g = make_graph(cfg, sd.dimension());
  const WeightFunction nu = build_weights(sd, g);
  const int source = pick_source(cfg, g);
  const LevelSetTracer tracer(sd, cfg.resolution);
  double far = 0;
  double primal = 0;
  double dual = 0;
  json per_lambda = json::array();
  for_each_lambda(ctx, sd, [&](int, Complex lambda) {
    const LhReport r = verify_lh_zero(tracer, g, nu, source, lambda, cfg.patch_radius);
    far = std::max(far, r.max_far_l1_ge2);
    primal = std::max(primal, r.replacement.primal_max_dev);
    dual = std::max(dual, r.replacement.dual_max_dev);
    json s = to_json(r);
    s["lambda"] = cjson(lambda);
    per_lambda.push_back(std::move(s));
  });
  ctx.check("max_LH_l1_ge2", far, ctx.tolerance(1e-6));
  ctx.check("replacement_primal_max_dev", primal, 1e-8, false);
  ctx.check("replacement_dual_max_dev", dual, 1e-8, false);
  ctx.open("lh.json") << per_lambda.dump(2) << '\n';
  ctx.result.summary["results"] = {{"source", source}, {"lambdas", std::move(per_lambda)}};
}

void run_growth(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const SpectralData sd = make_spectral(cfg);
  const int d = sd.dimension();
  const int samples = ctx.samples(100);
  std::uniform_int_distribution<int> coord(-12, 12);
  double literal = 0;
  double corrected = 0;
  for (int t = 0; t < samples;) {
    IntVec n(static_cast<std::size_t>(d));
    for (int& x : n) x = coord(ctx.rng);
    if (l1_norm(n) > 12) continue;
    const Complex lambda = draw_point(ctx, sd, cfg.lambda_box * sd.max_modulus());
    literal = std::max(literal, psi_growth_deviation(sd, n, lambda, +1.0));
    corrected = std::max(corrected, psi_growth_deviation(sd, n, lambda, -1.0));
    ++t;
  }
  ctx.check("psi_growth_printed_sign", literal, ctx.tolerance(1e-12));
  ctx.check("psi_growth_opposite_sign", corrected, 1e-12, false);

  // |G| against exp<dn, Im p(lambda)> out to |dn|_1 = 6.
  const QuadGraph g = make_graph(cfg, d);
  const WeightFunction nu = build_weights(sd, g);
  const int source = pick_source(cfg, g);
  const LevelSetTracer tracer(sd, cfg.resolution);
  PlotArtifacts plots;
  double bound = 0;
  bool blow_up = false;
  json per_lambda = json::array();
  for_each_lambda(ctx, sd, [&](int i, Complex lambda) {
    const GreenField f = green_field(tracer, g, nu, source, lambda, std::max(cfg.patch_radius, 5), false);
    const GrowthReport gr = growth_report(f, sd);
    std::map<int, DecayRow> decay;
    for (const GrowthRow& r : gr.rows) {
      if (r.l1 > 6) continue;
      DecayRow& row = decay[r.l1];
      row.series = i;
      row.l1 = r.l1;
      row.max_abs_g = std::max(row.max_abs_g, std::abs(f.values.at(r.vertex).value));
      row.max_ratio = std::max(row.max_ratio, r.ratio);
    }
    // Blow-up: the per-shell maximum ratio increases at every step and by
    // more than 1e3 overall.
    std::vector<double> seq;
    for (const auto& [l1, row] : decay) {
      seq.push_back(row.max_ratio);
      plots.decay.push_back(row);
      bound = std::max(bound, row.max_ratio);
    }
    bool increasing = seq.size() > 1;
    for (std::size_t s = 1; s < seq.size(); ++s) increasing = increasing && seq[s] > seq[s - 1];
    const bool this_blow_up = increasing && seq.back() > 1e3 * std::max(seq.front(), 1e-300);
    blow_up = blow_up || this_blow_up;
    per_lambda.push_back({{"lambda", cjson(lambda)}, {"shell_max_ratio", seq}, {"blow_up", this_blow_up}});
  });
  ctx.check("G_monotone_blow_up", blow_up ? 1 : 0, 0);
  ctx.check("G_ratio_bound", bound, std::numeric_limits<double>::infinity(), false);
  for (const fs::path& p : emit_plots(plots, ctx.dir)) ctx.result.files.push_back(p);
  ctx.result.summary["results"] = {{"samples", samples},
                                   {"ratio_bound", bound},
                                   {"lambdas", std::move(per_lambda)}};
}

void run_theta_check(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const int samples = ctx.samples(50);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const auto random_b = [&](int g) {
    Eigen::MatrixXd a(g, g);
    Eigen::MatrixXd x(g, g);
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        a(i, j) = u(ctx.rng);
        x(i, j) = u(ctx.rng);
      }
    }
    CMatrix b(g, g);
    b.real() = 0.5 * (x + x.transpose());
    b.imag() = a * a.transpose() + 0.6 * Eigen::MatrixXd::Identity(g, g);
    return PeriodMatrix(b);
  };
  double quasi = 0;
  for (int t = 0; t < samples; ++t) {
    const int g = 1 + t % cfg.theta_genus;
    const PeriodMatrix b = random_b(g);
    CVector z(g);
    for (int i = 0; i < g; ++i) z(i) = Complex(u(ctx.rng), u(ctx.rng));
    const Complex base = theta(z, b);
    for (int k = 0; k < g; ++k) {
      const CVector e = CVector::Unit(g, k);
      quasi = std::max(quasi, std::abs(theta(z + e, b) - base) / std::abs(base));
      const Complex factor = std::exp(-kI * kPi * b.matrix()(k, k) - 2.0 * kPi * kI * z(k));
      quasi = std::max(quasi, std::abs(theta(z + b.matrix() * e, b) - factor * base) /
                                  std::abs(factor * base));
    }
  }
  const double half_period =
      std::abs(theta(CVector::Constant(1, Complex(0.5, 0.5)), PeriodMatrix(kI * CMatrix::Identity(1, 1))));

  const SpectralData sd = cfg.alphas.empty()
                              ? SpectralData({1.0, std::polar(1.0, 0.9), std::polar(1.3, 2.1)})
                              : make_spectral(cfg);
  std::uniform_int_distribution<int> coord(-4, 4);
  double degeneration = 0;
  for (int t = 0; t < samples; ++t) {
    IntVec n(static_cast<std::size_t>(sd.dimension()));
    for (int& x : n) x = coord(ctx.rng);
    const Complex z = draw_point(ctx, sd, 2 * sd.max_modulus());
    const Complex psi = wave_function(sd, n, z);
    degeneration = std::max(degeneration,
                            std::abs(wave_function_theta(genus0_formula_data(sd, z), n) - psi) / std::abs(psi));
  }
  ctx.check("max_quasi_periodicity_relative", quasi, ctx.tolerance(1e-9));
  ctx.check("odd_half_period_abs", half_period, 1e-12);
  ctx.check("max_genus0_degeneration_relative", degeneration, 1e-10);

  json results{{"samples", samples}};
  if (!cfg.theta_file.empty()) {
    std::ifstream in(cfg.theta_file);
    if (!in) throw IoError("cannot read theta data " + cfg.theta_file);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("theta.file: ") + e.what());
    }
    const ThetaFormulaData data = theta_data_from_json(j);
    std::ofstream out = ctx.open("theta_values.csv");
    out.precision(17);
    out << "n,re,im\n";
    IntVec n(static_cast<std::size_t>(data.dimension()), -1);
    for (;;) {
      const Complex v = wave_function_theta(data, n);
      for (std::size_t i = 0; i < n.size(); ++i) out << (i ? " " : "") << n[i];
      out << ',' << v.real() << ',' << v.imag() << '\n';
      std::size_t i = 0;
      while (i < n.size() && n[i] == 1) n[i++] = -1;
      if (i == n.size()) break;
      ++n[i];
    }
    results["theta_file_genus"] = data.genus();
  }
  ctx.result.summary["results"] = std::move(results);
}

}  // namespace

std::string summary_text(const json& summary) { return summary.dump(2) + "\n"; }

RunResult run(const RunConfig& c) {
  validate_config(c);
  Context ctx{c, fs::path(c.output_dir), std::mt19937_64(c.seed), {}};
  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec) throw IoError("cannot create " + ctx.dir.string() + ": " + ec.message());
  ctx.result.summary = {{"tool", kToolName},
                        {"version", tool_version()},
                        {"experiment", c.experiment},
                        {"seed", c.seed},
                        {"config_hash", config_hash(c)},
                        {"config", to_json(c)}};
  try {
    if (c.experiment == "weights") run_weights(ctx);
    else if (c.experiment == "psi-check") run_psi_check(ctx);
    else if (c.experiment == "contours") run_contours(ctx);
    else if (c.experiment == "green") run_green(ctx);
    else if (c.experiment == "verify-lh") run_verify_lh(ctx);
    else if (c.experiment == "growth") run_growth(ctx);
    else run_theta_check(ctx);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error(c.experiment + ": " + e.what());
  }
  json checks = json::array();
  for (const Check& k : ctx.result.checks) {
    checks.push_back({{"name", k.name},
                      {"value", k.value},
                      {"tolerance", std::isfinite(k.tolerance) ? json(k.tolerance) : json(nullptr)},
                      {"asserted", k.asserted},
                      {"pass", k.pass}});
  }
  ctx.result.summary["checks"] = std::move(checks);
  ctx.result.summary["pass"] = ctx.result.pass;
  std::ofstream out = ctx.open("summary.json");
  out << summary_text(ctx.result.summary);
  if (!out) throw IoError("failed writing summary.json");
  return std::move(ctx.result);
}

}  // namespace fgl
