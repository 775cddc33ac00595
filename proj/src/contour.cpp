#include "fgl/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fgl/errors.hpp"

namespace fgl {

namespace {

// |ln| beyond this only happens within e^-700 of a pole; the sign is all
// the extraction needs there.
constexpr double kFieldClamp = 700.0;
constexpr int kSaddleRing = 16;
constexpr double kSaddleCells = 3.0;
constexpr double kStitchCells = 3.0;
constexpr int kPoleLoopNodes = 64;
constexpr int kQuadratureDepth = 12;
constexpr double kQuadratureTolerance = 1e-10;

double clamp_log(double num, double den) {
  if (num == 0) return -kFieldClamp;
  if (den == 0) return kFieldClamp;
  return std::clamp(std::log(num / den), -kFieldClamp, kFieldClamp);
}

using EdgeId = std::int64_t;

struct Adjacency {
  std::array<EdgeId, 2> next{-1, -1};
  int degree = 0;
};

// Crossing of a straight segment a -> b with the circle |p| = r.
Complex circle_crossing(Complex a, Complex b, double r) {
  const Complex d = b - a;
  const double qa = std::norm(d);
  const double qb = 2 * std::real(a * std::conj(d));
  const double qc = std::norm(a) - r * r;
  const double disc = std::max(0.0, qb * qb - 4 * qa * qc);
  const double s = std::sqrt(disc);
  double best = 0.5;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double t : {(-qb - s) / (2 * qa), (-qb + s) / (2 * qa)}) {
    const double gap = t < 0 ? -t : (t > 1 ? t - 1 : 0);
    if (gap < best_gap) {
      best_gap = gap;
      best = std::clamp(t, 0.0, 1.0);
    }
  }
  return a + best * d;
}

Complex chart_to_z(const ContourNode& n) {
  return n.chart == Chart::z ? n.value : 1.0 / n.value;
}

// (z - p)/(z - q) at a node, with either point possibly infinite.
Complex winding_ratio(const ContourNode& node, SpherePoint p, SpherePoint q) {
  const Complex v = node.value;
  if (!q.is_infinite() && !p.is_infinite()) {
    const Complex P = p.value();
    const Complex Q = q.value();
    return node.chart == Chart::z ? (v - P) / (v - Q) : (1.0 - P * v) / (1.0 - Q * v);
  }
  if (q.is_infinite()) {
    const Complex P = p.value();
    return node.chart == Chart::z ? v - P : (1.0 - P * v) / v;
  }
  const Complex Q = q.value();
  return node.chart == Chart::z ? 1.0 / (v - Q) : v / (1.0 - Q * v);
}

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

template <class F>
Complex adaptive_gk(const F& g, double lo, double hi, int depth) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0;
  double l1 = 0;
  const Complex estimate = gauss_kronrod<double, 15>::integrate(g, lo, hi, 0, 0.0, &err, &l1);
  if (depth == 0 || err <= kQuadratureTolerance * l1) return estimate;
  const double mid = 0.5 * (lo + hi);
  return adaptive_gk(g, lo, mid, depth - 1) + adaptive_gk(g, mid, hi, depth - 1);
}

}  // namespace

SpherePoint ContourNode::point() const {
  if (chart == Chart::w && value == Complex(0.0)) return SpherePoint::infinity();
  return chart_to_z(*this);
}

Complex ContourNode::z() const {
  if (chart == Chart::w && value == Complex(0.0)) {
    throw PointOnContour("node at infinity has no finite coordinate");
  }
  return chart_to_z(*this);
}

std::size_t Contour::node_count() const {
  std::size_t n = 0;
  for (const Polyline& p : components) n += p.nodes.size();
  return n;
}

Contour Contour::reversed() const {
  Contour r = *this;
  for (Polyline& p : r.components) std::reverse(p.nodes.begin(), p.nodes.end());
  return r;
}

LevelSetTracer::LevelSetTracer(const SpectralData& sd, int resolution)
    : sd_(sd), n_(resolution) {
  if (resolution < 16 || resolution % 2 != 0) {
    throw ResolutionTooCoarse("resolution must be an even number >= 16");
  }
  rho_ = 1.5 * sd_.max_modulus();
  z_grid_.half_width = 1.1 * rho_;
  w_grid_.half_width = 1.1 / rho_;
  for (Grid* grid : {&z_grid_, &w_grid_}) {
    const bool is_z = grid == &z_grid_;
    grid->h = 2 * grid->half_width / n_;
    const std::size_t side = static_cast<std::size_t>(n_ + 1);
    for (int j = 0; j < sd_.dimension(); ++j) {
      const Complex a = sd_.alpha(j);
      std::vector<double> field(side * side);
      for (std::size_t r = 0; r < side; ++r) {
        const double y = grid->half_width * (2.0 * static_cast<double>(r) / n_ - 1.0);
        for (std::size_t i = 0; i < side; ++i) {
          const double x = grid->half_width * (2.0 * static_cast<double>(i) / n_ - 1.0);
          const Complex p(x, y);
          field[r * side + i] = is_z ? clamp_log(std::abs(p - a), std::abs(p + a))
                                     : clamp_log(std::abs(1.0 - a * p), std::abs(1.0 + a * p));
        }
      }
      grid->fields.push_back(std::move(field));
    }
  }
  h_z_ = z_grid_.h;
  h_w_ = w_grid_.h;
}

void LevelSetTracer::check_saddle(std::span<const double> k, double level) const {
  for (const SpherePoint& s : critical_points(sd_, k)) {
    const double cs = im_p_combo(sd_, k, s);
    const bool in_z = !s.is_infinite() && std::abs(s.value()) <= rho_;
    const Complex centre = in_z ? s.value() : (s.is_infinite() ? Complex(0.0) : 1.0 / s.value());
    const double radius = kSaddleCells * (in_z ? h_z_ : h_w_);
    double spread = 0;
    for (int t = 0; t < kSaddleRing; ++t) {
      const Complex p = centre + std::polar(radius, 2 * kPi * t / kSaddleRing);
      const SpherePoint sp = in_z ? SpherePoint(p) : SpherePoint(1.0 / p);
      spread = std::max(spread, std::abs(im_p_combo(sd_, k, sp) - cs));
    }
    if (std::abs(level - cs) <= spread) {
      throw SaddleLevel("level " + std::to_string(level) + " is within " +
                        std::to_string(kSaddleCells) + " cells of the critical value " +
                        std::to_string(cs));
    }
  }
}

void LevelSetTracer::resolve_pole_loops(std::span<const double> k, double level,
                                        std::vector<Polyline>& components) const {
  // Near a pole of p_k the level set is a small loop of radius about
  // exp(-|c - rest| / |k_j|), which can fall between grid nodes. Such loops
  // are rebuilt by root-finding along rays, replacing any crude grid loop.
  const double reach = 2 * h_z_;
  for (int j = 0; j < sd_.dimension(); ++j) {
    const double kj = k[static_cast<std::size_t>(j)];
    if (kj == 0) continue;
    for (const double side : {1.0, -1.0}) {
      const Complex pole = side * sd_.alpha(j);
      // Im p_k -> -inf at the pole when side * k_j > 0.
      const bool sink = side * kj > 0;
      const auto beyond = [&](Complex p) {
        const double v = im_p_combo(sd_, k, p);
        return sink ? v > level : v < level;
      };
      std::vector<Complex> loop;
      bool small = true;
      for (int t = 0; t < kPoleLoopNodes && small; ++t) {
        const Complex dir = std::polar(1.0, 2 * kPi * t / kPoleLoopNodes);
        if (!beyond(pole + reach * dir)) {
          small = false;
          break;
        }
        double lo = std::log(1e-12 * std::abs(pole));
        double hi = std::log(reach);
        if (beyond(pole + std::exp(lo) * dir)) {
          throw ResolutionTooCoarse("level loop around a pole is below floating-point resolution");
        }
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (lo + hi);
          (beyond(pole + std::exp(mid) * dir) ? hi : lo) = mid;
        }
        loop.push_back(pole + std::exp(0.5 * (lo + hi)) * dir);
      }
      if (!small) continue;
      std::erase_if(components, [&](const Polyline& p) {
        return std::all_of(p.nodes.begin(), p.nodes.end(), [&](const ContourNode& n) {
          return n.chart == Chart::z && std::abs(n.value - pole) <= 1.5 * reach;
        });
      });
      Polyline poly;
      for (Complex c : loop) poly.nodes.push_back({c, Chart::z});
      components.push_back(std::move(poly));
    }
  }
}

std::vector<std::vector<Complex>> LevelSetTracer::chart_runs(
    const Grid& grid, Chart chart, std::span<const double> k, double level,
    std::vector<std::vector<Complex>>& closed) const {
  const int n = n_;
  const std::size_t side = static_cast<std::size_t>(n + 1);
  std::vector<double> v(side * side, 0.0);
  for (int j = 0; j < sd_.dimension(); ++j) {
    const double kj = k[static_cast<std::size_t>(j)];
    if (kj == 0) continue;
    const std::vector<double>& f = grid.fields[static_cast<std::size_t>(j)];
    for (std::size_t idx = 0; idx < v.size(); ++idx) v[idx] += kj * f[idx];
  }
  const auto at = [&](int i, int r) { return v[static_cast<std::size_t>(r) * side + static_cast<std::size_t>(i)]; };
  const auto coord = [&](int i) { return grid.half_width * (2.0 * i / n - 1.0); };
  const auto above = [&](int i, int r) { return at(i, r) >= level; };
  // Horizontal edge (i, r)-(i+1, r) and vertical edge (i, r)-(i, r+1).
  const auto h_edge = [&](int i, int r) { return 2 * (static_cast<EdgeId>(r) * static_cast<EdgeId>(side) + i); };
  const auto v_edge = [&](int i, int r) { return h_edge(i, r) + 1; };
  const auto edge_point = [&](EdgeId e) {
    const EdgeId base = e / 2;
    const int r = static_cast<int>(base / static_cast<EdgeId>(side));
    const int i = static_cast<int>(base % static_cast<EdgeId>(side));
    const bool vertical = (e % 2) != 0;
    const double va = at(i, r);
    const double vb = vertical ? at(i, r + 1) : at(i + 1, r);
    const double t = std::clamp((level - va) / (vb - va), 0.0, 1.0);
    return vertical ? Complex(coord(i), coord(r) + t * grid.h)
                    : Complex(coord(i) + t * grid.h, coord(r));
  };

  std::unordered_map<EdgeId, Adjacency> adj;
  const auto link = [&](EdgeId a, EdgeId b) {
    for (const auto& [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
      Adjacency& node = adj[from];
      if (node.degree >= 2) throw ResolutionTooCoarse("edge crossing with three neighbours");
      node.next[static_cast<std::size_t>(node.degree++)] = to;
    }
  };
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < n; ++i) {
      const bool b00 = above(i, r);
      const bool b10 = above(i + 1, r);
      const bool b11 = above(i + 1, r + 1);
      const bool b01 = above(i, r + 1);
      const int mask = (b00 ? 1 : 0) | (b10 ? 2 : 0) | (b11 ? 4 : 0) | (b01 ? 8 : 0);
      if (mask == 0 || mask == 15) continue;
      const EdgeId bottom = h_edge(i, r);
      const EdgeId top = h_edge(i, r + 1);
      const EdgeId left = v_edge(i, r);
      const EdgeId right = v_edge(i + 1, r);
      std::vector<EdgeId> cut;
      if (b00 != b10) cut.push_back(bottom);
      if (b10 != b11) cut.push_back(right);
      if (b11 != b01) cut.push_back(top);
      if (b01 != b00) cut.push_back(left);
      if (cut.size() == 2) {
        link(cut[0], cut[1]);
        continue;
      }
      // Saddle cell: the centre value decides which diagonal pair is joined.
      const double centre = 0.25 * (at(i, r) + at(i + 1, r) + at(i + 1, r + 1) + at(i, r + 1));
      if ((centre >= level) == b00) {
        link(bottom, right);  // cut off corner (i+1, r)
        link(top, left);      // cut off corner (i, r+1)
      } else {
        link(left, bottom);
        link(right, top);
      }
    }
  }

  // Walk chains from the sorted edge list so the traversal order does not
  // depend on hashing.
  std::vector<EdgeId> keys;
  keys.reserve(adj.size());
  for (const auto& entry : adj) keys.push_back(entry.first);
  std::sort(keys.begin(), keys.end());
  std::vector<std::pair<std::vector<Complex>, bool>> chains;  // points, closed
  std::unordered_set<EdgeId> visited;
  visited.reserve(adj.size());
  const auto walk = [&](EdgeId start) {
    std::vector<Complex> pts;
    EdgeId prev = -1;
    EdgeId cur = start;
    while (true) {
      visited.insert(cur);
      pts.push_back(edge_point(cur));
      const Adjacency& a = adj.at(cur);
      EdgeId nxt = -1;
      for (int s = 0; s < a.degree; ++s) {
        if (a.next[static_cast<std::size_t>(s)] != prev) {
          nxt = a.next[static_cast<std::size_t>(s)];
          break;
        }
      }
      if (nxt < 0 || nxt == start) return std::make_pair(pts, nxt == start);
      if (visited.count(nxt)) return std::make_pair(pts, false);
      prev = cur;
      cur = nxt;
    }
  };
  for (EdgeId e : keys) {
    if (adj.at(e).degree == 1 && !visited.count(e)) chains.push_back(walk(e));
  }
  for (EdgeId e : keys) {
    if (!visited.count(e)) chains.push_back(walk(e));
  }

  const double radius = chart == Chart::z ? rho_ : 1.0 / rho_;
  const auto inside = [&](Complex p) {
    return chart == Chart::z ? std::abs(p) <= radius : std::abs(p) < radius;
  };
  std::vector<std::vector<Complex>> runs;
  for (auto& [pts, is_closed] : chains) {
    if (pts.size() < 2) continue;
    const auto outside_at = std::find_if(pts.begin(), pts.end(), [&](Complex p) { return !inside(p); });
    if (outside_at == pts.end()) {
      if (is_closed) {
        closed.push_back(std::move(pts));
        continue;
      }
      throw ResolutionTooCoarse("open level curve inside the chart disc");
    }
    std::vector<Complex> path;
    if (is_closed) {
      std::rotate(pts.begin(), outside_at, pts.end());
      path = pts;
      path.push_back(pts.front());
    } else {
      path = std::move(pts);
    }
    std::vector<Complex> run;
    bool in = inside(path.front());
    for (std::size_t s = 1; s < path.size(); ++s) {
      const bool next_in = inside(path[s]);
      if (!in && next_in) {
        run = {circle_crossing(path[s - 1], path[s], radius), path[s]};
      } else if (in && next_in) {
        run.push_back(path[s]);
      } else if (in && !next_in) {
        run.push_back(circle_crossing(path[s - 1], path[s], radius));
        runs.push_back(std::move(run));
        run.clear();
      }
      in = next_in;
    }
    if (in) throw ResolutionTooCoarse("level curve ends inside the chart disc");
  }
  return runs;
}

Contour LevelSetTracer::trace(std::span<const double> k, SpherePoint lambda) const {
  check_momentum(sd_, k);
  const double level = im_p_combo(sd_, k, lambda);
  if (!std::isfinite(level)) {
    throw SaddleLevel("the level through lambda is infinite (lambda is a pole of p_k)");
  }
  return trace_level(k, level);
}

Contour LevelSetTracer::trace_level(std::span<const double> k, double level) const {
  check_momentum(sd_, k);
  if (!std::isfinite(level)) throw SaddleLevel("level is not finite");
  check_saddle(k, level);

  std::vector<std::vector<Complex>> closed_z;
  std::vector<std::vector<Complex>> closed_w;
  const auto runs_z = chart_runs(z_grid_, Chart::z, k, level, closed_z);
  const auto runs_w = chart_runs(w_grid_, Chart::w, k, level, closed_w);

  Contour out;
  out.k.assign(k.begin(), k.end());
  out.level = level;
  out.chart_radius = rho_;
  out.cell_z = h_z_;
  out.cell_w = h_w_;
  out.resolution = n_;
  for (auto& pts : closed_z) {
    Polyline p;
    for (Complex c : pts) p.nodes.push_back({c, Chart::z});
    out.components.push_back(std::move(p));
  }
  for (auto& pts : closed_w) {
    Polyline p;
    for (Complex c : pts) p.nodes.push_back({c, Chart::w});
    out.components.push_back(std::move(p));
  }

  // Stitch z runs to w runs at their common endpoints on |z| = rho.
  const std::size_t nz = runs_z.size();
  const std::size_t nw = runs_w.size();
  if (nz != nw) {
    throw ResolutionTooCoarse(std::to_string(nz) + " near-chart pieces but " + std::to_string(nw) +
                              " far-chart pieces");
  }
  const double tol = kStitchCells * std::max(h_z_, h_w_ * rho_ * rho_);
  const auto endpoint = [&](std::size_t id) {
    const std::size_t run = id / 2;
    const bool end = id % 2 != 0;
    if (run < nz) return end ? runs_z[run].back() : runs_z[run].front();
    const auto& r = runs_w[run - nz];
    return 1.0 / (end ? r.back() : r.front());
  };
  struct Candidate {
    double dist;
    std::size_t a;
    std::size_t b;
  };
  std::vector<Candidate> candidates;
  for (std::size_t a = 0; a < 2 * nz; ++a) {
    for (std::size_t b = 2 * nz; b < 2 * (nz + nw); ++b) {
      const double dist = std::abs(endpoint(a) - endpoint(b));
      if (dist < tol) candidates.push_back({dist, a, b});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return x.dist != y.dist ? x.dist < y.dist : (x.a != y.a ? x.a < y.a : x.b < y.b);
  });
  std::vector<std::size_t> partner(2 * (nz + nw), std::numeric_limits<std::size_t>::max());
  for (const Candidate& c : candidates) {
    if (partner[c.a] == std::numeric_limits<std::size_t>::max() &&
        partner[c.b] == std::numeric_limits<std::size_t>::max()) {
      partner[c.a] = c.b;
      partner[c.b] = c.a;
    }
  }
  for (std::size_t id = 0; id < partner.size(); ++id) {
    if (partner[id] == std::numeric_limits<std::size_t>::max()) {
      throw ResolutionTooCoarse("chart piece endpoint near " + std::to_string(endpoint(id).real()) +
                                "+" + std::to_string(endpoint(id).imag()) + "i has no partner");
    }
  }
  std::vector<bool> used(nz + nw, false);
  for (std::size_t start = 0; start < nz; ++start) {
    if (used[start]) continue;
    Polyline poly;
    std::size_t run = start;
    std::size_t entry = 0;
    for (std::size_t guard = 0;; ++guard) {
      if (guard > nz + nw) throw ResolutionTooCoarse("chart pieces do not close");
      used[run] = true;
      const bool is_z = run < nz;
      const auto& pts = is_z ? runs_z[run] : runs_w[run - nz];
      const Chart chart = is_z ? Chart::z : Chart::w;
      // The entry crossing duplicates the previous piece's exit crossing up
      // to interpolation error, so it is skipped to avoid a backtracking step.
      if (entry == 0) {
        for (auto it = pts.begin() + 1; it != pts.end(); ++it) poly.nodes.push_back({*it, chart});
      } else {
        for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) poly.nodes.push_back({*it, chart});
      }
      const std::size_t exit_id = 2 * run + (1 - entry);
      const std::size_t next = partner[exit_id];
      run = next / 2;
      entry = next % 2;
      if (run == start) {
        if (entry != 0) throw ResolutionTooCoarse("chart pieces close with inconsistent direction");
        break;
      }
      if (used[run]) throw ResolutionTooCoarse("chart piece reused while closing a component");
    }
    out.components.push_back(std::move(poly));
  }

  // Drop repeated nodes and degenerate components.
  std::vector<Polyline> kept;
  for (Polyline& p : out.components) {
    std::vector<ContourNode> nodes;
    for (const ContourNode& node : p.nodes) {
      if (!nodes.empty() && nodes.back().chart == node.chart && nodes.back().value == node.value) {
        continue;
      }
      nodes.push_back(node);
    }
    while (nodes.size() > 1 && nodes.back().chart == nodes.front().chart &&
           nodes.back().value == nodes.front().value) {
      nodes.pop_back();
    }
    if (nodes.size() >= 3) kept.push_back({std::move(nodes)});
  }
  out.components = std::move(kept);
  resolve_pole_loops(k, level, out.components);
  if (out.components.empty()) throw ResolutionTooCoarse("no level curve found");

  // Orient every component by the sign of Re(dp_k . tangent).
  const auto segment_flow = [&](const ContourNode& a, const ContourNode& b) {
    if (a.chart == b.chart) {
      const Complex mid = 0.5 * (a.value + b.value);
      const Complex dp = a.chart == Chart::z ? dp_combo_value(sd_, k, mid) : dp_combo_value_w(sd_, k, mid);
      return std::real(dp * (b.value - a.value));
    }
    const Complex za = chart_to_z(a);
    const Complex zb = chart_to_z(b);
    return std::real(dp_combo_value(sd_, k, 0.5 * (za + zb)) * (zb - za));
  };
  for (Polyline& p : out.components) {
    double total = 0;
    const std::size_t m = p.nodes.size();
    for (std::size_t s = 0; s < m; ++s) total += segment_flow(p.nodes[s], p.nodes[(s + 1) % m]);
    if (total < 0) std::reverse(p.nodes.begin(), p.nodes.end());
    for (std::size_t s = 0; s < m; ++s) {
      if (segment_flow(p.nodes[s], p.nodes[(s + 1) % m]) < 0) ++out.orientation_violations;
    }
  }

  // The region {Im p_k <= c} holds every point where Im p_k = -inf and none
  // where it is +inf, so the two groups must differ in winding by exactly one.
  std::vector<SpherePoint> sinks;
  std::vector<SpherePoint> sources;
  for (int j = 0; j < sd_.dimension(); ++j) {
    const double kj = k[static_cast<std::size_t>(j)];
    if (kj == 0) continue;
    (kj > 0 ? sinks : sources).emplace_back(sd_.alpha(j));
    (kj > 0 ? sources : sinks).emplace_back(-sd_.alpha(j));
  }
  std::vector<SpherePoint> probes = sinks;
  probes.insert(probes.end(), sources.begin(), sources.end());
  std::vector<int> w;
  std::vector<SpherePoint> references{SpherePoint::infinity()};
  for (int t = 0; t < 8; ++t) references.emplace_back(std::polar(0.45 * rho_, 0.3 + 2 * kPi * t / 8));
  for (const SpherePoint& ref : references) {
    try {
      w = winding_numbers(out, probes, ref);
      break;
    } catch (const PointOnContour&) {
      continue;
    }
  }
  if (w.empty()) throw ResolutionTooCoarse("no reference point off the contour");
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const int expected = i < sinks.size() ? w[0] : w[0] + 1;
    if (w[i] != expected) {
      std::string got;
      for (int x : w) got += std::to_string(x) + " ";
      throw ResolutionTooCoarse("winding numbers around the poles of p_k are inconsistent: " + got);
    }
  }
  return out;
}

Contour trace_level_contour(const SpectralData& sd, std::span<const double> k, SpherePoint lambda,
                            int resolution) {
  return LevelSetTracer(sd, resolution).trace(k, lambda);
}

Complex contour_integral(const Contour& contour, const ChartDensity& density) {
  if (!density.f_z) throw NonFiniteDensity("density has no z-chart form");
  const std::function<Complex(Complex)> f_w =
      density.f_w ? density.f_w
                  : std::function<Complex(Complex)>(
                        [f = density.f_z](Complex w) { return f(1.0 / w) * (-1.0 / (w * w)); });
  const auto checked = [](const std::function<Complex(Complex)>& f, Complex p) {
    const Complex v = f(p);
    if (!finite(v)) {
      throw NonFiniteDensity("density is not finite at (" + std::to_string(p.real()) + ", " +
                             std::to_string(p.imag()) + ")");
    }
    return v;
  };
  Complex total = 0;
  for (const Polyline& poly : contour.components) {
    const std::size_t m = poly.nodes.size();
    for (std::size_t s = 0; s < m; ++s) {
      const ContourNode& a = poly.nodes[s];
      const ContourNode& b = poly.nodes[(s + 1) % m];
      const bool in_w = a.chart == Chart::w && b.chart == Chart::w;
      const Complex pa = in_w ? a.value : chart_to_z(a);
      const Complex pb = in_w ? b.value : chart_to_z(b);
      const Complex d = pb - pa;
      const auto& f = in_w ? f_w : density.f_z;
      const auto g = [&](double t) { return checked(f, pa + t * d) * d; };
      total += adaptive_gk(g, 0.0, 1.0, kQuadratureDepth);
    }
  }
  return total;
}

std::vector<int> winding_numbers(const Contour& contour, std::span<const SpherePoint> points,
                                 SpherePoint reference) {
  std::vector<int> out;
  out.reserve(points.size());
  for (const SpherePoint& p : points) {
    if (p == reference) {
      out.push_back(0);
      continue;
    }
    double total = 0;
    for (const Polyline& poly : contour.components) {
      const std::size_t m = poly.nodes.size();
      Complex prev = winding_ratio(poly.nodes[m - 1], p, reference);
      for (std::size_t s = 0; s < m; ++s) {
        const Complex cur = winding_ratio(poly.nodes[s], p, reference);
        if (!finite(cur) || cur == Complex(0.0)) {
          throw PointOnContour("a contour node coincides with the point or the reference");
        }
        const double step = std::arg(cur / prev);
        if (std::abs(step) > 0.5 * kPi) {
          throw PointOnContour("the point or the reference lies within one segment of the contour");
        }
        total += step;
        prev = cur;
      }
    }
    out.push_back(static_cast<int>(std::lround(total / (2 * kPi))));
  }
  return out;
}

double level_accuracy_cells(const SpectralData& sd, const Contour& contour) {
  double worst = 0;
  for (const Polyline& poly : contour.components) {
    for (const ContourNode& node : poly.nodes) {
      const double dev = std::abs(im_p_combo(sd, contour.k, node.point()) - contour.level);
      const double slope = node.chart == Chart::z ? std::abs(dp_combo_value(sd, contour.k, node.value))
                                                  : std::abs(dp_combo_value_w(sd, contour.k, node.value));
      const double cell = node.chart == Chart::z ? contour.cell_z : contour.cell_w;
      worst = std::max(worst, dev / slope / cell);
    }
  }
  return worst;
}

nlohmann::json to_json(const Contour& c) {
  nlohmann::json components = nlohmann::json::array();
  nlohmann::json charts = nlohmann::json::array();
  for (const Polyline& p : c.components) {
    nlohmann::json pts = nlohmann::json::array();
    std::string tags;
    for (const ContourNode& n : p.nodes) {
      const SpherePoint sp = n.point();
      if (sp.is_infinite()) {
        pts.push_back(nullptr);
      } else {
        pts.push_back({sp.value().real(), sp.value().imag()});
      }
      tags.push_back(n.chart == Chart::z ? 'z' : 'w');
    }
    components.push_back(std::move(pts));
    charts.push_back(std::move(tags));
  }
  return {{"k", c.k},
          {"level", c.level},
          {"components", std::move(components)},
          {"charts", std::move(charts)},
          {"chart_radius", c.chart_radius},
          {"resolution", c.resolution},
          {"orientation_violations", c.orientation_violations}};
}

}  // namespace fgl
