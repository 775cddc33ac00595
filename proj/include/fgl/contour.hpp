#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "fgl/quasimomentum.hpp"

namespace fgl {

/// z: the disc |z| <= rho; w: the chart w = 1/z on |w| < 1/rho.
enum class Chart : std::uint8_t { z, w };

struct ContourNode {
  Complex value;  // coordinate in its chart
  Chart chart = Chart::z;

  SpherePoint point() const;
  /// Finite z-coordinate; fails for the node w = 0.
  Complex z() const;
};

/// One closed polyline; the last node connects back to the first.
struct Polyline {
  std::vector<ContourNode> nodes;
};

struct Contour {
  MomentumVector k;
  double level = 0;
  std::vector<Polyline> components;
  double chart_radius = 0;  // rho
  double cell_z = 0;        // grid spacing in the z chart
  double cell_w = 0;        // grid spacing in the w chart
  int resolution = 0;
  /// Segments whose midpoint tangent has Re(dp_k . t) < 0 after orientation.
  int orientation_violations = 0;

  std::size_t node_count() const;
  Contour reversed() const;
};

/// Level-set extraction of {Im p_k = c} on the sphere. The per-direction
/// fields ln|(z - a_j)/(z + a_j)| are sampled once per chart and reused for
/// every momentum vector, so one tracer serves many contours.
class LevelSetTracer {
 public:
  static constexpr int kDefaultResolution = 1024;

  LevelSetTracer(const SpectralData& sd, int resolution = kDefaultResolution);

  const SpectralData& spectral() const { return sd_; }
  int resolution() const { return n_; }
  double chart_radius() const { return rho_; }
  double cell(Chart c) const { return c == Chart::z ? h_z_ : h_w_; }

  /// The oriented level contour of Im p_k through lambda.
  /// Throws SaddleLevel when the level passes within three cells of a
  /// critical point or is infinite, and ResolutionTooCoarse when the chart
  /// pieces fail to close or the winding structure is inconsistent.
  Contour trace(std::span<const double> k, SpherePoint lambda) const;

  /// Same, at an explicit level value.
  Contour trace_level(std::span<const double> k, double level) const;

 private:
  struct Grid {
    double half_width = 0;  // nodes run over [-half_width, half_width]^2
    double h = 0;
    std::vector<std::vector<double>> fields;  // one per direction
  };

  void check_saddle(std::span<const double> k, double level) const;
  void resolve_pole_loops(std::span<const double> k, double level,
                          std::vector<Polyline>& components) const;
  std::vector<std::vector<Complex>> chart_runs(const Grid& grid, Chart chart,
                                               std::span<const double> k, double level,
                                               std::vector<std::vector<Complex>>& closed) const;

  SpectralData sd_;
  int n_;
  double rho_;
  double h_z_;
  double h_w_;
  Grid z_grid_;
  Grid w_grid_;
};

Contour trace_level_contour(const SpectralData& sd, std::span<const double> k, SpherePoint lambda,
                            int resolution = LevelSetTracer::kDefaultResolution);

/// A density f(z) dz, optionally with its form f_w(w) dw in the chart w = 1/z.
/// Without f_w the chart form is f(1/w) (-1/w^2).
struct ChartDensity {
  std::function<Complex(Complex)> f_z;
  std::function<Complex(Complex)> f_w;
};

/// Integral of the density along the oriented polyline. Each segment is
/// integrated in its own chart by adaptive Gauss-Kronrod.
Complex contour_integral(const Contour& contour, const ChartDensity& density);

/// Winding numbers of the contour around each point, measured against a
/// reference point (default infinity, whose own winding is then 0).
/// Throws PointOnContour when a point or the reference is too close to
/// the polyline to resolve.
std::vector<int> winding_numbers(const Contour& contour, std::span<const SpherePoint> points,
                                 SpherePoint reference = SpherePoint::infinity());

/// max over nodes of |Im p_k - c| / |dp_k| in units of the chart cell size.
double level_accuracy_cells(const SpectralData& sd, const Contour& contour);

nlohmann::json to_json(const Contour& c);

}  // namespace fgl
