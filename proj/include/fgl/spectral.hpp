#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fgl/quadgraph.hpp"
#include "fgl/sphere.hpp"

namespace fgl {

/// Where the closed-form diagonal ratio i(a_y - a_x)/(a_y + a_x) lands on a
/// face frame, and with which sign; picked by residual tests, see
/// calibrate_conventions().
struct WeightConvention {
  bool ratio_on_p1p4 = true;
  int weight_sign = -1;
  int a1_sign = +1;
  double cr_residual = 0;          // residual of the winning weight choice
  double four_point_residual = 0;  // residual of the winning a1 sign
};

/// Genus-0 spectral data: the sphere with marked points +-alpha_j,
/// sigma z = -z, normalization point infinity and Omega = -dz/(2z).
class SpectralData {
 public:
  explicit SpectralData(std::vector<Complex> alphas,
                        std::optional<double> reality_modulus = std::nullopt);

  int dimension() const { return static_cast<int>(alphas_.size()); }
  std::span<const Complex> alphas() const { return alphas_; }
  Complex alpha(int j) const { return alphas_.at(static_cast<std::size_t>(j)); }
  std::optional<double> reality_modulus() const { return modulus_; }
  double max_modulus() const;

  /// Antiholomorphic involution z -> C^2 / conj(z); requires reality_modulus.
  SpherePoint tau(SpherePoint z) const;

  const WeightConvention& convention() const { return convention_; }

 private:
  std::vector<Complex> alphas_;
  std::optional<double> modulus_;
  WeightConvention convention_;
};

/// Psi(n; z) = prod_j ((z + alpha_j)/(z - alpha_j))^{n_j}, with Psi(n; inf) = 1.
Complex wave_function(const SpectralData& sd, const IntVec& n, SpherePoint z);

/// Psi+(n; z) = Psi(n; -z).
Complex dual_wave_function(const SpectralData& sd, const IntVec& n, SpherePoint z);

struct FaceWeights {
  Complex p1p4;
  Complex p2p3;
  Complex primal;  // weight of the diagonal joining the two primal corners
  Complex dual;
};

FaceWeights weight_of_face(const SpectralData& sd, const FaceFrame& frame);

/// Coefficients of Psi(p4) + a1 Psi(p2) + a2 Psi(p3) + a3 Psi(p1) = 0.
struct FourPointCoefficients {
  Complex a1;
  Complex a2;
  Complex a3;
};

FourPointCoefficients four_point_coefficients(const SpectralData& sd, const FaceFrame& frame);

/// Runs the sign calibration on the abstract face p1 = 0, p2 = e_x,
/// p3 = e_y, p4 = e_x + e_y built from the first two directions.
WeightConvention calibrate_conventions(std::span<const Complex> alphas);

/// Weights on the diagonals of every face: primal edges of G and dual edges of G*.
class WeightFunction {
 public:
  WeightFunction() = default;
  explicit WeightFunction(std::vector<FaceWeights> per_face);

  std::span<const FaceWeights> faces() const { return per_face_; }
  const FaceWeights& face(int f) const { return per_face_.at(static_cast<std::size_t>(f)); }

  /// Weight of the diagonal (u, v) of face f, where u and v are opposite corners.
  Complex diagonal(const QuadGraph& g, int face, int u, int v) const;

  double max_abs_imag() const;
  /// max |nu(e) nu(e*) - 1| over faces.
  double max_duality_defect() const;

 private:
  std::vector<FaceWeights> per_face_;
};

WeightFunction build_weights(const SpectralData& sd, const QuadGraph& g);

/// Sum of |residual| of the discrete CR relation for Psi(., z) on one frame,
/// relative to max |Psi| over the corners.
double cr_residual_for_frame(const SpectralData& sd, const IntVec& base, int x, int y,
                             Complex nu_p1p4, SpherePoint z);

nlohmann::json to_json(const SpectralData& sd);
SpectralData spectral_from_json(const nlohmann::json& j);

}  // namespace fgl
