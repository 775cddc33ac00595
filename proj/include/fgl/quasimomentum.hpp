#pragma once

#include <span>
#include <vector>

#include "fgl/spectral.hpp"

namespace fgl {

/// Real coefficients k of dp_k = k_1 dp_1 + ... + k_d dp_d.
using MomentumVector = std::vector<double>;

/// Throws InvalidSpectralData unless k has length d and is not zero.
void check_momentum(const SpectralData& sd, std::span<const double> k);

MomentumVector to_momentum(const IntVec& n);

/// Im p_j(z) = ln|(z - alpha_j)/(z + alpha_j)|: -inf at alpha_j, +inf at
/// -alpha_j, 0 at infinity.
double im_quasimomentum(const SpectralData& sd, int j, SpherePoint z);

/// sum_j k_j Im p_j(z); terms with k_j = 0 are skipped.
double im_p_combo(const SpectralData& sd, std::span<const double> k, SpherePoint z);

/// Density of dp_k against dz: sum_j k_j (i/(z - alpha_j) - i/(z + alpha_j)).
Complex dp_combo_value(const SpectralData& sd, std::span<const double> k, Complex z);

/// Density of dp_k against dw in the chart w = 1/z.
Complex dp_combo_value_w(const SpectralData& sd, std::span<const double> k, Complex w);

/// Zeros of dp_k on the sphere: roots of a polynomial in z^2, plus infinity
/// when sum_j k_j alpha_j vanishes.
std::vector<SpherePoint> critical_points(const SpectralData& sd, std::span<const double> k);

}  // namespace fgl
