#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "fgl/spectral.hpp"

namespace fgl {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct PeriodMatrixDiagnostics {
  bool valid = false;
  double symmetry_defect = 0;      // max |B_ij - B_ji|
  double min_imag_eigenvalue = 0;  // smallest eigenvalue of Im B
  std::string message;
};

PeriodMatrixDiagnostics validate_period_matrix(const CMatrix& b);

/// Symmetric g x g matrix with positive definite imaginary part.
class PeriodMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  explicit PeriodMatrix(CMatrix b);  // throws InvalidPeriodMatrix

  int genus() const { return static_cast<int>(b_.rows()); }
  const CMatrix& matrix() const { return b_; }
  double min_imag_eigenvalue() const { return lambda_min_; }

 private:
  CMatrix b_;
  double lambda_min_ = 0;
};

struct ThetaOptions {
  double tolerance = 1e-13;
  int max_radius = 40;
};

/// Smallest R with sum over |N|_inf > R of the term bound below tolerance.
int theta_truncation_radius(const CVector& z, const PeriodMatrix& b, const ThetaOptions& opt = {});

/// theta(z | B) = sum_N exp(pi i <BN, N> + 2 pi i <N, z>), summed shell by
/// shell in |N|_inf and lexicographically within a shell.
/// Throws TruncationOverflow when the radius would exceed opt.max_radius.
Complex theta(const CVector& z, const PeriodMatrix& b, const ThetaOptions& opt = {});

/// Period data of the explicit wave-function formula, supplied by the user.
struct ThetaFormulaData {
  PeriodMatrix b{CMatrix(0, 0)};
  CVector abel_gamma;        // A(gamma)
  CVector abel_r_plus;       // A(R+)
  CVector divisor_sum;       // sum_k A(gamma_k)
  CVector riemann_constants;  // K
  std::vector<CVector> shifts;       // Delta_j = A(A_j^-) - A(A_j^+)
  std::vector<Complex> exp_integrals;  // integral from R+ to gamma of Omega(A_j^+, A_j^-)

  int genus() const { return b.genus(); }
  int dimension() const { return static_cast<int>(shifts.size()); }
};

/// Throws InvalidPeriodMatrix when vector sizes disagree with the genus.
void check_formula_data(const ThetaFormulaData& d);

/// exp(sum n_j I_j) theta(A(gamma) + S - D - K) / theta(A(gamma) - D - K)
///   * theta(A(R+) - D - K) / theta(A(R+) + S - D - K),  S = sum n_j Delta_j.
/// Throws ThetaZeroDenominator when a denominator vanishes to tolerance.
Complex wave_function_theta(const ThetaFormulaData& d, const IntVec& n,
                            const ThetaOptions& opt = {});

/// Genus-0 data at the point z: no theta factors, I_j = ln((z + a_j)/(z - a_j)).
ThetaFormulaData genus0_formula_data(const SpectralData& sd, Complex z);

/// Moves A(gamma) by B M and each I_j by 2 pi i <M, Delta_j>, which leaves
/// the formula unchanged.
ThetaFormulaData shift_along_b_cycles(const ThetaFormulaData& d, const Eigen::VectorXi& m);

nlohmann::json to_json(const ThetaFormulaData& d);
ThetaFormulaData theta_data_from_json(const nlohmann::json& j);

}  // namespace fgl
