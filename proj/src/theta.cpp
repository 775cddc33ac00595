#include "fgl/theta.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "fgl/errors.hpp"

namespace fgl {

PeriodMatrixDiagnostics validate_period_matrix(const CMatrix& b) {
  PeriodMatrixDiagnostics d;
  if (b.rows() != b.cols()) {
    d.message = "period matrix is not square";
    return d;
  }
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      if (!std::isfinite(b(i, j).real()) || !std::isfinite(b(i, j).imag())) {
        d.message = "period matrix has non-finite entries";
        return d;
      }
      d.symmetry_defect = std::max(d.symmetry_defect, std::abs(b(i, j) - b(j, i)));
    }
  }
  if (b.rows() == 0) {
    d.valid = true;
    d.min_imag_eigenvalue = std::numeric_limits<double>::infinity();
    return d;
  }
  const Eigen::MatrixXd im = 0.5 * (b.imag() + b.imag().transpose());
  d.min_imag_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(im).eigenvalues().minCoeff();
  if (d.symmetry_defect > PeriodMatrix::kSymmetryTolerance) {
    d.message = "not symmetric: max |B_ij - B_ji| = " + std::to_string(d.symmetry_defect);
  } else if (!(d.min_imag_eigenvalue > 0)) {
    d.message = "Im B is not positive definite: smallest eigenvalue " +
                std::to_string(d.min_imag_eigenvalue);
  } else {
    d.valid = true;
  }
  return d;
}

PeriodMatrix::PeriodMatrix(CMatrix b) : b_(std::move(b)) {
  const PeriodMatrixDiagnostics d = validate_period_matrix(b_);
  if (!d.valid) throw InvalidPeriodMatrix(d.message);
  lambda_min_ = d.min_imag_eigenvalue;
}

int theta_truncation_radius(const CVector& z, const PeriodMatrix& b, const ThetaOptions& opt) {
  const int g = b.genus();
  if (z.size() != g) throw InvalidPeriodMatrix("argument has the wrong dimension");
  if (!(opt.tolerance > 0)) throw InvalidPeriodMatrix("tolerance must be positive");
  if (g == 0) return 0;
  const double lam = b.min_imag_eigenvalue();
  const double y = z.imag().norm();
  const double sg = std::sqrt(static_cast<double>(g));
  // |term(N)| <= exp(-pi lam |N|^2 + 2 pi y |N|) and s <= |N|_2 <= sqrt(g) s on shell s.
  const auto shell_bound = [&](int s) {
    const double r = std::clamp(y / lam, static_cast<double>(s), sg * s);
    const double count = std::pow(2.0 * s + 1, g) - std::pow(2.0 * s - 1, g);
    return count * std::exp(-kPi * lam * r * r + 2 * kPi * y * r);
  };
  for (int radius = 0; radius <= opt.max_radius; ++radius) {
    double tail = 0;
    for (int s = radius + 1;; ++s) {
      const double t = shell_bound(s);
      tail += t;
      // Past the peak the bound falls faster than geometrically.
      if (s > y / lam + 1 && t < 1e-6 * opt.tolerance) break;
      if (s > radius + 4 * opt.max_radius) break;
    }
    if (tail < opt.tolerance) return radius;
  }
  throw TruncationOverflow("theta needs more than " + std::to_string(opt.max_radius) +
                           " lattice shells at tolerance " + std::to_string(opt.tolerance));
}

Complex theta(const CVector& z, const PeriodMatrix& b, const ThetaOptions& opt) {
  const int g = b.genus();
  const int radius = theta_truncation_radius(z, b, opt);
  if (g == 0) return 1.0;
  const CMatrix& bm = b.matrix();
  // One lexicographic pass over the cube; terms land in their shell's
  // partial sum, and shells are added in increasing order.
  std::vector<Complex> shells(static_cast<std::size_t>(radius) + 1, 0.0);
  Eigen::VectorXi n = Eigen::VectorXi::Constant(g, -radius);
  for (;;) {
    const Eigen::VectorXcd nc = n.cast<std::complex<double>>();
    const Complex q = (nc.transpose() * bm * nc)(0, 0);
    const Complex lin = (nc.transpose() * z)(0, 0);
    shells[static_cast<std::size_t>(n.cwiseAbs().maxCoeff())] += std::exp(kI * kPi * (q + 2.0 * lin));
    int i = g - 1;
    while (i >= 0 && n(i) == radius) n(i--) = -radius;
    if (i < 0) break;
    ++n(i);
  }
  Complex total = 0;
  for (const Complex& s : shells) total += s;
  return total;
}

void check_formula_data(const ThetaFormulaData& d) {
  const Eigen::Index g = d.genus();
  for (const CVector* v : {&d.abel_gamma, &d.abel_r_plus, &d.divisor_sum, &d.riemann_constants}) {
    if (v->size() != g) throw InvalidPeriodMatrix("formula vectors must have length g");
  }
  if (d.shifts.size() != d.exp_integrals.size()) {
    throw InvalidPeriodMatrix("one shift and one exponential integral per direction");
  }
  for (const CVector& s : d.shifts) {
    if (s.size() != g) throw InvalidPeriodMatrix("direction shifts must have length g");
  }
}

Complex wave_function_theta(const ThetaFormulaData& d, const IntVec& n, const ThetaOptions& opt) {
  check_formula_data(d);
  if (static_cast<int>(n.size()) != d.dimension()) {
    throw InvalidPeriodMatrix("lattice coordinates do not match the number of directions");
  }
  CVector s = CVector::Zero(d.genus());
  Complex expo = 0;
  for (int j = 0; j < d.dimension(); ++j) {
    const double nj = n[static_cast<std::size_t>(j)];
    s += nj * d.shifts[static_cast<std::size_t>(j)];
    expo += nj * d.exp_integrals[static_cast<std::size_t>(j)];
  }
  const CVector base = -d.divisor_sum - d.riemann_constants;
  const Complex num1 = theta(d.abel_gamma + s + base, d.b, opt);
  const Complex den1 = theta(d.abel_gamma + base, d.b, opt);
  const Complex num2 = theta(d.abel_r_plus + base, d.b, opt);
  const Complex den2 = theta(d.abel_r_plus + s + base, d.b, opt);
  for (const Complex den : {den1, den2}) {
    if (std::abs(den) <= 10 * opt.tolerance) {
      throw ThetaZeroDenominator("|theta| = " + std::to_string(std::abs(den)) +
                                 " in a denominator");
    }
  }
  return std::exp(expo) * (num1 / den1) * (num2 / den2);
}

ThetaFormulaData genus0_formula_data(const SpectralData& sd, Complex z) {
  ThetaFormulaData d;
  d.abel_gamma = d.abel_r_plus = d.divisor_sum = d.riemann_constants = CVector(0);
  for (Complex a : sd.alphas()) {
    if (z == a || z == -a) throw PoleEvaluation("the formula is singular at +-alpha_j");
    d.shifts.emplace_back(0);
    d.exp_integrals.push_back(std::log((z + a) / (z - a)));
  }
  return d;
}

ThetaFormulaData shift_along_b_cycles(const ThetaFormulaData& d, const Eigen::VectorXi& m) {
  check_formula_data(d);
  if (m.size() != d.genus()) throw InvalidPeriodMatrix("cycle vector must have length g");
  ThetaFormulaData out = d;
  const CVector mc = m.cast<std::complex<double>>();
  out.abel_gamma += d.b.matrix() * mc;
  for (std::size_t j = 0; j < d.shifts.size(); ++j) {
    out.exp_integrals[j] += 2.0 * kPi * kI * (mc.transpose() * d.shifts[j])(0, 0);
  }
  return out;
}

namespace {

nlohmann::json vec_json(const CVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

Complex complex_from(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw InvalidPeriodMatrix("complex entries must be [re, im]");
  return {v[0], v[1]};
}

CVector vec_from(const nlohmann::json& j) {
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from(j[i]);
  return v;
}

}  // namespace

nlohmann::json to_json(const ThetaFormulaData& d) {
  nlohmann::json b = nlohmann::json::array();
  for (Eigen::Index i = 0; i < d.b.matrix().rows(); ++i) {
    b.push_back(vec_json(d.b.matrix().row(i).transpose()));
  }
  nlohmann::json shifts = nlohmann::json::array();
  for (const CVector& s : d.shifts) shifts.push_back(vec_json(s));
  nlohmann::json ints = nlohmann::json::array();
  for (Complex c : d.exp_integrals) ints.push_back({c.real(), c.imag()});
  return {{"genus", d.genus()},
          {"B", std::move(b)},
          {"abel_gamma", vec_json(d.abel_gamma)},
          {"abel_r_plus", vec_json(d.abel_r_plus)},
          {"divisor_sum", vec_json(d.divisor_sum)},
          {"riemann_constants", vec_json(d.riemann_constants)},
          {"shifts", std::move(shifts)},
          {"exp_integrals", std::move(ints)}};
}

ThetaFormulaData theta_data_from_json(const nlohmann::json& j) {
  try {
    const int g = j.at("genus").get<int>();
    const auto& rows = j.at("B");
    if (static_cast<int>(rows.size()) != g) throw InvalidPeriodMatrix("B must have g rows");
    CMatrix b(g, g);
    for (int r = 0; r < g; ++r) {
      const CVector row = vec_from(rows[static_cast<std::size_t>(r)]);
      if (row.size() != g) throw InvalidPeriodMatrix("B must have g columns");
      b.row(r) = row.transpose();
    }
    ThetaFormulaData d;
    d.b = PeriodMatrix(std::move(b));
    d.abel_gamma = vec_from(j.at("abel_gamma"));
    d.abel_r_plus = vec_from(j.at("abel_r_plus"));
    d.divisor_sum = vec_from(j.at("divisor_sum"));
    d.riemann_constants = vec_from(j.at("riemann_constants"));
    for (const auto& s : j.at("shifts")) d.shifts.push_back(vec_from(s));
    for (const auto& c : j.at("exp_integrals")) d.exp_integrals.push_back(complex_from(c));
    check_formula_data(d);
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidPeriodMatrix(std::string("theta data: ") + e.what());
  }
}

}  // namespace fgl
