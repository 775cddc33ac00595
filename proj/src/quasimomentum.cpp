#include "fgl/quasimomentum.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "fgl/errors.hpp"

namespace fgl {

namespace {

constexpr double kPoleTolerance = 1e-13;

}  // namespace

void check_momentum(const SpectralData& sd, std::span<const double> k) {
  if (static_cast<int>(k.size()) != sd.dimension()) {
    throw InvalidSpectralData("momentum vector has length " + std::to_string(k.size()) +
                              ", expected " + std::to_string(sd.dimension()));
  }
  double norm = 0;
  for (double v : k) {
    if (!std::isfinite(v)) throw InvalidSpectralData("momentum vector is not finite");
    norm += v * v;
  }
  if (norm == 0) throw InvalidSpectralData("momentum vector is zero");
}

MomentumVector to_momentum(const IntVec& n) { return {n.begin(), n.end()}; }

double im_quasimomentum(const SpectralData& sd, int j, SpherePoint z) {
  if (j < 0 || j >= sd.dimension()) throw InvalidSpectralData("direction index out of range");
  if (z.is_infinite()) return 0.0;
  const Complex a = sd.alpha(j);
  const double num = std::abs(z.value() - a);
  const double den = std::abs(z.value() + a);
  if (num == 0) return -std::numeric_limits<double>::infinity();
  if (den == 0) return std::numeric_limits<double>::infinity();
  return std::log(num / den);
}

double im_p_combo(const SpectralData& sd, std::span<const double> k, SpherePoint z) {
  check_momentum(sd, k);
  double s = 0;
  for (int j = 0; j < sd.dimension(); ++j) {
    const double kj = k[static_cast<std::size_t>(j)];
    if (kj != 0) s += kj * im_quasimomentum(sd, j, z);
  }
  return s;
}

Complex dp_combo_value(const SpectralData& sd, std::span<const double> k, Complex z) {
  check_momentum(sd, k);
  Complex s = 0;
  for (int j = 0; j < sd.dimension(); ++j) {
    const double kj = k[static_cast<std::size_t>(j)];
    if (kj == 0) continue;
    const Complex a = sd.alpha(j);
    if (std::abs(z - a) <= kPoleTolerance * std::abs(a) ||
        std::abs(z + a) <= kPoleTolerance * std::abs(a)) {
      throw PoleEvaluation("dp has a pole at +-alpha_" + std::to_string(j + 1));
    }
    s += kj * (kI / (z - a) - kI / (z + a));
  }
  return s;
}

Complex dp_combo_value_w(const SpectralData& sd, std::span<const double> k, Complex w) {
  check_momentum(sd, k);
  // i dz/(z - a) - i dz/(z + a) = -2i a dw / (1 - a^2 w^2).
  Complex s = 0;
  for (int j = 0; j < sd.dimension(); ++j) {
    const double kj = k[static_cast<std::size_t>(j)];
    if (kj == 0) continue;
    const Complex a = sd.alpha(j);
    const Complex den = 1.0 - a * a * w * w;
    if (std::abs(den) <= kPoleTolerance) {
      throw PoleEvaluation("dp has a pole at +-alpha_" + std::to_string(j + 1));
    }
    s += -2.0 * kI * kj * a / den;
  }
  return s;
}

std::vector<SpherePoint> critical_points(const SpectralData& sd, std::span<const double> k) {
  check_momentum(sd, k);
  // dp_k = 2i sum_j k_j a_j / (z^2 - a_j^2); clearing denominators gives
  // P(u) = sum_j k_j a_j prod_{m != j} (u - a_m^2) with u = z^2.
  std::vector<int> active;
  for (int j = 0; j < sd.dimension(); ++j) {
    if (k[static_cast<std::size_t>(j)] != 0) active.push_back(j);
  }
  std::vector<Complex> poly{0.0};  // coefficients, lowest degree first
  double scale = 0;
  for (int j : active) {
    std::vector<Complex> term{k[static_cast<std::size_t>(j)] * sd.alpha(j)};
    for (int m : active) {
      if (m == j) continue;
      const Complex root = sd.alpha(m) * sd.alpha(m);
      std::vector<Complex> next(term.size() + 1, 0.0);
      for (std::size_t i = 0; i < term.size(); ++i) {
        next[i + 1] += term[i];
        next[i] -= root * term[i];
      }
      term = std::move(next);
    }
    if (poly.size() < term.size()) poly.resize(term.size(), 0.0);
    for (std::size_t i = 0; i < term.size(); ++i) poly[i] += term[i];
    scale = std::max(scale, std::abs(k[static_cast<std::size_t>(j)] * sd.alpha(j)));
  }
  std::vector<SpherePoint> out;
  // The leading coefficient is sum_j k_j a_j. When it vanishes, dp decays
  // faster than 1/z^2 at infinity and infinity is critical.
  if (poly.size() > 1 && std::abs(poly.back()) <= 1e-12 * scale * static_cast<double>(active.size())) {
    out.push_back(SpherePoint::infinity());
    while (poly.size() > 1 && std::abs(poly.back()) <= 1e-12 * scale * static_cast<double>(active.size())) {
      poly.pop_back();
    }
  }
  const int degree = static_cast<int>(poly.size()) - 1;
  if (degree >= 1) {
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) {
      companion(i, degree - 1) = -poly[static_cast<std::size_t>(i)] / poly.back();
    }
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    for (int i = 0; i < degree; ++i) {
      const Complex root = std::sqrt(solver.eigenvalues()(i));
      out.emplace_back(root);
      if (root != Complex(0.0)) out.emplace_back(-root);
    }
  }
  return out;
}

}  // namespace fgl
