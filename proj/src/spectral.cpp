#include "fgl/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "fgl/errors.hpp"

namespace fgl {

namespace {

// Sample points for the sign calibration, in units of max |alpha|; chosen off
// the real and imaginary axes so no candidate can win by symmetry.
constexpr std::array<Complex, 4> kCalibrationPoints{
    Complex(0.37, 0.81), Complex(-1.3, 0.43), Complex(2.1, -0.7), Complex(-0.22, -1.9)};

Complex printed_ratio(Complex ax, Complex ay) { return kI * (ay - ax) / (ay + ax); }

Complex p1p4_weight(const WeightConvention& c, Complex ax, Complex ay) {
  const Complex v = static_cast<double>(c.weight_sign) * printed_ratio(ax, ay);
  return c.ratio_on_p1p4 ? v : 1.0 / v;
}

IntVec unit(int d, int j) {
  IntVec e(static_cast<std::size_t>(d), 0);
  e[static_cast<std::size_t>(j)] = 1;
  return e;
}

IntVec add(IntVec a, const IntVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

// The product without pole checks; callers validate first.
Complex psi_product(std::span<const Complex> alphas, const IntVec& n, Complex z) {
  Complex result = 1.0;
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    if (n[j] != 0) result *= ipow((z + alphas[j]) / (z - alphas[j]), n[j]);
  }
  return result;
}

double cr_residual_raw(std::span<const Complex> alphas, const IntVec& base, int x, int y,
                       Complex nu_p1p4, Complex z) {
  const int d = static_cast<int>(alphas.size());
  const IntVec n2 = add(base, unit(d, x));
  const IntVec n3 = add(base, unit(d, y));
  const IntVec n4 = add(n2, unit(d, y));
  const Complex f1 = psi_product(alphas, base, z);
  const Complex f2 = psi_product(alphas, n2, z);
  const Complex f3 = psi_product(alphas, n3, z);
  const Complex f4 = psi_product(alphas, n4, z);
  const double scale = std::max({std::abs(f1), std::abs(f2), std::abs(f3), std::abs(f4)});
  // Stored order is (p1, p2, p4, p3); x0 is whichever of p1, p2 is primal.
  Complex r;
  if (coordinate_sum(base) % 2 == 0) {
    r = (f3 - f2) - kI * nu_p1p4 * (f4 - f1);
  } else {
    r = (f1 - f4) - kI * (1.0 / nu_p1p4) * (f3 - f2);
  }
  return std::abs(r) / scale;
}

double four_point_residual_raw(std::span<const Complex> alphas, int x, int y, Complex a1,
                               Complex z) {
  const int d = static_cast<int>(alphas.size());
  const IntVec base(static_cast<std::size_t>(d), 0);
  const Complex f1 = psi_product(alphas, base, z);
  const Complex f2 = psi_product(alphas, unit(d, x), z);
  const Complex f3 = psi_product(alphas, unit(d, y), z);
  const Complex f4 = psi_product(alphas, add(unit(d, x), unit(d, y)), z);
  const double scale = std::max({std::abs(f1), std::abs(f2), std::abs(f3), std::abs(f4)});
  return std::abs(f4 + a1 * f2 - a1 * f3 - f1) / scale;
}

Complex a1_formula(Complex ax, Complex ay) { return -(ax + ay) / (ax - ay); }

}  // namespace

SpectralData::SpectralData(std::vector<Complex> alphas, std::optional<double> reality_modulus)
    : alphas_(std::move(alphas)), modulus_(reality_modulus) {
  if (alphas_.size() < 2) throw InvalidSpectralData("need at least two directions");
  for (std::size_t j = 0; j < alphas_.size(); ++j) {
    const Complex a = alphas_[j];
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || std::abs(a) == 0) {
      throw InvalidSpectralData("alpha_" + std::to_string(j + 1) + " must be finite and nonzero");
    }
    for (std::size_t k = 0; k < j; ++k) {
      const Complex b = alphas_[k];
      if (std::abs(std::imag(a * std::conj(b))) <= 1e-12 * std::abs(a) * std::abs(b)) {
        throw InvalidSpectralData("alpha_" + std::to_string(k + 1) + " and alpha_" +
                                  std::to_string(j + 1) + " are real multiples of each other");
      }
    }
  }
  if (modulus_) {
    const double c = *modulus_;
    if (!(c > 0)) throw InvalidSpectralData("reality modulus must be positive");
    for (std::size_t j = 0; j < alphas_.size(); ++j) {
      if (std::abs(std::abs(alphas_[j]) - c) > 1e-12 * c) {
        throw InvalidSpectralData("|alpha_" + std::to_string(j + 1) + "| = " +
                                  std::to_string(std::abs(alphas_[j])) +
                                  " differs from the reality modulus " + std::to_string(c));
      }
    }
  }
  convention_ = calibrate_conventions(alphas_);
}

double SpectralData::max_modulus() const {
  double m = 0;
  for (Complex a : alphas_) m = std::max(m, std::abs(a));
  return m;
}

SpherePoint SpectralData::tau(SpherePoint z) const {
  if (!modulus_) throw InvalidSpectralData("tau needs a reality modulus");
  if (z.is_infinite()) return Complex(0.0);
  if (z.value() == Complex(0.0)) return SpherePoint::infinity();
  const double c = *modulus_;
  return c * c / std::conj(z.value());
}

Complex wave_function(const SpectralData& sd, const IntVec& n, SpherePoint z) {
  if (static_cast<int>(n.size()) != sd.dimension()) {
    throw InvalidSpectralData("coordinate has length " + std::to_string(n.size()) +
                              ", spectral data has " + std::to_string(sd.dimension()));
  }
  if (z.is_infinite()) return 1.0;
  const Complex w = z.value();
  for (int j = 0; j < sd.dimension(); ++j) {
    const int p = n[static_cast<std::size_t>(j)];
    if (p == 0) continue;
    const Complex a = sd.alpha(j);
    const Complex pole = p > 0 ? a : -a;
    if (std::abs(w - pole) <= 1e-13 * std::abs(a)) {
      throw PoleEvaluation("z is at the pole " + std::string(p > 0 ? "+" : "-") + "alpha_" +
                           std::to_string(j + 1));
    }
  }
  return psi_product(sd.alphas(), n, w);
}

Complex dual_wave_function(const SpectralData& sd, const IntVec& n, SpherePoint z) {
  if (z.is_infinite()) return wave_function(sd, n, z);
  return wave_function(sd, n, -z.value());
}

double cr_residual_for_frame(const SpectralData& sd, const IntVec& base, int x, int y,
                             Complex nu_p1p4, SpherePoint z) {
  IntVec top = add(base, unit(sd.dimension(), x));
  top = add(top, unit(sd.dimension(), y));
  // Pole checks on all four corners happen through wave_function.
  (void)wave_function(sd, base, z);
  (void)wave_function(sd, top, z);
  if (z.is_infinite()) return 0.0;
  return cr_residual_raw(sd.alphas(), base, x, y, nu_p1p4, z.value());
}

WeightConvention calibrate_conventions(std::span<const Complex> alphas) {
  const Complex ax = alphas[0];
  const Complex ay = alphas[1];
  const double scale = std::max(std::abs(ax), std::abs(ay));
  const IntVec base(alphas.size(), 0);
  WeightConvention best;
  best.cr_residual = std::numeric_limits<double>::infinity();
  for (const bool on_p1p4 : {false, true}) {
    for (const int sign : {+1, -1}) {
      WeightConvention c;
      c.ratio_on_p1p4 = on_p1p4;
      c.weight_sign = sign;
      const Complex nu = p1p4_weight(c, ax, ay);
      double worst = 0;
      for (Complex p : kCalibrationPoints) {
        worst = std::max(worst, cr_residual_raw(alphas, base, 0, 1, nu, scale * p));
      }
      if (worst < best.cr_residual) {
        best = c;
        best.cr_residual = worst;
      }
    }
  }
  best.four_point_residual = std::numeric_limits<double>::infinity();
  for (const int sign : {+1, -1}) {
    const Complex a1 = static_cast<double>(sign) * a1_formula(ax, ay);
    double worst = 0;
    for (Complex p : kCalibrationPoints) {
      worst = std::max(worst, four_point_residual_raw(alphas, 0, 1, a1, scale * p));
    }
    if (worst < best.four_point_residual) {
      best.a1_sign = sign;
      best.four_point_residual = worst;
    }
  }
  return best;
}

FaceWeights weight_of_face(const SpectralData& sd, const FaceFrame& frame) {
  if (frame.x == frame.y) throw DegenerateDirections("face frame has equal labels");
  const Complex ax = sd.alpha(frame.x);
  const Complex ay = sd.alpha(frame.y);
  if (std::abs(ax + ay) < 1e-13 * (std::abs(ax) + std::abs(ay))) {
    throw DegenerateDirections("alpha_" + std::to_string(frame.x + 1) + " + alpha_" +
                               std::to_string(frame.y + 1) + " vanishes");
  }
  FaceWeights w;
  w.p1p4 = p1p4_weight(sd.convention(), ax, ay);
  w.p2p3 = 1.0 / w.p1p4;
  w.primal = frame.p1_primal ? w.p1p4 : w.p2p3;
  w.dual = frame.p1_primal ? w.p2p3 : w.p1p4;
  return w;
}

FourPointCoefficients four_point_coefficients(const SpectralData& sd, const FaceFrame& frame) {
  const Complex ax = sd.alpha(frame.x);
  const Complex ay = sd.alpha(frame.y);
  if (std::abs(ax - ay) < 1e-13 * (std::abs(ax) + std::abs(ay))) {
    throw DegenerateDirections("alpha_" + std::to_string(frame.x + 1) + " equals alpha_" +
                               std::to_string(frame.y + 1));
  }
  const Complex a1 = static_cast<double>(sd.convention().a1_sign) * a1_formula(ax, ay);
  return {a1, -a1, -1.0};
}

WeightFunction::WeightFunction(std::vector<FaceWeights> per_face)
    : per_face_(std::move(per_face)) {}

Complex WeightFunction::diagonal(const QuadGraph& g, int face, int u, int v) const {
  const Face& f = g.faces()[static_cast<std::size_t>(face)];
  const FaceWeights& w = per_face_.at(static_cast<std::size_t>(face));
  const auto is_pair = [u, v](int a, int b) { return (a == u && b == v) || (a == v && b == u); };
  if (is_pair(f[0], f[2])) return w.primal;
  if (is_pair(f[1], f[3])) return w.dual;
  throw MalformedFace(std::to_string(u) + "-" + std::to_string(v) + " is not a diagonal of face " +
                      std::to_string(face));
}

double WeightFunction::max_abs_imag() const {
  double m = 0;
  for (const FaceWeights& w : per_face_) {
    m = std::max({m, std::abs(w.primal.imag()), std::abs(w.dual.imag())});
  }
  return m;
}

double WeightFunction::max_duality_defect() const {
  double m = 0;
  for (const FaceWeights& w : per_face_) m = std::max(m, std::abs(w.primal * w.dual - 1.0));
  return m;
}

WeightFunction build_weights(const SpectralData& sd, const QuadGraph& g) {
  if (g.dimension() != sd.dimension()) {
    throw InvalidSpectralData("graph dimension " + std::to_string(g.dimension()) +
                              " differs from spectral dimension " +
                              std::to_string(sd.dimension()));
  }
  std::vector<FaceWeights> per_face;
  per_face.reserve(static_cast<std::size_t>(g.face_count()));
  for (int f = 0; f < g.face_count(); ++f) {
    try {
      per_face.push_back(weight_of_face(sd, face_frame(g, f)));
    } catch (const DegenerateDirections& e) {
      throw DegenerateDirections("face " + std::to_string(f) + ": " + e.what());
    }
  }
  return WeightFunction(std::move(per_face));
}

nlohmann::json to_json(const SpectralData& sd) {
  nlohmann::json alphas = nlohmann::json::array();
  for (Complex a : sd.alphas()) alphas.push_back({a.real(), a.imag()});
  nlohmann::json j{{"alphas", std::move(alphas)}};
  if (sd.reality_modulus()) j["reality_modulus"] = *sd.reality_modulus();
  return j;
}

SpectralData spectral_from_json(const nlohmann::json& j) {
  try {
    std::vector<Complex> alphas;
    for (const auto& a : j.at("alphas")) {
      const auto v = a.get<std::vector<double>>();
      if (v.size() != 2) throw InvalidSpectralData("alpha entries must be [re, im]");
      alphas.emplace_back(v[0], v[1]);
    }
    std::optional<double> c;
    if (j.contains("reality_modulus")) c = j.at("reality_modulus").get<double>();
    return SpectralData(std::move(alphas), c);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpectralData(e.what());
  }
}

}  // namespace fgl
