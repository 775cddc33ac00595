#include <cmath>
#include <random>

#include "doctest.h"
#include "fgl/errors.hpp"
#include "fgl/spectral.hpp"

using namespace fgl;

namespace {

Complex random_point(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  return scale * Complex(u(rng), u(rng));
}

std::vector<Complex> roots_of_unity(int d) {
  std::vector<Complex> out;
  for (int j = 0; j < d; ++j) out.push_back(std::polar(1.0, 2 * kPi * j / d));
  return out;
}

// CR residual written straight from the stored face quadruple.
double face_cr_residual(const SpectralData& sd, const QuadGraph& g, const WeightFunction& w,
                        int f, Complex z) {
  const Face& q = g.faces()[static_cast<std::size_t>(f)];
  Complex v[4];
  double scale = 0;
  for (int k = 0; k < 4; ++k) {
    v[k] = wave_function(sd, g.vertex(q[static_cast<std::size_t>(k)]).n, z);
    scale = std::max(scale, std::abs(v[k]));
  }
  return std::abs((v[3] - v[1]) - kI * w.face(f).primal * (v[2] - v[0])) / scale;
}

}  // namespace

TEST_CASE("wave function values") {
  const SpectralData sd({1.0, kI});
  CHECK(wave_function(sd, {0, 0}, Complex(0.3, -1.7)) == Complex(1.0));
  CHECK(wave_function(sd, {3, -2}, SpherePoint::infinity()) == Complex(1.0));
  const Complex psi = wave_function(sd, {1, 0}, Complex(0, 2));
  CHECK(std::abs(psi - Complex(3, -4) / 5.0) < 1e-15);
  const Complex dual = dual_wave_function(sd, {1, 0}, Complex(0, 2));
  CHECK(std::abs(dual - Complex(3, 4) / 5.0) < 1e-15);
  CHECK(std::abs(psi * dual - 1.0) < 1e-15);
  CHECK(dual_wave_function(sd, {2, 5}, SpherePoint::infinity()) == Complex(1.0));
}

TEST_CASE("value at the origin is an exact sign") {
  const SpectralData sd(roots_of_unity(5));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> u(-6, 6);
  for (int t = 0; t < 200; ++t) {
    IntVec n(5);
    for (int& x : n) x = u(rng);
    const Complex expected = coordinate_sum(n) % 2 == 0 ? 1.0 : -1.0;
    CHECK(wave_function(sd, n, Complex(0.0)) == expected);
  }
}

TEST_CASE("poles are rejected") {
  const SpectralData sd({1.0, kI});
  CHECK_THROWS_AS(wave_function(sd, {1, 0}, Complex(1.0)), PoleEvaluation);
  CHECK_THROWS_AS(wave_function(sd, {0, -1}, Complex(0, -1)), PoleEvaluation);
  CHECK(wave_function(sd, {1, 0}, Complex(-1.0)) == Complex(0.0));
  CHECK_THROWS_AS(dual_wave_function(sd, {1, 0}, Complex(-1.0)), PoleEvaluation);
}

TEST_CASE("invalid spectral data") {
  CHECK_THROWS_AS(SpectralData({1.0, 0.0}), InvalidSpectralData);
  CHECK_THROWS_AS(SpectralData({1.0, -3.0}), InvalidSpectralData);
  CHECK_THROWS_AS(SpectralData({1.0, 2.0 * kI}, 1.0), InvalidSpectralData);
  CHECK_NOTHROW(SpectralData({1.0, kI}, 1.0));
}

TEST_CASE("calibrated weights on the square lattice") {
  const SpectralData sd({1.0, kI});
  const QuadGraph g = build_square_lattice_patch(4, 4);
  const WeightFunction w = build_weights(sd, g);
  for (const FaceWeights& fw : w.faces()) {
    CHECK(std::abs(fw.primal - 1.0) < 1e-15);
    CHECK(std::abs(fw.dual - 1.0) < 1e-15);
  }
  CHECK(sd.convention().cr_residual < 1e-14);
}

TEST_CASE("half-angle weights") {
  for (double theta : {0.3, 1.1, 2.0, 2.9}) {
    const SpectralData sd({1.0, std::polar(1.0, theta)});
    const QuadGraph g = build_square_lattice_patch(1, 1);
    const FaceWeights fw = weight_of_face(sd, face_frame(g, 0));
    CHECK(std::abs(fw.p1p4 - std::tan(theta / 2)) < 1e-14);
    CHECK(std::abs(fw.p2p3 - 1.0 / std::tan(theta / 2)) < 1e-13);
    // The printed closed form equals -nu(p1,p4).
    const Complex printed = kI * (sd.alpha(1) - sd.alpha(0)) / (sd.alpha(1) + sd.alpha(0));
    CHECK(std::abs(printed + fw.p1p4) < 1e-14);
  }
}

TEST_CASE("weights are scale invariant") {
  const Complex c(0.4, -2.3);
  const SpectralData a({Complex(1, 0.2), Complex(-0.3, 1.4)});
  const SpectralData b({c * Complex(1, 0.2), c * Complex(-0.3, 1.4)});
  const QuadGraph g = build_square_lattice_patch(1, 1);
  const FaceWeights wa = weight_of_face(a, face_frame(g, 0));
  const FaceWeights wb = weight_of_face(b, face_frame(g, 0));
  CHECK(std::abs(wa.p1p4 - wb.p1p4) < 1e-14);
}

TEST_CASE("four-point coefficients") {
  const SpectralData sd({1.0, kI});
  const QuadGraph g = build_square_lattice_patch(2, 2);
  const FourPointCoefficients c = four_point_coefficients(sd, face_frame(g, 0));
  CHECK(std::abs(c.a1 - (-kI)) < 1e-15);
  CHECK(c.a1 + c.a2 == Complex(0.0));
  CHECK(c.a3 == Complex(-1.0));
}

TEST_CASE("four-point and CR identities on a Penrose patch") {
  const std::vector<double> offsets{0.11, 0.23, 0.37, 0.41, 0.53};
  const auto dirs = roots_of_unity(5);
  const QuadGraph g = build_multigrid_quadgraph(dirs, offsets, 4.0);
  std::vector<Complex> alphas;
  for (Complex a : dirs) alphas.push_back(a * std::polar(1.0, 0.3));
  const SpectralData sd(alphas, 1.0);
  const WeightFunction w = build_weights(sd, g);
  CHECK(w.max_abs_imag() < 1e-12);
  CHECK(w.max_duality_defect() < 1e-12);
  std::mt19937_64 rng(11);
  double worst_cr = 0;
  double worst_fp = 0;
  for (int f = 0; f < g.face_count(); ++f) {
    const FaceFrame fr = face_frame(g, f);
    const FourPointCoefficients c = four_point_coefficients(sd, fr);
    for (int t = 0; t < 5; ++t) {
      const Complex z = random_point(rng, 1.0);
      worst_cr = std::max(worst_cr, face_cr_residual(sd, g, w, f, z));
      const Complex f1 = wave_function(sd, g.vertex(fr.p1).n, z);
      const Complex f2 = wave_function(sd, g.vertex(fr.p2).n, z);
      const Complex f3 = wave_function(sd, g.vertex(fr.p3).n, z);
      const Complex f4 = wave_function(sd, g.vertex(fr.p4).n, z);
      const double scale = std::max({std::abs(f1), std::abs(f2), std::abs(f3), std::abs(f4)});
      worst_fp = std::max(worst_fp, std::abs(f4 + c.a1 * f2 + c.a2 * f3 + c.a3 * f1) / scale);
    }
  }
  CHECK(worst_cr < 1e-10);
  CHECK(worst_fp < 1e-10);
}

TEST_CASE("tau symmetry and modulus") {
  const double c = 1.7;
  std::vector<Complex> alphas;
  for (Complex a : roots_of_unity(3)) alphas.push_back(c * a * std::polar(1.0, 0.2));
  const SpectralData sd(alphas, c);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(-4, 4);
  for (int t = 0; t < 100; ++t) {
    IntVec n(3);
    for (int& x : n) x = u(rng);
    const Complex z = random_point(rng, c);
    const Complex psi = wave_function(sd, n, z);
    const Complex mirrored = wave_function(sd, n, sd.tau(z));
    const double sign = coordinate_sum(n) % 2 == 0 ? 1.0 : -1.0;
    CHECK(std::abs(mirrored - sign * std::conj(psi)) <= 1e-12 * std::abs(psi));
    // |Psi| = exp(-<n, Im p>) with Im p_j = ln|(z - a_j)/(z + a_j)|.
    double dot = 0;
    for (int j = 0; j < 3; ++j) {
      dot += n[static_cast<std::size_t>(j)] * std::log(std::abs((z - alphas[static_cast<std::size_t>(j)]) /
                                                               (z + alphas[static_cast<std::size_t>(j)])));
    }
    CHECK(std::abs(std::abs(psi) - std::exp(-dot)) <= 1e-12 * std::exp(-dot));
  }
  CHECK(sd.tau(SpherePoint::infinity()) == SpherePoint(Complex(0.0)));
  CHECK(sd.tau(Complex(0.0)).is_infinite());
  CHECK(std::abs(sd.tau(alphas[0]).value() - alphas[0]) < 1e-15);
}

TEST_CASE("JSON round trip") {
  const SpectralData sd({1.0, kI}, 1.0);
  const SpectralData back = spectral_from_json(to_json(sd));
  CHECK(back.alpha(1) == kI);
  CHECK(back.reality_modulus() == 1.0);
}
