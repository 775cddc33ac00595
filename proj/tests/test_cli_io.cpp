#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fgl/cli_io.hpp"
#include "fgl/errors.hpp"

using namespace fgl;
namespace fs = std::filesystem;

namespace {

const char* kSquareAlphas = "alphas = 1,0; 0,1\n";

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fgl_test_cli_io_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Check& find_check(const RunResult& r, const std::string& name) {
  for (const Check& c : r.checks) {
    if (c.name == name) return c;
  }
  FAIL("missing check " << name);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const RunConfig c = parse_config("[run]\nexperiment = theta-check\n");
  CHECK(c.experiment == "theta-check");
  CHECK(c.seed == 1);
  CHECK(c.resolution == 1024);
  CHECK_FALSE(c.tolerance.has_value());
  CHECK(c.graph.generator == "square");
  CHECK(c.graph.width == 10);
  CHECK(c.lambda_count == 5);
  CHECK(c.patch_radius == 4);
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("config errors name the field or line") {
  const auto message = [](const std::string& text) {
    try {
      validate_config(parse_config(text));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("[run]\nexperiment = green\n").find("spectral.alphas") != std::string::npos);
  CHECK(message("[run]\nexperiment = green\nexperiment = weights\n").find("line 3") != std::string::npos);
  CHECK(message("[run]\nexperiment = green\ncolour = red\n").find("run.colour") != std::string::npos);
  CHECK(message("[plot]\nx = 1\n").find("plot") != std::string::npos);
  CHECK(message("[run]\nexperiment = weights\n[spectral]\nalphas = 1,0; 0\n").find("spectral.alphas") !=
        std::string::npos);
  CHECK(message("[run]\nexperiment = weights\nseed = x\n").find("run.seed") != std::string::npos);
  CHECK(message("[run]\nexperiment = nothing\n").find("run.experiment") != std::string::npos);
  CHECK(message("[run]\nexperiment = theta-check\nresolution = 15\n").find("run.resolution") !=
        std::string::npos);
}

TEST_CASE("roots expand to unit directions with the reality modulus") {
  const RunConfig c = parse_config("[spectral]\nroots = 5\nphase = 0.2\nscale = 2\n");
  REQUIRE(c.alphas.size() == 5);
  CHECK(std::abs(c.alphas[1] - std::polar(2.0, 2 * kPi / 5 + 0.2)) < 1e-15);
  CHECK(c.reality_modulus == 2.0);
  CHECK_THROWS_AS(parse_config("[spectral]\nroots = 3\nalphas = 1,0; 0,1\n"), ConfigError);
}

TEST_CASE("config hash follows the content") {
  RunConfig a = parse_config(std::string("[run]\nexperiment = weights\n[spectral]\n") + kSquareAlphas);
  RunConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 64);
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.output_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("psi-check on the square lattice passes") {
  RunConfig c = parse_config(std::string("[run]\nexperiment = psi-check\nsamples = 10\n[spectral]\n") +
                             kSquareAlphas);
  c.output_dir = fresh_dir("psi").string();
  const RunResult r = run(c);
  CHECK(r.pass);
  CHECK(find_check(r, "max_cr_residual").value <= 1e-10);
  CHECK(fs::exists(fs::path(c.output_dir) / "summary.json"));
  CHECK(fs::exists(fs::path(c.output_dir) / "psi_faces.csv"));
  CHECK(r.summary.at("config_hash") == config_hash(c));
  CHECK(r.summary.at("version") == tool_version());
}

TEST_CASE("weights on a Penrose patch are real") {
  RunConfig c = parse_config(
      "[run]\nexperiment = weights\n[graph]\ngenerator = multigrid\ndirections = 5\nradius = 3\n"
      "[spectral]\nroots = 5\nphase = 0.3\n");
  c.output_dir = fresh_dir("weights").string();
  const RunResult r = run(c);
  CHECK(r.pass);
  CHECK(find_check(r, "max_abs_imag_nu").asserted);
  CHECK(find_check(r, "max_abs_imag_nu").value <= 1e-12);
}

TEST_CASE("green experiment writes its artifacts and reports the delta check") {
  RunConfig c = parse_config(std::string("[run]\nexperiment = green\nresolution = 256\n[spectral]\n") +
                             kSquareAlphas + "[lambda]\npoints = 3,0.5\n[green]\npatch_radius = 3\n");
  c.output_dir = fresh_dir("green").string();
  const RunResult r = run(c);
  for (const char* f : {"green.csv", "decay.csv", "summary.json"}) {
    CHECK(fs::exists(fs::path(c.output_dir) / f));
  }
  const Check& delta = find_check(r, "max_LG_offdiag");
  CHECK(delta.asserted);
  CHECK(delta.pass == (delta.value <= 1e-6));
  CHECK(find_check(r, "oracle_max_dev").pass);
  CHECK(slurp(fs::path(c.output_dir) / "decay.csv").rfind("series,l1,max_abs_G,max_ratio\n", 0) == 0);
}

TEST_CASE("same seed, same summary bytes") {
  const std::string text = std::string("[run]\nexperiment = contours\nresolution = 256\nsamples = 4\nseed = 11\n"
                                       "[spectral]\n") + kSquareAlphas;
  RunConfig a = parse_config(text);
  RunConfig b = parse_config(text);
  a.output_dir = fresh_dir("det_a").string();
  b.output_dir = fresh_dir("det_b").string();
  run(a);
  run(b);
  const std::string sa = slurp(fs::path(a.output_dir) / "summary.json");
  CHECK(!sa.empty());
  CHECK(sa == slurp(fs::path(b.output_dir) / "summary.json"));
  CHECK(fs::exists(fs::path(a.output_dir) / "contour_0.svg"));
}

TEST_CASE("plot emission") {
  const fs::path dir = fresh_dir("plots");
  CHECK(emit_plots({}, dir).empty());
  CHECK_FALSE(fs::exists(dir));

  const LevelSetTracer tracer(SpectralData({1.0, kI}), 128);
  PlotArtifacts a;
  a.contours.push_back(tracer.trace(MomentumVector{1.0, 0.0}, Complex(0.8, 0.3)));
  a.decay.push_back({0, 2, 0.5, 1.0});
  const auto files = emit_plots(a, dir);
  CHECK(files.size() == 2);
  const std::string svg = slurp(dir / "contour_0.svg");
  CHECK(svg.find("<path") != std::string::npos);
  CHECK(svg.find("<polygon") != std::string::npos);
}
