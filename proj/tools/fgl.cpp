#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "fgl/cli_io.hpp"
#include "fgl/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Verification experiments for discrete Green's functions on quad-graphs"};
  std::string config_path;
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> resolution;
  std::optional<double> tolerance;
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--experiment", experiment, "experiment name")
      ->check(CLI::IsMember(fgl::kExperiments));
  app.add_option("--seed", seed, "64-bit seed for the random samples");
  app.add_option("--out", out, "output directory (default $FGL_OUTPUT_DIR, then run.output)");
  app.add_option("--resolution", resolution, "contour grid resolution per chart");
  app.add_option("--tolerance", tolerance, "tolerance of the experiment's primary check");
  app.set_version_flag("--version", fgl::tool_version());
  CLI11_PARSE(app, argc, argv);

  try {
    fgl::RunConfig c = config_path.empty() ? fgl::RunConfig{} : fgl::load_config(config_path);
    if (!experiment.empty()) c.experiment = experiment;
    if (seed) c.seed = *seed;
    if (resolution) c.resolution = *resolution;
    if (tolerance) c.tolerance = *tolerance;
    if (!out.empty()) {
      c.output_dir = out;
    } else if (const char* env = std::getenv("FGL_OUTPUT_DIR"); env && *env) {
      c.output_dir = env;
    }
    const fgl::RunResult r = fgl::run(c);
    for (const fgl::Check& k : r.checks) {
      std::cout << (k.asserted ? (k.pass ? "pass   " : "FAIL   ") : "report ") << k.name << " = "
                << k.value << '\n';
    }
    std::cout << "summary: " << (std::filesystem::path(c.output_dir) / "summary.json").string()
              << '\n';
    return r.pass ? 0 : 1;
  } catch (const fgl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
