#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fgl/green.hpp"
#include "fgl/theta.hpp"

namespace fgl {

inline constexpr const char* kToolName = "fgl";
const char* tool_version();

inline const std::vector<std::string> kExperiments{"weights", "psi-check",   "contours",   "green",
                                                   "verify-lh", "growth", "theta-check"};

struct GraphSource {
  std::string generator = "square";  // square | multigrid | file
  int width = 10;
  int height = 10;
  int directions = 5;
  std::vector<double> offsets;  // multigrid; default 0.1 + 0.13 j
  double radius = 4.0;
  std::string file;
};

/// Every field has a documented default except the spectral data, which
/// experiments other than theta-check require.
struct RunConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  int resolution = LevelSetTracer::kDefaultResolution;
  std::optional<double> tolerance;  // asserted tolerance of the primary check
  std::string output_dir = "fgl-out";

  GraphSource graph;

  std::vector<Complex> alphas;
  std::optional<double> reality_modulus;

  std::vector<Complex> lambdas;  // explicit points; otherwise lambda_count seeded draws
  int lambda_count = 5;
  double lambda_box = 2.0;  // draws are uniform in [-box, box]^2, scaled by max |alpha|

  std::optional<IntVec> source;
  int patch_radius = 4;
  int samples = 0;  // per-experiment default when 0

  int theta_genus = 3;
  std::string theta_file;
};

/// INI document with sections [run], [graph], [spectral], [lambda], [green],
/// [theta]. Unknown keys, duplicates, malformed values and missing required
/// fields raise ConfigError naming the line or field.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Experiment-specific required fields; throws ConfigError.
void validate_config(const RunConfig& c);

nlohmann::json to_json(const RunConfig& c);
/// Hex SHA-256 of the canonical JSON of the config.
std::string config_hash(const RunConfig& c);

struct Check {
  std::string name;
  double value = 0;
  double tolerance = 0;
  bool asserted = true;  // reported-only checks never fail the run
  bool pass = true;
};

struct RunResult {
  nlohmann::json summary;
  std::vector<Check> checks;
  std::vector<std::filesystem::path> files;
  bool pass = true;
};

/// Runs the configured experiment, writes its artifacts and summary.json into
/// output_dir and returns the summary. Module errors are rethrown with the
/// experiment name prefixed.
RunResult run(const RunConfig& c);

/// Canonical text of a summary: two-space indentation, sorted keys, shortest
/// round-trip doubles, trailing newline.
std::string summary_text(const nlohmann::json& summary);

struct DecayRow {
  int series = 0;  // index of the lambda sample
  int l1 = 0;
  double max_abs_g = 0;
  double max_ratio = 0;
};

struct PlotArtifacts {
  std::vector<Contour> contours;
  std::vector<DecayRow> decay;
};

/// One SVG per contour (contour_<i>.svg) and decay.csv. Returns the written
/// paths; with nothing to emit it writes nothing and warns on stderr.
std::vector<std::filesystem::path> emit_plots(const PlotArtifacts& a,
                                              const std::filesystem::path& dir);

void write_contour_svg(std::ostream& os, const Contour& c);
void write_decay_csv(std::ostream& os, const std::vector<DecayRow>& rows);

}  // namespace fgl
