#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "fgl/cli_io.hpp"
#include "fgl/errors.hpp"

namespace fgl {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kSchema{
    {"run", {"experiment", "seed", "resolution", "tolerance", "output", "samples"}},
    {"graph", {"generator", "width", "height", "directions", "offsets", "radius", "file"}},
    {"spectral", {"alphas", "roots", "phase", "scale", "reality_modulus"}},
    {"lambda", {"points", "count", "box"}},
    {"green", {"source", "patch_radius"}},
    {"theta", {"genus", "file"}},
};

std::string trimmed(const std::string& s) { return boost::algorithm::trim_copy(s); }

double parse_double(const std::string& field, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(trimmed(text), &used);
  } catch (const std::exception&) {
    throw ConfigError(field + ": '" + text + "' is not a number");
  }
  if (used != trimmed(text).size() || !std::isfinite(v)) {
    throw ConfigError(field + ": '" + text + "' is not a finite number");
  }
  return v;
}

long long parse_integer(const std::string& field, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(trimmed(text), &used);
  } catch (const std::exception&) {
    throw ConfigError(field + ": '" + text + "' is not an integer");
  }
  if (used != trimmed(text).size()) throw ConfigError(field + ": '" + text + "' is not an integer");
  return v;
}

int parse_int(const std::string& field, const std::string& text) {
  const long long v = parse_integer(field, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(field + ": value out of range");
  }
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& text, const char* sep) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(sep));
  for (auto& p : parts) p = trimmed(p);
  if (parts.size() == 1 && parts[0].empty()) parts.clear();
  return parts;
}

std::vector<double> parse_doubles(const std::string& field, const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ",")) out.push_back(parse_double(field, p));
  return out;
}

// "re,im; re,im; ..."
std::vector<Complex> parse_complexes(const std::string& field, const std::string& text) {
  std::vector<Complex> out;
  for (const auto& item : split(text, ";")) {
    const auto xs = parse_doubles(field, item);
    if (xs.size() != 2) throw ConfigError(field + ": expected 're,im' pairs separated by ';'");
    out.emplace_back(xs[0], xs[1]);
  }
  return out;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream is{std::string(text)};
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig c;
  bool have_roots = false;
  int roots = 0;
  double phase = 0;
  double scale = 1;
  for (const auto& [section, body] : tree) {
    const auto schema = kSchema.find(section);
    if (schema == kSchema.end()) throw ConfigError("unknown section or key '" + section + "'");
    if (!body.data().empty()) throw ConfigError("'" + section + "' must be a section");
    for (const auto& [key, node] : body) {
      const std::string field = section + "." + key;
      if (schema->second.count(key) == 0) throw ConfigError("unknown key '" + field + "'");
      const std::string v = trimmed(node.data());
      if (field == "run.experiment") c.experiment = v;
      else if (field == "run.seed") {
        const long long s = parse_integer(field, v);
        if (s < 0) throw ConfigError(field + ": must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
      }
      else if (field == "run.resolution") c.resolution = parse_int(field, v);
      else if (field == "run.tolerance") c.tolerance = parse_double(field, v);
      else if (field == "run.output") c.output_dir = v;
      else if (field == "run.samples") c.samples = parse_int(field, v);
      else if (field == "graph.generator") c.graph.generator = v;
      else if (field == "graph.width") c.graph.width = parse_int(field, v);
      else if (field == "graph.height") c.graph.height = parse_int(field, v);
      else if (field == "graph.directions") c.graph.directions = parse_int(field, v);
      else if (field == "graph.offsets") c.graph.offsets = parse_doubles(field, v);
      else if (field == "graph.radius") c.graph.radius = parse_double(field, v);
      else if (field == "graph.file") c.graph.file = v;
      else if (field == "spectral.alphas") c.alphas = parse_complexes(field, v);
      else if (field == "spectral.roots") {
        roots = parse_int(field, v);
        have_roots = true;
      }
      else if (field == "spectral.phase") phase = parse_double(field, v);
      else if (field == "spectral.scale") scale = parse_double(field, v);
      else if (field == "spectral.reality_modulus") c.reality_modulus = parse_double(field, v);
      else if (field == "lambda.points") c.lambdas = parse_complexes(field, v);
      else if (field == "lambda.count") c.lambda_count = parse_int(field, v);
      else if (field == "lambda.box") c.lambda_box = parse_double(field, v);
      else if (field == "green.source") {
        IntVec n;
        for (const auto& p : split(v, ",")) n.push_back(parse_int(field, p));
        if (n.empty()) throw ConfigError(field + ": empty coordinate list");
        c.source = n;
      }
      else if (field == "green.patch_radius") c.patch_radius = parse_int(field, v);
      else if (field == "theta.genus") c.theta_genus = parse_int(field, v);
      else if (field == "theta.file") c.theta_file = v;
    }
  }
  if (have_roots) {
    if (!c.alphas.empty()) throw ConfigError("spectral.roots: conflicts with spectral.alphas");
    if (roots < 2) throw ConfigError("spectral.roots: need at least 2 directions");
    if (!(scale > 0)) throw ConfigError("spectral.scale: must be positive");
    for (int j = 0; j < roots; ++j) c.alphas.push_back(std::polar(scale, 2 * kPi * j / roots + phase));
    if (!c.reality_modulus) c.reality_modulus = scale;
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const RunConfig& c) {
  if (c.experiment.empty()) throw ConfigError("run.experiment is required");
  if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end()) {
    throw ConfigError("run.experiment: unknown experiment '" + c.experiment + "'");
  }
  if (c.experiment != "theta-check" && c.alphas.empty()) {
    throw ConfigError("spectral.alphas is required for experiment " + c.experiment);
  }
  if (c.resolution < 16 || c.resolution % 2 != 0) {
    throw ConfigError("run.resolution: must be even and at least 16");
  }
  if (c.tolerance && !(*c.tolerance > 0)) throw ConfigError("run.tolerance: must be positive");
  if (c.samples < 0) throw ConfigError("run.samples: must be non-negative");
  if (c.output_dir.empty()) throw ConfigError("run.output: must not be empty");
  const std::string& gen = c.graph.generator;
  if (gen != "square" && gen != "multigrid" && gen != "file") {
    throw ConfigError("graph.generator: expected square, multigrid or file");
  }
  if (gen == "square" && (c.graph.width < 2 || c.graph.height < 2)) {
    throw ConfigError("graph.width/graph.height: must be at least 2");
  }
  if (gen == "multigrid") {
    if (c.graph.directions < 3) throw ConfigError("graph.directions: need at least 3");
    if (!c.graph.offsets.empty() &&
        static_cast<int>(c.graph.offsets.size()) != c.graph.directions) {
      throw ConfigError("graph.offsets: need one offset per direction");
    }
    if (!(c.graph.radius > 0)) throw ConfigError("graph.radius: must be positive");
  }
  if (gen == "file" && c.graph.file.empty()) throw ConfigError("graph.file is required");
  if (c.lambdas.empty() && c.lambda_count < 1) throw ConfigError("lambda.count: must be positive");
  if (!(c.lambda_box > 0)) throw ConfigError("lambda.box: must be positive");
  if (c.patch_radius < 2) throw ConfigError("green.patch_radius: must be at least 2");
  if (c.theta_genus < 1 || c.theta_genus > 4) throw ConfigError("theta.genus: must be 1 to 4");
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json alphas = nlohmann::json::array();
  for (Complex a : c.alphas) alphas.push_back({a.real(), a.imag()});
  nlohmann::json lambdas = nlohmann::json::array();
  for (Complex l : c.lambdas) lambdas.push_back({l.real(), l.imag()});
  nlohmann::json j{
      {"experiment", c.experiment},
      {"seed", c.seed},
      {"resolution", c.resolution},
      {"tolerance", c.tolerance ? nlohmann::json(*c.tolerance) : nlohmann::json(nullptr)},
      {"graph",
       {{"generator", c.graph.generator},
        {"width", c.graph.width},
        {"height", c.graph.height},
        {"directions", c.graph.directions},
        {"offsets", c.graph.offsets},
        {"radius", c.graph.radius},
        {"file", c.graph.file}}},
      {"alphas", std::move(alphas)},
      {"reality_modulus",
       c.reality_modulus ? nlohmann::json(*c.reality_modulus) : nlohmann::json(nullptr)},
      {"lambdas", std::move(lambdas)},
      {"lambda_count", c.lambda_count},
      {"lambda_box", c.lambda_box},
      {"source", c.source ? nlohmann::json(*c.source) : nlohmann::json(nullptr)},
      {"patch_radius", c.patch_radius},
      {"samples", c.samples},
      {"theta_genus", c.theta_genus},
      {"theta_file", c.theta_file}};
  // The output directory does not change results and stays out of the hash.
  return j;
}

std::string config_hash(const RunConfig& c) {
  const std::string text = to_json(c).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

}  // namespace fgl
