#include "pdav/config.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace pdav {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void reject_unknown(const json& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : node.items()) {
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& node, const std::string& path, const std::string& key, double fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  return v.get<double>();
}

int integer(const json& node, const std::string& path, const std::string& key, int fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<int>();
}

Vec3 vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) fail(path, "expected an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out[i] = v[i].get<double>();
  }
  return out;
}

Mat3 mat3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) fail(path, "expected a 3x3 array");
  Mat3 out;
  for (int i = 0; i < 3; ++i) out.row(i) = vec3(v[i], path + "[" + std::to_string(i) + "]").transpose();
  return out;
}

// Re-runs a module validator and prefixes nothing: validators already name the field.
template <typename F>
void validated(F&& f) {
  try {
    f();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  } catch (const GeometryError& e) {
    throw ConfigError(e.what());
  }
}

void parse_plant(const json& node, PlantParams& p) {
  const std::string path = "plant";
  reject_unknown(node, path, {"inertia", "mass", "axle_length", "gravity", "drag_coeff", "thrust_coeff"});
  if (node.contains("inertia")) p.inertia = mat3(node.at("inertia"), "plant.inertia");
  p.mass = number(node, path, "mass", p.mass);
  p.axle_length = number(node, path, "axle_length", p.axle_length);
  p.gravity = number(node, path, "gravity", p.gravity);
  p.drag_coeff = number(node, path, "drag_coeff", p.drag_coeff);
  p.thrust_coeff = number(node, path, "thrust_coeff", p.thrust_coeff);
  validated([&] { p.validate(); });
}

void parse_gains(const json& node, GainSet& g) {
  const std::string path = "gains";
  reject_unknown(node, path, {"attitude_gain", "rate_weight", "convergence_rate", "spin_rate"});
  g.attitude_gain = number(node, path, "attitude_gain", g.attitude_gain);
  g.rate_weight = number(node, path, "rate_weight", g.rate_weight);
  g.convergence_rate = number(node, path, "convergence_rate", g.convergence_rate);
  g.spin_rate = number(node, path, "spin_rate", g.spin_rate);
  validated([&] { g.validate(); });
}

void parse_trajectory(const json& node, TrajectoryConfig& t) {
  const std::string path = "trajectory";
  reject_unknown(node, path, {"segments", "duration"});
  if (node.contains("segments")) {
    const json& segs = node.at("segments");
    if (!segs.is_array()) fail("trajectory.segments", "expected an array");
    t.segments.clear();
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string sp = "trajectory.segments[" + std::to_string(i) + "]";
      const json& s = segs[i];
      reject_unknown(s, sp, {"axis", "angle", "t_start", "t_end"});
      for (const char* key : {"axis", "angle", "t_start", "t_end"}) {
        if (!s.contains(key)) fail(join(sp, key), "missing");
      }
      ManeuverSegment seg;
      const Vec3 axis = vec3(s.at("axis"), sp + ".axis");
      if (!(axis.norm() > 0.0)) fail(sp + ".axis", "must be non-zero");
      seg.axis = UnitVec::normalized(axis);
      seg.angle = number(s, sp, "angle", 0.0);
      seg.t_start = number(s, sp, "t_start", 0.0);
      seg.t_end = number(s, sp, "t_end", 0.0);
      t.segments.push_back(seg);
    }
  }
  t.duration = number(node, path, "duration", t.duration);
}

void parse_integrator(const json& node, IntegratorConfig& c) {
  const std::string path = "integrator";
  reject_unknown(node, path, {"step", "reorthonormalize_every", "record_decimation"});
  c.step = number(node, path, "step", c.step);
  c.reorthonormalize_every = integer(node, path, "reorthonormalize_every", c.reorthonormalize_every);
  c.record_decimation = integer(node, path, "record_decimation", c.record_decimation);
  validated([&] { c.validate(); });
}

void parse_seeds(const json& node, SeedSettings& s) {
  const std::string path = "seeds";
  reject_unknown(node, path, {"epsilon", "varsigma", "sigma", "count", "secondary", "desired_epsilon", "desired_varsigma"});
  s.saddle.epsilon = number(node, path, "epsilon", s.saddle.epsilon);
  s.saddle.varsigma = number(node, path, "varsigma", s.saddle.varsigma);
  if (node.contains("sigma")) {
    const json& v = node.at("sigma");
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail("seeds.sigma", "expected [real, imag]");
    }
    s.saddle.sigma = cdouble(v[0].get<double>(), v[1].get<double>());
  }
  s.count = integer(node, path, "count", s.count);
  if (s.count < 1) fail("seeds.count", "must be >= 1");
  if (node.contains("secondary")) {
    const json& v = node.at("secondary");
    const std::string mode = v.is_string() ? v.get<std::string>() : "";
    if (mode == "literal") {
      s.saddle.secondary = SecondaryMode::literal;
    } else if (mode == "spin_mode") {
      s.saddle.secondary = SecondaryMode::spin_mode;
    } else {
      fail("seeds.secondary", "expected \"literal\" or \"spin_mode\"");
    }
  }
  s.desired_epsilon = number(node, path, "desired_epsilon", s.desired_epsilon);
  s.desired_varsigma = number(node, path, "desired_varsigma", s.desired_varsigma);
  if (s.desired_epsilon < 0.0) fail("seeds.desired_epsilon", "must be >= 0");
  if (s.desired_varsigma < 0.0) fail("seeds.desired_varsigma", "must be >= 0");
  validated([&] { s.saddle.validate(); });
}

json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  json inertia = json::array();
  for (int i = 0; i < 3; ++i) inertia.push_back({c.plant.inertia(i, 0), c.plant.inertia(i, 1), c.plant.inertia(i, 2)});
  j["plant"] = {{"inertia", inertia},
                {"mass", c.plant.mass},
                {"axle_length", c.plant.axle_length},
                {"gravity", c.plant.gravity},
                {"drag_coeff", c.plant.drag_coeff},
                {"thrust_coeff", c.plant.thrust_coeff}};
  j["gains"] = {{"attitude_gain", c.gains.attitude_gain},
                {"rate_weight", c.gains.rate_weight},
                {"convergence_rate", c.gains.convergence_rate},
                {"spin_rate", c.gains.spin_rate}};
  json segs = json::array();
  for (const auto& s : c.trajectory.segments) {
    segs.push_back({{"axis", {s.axis[0], s.axis[1], s.axis[2]}},
                    {"angle", s.angle},
                    {"t_start", s.t_start},
                    {"t_end", s.t_end}});
  }
  j["trajectory"] = {{"segments", segs}, {"duration", c.trajectory.duration}};
  j["integrator"] = {{"step", c.integrator.step},
                     {"reorthonormalize_every", c.integrator.reorthonormalize_every},
                     {"record_decimation", c.integrator.record_decimation}};
  j["seeds"] = {{"epsilon", c.seeds.saddle.epsilon},
                {"varsigma", c.seeds.saddle.varsigma},
                {"sigma", {c.seeds.saddle.sigma.real(), c.seeds.saddle.sigma.imag()}},
                {"count", c.seeds.count},
                {"secondary", c.seeds.saddle.secondary == SecondaryMode::literal ? "literal" : "spin_mode"},
                {"desired_epsilon", c.seeds.desired_epsilon},
                {"desired_varsigma", c.seeds.desired_varsigma}};
  j["output"] = {{"directory", c.output_directory}};
  return j;
}

}  // namespace

std::string RunConfig::canonical() const { return to_json(*this).dump(); }

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<document>: parse error: ") + e.what());
  }
  reject_unknown(root, "", {"schema_version", "plant", "gains", "trajectory", "integrator", "seeds", "output"});

  RunConfig cfg;
  const int version = integer(root, "", "schema_version", kConfigSchemaVersion);
  if (version != kConfigSchemaVersion) fail("schema_version", "unsupported version " + std::to_string(version));
  if (root.contains("plant")) parse_plant(root.at("plant"), cfg.plant);
  if (root.contains("gains")) parse_gains(root.at("gains"), cfg.gains);
  if (root.contains("trajectory")) parse_trajectory(root.at("trajectory"), cfg.trajectory);
  cfg.trajectory.spin = cfg.gains.spin_rate;
  validated([&] { cfg.trajectory.validate(); });
  if (root.contains("integrator")) parse_integrator(root.at("integrator"), cfg.integrator);
  if (root.contains("seeds")) parse_seeds(root.at("seeds"), cfg.seeds);
  if (root.contains("output")) {
    const json& out = root.at("output");
    reject_unknown(out, "output", {"directory"});
    if (out.contains("directory")) {
      if (!out.at("directory").is_string()) fail("output.directory", "expected a string");
      cfg.output_directory = out.at("directory").get<std::string>();
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace pdav
