#include <doctest.h>

#include "pdav/config.hpp"
#include "pdav/trace_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pdav;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pdav_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

FlowTrace sample_trace(int n) {
  FlowTrace tr;
  for (int i = 0; i < n; ++i) {
    TraceSample s;
    s.t = 1e-5 * i;
    s.state.attitude = rodrigues_exp(Vec3(0.3, -0.2, 0.9), 0.1 * i + 1.0 / 3.0);
    s.state.omega = Vec3(1.0 / 7.0 * i, -2e-300, 1000.0 + std::sqrt(2.0));
    s.q = s.state.pointing();
    s.spin = s.state.omega.z();
    s.psi = 1e-17 * i;
    s.lyapunov = 12345.678901234567;
    s.dist_desired = std::nextafter(1.0, 2.0);
    tr.samples.push_back(s);
  }
  return tr;
}

}  // namespace

TEST_CASE("configuration defaults") {
  const RunConfig cfg = parse_config("{}");
  CHECK(cfg.gains.attitude_gain == 25e6);
  CHECK(cfg.gains.rate_weight == 12e3);
  CHECK(cfg.gains.convergence_rate == 500.0);
  CHECK(cfg.gains.spin_rate == 1000.0);
  CHECK(cfg.trajectory.segments.size() == 2);
  CHECK(cfg.trajectory.spin == 1000.0);
  CHECK(cfg.integrator.step == 1e-5);
  CHECK(cfg.integrator.record_decimation == 10);
  CHECK(cfg.seeds.count == 10);
  CHECK(cfg.seeds.saddle.sigma == cdouble(1.0, 1.0));
  CHECK(cfg.seeds.saddle_spec().angles.size() == 10);
  CHECK(cfg.output_directory == "pdav_out");
}

TEST_CASE("configuration overrides") {
  const RunConfig cfg = parse_config(R"({
    "schema_version": 1,
    "gains": {"spin_rate": 500.0},
    "integrator": {"step": 2e-5},
    "seeds": {"sigma": [0.5, -1.0], "count": 4, "secondary": "spin_mode"},
    "output": {"directory": "elsewhere"}
  })");
  CHECK(cfg.gains.spin_rate == 500.0);
  CHECK(cfg.trajectory.spin == 500.0);
  CHECK(cfg.integrator.step == 2e-5);
  CHECK(cfg.seeds.saddle.sigma == cdouble(0.5, -1.0));
  CHECK(cfg.seeds.count == 4);
  CHECK(cfg.seeds.saddle.secondary == SecondaryMode::spin_mode);
  CHECK(cfg.output_directory == "elsewhere");
}

TEST_CASE("configuration errors name the field") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"gains": {"convergence_rate": -1}})"),
                       doctest::Contains("gains.convergence_rate"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"plant": {"inertia": [[1,0,0],[0,-1,0],[0,0,1]]}})"),
                       doctest::Contains("plant.inertia"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"gains": {"convergence": 1}})"), doctest::Contains("gains.convergence"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"schema_version": 2})"), doctest::Contains("schema_version"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("{ not json"), doctest::Contains("parse error"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"trajectory": {"segments": [
      {"axis": [1,0,0], "angle": 1, "t_start": 0.5, "t_end": 0.4}]}})"),
                       doctest::Contains("trajectory.segments[0]"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("configuration hash") {
  const RunConfig a = parse_config("{}");
  const RunConfig b = parse_config(R"({"schema_version": 1})");
  CHECK(a.hash() == b.hash());
  CHECK(a.canonical() == b.canonical());
  CHECK(parse_config(a.canonical()).hash() == a.hash());
  const RunConfig c = parse_config(R"({"gains": {"attitude_gain": 2.6e7}})");
  CHECK(c.hash() != a.hash());
  CHECK(hash_hex(a.hash()).size() == 16);
  CHECK(hash_hex(0x1234) == "0000000000001234");
}

TEST_CASE("trace files round trip bit-exactly") {
  const fs::path dir = scratch_dir("roundtrip");
  const FlowTrace tr = sample_trace(25);
  const fs::path path = dir / "nested" / "trace.csv";
  write_trace(tr, path.string(), "abcdef0123456789");
  const TraceTable table = read_table(path.string());
  CHECK(table.schema == kFlowTraceSchema);
  CHECK(table.config_hash == "abcdef0123456789");
  CHECK(table.columns == flow_trace_columns());
  REQUIRE(table.rows.size() == 25);
  const TraceTable expected = flow_trace_table(tr, "abcdef0123456789");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      const double a = table.rows[i][j];
      const double b = expected.rows[i][j];
      CHECK(((a == b) || (std::isnan(a) && std::isnan(b))));
    }
  }
  CHECK(table.column("wz")[3] == tr.samples[3].state.omega.z());
  CHECK_THROWS_AS(table.column("missing"), TraceIoError);

  // Same input, same bytes.
  write_trace(tr, (dir / "again.csv").string(), "abcdef0123456789");
  CHECK(slurp(path) == slurp(dir / "again.csv"));

  const std::string text = slurp(path);
  CHECK(text.rfind("# schema=pdav-trace/1 config_hash=abcdef0123456789\n", 0) == 0);
}

TEST_CASE("trace edge cases") {
  const fs::path dir = scratch_dir("edges");
  write_trace(FlowTrace{}, (dir / "empty.csv").string(), "0");
  const TraceTable empty = read_table((dir / "empty.csv").string());
  CHECK(empty.rows.empty());
  CHECK(empty.columns == flow_trace_columns());

  write_trace(sample_trace(1), (dir / "one.csv").string(), "0");
  CHECK(read_table((dir / "one.csv").string()).rows.size() == 1);

  // A path whose parent is a regular file cannot be created; nothing is left behind.
  std::ofstream(dir / "blocker") << "x";
  CHECK_THROWS_AS(write_trace(sample_trace(3), (dir / "blocker" / "t.csv").string(), "0"), TraceIoError);
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 3);

  CHECK_THROWS_AS(read_table((dir / "nope.csv").string()), TraceIoError);
  std::ofstream(dir / "bad.csv") << "# schema=pdav-trace/1 config_hash=0\nt,x\n1,abc\n";
  CHECK_THROWS_AS(read_table((dir / "bad.csv").string()), TraceIoError);
}
