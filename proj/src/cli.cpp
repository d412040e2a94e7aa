#include "pdav/cli.hpp"

#include "pdav/config.hpp"
#include "pdav/flow_explorer.hpp"
#include "pdav/linearization.hpp"
#include "pdav/maneuver.hpp"
#include "pdav/spectral.hpp"
#include "pdav/trace_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace pdav {

namespace {

const std::map<std::string, Equilibrium> kEquilibria{{"desired", Equilibrium::desired},
                                                     {"antipodal", Equilibrium::antipodal}};
const std::map<std::string, Direction> kDirections{{"forward", Direction::forward},
                                                   {"backward", Direction::backward}};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(cdouble z) {
  std::ostringstream os;
  os << fmt(z.real()) << (z.imag() < 0 ? " - " : " + ") << fmt(std::abs(z.imag())) << "i";
  return os.str();
}

void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << text;
    if (!out) throw TraceIoError(path + ": write failed");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw TraceIoError(path + ": cannot move file into place");
  }
}

struct Analysis {
  ReferenceSample ref;
  BodyState state;
  LinearizedSystem sys;
  EigenStructure es;
};

Analysis analyse(const RunConfig& cfg, Equilibrium which) {
  Analysis a;
  a.ref = static_reference(Rotation::identity(), cfg.gains.spin_rate);
  a.state = equilibrium_state(a.ref, which);
  a.sys = assemble_A(a.state, a.ref, cfg.gains);
  a.es = eig6(a.sys.A);
  classify_equilibrium(a.es, constraint_row(a.state.pointing()));
  return a;
}

std::string matrix_text(const std::string& name, const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << name << " " << m.rows() << "x" << m.cols() << "\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? " " : "") << fmt(m(i, j));
    os << "\n";
  }
  return os.str();
}

std::string eigen_report(const Analysis& a, Equilibrium which) {
  std::ostringstream os;
  os << "equilibrium: " << to_string(which) << "\n";
  os << "labeling: " << (a.es.conventional_labeling ? "conventional" : "by_real_part") << "\n";
  for (int i = 0; i < 6; ++i) {
    const Eigenpair& p = a.es[i];
    os << "lambda" << i + 1 << " = " << fmt(p.lambda) << (p.admissible ? "" : "  [inadmissible]") << "\n";
    os << "  v" << i + 1 << " =";
    for (int k = 0; k < 6; ++k) os << " (" << fmt(p.v[k]) << ")";
    os << "\n";
  }
  os << "classification: " << to_string(a.es.classification) << "\n";
  return os.str();
}

std::string output_dir(const RunConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PDAV_OUTPUT_DIR"); env && *env) return env;
  return cfg.output_directory;
}

double sample_rate(const std::vector<double>& t) {
  if (t.size() < 2 || t.back() == t.front()) throw TraceIoError("trace has no usable time column");
  return static_cast<double>(t.size() - 1) / std::abs(t.back() - t.front());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pointing-direction and spin tracking analysis for a fast-spinning rigid body", "pdav"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir_flag;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--output-dir", out_dir_flag, "Directory for generated files (default: $PDAV_OUTPUT_DIR or config)");

  auto* simulate = app.add_subcommand("simulate", "Track the reference maneuver and write a trace");
  std::string sim_out;
  int sim_decimation = 0;
  simulate->add_option("--out", sim_out, "Trace file (default: <output-dir>/maneuver.csv)");
  simulate->add_option("--decimation", sim_decimation, "Record every N-th step")->check(CLI::PositiveNumber);

  auto* linearize = app.add_subcommand("linearize", "Write the linearized system matrix and its blocks");
  std::string lin_eq = "desired";
  std::string lin_out;
  linearize->add_option("--equilibrium", lin_eq)->check(CLI::IsMember({"desired", "antipodal"}));
  linearize->add_option("--out", lin_out, "Matrix file (default: stdout)");

  auto* eigen = app.add_subcommand("eigen", "Eigen-structure and classification of an equilibrium");
  std::string eig_eq = "desired";
  eigen->add_option("--equilibrium", eig_eq)->check(CLI::IsMember({"desired", "antipodal"}));

  auto* estimate = app.add_subcommand("estimate-freq", "Nutation frequency estimate from the spectrum");
  bool est_fft = false;
  estimate->add_flag("--fft", est_fft, "Also simulate the maneuver and report the FFT peak of the nutation rate");

  auto* flowcmd = app.add_subcommand("flow", "Forward or backward flows from seeds near an equilibrium");
  std::string flow_eq = "antipodal";
  std::string flow_dir = "backward";
  int flow_seeds = 0;
  double flow_duration = 0.045;
  std::string flow_secondary;
  flowcmd->add_option("--equilibrium", flow_eq)->check(CLI::IsMember({"desired", "antipodal"}));
  flowcmd->add_option("--direction", flow_dir)->check(CLI::IsMember({"forward", "backward"}));
  flowcmd->add_option("--seeds", flow_seeds, "Number of seeds (default: config)")->check(CLI::PositiveNumber);
  flowcmd->add_option("--duration", flow_duration, "Flow time [s]")->check(CLI::PositiveNumber);
  flowcmd->add_option("--secondary", flow_secondary, "Saddle seed secondary term")
      ->check(CLI::IsMember({"literal", "spin_mode"}));

  auto* fftcmd = app.add_subcommand("fft", "Dominant frequency of a trace column");
  std::string fft_file;
  std::string fft_column = "nutation_rate";
  std::vector<double> fft_band;
  fftcmd->add_option("file", fft_file, "Trace file")->required()->check(CLI::ExistingFile);
  fftcmd->add_option("--column", fft_column);
  fftcmd->add_option("--band", fft_band, "Search band: LOW HIGH [Hz]")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    const RunConfig cfg = config_path.empty() ? parse_config("{}") : load_config(config_path);
    const std::string hash = hash_hex(cfg.hash());

    if (*simulate) {
      IntegratorConfig icfg = cfg.integrator;
      if (sim_decimation > 0) icfg.record_decimation = sim_decimation;
      const ManeuverResult result = simulate_maneuver(cfg.trajectory, cfg.gains, cfg.plant, icfg);
      const std::string path =
          sim_out.empty() ? (std::filesystem::path(output_dir(cfg, out_dir_flag)) / "maneuver.csv").string() : sim_out;
      write_table(maneuver_trace_table(result, hash), path);
      out << "wrote " << result.samples.size() << " samples to " << path << "\n";
    } else if (*linearize) {
      const Analysis a = analyse(cfg, kEquilibria.at(lin_eq));
      std::string text = "# equilibrium=" + lin_eq + " config_hash=" + hash + "\n";
      text += matrix_text("A", a.sys.A);
      text += matrix_text("Xi_xi", a.sys.kinematic_attitude);
      text += matrix_text("Xi_omega", a.sys.kinematic_rate);
      text += matrix_text("Omega_xi", a.sys.dynamic_attitude);
      text += matrix_text("Omega_omega", a.sys.dynamic_rate);
      text += matrix_text("C", constraint_row(a.state.pointing()).C);
      if (lin_out.empty()) {
        out << text;
      } else {
        write_text_atomic(lin_out, text);
        out << "wrote " << lin_out << "\n";
      }
    } else if (*eigen) {
      out << eigen_report(analyse(cfg, kEquilibria.at(eig_eq)), kEquilibria.at(eig_eq));
    } else if (*estimate) {
      const Analysis a = analyse(cfg, Equilibrium::desired);
      const NutationEstimate est = nutation_freq_estimate(cfg.gains.spin_rate, a.es);
      out << "mu1 = " << fmt(est.mu1) << " rad/s\n";
      out << "f_n = " << std::fixed << std::setprecision(4) << est.frequency_hz << " Hz\n";
      if (est_fft) {
        const ManeuverResult result = simulate_maneuver(cfg.trajectory, cfg.gains, cfg.plant, cfg.integrator);
        std::vector<double> signal;
        for (const auto& m : result.samples) signal.push_back(m.nutation_rate);
        const SpectralPeak peak = fft_peak(signal, result.sample_rate);
        out << "fft_peak = " << peak.frequency_hz << " Hz\n";
      }
    } else if (*flowcmd) {
      const Equilibrium which = kEquilibria.at(flow_eq);
      const Direction direction = kDirections.at(flow_dir);
      const ReferenceSample ref = static_reference(Rotation::identity(), cfg.gains.spin_rate);
      SeedSettings settings = cfg.seeds;
      if (flow_seeds > 0) settings.count = flow_seeds;
      if (flow_secondary == "literal") settings.saddle.secondary = SecondaryMode::literal;
      if (flow_secondary == "spin_mode") settings.saddle.secondary = SecondaryMode::spin_mode;

      std::vector<Seed> seeds;
      if (which == Equilibrium::antipodal) {
        const Analysis a = analyse(cfg, Equilibrium::antipodal);
        seeds = seeds_saddle(settings.saddle_spec(), a.es, ref);
      } else {
        seeds = seeds_desired(settings.desired_epsilon, settings.desired_varsigma,
                              evenly_spaced_angles(settings.count), ref);
      }
      std::vector<BodyState> states;
      for (const auto& s : seeds) states.push_back(s.state);
      const auto traces = run_flow_batch(states, ref, cfg.gains, direction, flow_duration, cfg.integrator);
      const std::filesystem::path dir(output_dir(cfg, out_dir_flag));
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const std::string name = "flow_" + flow_eq + "_" + flow_dir + "_" + std::to_string(i) + ".csv";
        write_trace(traces[i], (dir / name).string(), hash);
        const TraceSample& last = traces[i].samples.back();
        out << name << ": samples=" << traces[i].samples.size() << " truncated=" << (traces[i].truncated ? 1 : 0)
            << " dist_desired=" << fmt(last.dist_desired) << " dist_antipodal=" << fmt(last.dist_antipodal)
            << (seeds[i].degenerate ? " [degenerate seed]" : "") << "\n";
      }
    } else if (*fftcmd) {
      const TraceTable table = read_table(fft_file);
      const std::vector<double> signal = table.column(fft_column);
      const double fs = sample_rate(table.column("t"));
      std::optional<std::pair<double, double>> band;
      if (fft_band.size() == 2) band = std::make_pair(fft_band[0], fft_band[1]);
      const SpectralPeak peak = fft_peak(signal, fs, band);
      out << "column: " << fft_column << "\n";
      out << "sample_rate = " << fmt(fs) << " Hz\n";
      out << "peak = " << std::fixed << std::setprecision(4) << peak.frequency_hz << " Hz\n";
      out << "magnitude = " << std::scientific << peak.magnitude << "\n";
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace pdav
