#include "pdav/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace pdav {

namespace fs = std::filesystem;

const std::vector<std::string>& flow_trace_columns() {
  static const std::vector<std::string> cols{"t",  "qx",  "qy", "qz",           "wx",           "wy",
                                             "wz", "spin", "psi", "V", "dist_desired", "dist_antipodal"};
  return cols;
}

const std::vector<std::string>& maneuver_trace_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c = flow_trace_columns();
    for (const char* extra : {"nutation_rate", "precession_rate", "psi_percent", "ew3", "u1", "u2", "u3"}) {
      c.push_back(extra);
    }
    return c;
  }();
  return cols;
}

std::size_t TraceTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw TraceIoError("no column named '" + name + "'");
}

std::vector<double> TraceTable::column(const std::string& name) const {
  const std::size_t idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

namespace {

std::vector<double> flow_row(const TraceSample& s) {
  const Vec3& q = s.q.vec();
  const Vec3& w = s.state.omega;
  return {s.t, q.x(), q.y(), q.z(), w.x(), w.y(), w.z(), s.spin, s.psi, s.lyapunov, s.dist_desired, s.dist_antipodal};
}

}  // namespace

TraceTable flow_trace_table(const FlowTrace& trace, const std::string& config_hash) {
  TraceTable table{kFlowTraceSchema, config_hash, flow_trace_columns(), {}};
  for (const auto& s : trace.samples) table.rows.push_back(flow_row(s));
  return table;
}

TraceTable maneuver_trace_table(const ManeuverResult& result, const std::string& config_hash) {
  TraceTable table{kManeuverTraceSchema, config_hash, maneuver_trace_columns(), {}};
  for (const auto& m : result.samples) {
    std::vector<double> row = flow_row(m.trace);
    for (double v : {m.nutation_rate, m.precession_rate, m.psi_percent, m.e_omega3, m.torque.x(), m.torque.y(),
                     m.torque.z()}) {
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_table(const TraceTable& table, const std::string& path) {
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const fs::path tmp = target.string() + ".tmp" + std::to_string(::getpid());

  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw TraceIoError(path + ": cannot open for writing");
    out << "# schema=" << table.schema << " config_hash=" << table.config_hash << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    char buf[32];
    for (const auto& row : table.rows) {
      if (row.size() != table.columns.size()) {
        out.close();
        fs::remove(tmp, ec);
        throw TraceIoError(path + ": row width does not match the header");
      }
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", row[i]);
        if (i) out << ',';
        out << buf;
      }
      out << '\n';
    }
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw TraceIoError(path + ": write failed");
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw TraceIoError(path + ": cannot move file into place");
  }
}

void write_trace(const FlowTrace& trace, const std::string& path, const std::string& config_hash) {
  write_table(flow_trace_table(trace, config_hash), path);
}

TraceTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceIoError(path + ": cannot open");
  TraceTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string token;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        if (key == "schema") table.schema = token.substr(eq + 1);
        if (key == "config_hash") table.config_hash = token.substr(eq + 1);
      }
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!have_header) {
      table.columns = fields;
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw TraceIoError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(table.columns.size()) +
                         " fields");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0') {
        throw TraceIoError(path + ":" + std::to_string(line_no) + ": not a number: '" + f + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw TraceIoError(path + ": missing header line");
  return table;
}

}  // namespace pdav
