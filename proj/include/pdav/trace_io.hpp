#pragma once

#include "pdav/integrator.hpp"
#include "pdav/maneuver.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdav {

class TraceIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kFlowTraceSchema = "pdav-trace/1";
inline constexpr const char* kManeuverTraceSchema = "pdav-maneuver/1";

/// Column-oriented numeric table as stored on disk.
struct TraceTable {
  std::string schema;
  std::string config_hash;  // hex
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws TraceIoError when absent.
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

/// t,qx,qy,qz,wx,wy,wz,spin,psi,V,dist_desired,dist_antipodal
const std::vector<std::string>& flow_trace_columns();
/// The flow columns followed by nutation_rate,precession_rate,psi_percent,ew3,u1,u2,u3.
const std::vector<std::string>& maneuver_trace_columns();

TraceTable flow_trace_table(const FlowTrace& trace, const std::string& config_hash);
TraceTable maneuver_trace_table(const ManeuverResult& result, const std::string& config_hash);

/**
 * Writes `# schema=<s> config_hash=<h>`, the header line and one row per
 * sample with %.17g floats. The file is written under a temporary name and
 * renamed into place, so a failure leaves no partial output.
 */
void write_table(const TraceTable& table, const std::string& path);

void write_trace(const FlowTrace& trace, const std::string& path, const std::string& config_hash);

TraceTable read_table(const std::string& path);

}  // namespace pdav
