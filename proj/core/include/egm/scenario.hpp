#pragma once

#include <string>
#include <vector>

#include "egm/grid.hpp"

namespace egm {

/// Exit codes of the batch runner: 0 all audits pass, 2 at least one audit
/// failed, 1 configuration error (no artifacts are written in that case).
struct ScenarioOutcome {
    int exit_code = 0;
    std::string report_path;
    std::vector<std::string> artifacts;
};

/// Runs a scenario file end to end: build fields, solve, transform, audit,
/// write report.json / field CSVs / dynamics.jsonl into out_dir.
/// `overrides` are dotted key=value assignments applied onto the parsed
/// JSON (e.g. "grid.nt=16" or "audits=[\"charge\"]").
ScenarioOutcome run_scenario(const std::string& path, const std::vector<std::string>& overrides,
                             const std::string& out_dir);

/// `egm audit` entry: runs one named law audit over a CSV field dump.
/// For laws that need both a strength and a charge-current, theta_csv names
/// the second operand (empty string = zero field).
int run_audit_command(const std::string& fields_csv, const std::string& law,
                      const std::string& theta_csv, double tolerance,
                      const std::string& report_path);

/// `egm transform` entry: boosts a CSV field dump and writes the transformed
/// field plus a small coverage report.
int run_transform_command(const std::string& fields_csv, double v, const Vec3& axis, double phi,
                          const std::string& out_csv, const std::string& report_path);

} // namespace egm
