#pragma once

#include "dflow/gauge.hpp"
#include "dflow/linear.hpp"

#include <string>

namespace dflow {

/// Fixed shortest-roundtrip formatting so CSV output is byte-stable.
std::string fmt_double(double v);

/// Snapshot file: one-line JSON header (grid, time_stamp, params_hash) +
/// newline + num_points little-endian float64 (x, y, z) triplets.
void write_curve(const std::string& path, const DiscreteCurve& u,
                 const std::string& params_hash = "");
DiscreteCurve read_curve(const std::string& path);

/// Directory layout: metadata.json, snap_NNNNNN.curve, series.csv with a
/// header row (t, defect_sup).
void write_trajectory(const std::string& dir, const Trajectory& traj,
                      const std::string& params_hash = "");

struct GaugeCsvRow {
    double t = 0.0;
    double n_sq = 0.0;
    std::vector<double> ladder;
    double defect = 0.0;
    double d_sq = 0.0;
};

void write_gauge_csv(const std::string& path, const std::vector<GaugeCsvRow>& rows, int k,
                     bool with_twin);

void write_audit_csv(const std::string& path, const AuditReport& rep);

} // namespace dflow
