#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cbf/estimates.hpp"
#include "cbf/inverse.hpp"
#include "cbf/stability.hpp"

namespace cbf::io {

/// Binary field snapshot, shared repo-wide: little-endian, header =
/// magic "CBFF", version u32, d u32, n u32, L f64, component-count u32,
/// representation flag u32 (0 physical, 1 spectral); payload = row-major
/// f64 per component, or interleaved (re, im) f64 when spectral.
void write_snapshot(const std::string& path, const VectorField& v, bool spectral = false);
void write_snapshot(const std::string& path, const ScalarField& s, bool spectral = false);

VectorField read_snapshot_vector(const std::string& path);
ScalarField read_snapshot_scalar(const std::string& path);

/// Deterministic double formatting used by every CSV writer.
std::string fmt(double x);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

void write_kv(const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& kv);
std::vector<std::pair<std::string, std::string>> read_kv(const std::string& path);

/// Directory of snapshots (u_#####.cbff, optionally gradp_/ut_), a manifest
/// (index, time, file name per line) and a per-time diagnostics CSV.
void export_trajectory(const std::string& dir, const Trajectory& traj, const CbfParams& params);
Trajectory import_trajectory(const std::string& dir);

void write_ledger_csv(const std::string& path, const EnergyLedger& ledger);
void write_verdicts_csv(const std::string& path, const std::vector<LemmaVerdict>& verdicts);

/// report.csv (iter, residual, f norm, scaled flag) stays byte-deterministic;
/// wall-clock timings go to the timing.txt sidecar, which is excluded from
/// the determinism contract like manifest timestamps.
void write_inverse_report(const std::string& dir, const InverseResult& result);
void write_admissibility(const std::string& path, const AdmissibilityReport& rep);

void write_stability_csv(const std::string& path, const StabilityTable& table);

}  // namespace cbf::io
