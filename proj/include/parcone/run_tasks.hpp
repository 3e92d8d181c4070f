#pragma once
///
/// @file run_tasks.hpp
/// @brief Task dispatch: turn a parsed config into artifacts on disk.
///
/// Every run produces a directory holding the task's CSV/JSON outputs plus
/// run.json, a record with the config snapshot, its checksum, timestamps,
/// and a manifest of output files with content checksums.  Identical
/// config + seeds reproduce identical manifest checksums; wall-clock
/// columns are zeroed before checksumming so the claim is checkable.
///
/// Output root: $PARCONE_OUT_ROOT when set, else the working directory;
/// [output] dir is created below it.

#include <string>
#include <vector>

#include "parcone/config.hpp"
#include "parcone/regularization.hpp"

namespace parcone {

/// FNV-1a 64-bit over the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

struct ManifestEntry {
    std::string name;      ///< file name inside the run directory
    std::string checksum;  ///< fnv1a of the deterministic content
};

struct RunRecord {
    std::string task;
    std::string config_text;
    std::string config_checksum;
    std::string started_utc;
    std::string finished_utc;
    std::vector<ManifestEntry> outputs;
};

std::string run_record_json(const RunRecord& r);

/// Iteration log CSV, columns k,residual,error,time_ms.  The checksum
/// variant replaces time_ms by 0.
std::string iteration_log_csv(const IterationLog& log, bool zero_wall_clock);

/// The directory a config writes into (not yet created).
std::string resolve_out_dir(const ExperimentConfig& cfg);

struct RunOutcome {
    std::string out_dir;
    RunRecord record;
    /// Text also printed to stdout (verdicts, summaries); may be empty.
    std::string printed;
};

/// Dispatches on task.name; throws ValidationError / SolverError, which the
/// CLI maps to exit codes 2 / 3.
RunOutcome run_config(const ExperimentConfig& cfg);
RunOutcome run_config_file(const std::string& path);

/// The check-embedding subcommand: key=value tokens straight from the
/// command line, verdict JSON to the returned string.  No files.
std::string check_embedding_tokens(const std::vector<std::string>& tokens);

}  // namespace parcone
