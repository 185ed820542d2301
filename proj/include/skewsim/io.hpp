#ifndef SKEWSIM_IO_HPP
#define SKEWSIM_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skewsim/analysis.hpp"
#include "skewsim/ensemble.hpp"
#include "skewsim/verify.hpp"
#include "skewsim/weight_field.hpp"

namespace skewsim {

/**
 * Trajectory CSV: header, then one row per path per retained grid slot
 * (downsampled by `downsample`, final slot always kept). 17 significant
 * digits so re-parsing is lossless.
 */
void write_trajectory_csv(const PathEnsemble& ens, std::ostream& os, std::size_t downsample = 1);

/** Long-format local-time CSV: path,time,level,local_time[,crossings at the end row]. */
void write_local_time_csv(const PathEnsemble& ens, std::ostream& os, std::size_t downsample = 1);

/**
 * Binary frame, all little-endian regardless of host:
 *   bytes 0..3   magic "SKSM"
 *   u32          version (1)
 *   u32          dim
 *   u64          n_paths
 *   u64          n_stored grid slots
 *   f64 x n_stored                      stored times
 *   f64 x n_paths*n_stored*dim          positions, path-major
 * Identical seeds and configs give byte-identical frames whatever the
 * worker count.
 */
void write_trajectory_binary(const PathEnsemble& ens, std::ostream& os);

/** One object: dim, stored times, positions as [path][slot][component]. */
void write_trajectory_json(const PathEnsemble& ens, std::ostream& os);

std::string to_json_line(const TestReport& report);
void write_report_table(const std::vector<TestReport>& reports, std::ostream& os);

std::string to_json(const IbpReport& report);
std::string to_json(const TraceReport& report);
std::string to_json(const GrowthReport& report);
std::string to_json(const A2Report& report);

struct RunManifest {
    std::string subcommand;
    std::uint64_t seed = 0;
    std::string config_hash; // 64-bit FNV-1a of the canonical config text, hex
    std::vector<std::string> outputs;
    double wall_seconds = 0.0;
    std::string version = "skewsim 1.0";
};

std::string to_json(const RunManifest& manifest);

/** FNV-1a 64-bit (canonical config hashing). */
std::uint64_t fnv1a64(const std::string& text);

/**
 * Output directory precedence: explicit CLI value, then the SKEWSIM_OUT_DIR
 * environment variable, then ".".
 */
std::string resolve_out_dir(const std::string& cli_value);

} // namespace skewsim

#endif
