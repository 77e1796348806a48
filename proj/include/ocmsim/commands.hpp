#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace ocmsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitRuntimeError = 3;

struct SimulateOptions {
  std::optional<std::filesystem::path> config;
  //! QL_MPA, OCM_SP, OCM_PNR, FIBER_PAIR, APERTURE_SCAN or a preset name
  //! (CLASSICAL, QL, OCM, OCM_PNR_COMPOSITE).
  std::string scheme = "OCM_PNR";
  //! Defaults to events_per_run from the config.
  std::optional<std::uint64_t> events;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = ".";
  unsigned workers = 1;
};

struct AnalyzeOptions {
  std::filesystem::path histogram;
  std::filesystem::path out_dir = ".";
  bool multi_start = false;
};

struct CombinatoricsOptions {
  double pixels = 5.6;
  int photons = 2;
  double coupler_split = 0.5;
  std::string model = "multiset_uniform";
  std::optional<std::filesystem::path> out_dir;
};

struct ReplicateOptions {
  std::optional<std::filesystem::path> config;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> events;
  unsigned workers = 1;
};

//! Writes histogram.csv, run_stats.json and manifest.json.
int cmd_simulate(SimulateOptions const& options, std::ostream& out, std::ostream& err);
//! Writes fit.json, residuals.csv and manifest.json.
int cmd_analyze(AnalyzeOptions const& options, std::ostream& out, std::ostream& err);
//! Prints the occupancy report as JSON; also writes it when out_dir is set.
int cmd_combinatorics(CombinatoricsOptions const& options, std::ostream& out, std::ostream& err);
//! Writes comparison.json, histogram_<NAME>.csv and fringe_<NAME>.csv per
//! scenario, and manifest.json.
int cmd_replicate(ReplicateOptions const& options, std::ostream& out, std::ostream& err);

}  // namespace ocmsim
