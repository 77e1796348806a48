#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocmsim/detectors.hpp"
#include "ocmsim/fringe_fit.hpp"
#include "ocmsim/histogram.hpp"
#include "ocmsim/occupancy.hpp"
#include "ocmsim/replication.hpp"

namespace ocmsim {

using Json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kToolVersion[] = "1.0.0";

//! printf "%.9g".
std::string format_g9(double value);
//! value rounded to 9 significant digits.
double round_g9(double value);

//! "bin_lower_mm,bin_upper_mm,count" then one row per bin.
std::string histogram_csv(Histogram const& hist);
//! Inverse of histogram_csv. Throws ParseError.
Histogram parse_histogram_csv(std::string const& text);

//! "x_mm,observed,fitted" at bin centres; fitted is empty without a fit.
std::string residual_csv(Histogram const& hist, FringeFit const* fit);

Json to_json(FringeModel const& model);
Json to_json(FringeFit const& fit);
Json to_json(RunStats const& stats);
Json to_json(NoonStateSpec const& spec);
Json to_json(OccupancyReport const& report);
Json to_json(ComparisonReport const& report);

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  std::string timestamp;
  std::vector<std::string> outputs;
};

Json to_json(RunManifest const& manifest);
//! UTC, ISO 8601 with seconds.
std::string utc_timestamp();

std::string read_file(std::filesystem::path const& path);
//! Writes `content` verbatim; throws std::runtime_error on I/O failure.
void write_file(std::filesystem::path const& path, std::string const& content);
//! Two-space indented dump with a trailing newline.
std::string dump(Json const& json);

}  // namespace ocmsim
