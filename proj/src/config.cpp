#include "ocmsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

namespace ocmsim {
namespace {

namespace pt = boost::property_tree;

pt::ptree read_tree(std::string const& text) {
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (pt::ini_parser_error const& e) {
    throw ConfigError("config syntax: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

double to_double(std::string const& key, std::string const& value) {
  double out = 0.0;
  auto const* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
  return out;
}

std::int64_t to_integer(std::string const& key, std::string const& value) {
  std::int64_t out = 0;
  auto const* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
  return out;
}

std::vector<double> to_list(std::string const& key, std::string const& value) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto const first = item.find_first_not_of(" \t");
    auto const last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("config: empty entry in '" + key + "'");
    out.push_back(to_double(key, item.substr(first, last - first + 1)));
  }
  if (out.empty()) throw ConfigError("config: '" + key + "' is empty");
  return out;
}

void check_keys(pt::ptree const& section, std::string const& name, std::set<std::string> const& allowed) {
  for (auto const& [key, child] : section) {
    if (!child.empty()) throw ConfigError("config: nested value under [" + name + "] " + key);
    if (!allowed.contains(key)) throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
  }
}

void read_experiment(pt::ptree const& s, ExperimentConfig& c) {
  check_keys(s, "experiment",
             {"wavelength_nm", "beam_angle_deg", "classical_period_mm", "correlation_diameter_mm",
              "fiber_core_um", "fiber_cladding_um", "scan_step_um", "scan_half_range_mm", "separations_um",
              "coincidence_window_ns", "pair_generation_probability", "coupler_split", "pixel_size_um",
              "events_per_run"});
  auto num = [&](char const* key, double& field, double scale) {
    if (auto v = s.get_optional<std::string>(key)) field = to_double(key, *v) * scale;
  };
  num("wavelength_nm", c.wavelength_nm, 1.0);
  num("beam_angle_deg", c.beam_angle_deg, 1.0);
  num("classical_period_mm", c.classical_period, 1.0);
  num("correlation_diameter_mm", c.correlation_diameter, 1.0);
  num("fiber_core_um", c.fiber_core, 1e-3);
  num("fiber_cladding_um", c.fiber_cladding, 1e-3);
  num("scan_step_um", c.scan_step, 1e-3);
  num("scan_half_range_mm", c.scan_half_range, 1.0);
  num("coincidence_window_ns", c.coincidence_window_ns, 1.0);
  num("pair_generation_probability", c.pair_generation_probability, 1.0);
  num("coupler_split", c.coupler_split, 1.0);
  if (auto v = s.get_optional<std::string>("separations_um")) {
    c.separations = to_list("separations_um", *v);
    for (auto& x : c.separations) x *= 1e-3;
  }
  if (auto v = s.get_optional<std::string>("pixel_size_um")) c.pixel_size = to_double("pixel_size_um", *v) * 1e-3;
  if (auto v = s.get_optional<std::string>("events_per_run")) {
    auto const n = to_integer("events_per_run", *v);
    if (n < 1) throw ConfigError("config: events_per_run must be >= 1");
    c.events_per_run = static_cast<std::uint64_t>(n);
  }
}

NoonStateSpec read_state(pt::ptree const& s) {
  check_keys(s, "state",
             {"photon_number", "fringe_wavevector_per_mm", "envelope_bandwidth_per_mm", "intensity_scale"});
  for (char const* key : {"photon_number", "fringe_wavevector_per_mm", "envelope_bandwidth_per_mm"}) {
    if (!s.get_optional<std::string>(key)) throw ConfigError(std::string("config: [state] requires ") + key);
  }
  auto const n = to_integer("photon_number", s.get<std::string>("photon_number"));
  double const k0 = to_double("fringe_wavevector_per_mm", s.get<std::string>("fringe_wavevector_per_mm"));
  double const dk = to_double("envelope_bandwidth_per_mm", s.get<std::string>("envelope_bandwidth_per_mm"));
  double eta = 1.0;
  if (auto v = s.get_optional<std::string>("intensity_scale")) eta = to_double("intensity_scale", *v);
  if (n < 1 || n > 64) throw ConfigError("config: photon_number must lie in [1, 64]");
  try {
    return NoonStateSpec(static_cast<int>(n), k0, dk, eta);
  } catch (std::invalid_argument const& e) {
    throw ConfigError(std::string("config: [state] ") + e.what());
  }
}

DetectorArray read_array(pt::ptree const& s) {
  check_keys(s, "array", {"pixel_size_um", "pixel_count", "origin_mm", "quantum_efficiency"});
  for (char const* key : {"pixel_size_um", "pixel_count"}) {
    if (!s.get_optional<std::string>(key)) throw ConfigError(std::string("config: [array] requires ") + key);
  }
  double const size = to_double("pixel_size_um", s.get<std::string>("pixel_size_um")) * 1e-3;
  auto const count = to_integer("pixel_count", s.get<std::string>("pixel_count"));
  double qe = 1.0;
  if (auto v = s.get_optional<std::string>("quantum_efficiency")) qe = to_double("quantum_efficiency", *v);
  try {
    double origin = -0.5 * size * static_cast<double>(count);
    if (auto v = s.get_optional<std::string>("origin_mm")) origin = to_double("origin_mm", *v);
    return DetectorArray(size, count, origin, qe);
  } catch (std::invalid_argument const& e) {
    throw ConfigError(std::string("config: [array] ") + e.what());
  }
}

}  // namespace

NoonStateSpec RunConfig::spec() const { return state ? *state : derive_spec(experiment); }

DetectorArray RunConfig::detector_array(NoonStateSpec const& s) const {
  return array ? *array : covering_array(s, experiment.effective_pixel_size());
}

std::string canonical_config(std::string const& text) {
  auto const tree = read_tree(text);
  std::vector<std::string> lines;
  for (auto const& [section, child] : tree) {
    if (child.empty()) {
      if (!child.data().empty()) lines.push_back(section + "=" + child.data());
      continue;
    }
    for (auto const& [key, leaf] : child) lines.push_back(section + "." + key + "=" + leaf.data());
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (auto const& l : lines) out += l + "\n";
  return out;
}

std::string sha256_hex(std::string const& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

RunConfig parse_config(std::string const& text) {
  auto const tree = read_tree(text);
  RunConfig config;
  for (auto const& [section, child] : tree) {
    if (child.empty() && !child.data().empty())
      throw ConfigError("config: key '" + section + "' outside a section");
    if (section == "experiment") {
      read_experiment(child, config.experiment);
    } else if (section == "state") {
      config.state = read_state(child);
    } else if (section == "array") {
      config.array = read_array(child);
    } else {
      throw ConfigError("config: unknown section [" + section + "]");
    }
  }
  try {
    validate(config.experiment);
  } catch (std::invalid_argument const& e) {
    throw ConfigError(std::string("config: [experiment] ") + e.what());
  }
  config.digest = sha256_hex(canonical_config(text));
  return config;
}

RunConfig load_config(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace ocmsim
