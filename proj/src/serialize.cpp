#include "ocmsim/serialize.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace ocmsim {
namespace {

Json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return round_g9(value);
}

Json ratio_json(NamedRatio const& r) {
  Json j;
  j["name"] = r.name;
  j["available"] = r.available;
  j["value"] = r.available ? number(r.estimate.value) : Json(nullptr);
  j["uncertainty"] = r.available ? number(r.estimate.uncertainty) : Json(nullptr);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json config_json(ExperimentConfig const& c) {
  Json j;
  j["wavelength_nm"] = number(c.wavelength_nm);
  j["beam_angle_deg"] = number(c.beam_angle_deg);
  j["classical_period_mm"] = number(c.classical_period);
  j["correlation_diameter_mm"] = number(c.correlation_diameter);
  j["fiber_core_mm"] = number(c.fiber_core);
  j["fiber_cladding_mm"] = number(c.fiber_cladding);
  j["scan_step_mm"] = number(c.scan_step);
  j["scan_half_range_mm"] = number(c.scan_half_range);
  Json seps = Json::array();
  for (double s : c.separations) seps.push_back(number(s));
  j["separations_mm"] = seps;
  j["coincidence_window_ns"] = number(c.coincidence_window_ns);
  j["pair_generation_probability"] = number(c.pair_generation_probability);
  j["coupler_split"] = number(c.coupler_split);
  j["pixel_size_mm"] = number(c.effective_pixel_size());
  j["pixel_count_m"] = number(c.effective_pixel_count());
  j["events_per_run"] = c.events_per_run;
  return j;
}

std::vector<std::string> split_fields(std::string const& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(std::string const& field, std::size_t line) {
  double value = 0.0;
  auto const* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw ParseError("histogram line " + std::to_string(line) + ": bad number '" + field + "'");
  return value;
}

}  // namespace

std::string format_g9(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

double round_g9(double value) { return std::strtod(format_g9(value).c_str(), nullptr); }

std::string histogram_csv(Histogram const& hist) {
  std::string out = "bin_lower_mm,bin_upper_mm,count\n";
  auto const& edges = hist.edges();
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    out += format_g9(edges[i]) + "," + format_g9(edges[i + 1]) + "," + std::to_string(hist.counts()[i]) + "\n";
  }
  return out;
}

Histogram parse_histogram_csv(std::string const& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("histogram file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "bin_lower_mm,bin_upper_mm,count") throw ParseError("histogram header not recognised");

  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto const fields = split_fields(line);
    if (fields.size() != 3) throw ParseError("histogram line " + std::to_string(number) + ": expected 3 fields");
    double const lower = parse_double(fields[0], number);
    double const upper = parse_double(fields[1], number);
    std::uint64_t count = 0;
    auto const* end = fields[2].data() + fields[2].size();
    auto [ptr, ec] = std::from_chars(fields[2].data(), end, count);
    if (ec != std::errc() || ptr != end)
      throw ParseError("histogram line " + std::to_string(number) + ": bad count '" + fields[2] + "'");
    if (edges.empty()) {
      edges.push_back(lower);
    } else if (lower != edges.back()) {
      throw ParseError("histogram line " + std::to_string(number) + ": bins are not contiguous");
    }
    if (!(upper > lower)) throw ParseError("histogram line " + std::to_string(number) + ": empty bin");
    edges.push_back(upper);
    counts.push_back(count);
  }
  if (counts.empty()) throw ParseError("histogram has no bins");
  Histogram hist(std::move(edges));
  hist.set_counts(std::move(counts));
  return hist;
}

std::string residual_csv(Histogram const& hist, FringeFit const* fit) {
  std::string out = "x_mm,observed,fitted\n";
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    double const x = hist.bin_center(i);
    out += format_g9(x) + "," + std::to_string(hist.counts()[i]) + ",";
    if (fit) out += format_g9(fit->parameters(x));
    out += "\n";
  }
  return out;
}

Json to_json(FringeModel const& m) {
  Json j;
  j["amplitude"] = number(m.amplitude);
  j["width_mm"] = number(m.width);
  j["visibility"] = number(m.visibility);
  j["period_mm"] = number(m.period);
  j["phase_rad"] = number(m.phase);
  j["center_mm"] = number(m.center);
  return j;
}

Json to_json(FringeFit const& fit) {
  Json j;
  j["converged"] = fit.converged;
  j["center_free"] = fit.center_free;
  j["iterations"] = fit.iterations;
  j["reduced_chi_square"] = number(fit.residual);
  j["parameters"] = to_json(fit.parameters);
  j["standard_errors"] = to_json(fit.standard_errors);
  j["amplitude_visibility_covariance"] = number(fit.amplitude_visibility_covariance);
  return j;
}

Json to_json(RunStats const& stats) {
  Json j;
  j["generated"] = stats.generated;
  j["configurations"] = stats.configurations;
  j["trials"] = stats.trials();
  j["accepted"] = stats.accepted;
  j["acceptance_rate"] = number(stats.acceptance_rate());
  j["acceptance_standard_error"] = number(stats.acceptance_standard_error());
  Json rejections = Json::object();
  for (auto const& [reason, count] : stats.rejections) rejections[std::string(to_string(reason))] = count;
  j["rejections"] = rejections;
  return j;
}

Json to_json(NoonStateSpec const& spec) {
  Json j;
  j["photon_number"] = spec.photon_number();
  j["fringe_wavevector_per_mm"] = number(spec.fringe_wavevector());
  j["envelope_bandwidth_per_mm"] = number(spec.envelope_bandwidth());
  j["intensity_scale"] = number(spec.intensity_scale());
  j["fringe_period_mm"] = number(spec.fringe_period());
  j["orthogonality_regime"] = spec.in_orthogonality_regime();
  return j;
}

Json to_json(OccupancyReport const& r) {
  Json j;
  j["pixels_m"] = number(r.pixels);
  j["photons_n"] = r.photons;
  j["coupler_split"] = number(r.coupler_split);
  j["model"] = std::string(to_string(r.model));
  if (r.c_total) {
    Json counts;
    counts["c_total"] = *r.c_total;
    counts["c_npa"] = *r.c_npa;
    counts["c_spa"] = *r.c_spa;
    counts["c_pnr"] = *r.c_pnr;
    j["counts"] = counts;
  } else {
    j["counts"] = nullptr;
  }
  j["oracle_verified"] = r.oracle_verified ? Json(*r.oracle_verified) : Json(nullptr);
  auto map_json = [](std::map<std::string, double> const& m) {
    Json out = Json::object();
    for (auto const& [k, v] : m) out[k] = number(v);
    return out;
  };
  j["acceptance_multiset_uniform"] = map_json(r.acceptance_multiset);
  j["acceptance_placement_uniform"] = map_json(r.acceptance_placement);
  j["ratios"] = map_json(r.ratios);
  return j;
}

Json to_json(ComparisonReport const& r) {
  Json j;
  j["master_seed"] = r.master_seed;
  j["config"] = config_json(r.config);
  j["envelope_convention"] = envelope_convention();
  j["spec"] = to_json(r.spec);
  j["orthogonality_regime"] = r.orthogonality_regime;

  Json scenarios = Json::array();
  for (auto const& s : r.scenarios) {
    Json e;
    e["name"] = s.name;
    e["photon_number"] = s.photon_number;
    e["run_stats"] = to_json(s.stats);
    e["total_accepted"] = s.histogram.total_accepted();
    e["fit"] = s.fit ? to_json(*s.fit) : Json(nullptr);
    if (!s.fit_error.empty()) e["fit_error"] = s.fit_error;
    scenarios.push_back(e);
  }
  j["scenarios"] = scenarios;

  Json periods = Json::array();
  for (auto const& p : r.period_ratios) periods.push_back(ratio_json(p));
  j["period_ratios"] = periods;
  Json amplitudes = Json::array();
  for (auto const& a : r.amplitude_ratios) amplitudes.push_back(ratio_json(a));
  j["amplitude_ratios"] = amplitudes;

  Json predictions = Json::array();
  for (auto const& p : r.predictions) {
    Json e;
    e["name"] = p.name;
    e["predicted"] = number(p.predicted);
    e["simulated"] = p.simulated ? number(p.simulated->value) : Json(nullptr);
    e["uncertainty"] = p.simulated ? number(p.simulated->uncertainty) : Json(nullptr);
    predictions.push_back(e);
  }
  j["predictions"] = predictions;

  auto const& a = r.array_statistics;
  Json arr;
  arr["pixel_size_mm"] = number(a.pixel_size);
  arr["pixel_count_m"] = number(a.pixel_count_m);
  arr["events"] = a.events;
  arr["acceptance_ql_mpa"] = number(a.rate_ql_mpa);
  arr["acceptance_ocm_sp"] = number(a.rate_ocm_sp);
  arr["acceptance_ocm_pnr"] = number(a.rate_ocm_pnr);
  arr["same_pixel_fraction"] = number(a.same_pixel_fraction);
  arr["same_pixel_fraction_error"] = number(a.same_pixel_fraction_error);
  arr["predicted_multiset_uniform"] = number(a.predicted_multiset);
  arr["predicted_placement_uniform"] = number(a.predicted_placement);
  arr["pair_rate_scale"] = number(r.config.pair_generation_probability);
  j["array_statistics"] = arr;
  return j;
}

Json to_json(RunManifest const& m) {
  Json j;
  j["command"] = m.command;
  j["config_digest"] = m.config_digest;
  j["master_seed"] = m.master_seed;
  j["tool_version"] = m.tool_version;
  j["timestamp"] = m.timestamp;
  j["outputs"] = m.outputs;
  return j;
}

std::string utc_timestamp() {
  auto const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(std::filesystem::path const& path, std::string const& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw std::runtime_error("write failed for " + path.string());
}

std::string dump(Json const& json) { return json.dump(2) + "\n"; }

}  // namespace ocmsim
