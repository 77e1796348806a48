#include "ocmsim/replication.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ocmsim/occupancy.hpp"

namespace ocmsim {
namespace {

void require(bool condition, char const* message) {
  if (!condition) throw std::invalid_argument(message);
}

constexpr int kPairPhotons = 2;
constexpr std::uint64_t kArrayStream = 100;

NamedRatio period_ratio(ComparisonReport const& report, std::string const& ref, std::string const& test) {
  NamedRatio ratio{ref + "/" + test, {}, false, {}};
  auto const* a = report.find(ref);
  auto const* b = report.find(test);
  if (a && b && a->fit && b->fit && a->fit->converged && b->fit->converged) {
    ratio.estimate = enhancement_ratio(*a->fit, *b->fit);
    ratio.available = true;
  } else {
    ratio.note = "fit unavailable or not converged";
  }
  return ratio;
}

NamedRatio fringe_amplitude_ratio(ComparisonReport const& report, std::string const& num,
                                  std::string const& den) {
  NamedRatio ratio{num + "/" + den, {}, false, {}};
  auto const* a = report.find(num);
  auto const* b = report.find(den);
  if (!(a && b && a->fit && b->fit && a->fit->converged && b->fit->converged)) {
    ratio.note = "fit unavailable or not converged";
    return ratio;
  }
  try {
    ratio.estimate = amplitude_ratio(a->histogram, b->histogram, *a->fit, *b->fit);
    ratio.available = true;
  } catch (std::domain_error const& e) {
    ratio.note = e.what();
  }
  return ratio;
}

ArrayStatistics array_statistics(ExperimentConfig const& config, NoonStateSpec const& spec,
                                 std::uint64_t master_seed, unsigned workers) {
  ArrayStatistics stats;
  stats.pixel_size = config.effective_pixel_size();
  stats.pixel_count_m = config.effective_pixel_count();
  stats.events = config.events_per_run;

  auto const array = covering_array(spec, stats.pixel_size);
  std::uint64_t const seed = derive_seed(master_seed, kArrayStream);

  auto const ql = simulate_run(spec, QlMpa{config.coupler_split}, array, config.events_per_run, seed, workers);
  auto const sp = simulate_run(spec, OcmSp{}, array, config.events_per_run, seed, workers);
  auto const pnr = simulate_run(spec, OcmPnr{}, array, config.events_per_run, seed, workers);
  stats.rate_ql_mpa = ql.stats.acceptance_rate();
  stats.rate_ocm_sp = sp.stats.acceptance_rate();
  stats.rate_ocm_pnr = pnr.stats.acceptance_rate();

  // Same event stream in all three runs: QL geometric accepts are the
  // coupler passes plus coupler losses.
  auto const lost = ql.stats.rejections.contains(RejectionReason::coupler_loss)
                        ? ql.stats.rejections.at(RejectionReason::coupler_loss)
                        : 0;
  if (pnr.stats.accepted > 0) {
    double const on_array = static_cast<double>(pnr.stats.accepted);
    double const f = static_cast<double>(ql.stats.accepted + lost) / on_array;
    stats.same_pixel_fraction = f;
    stats.same_pixel_fraction_error = std::sqrt(f * (1.0 - f) / on_array);
  }
  double const m = stats.pixel_count_m;
  stats.predicted_multiset = m / c_total_real(m, kPairPhotons);
  stats.predicted_placement = 1.0 / m;
  return stats;
}

}  // namespace

double ExperimentConfig::effective_pixel_size() const {
  return pixel_size.value_or(correlation_diameter / kExperimentPixelCount);
}

double ExperimentConfig::effective_pixel_count() const {
  return correlation_diameter / effective_pixel_size();
}

void validate(ExperimentConfig const& config) {
  require(config.classical_period > 0.0, "classical period must be positive");
  require(config.correlation_diameter > 0.0, "correlation diameter must be positive");
  require(config.fiber_core > 0.0, "fiber core must be positive");
  require(config.fiber_cladding > 0.0, "fiber cladding must be positive");
  require(config.scan_step > 0.0, "scan step must be positive");
  require(config.scan_half_range > 0.0, "scan range must be positive");
  require(config.coupler_split > 0.0 && config.coupler_split <= 1.0, "coupler split must lie in (0, 1]");
  require(config.pair_generation_probability > 0.0, "pair generation probability must be positive");
  require(config.events_per_run >= 1, "events per run must be >= 1");
  require(!config.pixel_size || *config.pixel_size > 0.0, "pixel size must be positive");
  require(!config.separations.empty(), "at least one fiber separation is required");
  for (double s : config.separations) {
    double const multiple = s / config.fiber_cladding;
    require(s > 0.0 && std::abs(multiple - std::round(multiple)) < 1e-9 * std::max(1.0, multiple),
            "fiber separations must be multiples of the cladding diameter");
  }
}

NoonStateSpec derive_spec(ExperimentConfig const& config) {
  validate(config);
  double const kappa0 = std::numbers::pi / config.classical_period;
  double const delta_kappa = 2.0 / (std::sqrt(static_cast<double>(kPairPhotons)) * config.correlation_diameter);
  return NoonStateSpec(kPairPhotons, kappa0, delta_kappa);
}

std::string envelope_convention() {
  return "delta_kappa = 2 / (sqrt(N) * correlation_diameter), N = 2: the two-photon envelope "
         "exp(-N dk^2 x^2) falls to 1/e at +-correlation_diameter/2";
}

std::vector<Scenario> paper_scenarios(ExperimentConfig const& config) {
  auto const spec = derive_spec(config);
  FiberPair fiber;
  fiber.aperture_width = config.fiber_core;
  fiber.scan_step = config.scan_step;
  fiber.scan_half_range = config.scan_half_range;
  fiber.coupler_split = config.coupler_split;

  FiberPair ql = fiber;
  ql.include_zero_separation_coupler = true;

  FiberPair ocm = fiber;
  ocm.separations = config.separations;

  FiberPair composite = ocm;
  composite.include_zero_separation_coupler = true;

  return {
      {"CLASSICAL", spec.with_photon_number(1),
       ApertureScan{config.fiber_core, config.scan_step, config.scan_half_range}},
      {"QL", spec, ql},
      {"OCM", spec, ocm},
      {"OCM_PNR_COMPOSITE", spec, composite},
  };
}

ScenarioResult const* ComparisonReport::find(std::string const& name) const {
  for (auto const& s : scenarios) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

ComparisonReport run_comparison(ExperimentConfig const& config, std::uint64_t master_seed, unsigned workers) {
  ComparisonReport report;
  report.config = config;
  report.master_seed = master_seed;
  report.spec = derive_spec(config);
  report.orthogonality_regime = report.spec.in_orthogonality_regime();

  auto const scenarios = paper_scenarios(config);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    auto const& scenario = scenarios[i];
    auto run = simulate_run(scenario.spec, scenario.scheme, config.events_per_run,
                            derive_seed(master_seed, i), workers);
    ScenarioResult result{scenario.name, scenario.spec.photon_number(), std::move(run.histogram),
                          run.stats, std::nullopt, {}};
    try {
      result.fit = fit_fringe(result.histogram);
    } catch (FitError const& e) {
      result.fit_error = e.what();
    }
    report.scenarios.push_back(std::move(result));
  }

  report.period_ratios = {
      period_ratio(report, "CLASSICAL", "QL"),
      period_ratio(report, "CLASSICAL", "OCM"),
      period_ratio(report, "CLASSICAL", "OCM_PNR_COMPOSITE"),
      period_ratio(report, "QL", "OCM"),
  };
  report.amplitude_ratios = {
      fringe_amplitude_ratio(report, "OCM_PNR_COMPOSITE", "QL"),
      fringe_amplitude_ratio(report, "OCM", "QL"),
  };

  report.array_statistics = array_statistics(config, report.spec, master_seed, workers);

  double const m = kExperimentPixelCount;
  double const split = config.coupler_split;
  auto simulated = [](NamedRatio const& r) -> std::optional<RatioEstimate> {
    return r.available ? std::optional(r.estimate) : std::nullopt;
  };
  PredictionRow raw{"PNR/NPA", efficiency_ratio(m, kPairPhotons, OccupancyScheme::pnr, OccupancyScheme::npa, 1.0),
                    std::nullopt};
  auto const& arr = report.array_statistics;
  if (arr.same_pixel_fraction > 0.0) {
    double const f = arr.same_pixel_fraction;
    raw.simulated = RatioEstimate{1.0 / f, arr.same_pixel_fraction_error / (f * f)};
  }
  report.predictions = {
      raw,
      {"PNR_COMPOSITE/NPA_with_coupler",
       efficiency_ratio(m, kPairPhotons, OccupancyScheme::pnr_composite, OccupancyScheme::npa, split),
       simulated(report.amplitude_ratios[0])},
      {"SPA/NPA_with_coupler",
       efficiency_ratio(m, kPairPhotons, OccupancyScheme::spa, OccupancyScheme::npa, split),
       simulated(report.amplitude_ratios[1])},
      {"period CLASSICAL/QL", 2.0, simulated(report.period_ratios[0])},
  };
  return report;
}

}  // namespace ocmsim
