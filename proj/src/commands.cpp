#include "ocmsim/commands.hpp"

#include <functional>
#include <ostream>

#include "ocmsim/config.hpp"
#include "ocmsim/serialize.hpp"

namespace ocmsim {
namespace {

namespace fs = std::filesystem;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input problems map to 2, everything else to 3.
int guarded(std::ostream& err, std::function<int()> const& body) {
  try {
    return body();
  } catch (ConfigError const& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (ParseError const& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (InputError const& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (std::invalid_argument const& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (std::domain_error const& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (std::exception const& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

RunConfig load_or_default(std::optional<fs::path> const& path) {
  if (path) return load_config(*path);
  return parse_config("");
}

void prepare_out_dir(fs::path const& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir.string());
}

void write_manifest(fs::path const& dir, RunManifest manifest) {
  manifest.timestamp = utc_timestamp();
  manifest.outputs.push_back("manifest.json");
  write_file(dir / "manifest.json", dump(to_json(manifest)));
}

struct ResolvedScheme {
  NoonStateSpec spec;
  DetectionScheme scheme;
  bool pixel_array;
};

ResolvedScheme resolve_scheme(RunConfig const& config, std::string const& name) {
  auto const spec = config.spec();
  auto const& e = config.experiment;
  if (name == "QL_MPA") return {spec, QlMpa{e.coupler_split}, true};
  if (name == "OCM_SP") return {spec, OcmSp{}, true};
  if (name == "OCM_PNR") return {spec, OcmPnr{}, true};
  if (name == "FIBER_PAIR") {
    return {spec, FiberPair{e.separations, e.fiber_core, e.scan_step, false, e.scan_half_range, e.coupler_split},
            false};
  }
  if (name == "APERTURE_SCAN") return {spec, ApertureScan{e.fiber_core, e.scan_step, e.scan_half_range}, false};
  for (auto const& s : paper_scenarios(e)) {
    if (s.name != name) continue;
    auto resolved = s.spec;
    if (config.state) resolved = config.state->with_photon_number(s.spec.photon_number());
    return {resolved, s.scheme, false};
  }
  throw InputError("unknown scheme '" + name + "'");
}

}  // namespace

int cmd_simulate(SimulateOptions const& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto const config = load_or_default(options.config);
    auto const resolved = resolve_scheme(config, options.scheme);
    std::uint64_t const events = options.events.value_or(config.experiment.events_per_run);
    if (events == 0) throw InputError("--events must be >= 1");
    if (options.workers == 0) throw InputError("--workers must be >= 1");
    prepare_out_dir(options.out_dir);

    RunResult run = resolved.pixel_array
                        ? simulate_run(resolved.spec, resolved.scheme, config.detector_array(resolved.spec), events,
                                       options.seed, options.workers)
                        : simulate_run(resolved.spec, resolved.scheme, events, options.seed, options.workers);

    write_file(options.out_dir / "histogram.csv", histogram_csv(run.histogram));
    Json stats;
    stats["scheme"] = options.scheme;
    stats["detection"] = std::string(scheme_name(resolved.scheme));
    stats["master_seed"] = options.seed;
    stats["events"] = events;
    stats["spec"] = to_json(resolved.spec);
    stats["run_stats"] = to_json(run.stats);
    stats["total_accepted"] = run.histogram.total_accepted();
    write_file(options.out_dir / "run_stats.json", dump(stats));
    write_manifest(options.out_dir, {"simulate", config.digest, options.seed, kToolVersion, {},
                                     {"histogram.csv", "run_stats.json"}});
    out << options.scheme << ": " << run.stats.accepted << " accepted of " << run.stats.trials() << " trials\n";
    return kExitOk;
  });
}

int cmd_analyze(AnalyzeOptions const& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto const text = read_file(options.histogram);
    auto const hist = parse_histogram_csv(text);
    FitOptions fit_options;
    fit_options.multi_start = options.multi_start;
    FringeFit fit;
    try {
      fit = fit_fringe(hist, fit_options);
    } catch (FitError const& e) {
      throw InputError(std::string("cannot fit histogram: ") + e.what());
    }
    prepare_out_dir(options.out_dir);

    Json record;
    record["source"] = options.histogram.filename().string();
    record["total_accepted"] = hist.total_accepted();
    record["fit"] = to_json(fit);
    write_file(options.out_dir / "fit.json", dump(record));
    write_file(options.out_dir / "residuals.csv", residual_csv(hist, &fit));
    write_manifest(options.out_dir, {"analyze", sha256_hex(text), 0, kToolVersion, {}, {"fit.json", "residuals.csv"}});
    out << "period_mm " << format_g9(fit.parameters.period) << " +- " << format_g9(fit.standard_errors.period)
        << (fit.converged ? "" : " (not converged)") << "\n";
    return kExitOk;
  });
}

int cmd_combinatorics(CombinatoricsOptions const& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto const model = parse_placement_model(options.model);
    auto const report = make_occupancy_report(options.pixels, options.photons, options.coupler_split, model);
    auto const text = dump(to_json(report));
    if (options.out_dir) {
      prepare_out_dir(*options.out_dir);
      write_file(*options.out_dir / "occupancy.json", text);
      std::string const args = "M=" + format_g9(options.pixels) + " N=" + std::to_string(options.photons) +
                               " coupler=" + format_g9(options.coupler_split) + " model=" + options.model;
      write_manifest(*options.out_dir, {"combinatorics", sha256_hex(args), 0, kToolVersion, {}, {"occupancy.json"}});
    }
    out << text;
    return kExitOk;
  });
}

int cmd_replicate(ReplicateOptions const& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto config = load_or_default(options.config);
    if (options.events) {
      if (*options.events == 0) throw InputError("--events must be >= 1");
      config.experiment.events_per_run = *options.events;
    }
    if (options.workers == 0) throw InputError("--workers must be >= 1");
    prepare_out_dir(options.out_dir);

    auto const report = run_comparison(config.experiment, options.seed, options.workers);
    std::vector<std::string> outputs{"comparison.json"};
    write_file(options.out_dir / "comparison.json", dump(to_json(report)));
    for (auto const& s : report.scenarios) {
      auto const hist_name = "histogram_" + s.name + ".csv";
      auto const fringe_name = "fringe_" + s.name + ".csv";
      write_file(options.out_dir / hist_name, histogram_csv(s.histogram));
      write_file(options.out_dir / fringe_name, residual_csv(s.histogram, s.fit ? &*s.fit : nullptr));
      outputs.push_back(hist_name);
      outputs.push_back(fringe_name);
    }
    write_manifest(options.out_dir, {"replicate", config.digest, options.seed, kToolVersion, {}, outputs});

    for (auto const& s : report.scenarios) {
      out << s.name << " period_mm ";
      if (s.fit) {
        out << format_g9(s.fit->parameters.period) << (s.fit->converged ? "" : " (not converged)");
      } else {
        out << "n/a (" << s.fit_error << ")";
      }
      out << "\n";
    }
    for (auto const& p : report.predictions) {
      out << p.name << " predicted " << format_g9(p.predicted) << " simulated ";
      if (p.simulated) {
        out << format_g9(p.simulated->value) << " +- " << format_g9(p.simulated->uncertainty);
      } else {
        out << "n/a";
      }
      out << "\n";
    }
    return kExitOk;
  });
}

}  // namespace ocmsim
