#include <iostream>

#include <CLI11.hpp>

#include "ocmsim/commands.hpp"
#include "ocmsim/serialize.hpp"

int main(int argc, char** argv) {
  using namespace ocmsim;

  CLI::App app{"Monte Carlo simulator and fringe analysis for N-photon centroid detection"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Sample events, detect and bin centroids");
  simulate->add_option("--config", sim.config, "INI config file");
  simulate->add_option("--scheme", sim.scheme,
                       "QL_MPA, OCM_SP, OCM_PNR, FIBER_PAIR, APERTURE_SCAN, CLASSICAL, QL, OCM, OCM_PNR_COMPOSITE")
      ->capture_default_str();
  simulate->add_option("--events", sim.events, "Number of generated events");
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--out", sim.out_dir, "Output directory")->capture_default_str();
  simulate->add_option("--workers", sim.workers, "Worker threads")->capture_default_str();

  AnalyzeOptions ana;
  auto* analyze = app.add_subcommand("analyze", "Fit a fringe to a histogram CSV");
  analyze->add_option("histogram", ana.histogram, "Histogram CSV")->required();
  analyze->add_option("--out", ana.out_dir, "Output directory")->capture_default_str();
  analyze->add_flag("--multi-start", ana.multi_start, "Try eight phase starts");

  CombinatoricsOptions comb;
  auto* combinatorics = app.add_subcommand("combinatorics", "Occupancy counts and efficiency ratios");
  combinatorics->add_option("--pixels,-M", comb.pixels, "Pixel count M (real allowed)")->capture_default_str();
  combinatorics->add_option("--photons,-N", comb.photons, "Photon number N")->capture_default_str();
  combinatorics->add_option("--coupler", comb.coupler_split, "Coupler split for the NPA channel")
      ->capture_default_str();
  combinatorics->add_option("--model", comb.model, "multiset_uniform or placement_uniform")->capture_default_str();
  combinatorics->add_option("--out", comb.out_dir, "Also write occupancy.json here");

  ReplicateOptions rep;
  auto* replicate = app.add_subcommand("replicate", "Run the four-scenario fiber comparison");
  replicate->add_option("--config", rep.config, "INI config file");
  replicate->add_option("--seed", rep.seed, "Master seed")->capture_default_str();
  replicate->add_option("--events", rep.events, "Events per scenario");
  replicate->add_option("--out", rep.out_dir, "Output directory")->capture_default_str();
  replicate->add_option("--workers", rep.workers, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForVersion const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return kExitInputError;
  }

  if (*simulate) return cmd_simulate(sim, std::cout, std::cerr);
  if (*analyze) return cmd_analyze(ana, std::cout, std::cerr);
  if (*combinatorics) return cmd_combinatorics(comb, std::cout, std::cerr);
  return cmd_replicate(rep, std::cout, std::cerr);
}
