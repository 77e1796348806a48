#include "ocmsim/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ocmsim {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool condition, char const* message) {
  if (!condition) throw std::invalid_argument(message);
}

struct Accumulator {
  Histogram histogram;
  RunStats stats;
};

// Contiguous event ranges per worker; merging is plain addition so the result
// is the same for any worker count.
template <class PerEvent>
RunResult run_partitioned(Histogram const& empty, std::uint64_t n_events, unsigned workers,
                          PerEvent const& per_event) {
  workers = std::max(1u, workers);
  if (static_cast<std::uint64_t>(workers) > n_events) workers = static_cast<unsigned>(n_events);

  std::vector<Accumulator> partial(workers, Accumulator{empty, RunStats{}});
  auto work = [&](unsigned w) {
    std::uint64_t const begin = n_events * w / workers;
    std::uint64_t const end = n_events * (w + 1) / workers;
    for (std::uint64_t i = begin; i < end; ++i) per_event(i, partial[w]);
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }

  RunResult result{empty, RunStats{}};
  for (auto const& p : partial) {
    result.histogram += p.histogram;
    result.stats.accepted += p.stats.accepted;
    for (auto const& [reason, count] : p.stats.rejections) result.stats.rejections[reason] += count;
  }
  result.stats.generated = n_events;
  result.histogram.set_total_generated(n_events);
  return result;
}

std::int64_t scan_half_count(double step, double half_range) {
  return static_cast<std::int64_t>(std::llround(half_range / step));
}

// Scan indices whose aperture (width w) around (k - K) * step may hold x.
std::pair<std::int64_t, std::int64_t> candidate_range(double x, double step, double w,
                                                      std::int64_t half_count) {
  double const k = x / step + static_cast<double>(half_count);
  double const reach = 0.5 * w / step + 1.0;
  auto lo = static_cast<std::int64_t>(std::floor(k - reach));
  auto hi = static_cast<std::int64_t>(std::ceil(k + reach));
  return {std::max<std::int64_t>(lo, 0), std::min<std::int64_t>(hi, 2 * half_count)};
}

}  // namespace

DetectorArray::DetectorArray(double pixel_size, std::int64_t pixel_count, double origin,
                             double quantum_efficiency)
    : pixel_size_(pixel_size),
      pixel_count_(pixel_count),
      origin_(origin),
      quantum_efficiency_(quantum_efficiency) {
  require(pixel_size > 0.0 && std::isfinite(pixel_size), "pixel size must be positive");
  require(pixel_count >= 1, "pixel count must be >= 1");
  require(std::isfinite(origin), "array origin must be finite");
  require(quantum_efficiency > 0.0 && quantum_efficiency <= 1.0,
          "quantum efficiency must lie in (0, 1]");
}

DetectorArray DetectorArray::centered(double pixel_size, std::int64_t pixel_count) {
  return DetectorArray(pixel_size, pixel_count, -0.5 * pixel_size * static_cast<double>(pixel_count));
}

DetectorArray covering_array(NoonStateSpec const& spec, double pixel_size) {
  if (!(pixel_size > 0.0)) throw std::invalid_argument("pixel size must be positive");
  double const span = 10.0 / (std::sqrt(static_cast<double>(spec.photon_number())) * spec.envelope_bandwidth());
  return DetectorArray::centered(pixel_size, static_cast<std::int64_t>(std::ceil(span / pixel_size)));
}

std::optional<std::int64_t> DetectorArray::pixel_of(double x) const noexcept {
  if (!(x >= origin_) || !(x < upper_edge())) return std::nullopt;
  auto i = static_cast<std::int64_t>(std::floor((x - origin_) / pixel_size_));
  return std::clamp<std::int64_t>(i, 0, pixel_count_ - 1);
}

double DetectorArray::pixel_center(std::int64_t pixel) const noexcept {
  return origin_ + (static_cast<double>(pixel) + 0.5) * pixel_size_;
}

void validate(DetectionScheme const& scheme) {
  std::visit(overloaded{
                 [](QlMpa const& s) {
                   require(s.coupler_split > 0.0 && s.coupler_split <= 1.0,
                           "coupler split must lie in (0, 1]");
                 },
                 [](OcmSp const&) {},
                 [](OcmPnr const&) {},
                 [](FiberPair const& s) {
                   require(s.aperture_width > 0.0, "aperture width must be positive");
                   require(s.scan_step > 0.0, "scan step must be positive");
                   require(s.scan_half_range >= 0.0, "scan range must be non-negative");
                   require(s.coupler_split > 0.0 && s.coupler_split <= 1.0,
                           "coupler split must lie in (0, 1]");
                   require(!s.separations.empty() || s.include_zero_separation_coupler,
                           "fiber pair needs at least one configuration");
                   auto sorted = s.separations;
                   std::sort(sorted.begin(), sorted.end());
                   for (std::size_t i = 0; i < sorted.size(); ++i) {
                     require(sorted[i] > 0.0, "fiber separations must be positive");
                     require(i == 0 || sorted[i] != sorted[i - 1], "fiber separations must be distinct");
                   }
                 },
                 [](ApertureScan const& s) {
                   require(s.aperture_width > 0.0, "aperture width must be positive");
                   require(s.scan_step > 0.0, "scan step must be positive");
                   require(s.scan_half_range >= 0.0, "scan range must be non-negative");
                 },
             },
             scheme);
}

std::string_view scheme_name(DetectionScheme const& scheme) {
  return std::visit(overloaded{
                        [](QlMpa const&) { return std::string_view("QL_MPA"); },
                        [](OcmSp const&) { return std::string_view("OCM_SP"); },
                        [](OcmPnr const&) { return std::string_view("OCM_PNR"); },
                        [](FiberPair const&) { return std::string_view("FIBER_PAIR"); },
                        [](ApertureScan const&) { return std::string_view("APERTURE_SCAN"); },
                    },
                    scheme);
}

bool is_scanned(DetectionScheme const& scheme) noexcept {
  return std::holds_alternative<FiberPair>(scheme) || std::holds_alternative<ApertureScan>(scheme);
}

double coupler_pass_probability(double coupler_split, int photon_number) {
  require(coupler_split > 0.0 && coupler_split <= 1.0, "coupler split must lie in (0, 1]");
  return std::pow(coupler_split, photon_number - 1);
}

std::string_view to_string(RejectionReason reason) noexcept {
  switch (reason) {
    case RejectionReason::none: return "none";
    case RejectionReason::not_colocated: return "not_colocated";
    case RejectionReason::collision_non_pnr: return "collision_non_pnr";
    case RejectionReason::outside_array: return "outside_array";
    case RejectionReason::coupler_loss: return "coupler_loss";
    case RejectionReason::no_pair_in_apertures: return "no_pair_in_apertures";
    case RejectionReason::detector_inefficiency: return "detector_inefficiency";
  }
  return "unknown";
}

PixelHits assign_pixels(DetectorArray const& array, PhotonArrivalEvent const& event) {
  PixelHits hits;
  for (double x : event.positions()) {
    if (auto pixel = array.pixel_of(x)) {
      ++hits.counts[*pixel];
    } else {
      ++hits.outside;
    }
  }
  return hits;
}

DetectionRecord detect_hits(DetectionScheme const& scheme, DetectorArray const& array,
                            PixelHits const& hits, int photon_number, RngStream& rng) {
  DetectionRecord record;
  record.pixel_hits = hits.counts;
  auto reject = [&](RejectionReason reason) {
    record.rejection_reason = reason;
    return record;
  };

  if (hits.outside > 0) return reject(RejectionReason::outside_array);

  auto const efficiency_pass = [&] {
    if (array.quantum_efficiency() >= 1.0) return true;
    bool all = true;
    for (int n = 0; n < photon_number; ++n) all = rng.bernoulli(array.quantum_efficiency()) && all;
    return all;
  };

  auto const accept = [&](double centroid) {
    record.accepted = true;
    record.centroid_estimate = centroid;
    return record;
  };

  return std::visit(
      overloaded{
          [&](QlMpa const& s) {
            if (hits.counts.size() != 1) return reject(RejectionReason::not_colocated);
            if (!efficiency_pass()) return reject(RejectionReason::detector_inefficiency);
            if (!rng.bernoulli(coupler_pass_probability(s.coupler_split, photon_number)))
              return reject(RejectionReason::coupler_loss);
            return accept(array.pixel_center(hits.counts.begin()->first));
          },
          [&](OcmSp const&) {
            if (static_cast<int>(hits.counts.size()) != photon_number)
              return reject(RejectionReason::collision_non_pnr);
            if (!efficiency_pass()) return reject(RejectionReason::detector_inefficiency);
            double sum = 0.0;
            for (auto const& [pixel, count] : hits.counts) sum += array.pixel_center(pixel);
            return accept(sum / photon_number);
          },
          [&](OcmPnr const&) {
            if (!efficiency_pass()) return reject(RejectionReason::detector_inefficiency);
            double sum = 0.0;
            for (auto const& [pixel, count] : hits.counts) sum += count * array.pixel_center(pixel);
            return accept(sum / photon_number);
          },
          [&](FiberPair const&) -> DetectionRecord {
            throw std::invalid_argument("FIBER_PAIR is a scanned scheme; use detect_fiber_pair");
          },
          [&](ApertureScan const&) -> DetectionRecord {
            throw std::invalid_argument("APERTURE_SCAN is a scanned scheme");
          },
      },
      scheme);
}

DetectionRecord detect(DetectionScheme const& scheme, DetectorArray const& array,
                       PhotonArrivalEvent const& event, RngStream& rng) {
  return detect_hits(scheme, array, assign_pixels(array, event), event.photon_number(), rng);
}

bool in_aperture(double x, double center, double width) noexcept {
  return x >= center - 0.5 * width && x < center + 0.5 * width;
}

DetectionRecord detect_fiber_pair(FiberPair const& scheme, PhotonArrivalEvent const& event,
                                  double scan_position, double separation, RngStream& rng) {
  require(event.photon_number() == 2, "fiber-pair detection is defined for photon pairs only");
  require(separation >= 0.0, "fiber separation must be non-negative");

  auto const x = event.positions();
  double const w = scheme.aperture_width;
  DetectionRecord record;

  bool geometric = false;
  if (separation == 0.0) {
    geometric = in_aperture(x[0], scan_position, w) && in_aperture(x[1], scan_position, w);
  } else {
    double const left = scan_position - 0.5 * separation;
    double const right = scan_position + 0.5 * separation;
    geometric = (in_aperture(x[0], left, w) && in_aperture(x[1], right, w)) ||
                (in_aperture(x[1], left, w) && in_aperture(x[0], right, w));
  }
  if (!geometric) {
    record.rejection_reason = RejectionReason::no_pair_in_apertures;
    return record;
  }
  if (separation == 0.0 && !rng.bernoulli(coupler_pass_probability(scheme.coupler_split, 2))) {
    record.rejection_reason = RejectionReason::coupler_loss;
    return record;
  }
  record.accepted = true;
  record.centroid_estimate = scan_position;
  return record;
}

double RunStats::acceptance_rate() const noexcept {
  return trials() == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(trials());
}

double RunStats::acceptance_standard_error() const noexcept {
  if (trials() == 0) return 0.0;
  double const r = acceptance_rate();
  return std::sqrt(r * (1.0 - r) / static_cast<double>(trials()));
}

std::vector<double> scan_positions(double scan_step, double scan_half_range) {
  std::int64_t const half = scan_half_count(scan_step, scan_half_range);
  std::vector<double> positions;
  positions.reserve(static_cast<std::size_t>(2 * half + 1));
  for (std::int64_t k = 0; k <= 2 * half; ++k)
    positions.push_back(static_cast<double>(k - half) * scan_step);
  return positions;
}

RunResult simulate_run(NoonStateSpec const& spec, DetectionScheme const& scheme,
                       DetectorArray const& array, std::uint64_t n_events,
                       std::uint64_t master_seed, unsigned workers) {
  if (is_scanned(scheme)) return simulate_run(spec, scheme, n_events, master_seed, workers);
  validate(scheme);
  require(n_events >= 1, "n_events must be >= 1");

  int const n = spec.photon_number();
  bool const per_pixel = std::holds_alternative<QlMpa>(scheme);
  double const dx = array.pixel_size();
  Histogram const empty =
      per_pixel ? Histogram::uniform(array.origin(), dx, static_cast<std::size_t>(array.pixel_count()))
                : Histogram::uniform(array.origin() + 0.5 * dx - 0.5 * dx / n, dx / n,
                                     static_cast<std::size_t>(n * (array.pixel_count() - 1) + 1));

  auto per_event = [&](std::uint64_t i, Accumulator& acc) {
    RngStream rng(master_seed, i);
    auto const event = sample_event(spec, rng);
    auto const hits = assign_pixels(array, event);
    auto const record = detect_hits(scheme, array, hits, n, rng);
    if (!record.accepted) {
      ++acc.stats.rejections[record.rejection_reason];
      return;
    }
    // Centroid bins sit on the 1/N-pixel lattice, so the bin index is the
    // photon-weighted pixel-index sum.
    std::int64_t bin = 0;
    for (auto const& [pixel, count] : hits.counts) bin += per_pixel ? pixel : pixel * count;
    acc.histogram.add(static_cast<std::size_t>(bin));
    ++acc.stats.accepted;
  };

  auto result = run_partitioned(empty, n_events, workers, per_event);
  result.histogram.set_configurations(1);
  result.stats.configurations = 1;
  return result;
}

RunResult simulate_run(NoonStateSpec const& spec, DetectionScheme const& scheme,
                       std::uint64_t n_events, std::uint64_t master_seed, unsigned workers) {
  require(is_scanned(scheme), "pixel-array schemes need a DetectorArray");
  validate(scheme);
  require(n_events >= 1, "n_events must be >= 1");

  int const n = spec.photon_number();
  double step = 0.0, half_range = 0.0, width = 0.0;
  std::vector<double> separations;
  if (auto const* fp = std::get_if<FiberPair>(&scheme)) {
    require(n == 2, "FIBER_PAIR requires N = 2");
    step = fp->scan_step;
    half_range = fp->scan_half_range;
    width = fp->aperture_width;
    separations = fp->separations;
    std::sort(separations.begin(), separations.end());
    if (fp->include_zero_separation_coupler) separations.insert(separations.begin(), 0.0);
  } else {
    auto const& scan = std::get<ApertureScan>(scheme);
    require(n == 1, "APERTURE_SCAN requires N = 1");
    step = scan.scan_step;
    half_range = scan.scan_half_range;
    width = scan.aperture_width;
    separations = {0.0};
  }

  std::int64_t const half = scan_half_count(step, half_range);
  auto const positions = scan_positions(step, half_range);
  Histogram const empty = Histogram::uniform(positions.front() - 0.5 * step, step, positions.size());
  std::uint64_t const configurations = separations.size() * positions.size();

  auto per_event = [&](std::uint64_t i, Accumulator& acc) {
    RngStream rng(master_seed, i);
    auto const event = sample_event(spec, rng);
    auto const x = event.positions();

    if (n == 1) {
      auto const [lo, hi] = candidate_range(x[0], step, width, half);
      for (std::int64_t k = lo; k <= hi; ++k) {
        if (in_aperture(x[0], positions[static_cast<std::size_t>(k)], width)) {
          acc.histogram.add(static_cast<std::size_t>(k));
          ++acc.stats.accepted;
        }
      }
      return;
    }

    auto const& fiber = std::get<FiberPair>(scheme);
    std::vector<std::int64_t> candidates;
    for (double s : separations) {
      candidates.clear();
      for (double p : {x[0], x[1]}) {
        auto const [lo, hi] = candidate_range(p + 0.5 * s, step, width, half);
        for (std::int64_t k = lo; k <= hi; ++k) candidates.push_back(k);
      }
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      for (std::int64_t k : candidates) {
        auto const record = detect_fiber_pair(fiber, event, positions[static_cast<std::size_t>(k)], s, rng);
        if (record.accepted) {
          acc.histogram.add(static_cast<std::size_t>(k));
          ++acc.stats.accepted;
        } else if (record.rejection_reason == RejectionReason::coupler_loss) {
          ++acc.stats.rejections[RejectionReason::coupler_loss];
        }
      }
    }
  };

  auto result = run_partitioned(empty, n_events, workers, per_event);
  result.histogram.set_configurations(configurations);
  result.stats.configurations = configurations;
  std::uint64_t const coupler_losses = result.stats.rejections[RejectionReason::coupler_loss];
  result.stats.rejections[RejectionReason::no_pair_in_apertures] =
      result.stats.trials() - result.stats.accepted - coupler_losses;
  if (coupler_losses == 0) result.stats.rejections.erase(RejectionReason::coupler_loss);
  return result;
}

}  // namespace ocmsim
