#include "ocmsim/occupancy.hpp"

#include <cmath>
#include <limits>

namespace ocmsim {
namespace {

void require(bool condition, char const* message) {
  if (!condition) throw std::invalid_argument(message);
}

void require_counts(std::int64_t pixels, std::int64_t photons) {
  require(pixels >= 1, "pixel count M must be >= 1");
  require(photons >= 1, "photon count N must be >= 1");
}

__extension__ using Wide = unsigned __int128;

// C(n, k) with a 128-bit intermediate; every partial product is itself a
// binomial coefficient so the division is exact.
Count binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Wide result = 1;
  for (std::int64_t i = 0; i < k; ++i) {
    result = result * static_cast<Wide>(n - i) / static_cast<Wide>(i + 1);
    if (result > std::numeric_limits<Count>::max())
      throw CountOverflow("binomial coefficient exceeds 64-bit range");
  }
  return static_cast<Count>(result);
}

double npa_real(double pixels) { return pixels; }

double scheme_count_real(OccupancyScheme scheme, double pixels, int photons, double coupler) {
  switch (scheme) {
    case OccupancyScheme::npa: return coupler * npa_real(pixels);
    case OccupancyScheme::spa: return c_spa_real(pixels, photons);
    case OccupancyScheme::pnr: return c_total_real(pixels, photons);
    case OccupancyScheme::pnr_composite:
      if (photons != 2) throw std::domain_error("PNR_COMPOSITE is defined for N = 2 only");
      return c_spa_real(pixels, photons) + coupler * npa_real(pixels);
  }
  throw std::invalid_argument("unknown occupancy scheme");
}

}  // namespace

Count c_total(std::int64_t pixels, std::int64_t photons) {
  require_counts(pixels, photons);
  return binomial(pixels + photons - 1, photons);
}

Count c_npa(std::int64_t pixels, std::int64_t photons) {
  require_counts(pixels, photons);
  return static_cast<Count>(pixels);
}

Count c_spa(std::int64_t pixels, std::int64_t photons) {
  require_counts(pixels, photons);
  return binomial(pixels, photons);
}

Count c_pnr(std::int64_t pixels, std::int64_t photons) { return c_total(pixels, photons); }

std::vector<OccupancyPattern> enumerate_occupancies(std::int64_t pixels, std::int64_t photons) {
  require_counts(pixels, photons);
  Count total = 0;
  try {
    total = c_total(pixels, photons);
  } catch (CountOverflow const&) {
    throw std::length_error("occupancy enumeration exceeds size bound");
  }
  if (total > kMaxEnumeratedPatterns) throw std::length_error("occupancy enumeration exceeds size bound");

  std::vector<OccupancyPattern> patterns;
  patterns.reserve(static_cast<std::size_t>(total));
  std::vector<std::int64_t> current(static_cast<std::size_t>(photons), 0);
  for (;;) {
    bool same = true, distinct = true;
    for (std::size_t i = 1; i < current.size(); ++i) {
      same = same && current[i] == current[i - 1];
      distinct = distinct && current[i] != current[i - 1];
    }
    // A single photon is both; count it as all-same (QL) and all-distinct (SPA).
    OccupancyTag tag = same ? OccupancyTag::all_same
                            : (distinct ? OccupancyTag::all_distinct : OccupancyTag::mixed);
    patterns.push_back({current, tag});

    // Next non-decreasing sequence.
    auto i = static_cast<std::ptrdiff_t>(current.size()) - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == pixels - 1) --i;
    if (i < 0) break;
    auto const v = ++current[static_cast<std::size_t>(i)];
    for (auto j = static_cast<std::size_t>(i) + 1; j < current.size(); ++j) current[j] = v;
  }
  return patterns;
}

std::string_view to_string(OccupancyScheme scheme) noexcept {
  switch (scheme) {
    case OccupancyScheme::npa: return "NPA";
    case OccupancyScheme::spa: return "SPA";
    case OccupancyScheme::pnr: return "PNR";
    case OccupancyScheme::pnr_composite: return "PNR_COMPOSITE";
  }
  return "unknown";
}

OccupancyScheme parse_occupancy_scheme(std::string_view name) {
  for (auto s : {OccupancyScheme::npa, OccupancyScheme::spa, OccupancyScheme::pnr,
                 OccupancyScheme::pnr_composite}) {
    if (name == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown occupancy scheme: " + std::string(name));
}

std::string_view to_string(PlacementModel model) noexcept {
  return model == PlacementModel::multiset_uniform ? "multiset_uniform" : "placement_uniform";
}

PlacementModel parse_placement_model(std::string_view name) {
  if (name == "multiset_uniform" || name == "multiset") return PlacementModel::multiset_uniform;
  if (name == "placement_uniform" || name == "placement") return PlacementModel::placement_uniform;
  throw std::invalid_argument("unknown placement model: " + std::string(name));
}

double c_total_real(double pixels, int photons) {
  require(photons >= 1, "photon count N must be >= 1");
  if (!(pixels > photons - 1)) throw std::domain_error("Gamma extension needs M > N - 1");
  // Gamma(M+N) / (Gamma(N+1) Gamma(M)) as a rising factorial over N!
  double value = 1.0;
  for (int k = 1; k <= photons; ++k) value *= (pixels + k - 1) / k;
  return value;
}

double c_spa_real(double pixels, int photons) {
  require(photons >= 1, "photon count N must be >= 1");
  if (!(pixels > photons - 1)) throw std::domain_error("Gamma extension needs M > N - 1");
  // Gamma(M+1) / (Gamma(N+1) Gamma(M-N+1)) as a falling factorial over N!
  double value = 1.0;
  for (int k = 1; k <= photons; ++k) value *= (pixels - k + 1) / k;
  return value;
}

double efficiency_ratio(double pixels, int photons, OccupancyScheme numerator,
                        OccupancyScheme denominator, double coupler_split) {
  if (!(coupler_split > 0.0 && coupler_split <= 1.0))
    throw std::domain_error("coupler split must lie in (0, 1]");
  double const den = scheme_count_real(denominator, pixels, photons, coupler_split);
  if (!(den > 0.0)) throw std::domain_error("denominator count is zero");
  return scheme_count_real(numerator, pixels, photons, coupler_split) / den;
}

double acceptance_probability(OccupancyScheme scheme, std::int64_t pixels, std::int64_t photons,
                              PlacementModel model) {
  require_counts(pixels, photons);
  double const m = static_cast<double>(pixels);
  if (model == PlacementModel::multiset_uniform) {
    double const total = static_cast<double>(c_total(pixels, photons));
    switch (scheme) {
      case OccupancyScheme::npa: return static_cast<double>(c_npa(pixels, photons)) / total;
      case OccupancyScheme::spa: return static_cast<double>(c_spa(pixels, photons)) / total;
      case OccupancyScheme::pnr: return 1.0;
      case OccupancyScheme::pnr_composite: break;
    }
  } else {
    switch (scheme) {
      case OccupancyScheme::npa: return std::pow(m, static_cast<double>(1 - photons));
      case OccupancyScheme::spa: {
        if (photons > pixels) return 0.0;
        double p = 1.0;  // M! / ((M-N)! M^N)
        for (std::int64_t k = 0; k < photons; ++k) p *= (m - static_cast<double>(k)) / m;
        return p;
      }
      case OccupancyScheme::pnr: return 1.0;
      case OccupancyScheme::pnr_composite: break;
    }
  }
  throw std::invalid_argument("acceptance probability is defined for NPA, SPA and PNR");
}

OccupancyReport make_occupancy_report(double pixels, int photons, double coupler_split,
                                      PlacementModel model) {
  require(photons >= 1, "photon count N must be >= 1");
  require(pixels >= 1.0 && std::isfinite(pixels), "pixel count M must be >= 1");
  require(coupler_split > 0.0 && coupler_split <= 1.0, "coupler split must lie in (0, 1]");

  OccupancyReport report;
  report.pixels = pixels;
  report.photons = photons;
  report.coupler_split = coupler_split;
  report.model = model;

  bool const integer_m = std::floor(pixels) == pixels;
  if (integer_m) {
    auto const m = static_cast<std::int64_t>(pixels);
    report.c_total = c_total(m, photons);
    report.c_npa = c_npa(m, photons);
    report.c_spa = c_spa(m, photons);
    report.c_pnr = c_pnr(m, photons);
    if (*report.c_total <= kMaxEnumeratedPatterns) {
      Count same = 0, distinct = 0;
      auto const patterns = enumerate_occupancies(m, photons);
      for (auto const& p : patterns) {
        if (p.tag == OccupancyTag::all_same) ++same;
        if (p.tag == OccupancyTag::all_distinct || photons == 1) ++distinct;
      }
      report.oracle_verified = patterns.size() == *report.c_total && same == *report.c_npa &&
                               distinct == *report.c_spa && patterns.size() == *report.c_pnr;
    }
    for (auto s : {OccupancyScheme::npa, OccupancyScheme::spa, OccupancyScheme::pnr}) {
      std::string const name(to_string(s));
      report.acceptance_multiset[name] =
          acceptance_probability(s, m, photons, PlacementModel::multiset_uniform);
      report.acceptance_placement[name] =
          acceptance_probability(s, m, photons, PlacementModel::placement_uniform);
    }
  }

  if (pixels > photons - 1) {
    report.ratios["PNR/NPA"] = efficiency_ratio(pixels, photons, OccupancyScheme::pnr, OccupancyScheme::npa, 1.0);
    report.ratios["SPA/NPA"] = efficiency_ratio(pixels, photons, OccupancyScheme::spa, OccupancyScheme::npa, 1.0);
    report.ratios["SPA/PNR"] = efficiency_ratio(pixels, photons, OccupancyScheme::spa, OccupancyScheme::pnr, 1.0);
    if (photons == 2) {
      report.ratios["PNR_COMPOSITE/NPA_with_coupler"] = efficiency_ratio(
          pixels, photons, OccupancyScheme::pnr_composite, OccupancyScheme::npa, coupler_split);
    }
  }
  return report;
}

}  // namespace ocmsim
