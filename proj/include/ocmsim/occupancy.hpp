#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ocmsim {

//! Raised when an exact count does not fit in 64 bits.
class CountOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

using Count = std::uint64_t;

//! Multisets of N photons over M pixels: (M+N-1)! / (N! (M-1)!).
Count c_total(std::int64_t pixels, std::int64_t photons);
//! All photons on one pixel: M.
Count c_npa(std::int64_t pixels, std::int64_t photons);
//! All photons on distinct pixels: M! / (N! (M-N)!), zero when N > M.
Count c_spa(std::int64_t pixels, std::int64_t photons);
//! Photon-number-resolving arrays keep every multiset: equals c_total.
Count c_pnr(std::int64_t pixels, std::int64_t photons);

enum class OccupancyTag { all_same, all_distinct, mixed };

struct OccupancyPattern {
  std::vector<std::int64_t> pixels;  // non-decreasing
  OccupancyTag tag;
};

inline constexpr Count kMaxEnumeratedPatterns = 10'000'000;

//! Every multiset exactly once, lexicographic. Throws std::length_error past
//! kMaxEnumeratedPatterns.
std::vector<OccupancyPattern> enumerate_occupancies(std::int64_t pixels, std::int64_t photons);

enum class OccupancyScheme { npa, spa, pnr, pnr_composite };
std::string_view to_string(OccupancyScheme scheme) noexcept;
OccupancyScheme parse_occupancy_scheme(std::string_view name);

enum class PlacementModel { multiset_uniform, placement_uniform };
std::string_view to_string(PlacementModel model) noexcept;
PlacementModel parse_placement_model(std::string_view name);

//! Rising-factorial (Gamma) extensions to real M. Domain: M > N - 1.
double c_total_real(double pixels, int photons);
double c_spa_real(double pixels, int photons);

/*!
 * Ratio of effective counts for two schemes at real M.
 *
 * NPA carries the coupler efficiency (coupler_split = 1 means none). The
 * PNR_COMPOSITE count c_spa + coupler * c_npa is the fiber-pair emulation
 * and is defined for N = 2 only.
 */
double efficiency_ratio(double pixels, int photons, OccupancyScheme numerator,
                        OccupancyScheme denominator, double coupler_split = 1.0);

//! Probability that a uniformly random arrival is accepted by `scheme`.
double acceptance_probability(OccupancyScheme scheme, std::int64_t pixels, std::int64_t photons,
                              PlacementModel model = PlacementModel::multiset_uniform);

struct OccupancyReport {
  double pixels = 0;
  int photons = 0;
  double coupler_split = 1.0;
  PlacementModel model = PlacementModel::multiset_uniform;

  // Exact counts, present for integer M only.
  std::optional<Count> c_total, c_npa, c_spa, c_pnr;
  // Set when the enumeration oracle ran and matched every closed form.
  std::optional<bool> oracle_verified;

  std::map<std::string, double> acceptance_multiset;
  std::map<std::string, double> acceptance_placement;
  std::map<std::string, double> ratios;
};

OccupancyReport make_occupancy_report(double pixels, int photons, double coupler_split,
                                      PlacementModel model);

}  // namespace ocmsim
