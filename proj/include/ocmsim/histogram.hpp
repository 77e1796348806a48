#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ocmsim {

/*!
 * Binned counts over strictly increasing edges (mm).
 *
 * total_generated is the incident flux seen by each detector configuration.
 * Pixel arrays have one configuration; scanned detectors offer every event
 * to each scan configuration, so the bound on accepted counts is
 * total_generated * configurations.
 */
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(std::vector<double> edges);
  static Histogram uniform(double lower, double bin_width, std::size_t bin_count);

  std::vector<double> const& edges() const noexcept { return edges_; }
  std::vector<std::uint64_t> const& counts() const noexcept { return counts_; }
  std::size_t bin_count() const noexcept { return counts_.size(); }
  double bin_center(std::size_t bin) const { return 0.5 * (edges_.at(bin) + edges_.at(bin + 1)); }
  double bin_width(std::size_t bin) const { return edges_.at(bin + 1) - edges_.at(bin); }
  std::vector<double> bin_centers() const;

  //! Bin containing x under the half-open [lower, upper) rule.
  std::optional<std::size_t> find_bin(double x) const;

  void add(std::size_t bin, std::uint64_t count = 1);
  //! Returns false when x is outside the edges.
  bool fill(double x);
  void set_counts(std::vector<std::uint64_t> counts);
  Histogram& operator+=(Histogram const& other);

  std::uint64_t total_accepted() const noexcept { return total_accepted_; }
  std::uint64_t total_generated() const noexcept { return total_generated_; }
  void set_total_generated(std::uint64_t n) noexcept { total_generated_ = n; }
  std::uint64_t configurations() const noexcept { return configurations_; }
  void set_configurations(std::uint64_t n) noexcept { configurations_ = n; }

  std::size_t nonempty_bins() const noexcept;
  bool has_uniform_bins(double relative_tolerance = 1e-9) const;

 private:
  std::vector<double> edges_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_accepted_ = 0;
  std::uint64_t total_generated_ = 0;
  std::uint64_t configurations_ = 1;
};

}  // namespace ocmsim
