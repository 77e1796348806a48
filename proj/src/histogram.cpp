#include "ocmsim/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ocmsim {

Histogram::Histogram(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw std::invalid_argument("histogram needs at least one bin");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1]))
      throw std::invalid_argument("histogram edges must be strictly increasing");
  }
  counts_.assign(edges_.size() - 1, 0);
}

Histogram Histogram::uniform(double lower, double bin_width, std::size_t bin_count) {
  if (!(bin_width > 0.0) || bin_count == 0)
    throw std::invalid_argument("uniform histogram needs positive width and bins");
  std::vector<double> edges(bin_count + 1);
  for (std::size_t i = 0; i <= bin_count; ++i) edges[i] = lower + static_cast<double>(i) * bin_width;
  return Histogram(std::move(edges));
}

std::vector<double> Histogram::bin_centers() const {
  std::vector<double> centers(bin_count());
  for (std::size_t i = 0; i < centers.size(); ++i) centers[i] = bin_center(i);
  return centers;
}

std::optional<std::size_t> Histogram::find_bin(double x) const {
  if (edges_.empty() || !(x >= edges_.front()) || !(x < edges_.back())) return std::nullopt;
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  return static_cast<std::size_t>(std::distance(edges_.begin(), it)) - 1;
}

void Histogram::add(std::size_t bin, std::uint64_t count) {
  counts_.at(bin) += count;
  total_accepted_ += count;
}

bool Histogram::fill(double x) {
  auto bin = find_bin(x);
  if (!bin) return false;
  add(*bin);
  return true;
}

void Histogram::set_counts(std::vector<std::uint64_t> counts) {
  if (counts.size() != counts_.size()) throw std::invalid_argument("count vector size mismatch");
  counts_ = std::move(counts);
  total_accepted_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

Histogram& Histogram::operator+=(Histogram const& other) {
  if (other.edges_ != edges_) throw std::invalid_argument("cannot merge histograms with different edges");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_accepted_ += other.total_accepted_;
  return *this;
}

std::size_t Histogram::nonempty_bins() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(counts_.begin(), counts_.end(), [](std::uint64_t c) { return c > 0; }));
}

bool Histogram::has_uniform_bins(double relative_tolerance) const {
  if (bin_count() == 0) return false;
  double const w0 = bin_width(0);
  for (std::size_t i = 1; i < bin_count(); ++i) {
    if (std::abs(bin_width(i) - w0) > relative_tolerance * w0) return false;
  }
  return true;
}

}  // namespace ocmsim
