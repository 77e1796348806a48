#include "ocmsim/fringe_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

namespace ocmsim {
namespace {

using std::numbers::pi;

constexpr int kParams = 6;
enum Index { kAmplitude, kWidth, kVisibility, kPeriod, kPhase, kCenter };
using Params = std::array<double, kParams>;

Params to_params(FringeModel const& m) {
  return {m.amplitude, m.width, m.visibility, m.period, m.phase, m.center};
}

FringeModel to_model(Params const& p) { return {p[0], p[1], p[2], p[3], p[4], p[5]}; }

struct Samples {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> weight;
  double bin_width = 0.0;
  double span = 0.0;
};

Samples samples_from(Histogram const& hist) {
  Samples s;
  s.x = hist.bin_centers();
  s.y.reserve(hist.bin_count());
  for (auto c : hist.counts()) s.y.push_back(static_cast<double>(c));
  double floor = std::numeric_limits<double>::infinity();
  for (double y : s.y)
    if (y > 0.0) floor = std::min(floor, y);
  if (!std::isfinite(floor)) floor = 1.0;
  for (double y : s.y) s.weight.push_back(1.0 / std::max(y, floor));
  s.span = hist.edges().back() - hist.edges().front();
  s.bin_width = s.span / static_cast<double>(hist.bin_count());
  return s;
}

double weighted_mean(Samples const& s) {
  double sy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    sy += s.y[i];
    sxy += s.x[i] * s.y[i];
  }
  return sy > 0.0 ? sxy / sy : 0.0;
}

struct EnvelopeGuess {
  double amplitude;
  double width;
};

// Moment-matched Gaussian over the counts around `center`.
EnvelopeGuess moment_envelope(Samples const& s, double center) {
  double sy = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    double const u = s.x[i] - center;
    sy += s.y[i];
    s2 += s.y[i] * u * u;
  }
  if (!(sy > 0.0)) throw FitError(FitError::Kind::insufficient_data, "histogram is empty");
  double const width = std::max(std::sqrt(2.0 * s2 / sy), s.bin_width);
  return {sy * s.bin_width / (width * std::sqrt(pi)), width};
}

struct SpectralPeak {
  double period;
  double phase;
  double visibility;
};

SpectralPeak spectral_peak(Samples const& s, double center) {
  auto const env = moment_envelope(s, center);
  std::vector<double> residual(s.x.size()), envelope(s.x.size());
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    double const u = (s.x[i] - center) / env.width;
    envelope[i] = env.amplitude * std::exp(-u * u);
    residual[i] = s.y[i] - envelope[i];
  }

  auto coefficient = [&](double f) {
    std::complex<double> sum{};
    for (std::size_t i = 0; i < s.x.size(); ++i)
      sum += residual[i] * std::polar(1.0, -2.0 * pi * f * (s.x[i] - center));
    return sum;
  };

  // A period must fit at least twice in the span to be resolvable.
  double const f_lo = 1.5 / s.span;
  double const f_hi = 0.5 / s.bin_width;
  double const df = 1.0 / (16.0 * s.span);
  std::vector<double> freq, power;
  for (double f = f_lo; f <= f_hi; f += df) {
    freq.push_back(f);
    power.push_back(std::norm(coefficient(f)));
  }
  if (power.size() < 3) throw FitError(FitError::Kind::insufficient_data, "too few bins for a spectrum");

  auto const top = static_cast<std::size_t>(std::distance(power.begin(), std::max_element(power.begin(), power.end())));
  if (!(power[top] > 0.0))
    throw FitError(FitError::Kind::ambiguous_period, "flat spectrum: no dominant fringe frequency");
  if (top == 0 || top + 1 == power.size())
    throw FitError(FitError::Kind::ambiguous_period, "spectrum peaks at the search boundary");

  double const resolution = 1.0 / s.span;
  for (std::size_t j = 1; j + 1 < power.size(); ++j) {
    bool const local_max = power[j] >= power[j - 1] && power[j] >= power[j + 1];
    if (j != top && local_max && std::abs(freq[j] - freq[top]) > resolution &&
        power[j] >= 0.99 * power[top])
      throw FitError(FitError::Kind::ambiguous_period, "two spectral peaks of equal power");
  }

  // Parabolic refinement on the three samples around the peak.
  double const a = power[top - 1], b = power[top], c = power[top + 1];
  double const denom = a - 2.0 * b + c;
  double const shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
  double const f_peak = freq[top] + std::clamp(shift, -0.5, 0.5) * df;

  auto const coeff = coefficient(f_peak);
  double const env_sum = std::accumulate(envelope.begin(), envelope.end(), 0.0);
  double const visibility = env_sum > 0.0 ? 2.0 * std::abs(coeff) / env_sum : 0.5;
  return {1.0 / f_peak, std::arg(coeff), std::clamp(visibility, 0.05, 1.0)};
}

struct Evaluation {
  Eigen::VectorXd residual;  // sqrt(w) (y - f)
  Eigen::MatrixXd jacobian;  // sqrt(w) df/dp, all six parameters
  double cost = 0.0;
};

Evaluation evaluate(Samples const& s, Params const& p, bool with_jacobian) {
  auto const n = static_cast<Eigen::Index>(s.x.size());
  Evaluation e;
  e.residual.resize(n);
  if (with_jacobian) e.jacobian.resize(n, kParams);
  double const A = p[kAmplitude], w = p[kWidth], V = p[kVisibility], L = p[kPeriod];
  double const phi = p[kPhase], x0 = p[kCenter];
  for (Eigen::Index i = 0; i < n; ++i) {
    auto const k = static_cast<std::size_t>(i);
    double const u = s.x[k] - x0;
    double const E = std::exp(-(u * u) / (w * w));
    double const arg = 2.0 * pi * u / L + phi;
    double const C = std::cos(arg), S = std::sin(arg);
    double const f = A * E * (1.0 + V * C);
    double const sw = std::sqrt(s.weight[k]);
    e.residual(i) = sw * (s.y[k] - f);
    if (with_jacobian) {
      e.jacobian(i, kAmplitude) = sw * E * (1.0 + V * C);
      e.jacobian(i, kWidth) = sw * f * 2.0 * u * u / (w * w * w);
      e.jacobian(i, kVisibility) = sw * A * E * C;
      e.jacobian(i, kPeriod) = sw * A * E * V * S * 2.0 * pi * u / (L * L);
      e.jacobian(i, kPhase) = -sw * A * E * V * S;
      e.jacobian(i, kCenter) = sw * A * E * ((1.0 + V * C) * 2.0 * u / (w * w) + V * S * 2.0 * pi / L);
    }
  }
  e.cost = e.residual.squaredNorm();
  return e;
}

struct Bounds {
  Params lower;
  Params upper;
};

Params project(Params p, Bounds const& b) {
  for (int j = 0; j < kParams; ++j) p[j] = std::clamp(p[j], b.lower[j], b.upper[j]);
  return p;
}

struct LmResult {
  Params params;
  double cost = 0.0;
  bool converged = false;
  int iterations = 0;
};

LmResult levenberg_marquardt(Samples const& s, Params start, std::array<bool, kParams> const& free,
                             Bounds const& bounds, FitOptions const& options) {
  Params p = project(start, bounds);
  Evaluation current = evaluate(s, p, true);
  double lambda = 1e-3;
  LmResult result{p, current.cost, false, 0};

  auto scale = [&](Params const& q, int j) {
    switch (j) {
      case kAmplitude: return std::max(std::abs(q[j]), 1e-300);
      case kWidth:
      case kPeriod: return q[j];
      case kCenter: return q[kPeriod];
      default: return 1.0;
    }
  };

  while (result.iterations < options.max_iterations) {
    ++result.iterations;
    Eigen::VectorXd const gradient = current.jacobian.transpose() * current.residual;

    // Parameters pinned at a bound with the descent direction pointing out
    // of the box are held for this step.
    std::vector<int> active;
    for (int j = 0; j < kParams; ++j) {
      if (!free[static_cast<std::size_t>(j)]) continue;
      bool const at_lower = p[j] <= bounds.lower[j] && gradient(j) < 0.0;
      bool const at_upper = p[j] >= bounds.upper[j] && gradient(j) > 0.0;
      if (!at_lower && !at_upper) active.push_back(j);
    }
    if (active.empty()) {
      result.converged = true;
      break;
    }

    auto const m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd J(current.jacobian.rows(), m);
    Eigen::VectorXd g(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      J.col(a) = current.jacobian.col(active[static_cast<std::size_t>(a)]);
      g(a) = gradient(active[static_cast<std::size_t>(a)]);
    }
    Eigen::MatrixXd H = J.transpose() * J;
    double const diag_floor = 1e-12 * std::max(H.diagonal().maxCoeff(), 1e-300);
    for (Eigen::Index a = 0; a < m; ++a) H(a, a) += lambda * std::max(H(a, a), diag_floor);
    Eigen::VectorXd const delta = H.ldlt().solve(g);

    Params trial = p;
    for (Eigen::Index a = 0; a < m; ++a) trial[active[static_cast<std::size_t>(a)]] += delta(a);
    trial = project(trial, bounds);

    double step = 0.0;
    for (int j = 0; j < kParams; ++j) step = std::max(step, std::abs(trial[j] - p[j]) / scale(p, j));
    if (!std::isfinite(step)) {
      lambda *= 10.0;
      continue;
    }

    Evaluation const next = evaluate(s, trial, true);
    if (next.cost <= current.cost) {
      p = trial;
      current = next;
      lambda = std::max(lambda / 10.0, 1e-12);
      if (step < options.tolerance) {
        result.converged = true;
        break;
      }
    } else {
      if (step < options.tolerance) {
        result.converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e16) break;
    }
  }
  result.params = p;
  result.cost = current.cost;
  return result;
}

double wrap_phase(double phi) {
  phi = std::remainder(phi, 2.0 * pi);
  return phi <= -pi ? phi + 2.0 * pi : phi;
}

FringeFit fit_samples(Samples const& s, bool center_free, FitOptions const& options) {
  double const center = center_free ? weighted_mean(s) : 0.0;

  Params start{};
  if (options.initial_guess) {
    start = to_params(*options.initial_guess);
    if (!center_free) start[kCenter] = 0.0;
  } else {
    auto const env = moment_envelope(s, center);
    auto const peak = spectral_peak(s, center);
    start = {env.amplitude, env.width, peak.visibility, peak.period, peak.phase, center};
  }
  if (!(start[kPeriod] > 0.0)) throw FitError(FitError::Kind::insufficient_data, "initial period must be positive");
  if (s.span < 2.0 * start[kPeriod])
    throw FitError(FitError::Kind::insufficient_data, "histogram spans fewer than two fringe periods");

  double const tiny = 1e-12 * s.span;
  double const inf = std::numeric_limits<double>::infinity();
  Bounds const bounds{{0.0, tiny, 0.0, tiny, -inf, -inf}, {inf, inf, 1.0, inf, inf, inf}};
  std::array<bool, kParams> const free{true, true, true, true, true, center_free};

  LmResult best = levenberg_marquardt(s, start, free, bounds, options);
  if (options.multi_start) {
    for (int k = 1; k < 8; ++k) {
      Params alt = start;
      alt[kPhase] = start[kPhase] + 2.0 * pi * k / 8.0;
      LmResult r = levenberg_marquardt(s, alt, free, bounds, options);
      if (r.cost < best.cost) best = r;
    }
  }

  FringeFit fit;
  fit.parameters = to_model(best.params);
  fit.parameters.phase = wrap_phase(fit.parameters.phase);
  fit.converged = best.converged;
  fit.iterations = best.iterations;
  fit.center_free = center_free;

  int const n_free = center_free ? kParams : kParams - 1;
  auto const dof = static_cast<double>(s.x.size()) - n_free;
  fit.residual = dof > 0 ? best.cost / dof : std::numeric_limits<double>::quiet_NaN();

  Evaluation const final_eval = evaluate(s, best.params, true);
  Eigen::MatrixXd const J = final_eval.jacobian.leftCols(n_free);
  Eigen::MatrixXd const H = J.transpose() * J;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
  Params errors{};
  errors.fill(std::numeric_limits<double>::quiet_NaN());
  if (lu.isInvertible() && dof > 0) {
    Eigen::MatrixXd const cov = lu.inverse() * fit.residual;
    for (int j = 0; j < n_free; ++j) errors[j] = std::sqrt(std::max(cov(j, j), 0.0));
    fit.amplitude_visibility_covariance = cov(kAmplitude, kVisibility);
  }
  if (!center_free) errors[kCenter] = 0.0;
  fit.standard_errors = to_model(errors);
  return fit;
}

}  // namespace

double FringeModel::operator()(double x) const noexcept {
  double const u = x - center;
  return amplitude * std::exp(-(u * u) / (width * width)) *
         (1.0 + visibility * std::cos(2.0 * pi * u / period + phase));
}

double estimate_period(Histogram const& hist) {
  auto const s = samples_from(hist);
  bool const center_free = std::abs(weighted_mean(s)) > s.bin_width;
  return spectral_peak(s, center_free ? weighted_mean(s) : 0.0).period;
}

FringeFit fit_fringe(Histogram const& hist, FitOptions const& options) {
  if (hist.bin_count() == 0 || hist.nonempty_bins() < 8)
    throw FitError(FitError::Kind::insufficient_data, "fringe fit needs at least 8 non-empty bins");
  auto const s = samples_from(hist);
  bool const center_free = options.free_center.value_or(std::abs(weighted_mean(s)) > s.bin_width);
  return fit_samples(s, center_free, options);
}

FringeFit fit_fringe_samples(std::span<double const> x, std::span<double const> y,
                             FitOptions const& options) {
  if (x.size() != y.size()) throw std::invalid_argument("sample vectors differ in length");
  if (std::count_if(y.begin(), y.end(), [](double v) { return v > 0.0; }) < 8)
    throw FitError(FitError::Kind::insufficient_data, "fringe fit needs at least 8 non-empty bins");
  Samples s;
  s.x.assign(x.begin(), x.end());
  s.y.assign(y.begin(), y.end());
  for (double v : s.y) s.weight.push_back(1.0 / std::max(v, 1.0));
  s.bin_width = (s.x.back() - s.x.front()) / static_cast<double>(s.x.size() - 1);
  s.span = s.bin_width * static_cast<double>(s.x.size());
  bool const center_free = options.free_center.value_or(std::abs(weighted_mean(s)) > s.bin_width);
  return fit_samples(s, center_free, options);
}

RatioEstimate enhancement_ratio(FringeFit const& reference, FringeFit const& test) {
  if (!reference.converged || !test.converged)
    throw std::invalid_argument("enhancement ratio needs converged fits");
  double const a = reference.parameters.period, b = test.parameters.period;
  double const ra = reference.standard_errors.period / a, rb = test.standard_errors.period / b;
  double const value = a / b;
  return {value, value * std::sqrt(ra * ra + rb * rb)};
}

RatioEstimate amplitude_ratio(Histogram const& hist_a, Histogram const& hist_b, FringeFit const& fit_a,
                              FringeFit const& fit_b) {
  if (!fit_a.converged || !fit_b.converged)
    throw std::invalid_argument("amplitude ratio needs converged fits");
  if (hist_a.total_generated() == 0 || hist_b.total_generated() == 0)
    throw std::invalid_argument("amplitude ratio needs total_generated on both runs");

  auto fringe = [](FringeFit const& f) { return f.parameters.amplitude * f.parameters.visibility; };
  auto relative_variance = [&](FringeFit const& f) {
    double const A = f.parameters.amplitude, V = f.parameters.visibility;
    double const sA = f.standard_errors.amplitude, sV = f.standard_errors.visibility;
    double const var = V * V * sA * sA + A * A * sV * sV + 2.0 * A * V * f.amplitude_visibility_covariance;
    return std::max(var, 0.0) / (fringe(f) * fringe(f));
  };

  if (!(fringe(fit_b) > 0.0)) throw std::domain_error("zero fringe amplitude in the denominator");
  double const per_event_a = fringe(fit_a) / static_cast<double>(hist_a.total_generated());
  double const per_event_b = fringe(fit_b) / static_cast<double>(hist_b.total_generated());
  double const value = per_event_a / per_event_b;
  double const rel = fringe(fit_a) > 0.0 ? relative_variance(fit_a) : 0.0;
  return {value, std::abs(value) * std::sqrt(rel + relative_variance(fit_b))};
}

}  // namespace ocmsim
