#pragma once

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfforge/error.hpp"
#include "wfforge/rng.hpp"

namespace wfforge {

// Candidate distribution families. `empirical` carries the raw sorted sample
// and is used for degenerate samples (fewer than 5 values, or all equal).
enum class Family {
  Uniform,
  Normal,
  Lognormal,
  Exponential,
  Gamma,
  Weibull,
  Beta,
  Pareto,
  Triangular,
  Empirical,
};

inline constexpr Family kParametricFamilies[] = {
    Family::Uniform, Family::Normal,  Family::Lognormal,
    Family::Exponential, Family::Gamma, Family::Weibull,
    Family::Beta,    Family::Pareto,  Family::Triangular,
};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Uniform: return "uniform";
    case Family::Normal: return "normal";
    case Family::Lognormal: return "lognormal";
    case Family::Exponential: return "exponential";
    case Family::Gamma: return "gamma";
    case Family::Weibull: return "weibull";
    case Family::Beta: return "beta";
    case Family::Pareto: return "pareto";
    case Family::Triangular: return "triangular";
    case Family::Empirical: return "empirical";
  }
  return "unknown";
}

inline std::optional<Family> family_from_name(std::string_view name) {
  for (Family f : kParametricFamilies) {
    if (name == family_name(f)) return f;
  }
  if (name == "empirical") return Family::Empirical;
  return std::nullopt;
}

enum class Metric { RuntimeSeconds, InputBytes, OutputBytes };

struct Sample {
  std::string task_type;
  Metric metric = Metric::RuntimeSeconds;
  std::vector<double> values;  // non-negative, finite, length >= 1
};

/// A fitted distribution. Parameter layouts:
///   uniform      [a, b]
///   normal       [mean, stddev]
///   lognormal    [log_mean, log_stddev]
///   exponential  [rate]
///   gamma        [shape, scale]
///   weibull      [shape, scale]
///   beta         [alpha, beta, loc, scale]     (support [loc, loc+scale])
///   pareto       [shape, scale]                (support [scale, inf))
///   triangular   [lower, mode, upper]
///   empirical    sorted sample values
/// min/max are the sample extremes; draws are truncated to [min, max].
struct FitResult {
  Family family = Family::Empirical;
  std::vector<double> params;
  double mse = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline bool params_valid(Family f, std::span<const double> p) {
  for (double v : p) {
    if (!std::isfinite(v)) return false;
  }
  switch (f) {
    case Family::Uniform: return p.size() == 2 && p[1] > p[0];
    case Family::Normal: return p.size() == 2 && p[1] > 0;
    case Family::Lognormal: return p.size() == 2 && p[1] > 0;
    case Family::Exponential: return p.size() == 1 && p[0] > 0;
    case Family::Gamma: return p.size() == 2 && p[0] > 0 && p[1] > 0;
    case Family::Weibull: return p.size() == 2 && p[0] > 0 && p[1] > 0;
    case Family::Beta: return p.size() == 4 && p[0] > 0 && p[1] > 0 && p[3] > 0;
    case Family::Pareto: return p.size() == 2 && p[0] > 0 && p[1] > 0;
    case Family::Triangular:
      return p.size() == 3 && p[0] <= p[1] && p[1] <= p[2] && p[2] > p[0];
    case Family::Empirical: return !p.empty();
  }
  return false;
}

/// CDF of a parametric family, clamped to [0, 1] outside the support.
inline double cdf(Family f, std::span<const double> p, double x) {
  switch (f) {
    case Family::Uniform: {
      if (x <= p[0]) return 0.0;
      if (x >= p[1]) return 1.0;
      return (x - p[0]) / (p[1] - p[0]);
    }
    case Family::Normal:
      return 0.5 * std::erfc(-(x - p[0]) / (p[1] * std::numbers::sqrt2));
    case Family::Lognormal: {
      if (x <= 0.0) return 0.0;
      return 0.5 * std::erfc(-(std::log(x) - p[0]) / (p[1] * std::numbers::sqrt2));
    }
    case Family::Exponential: {
      if (x <= 0.0) return 0.0;
      return -std::expm1(-p[0] * x);
    }
    case Family::Gamma: {
      if (x <= 0.0) return 0.0;
      return boost::math::gamma_p(p[0], x / p[1]);
    }
    case Family::Weibull: {
      if (x <= 0.0) return 0.0;
      return -std::expm1(-std::pow(x / p[1], p[0]));
    }
    case Family::Beta: {
      const double y = (x - p[2]) / p[3];
      if (y <= 0.0) return 0.0;
      if (y >= 1.0) return 1.0;
      return boost::math::ibeta(p[0], p[1], y);
    }
    case Family::Pareto: {
      if (x <= p[1]) return 0.0;
      return 1.0 - std::pow(p[1] / x, p[0]);
    }
    case Family::Triangular: {
      const double a = p[0], c = p[1], b = p[2];
      if (x <= a) return 0.0;
      if (x >= b) return 1.0;
      if (x < c) return (x - a) * (x - a) / ((b - a) * (c - a));
      if (b == c) return 1.0;
      return 1.0 - (b - x) * (b - x) / ((b - a) * (b - c));
    }
    case Family::Empirical: {
      // step CDF over the stored sorted values
      const auto it = std::upper_bound(p.begin(), p.end(), x);
      return static_cast<double>(it - p.begin()) / static_cast<double>(p.size());
    }
  }
  return 0.0;
}

/// Inverse CDF for u in (0, 1). u is clamped away from {0, 1} for families
/// with unbounded support.
inline double quantile(Family f, std::span<const double> p, double u) {
  constexpr double eps = 1e-15;
  u = std::clamp(u, eps, 1.0 - eps);
  switch (f) {
    case Family::Uniform:
      return p[0] + u * (p[1] - p[0]);
    case Family::Normal:
      return p[0] + p[1] * std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
    case Family::Lognormal:
      return std::exp(p[0] + p[1] * std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0));
    case Family::Exponential:
      return -std::log1p(-u) / p[0];
    case Family::Gamma:
      return p[1] * boost::math::gamma_p_inv(p[0], u);
    case Family::Weibull:
      return p[1] * std::pow(-std::log1p(-u), 1.0 / p[0]);
    case Family::Beta:
      return p[2] + p[3] * boost::math::ibeta_inv(p[0], p[1], u);
    case Family::Pareto:
      return p[1] * std::pow(1.0 - u, -1.0 / p[0]);
    case Family::Triangular: {
      const double a = p[0], c = p[1], b = p[2];
      const double pivot = (b == a) ? 1.0 : (c - a) / (b - a);
      if (u < pivot) return a + std::sqrt(u * (b - a) * (c - a));
      return b - std::sqrt((1.0 - u) * (b - a) * (b - c));
    }
    case Family::Empirical: {
      const std::size_t i =
          std::min(p.size() - 1, static_cast<std::size_t>(u * static_cast<double>(p.size())));
      return p[i];
    }
  }
  return 0.0;
}

inline double quantile(const FitResult& fit, double u) {
  return quantile(fit.family, fit.params, u);
}

/// Step function of the sample: at the i-th sorted value (1-based, ties
/// merged) the cumulative probability is i/n. Throws EmptySample.
struct EmpiricalCdf {
  std::vector<double> points;
  std::vector<double> probs;
};

inline EmpiricalCdf empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::EmptySample, "empirical CDF of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  EmpiricalCdf e;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;  // merge ties
    e.points.push_back(values[i]);
    e.probs.push_back(static_cast<double>(i + 1) / n);
  }
  return e;
}

/// Mean squared vertical distance between a fitted CDF and the empirical CDF
/// at the sample points. Numerical failures count as +inf.
inline double cdf_mse(const EmpiricalCdf& ecdf, Family f, std::span<const double> params) {
  double sum = 0.0;
  try {
    for (std::size_t i = 0; i < ecdf.points.size(); ++i) {
      const double d = cdf(f, params, ecdf.points[i]) - ecdf.probs[i];
      sum += d * d;
    }
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(sum)) return std::numeric_limits<double>::infinity();
  return sum / static_cast<double>(ecdf.points.size());
}

namespace detail {

struct SampleStats {
  std::size_t n = 0;
  double mean = 0, var = 0, sd = 0, min = 0, max = 0;
  double log_mean = 0, log_sd = 0;
  bool all_positive = false;
};

inline SampleStats sample_stats(std::span<const double> sorted) {
  SampleStats s;
  s.n = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.all_positive = s.min > 0.0;
  double sum = 0;
  for (double v : sorted) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0;
  for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
  s.var = ss / static_cast<double>(s.n);
  s.sd = std::sqrt(s.var);
  if (s.all_positive) {
    double lsum = 0;
    for (double v : sorted) lsum += std::log(v);
    s.log_mean = lsum / static_cast<double>(s.n);
    double lss = 0;
    for (double v : sorted) {
      const double d = std::log(v) - s.log_mean;
      lss += d * d;
    }
    s.log_sd = std::sqrt(lss / static_cast<double>(s.n));
  }
  return s;
}

/// Method-of-moments initial parameters; nullopt when the family cannot
/// describe the sample at all.
inline std::optional<std::vector<double>> init_params(Family f, const SampleStats& s) {
  const double tiny = 1e-12;
  switch (f) {
    case Family::Uniform:
      return std::vector<double>{s.min, std::max(s.max, s.min + tiny)};
    case Family::Normal:
      return std::vector<double>{s.mean, std::max(s.sd, tiny)};
    case Family::Lognormal:
      if (!s.all_positive) return std::nullopt;
      return std::vector<double>{s.log_mean, std::max(s.log_sd, tiny)};
    case Family::Exponential:
      if (!(s.mean > 0)) return std::nullopt;
      return std::vector<double>{1.0 / s.mean};
    case Family::Gamma: {
      if (!(s.mean > 0) || !(s.var > 0)) return std::nullopt;
      return std::vector<double>{s.mean * s.mean / s.var, s.var / s.mean};
    }
    case Family::Weibull: {
      if (!(s.mean > 0) || !(s.sd > 0)) return std::nullopt;
      const double k = std::clamp(std::pow(s.sd / s.mean, -1.086), 0.05, 50.0);
      return std::vector<double>{k, s.mean / std::tgamma(1.0 + 1.0 / k)};
    }
    case Family::Beta: {
      const double range = s.max - s.min;
      if (!(range > 0)) return std::nullopt;
      const double ym = (s.mean - s.min) / range;
      const double yv = s.var / (range * range);
      double alpha = 2.0, beta = 2.0;
      if (yv > 0 && yv < ym * (1.0 - ym)) {
        const double common = ym * (1.0 - ym) / yv - 1.0;
        alpha = ym * common;
        beta = (1.0 - ym) * common;
      }
      alpha = std::clamp(alpha, 1.2, 1e3);
      beta = std::clamp(beta, 1.2, 1e3);
      return std::vector<double>{alpha, beta, s.min, range};
    }
    case Family::Pareto: {
      if (!s.all_positive) return std::nullopt;
      const double xm = s.min;
      double shape = 2.0;
      if (s.mean > xm) shape = std::max(s.mean / (s.mean - xm), 0.05);
      return std::vector<double>{shape, xm};
    }
    case Family::Triangular: {
      const double a = s.min;
      const double b = std::max(s.max, a + tiny);
      const double c = std::clamp(3.0 * s.mean - a - b, a, b);
      return std::vector<double>{a, c, b};
    }
    case Family::Empirical:
      return std::nullopt;
  }
  return std::nullopt;
}

/// Projects a parameter vector back into the family's feasible region.
/// For beta, loc and scale stay fixed at their data-derived values so the
/// four-parameter family cannot out-flex every two-parameter one.
inline void project_params(Family f, std::vector<double>& p, const SampleStats& s) {
  const double tiny = 1e-12;
  switch (f) {
    case Family::Uniform:
      if (p[1] <= p[0]) p[1] = p[0] + tiny;
      break;
    case Family::Normal:
    case Family::Lognormal:
      p[1] = std::max(p[1], tiny);
      break;
    case Family::Exponential:
      p[0] = std::max(p[0], tiny);
      break;
    case Family::Gamma:
    case Family::Weibull:
      p[0] = std::clamp(p[0], 1e-6, 1e6);
      p[1] = std::max(p[1], tiny);
      break;
    case Family::Beta: {
      // Shapes kept away from the edge-singular region, which is unstable
      // on an estimated support; the support itself must cover the sample
      // and may stretch at most 15% of the range past either extreme.
      p[0] = std::clamp(p[0], 1.2, 1e3);
      p[1] = std::clamp(p[1], 1.2, 1e3);
      p[2] = s.min;
      p[3] = s.max - s.min;
      break;
    }
    case Family::Pareto:
      p[0] = std::clamp(p[0], 1e-6, 1e6);
      p[1] = std::max(p[1], tiny);
      break;
    case Family::Triangular:
      if (p[2] <= p[0]) p[2] = p[0] + tiny;
      p[1] = std::clamp(p[1], p[0], p[2]);
      break;
    case Family::Empirical:
      break;
  }
}

/// Derivative-free coordinate descent on the CDF MSE: at most 200 sweeps,
/// stopping when a full sweep improves by less than 1e-9 relative.
inline double refine_params(const EmpiricalCdf& ecdf, Family f, std::vector<double>& p,
                            const SampleStats& s) {
  double best = cdf_mse(ecdf, f, p);
  std::vector<double> step(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    step[i] = std::max(std::abs(p[i]) * 0.25, 1e-6);
  }
  std::vector<double> trial = p;
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double before = best;
    for (std::size_t i = 0; i < p.size(); ++i) {
      bool moved = false;
      for (const double delta : {step[i], -step[i]}) {
        trial = p;
        trial[i] += delta;
        project_params(f, trial, s);
        const double mse = cdf_mse(ecdf, f, trial);
        if (mse < best) {
          p = trial;
          best = mse;
          step[i] *= 1.6;
          moved = true;
          break;
        }
      }
      if (!moved) step[i] *= 0.5;
    }
    if (before - best <= 1e-9 * std::max(before, 1e-30)) break;
  }
  return best;
}

}  // namespace detail

/// Fits one family to a sample: moments init, then coordinate-descent
/// refinement of the CDF MSE. nullopt when the family is infeasible for the
/// data (e.g. lognormal with non-positive values). Beta's shape/support
/// coupling makes its descent prone to stalling, so it restarts from a few
/// fixed extra inits and keeps the best.
inline std::optional<FitResult> fit_family(std::span<const double> values, Family f) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto stats = detail::sample_stats(sorted);
  const auto params = detail::init_params(f, stats);
  if (!params) return std::nullopt;
  std::vector<std::vector<double>> inits{*params};
  const auto ecdf = empirical_cdf(sorted);
  FitResult r;
  r.family = f;
  r.min = stats.min;
  r.max = stats.max;
  r.mse = std::numeric_limits<double>::infinity();
  for (auto& init : inits) {
    detail::project_params(f, init, stats);
    const double mse = detail::refine_params(ecdf, f, init, stats);
    if (mse < r.mse) {
      r.mse = mse;
      r.params = init;
    }
  }
  if (!std::isfinite(r.mse)) return std::nullopt;
  return r;
}

/// All feasible parametric fits for a sample, in family declaration order.
inline std::vector<FitResult> fit_all(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptySample, "cannot fit an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<FitResult> fits;
  for (Family f : kParametricFamilies) {
    if (auto r = fit_family(sorted, f)) fits.push_back(std::move(*r));
  }
  return fits;
}

inline FitResult make_empirical(std::vector<double> sorted_values) {
  FitResult r;
  r.family = Family::Empirical;
  r.min = sorted_values.front();
  r.max = sorted_values.back();
  r.params = std::move(sorted_values);
  r.mse = 0.0;
  return r;
}

/// Best fit by CDF MSE. Samples with fewer than 5 values, or all values
/// equal, stay empirical; otherwise the empirical step function is excluded
/// as a candidate (its self-fit MSE of zero would always win) and the
/// minimal-MSE parametric family is returned, first family winning ties.
inline FitResult fit_best(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptySample, "cannot fit an empty sample");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::BadValue, "sample contains a non-finite value");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() < 5 || sorted.front() == sorted.back()) {
    return make_empirical(std::move(sorted));
  }
  const auto fits = fit_all(sorted);
  const FitResult* best = &fits.front();
  for (const auto& fit : fits) {
    if (fit.mse < best->mse) best = &fit;
  }
  return *best;
}

inline FitResult fit_best(const std::vector<double>& values) {
  return fit_best(std::span<const double>(values));
}

inline FitResult fit_best(const Sample& sample) { return fit_best(sample.values); }

/// Draws from a fitted distribution by inverse-CDF transform, truncated to
/// [min, max] by resampling up to 50 times and then clamping. Empirical fits
/// draw uniformly from the stored values.
inline double sample_from(const FitResult& fit, Rng& rng) {
  if (fit.family == Family::Empirical) {
    return fit.params[rng.index(fit.params.size())];
  }
  double x = fit.min;
  for (int attempt = 0; attempt < 50; ++attempt) {
    x = quantile(fit.family, fit.params, rng.uniform01());
    if (x >= fit.min && x <= fit.max) return x;
  }
  return std::clamp(x, fit.min, fit.max);
}

/// Maps a distribution name found in a recipe onto a supported family.
/// Exact family names pass through; a few well-known SciPy names are adapted
/// with a note; anything else falls back to uniform over [min, max] (or a
/// one-point empirical when min == max).
struct MappedDistribution {
  FitResult fit;
  std::optional<std::string> note;
};

inline MappedDistribution map_external_distribution(std::string_view name,
                                                    std::span<const double> params, double min,
                                                    double max) {
  MappedDistribution out;
  out.fit.min = min;
  out.fit.max = max;
  auto done = [&](Family f, std::vector<double> p, std::optional<std::string> note = {}) {
    out.fit.family = f;
    out.fit.params = std::move(p);
    out.note = std::move(note);
    return out;
  };
  auto fallback = [&](std::string why) {
    if (min == max) {
      return done(Family::Empirical, {min}, std::move(why));
    }
    return done(Family::Uniform, {min, max}, std::move(why));
  };
  const std::string n(name);

  if (auto native = family_from_name(n)) {
    if (*native == Family::Empirical) {
      if (params.empty()) return fallback("empirical distribution without values");
      std::vector<double> sorted(params.begin(), params.end());
      std::sort(sorted.begin(), sorted.end());
      return done(Family::Empirical, std::move(sorted));
    }
    if (params_valid(*native, params)) {
      return done(*native, std::vector<double>(params.begin(), params.end()));
    }
  }

  // SciPy-style (shape..., loc, scale) layouts for names we can adapt.
  auto adapted = [&](Family f, std::vector<double> p, const std::string& how)
      -> std::optional<MappedDistribution> {
    if (!params_valid(f, p)) return std::nullopt;
    return done(f, std::move(p), "distribution '" + n + "' " + how);
  };
  std::optional<MappedDistribution> m;
  if (n == "norm" && params.size() == 2) {
    m = adapted(Family::Normal, {params[0], params[1]}, "mapped to normal");
  } else if (n == "lognorm" && params.size() == 3 && params[2] > 0) {
    m = adapted(Family::Lognormal, {std::log(params[2]), params[0]},
                "mapped to lognormal (loc dropped)");
  } else if (n == "expon" && params.size() == 2 && params[1] > 0) {
    m = adapted(Family::Exponential, {1.0 / params[1]}, "mapped to exponential (loc dropped)");
  } else if (n == "gamma" && params.size() == 3) {
    m = adapted(Family::Gamma, {params[0], params[2]}, "mapped to gamma (loc dropped)");
  } else if ((n == "weibull_min" || n == "dweibull") && params.size() == 3) {
    m = adapted(Family::Weibull, {params[0], params[2]}, "mapped to weibull (loc dropped)");
  } else if (n == "rayleigh" && params.size() == 2) {
    m = adapted(Family::Weibull, {2.0, params[1] * std::numbers::sqrt2},
                "mapped to weibull(2) (loc dropped)");
  } else if (n == "pareto" && params.size() == 3) {
    m = adapted(Family::Pareto, {params[0], params[2]}, "mapped to pareto (loc dropped)");
  } else if (n == "triang" && params.size() == 3) {
    m = adapted(Family::Triangular,
                {params[1], params[1] + params[0] * params[2], params[1] + params[2]},
                "mapped to triangular");
  } else if ((n == "trapz" || n == "trapezoid") && params.size() == 4) {
    const double loc = params[2], scale = params[3];
    m = adapted(Family::Triangular,
                {loc, loc + 0.5 * (params[0] + params[1]) * scale, loc + scale},
                "approximated by triangular");
  } else if (n == "skewnorm" && params.size() == 3) {
    m = adapted(Family::Normal, {params[1], params[2]}, "mapped to normal (shape dropped)");
  }
  if (m) return *m;
  return fallback("unsupported distribution '" + n + "' mapped to uniform over [min, max]");
}

}  // namespace wfforge
