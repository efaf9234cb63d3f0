#include "smoothfix/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smoothfix/error.hpp"

namespace smoothfix {
namespace {

struct MomentSums {
  double re = 0, im = 0, re2 = 0, im2 = 0;
};

inline Complex summand(Complex z, double c, double s, EcfStatistic stat) noexcept {
  const Complex e{c, -s};
  switch (stat) {
    case EcfStatistic::value: return e;
    case EcfStatistic::d_xi: return Complex{0.0, -0.5} * std::conj(z) * e;
    case EcfStatistic::d_xibar: return Complex{0.0, -0.5} * z * e;
    case EcfStatistic::d2_xibar: return -0.25 * z * z * e;
  }
  return e;
}

EcfValue finish(Complex xi, const MomentSums& m, std::size_t count) {
  const auto n = static_cast<double>(count);
  EcfValue out;
  out.xi = xi;
  out.value = {m.re / n, m.im / n};
  if (count > 1) {
    const double var_re = std::max(0.0, (m.re2 - m.re * m.re / n) / (n - 1.0));
    const double var_im = std::max(0.0, (m.im2 - m.im * m.im / n) / (n - 1.0));
    out.stderr = std::sqrt((var_re + var_im) / n);
  }
  return out;
}

void check_radii(std::span<const double> radii, int n_angles) {
  if (radii.empty()) throw ValidationError("at least one radius required");
  if (n_angles < 8) throw ValidationError("n_angles must be >= 8");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ValidationError("radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw ValidationError("radii must be strictly increasing");
  }
}

}  // namespace

EcfValue ecf_statistic(std::span<const Complex> samples, Complex xi, EcfStatistic stat) {
  if (samples.empty()) throw ValidationError("ECF of an empty pool");
  MomentSums m;
  for (Complex z : samples) {
    const double t = inner(xi, z);
    const Complex v = summand(z, std::cos(t), std::sin(t), stat);
    m.re += v.real();
    m.im += v.imag();
    m.re2 += v.real() * v.real();
    m.im2 += v.imag() * v.imag();
  }
  return finish(xi, m, samples.size());
}

EcfValue ecf(std::span<const Complex> samples, Complex xi) {
  return ecf_statistic(samples, xi, EcfStatistic::value);
}

EcfValue wirtinger_derivative(std::span<const Complex> samples, Complex xi, Wirtinger which) {
  return ecf_statistic(samples, xi, which == Wirtinger::d_xi ? EcfStatistic::d_xi : EcfStatistic::d_xibar);
}

std::vector<EcfValue> ecf_grid(std::span<const Complex> samples, std::span<const Complex> xis,
                               EcfStatistic stat) {
  if (samples.empty()) throw ValidationError("ECF of an empty pool");
  std::vector<EcfValue> out(xis.size());
  const auto count = static_cast<std::int64_t>(xis.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < count; ++k) out[k] = ecf_statistic(samples, xis[k], stat);
  return out;
}

std::vector<Complex> polar_grid(std::span<const double> radii, int n_angles) {
  std::vector<Complex> xis;
  xis.reserve(radii.size() * static_cast<std::size_t>(n_angles));
  for (double r : radii) {
    for (int k = 0; k < n_angles; ++k) {
      xis.push_back(std::polar(r, 2.0 * std::numbers::pi * k / n_angles));
    }
  }
  return xis;
}

RadialScan radial_scan(std::span<const Complex> samples, std::span<const double> radii, int n_angles,
                       EcfStatistic stat) {
  check_radii(radii, n_angles);
  RadialScan scan;
  scan.radii.assign(radii.begin(), radii.end());
  scan.n_angles = n_angles;
  const auto xis = polar_grid(radii, n_angles);
  scan.values = ecf_grid(samples, xis, stat);
  for (std::size_t r = 0; r < radii.size(); ++r) {
    double best = 0.0;
    for (int k = 0; k < n_angles; ++k) best = std::max(best, std::abs(scan.values[r * n_angles + k].value));
    scan.max_abs.push_back(best);
  }
  return scan;
}

DecayFit derivative_decay_scan(std::span<const Complex> samples, std::span<const double> radii,
                               int n_angles, int order) {
  if (order != 1 && order != 2) throw ValidationError("derivative order must be 1 or 2");
  check_radii(radii, n_angles);
  if (radii.back() < 10.0 * radii.front()) throw ValidationError("radii must span at least one decade");

  DecayFit fit;
  fit.order = order;
  fit.scan = radial_scan(samples, radii, n_angles,
                         order == 1 ? EcfStatistic::d_xibar : EcfStatistic::d2_xibar);

  double mean_pow = 0.0;
  for (Complex z : samples) mean_pow += std::pow(std::norm(z), order);
  mean_pow /= static_cast<double>(samples.size());
  const double rms_summand = std::sqrt(mean_pow) / (order == 1 ? 2.0 : 4.0);
  fit.noise_floor = 3.0 * rms_summand / std::sqrt(static_cast<double>(samples.size()));

  std::vector<double> lx, ly;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    if (fit.scan.max_abs[r] > fit.noise_floor) {
      fit.fitted_radii.push_back(radii[r]);
      lx.push_back(std::log(radii[r]));
      ly.push_back(std::log(fit.scan.max_abs[r]));
    }
  }
  if (lx.size() < 3) {
    throw ComputeError("insufficient signal: " + std::to_string(lx.size()) +
                       " radii above the noise floor " + std::to_string(fit.noise_floor));
  }
  const auto k = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double fixed_point_residual(std::span<const Complex> samples, const WeightModel& model, Complex xi,
                            std::size_t M, std::uint64_t seed) {
  if (M < 100) throw ValidationError("fixed-point residual needs M >= 100 weight draws");
  const Complex lhs = ecf(samples, xi).value;
  std::vector<Complex> w;
  Complex rhs{};
  for (std::size_t m = 0; m < M; ++m) {
    RandomStream rng(seed, StreamId::make(StreamDomain::residual, static_cast<std::uint32_t>(m)));
    model.draw_into(rng, w);
    Complex prod{1.0, 0.0};
    for (Complex t : w) prod *= ecf(samples, std::conj(t) * xi).value;
    rhs += prod;
  }
  rhs /= static_cast<double>(M);
  return std::abs(lhs - rhs);
}

ResidualGrid fixed_point_residual_grid(std::span<const Complex> samples, const WeightModel& model,
                                       std::span<const Complex> xis, const ResidualOptions& options) {
  if (options.M < 100) throw ValidationError("fixed-point residual needs M >= 100 weight draws");
  if (samples.empty()) throw ValidationError("ECF of an empty pool");

  std::vector<std::vector<Complex>> draws(options.M);
  double max_t = 0.0;
  for (std::size_t m = 0; m < options.M; ++m) {
    RandomStream rng(options.seed, StreamId::make(StreamDomain::residual, static_cast<std::uint32_t>(m)));
    model.draw_into(rng, draws[m]);
    for (Complex t : draws[m]) max_t = std::max(max_t, std::abs(t));
  }
  double max_xi = 0.0;
  for (Complex xi : xis) max_xi = std::max(max_xi, std::abs(xi));

  ResidualGrid out;
  out.xis.assign(xis.begin(), xis.end());
  out.residual.assign(xis.size(), 0.0);
  if (max_xi == 0.0) return out;

  const double half_width = max_t * max_xi * (1.0 + 1e-9) + 2.0 * options.spacing;
  const EcfTable table(samples, half_width, options.spacing);
  out.interpolation_error_bound = table.error_bound();

  const auto lhs = ecf_grid(samples, xis);
  const auto count = static_cast<std::int64_t>(xis.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < count; ++k) {
    if (xis[k] == Complex{}) continue;  // both sides are exactly 1
    Complex rhs{};
    for (const auto& w : draws) {
      Complex prod{1.0, 0.0};
      for (Complex t : w) prod *= table(std::conj(t) * xis[k]);
      rhs += prod;
    }
    rhs /= static_cast<double>(options.M);
    out.residual[k] = std::abs(lhs[k].value - rhs);
  }
  return out;
}

}  // namespace smoothfix
