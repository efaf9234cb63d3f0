#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "smoothfix/complex.hpp"
#include "smoothfix/model.hpp"

namespace smoothfix {

// Frequencies xi are complex numbers xi_1 + i xi_2 and the pairing is the
// real inner product <xi, z> = xi_1 Re z + xi_2 Im z, so
//   phi(xi) = E exp(-i <xi, Z>),
//   d_xi phi(xi)    = E[-(i/2) conj(Z) exp(-i <xi, Z>)],
//   d_xibar phi(xi) = E[-(i/2) Z exp(-i <xi, Z>)],
// with d_xi = (d_1 - i d_2) / 2 and d_xibar = (d_1 + i d_2) / 2.

struct EcfValue {
  Complex xi;
  Complex value;
  double stderr = 0.0;
};

enum class EcfStatistic {
  value,        // phi
  d_xi,         // first Wirtinger derivative in xi
  d_xibar,      // first Wirtinger derivative in conj(xi)
  d2_xibar,     // second derivative in conj(xi): E[(-(i/2) Z)^2 e^{-i<xi,Z>}]
};

EcfValue ecf(std::span<const Complex> samples, Complex xi);
EcfValue ecf_statistic(std::span<const Complex> samples, Complex xi, EcfStatistic stat);

enum class Wirtinger { d_xi, d_xibar };
EcfValue wirtinger_derivative(std::span<const Complex> samples, Complex xi, Wirtinger which);

// One statistic at many frequencies; parallel over frequencies.
std::vector<EcfValue> ecf_grid(std::span<const Complex> samples, std::span<const Complex> xis,
                               EcfStatistic stat = EcfStatistic::value);

// Polar frequency grid R e^{i theta}, theta = 2 pi k / n_angles, radius-major.
std::vector<Complex> polar_grid(std::span<const double> radii, int n_angles);

struct RadialScan {
  std::vector<double> radii;
  int n_angles = 0;
  std::vector<double> max_abs;          // per radius
  std::vector<EcfValue> values;         // radius-major, n_angles per radius
};

RadialScan radial_scan(std::span<const Complex> samples, std::span<const double> radii, int n_angles,
                       EcfStatistic stat = EcfStatistic::value);

struct DecayFit {
  RadialScan scan;
  int order = 1;
  double slope = 0.0;
  double intercept = 0.0;
  double noise_floor = 0.0;
  std::vector<double> fitted_radii;
};

// g*(R) (order 1, d_xibar) or h*(R) (order 2, d2_xibar) and the least-squares
// slope of log max|.| against log R over radii whose value exceeds the noise
// floor 3 * rms(summand) / sqrt(n). Throws ComputeError("insufficient
// signal") when fewer than 3 radii qualify.
DecayFit derivative_decay_scan(std::span<const Complex> samples, std::span<const double> radii,
                               int n_angles, int order);

// |phi-hat(xi) - (1/M) sum_m prod_j phi-hat(conj(T_j^(m)) xi)| with M fresh
// weight draws; every phi-hat evaluation is an exact sample mean.
double fixed_point_residual(std::span<const Complex> samples, const WeightModel& model, Complex xi,
                            std::size_t M, std::uint64_t seed);

// phi-hat tabulated on a Cartesian frequency grid and interpolated with
// tensor-product cubic Lagrange stencils. The table is built with the
// separable recurrences exp(-i a_p x) = exp(-i a_0 x) exp(-i h x)^p and a
// complex matrix product, so its cost is O(P^2 n) multiply-adds rather than
// O(P^2 n) sine/cosine pairs.
class EcfTable {
 public:
  EcfTable(std::span<const Complex> samples, double half_width, double spacing);

  Complex operator()(Complex xi) const;
  // Exact value at grid node (p, q).
  Complex node(std::size_t p, std::size_t q) const { return table_[p * size_ + q]; }
  double node_coordinate(std::size_t p) const { return -half_width_ + spacing_ * static_cast<double>(p); }
  std::size_t size() const noexcept { return size_; }
  double half_width() const noexcept { return half_width_; }
  double spacing() const noexcept { return spacing_; }
  // Upper bound on |interpolant - phi-hat| from the cubic Lagrange remainder
  // applied to each sample's exponential.
  double error_bound() const noexcept { return error_bound_; }

 private:
  double half_width_;
  double spacing_;
  std::size_t size_;
  std::vector<Complex> table_;
  double error_bound_ = 0.0;
};

struct ResidualOptions {
  std::size_t M = 10000;
  std::uint64_t seed = 0;
  double spacing = 0.05;
};

struct ResidualGrid {
  std::vector<Complex> xis;
  std::vector<double> residual;
  double interpolation_error_bound = 0.0;
};

// Residuals at many frequencies sharing one set of M weight draws, with the
// products evaluated through an EcfTable covering every |conj(T) xi|.
ResidualGrid fixed_point_residual_grid(std::span<const Complex> samples, const WeightModel& model,
                                       std::span<const Complex> xis, const ResidualOptions& options);

}  // namespace smoothfix
