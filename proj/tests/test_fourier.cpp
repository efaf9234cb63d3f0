#include <cmath>
#include <numbers>

#include "doctest.h"
#include "smoothfix/error.hpp"
#include "smoothfix/fourier.hpp"
#include "smoothfix/popdyn.hpp"
#include "smoothfix/rng.hpp"

using namespace smoothfix;

namespace {

const std::vector<Complex>& polya_pool() {
  static const auto pool = run(WeightModel::polya(8), 10000, 30, 7).pool.samples;
  return pool;
}

// Uniform xi in the disc of radius r.
std::vector<Complex> random_frequencies(int count, double r, std::uint64_t seed) {
  std::vector<Complex> out;
  for (int k = 0; k < count; ++k) {
    RandomStream rng(seed, StreamId::make(StreamDomain::generic, static_cast<std::uint32_t>(k)));
    const double rad = r * std::sqrt(rng.uniform_open());
    out.push_back(std::polar(rad, 2.0 * std::numbers::pi * rng.uniform_open()));
  }
  return out;
}

}  // namespace

TEST_CASE("ecf examples") {
  const auto ones = init_pool(100).samples;
  CHECK(ecf(polya_pool(), 0.0).value == Complex{1.0, 0.0});
  for (double t : {0.3, 1.0, 4.5, -2.0}) {
    CHECK(std::abs(ecf(ones, Complex{t, 0.0}).value - std::exp(Complex{0.0, -t})) < 1e-14);
    CHECK(ecf(ones, Complex{t, 0.0}).stderr < 1e-7);
  }
  const std::vector<Complex> two{{1.0, 0.0}, {0.0, 1.0}};
  for (auto [a, b] : {std::pair{0.5, 1.5}, std::pair{-2.0, 3.0}}) {
    const Complex expect = 0.5 * (std::exp(Complex{0.0, -a}) + std::exp(Complex{0.0, -b}));
    CHECK(std::abs(ecf(two, Complex{a, b}).value - expect) < 1e-15);
  }
  CHECK_THROWS_AS(ecf(std::vector<Complex>{}, 1.0), ValidationError);
}

TEST_CASE("ecf properties: |phi| <= 1 and conjugate symmetry") {
  for (Complex xi : random_frequencies(50, 20.0, 3)) {
    const auto v = ecf(polya_pool(), xi);
    CHECK(std::abs(v.value) <= 1.0 + 1e-12);
    CHECK(ecf(polya_pool(), -xi).value == std::conj(v.value));
  }
}

TEST_CASE("Wirtinger derivative examples") {
  const auto& pool = polya_pool();
  Complex mean{};
  for (Complex z : pool) mean += z;
  mean /= static_cast<double>(pool.size());
  CHECK(std::abs(wirtinger_derivative(pool, 0.0, Wirtinger::d_xibar).value - Complex{0.0, -0.5} * mean) < 1e-14);

  const auto ones = init_pool(10).samples;
  for (Complex xi : {Complex{0.7, -1.2}, Complex{3.0, 2.0}}) {
    const Complex expect = Complex{0.0, -0.5} * std::exp(Complex{0.0, -xi.real()});
    CHECK(std::abs(wirtinger_derivative(ones, xi, Wirtinger::d_xibar).value - expect) < 1e-15);
  }
  CHECK(std::abs(wirtinger_derivative(ones, 0.0, Wirtinger::d_xi).value - Complex{0.0, -0.5}) < 1e-15);
}

TEST_CASE("finite differences reproduce the Wirtinger identities") {
  const auto& pool = polya_pool();
  const double h = 1e-4;
  for (Complex xi : random_frequencies(20, 3.0, 9)) {
    const Complex d1 = (ecf(pool, xi + h).value - ecf(pool, xi - h).value) / (2 * h);
    const Complex d2 = (ecf(pool, xi + Complex{0, h}).value - ecf(pool, xi - Complex{0, h}).value) / (2 * h);
    const Complex dxi = wirtinger_derivative(pool, xi, Wirtinger::d_xi).value;
    const Complex dxibar = wirtinger_derivative(pool, xi, Wirtinger::d_xibar).value;
    CHECK(std::abs(d1 - (dxi + dxibar)) <= 1e-6 * std::abs(dxi + dxibar));
    CHECK(std::abs(d2 - Complex{0, 1} * (dxi - dxibar)) <= 1e-6 * std::abs(dxi - dxibar));
  }
}

TEST_CASE("second derivative in xibar matches a finite difference of d_xibar") {
  const auto& pool = polya_pool();
  const double h = 1e-4;
  for (Complex xi : random_frequencies(5, 3.0, 10)) {
    auto g = [&](Complex x) { return wirtinger_derivative(pool, x, Wirtinger::d_xibar).value; };
    const Complex d1 = (g(xi + h) - g(xi - h)) / (2 * h);
    const Complex d2 = (g(xi + Complex{0, h}) - g(xi - Complex{0, h})) / (2 * h);
    const Complex fd = 0.5 * (d1 + Complex{0, 1} * d2);
    const Complex got = ecf_statistic(pool, xi, EcfStatistic::d2_xibar).value;
    CHECK(std::abs(fd - got) <= 1e-6 * std::abs(got));
  }
}

TEST_CASE("polar grid layout and radial scan examples") {
  const std::vector<double> radii{1.0, 2.0};
  const auto xis = polar_grid(radii, 8);
  REQUIRE(xis.size() == 16);
  CHECK(std::abs(xis[9] - std::polar(2.0, std::numbers::pi / 4)) < 1e-15);

  const auto ones = init_pool(20).samples;
  const std::vector<double> r4{1.0, 5.0, 10.0, 50.0};
  const auto s = radial_scan(ones, r4, 16);
  for (double m : s.max_abs) CHECK(m == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> tiny{1e-8, 1e-6};
  for (double m : radial_scan(polya_pool(), tiny, 8).max_abs) CHECK(m == doctest::Approx(1.0).epsilon(1e-5));

  CHECK_THROWS_AS(radial_scan(ones, r4, 7), ValidationError);
  const std::vector<double> bad{1.0, 1.0};
  CHECK_THROWS_AS(radial_scan(ones, bad, 8), ValidationError);
  const std::vector<double> negative{-1.0, 1.0};
  CHECK_THROWS_AS(radial_scan(ones, negative, 8), ValidationError);
}

TEST_CASE("ECF of a Polya pool decays away from the origin") {
  const std::vector<double> radii{1.0, 5.0};
  const auto s = radial_scan(polya_pool(), radii, 32);
  CHECK(s.max_abs[0] > s.max_abs[1]);
  CHECK(s.max_abs[1] < 0.2);
}

TEST_CASE("decay scan negative control: degenerate pool") {
  const auto ones = init_pool(1000).samples;
  const std::vector<double> radii{5.0, 10.0, 20.0, 50.0};
  const auto fit = derivative_decay_scan(ones, radii, 16, 1);
  for (double m : fit.scan.max_abs) CHECK(m == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(fit.slope) < 1e-9);
  CHECK(fit.fitted_radii.size() == 4);
  const std::vector<double> narrow{5.0, 10.0, 20.0};
  CHECK_THROWS_AS(derivative_decay_scan(ones, narrow, 16, 1), ValidationError);
  CHECK_THROWS_AS(derivative_decay_scan(ones, radii, 16, 3), ValidationError);
}

TEST_CASE("decay scan reports insufficient signal when the ECF is pure noise") {
  // Continuous law with a very smooth density: phi decays like a Gaussian.
  std::vector<Complex> gauss;
  for (std::uint32_t i = 0; i < 2000; ++i) {
    RandomStream rng(4, StreamId::make(StreamDomain::generic, i));
    const double r = std::sqrt(-2.0 * std::log(rng.uniform_open()));
    gauss.push_back(std::polar(r, 2.0 * std::numbers::pi * rng.uniform_open()));
  }
  const std::vector<double> radii{20.0, 50.0, 100.0, 200.0};
  CHECK_THROWS_WITH_AS(derivative_decay_scan(gauss, radii, 16, 1), doctest::Contains("insufficient signal"),
                       ComputeError);
}

TEST_CASE("fixed-point residual examples") {
  const auto model = WeightModel::polya(8);
  CHECK(fixed_point_residual(polya_pool(), model, 0.0, 100, 1) == 0.0);
  const auto zeros = init_pool(50, 0.0).samples;
  for (Complex xi : random_frequencies(5, 5.0, 1)) CHECK(fixed_point_residual(zeros, model, xi, 100, 1) == 0.0);
  CHECK_THROWS_AS(fixed_point_residual(zeros, model, 1.0, 99, 1), ValidationError);
  CHECK(fixed_point_residual(polya_pool(), model, Complex{1.0, 1.0}, 1000, 2) < 0.05);
}

TEST_CASE("EcfTable nodes are exact and interpolation respects its bound") {
  const auto& pool = polya_pool();
  const EcfTable table(pool, 3.0, 0.05);
  CHECK(table.size() >= 121);
  for (std::size_t p : {std::size_t{0}, std::size_t{17}, std::size_t{60}, std::size_t{120}}) {
    for (std::size_t q : {std::size_t{3}, std::size_t{60}, std::size_t{119}}) {
      const Complex xi{table.node_coordinate(p), table.node_coordinate(q)};
      CHECK(std::abs(table.node(p, q) - ecf(pool, xi).value) < 1e-11);
    }
  }
  CHECK(table.error_bound() > 0.0);
  for (Complex xi : random_frequencies(100, 2.9, 5)) {
    CHECK(std::abs(table(xi) - ecf(pool, xi).value) <= table.error_bound() + 1e-11);
  }
  CHECK_THROWS_AS(table(Complex{3.5, 0.0}), ComputeError);
}

TEST_CASE("residual grid agrees with the exact single-point residual") {
  const auto model = WeightModel::polya(8);
  const auto& pool = polya_pool();
  const std::vector<double> radii{0.5, 2.0, 5.0};
  auto xis = polar_grid(radii, 8);
  xis.push_back(0.0);
  ResidualOptions opt;
  opt.M = 300;
  opt.seed = 17;
  const auto grid = fixed_point_residual_grid(pool, model, xis, opt);
  REQUIRE(grid.residual.size() == xis.size());
  CHECK(grid.residual.back() == 0.0);
  for (std::size_t k = 0; k + 1 < xis.size(); ++k) {
    const double exact = fixed_point_residual(pool, model, xis[k], opt.M, opt.seed);
    CHECK(std::abs(grid.residual[k] - exact) <= 3.0 * grid.interpolation_error_bound + 1e-10);
  }
}
