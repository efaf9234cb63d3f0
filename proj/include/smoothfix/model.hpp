#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smoothfix/complex.hpp"
#include "smoothfix/rng.hpp"

namespace smoothfix {

// One realization (T_1, ..., T_N) of the weight sequence. Zero weights are
// stripped on construction; N >= 1 is enforced.
class WeightDraw {
 public:
  explicit WeightDraw(std::vector<Complex> weights);

  std::span<const Complex> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  Complex operator[](std::size_t j) const noexcept { return weights_[j]; }
  bool operator==(const WeightDraw&) const = default;

 private:
  std::vector<Complex> weights_;
};

// Binary branching random walk with +-1 displacements:
// T_j = exp(-lambda S(j)) / (2 cosh lambda).
struct BigginsBinary {
  Complex lambda;
};

// Cyclic Polya urn with b colours: T_1 = U^zeta, T_2 = zeta (1-U)^zeta,
// zeta = exp(2 pi i / b).
struct CyclicPolya {
  int b;
};

struct TabularAtom {
  double probability;
  WeightDraw weights;
};

// Finite discrete law over weight sequences.
struct Tabular {
  std::vector<TabularAtom> atoms;
};

// Law of (T_j)_{j>=1}. Immutable after construction; draws take an explicit
// stream so concurrent callers never share state.
class WeightModel {
 public:
  using Params = std::variant<BigginsBinary, CyclicPolya, Tabular>;

  static WeightModel biggins(Complex lambda);
  static WeightModel polya(int b);
  static WeightModel tabular(std::vector<TabularAtom> atoms);

  const Params& params() const noexcept { return params_; }
  std::string_view kind() const noexcept;

  // Writes one realization into `out` (cleared first). Hot-path variant of
  // draw_weights that reuses the caller's buffer.
  void draw_into(RandomStream& rng, std::vector<Complex>& out) const;

  // Largest N any draw can produce.
  std::size_t max_children() const noexcept;

  // Discrete models expose their full law; continuous ones return nullopt.
  std::optional<std::vector<TabularAtom>> enumerate() const;

  // zeta = exp(2 pi i / b) for Polya models.
  Complex polya_zeta() const noexcept { return zeta_; }

 private:
  explicit WeightModel(Params p) : params_(std::move(p)) {}

  Params params_;
  Complex biggins_plus_{};   // weight for S = +1
  Complex biggins_minus_{};  // weight for S = -1
  Complex zeta_{};
  std::vector<double> cumulative_;
};

WeightDraw draw_weights(const WeightModel& model, RandomStream& rng);

// Deterministic building blocks of the built-in draws.
WeightDraw biggins_weights(Complex lambda, int s1, int s2);
WeightDraw polya_weights(int b, double u);

// m(s) = E[sum_j |T_j|^s] where a closed form exists; +inf when divergent.
std::optional<double> m_closed_form(const WeightModel& model, double s);

// m'(s) = E[sum_j |T_j|^s log|T_j|] where a closed form exists.
std::optional<double> m_derivative_closed_form(const WeightModel& model, double s);

}  // namespace smoothfix
