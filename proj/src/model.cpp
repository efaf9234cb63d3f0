#include "smoothfix/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smoothfix/error.hpp"

namespace smoothfix {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<Complex> strip_zeros(std::vector<Complex> w) {
  std::erase_if(w, [](Complex z) { return z == Complex{0.0, 0.0}; });
  return w;
}

double polya_cos(int b) { return std::cos(2.0 * std::numbers::pi / b); }

}  // namespace

WeightDraw::WeightDraw(std::vector<Complex> weights) : weights_(strip_zeros(std::move(weights))) {
  if (weights_.empty()) throw ValidationError("weight draw must contain at least one nonzero weight");
  for (Complex z : weights_) {
    if (!is_finite(z)) throw ValidationError("weight draw contains a non-finite weight");
  }
}

WeightDraw biggins_weights(Complex lambda, int s1, int s2) {
  const Complex denom = 2.0 * std::cosh(lambda);
  return WeightDraw({std::exp(-lambda * static_cast<double>(s1)) / denom,
                     std::exp(-lambda * static_cast<double>(s2)) / denom});
}

WeightDraw polya_weights(int b, double u) {
  if (!(u > 0.0 && u < 1.0)) throw ValidationError("Polya uniform must lie in (0, 1)");
  const Complex zeta = std::polar(1.0, 2.0 * std::numbers::pi / b);
  return WeightDraw({real_pow(u, zeta), zeta * real_pow(1.0 - u, zeta)});
}

WeightModel WeightModel::biggins(Complex lambda) {
  if (!is_finite(lambda)) throw ValidationError("biggins: lambda must be finite");
  const Complex c = std::cosh(lambda);
  // cosh vanishes only at i pi (k + 1/2), which is not representable; treat
  // cancellation down to 1e-12 of the term size as zero.
  if (!is_finite(c) || std::abs(c) <= 1e-12 * std::cosh(lambda.real())) {
    throw ValidationError("biggins: cosh(lambda) must be finite and nonzero");
  }
  WeightModel m(BigginsBinary{lambda});
  m.biggins_plus_ = std::exp(-lambda) / (2.0 * c);
  m.biggins_minus_ = std::exp(lambda) / (2.0 * c);
  if (!is_finite(m.biggins_plus_) || !is_finite(m.biggins_minus_) ||
      m.biggins_plus_ == Complex{} || m.biggins_minus_ == Complex{}) {
    throw ValidationError("biggins: weights overflow or underflow for this lambda");
  }
  return m;
}

WeightModel WeightModel::polya(int b) {
  if (b < 3) throw ValidationError("polya: b must be an integer >= 3");
  WeightModel m(CyclicPolya{b});
  m.zeta_ = std::polar(1.0, 2.0 * std::numbers::pi / b);
  return m;
}

WeightModel WeightModel::tabular(std::vector<TabularAtom> atoms) {
  if (atoms.empty()) throw ValidationError("tabular: at least one atom required");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.probability > 0.0) || !std::isfinite(a.probability)) {
      throw ValidationError("tabular: probabilities must be positive");
    }
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("tabular: probabilities must sum to 1 (got " + std::to_string(total) + ")");
  }
  WeightModel m(Tabular{std::move(atoms)});
  const auto& stored = std::get<Tabular>(m.params_).atoms;
  m.cumulative_.reserve(stored.size());
  double acc = 0.0;
  for (const auto& a : stored) m.cumulative_.push_back(acc += a.probability);
  m.cumulative_.back() = 1.0;
  return m;
}

std::string_view WeightModel::kind() const noexcept {
  return std::visit(Overloaded{[](const BigginsBinary&) { return std::string_view{"biggins"}; },
                               [](const CyclicPolya&) { return std::string_view{"polya"}; },
                               [](const Tabular&) { return std::string_view{"tabular"}; }},
                    params_);
}

void WeightModel::draw_into(RandomStream& rng, std::vector<Complex>& out) const {
  out.clear();
  std::visit(Overloaded{
                 [&](const BigginsBinary&) {
                   const std::uint32_t bits = rng.next_u32();
                   out.push_back((bits & 1u) ? biggins_plus_ : biggins_minus_);
                   out.push_back((bits & 2u) ? biggins_plus_ : biggins_minus_);
                 },
                 [&](const CyclicPolya&) {
                   const double u = rng.uniform_open();
                   out.push_back(real_pow(u, zeta_));
                   out.push_back(zeta_ * real_pow(1.0 - u, zeta_));
                 },
                 [&](const Tabular& t) {
                   const double u = rng.uniform_open();
                   const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
                   const auto k = std::min<std::size_t>(it - cumulative_.begin(), t.atoms.size() - 1);
                   const auto w = t.atoms[k].weights.weights();
                   out.assign(w.begin(), w.end());
                 }},
             params_);
}

std::size_t WeightModel::max_children() const noexcept {
  if (const auto* t = std::get_if<Tabular>(&params_)) {
    std::size_t n = 0;
    for (const auto& a : t->atoms) n = std::max(n, a.weights.size());
    return n;
  }
  return 2;
}

std::optional<std::vector<TabularAtom>> WeightModel::enumerate() const {
  if (const auto* t = std::get_if<Tabular>(&params_)) return t->atoms;
  if (const auto* bb = std::get_if<BigginsBinary>(&params_)) {
    std::vector<TabularAtom> atoms;
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) atoms.push_back({0.25, biggins_weights(bb->lambda, s1, s2)});
    }
    return atoms;
  }
  return std::nullopt;
}

WeightDraw draw_weights(const WeightModel& model, RandomStream& rng) {
  std::vector<Complex> w;
  model.draw_into(rng, w);
  return WeightDraw(std::move(w));
}

std::optional<double> m_closed_form(const WeightModel& model, double s) {
  if (s < 0.0) throw ValidationError("m(s) requires s >= 0");
  return std::visit(
      Overloaded{[&](const BigginsBinary& bb) -> std::optional<double> {
                   const double re = bb.lambda.real();
                   const double log_m = std::log(2.0) - s * std::log(2.0) +
                                        std::log(std::cosh(s * re)) -
                                        s * std::log(std::abs(std::cosh(bb.lambda)));
                   return std::exp(log_m);
                 },
                 [&](const CyclicPolya& p) -> std::optional<double> {
                   const double d = 1.0 + s * polya_cos(p.b);
                   return d > 0.0 ? 2.0 / d : kInf;
                 },
                 [&](const Tabular& t) -> std::optional<double> {
                   double acc = 0.0;
                   for (const auto& a : t.atoms) {
                     double inner = 0.0;
                     for (Complex w : a.weights.weights()) inner += std::pow(std::abs(w), s);
                     acc += a.probability * inner;
                   }
                   return acc;
                 }},
      model.params());
}

std::optional<double> m_derivative_closed_form(const WeightModel& model, double s) {
  if (s < 0.0) throw ValidationError("m'(s) requires s >= 0");
  return std::visit(
      Overloaded{[&](const BigginsBinary& bb) -> std::optional<double> {
                   const double re = bb.lambda.real();
                   const double m = *m_closed_form(model, s);
                   return m * (-std::log(2.0) + re * std::tanh(s * re) -
                               std::log(std::abs(std::cosh(bb.lambda))));
                 },
                 [&](const CyclicPolya& p) -> std::optional<double> {
                   const double c = polya_cos(p.b);
                   const double d = 1.0 + s * c;
                   return d > 0.0 ? -2.0 * c / (d * d) : -kInf;
                 },
                 [&](const Tabular& t) -> std::optional<double> {
                   double acc = 0.0;
                   for (const auto& a : t.atoms) {
                     double inner = 0.0;
                     for (Complex w : a.weights.weights()) {
                       const double r = std::abs(w);
                       inner += std::pow(r, s) * std::log(r);
                     }
                     acc += a.probability * inner;
                   }
                   return acc;
                 }},
      model.params());
}

}  // namespace smoothfix
