#include "smoothfix/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smoothfix/error.hpp"
#include "smoothfix/model_config.hpp"
#include "smoothfix/popdyn.hpp"

namespace smoothfix {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

// Per-draw statistics reused across the report; one struct per draw keeps
// the sampling pass single.
struct DrawStats {
  double n = 0;
  double sum_log_plus = 0;
  Complex sum_t;
};

RandomStream moment_stream(std::uint64_t seed, std::size_t i) {
  return RandomStream(seed, StreamId::make(StreamDomain::moments, static_cast<std::uint32_t>(i),
                                           static_cast<std::uint32_t>(i >> 32)));
}

struct Accumulated {
  MomentEstimate full;
  double half_value = 0.0;
};

// Mean and standard error of per-draw values; also the mean over the first
// half for the stabilization check.
Accumulated summarize_values(const std::vector<double>& v) {
  Accumulated a;
  const std::size_t n = v.size();
  a.full.n_samples = n;
  a.full.method = EstimateMethod::monte_carlo;
  double sum = 0.0, half = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += v[i];
    if (i + 1 == n / 2) half = sum;
  }
  const double mean = sum / static_cast<double>(n);
  a.half_value = half / static_cast<double>(n / 2);
  if (!std::isfinite(mean)) {
    a.full.value = mean;
    a.full.stderr = kInf;
    a.full.diagnostic = "non-finite summand (overflow or divergence)";
    return a;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  a.full.value = mean;
  a.full.stderr = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return a;
}

template <class F>
std::vector<double> sample_values(const WeightModel& model, std::size_t n, std::uint64_t seed, F f) {
  std::vector<double> values(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel
  {
    std::vector<Complex> w;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      RandomStream rng = moment_stream(seed, static_cast<std::size_t>(i));
      model.draw_into(rng, w);
      values[i] = f(std::span<const Complex>(w));
    }
  }
  return values;
}

template <class F>
MomentEstimate exact_expectation(const std::vector<TabularAtom>& atoms, F f) {
  MomentEstimate e;
  e.method = EstimateMethod::closed_form;
  for (const auto& a : atoms) e.value += a.probability * f(a.weights.weights());
  if (!std::isfinite(e.value)) e.diagnostic = "non-finite value (overflow)";
  return e;
}

MomentEstimate closed(double v) {
  MomentEstimate e;
  e.value = v;
  e.method = EstimateMethod::closed_form;
  if (!std::isfinite(v)) e.diagnostic = "divergent or overflowing closed form";
  return e;
}

void require_mc_size(std::size_t n) {
  if (n < 2) throw ValidationError("Monte Carlo estimates need n >= 2 samples");
}

}  // namespace

const char* to_string(SupportClass c) noexcept {
  switch (c) {
    case SupportClass::positive_real: return "positive_real";
    case SupportClass::real: return "real";
    case SupportClass::complex: return "complex";
  }
  return "?";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

const char* to_string(EstimateMethod m) noexcept {
  return m == EstimateMethod::closed_form ? "closed_form" : "monte_carlo";
}

MomentEstimate estimate_m_monte_carlo(const WeightModel& model, double s, std::size_t n,
                                      std::uint64_t seed) {
  if (s < 0.0) throw ValidationError("m(s) requires s >= 0");
  require_mc_size(n);
  auto values = sample_values(model, n, seed, [s](std::span<const Complex> w) {
    double acc = 0.0;
    for (Complex t : w) acc += std::pow(std::abs(t), s);
    return acc;
  });
  return summarize_values(values).full;
}

MomentEstimate estimate_m(const WeightModel& model, double s, std::size_t n, std::uint64_t seed) {
  if (auto v = m_closed_form(model, s)) return closed(*v);
  return estimate_m_monte_carlo(model, s, n, seed);
}

MomentEstimate m_derivative_monte_carlo(const WeightModel& model, double s, std::size_t n,
                                        std::uint64_t seed) {
  if (!(s > 0.0)) throw ValidationError("m'(s) requires s > 0");
  require_mc_size(n);
  auto values = sample_values(model, n, seed, [s](std::span<const Complex> w) {
    double acc = 0.0;
    for (Complex t : w) {
      const double r = std::abs(t);
      acc += std::pow(r, s) * std::log(r);
    }
    return acc;
  });
  return summarize_values(values).full;
}

MomentEstimate m_derivative(const WeightModel& model, double s, std::size_t n, std::uint64_t seed) {
  if (!(s > 0.0)) throw ValidationError("m'(s) requires s > 0");
  if (auto v = m_derivative_closed_form(model, s)) return closed(*v);
  return m_derivative_monte_carlo(model, s, n, seed);
}

MomentSample::MomentSample(const WeightModel& model, std::size_t n, std::uint64_t seed) {
  require_mc_size(n);
  offsets_.reserve(n + 1);
  offsets_.push_back(0);
  std::vector<Complex> w;
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng = moment_stream(seed, i);
    model.draw_into(rng, w);
    for (Complex t : w) log_abs_.push_back(std::log(std::abs(t)));
    offsets_.push_back(log_abs_.size());
  }
}

MomentEstimate MomentSample::m(double s) const {
  std::vector<double> v(size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) acc += std::exp(s * log_abs_[k]);
    v[i] = acc;
  }
  return summarize_values(v).full;
}

MomentEstimate MomentSample::m_prime(double s) const {
  std::vector<double> v(size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      acc += std::exp(s * log_abs_[k]) * log_abs_[k];
    }
    v[i] = acc;
  }
  return summarize_values(v).full;
}

AlphaResult find_alpha(const WeightModel& model, const AlphaOptions& options) {
  if (!(options.s_max > 0.0)) throw ValidationError("s_max must be positive");
  if (!(options.tol > 0.0)) throw ValidationError("tol must be positive");

  const bool closed_form = !options.force_monte_carlo && m_closed_form(model, 0.0).has_value();
  std::optional<MomentSample> sample;
  if (!closed_form) sample.emplace(model, options.mc_samples, options.seed);
  auto m = [&](double s) { return closed_form ? *m_closed_form(model, s) : sample->m(s).value; };

  AlphaResult result;
  result.method = closed_form ? EstimateMethod::closed_form : EstimateMethod::monte_carlo;

  const double m0 = m(0.0);
  if (!(m0 > 1.0)) {
    throw ValidationError("subcritical mean: m(0) = E[N] = " + std::to_string(m0) + " <= 1");
  }

  std::vector<double> grid;
  for (double s = 1.0 / 64.0; s < options.s_max; s *= 2.0) grid.push_back(s);
  grid.push_back(options.s_max);

  double lo = 0.0;
  std::optional<double> hi;
  std::size_t hi_index = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (m(grid[k]) - 1.0 <= 0.0) {
      hi = grid[k];
      hi_index = k;
      break;
    }
    lo = grid[k];
  }
  if (!hi) return result;

  double a = lo, b = *hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (m(mid) - 1.0 <= 0.0) {
      b = mid;
    } else {
      a = mid;
    }
  }
  const double alpha = std::abs(m(a) - 1.0) < std::abs(m(b) - 1.0) ? a : b;
  result.alpha = alpha;
  result.m_at_alpha = m(alpha);

  for (std::size_t k = hi_index + 1; k < grid.size(); ++k) {
    if (m(grid[k]) - 1.0 > 0.0) {
      result.multiple_roots = true;
      break;
    }
  }
  if (!closed_form) {
    const auto est = sample->m(alpha);
    const auto slope = sample->m_prime(alpha);
    result.alpha_stderr = slope.value != 0.0 ? est.stderr / std::abs(slope.value) : kInf;
  }
  return result;
}

namespace {

AssumptionFlag flag(Verdict v, std::string note, bool heuristic = false) {
  return AssumptionFlag{v, heuristic, std::move(note)};
}

// Finiteness verdict. Exact values pass when finite; Monte Carlo values pass
// when the estimate moved by less than the threshold over the last doubling
// of the sample size.
AssumptionFlag finiteness(const MomentEstimate& e, double half_value, double threshold,
                          const std::string& what) {
  if (!e.ok()) return flag(Verdict::indeterminate, what + ": " + *e.diagnostic);
  if (e.method == EstimateMethod::closed_form) {
    return std::isfinite(e.value) ? flag(Verdict::pass, what + " finite (exact)")
                                  : flag(Verdict::fail, what + " infinite (exact)");
  }
  const double scale = std::max(std::abs(e.value), std::abs(half_value));
  const double change = scale > 0.0 ? std::abs(e.value - half_value) / scale : 0.0;
  const std::string note = what + ": relative change over last doubling " + std::to_string(change);
  return change < threshold ? flag(Verdict::pass, note, true)
                            : flag(Verdict::indeterminate, note, true);
}

}  // namespace

AssumptionReport check_assumptions(const WeightModel& model, const AssumptionOptions& options) {
  require_mc_size(options.samples);
  AssumptionReport r;
  r.epsilon = options.epsilon;
  const auto atoms = model.enumerate();
  const double threshold = options.stabilization_threshold;

  r.flags["N_positive"] = flag(Verdict::pass, "every draw has N >= 1 (enforced by WeightDraw)");

  r.m0 = estimate_m(model, 0.0, options.samples, options.seed);
  const bool a1 = r.m0.ok() && r.m0.value > 1.0;
  r.flags["A1"] = flag(a1 ? Verdict::pass : Verdict::fail, "m(0) = E[N] = " + std::to_string(r.m0.value));

  if (a1) {
    AlphaOptions ao;
    ao.s_max = options.s_max;
    ao.tol = options.tol;
    ao.mc_samples = options.samples;
    ao.seed = options.seed;
    const AlphaResult ar = find_alpha(model, ao);
    r.alpha = ar.alpha;
    r.multiple_roots = ar.multiple_roots;
    r.flags["A2"] = ar.alpha ? flag(Verdict::pass, "m(alpha) = 1 at alpha = " + std::to_string(*ar.alpha))
                             : flag(Verdict::fail, "m(s) > 1 on (0, s_max]");
  } else {
    r.flags["A2"] = flag(Verdict::indeterminate, "requires (A1)");
  }
  if (r.alpha) r.alpha_in_theorem_range = *r.alpha > 1.0 && *r.alpha < 2.0;

  // Per-draw functionals. Exact for discrete laws, Monte Carlo otherwise.
  const double alpha = r.alpha.value_or(0.0);
  const double eps = options.epsilon;
  auto w1_loglog = [alpha](std::span<const Complex> w) {
    double w1 = 0.0;
    for (Complex t : w) w1 += std::pow(std::abs(t), alpha);
    return w1 * log_plus(w1);
  };
  auto a4 = [alpha, eps](std::span<const Complex> w) {
    Complex z1{};
    for (Complex t : w) z1 += t;
    const double r1 = std::abs(z1);
    return std::pow(r1, alpha) * std::pow(log_plus(r1), 2.0 + eps);
  };
  auto n2 = [](std::span<const Complex> w) { return static_cast<double>(w.size() * w.size()); };
  auto cross = [](std::span<const Complex> w) {
    double acc = 0.0;
    for (Complex t : w) acc += log_plus(std::abs(t));
    return static_cast<double>(w.size()) * acc;
  };
  auto re_sum = [](std::span<const Complex> w) {
    double acc = 0.0;
    for (Complex t : w) acc += t.real();
    return acc;
  };
  auto im_sum = [](std::span<const Complex> w) {
    double acc = 0.0;
    for (Complex t : w) acc += t.imag();
    return acc;
  };

  struct Evaluated {
    MomentEstimate est;
    double half;
  };
  auto evaluate = [&](auto f) -> Evaluated {
    if (atoms) {
      auto e = exact_expectation(*atoms, f);
      return {e, e.value};
    }
    auto acc = summarize_values(sample_values(model, options.samples, options.seed, f));
    return {acc.full, acc.half_value};
  };

  if (r.alpha) {
    r.m_prime_alpha = m_derivative(model, alpha, options.samples, options.seed);
    const auto w1 = evaluate(w1_loglog);
    r.w1_loglog = w1.est;
    const auto z1 = evaluate(a4);
    r.a4_moment = z1.est;

    const double mp = r.m_prime_alpha->value;
    const auto w1_flag = finiteness(w1.est, w1.half, threshold, "E[W_1 log_+ W_1]");
    if (!r.m_prime_alpha->ok()) {
      r.flags["A3"] = flag(Verdict::indeterminate, "m'(alpha): " + *r.m_prime_alpha->diagnostic);
    } else if (!(mp < 0.0) || !std::isfinite(mp)) {
      r.flags["A3"] = flag(Verdict::fail, "m'(alpha) = " + std::to_string(mp) + " not in (-inf, 0)");
    } else {
      r.flags["A3"] = AssumptionFlag{w1_flag.verdict, w1_flag.heuristic,
                                     "m'(alpha) = " + std::to_string(mp) + "; " + w1_flag.note};
    }
    const auto a4_flag = finiteness(z1.est, z1.half, threshold, "E[|Z_1|^alpha log_+^{2+eps} |Z_1|]");
    if (r.m_prime_alpha->ok() && mp > 0.0) {
      r.flags["A4"] = flag(Verdict::fail, "m'(alpha) > 0");
    } else {
      r.flags["A4"] = a4_flag;
    }
  } else {
    r.flags["A3"] = flag(Verdict::indeterminate, "requires alpha");
    r.flags["A4"] = flag(Verdict::indeterminate, "requires alpha");
  }

  const auto n2e = evaluate(n2);
  const auto crosse = evaluate(cross);
  r.c1_n2 = n2e.est;
  r.c1_cross = crosse.est;
  {
    const auto f1 = finiteness(n2e.est, n2e.half, threshold, "E[N^2]");
    const auto f2 = finiteness(crosse.est, crosse.half, threshold, "E[N sum log_+|T_j|]");
    Verdict v = Verdict::pass;
    if (f1.verdict == Verdict::fail || f2.verdict == Verdict::fail) {
      v = Verdict::fail;
    } else if (f1.verdict == Verdict::indeterminate || f2.verdict == Verdict::indeterminate) {
      v = Verdict::indeterminate;
    }
    r.flags["C1"] = flag(v, f1.note + "; " + f2.note, f1.heuristic || f2.heuristic);
  }

  {
    const auto re = evaluate(re_sum);
    const auto im = evaluate(im_sum);
    r.mean_sum_t = {re.est.value, im.est.value};
    r.mean_sum_t_stderr = std::hypot(re.est.stderr, im.est.stderr);
    const double dev = std::abs(r.mean_sum_t - 1.0);
    const bool exact = re.est.method == EstimateMethod::closed_form;
    const bool ok = exact ? dev <= 1e-9 : dev <= 4.0 * r.mean_sum_t_stderr;
    r.flags["mean_one"] = flag(ok ? Verdict::pass : Verdict::fail,
                               "|E[sum T_j] - 1| = " + std::to_string(dev) +
                                   (ok ? "" : "; Z = 0 unless E[sum T_j] = 1"),
                               !exact);
  }

  if (r.alpha) {
    r.flags["alpha_range"] =
        flag(r.alpha_in_theorem_range ? Verdict::pass : Verdict::fail,
             "alpha = " + std::to_string(*r.alpha) + (r.alpha_in_theorem_range ? " in (1, 2)" : " outside (1, 2)"));
  } else {
    r.flags["alpha_range"] = flag(Verdict::indeterminate, "requires alpha");
  }

  // (A4) with alpha in (1, 2) is sufficient for (Z1); failure of the
  // sufficient condition leaves (Z1) undecided.
  const bool z1_sufficient = r.flags["A1"].verdict == Verdict::pass &&
                             r.flags["A2"].verdict == Verdict::pass &&
                             r.flags["A4"].verdict == Verdict::pass && r.alpha_in_theorem_range;
  r.flags["Z1"] = flag(z1_sufficient ? Verdict::pass : Verdict::indeterminate,
                       z1_sufficient ? "sufficient condition (A4) with alpha in (1, 2) holds"
                                     : "sufficient condition not established",
                       r.flags["A4"].heuristic);

  // Support of the weights.
  {
    bool all_real = true, all_positive = true;
    auto inspect = [&](std::span<const Complex> w) {
      for (Complex t : w) {
        const bool real = std::abs(t.imag()) <= 1e-15 * std::abs(t);
        all_real = all_real && real;
        all_positive = all_positive && real && t.real() > 0.0;
      }
    };
    if (atoms) {
      for (const auto& a : *atoms) inspect(a.weights.weights());
    } else {
      std::vector<Complex> w;
      for (std::size_t i = 0; i < options.support_draws; ++i) {
        RandomStream rng(options.seed, StreamId::make(StreamDomain::support, static_cast<std::uint32_t>(i)));
        model.draw_into(rng, w);
        inspect(w);
      }
    }
    r.support_class = all_positive ? SupportClass::positive_real
                      : all_real   ? SupportClass::real
                                   : SupportClass::complex;
  }

  try {
    PopdynOptions po;
    const auto pd = run(model, options.support_pool_size, options.support_iterations, options.seed, po);
    r.z_imag_dispersion = pd.summaries.back().imag_stddev;
    const double scale = 1.0 + std::abs(pd.summaries.back().mean);
    const bool not_real = r.z_imag_dispersion > 1e-9 * scale;
    r.flags["supp_Z_not_real"] =
        flag(not_real ? Verdict::pass : Verdict::fail,
             "imaginary-part stddev of a short population-dynamics run = " + std::to_string(r.z_imag_dispersion),
             true);
  } catch (const ComputeError& e) {
    r.flags["supp_Z_not_real"] = flag(Verdict::indeterminate, e.what(), true);
  }

  {
    const char* needed[] = {"N_positive", "A1", "A2", "alpha_range", "Z1", "supp_Z_not_real", "C1"};
    Verdict v = Verdict::pass;
    for (const char* k : needed) {
      const Verdict f = r.flags[k].verdict;
      if (f == Verdict::fail) {
        v = Verdict::fail;
        break;
      }
      if (f == Verdict::indeterminate) v = Verdict::indeterminate;
    }
    r.flags["absolute_continuity_hypotheses"] =
        flag(v, "N > 0, (A1), (A2) with alpha in (1, 2), (Z1), supp(Z) not in R, (C1)");
  }
  return r;
}

json to_json(const MomentEstimate& e) {
  json j{{"value", std::isfinite(e.value) ? json(e.value) : json(nullptr)},
         {"stderr", std::isfinite(e.stderr) ? json(e.stderr) : json(nullptr)},
         {"n_samples", e.n_samples},
         {"method", to_string(e.method)}};
  if (e.diagnostic) j["diagnostic"] = *e.diagnostic;
  return j;
}

json to_json(const AssumptionReport& r) {
  auto opt = [](const std::optional<MomentEstimate>& e) { return e ? to_json(*e) : json(nullptr); };
  json flags = json::object();
  for (const auto& [name, f] : r.flags) {
    flags[name] = {{"verdict", to_string(f.verdict)}, {"heuristic", f.heuristic}, {"note", f.note}};
  }
  return json{{"m0", to_json(r.m0)},
              {"alpha", r.alpha ? json(*r.alpha) : json(nullptr)},
              {"alpha_in_theorem_range", r.alpha_in_theorem_range},
              {"multiple_roots", r.multiple_roots},
              {"m_prime_alpha", opt(r.m_prime_alpha)},
              {"w1_loglog", opt(r.w1_loglog)},
              {"a4_moment", opt(r.a4_moment)},
              {"a4_epsilon", r.epsilon},
              {"c1_n2", to_json(r.c1_n2)},
              {"c1_cross", to_json(r.c1_cross)},
              {"mean_sum_t", complex_to_json(r.mean_sum_t)},
              {"mean_sum_t_stderr", r.mean_sum_t_stderr},
              {"support_class", to_string(r.support_class)},
              {"z_imag_dispersion", r.z_imag_dispersion},
              {"flags", flags}};
}

}  // namespace smoothfix
