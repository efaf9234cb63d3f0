#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smoothfix/model.hpp"
#include "json.hpp"

namespace smoothfix {

enum class EstimateMethod { closed_form, monte_carlo };

struct MomentEstimate {
  double value = 0.0;
  double stderr = 0.0;
  std::size_t n_samples = 0;
  EstimateMethod method = EstimateMethod::closed_form;
  // Set when the estimate could not be formed (overflow, divergence).
  std::optional<std::string> diagnostic;

  bool ok() const noexcept { return !diagnostic.has_value(); }
};

// m(s); closed form when the model has one, otherwise the sample mean of
// sum_j |T_j|^s over n draws.
MomentEstimate estimate_m(const WeightModel& model, double s, std::size_t n, std::uint64_t seed);
MomentEstimate estimate_m_monte_carlo(const WeightModel& model, double s, std::size_t n,
                                      std::uint64_t seed);

// m'(s) = E[sum_j |T_j|^s log|T_j|].
MomentEstimate m_derivative(const WeightModel& model, double s, std::size_t n, std::uint64_t seed);
MomentEstimate m_derivative_monte_carlo(const WeightModel& model, double s, std::size_t n,
                                        std::uint64_t seed);

// log|T_j| for a fixed batch of draws. Evaluating m-hat(s) on one batch
// gives a smooth convex function of s (common random numbers), which the
// root finder can bisect deterministically.
class MomentSample {
 public:
  MomentSample(const WeightModel& model, std::size_t n, std::uint64_t seed);

  MomentEstimate m(double s) const;
  MomentEstimate m_prime(double s) const;
  std::size_t size() const noexcept { return offsets_.size() - 1; }

 private:
  std::vector<double> log_abs_;
  std::vector<std::size_t> offsets_;
};

struct AlphaOptions {
  double s_max = 10.0;
  double tol = 1e-9;
  bool force_monte_carlo = false;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
};

struct AlphaResult {
  std::optional<double> alpha;
  EstimateMethod method = EstimateMethod::closed_form;
  // m comes back above 1 before s_max (convex m crossing twice); the smaller
  // root is reported.
  bool multiple_roots = false;
  // Monte Carlo path: stderr(m-hat(alpha)) / |m-hat'(alpha)|.
  double alpha_stderr = 0.0;
  double m_at_alpha = 0.0;
};

// Smallest root of m(s) = 1 in (0, s_max]. Brackets on the geometric scan
// 2^-6, 2^-5, ..., s_max, then bisects. Throws ValidationError("subcritical
// mean ...") when m(0) <= 1.
AlphaResult find_alpha(const WeightModel& model, const AlphaOptions& options = {});

enum class SupportClass { positive_real, real, complex };
enum class Verdict { pass, fail, indeterminate };

const char* to_string(SupportClass c) noexcept;
const char* to_string(Verdict v) noexcept;
const char* to_string(EstimateMethod m) noexcept;

struct AssumptionOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  double epsilon = 0.1;                // exponent 2 + epsilon in (A4)
  double stabilization_threshold = 0.05;
  std::size_t support_draws = 10000;
  std::size_t support_pool_size = 2000;
  int support_iterations = 20;
  double s_max = 10.0;
  double tol = 1e-9;
};

struct AssumptionFlag {
  Verdict verdict = Verdict::indeterminate;
  bool heuristic = false;
  std::string note;
};

struct AssumptionReport {
  MomentEstimate m0;
  std::optional<double> alpha;
  bool alpha_in_theorem_range = false;
  bool multiple_roots = false;
  std::optional<MomentEstimate> m_prime_alpha;
  std::optional<MomentEstimate> w1_loglog;     // E[W_1 log_+ W_1]
  std::optional<MomentEstimate> a4_moment;     // E[|Z_1|^alpha log_+^{2+eps} |Z_1|]
  MomentEstimate c1_n2;                        // E[N^2]
  MomentEstimate c1_cross;                     // E[N sum_j log_+ |T_j|]
  Complex mean_sum_t;                          // E[sum_j T_j]
  double mean_sum_t_stderr = 0.0;
  SupportClass support_class = SupportClass::complex;
  double z_imag_dispersion = 0.0;
  double epsilon = 0.1;
  std::map<std::string, AssumptionFlag> flags;
};

AssumptionReport check_assumptions(const WeightModel& model, const AssumptionOptions& options = {});

nlohmann::json to_json(const MomentEstimate& e);
nlohmann::json to_json(const AssumptionReport& r);

}  // namespace smoothfix
