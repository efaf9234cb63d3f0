// Eigen must not split products across threads: its blocking depends on the
// thread count and would make the table thread-count dependent.
#define EIGEN_DONT_PARALLELIZE
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "smoothfix/error.hpp"
#include "smoothfix/fourier.hpp"

namespace smoothfix {
namespace {

using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::size_t kChunk = 1024;
constexpr std::size_t kReanchor = 32;
constexpr std::size_t kMaxGroups = 16;

// rows p = 0..P-1, columns k: exp(-i (start + p h) coord_k).
void fill_exponentials(CMatrix& out, std::span<const double> coord, double start, double h) {
  const auto rows = static_cast<std::size_t>(out.rows());
  for (std::size_t k = 0; k < coord.size(); ++k) {
    const double x = coord[k];
    const Complex step = std::polar(1.0, -h * x);
    Complex cur;
    for (std::size_t p = 0; p < rows; ++p) {
      if (p % kReanchor == 0) {
        cur = std::polar(1.0, -(start + h * static_cast<double>(p)) * x);
      } else {
        cur *= step;
      }
      out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = cur;
    }
  }
}

inline void lagrange4(double t, double w[4]) noexcept {
  w[0] = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  w[1] = t * (t - 2.0) * (t - 3.0) / 2.0;
  w[2] = -t * (t - 1.0) * (t - 3.0) / 2.0;
  w[3] = t * (t - 1.0) * (t - 2.0) / 6.0;
}

}  // namespace

EcfTable::EcfTable(std::span<const Complex> samples, double half_width, double spacing) {
  if (samples.empty()) throw ValidationError("ECF table of an empty pool");
  if (!(half_width > 0.0) || !(spacing > 0.0)) {
    throw ValidationError("ECF table needs positive half-width and spacing");
  }
  const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * half_width / spacing));
  size_ = std::max<std::size_t>(intervals, 3) + 1;
  half_width_ = half_width;
  spacing_ = 2.0 * half_width / static_cast<double>(size_ - 1);

  const auto P = static_cast<Eigen::Index>(size_);
  // Fixed groups of chunks, each with its own accumulator, summed in group
  // order so the table does not depend on the thread count.
  const std::size_t chunks = (samples.size() + kChunk - 1) / kChunk;
  const std::size_t groups = std::min(chunks, kMaxGroups);
  std::vector<CMatrix> partial(groups);
  const auto ngroups = static_cast<std::int64_t>(groups);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t g = 0; g < ngroups; ++g) {
    CMatrix& acc = partial[g];
    acc = CMatrix::Zero(P, P);
    std::vector<double> xs, ys;
    const std::size_t c0 = chunks * static_cast<std::size_t>(g) / groups;
    const std::size_t c1 = chunks * static_cast<std::size_t>(g + 1) / groups;
    for (std::size_t c = c0; c < c1; ++c) {
      const std::size_t begin = c * kChunk;
      const std::size_t end = std::min(samples.size(), begin + kChunk);
      xs.clear();
      ys.clear();
      for (std::size_t k = begin; k < end; ++k) {
        xs.push_back(samples[k].real());
        ys.push_back(samples[k].imag());
      }
      CMatrix ex(P, static_cast<Eigen::Index>(xs.size()));
      CMatrix ey(P, static_cast<Eigen::Index>(ys.size()));
      fill_exponentials(ex, xs, -half_width_, spacing_);
      fill_exponentials(ey, ys, -half_width_, spacing_);
      acc.noalias() += ex * ey.transpose();
    }
  }
  CMatrix acc = CMatrix::Zero(P, P);
  for (const auto& part : partial) acc += part;
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  table_.resize(size_ * size_);
  for (Eigen::Index p = 0; p < P; ++p) {
    for (Eigen::Index q = 0; q < P; ++q) table_[p * size_ + q] = acc(p, q) * inv_n;
  }

  // Cubic Lagrange remainder on the central interval: |prod (t - t_i)| <= 9/16
  // h^4 and |f''''| = x^4 for exp(-i u x); real and imaginary parts bounded
  // separately (factor sqrt 2); the second axis is amplified by the Lebesgue
  // constant 5/4.
  const double h4 = std::pow(spacing_, 4);
  const double c = std::sqrt(2.0) * (9.0 / 16.0) * h4 / 24.0;
  double bound = 0.0;
  for (Complex z : samples) {
    const double x4 = std::pow(z.real(), 4), y4 = std::pow(z.imag(), 4);
    bound += std::min(c * (1.25 * x4 + y4), 2.0 * 1.25 * 1.25 + 1.0);
  }
  error_bound_ = bound * inv_n;
}

Complex EcfTable::operator()(Complex xi) const {
  const double u = (xi.real() + half_width_) / spacing_;
  const double v = (xi.imag() + half_width_) / spacing_;
  const double last = static_cast<double>(size_ - 1);
  if (!(u >= -1e-9 && u <= last + 1e-9 && v >= -1e-9 && v <= last + 1e-9)) {
    throw ComputeError("frequency outside the ECF table");
  }
  const auto max_start = static_cast<std::ptrdiff_t>(size_) - 4;
  const auto p0 = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(u)) - 1, 0, max_start);
  const auto q0 = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(v)) - 1, 0, max_start);
  double wu[4], wv[4];
  lagrange4(u - static_cast<double>(p0), wu);
  lagrange4(v - static_cast<double>(q0), wv);
  Complex out{};
  for (int a = 0; a < 4; ++a) {
    Complex row{};
    const Complex* base = &table_[static_cast<std::size_t>(p0 + a) * size_ + static_cast<std::size_t>(q0)];
    for (int b = 0; b < 4; ++b) row += wv[b] * base[b];
    out += wu[a] * row;
  }
  return out;
}

}  // namespace smoothfix
