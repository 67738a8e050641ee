#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace rsmc {

// Sum / sum-of-squares accumulator. Merging is associative, so block partials
// can be folded in a fixed order for thread-count-independent results.
struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }

  void merge(const Accumulator& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    count += other.count;
  }

  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }

  double variance() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double v = (sum_sq - sum * sum / n) / (n - 1.0);
    return v > 0.0 ? v : 0.0;
  }

  double std_error() const {
    return count ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

struct ComplexAccumulator {
  Accumulator re;
  Accumulator im;

  void add(std::complex<double> z) {
    re.add(z.real());
    im.add(z.imag());
  }

  void merge(const ComplexAccumulator& other) {
    re.merge(other.re);
    im.merge(other.im);
  }

  std::complex<double> mean() const { return {re.mean(), im.mean()}; }
  std::complex<double> std_error() const { return {re.std_error(), im.std_error()}; }
  std::uint64_t count() const { return re.count; }
};

// Monte Carlo estimate of a complex expectation with componentwise errors.
struct ComplexEstimate {
  std::complex<double> value{0.0, 0.0};
  std::complex<double> std_error{0.0, 0.0};
  std::uint64_t trials = 0;
};

// Delta-method standard error of |a - b| for independent complex estimates.
inline double distance_std_error(const ComplexEstimate& a, const ComplexEstimate& b) {
  const std::complex<double> d = a.value - b.value;
  const double r = std::abs(d);
  const double var_re = a.std_error.real() * a.std_error.real() +
                        b.std_error.real() * b.std_error.real();
  const double var_im = a.std_error.imag() * a.std_error.imag() +
                        b.std_error.imag() * b.std_error.imag();
  if (r < 1e-300) return std::sqrt(var_re + var_im);
  const double ur = d.real() / r;
  const double ui = d.imag() / r;
  return std::sqrt(ur * ur * var_re + ui * ui * var_im);
}

// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

// Fitted decay order of |error| ~ C * axis^(-order), using only points where
// the error stands clear of Monte Carlo noise (error > se_factor * se).
// Returns NaN when fewer than min_points qualify.
inline double fit_decay_order(const std::vector<double>& axis,
                              const std::vector<double>& errors,
                              const std::vector<double>& std_errors,
                              double se_factor = 5.0, std::size_t min_points = 3) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const double se = i < std_errors.size() ? std_errors[i] : 0.0;
    if (errors[i] > se_factor * se && errors[i] > 0.0) {
      lx.push_back(std::log(axis[i]));
      ly.push_back(std::log(errors[i]));
    }
  }
  if (lx.size() < min_points) return std::nan("");
  return -ls_slope(lx, ly);
}

}  // namespace rsmc
