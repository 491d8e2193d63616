#pragma once

#include <span>
#include <string>
#include <vector>

namespace exhurst {

// Subordination function h applied to a standard Gaussian. Every tag except
// identity has Hermite rank 2; identity has rank 1. All tags except identity
// are non-flat and square-integrable under the Gaussian (assumption [A'(h)]),
// which is what the expectile asymptotics require; this is a documented
// property, not a runtime check.
struct Transform {
  enum class Kind { identity, square, abs_pow, log_abs };

  Kind kind = Kind::identity;
  double beta = 0.0;  // only meaningful for abs_pow

  static Transform identity() { return {Kind::identity, 0.0}; }
  static Transform square() { return {Kind::square, 0.0}; }
  static Transform abs_pow(double beta);  // beta > 0
  static Transform log_abs() { return {Kind::log_abs, 0.0}; }
  static Transform from_string(const std::string& name, double beta = 2.0);

  double operator()(double y) const;
  int hermite_rank() const noexcept { return kind == Kind::identity ? 1 : 2; }
  std::string name() const;
};

// Exact sample expectile machinery. The estimating function
//   psi_n(theta) = (1/n) sum_i |p - 1{x_i <= theta}| (x_i - theta)
// is continuous, strictly decreasing and linear between order statistics, so
// after one sort + prefix-sum pass the root is located by binary search over
// breakpoints and solved in closed form on the bracketing interval. solve()
// is O(log n) per order p, which is what the p-grid sweeps lean on.
class ExpectileSolver {
 public:
  explicit ExpectileSolver(std::vector<double> data);  // sorts; rejects empty/non-finite

  double solve(double p) const;                  // min(x) <= result <= max(x)
  double psi(double theta, double p) const;      // psi_n, exposed for oracles
  std::size_t size() const noexcept { return sorted_.size(); }
  double min() const noexcept { return sorted_.front(); }
  double max() const noexcept { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
  std::vector<long double> prefix_;  // prefix_[k] = sum of k smallest values
};

double sample_expectile(std::span<const double> x, double p);

// v[i] <- |v[i]|^beta with fast paths for beta = 1, 2 (the defaults sit in
// the Monte-Carlo hot loop).
void abs_power_inplace(std::vector<double>& v, double beta);

// Linear-interpolation quantile (R type 7); the median of an even-sized
// sample is the mean of the two central order statistics.
double sample_quantile(std::span<const double> x, double q);

// Drops floor(trim*n) values at each end of the sorted sample, trim in [0,0.5).
double trimmed_mean(std::span<const double> x, double trim);

// The p-expectile of h(Y), Y ~ N(0,1): root of
//   psi(theta) = E[|p - 1{h(Y) <= theta}| (h(Y) - theta)],
// solved by bracketed bisection with closed-form Gaussian partial moments for
// identity/square and adaptive quadrature for abs_pow/log_abs. Absolute
// tolerance 1e-10 (the internals aim at ~1e-12).
double theoretical_expectile(const Transform& h, double p);

}  // namespace exhurst
