#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace exhurst {

// A discrete variation filter a_0..a_l with nu >= 1 vanishing moments:
//   sum_q q^j a_q = 0 for j = 0..nu-1   and   sum_q q^nu a_q != 0.
// Moment conditions are checked at construction on inf-norm-normalized
// coefficients with tolerance 1e-10.
class FilterSpec {
 public:
  FilterSpec(std::vector<double> coeffs, int order);

  // Registry: "inc1" = (1,-1) with nu=1, "d4" = Daubechies-4 high-pass with
  // nu=2. Addressable from CLI flags.
  static FilterSpec named(const std::string& name);
  static std::vector<std::string> known_names();

  // The filter dilated m times: a^m_i = a_j if i = j*m, else 0. Length m*l+1,
  // order preserved.
  FilterSpec dilated(int m) const;

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  int order() const noexcept { return order_; }
  std::size_t length() const noexcept { return coeffs_.size(); }  // l+1
  std::size_t support() const noexcept { return coeffs_.size() - 1; }  // l

 private:
  std::vector<double> coeffs_;
  int order_;
};

// Filtered series X^a(i) = sum_q a_q x(i-q) for i >= l, reindexed from 0:
//   out[k] = sum_q a_q x[k + l - q],  k = 0..n-l-1.
std::vector<double> apply_filter(std::span<const double> x, const FilterSpec& a);

// Equivalent to apply_filter(x, base.dilated(m)) but skips the m-1 zero taps
// between coefficients.
std::vector<double> apply_dilated_filter(std::span<const double> x, const FilterSpec& base, int m);

// kappa_H^a = -1/2 sum_{q,q'} a_q a_{q'} |q-q'|^2H; the variance of the
// filtered unit-scale fBm at m=1 (always positive for a valid filter).
double kappa(const FilterSpec& a, double hurst);

// Exact covariance E[X^{a1^m1}(i) X^{a2^m2}(i+j)] of filtered fBm series:
//   -sigma2/2 * sum_{q,r} a1_q a2_r |m1*q - m2*r + j|^2H.
// Symmetric under (a1,m1,j) <-> (a2,m2,-j). For m1=m2=m, a1=a2=a, j=0 this
// reduces to the sigma_m^2 law m^2H * sigma2 * kappa_H^a.
double filtered_autocovariance(const FilterSpec& a1, int m1, const FilterSpec& a2, int m2,
                               double hurst, double sigma2, std::int64_t lag);

}  // namespace exhurst
