#pragma once

#include <cmath>
#include <cstddef>

#include "rankup/flops.hpp"
#include "rankup/method.hpp"

namespace rankup::cost {

// Constant of the Cholesky-based SPD inversion as used by the closed forms.
inline constexpr double kInversionConstant = 5.0 / 6.0;

// Divisor of the fitted DI-over-WMI relation k > s / c.
inline constexpr double kEmpiricalWmiRatio = 3.7506;

inline double flops_di(double s, double k) { return kInversionConstant * s * s * s + 2 * k * s * s; }

inline double flops_ism(double s, double k) { return 4 * k * s * s + 2 * k * s; }

inline double flops_wmi(double s, double k) {
  return 4 * k * s * s + (4 * k * k - 2 * k) * s + kInversionConstant * k * k * k;
}

// Same formulas with the inversion term replaced by the instrumented count of
// rankup::spd_invert, i.e. what the FlopLedger reports.
inline double measured_flops_di(std::size_t s, std::size_t k) {
  return static_cast<double>(inversion_cost::total(s)) + 2.0 * k * s * s;
}
inline double measured_flops_wmi(std::size_t s, std::size_t k) {
  const double sd = static_cast<double>(s);
  const double kd = static_cast<double>(k);
  return 4 * kd * sd * sd + (4 * kd * kd - 2 * kd) * sd +
         static_cast<double>(inversion_cost::total(k));
}

// DI is cheaper than ISM for k above this value.
inline double threshold_di_over_ism(double s) { return 5 * s * s / (12 * (s + 1)); }

// DI minus WMI cost difference as a cubic in k; positive means DI is cheaper.
inline double di_over_wmi_cubic(double s, double k) {
  return kInversionConstant * k * k * k + 4 * s * k * k + 2 * (s * s - s) * k -
         kInversionConstant * s * s * s;
}

// Positive root of di_over_wmi_cubic for fixed s, by bisection on [0, s].
// The cubic is -(5/6)s^3 at k = 0 and 6s^3 - 2s^2 > 0 at k = s.
inline double threshold_di_over_wmi(double s, double tolerance = 1e-6) {
  double lo = 0.0;
  double hi = s;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (di_over_wmi_cubic(s, mid) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double empirical_threshold_di_over_wmi(double s) { return s / kEmpiricalWmiRatio; }

// Limit of s / threshold_di_over_wmi(s) as s grows: 1/x for the root x of
// (5/6)x^3 + 4x^2 + 2x - 5/6.
inline double asymptotic_wmi_ratio() {
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double x = 0.5 * (lo + hi);
    const double f = kInversionConstant * x * x * x + 4 * x * x + 2 * x - kInversionConstant;
    (f > 0 ? hi : lo) = x;
  }
  return 2.0 / (lo + hi);
}

// Least-squares slope c of s ~ c * k*(s) over s in [s_min, s_max].
inline double fitted_wmi_ratio(std::size_t s_min, std::size_t s_max) {
  double sk = 0.0;
  double kk = 0.0;
  for (std::size_t s = s_min; s <= s_max; ++s) {
    const double k = threshold_di_over_wmi(static_cast<double>(s));
    sk += static_cast<double>(s) * k;
    kk += k * k;
  }
  return sk / kk;
}

// Argmin of the three closed forms; ties go to WMI, then ISM, then DI.
inline UpdateMethod theoretical_best(std::size_t s, std::size_t k) {
  const double sd = static_cast<double>(s);
  const double kd = static_cast<double>(k);
  const double di = flops_di(sd, kd);
  const double ism = flops_ism(sd, kd);
  const double wmi = flops_wmi(sd, kd);
  if (wmi <= ism && wmi <= di) return UpdateMethod::WMI;
  if (ism <= di) return UpdateMethod::ISM;
  return UpdateMethod::DI;
}

}  // namespace rankup::cost
