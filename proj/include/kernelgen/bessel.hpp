/*
 * Copyright 2026 The kernelgen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KERNELGEN_BESSEL_HPP
#define KERNELGEN_BESSEL_HPP

#include <cmath>
#include <limits>
#include <numbers>

namespace kernelgen::bessel {

// Exponentially scaled modified Bessel functions of the first kind,
// i_nu_e(x) = exp(-x) I_nu(x) for x >= 0, nu in {0, 1}.
//
// Below the switch point the power series is summed directly (all terms are
// positive, so there is no cancellation); above it the Hankel asymptotic
// expansion is used. At x = 25 the smallest asymptotic term is below 1e-21,
// so both branches are accurate to a few ulps in double precision.

inline constexpr double kAsymptoticSwitch = 25.0;

namespace detail {

// sum_{k>=1} (x^2/4)^k / (k!)^2, i.e. I0(x) - 1.
template <typename Scalar>
Scalar i0_series_tail(Scalar x) {
  const Scalar q = x * x / Scalar(4);
  Scalar term = q;
  Scalar sum = term;
  for (int k = 2; k < 500; ++k) {
    term *= q / (Scalar(k) * Scalar(k));
    sum += term;
    if (term <= sum * std::numeric_limits<Scalar>::epsilon()) break;
  }
  return sum;
}

// sum_{k>=0} (x/2)^(2k+1) / (k! (k+1)!), i.e. I1(x).
template <typename Scalar>
Scalar i1_series(Scalar x) {
  const Scalar q = x * x / Scalar(4);
  Scalar term = x / Scalar(2);
  Scalar sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (Scalar(k) * Scalar(k + 1));
    sum += term;
    if (term <= sum * std::numeric_limits<Scalar>::epsilon()) break;
  }
  return sum;
}

// exp(-x) I_nu(x) ~ 1/sqrt(2 pi x) sum_k (-1)^k a_k(nu) / x^k
template <typename Scalar>
Scalar scaled_asymptotic(int nu, Scalar x) {
  using std::abs;
  using std::sqrt;
  const Scalar mu = Scalar(4 * nu * nu);
  Scalar term = 1;
  Scalar sum = 1;
  for (int k = 1; k < 200; ++k) {
    const Scalar odd = Scalar(2 * k - 1);
    const Scalar next = -term * (mu - odd * odd) / (Scalar(8 * k) * x);
    if (abs(next) >= abs(term)) break;
    term = next;
    sum += term;
    if (abs(term) <= abs(sum) * std::numeric_limits<Scalar>::epsilon()) break;
  }
  return sum / sqrt(Scalar(2) * std::numbers::pi_v<Scalar> * x);
}

}  // namespace detail

/// exp(-x) I0(x)
template <typename Scalar>
Scalar i0e(Scalar x) {
  using std::abs;
  using std::exp;
  x = abs(x);
  if (x > Scalar(kAsymptoticSwitch)) return detail::scaled_asymptotic(0, x);
  return exp(-x) * (Scalar(1) + detail::i0_series_tail(x));
}

/// exp(-x) I0(x) - 1, accurate when x is small and the difference cancels.
template <typename Scalar>
Scalar i0e_minus_one(Scalar x) {
  using std::abs;
  using std::exp;
  using std::expm1;
  x = abs(x);
  if (x > Scalar(kAsymptoticSwitch)) return detail::scaled_asymptotic(0, x) - Scalar(1);
  return exp(-x) * detail::i0_series_tail(x) + expm1(-x);
}

/// exp(-|x|) I1(x)
template <typename Scalar>
Scalar i1e(Scalar x) {
  using std::abs;
  using std::exp;
  const Scalar ax = abs(x);
  const Scalar v = ax > Scalar(kAsymptoticSwitch) ? detail::scaled_asymptotic(1, ax)
                                                  : exp(-ax) * detail::i1_series(ax);
  return x < Scalar(0) ? -v : v;
}

/// I0(x); overflows to +inf beyond x ~ 713 in double precision.
template <typename Scalar>
Scalar i0(Scalar x) {
  using std::abs;
  using std::exp;
  x = abs(x);
  if (x > Scalar(kAsymptoticSwitch)) return exp(x) * detail::scaled_asymptotic(0, x);
  return Scalar(1) + detail::i0_series_tail(x);
}

}  // namespace kernelgen::bessel

#endif  // KERNELGEN_BESSEL_HPP
