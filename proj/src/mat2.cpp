#include "ppdiag/mat2.hpp"

#include <algorithm>
#include <cmath>

#include "ppdiag/errors.hpp"

namespace ppdiag {

namespace {

double inf_norm(const Mat2& m) {
  return std::max(std::abs(m.a00) + std::abs(m.a01), std::abs(m.a10) + std::abs(m.a11));
}

// Degree-6 Pade with scaling and squaring; accurate for any argument,
// used only near-defective where the eigen closed form divides by the gap.
Mat2 exp_pade6(const Mat2& m) {
  int squarings = 0;
  double norm = inf_norm(m);
  Mat2 a = m;
  while (norm > 0.5) {
    a = 0.5 * a;
    norm *= 0.5;
    ++squarings;
  }
  // Pade [6/6] coefficients for exp(x): N(x) = sum c_j x^j, D(x) = N(-x).
  static constexpr double c[7] = {1.0,         1.0 / 2.0,     5.0 / 44.0, 1.0 / 66.0,
                                  1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
  Mat2 power = Mat2::identity();
  Mat2 num = {0, 0, 0, 0};
  Mat2 den = {0, 0, 0, 0};
  double sign = 1.0;
  for (int j = 0; j <= 6; ++j) {
    num = num + c[j] * power;
    den = den + (sign * c[j]) * power;
    power = power * a;
    sign = -sign;
  }
  // Solve den * X = num (2x2 inverse).
  const double det = den.a00 * den.a11 - den.a01 * den.a10;
  if (det == 0.0 || !std::isfinite(det)) throw NumericError("matrix exponential: singular Pade denominator");
  Mat2 inv = {den.a11 / det, -den.a01 / det, -den.a10 / det, den.a00 / det};
  Mat2 result = inv * num;
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace

Mat2 mat_exp_2x2(const Mat2& m) {
  if (!std::isfinite(m.a00) || !std::isfinite(m.a01) || !std::isfinite(m.a10) ||
      !std::isfinite(m.a11))
    throw NumericError("matrix exponential of non-finite matrix");

  // m = s*I + B with trace(B) = 0, so B^2 = (disc/4)*I and
  // exp(m) = e^s (cosh(q) I + sinh(q)/q B) with q = sqrt(disc)/2
  // (cos/sin when the discriminant is negative).
  const double s = 0.5 * (m.a00 + m.a11);
  const Mat2 b = {m.a00 - s, m.a01, m.a10, m.a11 - s};
  const double disc = (m.a00 - m.a11) * (m.a00 - m.a11) + 4.0 * m.a01 * m.a10;
  const double gap = std::sqrt(std::abs(disc));  // |eig1 - eig2|

  if (gap <= 1e-8 * inf_norm(m)) return exp_pade6(m);

  const double es = std::exp(s);
  double cosh_q, sinc_q;  // cosh(q) and sinh(q)/q, or the trig pair
  if (disc > 0.0) {
    const double q = 0.5 * std::sqrt(disc);
    cosh_q = std::cosh(q);
    sinc_q = std::sinh(q) / q;
  } else {
    const double q = 0.5 * std::sqrt(-disc);
    cosh_q = std::cos(q);
    sinc_q = std::sin(q) / q;
  }
  Mat2 result = es * (cosh_q * Mat2::identity() + sinc_q * b);
  return result;
}

}  // namespace ppdiag
