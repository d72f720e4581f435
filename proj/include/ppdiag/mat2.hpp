#pragma once

namespace ppdiag {

// Row-major 2x2 real matrix, just enough linear algebra for two-state chains.
struct Mat2 {
  double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diag(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a00 * y.a00 + x.a01 * y.a10, x.a00 * y.a01 + x.a01 * y.a11,
            x.a10 * y.a00 + x.a11 * y.a10, x.a10 * y.a01 + x.a11 * y.a11};
  }
  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a00 + y.a00, x.a01 + y.a01, x.a10 + y.a10, x.a11 + y.a11};
  }
  friend Mat2 operator*(double s, const Mat2& x) {
    return {s * x.a00, s * x.a01, s * x.a10, s * x.a11};
  }
};

struct Vec2 {
  double v0 = 0.0, v1 = 0.0;

  double sum() const { return v0 + v1; }

  // Row vector times matrix.
  friend Vec2 operator*(const Vec2& v, const Mat2& m) {
    return {v.v0 * m.a00 + v.v1 * m.a10, v.v0 * m.a01 + v.v1 * m.a11};
  }
};

// Matrix exponential. Uses the closed form through the trace/deviator split
// (exact for distinct as well as complex eigenvalue pairs); falls back to
// scaling-and-squaring with a degree-6 Pade approximant when the eigenvalue
// gap is below 1e-8 * ||m||, where the closed form loses accuracy.
Mat2 mat_exp_2x2(const Mat2& m);

}  // namespace ppdiag
