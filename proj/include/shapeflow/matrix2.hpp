#pragma once

#include <cmath>

namespace shapeflow {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::sqrt(x * x + y * y); }
  double operator[](int i) const { return i == 0 ? x : y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Row-major 2x2 matrix; used for deformation and velocity gradients.
struct Matrix2 {
  double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

  Matrix2() = default;
  Matrix2(double m00, double m01, double m10, double m11)
      : a00(m00), a01(m01), a10(m10), a11(m11) {}

  static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Matrix2 zero() { return {0.0, 0.0, 0.0, 0.0}; }
  static Matrix2 diag(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }
  static Matrix2 rotation(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c, -s, s, c};
  }
  // Rank-one product u v^T.
  static Matrix2 outer(const Vec2& u, const Vec2& v) {
    return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
  }

  double det() const { return a00 * a11 - a01 * a10; }
  double trace() const { return a00 + a11; }
  Matrix2 transposed() const { return {a00, a10, a01, a11}; }

  // d(det A)/dA; equals det(A) * A^{-T}.
  Matrix2 cofactor() const { return {a11, -a10, -a01, a00}; }

  Matrix2 inverse() const {
    const double d = det();
    const double inv = 1.0 / d;
    return {a11 * inv, -a01 * inv, -a10 * inv, a00 * inv};
  }

  Matrix2 operator+(const Matrix2& o) const {
    return {a00 + o.a00, a01 + o.a01, a10 + o.a10, a11 + o.a11};
  }
  Matrix2 operator-(const Matrix2& o) const {
    return {a00 - o.a00, a01 - o.a01, a10 - o.a10, a11 - o.a11};
  }
  Matrix2 operator*(double s) const { return {a00 * s, a01 * s, a10 * s, a11 * s}; }
  Matrix2 operator*(const Matrix2& o) const {
    return {a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11,
            a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
  }
  Vec2 operator*(const Vec2& v) const {
    return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y};
  }
  Matrix2& operator+=(const Matrix2& o) {
    a00 += o.a00; a01 += o.a01; a10 += o.a10; a11 += o.a11;
    return *this;
  }

  Vec2 col(int j) const { return j == 0 ? Vec2{a00, a10} : Vec2{a01, a11}; }
  Vec2 row(int i) const { return i == 0 ? Vec2{a00, a01} : Vec2{a10, a11}; }

  // Frobenius inner product tr(A^T B).
  double ddot(const Matrix2& o) const {
    return a00 * o.a00 + a01 * o.a01 + a10 * o.a10 + a11 * o.a11;
  }
  double frobenius_sq() const { return ddot(*this); }
  double frobenius() const { return std::sqrt(frobenius_sq()); }

  double max_abs() const {
    return std::max(std::max(std::abs(a00), std::abs(a01)),
                    std::max(std::abs(a10), std::abs(a11)));
  }

  bool finite() const {
    return std::isfinite(a00) && std::isfinite(a01) && std::isfinite(a10) &&
           std::isfinite(a11);
  }
};

inline Matrix2 operator*(double s, const Matrix2& m) { return m * s; }

// Polarized determinant: det(B+C) - det(B) - det(C); symmetric bilinear form.
inline double det_polarization(const Matrix2& b, const Matrix2& c) {
  return b.a00 * c.a11 + b.a11 * c.a00 - b.a01 * c.a10 - b.a10 * c.a01;
}

}  // namespace shapeflow
