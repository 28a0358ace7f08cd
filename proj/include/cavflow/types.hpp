#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cavflow {

inline constexpr double pi = std::numbers::pi;
inline constexpr double inf = std::numeric_limits<double>::infinity();

// ============================================================
// Small planar vector/matrix types used across all modules
// ============================================================

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  // counterclockwise quarter turn
  Vec2 perp() const { return {-y, x}; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline Vec2 unit_dir(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.dot(b); }
inline double cross(const Vec2& a, const Vec2& b) { return a.cross(b); }

struct Mat2 {
  // row-major entries
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 outer(const Vec2& u, const Vec2& v) {
    return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
  }

  Mat2 operator+(const Mat2& o) const {
    return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
  }
  Mat2 operator-(const Mat2& o) const {
    return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
  }
  Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
  Mat2& operator+=(const Mat2& o) {
    a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22; return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22; return *this;
  }
  Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  Vec2 operator*(const Vec2& v) const {
    return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
  }

  double det() const { return a11 * a22 - a12 * a21; }
  double trace() const { return a11 + a22; }
  double frobenius2() const { return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22; }
  double frobenius() const { return std::sqrt(frobenius2()); }

  // spectral (operator 2-) norm, closed form for 2x2
  double op_norm() const {
    const double f = frobenius2();
    const double d = det();
    const double disc = std::max(0.0, f * f - 4.0 * d * d);
    return std::sqrt(0.5 * (f + std::sqrt(disc)));
  }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

// ============================================================
// Error taxonomy (CLI maps these to exit codes)
// ============================================================

// configuration or geometry that cannot be realized (exit code 3)
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// solver/integration failures and violated numerical gates (exit code 4)
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Neumann data whose circle fluxes do not balance
struct CompatibilityError : NumericalError {
  double mismatch;
  CompatibilityError(const std::string& msg, double mismatch_)
      : NumericalError(msg), mismatch(mismatch_) {}
};

}  // namespace cavflow
