#include "cavflow/harmonic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cavflow {

namespace {

using Complex = std::complex<double>;

// value/first/second derivative of P(w) = sum_{m=1..M} c_m w^m
struct PolyEval {
  Complex p{0.0, 0.0}, d1{0.0, 0.0}, d2{0.0, 0.0};
};

PolyEval eval_poly(std::span<const Complex> c, Complex w) {
  PolyEval r;
  const int M = static_cast<int>(c.size());
  if (M == 0) return r;
  r.p = c[M - 1];
  for (int m = M - 1; m >= 1; --m) {
    r.d2 = r.d2 * w + r.d1;
    r.d1 = r.d1 * w + r.p;
    r.p = r.p * w + c[m - 1];
  }
  // absorb the final a_0 = 0 step
  r.d2 = r.d2 * w + r.d1;
  r.d1 = r.d1 * w + r.p;
  r.p = r.p * w;
  r.d2 *= 2.0;
  return r;
}

Complex to_complex(const Vec2& v) { return {v.x, v.y}; }

}  // namespace

double CircleFourier::eval(double theta) const {
  double s = mean;
  for (int m = 1; m <= order(); ++m)
    s += cos_coef[m - 1] * std::cos(m * theta) + sin_coef[m - 1] * std::sin(m * theta);
  return s;
}

double CircleFourier::derivative(double theta) const {
  double s = 0.0;
  for (int m = 1; m <= order(); ++m)
    s += m * (-cos_coef[m - 1] * std::sin(m * theta) +
              sin_coef[m - 1] * std::cos(m * theta));
  return s;
}

double CircleFourier::sup_bound() const {
  double s = std::abs(mean);
  for (int m = 1; m <= order(); ++m)
    s += std::hypot(cos_coef[m - 1], sin_coef[m - 1]);
  return s;
}

double compatibility_residual(const HoleDomain& domain, const BoundaryData& g) {
  double flux = 2.0 * pi * domain.r0 * g.outer.mean;
  for (int k = 0; k < domain.n(); ++k)
    flux -= 2.0 * pi * domain.holes[k].radius * g.holes[k].mean;
  return flux;
}

double data_sup_norm(const BoundaryData& g) {
  double s = g.outer.sup_bound();
  for (const auto& h : g.holes) s = std::max(s, h.sup_bound());
  return s;
}

// ------------------------------------------------------------
// HarmonicSolution evaluation
// ------------------------------------------------------------

double HarmonicSolution::value(const Vec2& x) const {
  double u = c0_;
  for (int k = 0; k < domain_.n(); ++k) {
    const Complex zeta = to_complex(x - domain_.holes[k].center);
    const double rho = std::abs(zeta);
    u += log_q_[k] * std::log(rho);
    const Complex w = domain_.holes[k].radius / zeta;
    u += eval_poly(hole_coef_[k], w).p.real();
  }
  const Complex s = to_complex(x - domain_.z0) / domain_.r0;
  u += eval_poly(outer_coef_, s).p.real();
  return u;
}

Vec2 HarmonicSolution::gradient(const Vec2& x) const {
  Complex D{0.0, 0.0};
  for (int k = 0; k < domain_.n(); ++k) {
    const double rk = domain_.holes[k].radius;
    const Complex zeta = to_complex(x - domain_.holes[k].center);
    D += log_q_[k] / zeta;
    const Complex w = rk / zeta;
    const PolyEval pe = eval_poly(hole_coef_[k], w);
    D += -(w * w / rk) * pe.d1;
  }
  const Complex s = to_complex(x - domain_.z0) / domain_.r0;
  D += eval_poly(outer_coef_, s).d1 / domain_.r0;
  return {D.real(), -D.imag()};
}

Mat2 HarmonicSolution::hessian(const Vec2& x) const {
  Complex D2{0.0, 0.0};
  for (int k = 0; k < domain_.n(); ++k) {
    const double rk = domain_.holes[k].radius;
    const Complex zeta = to_complex(x - domain_.holes[k].center);
    D2 += -log_q_[k] / (zeta * zeta);
    const Complex w = rk / zeta;
    const PolyEval pe = eval_poly(hole_coef_[k], w);
    const Complex w3 = w * w * w;
    D2 += (w3 * w * pe.d2 + 2.0 * w3 * pe.d1) / (rk * rk);
  }
  const Complex s = to_complex(x - domain_.z0) / domain_.r0;
  D2 += eval_poly(outer_coef_, s).d2 / (domain_.r0 * domain_.r0);
  return {D2.real(), -D2.imag(), -D2.imag(), -D2.real()};
}

double HarmonicSolution::hole_coef_norm(int hole) const {
  double s = 0.0;
  for (const auto& c : hole_coef_[hole]) s += std::norm(c);
  return std::sqrt(s);
}

double HarmonicSolution::outer_coef_norm() const {
  double s = 0.0;
  for (const auto& c : outer_coef_) s += std::norm(c);
  return std::sqrt(s);
}

// ------------------------------------------------------------
// Least-squares collocation solver
// ------------------------------------------------------------

HarmonicSolution solve_neumann(const HoleDomain& domain, const BoundaryData& g,
                               const NeumannOptions& options) {
  const int n = domain.n();
  if (static_cast<int>(g.holes.size()) != n)
    throw std::domain_error("solve_neumann: data circle count mismatch");
  const int M = options.modes;
  if (M < 1) throw std::domain_error("solve_neumann: modes must be positive");

  HarmonicSolution sol;
  sol.domain_ = domain;
  sol.scale_ = data_sup_norm(g);

  const double mismatch = compatibility_residual(domain, g);
  if (std::abs(mismatch) > 1e-10 * std::max(1.0, sol.scale_) * domain.r0) {
    std::ostringstream msg;
    msg << "solve_neumann: incompatible Neumann data, flux mismatch " << mismatch;
    throw CompatibilityError(msg.str(), mismatch);
  }

  // log strengths fixed a priori by the hole fluxes
  sol.log_q_.resize(n);
  for (int k = 0; k < n; ++k)
    sol.log_q_[k] = domain.holes[k].radius * g.holes[k].mean;

  // collocation layout: circle 0 = outer, then holes; 8M points each
  const int per_circle = 8 * M;
  const int n_circles = n + 1;
  const int rows = n_circles * per_circle;
  const int cols = 2 * M * n_circles;  // per circle: (cos m, sin m), m=1..M

  std::vector<Vec2> pts(rows);
  std::vector<Complex> normals(rows);  // e^{i phi} of the row circle
  std::vector<double> row_weight(rows), rhs_raw(rows);

  auto circle_center = [&](int c) { return c == 0 ? domain.z0 : domain.holes[c - 1].center; };
  auto circle_radius = [&](int c) { return c == 0 ? domain.r0 : domain.holes[c - 1].radius; };
  auto circle_data = [&](int c) -> const CircleFourier& {
    return c == 0 ? g.outer : g.holes[c - 1];
  };

  for (int c = 0; c < n_circles; ++c) {
    const Vec2 zc = circle_center(c);
    const double rc = circle_radius(c);
    const double wr = std::sqrt(2.0 * pi * rc / per_circle);
    for (int j = 0; j < per_circle; ++j) {
      const int row = c * per_circle + j;
      const double theta = 2.0 * pi * (j + 0.5) / per_circle;
      const Vec2 nv = unit_dir(theta);
      pts[row] = zc + rc * nv;
      normals[row] = {nv.x, nv.y};
      row_weight[row] = wr;
      double b = circle_data(c).eval(theta);
      // subtract the fixed log sources' normal derivative
      for (int k = 0; k < n; ++k) {
        const Complex zeta = to_complex(pts[row] - domain.holes[k].center);
        b -= sol.log_q_[k] * (normals[row] / zeta).real();
      }
      rhs_raw[row] = b;
    }
  }

  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (int row = 0; row < rows; ++row) {
    const Complex nc = normals[row];
    int col = 0;
    for (int k = 0; k < n; ++k) {
      const double rk = domain.holes[k].radius;
      const Complex zeta = to_complex(pts[row] - domain.holes[k].center);
      const Complex w = rk / zeta;
      Complex wm = w;  // w^m
      for (int m = 1; m <= M; ++m) {
        wm *= w;  // now w^{m+1}
        const Complex d = -(static_cast<double>(m) / rk) * wm * nc;
        A(row, col++) = row_weight[row] * d.real();
        A(row, col++) = row_weight[row] * -d.imag();
      }
    }
    {
      const Complex s = to_complex(pts[row] - domain.z0) / domain.r0;
      Complex sm{1.0, 0.0};  // s^{m-1}
      for (int m = 1; m <= M; ++m) {
        const Complex d = (static_cast<double>(m) / domain.r0) * sm * nc;
        A(row, col++) = row_weight[row] * d.real();
        A(row, col++) = row_weight[row] * -d.imag();
        sm *= s;
      }
    }
    b(row) = row_weight[row] * rhs_raw[row];
  }

  // column scaling for conditioning; undone after the solve
  Eigen::VectorXd colnorm(cols);
  for (int c = 0; c < cols; ++c) {
    colnorm(c) = A.col(c).norm();
    if (colnorm(c) < 1e-300) colnorm(c) = 1.0;
    A.col(c) /= colnorm(c);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::VectorXd coef = qr.solve(b);

  const auto& R = qr.matrixR();
  const int rank_dim = std::min(rows, cols);
  const double r_head = std::abs(R(0, 0));
  const double r_tail = std::abs(R(rank_dim - 1, rank_dim - 1));
  if (!(r_tail > 0.0) || r_head / r_tail > 1e12) sol.warning_ = true;

  const Eigen::VectorXd resid = A * coef - b;
  double max_res = 0.0;
  for (int row = 0; row < rows; ++row)
    max_res = std::max(max_res, std::abs(resid(row)) / row_weight[row]);

  coef = coef.cwiseQuotient(colnorm);

  sol.hole_coef_.assign(n, std::vector<Complex>(M));
  sol.outer_coef_.assign(M, Complex{0.0, 0.0});
  int col = 0;
  for (int k = 0; k < n; ++k)
    for (int m = 1; m <= M; ++m) {
      const double a = coef(col++);
      const double bb = coef(col++);
      sol.hole_coef_[k][m - 1] = {a, bb};
    }
  for (int m = 1; m <= M; ++m) {
    const double a = coef(col++);
    const double bb = coef(col++);
    sol.outer_coef_[m - 1] = {a, bb};
  }

  sol.residual_ = max_res;
  sol.tol_ = options.tol_factor * std::max(sol.scale_, 1e-300);
  if (sol.residual_ > sol.tol_) sol.warning_ = true;

  if (options.normalize_mean) {
    const DomainQuadrature quad =
        domain_quadrature(domain, options.quad_r, options.quad_theta);
    const double integral =
        quad.integrate([&](const Vec2& x) { return sol.value(x); });
    sol.c0_ = -integral / domain.area();
  }
  return sol;
}

// ------------------------------------------------------------
// Disk kernel and boundary operators
// ------------------------------------------------------------

Vec2 reflect_point(const Vec2& x, double R) {
  const double n2 = x.norm2();
  if (!(n2 > 0.0))
    throw std::domain_error("reflect_point: reflection undefined at the origin");
  return x * (R * R / n2);
}

double disk_green_correction(const Vec2& x, const Vec2& y, double R) {
  const Vec2 xs = reflect_point(x, R);
  const double dist = (y - xs).norm();
  if (!(dist > 0.0))
    throw NumericalError("disk_green_correction: evaluation at the reflected source");
  return std::log(dist) / (2.0 * pi) - y.norm2() / (4.0 * pi * R * R);
}

double green_neumann_disk(const Vec2& x, const Vec2& y, double R) {
  const double dist = (y - x).norm();
  if (!(dist > 0.0))
    throw NumericalError("green_neumann_disk: coincident evaluation and source points");
  return -std::log(dist) / (2.0 * pi) - disk_green_correction(x, y, R);
}

double poisson_disk_exterior(const std::function<double(double)>& g, const Vec2& x,
                             double tol) {
  const double r = x.norm();
  if (!(r > 1.0))
    throw std::domain_error("poisson_disk_exterior: evaluation point must satisfy |x| > 1");
  const double phi = std::atan2(x.y, x.x);
  const auto integrand = [&](double tau) {
    const double den = 1.0 + r * r - 2.0 * r * std::cos(tau - phi);
    return g(tau) / den;
  };
  return (1.0 - r * r) / (2.0 * pi) * periodic_integral_adaptive(integrand, tol);
}

double conjugate_kernel_op(const std::function<double(double)>& g, const Vec2& x,
                           double tol) {
  const double r = x.norm();
  if (!(std::abs(r - 1.0) > 0.0))
    throw std::domain_error("conjugate_kernel_op: kernel singular on the unit circle");
  const double phi = std::atan2(x.y, x.x);
  const auto integrand = [&](double tau) {
    const double den = r * r + 1.0 - 2.0 * r * std::cos(tau);
    return g(tau + phi) * r * std::sin(tau) / den;
  };
  return periodic_integral_adaptive(integrand, tol);
}

double holder_seminorm(const std::function<double(double)>& g, double alpha,
                       int samples) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("holder_seminorm: alpha must lie in (0, 1]");
  std::vector<double> vals(samples);
  for (int i = 0; i < samples; ++i) vals[i] = g(2.0 * pi * i / samples);
  double best = 0.0;
  for (int i = 0; i < samples; ++i)
    for (int j = i + 1; j < samples; ++j) {
      double dist = 2.0 * pi * (j - i) / samples;
      dist = std::min(dist, 2.0 * pi - dist);
      best = std::max(best, std::abs(vals[i] - vals[j]) / std::pow(dist, alpha));
    }
  return best;
}

}  // namespace cavflow
