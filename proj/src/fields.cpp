#include "cavflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cavflow {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Cartesian gradient of a scalar from polar derivatives about `center`
Vec2 polar_gradient(const Vec2& e_r, double rho, double f_r, double f_t) {
  const Vec2 e_t = e_r.perp();
  return e_r * f_r + e_t * (f_t / rho);
}

// Cartesian Hessian from polar first/second derivatives
Mat2 polar_hessian(const Vec2& e_r, double rho, double f_r, double f_t, double f_rr,
                   double f_rt, double f_tt) {
  const Vec2 e_t = e_r.perp();
  const double cross = f_rt / rho - f_t / (rho * rho);
  const double tang = f_r / rho + f_tt / (rho * rho);
  Mat2 h = f_rr * Mat2::outer(e_r, e_r);
  h += cross * (Mat2::outer(e_r, e_t) + Mat2::outer(e_t, e_r));
  h += tang * Mat2::outer(e_t, e_t);
  return h;
}

// Jacobian of Dperp(f) = (f_y, -f_x) from the Hessian of f
Mat2 perp_jacobian(const Mat2& hess) {
  return {hess.a21, hess.a22, -hess.a11, -hess.a12};
}

Vec2 perp_gradient(const Vec2& grad) { return {grad.y, -grad.x}; }

}  // namespace

// quintic smoothstep 6x^5 - 15x^4 + 10x^3, flipped so the profile is a cutoff
double SmoothCutoff::value(double x) {
  const double c = clamp01(x);
  return 1.0 - c * c * c * (10.0 + c * (-15.0 + 6.0 * c));
}

double SmoothCutoff::deriv(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double u = x * (1.0 - x);
  return -30.0 * u * u;
}

double SmoothCutoff::deriv2(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -(60.0 * x - 180.0 * x * x + 120.0 * x * x * x);
}

BoundaryData growth_boundary_data(const Evolution& e, const PadRadii& pads, double t) {
  BoundaryData g;
  g.outer = CircleFourier::constant(e.R0);
  double hole_flux = 0.0;
  for (int i = 0; i < e.n(); ++i) {
    const double r = std::sqrt(std::max(0.0, e.cavities[i].sq_radius(t)) +
                               pads.R[i] * pads.R[i]);
    const double rate = e.cavities[i].sq_radius_rate(t) / (2.0 * r);
    g.holes.push_back(CircleFourier::constant(rate));
    hole_flux += 2.0 * pi * r * rate;
  }
  const double outer_flux = 2.0 * pi * (t * e.R0) * e.R0;
  const double mismatch = outer_flux - hole_flux;
  const double scale = std::max(1.0, data_sup_norm(g)) * t * e.R0;
  if (std::abs(mismatch) > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "growth_boundary_data: evolution area bookkeeping inconsistent at t=" << t
        << " (flux mismatch " << mismatch << ")";
    throw CompatibilityError(msg.str(), mismatch);
  }
  return g;
}

// ------------------------------------------------------------
// GrowthField
// ------------------------------------------------------------

// polar frame of the unique boundary circle whose d/2-collar contains x
struct GrowthField::CollarFrame {
  Vec2 center;       // circle center
  double radius = 0.0;
  double rho = 0.0;  // |x - center|
  Vec2 e_r;
  double s = 0.0;        // cutoff argument 2 dist / d
  double ds_drho = 0.0;  // +2/d on holes, -2/d on the outer circle
};

bool GrowthField::collar_frame(const Vec2& x, CollarFrame& frame) const {
  const HoleDomain& dom = phi_.domain();
  const double half = 0.5 * dom.d;
  for (const auto& hole : dom.holes) {
    const Vec2 rel = x - hole.center;
    const double rho = rel.norm();
    if (rho < hole.radius + half) {
      frame.center = hole.center;
      frame.radius = hole.radius;
      frame.rho = rho;
      frame.e_r = rel / rho;
      frame.s = 2.0 * (rho - hole.radius) / dom.d;
      frame.ds_drho = 2.0 / dom.d;
      return true;
    }
  }
  const Vec2 rel = x - dom.z0;
  const double rho = rel.norm();
  if (rho > dom.r0 - half) {
    frame.center = dom.z0;
    frame.radius = dom.r0;
    frame.rho = rho;
    frame.e_r = rel / rho;
    frame.s = 2.0 * (dom.r0 - rho) / dom.d;
    frame.ds_drho = -2.0 / dom.d;
    return true;
  }
  return false;
}

GrowthField::GrowthField(HarmonicSolution phi, HarmonicSolution stream)
    : phi_(std::move(phi)), stream_(std::move(stream)) {}

double GrowthField::stream_value(const Vec2& x) const {
  double psi = stream_.value(x);
  CollarFrame frame;
  if (collar_frame(x, frame)) {
    const Vec2 q = frame.center + frame.radius * frame.e_r;
    psi -= SmoothCutoff::value(frame.s) * stream_.value(q);
  }
  return psi;
}

Vec2 GrowthField::velocity(const Vec2& x) const {
  Vec2 grad_psi = stream_.gradient(x);
  CollarFrame frame;
  if (collar_frame(x, frame)) {
    const Vec2 q = frame.center + frame.radius * frame.e_r;
    const Vec2 e_t = frame.e_r.perp();
    const double G = stream_.value(q);
    const double Gp = frame.radius * stream_.gradient(q).dot(e_t);
    const double f_r = SmoothCutoff::deriv(frame.s) * frame.ds_drho * G;
    const double f_t = SmoothCutoff::value(frame.s) * Gp;
    grad_psi -= polar_gradient(frame.e_r, frame.rho, f_r, f_t);
  }
  return phi_.gradient(x) + perp_gradient(grad_psi);
}

Mat2 GrowthField::jacobian(const Vec2& x) const {
  Mat2 hess_psi = stream_.hessian(x);
  CollarFrame frame;
  if (collar_frame(x, frame)) {
    const Vec2 q = frame.center + frame.radius * frame.e_r;
    const Vec2 e_t = frame.e_r.perp();
    const double G = stream_.value(q);
    const Vec2 gq = stream_.gradient(q);
    const Mat2 hq = stream_.hessian(q);
    const double Gp = frame.radius * gq.dot(e_t);
    const double Gpp = frame.radius * frame.radius * e_t.dot(hq * e_t) -
                       frame.radius * gq.dot(frame.e_r);
    const double z = SmoothCutoff::value(frame.s);
    const double z1 = SmoothCutoff::deriv(frame.s) * frame.ds_drho;
    const double z2 = SmoothCutoff::deriv2(frame.s) * frame.ds_drho * frame.ds_drho;
    const double f_r = z1 * G;
    const double f_t = z * Gp;
    const double f_rr = z2 * G;
    const double f_rt = z1 * Gp;
    const double f_tt = z * Gpp;
    hess_psi -= polar_hessian(frame.e_r, frame.rho, f_r, f_t, f_rr, f_rt, f_tt);
  }
  return phi_.hessian(x) + perp_jacobian(hess_psi);
}

GrowthField build_growth_field(const HoleDomain& domain, const BoundaryData& g,
                               const NeumannOptions& options) {
  HarmonicSolution phi = solve_neumann(domain, g, options);

  // tangential boundary derivative of phi, Fourier-projected per circle
  const int order = options.modes;
  const int samples = std::max(256, 8 * options.modes);
  const double scale = std::max(data_sup_norm(g), 1e-300);
  BoundaryData h;
  for (int c = 0; c <= domain.n(); ++c) {
    const Vec2 center = c == 0 ? domain.z0 : domain.holes[c - 1].center;
    const double radius = c == 0 ? domain.r0 : domain.holes[c - 1].radius;
    std::vector<double> vals(samples);
    for (int j = 0; j < samples; ++j) {
      const double theta = 2.0 * pi * j / samples;
      const Vec2 e_r = unit_dir(theta);
      vals[j] = phi.gradient(center + radius * e_r).dot(e_r.perp());
    }
    CircleFourier f;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= samples;
    // the tangential derivative of a single-valued potential integrates
    // to zero around each circle; anything beyond roundoff is a bug
    if (std::abs(mean) > 1e-12 * std::max(1.0, scale))
      throw NumericalError("build_growth_field: tangential data has nonzero mean");
    f.mean = 0.0;
    f.cos_coef.resize(order);
    f.sin_coef.resize(order);
    for (int m = 1; m <= order; ++m) {
      double a = 0.0, b = 0.0;
      for (int j = 0; j < samples; ++j) {
        const double theta = 2.0 * pi * j / samples;
        a += vals[j] * std::cos(m * theta);
        b += vals[j] * std::sin(m * theta);
      }
      f.cos_coef[m - 1] = 2.0 * a / samples;
      f.sin_coef[m - 1] = 2.0 * b / samples;
    }
    if (c == 0)
      h.outer = std::move(f);
    else
      h.holes.push_back(std::move(f));
  }

  HarmonicSolution stream = solve_neumann(domain, h, options);
  return GrowthField(std::move(phi), std::move(stream));
}

// ------------------------------------------------------------
// TranslationField
// ------------------------------------------------------------

TranslationField::TranslationField(HoleDomain domain, std::vector<Vec2> rates)
    : domain_(std::move(domain)), rates_(std::move(rates)) {
  if (rates_.size() != static_cast<size_t>(domain_.n()))
    throw std::domain_error("TranslationField: one rate per hole required");
}

Vec2 TranslationField::velocity(const Vec2& x) const {
  for (int i = 0; i < domain_.n(); ++i) {
    const Vec2 rel = x - domain_.holes[i].center;
    const double rho = rel.norm();
    const double r = domain_.holes[i].radius;
    if (rho >= r + domain_.d || rho == 0.0) continue;
    const Vec2 e_r = rel / rho;
    const Vec2 e_t = e_r.perp();
    const double s = (rho - r) / domain_.d;
    const double A = rates_[i].dot(e_t);
    const double B = rates_[i].dot(e_r);
    const double eta = SmoothCutoff::value(s);
    const double eta1 = SmoothCutoff::deriv(s);
    // stream function -eta(s) rho A(theta); velocity = Dperp of it
    const double f_r = -(eta1 / domain_.d * rho * A + eta * A);
    const double f_t = eta * rho * B;
    return perp_gradient(polar_gradient(e_r, rho, f_r, f_t));
  }
  return {0.0, 0.0};
}

Mat2 TranslationField::jacobian(const Vec2& x) const {
  for (int i = 0; i < domain_.n(); ++i) {
    const Vec2 rel = x - domain_.holes[i].center;
    const double rho = rel.norm();
    const double r = domain_.holes[i].radius;
    if (rho >= r + domain_.d || rho == 0.0) continue;
    const Vec2 e_r = rel / rho;
    const Vec2 e_t = e_r.perp();
    const double s = (rho - r) / domain_.d;
    const double A = rates_[i].dot(e_t);
    const double B = rates_[i].dot(e_r);
    const double eta = SmoothCutoff::value(s);
    const double eta1 = SmoothCutoff::deriv(s) / domain_.d;
    const double eta2 = SmoothCutoff::deriv2(s) / (domain_.d * domain_.d);
    const double f_r = -(eta1 * rho * A + eta * A);
    const double f_t = eta * rho * B;
    const double f_rr = -(eta2 * rho * A + 2.0 * eta1 * A);
    const double f_rt = eta1 * rho * B + eta * B;
    const double f_tt = eta * rho * A;
    return perp_jacobian(polar_hessian(e_r, rho, f_r, f_t, f_rr, f_rt, f_tt));
  }
  return {};
}

TranslationField build_translation_field(const HoleDomain& domain,
                                         std::span<const Vec2> rates) {
  return TranslationField(domain, std::vector<Vec2>(rates.begin(), rates.end()));
}

// ------------------------------------------------------------
// TotalField
// ------------------------------------------------------------

TotalField::TotalField(GrowthField growth, TranslationField translation)
    : growth_(std::move(growth)), translation_(std::move(translation)) {}

Vec2 TotalField::velocity(const Vec2& x) const {
  return growth_.velocity(x) + translation_.velocity(x);
}

Mat2 TotalField::jacobian(const Vec2& x) const {
  return growth_.jacobian(x) + translation_.jacobian(x);
}

Vec2 TotalField::velocity_checked(const Vec2& x, double tol) const {
  const double sd = growth_.domain().signed_distance(x);
  if (sd < -tol) {
    std::ostringstream msg;
    msg << "field evaluation outside the domain closure by " << -sd << " at ("
        << x.x << ", " << x.y << ")";
    throw std::domain_error(msg.str());
  }
  return velocity(x);
}

TotalField build_total_field(const Evolution& e, const PadRadii& pads, double t,
                             const NeumannOptions& options) {
  const HoleDomain dom = domain_at(e, pads, t);
  const BoundaryData g = growth_boundary_data(e, pads, t);
  GrowthField growth = build_growth_field(dom, g, options);
  std::vector<Vec2> rates(e.n());
  for (int i = 0; i < e.n(); ++i) rates[i] = e.cavities[i].center_rate(t);
  TranslationField translation(dom, std::move(rates));
  return TotalField(std::move(growth), std::move(translation));
}

}  // namespace cavflow
