#include "vfield/curvature.hpp"

#include <cmath>
#include <string>

namespace vfield {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw NumericalError(std::string("non-finite ") + what);
}

void check_stencil(const SphericalPoint& point, double h) {
  if (!(h > 1e-12) || !(h <= 0.1)) {
    throw DomainError("finite-difference step " + std::to_string(h) + " outside (1e-12, 0.1]");
  }
  if (!(std::abs(point.phi()) + 2.0 * h < kHalfPi)) {
    throw DomainError("finite-difference stencil at latitude " + std::to_string(point.phi()) +
                      " reaches a pole");
  }
}

}  // namespace

DirectionalRates theta_directional(const AngleJet& jet, double phi) {
  const double along_u = jet.dlambda / std::cos(phi);
  const double along_n = jet.dphi;
  const double c = std::cos(jet.theta);
  const double s = std::sin(jet.theta);
  DirectionalRates out{c * along_u + s * along_n, s * along_u - c * along_n};
  require_finite(out.theta_v, "theta_v");
  require_finite(out.theta_vperp, "theta_vperp");
  return out;
}

DirectionalRates theta_directional(const AngleField& field, const SphericalPoint& point) {
  return theta_directional(field.jet(point), point.phi());
}

double parallel_geodesic_curvature(double phi, int frame_sign) {
  return frame_sign * std::tan(phi);
}

CurvaturePair curvatures_from_jet(const AngleJet& jet, double phi, int frame_sign) {
  const DirectionalRates rates = theta_directional(jet, phi);
  const double g_uun = parallel_geodesic_curvature(phi, frame_sign);
  return CurvaturePair{
      .kappa = -rates.theta_v - std::cos(jet.theta) * g_uun,
      .tau = -rates.theta_vperp - std::sin(jet.theta) * g_uun,
      .method = CurvatureMethod::kClosedForm,
  };
}

CurvaturePair curvatures_closed_form(const AngleField& field, const SphericalPoint& point,
                                     int frame_sign) {
  return curvatures_from_jet(field.jet(point), point.phi(), frame_sign);
}

std::pair<double, double> geodesic_offset(const SphericalPoint& point, const Vec3& direction,
                                          double t) {
  const Vec3 q = std::cos(t) * embed(point) + std::sin(t) * direction;
  const SphericalPoint p = unembed(q);
  const double lambda = point.lambda() + std::remainder(p.lambda() - point.lambda(), kTwoPi);
  return {p.phi(), lambda};
}

Vec3 covariant_derivative(const ExtrinsicFieldFn& field, const SphericalPoint& point,
                          const Vec3& direction, double h) {
  check_stencil(point, h);
  const auto [phi_plus, lambda_plus] = geodesic_offset(point, direction, h);
  const auto [phi_minus, lambda_minus] = geodesic_offset(point, direction, -h);
  const Vec3 diff = (field(phi_plus, lambda_plus) - field(phi_minus, lambda_minus)) / (2.0 * h);
  const Vec3 normal = embed(point);
  return diff - diff.dot(normal) * normal;
}

CurvaturePair curvatures_extrinsic(const AngleField& field, const SphericalPoint& point, double h) {
  const FrameSample frame = frame_at(field, point);
  const ExtrinsicFieldFn v = [&field](double phi, double lambda) {
    return field_vector(field, phi, lambda);
  };
  const Vec3 dv_along_v = covariant_derivative(v, point, frame.v, h);
  const Vec3 dv_along_vperp = covariant_derivative(v, point, frame.v_perp, h);
  CurvaturePair out{
      .kappa = dv_along_v.dot(frame.v_perp),
      .tau = dv_along_vperp.dot(frame.v_perp),
      .method = CurvatureMethod::kExtrinsic,
  };
  require_finite(out.kappa, "extrinsic kappa");
  require_finite(out.tau, "extrinsic tau");
  return out;
}

ConnectionFormValue connection_form(const AngleField& field, const SphericalPoint& point) {
  const FrameSample frame = frame_at(field, point);
  const CurvaturePair k = curvatures_closed_form(field, point);
  return ConnectionFormValue{.tau = k.tau, .kappa = k.kappa, .v_perp = frame.v_perp, .v = frame.v};
}

KappaTerms kappa_terms(const AngleField& field, const SphericalPoint& point, double h) {
  const FrameSample frame = frame_at(field, point);
  const ExtrinsicFieldFn u_field = [](double phi, double lambda) {
    return parallel_tangent(SphericalPoint(phi, lambda));
  };
  const ExtrinsicFieldFn n_field = [](double phi, double lambda) {
    return meridian_tangent(SphericalPoint(phi, lambda));
  };
  const Vec3 du_u = covariant_derivative(u_field, point, frame.u, h);
  const Vec3 du_n = covariant_derivative(u_field, point, frame.n, h);
  const Vec3 dn_u = covariant_derivative(n_field, point, frame.u, h);
  const Vec3 dn_n = covariant_derivative(n_field, point, frame.n, h);

  const double c = std::cos(frame.theta);
  const double s = std::sin(frame.theta);
  const double theta_v = theta_directional(field, point).theta_v;
  const Vec3& w = frame.v_perp;

  KappaTerms t;
  t.a = c * c * du_u.dot(w);
  t.b = c * s * du_n.dot(w);
  t.c = (-s * theta_v) * frame.u.dot(w);
  t.d = c * s * dn_u.dot(w);
  t.e = s * s * dn_n.dot(w);
  t.f = (c * theta_v) * frame.n.dot(w);
  return t;
}

}  // namespace vfield
