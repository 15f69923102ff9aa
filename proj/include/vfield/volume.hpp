#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "vfield/sphere.hpp"

namespace vfield {

inline constexpr double kSphereArea = 4.0 * kPi;       // vol(S^2)
inline constexpr double kS3Volume = 2.0 * kPi * kPi;   // vol(S^3)

/// Latitude band [phi_min, phi_max] x [0, 2pi) with pole cutoff and resolution.
///
/// The band is clipped to |phi| <= pi/2 - eps for eps in {epsilon, epsilon/10,
/// epsilon/100} and the truncated integrals are extrapolated to eps = 0 whenever
/// the clipping is active. The measure is cos(phi) dphi dlambda.
struct IntegrationDomain {
  double phi_min = -kHalfPi;
  double phi_max = kHalfPi;
  double epsilon = 1e-2;
  std::size_t n_phi = 256;
  std::size_t n_lambda = 512;

  void validate() const;
};

struct QuadratureOptions {
  unsigned threads = 1;
  /// Relative tolerance on the error estimate for the converged flag.
  double rel_tolerance = 1e-6;
};

struct BandIntegral {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  /// Truncation ladder (empty when the band does not touch a pole zone).
  std::vector<double> epsilons;
  std::vector<double> truncated_values;
};

/// Surface density in (phi, lambda); the cos(phi) measure is applied by the integrator.
using DensityFn = std::function<double(double phi, double lambda)>;

/// Gauss-Legendre in phi, trapezoid in lambda, pole extrapolation, and an
/// error estimate from a run at doubled resolution.
BandIntegral integrate_density(const DensityFn& density, const IntegrationDomain& domain,
                               const QuadratureOptions& options = {});

/// sqrt(1 + kappa^2 + tau^2) from the closed-form curvatures.
double volume_integrand(const AngleField& field, const SphericalPoint& point);

/// sqrt(1 + |nabla_u v|^2 + |nabla_n v|^2) from extrinsic derivatives of v in the
/// coordinate frame (u, n); independent of kappa and tau.
double volume_density_extrinsic(const AngleField& field, const SphericalPoint& point,
                                double h = kDefaultFdStep);

BandIntegral volume_band(const AngleField& field, const IntegrationDomain& domain,
                         const QuadratureOptions& options = {});

struct VolumeResolution {
  double epsilon = 1e-2;
  std::size_t n_phi = 256;     // per hemisphere
  std::size_t n_lambda = 512;
};

struct VolumeReport {
  double volume = 0.0;
  double error_estimate = 0.0;
  BandIntegral north;
  BandIntegral south;
  bool converged = true;
};

VolumeReport volume_total(const AngleField& field, const VolumeResolution& resolution = {},
                          const QuadratureOptions& options = {});

/// 1/2 (pi + |I_N| + |I_S| - 2) vol(S^2).
double lower_bound_s2(int index_n, int index_s);

/// (|I_N| + |I_S|) vol(S^3).
double lower_bound_s3(int index_n, int index_s);

/// Pointwise residuals of the two equality conditions for the volume bound:
///   res_i  = | |sin phi| - sqrt(kappa^2 + tau^2) cos phi |
///   res_ii = | kappa sin theta - tau cos theta |
struct SharpnessResidual {
  double res_i = 0.0;
  double res_ii = 0.0;
};

SharpnessResidual sharpness_at(const AngleField& field, const SphericalPoint& point);

/// Uniform latitude/longitude sample grid with |phi| <= pi/2 - pole_clip.
struct SampleGrid {
  std::size_t n_phi = 181;
  std::size_t n_lambda = 360;
  double pole_clip = 1e-3;
};

struct SharpnessReport {
  double sup_i = 0.0;
  double sup_ii = 0.0;
  double phi_at_sup_i = 0.0;
  double phi_at_sup_ii = 0.0;
  std::size_t samples = 0;
};

SharpnessReport sharpness_residuals(const AngleField& field, const SampleGrid& grid = {});

}  // namespace vfield
