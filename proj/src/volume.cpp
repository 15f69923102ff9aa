#include "vfield/volume.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

#include "vfield/curvature.hpp"
#include "vfield/quadrature.hpp"

namespace vfield {

void IntegrationDomain::validate() const {
  if (!(phi_min < phi_max)) throw DomainError("IntegrationDomain: phi_min must be below phi_max");
  if (phi_min < -kHalfPi || phi_max > kHalfPi) {
    throw DomainError("IntegrationDomain: band exceeds [-pi/2, pi/2]");
  }
  if (!(epsilon > 0.0) || !(epsilon < kHalfPi)) {
    throw DomainError("IntegrationDomain: epsilon must lie in (0, pi/2)");
  }
  if (n_phi < 4 || n_lambda < 4) throw DomainError("IntegrationDomain: resolutions must be >= 4");
}

namespace {

double integrate_rectangle(const DensityFn& density, double lo, double hi, std::size_t n_phi,
                           std::size_t n_lambda, unsigned threads) {
  const GaussRule rule = gauss_legendre(n_phi);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  const double dlambda = kTwoPi / static_cast<double>(n_lambda);
  const std::vector<double> rows = evaluate_rows(n_phi, threads, [&](std::size_t i) {
    const double phi = mid + half * rule.nodes[i];
    std::vector<double> samples(n_lambda);
    for (std::size_t j = 0; j < n_lambda; ++j) {
      samples[j] = density(phi, dlambda * static_cast<double>(j));
    }
    return rule.weights[i] * std::cos(phi) * dlambda * pairwise_sum(samples);
  });
  const double value = half * pairwise_sum(rows);
  if (!std::isfinite(value)) throw NumericalError("band quadrature produced a non-finite value");
  return value;
}

// Polynomial through (x_k, y_k) evaluated at 0 (Neville).
double extrapolate_to_zero(std::vector<double> x, std::vector<double> y) {
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      y[i] = (x[i + m] * y[i] - x[i] * y[i + 1]) / (x[i + m] - x[i]);
    }
  }
  return y[0];
}

struct LadderResult {
  double value;
  double extrapolation_error;
  std::vector<double> epsilons;
  std::vector<double> truncated;
};

LadderResult integrate_ladder(const DensityFn& density, const IntegrationDomain& d, std::size_t n_phi,
                              std::size_t n_lambda, unsigned threads) {
  const std::array<double, 3> ladder{d.epsilon, d.epsilon / 10.0, d.epsilon / 100.0};
  auto clip = [&](double eps) {
    return std::pair{std::max(d.phi_min, -kHalfPi + eps), std::min(d.phi_max, kHalfPi - eps)};
  };
  const auto [lo0, hi0] = clip(ladder[0]);
  const auto [lo2, hi2] = clip(ladder[2]);
  if (!(lo0 < hi0)) throw DomainError("IntegrationDomain: band is empty after pole truncation");
  if (lo0 == lo2 && hi0 == hi2) {
    return {integrate_rectangle(density, lo0, hi0, n_phi, n_lambda, threads), 0.0, {}, {}};
  }
  LadderResult out{0.0, 0.0, {ladder.begin(), ladder.end()}, {}};
  for (double eps : ladder) {
    const auto [lo, hi] = clip(eps);
    out.truncated.push_back(integrate_rectangle(density, lo, hi, n_phi, n_lambda, threads));
  }
  out.value = extrapolate_to_zero(out.epsilons, out.truncated);
  const double linear = extrapolate_to_zero({out.epsilons[1], out.epsilons[2]},
                                            {out.truncated[1], out.truncated[2]});
  out.extrapolation_error = std::abs(out.value - linear);
  return out;
}

}  // namespace

BandIntegral integrate_density(const DensityFn& density, const IntegrationDomain& domain,
                               const QuadratureOptions& options) {
  domain.validate();
  const LadderResult base =
      integrate_ladder(density, domain, domain.n_phi, domain.n_lambda, options.threads);
  const LadderResult fine =
      integrate_ladder(density, domain, 2 * domain.n_phi, 2 * domain.n_lambda, options.threads);
  BandIntegral out;
  out.value = base.value;
  out.error_estimate = std::abs(base.value - fine.value) + base.extrapolation_error;
  out.converged = out.error_estimate <= options.rel_tolerance * std::max(1.0, std::abs(out.value));
  out.epsilons = base.epsilons;
  out.truncated_values = base.truncated;
  return out;
}

double volume_integrand(const AngleField& field, const SphericalPoint& point) {
  const CurvaturePair k = curvatures_closed_form(field, point);
  return std::sqrt(1.0 + k.kappa * k.kappa + k.tau * k.tau);
}

double volume_density_extrinsic(const AngleField& field, const SphericalPoint& point, double h) {
  const ExtrinsicFieldFn v = [&field](double phi, double lambda) {
    return field_vector(field, phi, lambda);
  };
  const Vec3 dv_u = covariant_derivative(v, point, parallel_tangent(point), h);
  const Vec3 dv_n = covariant_derivative(v, point, meridian_tangent(point), h);
  return std::sqrt(1.0 + dv_u.squaredNorm() + dv_n.squaredNorm());
}

BandIntegral volume_band(const AngleField& field, const IntegrationDomain& domain,
                         const QuadratureOptions& options) {
  const DensityFn density = [&field](double phi, double lambda) {
    const CurvaturePair k = curvatures_from_jet(field.jet(phi, lambda), phi);
    return std::sqrt(1.0 + k.kappa * k.kappa + k.tau * k.tau);
  };
  return integrate_density(density, domain, options);
}

VolumeReport volume_total(const AngleField& field, const VolumeResolution& resolution,
                          const QuadratureOptions& options) {
  IntegrationDomain north{0.0, kHalfPi, resolution.epsilon, resolution.n_phi, resolution.n_lambda};
  IntegrationDomain south{-kHalfPi, 0.0, resolution.epsilon, resolution.n_phi, resolution.n_lambda};
  VolumeReport out;
  out.north = volume_band(field, north, options);
  out.south = volume_band(field, south, options);
  out.volume = out.north.value + out.south.value;
  out.error_estimate = out.north.error_estimate + out.south.error_estimate;
  out.converged = out.north.converged && out.south.converged;
  return out;
}

double lower_bound_s2(int index_n, int index_s) {
  return 0.5 * (kPi + std::abs(index_n) + std::abs(index_s) - 2.0) * kSphereArea;
}

double lower_bound_s3(int index_n, int index_s) {
  return (std::abs(index_n) + std::abs(index_s)) * kS3Volume;
}

SharpnessResidual sharpness_at(const AngleField& field, const SphericalPoint& point) {
  const AngleJet jet = field.jet(point);
  const CurvaturePair k = curvatures_from_jet(jet, point.phi());
  const double phi = point.phi();
  return SharpnessResidual{
      .res_i = std::abs(std::abs(std::sin(phi)) - std::hypot(k.kappa, k.tau) * std::cos(phi)),
      .res_ii = std::abs(k.kappa * std::sin(jet.theta) - k.tau * std::cos(jet.theta)),
  };
}

SharpnessReport sharpness_residuals(const AngleField& field, const SampleGrid& grid) {
  if (grid.n_phi < 2 || grid.n_lambda < 1 || !(grid.pole_clip > 0.0)) {
    throw DomainError("SampleGrid: need n_phi >= 2, n_lambda >= 1 and a positive pole clip");
  }
  const double phi_lo = -kHalfPi + grid.pole_clip;
  const double dphi = 2.0 * (kHalfPi - grid.pole_clip) / static_cast<double>(grid.n_phi - 1);
  const double dlambda = kTwoPi / static_cast<double>(grid.n_lambda);
  SharpnessReport out;
  for (std::size_t i = 0; i < grid.n_phi; ++i) {
    const double phi = phi_lo + dphi * static_cast<double>(i);
    for (std::size_t j = 0; j < grid.n_lambda; ++j) {
      const SharpnessResidual r = sharpness_at(field, SphericalPoint(phi, dlambda * static_cast<double>(j)));
      if (r.res_i > out.sup_i) {
        out.sup_i = r.res_i;
        out.phi_at_sup_i = phi;
      }
      if (r.res_ii > out.sup_ii) {
        out.sup_ii = r.res_ii;
        out.phi_at_sup_ii = phi;
      }
      ++out.samples;
    }
  }
  return out;
}

}  // namespace vfield
