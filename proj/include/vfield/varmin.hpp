#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vfield/sphere.hpp"

namespace vfield {

/// Width of the polar collars excluded from the mesh.
inline constexpr double kDefaultCollar = 0.05;

/// theta sampled on n_phi x n_lambda nodes over [-pi/2 + eps, pi/2 - eps] x [0, 2pi).
///
/// Latitude nodes include both collar boundaries; longitude nodes are
/// lambda_j = 2 pi j / n_lambda. Across the seam theta(phi, lambda + 2pi) =
/// theta(phi, lambda) + 2 pi k for the grid's winding k. Values are row-major
/// (one row per latitude).
class ThetaGrid {
 public:
  ThetaGrid(std::size_t n_phi, std::size_t n_lambda, int winding, double epsilon,
            std::vector<double> values);

  static ThetaGrid sample(const AngleField& field, std::size_t n_phi, std::size_t n_lambda,
                          int winding, double epsilon = kDefaultCollar);

  std::size_t n_phi() const { return n_phi_; }
  std::size_t n_lambda() const { return n_lambda_; }
  int winding() const { return winding_; }
  double epsilon() const { return epsilon_; }
  double h_phi() const { return h_phi_; }
  double h_lambda() const { return h_lambda_; }

  double phi(std::size_t i) const { return -kHalfPi + epsilon_ + h_phi_ * static_cast<double>(i); }
  double lambda(std::size_t j) const { return h_lambda_ * static_cast<double>(j); }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_lambda_ + j]; }
  /// Value at any integer longitude index, continued across the seam by 2 pi k.
  double at(std::size_t i, long j) const;

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Nodal partials of the discretization: central differences in lambda
  /// (periodic up to the winding), central in phi with second-order one-sided
  /// rows at the collar boundaries.
  double d_lambda(std::size_t i, std::size_t j) const;
  double d_phi(std::size_t i, std::size_t j) const;

  /// Bicubic Hermite interpolant through the nodal values and partials. Outside
  /// the mesh latitudes theta is continued constantly in phi.
  AngleField to_field() const;

 private:
  std::size_t n_phi_;
  std::size_t n_lambda_;
  int winding_;
  double epsilon_;
  double h_phi_;
  double h_lambda_;
  std::vector<double> values_;
};

/// Volume of the interpolated field with trapezoid weights on the grid's own
/// nodes, plus the collars treated as loxodromic (each contributes 2 pi eps).
double grid_objective(const ThetaGrid& grid);

/// Partial derivatives of grid_objective with respect to every nodal value.
std::vector<double> grid_gradient(const ThetaGrid& grid);

/// Gradient divided by the quadrature weight of each node: the per-area
/// (L2) gradient, independent of mesh size.
double gradient_density_sup_norm(const ThetaGrid& grid, const std::vector<double>& gradient);

/// sup over the nodes of sqrt(theta_v^2 + theta_vperp^2).
double loxodromy_defect(const ThetaGrid& grid);

/// Independent audit: volume-module quadrature of the interpolated field over
/// the mesh band at doubled resolution, plus the loxodromic collars.
double audit_volume(const ThetaGrid& grid);

struct MinimizeOptions {
  std::size_t max_iter = 20000;
  double tol = 1e-6;            // on gradient_density_sup_norm
  double step0 = 0.1;
  double armijo = 1e-4;
  double shrink = 0.5;
  std::size_t max_backtracks = 60;
  double audit_tolerance = 1e-4;
};

enum class MinimizeStatus { kConverged, kMaxIterations, kLineSearchFailure };

std::string_view to_string(MinimizeStatus status);

struct MinimizeReport {
  explicit MinimizeReport(ThetaGrid start) : grid(std::move(start)) {}

  ThetaGrid grid;
  std::size_t iterations = 0;
  std::vector<double> objective_trace;   // entry 0 is the starting volume
  std::vector<double> defect_trace;      // loxodromy defect after each iterate
  std::vector<double> step_history;      // accepted step sizes
  double final_volume = 0.0;
  double loxodromy_defect = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  MinimizeStatus status = MinimizeStatus::kMaxIterations;
  /// Winding != 0: the run is reported but no minimizer claim is attached.
  bool exploratory = false;
  /// Converged with winding 0 but not loxodromic.
  bool anomaly = false;
  double audit_volume = 0.0;
  double audit_discrepancy = 0.0;
  bool audit_passed = false;
};

/// Gradient descent with Armijo backtracking. The first trial step is step0;
/// later trial steps are Barzilai-Borwein estimates from the previous iterate.
MinimizeReport minimize(const ThetaGrid& grid0, const MinimizeOptions& options = {});

struct Checkpoint {
  ThetaGrid grid;
  std::size_t iteration = 0;
  double volume = 0.0;
};

nlohmann::json checkpoint_to_json(const ThetaGrid& grid, std::size_t iteration, double volume);
/// Throws DomainError on malformed or inconsistent input.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const ThetaGrid& grid, std::size_t iteration,
                     double volume);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vfield
