#include "vfield/varmin.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <string>

#include "vfield/curvature.hpp"
#include "vfield/volume.hpp"

namespace vfield {

ThetaGrid::ThetaGrid(std::size_t n_phi, std::size_t n_lambda, int winding, double epsilon,
                     std::vector<double> values)
    : n_phi_(n_phi), n_lambda_(n_lambda), winding_(winding), epsilon_(epsilon),
      values_(std::move(values)) {
  if (n_phi < 4 || n_lambda < 4) throw DomainError("ThetaGrid: need at least 4 x 4 nodes");
  if (!(epsilon > 0.0) || !(epsilon < kHalfPi)) {
    throw DomainError("ThetaGrid: collar width must lie in (0, pi/2)");
  }
  if (values_.size() != n_phi * n_lambda) {
    throw DomainError("ThetaGrid: expected " + std::to_string(n_phi * n_lambda) + " values, got " +
                      std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("ThetaGrid: non-finite value");
  }
  h_phi_ = (kPi - 2.0 * epsilon_) / static_cast<double>(n_phi_ - 1);
  h_lambda_ = kTwoPi / static_cast<double>(n_lambda_);
}

ThetaGrid ThetaGrid::sample(const AngleField& field, std::size_t n_phi, std::size_t n_lambda,
                            int winding, double epsilon) {
  ThetaGrid grid(n_phi, n_lambda, winding, epsilon, std::vector<double>(n_phi * n_lambda, 0.0));
  for (std::size_t i = 0; i < n_phi; ++i) {
    for (std::size_t j = 0; j < n_lambda; ++j) {
      grid.values_[i * n_lambda + j] = field.theta(grid.phi(i), grid.lambda(j));
    }
  }
  return grid;
}

double ThetaGrid::at(std::size_t i, long j) const {
  const long n = static_cast<long>(n_lambda_);
  long jm = j % n;
  if (jm < 0) jm += n;
  const long turns = (j - jm) / n;
  return values_[i * n_lambda_ + static_cast<std::size_t>(jm)] + kTwoPi * winding_ * static_cast<double>(turns);
}

double ThetaGrid::d_lambda(std::size_t i, std::size_t j) const {
  const long jj = static_cast<long>(j);
  return (at(i, jj + 1) - at(i, jj - 1)) / (2.0 * h_lambda_);
}

double ThetaGrid::d_phi(std::size_t i, std::size_t j) const {
  const ThetaGrid& g = *this;
  if (i == 0) return (-3.0 * g(0, j) + 4.0 * g(1, j) - g(2, j)) / (2.0 * h_phi_);
  if (i == n_phi_ - 1) {
    return (3.0 * g(i, j) - 4.0 * g(i - 1, j) + g(i - 2, j)) / (2.0 * h_phi_);
  }
  return (g(i + 1, j) - g(i - 1, j)) / (2.0 * h_phi_);
}

namespace {

// Transposed phi-stencil: coefficient of node (row r) in d_phi at row i.
template <class Visit>
void phi_stencil(std::size_t i, std::size_t n_phi, double h, Visit visit) {
  const double s = 1.0 / (2.0 * h);
  if (i == 0) {
    visit(0, -3.0 * s);
    visit(1, 4.0 * s);
    visit(2, -1.0 * s);
  } else if (i == n_phi - 1) {
    visit(i, 3.0 * s);
    visit(i - 1, -4.0 * s);
    visit(i - 2, 1.0 * s);
  } else {
    visit(i + 1, s);
    visit(i - 1, -s);
  }
}

struct HermiteData {
  std::size_t n_phi, n_lambda;
  int winding;
  double phi0, h_phi, h_lambda;
  std::vector<double> f, f_phi, f_lambda, f_cross;
};

struct Basis {
  double v[2][2];   // [value/derivative-slot][corner]
  double dv[2][2];  // d/dt of the above
};

Basis hermite_basis(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  Basis b{};
  b.v[0][0] = 2 * t3 - 3 * t2 + 1;
  b.v[0][1] = -2 * t3 + 3 * t2;
  b.v[1][0] = t3 - 2 * t2 + t;
  b.v[1][1] = t3 - t2;
  b.dv[0][0] = 6 * t2 - 6 * t;
  b.dv[0][1] = -6 * t2 + 6 * t;
  b.dv[1][0] = 3 * t2 - 4 * t + 1;
  b.dv[1][1] = 3 * t2 - 2 * t;
  return b;
}

AngleJet hermite_eval(const HermiteData& d, double phi, double lambda) {
  const double phi_max = d.phi0 + d.h_phi * static_cast<double>(d.n_phi - 1);
  const bool clamped = phi < d.phi0 || phi > phi_max;
  const double pc = std::clamp(phi, d.phi0, phi_max);
  std::size_t i = static_cast<std::size_t>(std::floor((pc - d.phi0) / d.h_phi));
  i = std::min(i, d.n_phi - 2);
  const double x = (pc - d.phi0) / d.h_phi - static_cast<double>(i);

  const double jl = std::floor(lambda / d.h_lambda);
  const double y = lambda / d.h_lambda - jl;
  const long n = static_cast<long>(d.n_lambda);
  long j = static_cast<long>(jl) % n;
  if (j < 0) j += n;
  const double base_turns = (jl - static_cast<double>(j)) / static_cast<double>(n);

  const Basis bx = hermite_basis(x);
  const Basis by = hermite_basis(y);
  AngleJet out{};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      long jb = j + b;
      double turns = base_turns;
      if (jb == n) {
        jb = 0;
        turns += 1.0;
      }
      const std::size_t k = (i + a) * d.n_lambda + static_cast<std::size_t>(jb);
      const double f = d.f[k] + kTwoPi * d.winding * turns;
      const double fx = d.h_phi * d.f_phi[k];
      const double fy = d.h_lambda * d.f_lambda[k];
      const double fxy = d.h_phi * d.h_lambda * d.f_cross[k];
      out.theta += f * bx.v[0][a] * by.v[0][b] + fx * bx.v[1][a] * by.v[0][b] +
                   fy * bx.v[0][a] * by.v[1][b] + fxy * bx.v[1][a] * by.v[1][b];
      out.dphi += f * bx.dv[0][a] * by.v[0][b] + fx * bx.dv[1][a] * by.v[0][b] +
                  fy * bx.dv[0][a] * by.v[1][b] + fxy * bx.dv[1][a] * by.v[1][b];
      out.dlambda += f * bx.v[0][a] * by.dv[0][b] + fx * bx.v[1][a] * by.dv[0][b] +
                     fy * bx.v[0][a] * by.dv[1][b] + fxy * bx.v[1][a] * by.dv[1][b];
    }
  }
  out.dphi = clamped ? 0.0 : out.dphi / d.h_phi;
  out.dlambda /= d.h_lambda;
  return out;
}

struct Row {
  double phi;
  double cos_phi;
  double weight;  // trapezoid weight in phi times h_lambda
};

std::vector<Row> rows_of(const ThetaGrid& g) {
  std::vector<Row> rows(g.n_phi());
  for (std::size_t i = 0; i < g.n_phi(); ++i) {
    const double w = (i == 0 || i + 1 == g.n_phi()) ? 0.5 : 1.0;
    rows[i] = Row{g.phi(i), std::cos(g.phi(i)), w * g.h_phi() * g.h_lambda()};
  }
  return rows;
}

double collar_volume(const ThetaGrid& g) { return 2.0 * kTwoPi * g.epsilon(); }

}  // namespace

AngleField ThetaGrid::to_field() const {
  auto d = std::make_shared<HermiteData>();
  d->n_phi = n_phi_;
  d->n_lambda = n_lambda_;
  d->winding = winding_;
  d->phi0 = phi(0);
  d->h_phi = h_phi_;
  d->h_lambda = h_lambda_;
  d->f = values_;
  d->f_phi.resize(values_.size());
  d->f_lambda.resize(values_.size());
  d->f_cross.assign(values_.size(), 0.0);
  for (std::size_t i = 0; i < n_phi_; ++i) {
    for (std::size_t j = 0; j < n_lambda_; ++j) {
      d->f_phi[i * n_lambda_ + j] = d_phi(i, j);
      d->f_lambda[i * n_lambda_ + j] = d_lambda(i, j);
    }
  }
  for (std::size_t i = 0; i < n_phi_; ++i) {
    for (std::size_t j = 0; j < n_lambda_; ++j) {
      double& cross = d->f_cross[i * n_lambda_ + j];
      phi_stencil(i, n_phi_, h_phi_, [&](std::size_t r, double c) {
        cross += c * d->f_lambda[r * n_lambda_ + j];
      });
    }
  }
  return AngleField([d](double phi, double lambda) { return hermite_eval(*d, phi, lambda); },
                    FieldKind::kGridInterpolated);
}

double grid_objective(const ThetaGrid& g) {
  const std::vector<Row> rows = rows_of(g);
  std::vector<double> row_sums(g.n_phi());
  std::vector<double> cell(g.n_lambda());
  for (std::size_t i = 0; i < g.n_phi(); ++i) {
    for (std::size_t j = 0; j < g.n_lambda(); ++j) {
      const CurvaturePair k = curvatures_from_jet({g(i, j), g.d_phi(i, j), g.d_lambda(i, j)}, rows[i].phi);
      cell[j] = std::sqrt(1.0 + k.kappa * k.kappa + k.tau * k.tau);
    }
    row_sums[i] = rows[i].weight * rows[i].cos_phi * std::accumulate(cell.begin(), cell.end(), 0.0);
  }
  const double value = std::accumulate(row_sums.begin(), row_sums.end(), 0.0) + collar_volume(g);
  if (!std::isfinite(value)) throw NumericalError("grid_objective: non-finite volume");
  return value;
}

std::vector<double> grid_gradient(const ThetaGrid& g) {
  const std::size_t np = g.n_phi();
  const std::size_t nl = g.n_lambda();
  const std::vector<Row> rows = rows_of(g);
  std::vector<double> grad(np * nl, 0.0);
  std::vector<double> sens_lambda(np * nl);
  std::vector<double> sens_phi(np * nl);

  for (std::size_t i = 0; i < np; ++i) {
    const double cos_phi = rows[i].cos_phi;
    const double g_uun = parallel_geodesic_curvature(rows[i].phi);
    for (std::size_t j = 0; j < nl; ++j) {
      const double theta = g(i, j);
      const double a = g.d_lambda(i, j) / cos_phi;
      const double b = g.d_phi(i, j);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      const double kappa = -(c * a + s * b) - c * g_uun;
      const double tau = -(s * a - c * b) - s * g_uun;
      const double root = std::sqrt(1.0 + kappa * kappa + tau * tau);
      // d f / d kappa and d f / d tau with f = cos(phi) * root, times the node weight
      const double wk = rows[i].weight * cos_phi * kappa / root;
      const double wt = rows[i].weight * cos_phi * tau / root;
      const double dkappa_dtheta = s * a - c * b + s * g_uun;
      const double dtau_dtheta = -(c * a + s * b) - c * g_uun;
      const std::size_t k = i * nl + j;
      grad[k] += wk * dkappa_dtheta + wt * dtau_dtheta;
      sens_lambda[k] = (wk * (-c) + wt * (-s)) / cos_phi;  // through a = d_lambda / cos(phi)
      sens_phi[k] = wk * (-s) + wt * c;                    // through b = d_phi
    }
  }

  const double sl = 1.0 / (2.0 * g.h_lambda());
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < nl; ++j) {
      const std::size_t k = i * nl + j;
      const std::size_t jp = (j + 1) % nl;
      const std::size_t jm = (j + nl - 1) % nl;
      grad[i * nl + jp] += sl * sens_lambda[k];
      grad[i * nl + jm] -= sl * sens_lambda[k];
      phi_stencil(i, np, g.h_phi(), [&](std::size_t r, double coeff) {
        grad[r * nl + j] += coeff * sens_phi[k];
      });
    }
  }
  return grad;
}

double gradient_density_sup_norm(const ThetaGrid& g, const std::vector<double>& gradient) {
  const std::vector<Row> rows = rows_of(g);
  double sup = 0.0;
  for (std::size_t i = 0; i < g.n_phi(); ++i) {
    for (std::size_t j = 0; j < g.n_lambda(); ++j) {
      sup = std::max(sup, std::abs(gradient[i * g.n_lambda() + j]) / rows[i].weight);
    }
  }
  return sup;
}

double loxodromy_defect(const ThetaGrid& g) {
  double sup = 0.0;
  for (std::size_t i = 0; i < g.n_phi(); ++i) {
    for (std::size_t j = 0; j < g.n_lambda(); ++j) {
      const DirectionalRates r = theta_directional(AngleJet{g(i, j), g.d_phi(i, j), g.d_lambda(i, j)}, g.phi(i));
      sup = std::max(sup, std::hypot(r.theta_v, r.theta_vperp));
    }
  }
  return sup;
}

double audit_volume(const ThetaGrid& g) {
  const IntegrationDomain band{g.phi(0), g.phi(g.n_phi() - 1), 1e-2, 2 * g.n_phi(), 2 * g.n_lambda()};
  return volume_band(g.to_field(), band).value + collar_volume(g);
}

std::string_view to_string(MinimizeStatus status) {
  switch (status) {
    case MinimizeStatus::kConverged: return "converged";
    case MinimizeStatus::kMaxIterations: return "max-iterations";
    case MinimizeStatus::kLineSearchFailure: return "line-search-failure";
  }
  return "unknown";
}

MinimizeReport minimize(const ThetaGrid& grid0, const MinimizeOptions& options) {
  if (!(options.step0 > 0.0) || !(options.shrink > 0.0 && options.shrink < 1.0) ||
      !(options.armijo > 0.0 && options.armijo < 1.0) || !(options.tol > 0.0)) {
    throw DomainError("minimize: invalid options");
  }
  MinimizeReport report(grid0);
  report.exploratory = grid0.winding() != 0;

  ThetaGrid& grid = report.grid;
  double value = grid_objective(grid);
  std::vector<double> grad = grid_gradient(grid);
  report.objective_trace.push_back(value);
  report.defect_trace.push_back(loxodromy_defect(grid));

  ThetaGrid trial = grid;
  double step = options.step0;
  for (;;) {
    report.gradient_norm = gradient_density_sup_norm(grid, grad);
    if (report.gradient_norm < options.tol) {
      report.status = MinimizeStatus::kConverged;
      break;
    }
    if (report.iterations >= options.max_iter) {
      report.status = MinimizeStatus::kMaxIterations;
      break;
    }
    const double grad_sq = std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
    double trial_value = 0.0;
    std::size_t backtracks = 0;
    for (;; ++backtracks) {
      if (backtracks > options.max_backtracks) {
        report.status = MinimizeStatus::kLineSearchFailure;
        break;
      }
      for (std::size_t k = 0; k < grad.size(); ++k) trial.values()[k] = grid.values()[k] - step * grad[k];
      trial_value = grid_objective(trial);
      if (trial_value <= value - options.armijo * step * grad_sq) break;
      step *= options.shrink;
    }
    if (report.status == MinimizeStatus::kLineSearchFailure) break;

    std::vector<double> new_grad = grid_gradient(trial);
    // Barzilai-Borwein trial step for the next iteration: s.s / s.y with s = -step * grad.
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      const double sk = -step * grad[k];
      ss += sk * sk;
      sy += sk * (new_grad[k] - grad[k]);
    }
    report.step_history.push_back(step);
    std::swap(grid.values(), trial.values());
    grad = std::move(new_grad);
    value = trial_value;
    ++report.iterations;
    report.objective_trace.push_back(value);
    report.defect_trace.push_back(loxodromy_defect(grid));
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 2.0 * step;
  }

  report.converged = report.status == MinimizeStatus::kConverged;
  report.final_volume = value;
  report.loxodromy_defect = report.defect_trace.back();
  report.anomaly = report.converged && !report.exploratory && report.loxodromy_defect >= 1e-3;
  report.audit_volume = audit_volume(grid);
  report.audit_discrepancy = std::abs(report.audit_volume - report.final_volume);
  report.audit_passed = report.audit_discrepancy <= options.audit_tolerance;
  return report;
}

nlohmann::json checkpoint_to_json(const ThetaGrid& grid, std::size_t iteration, double volume) {
  return nlohmann::json{
      {"mesh", {{"n_phi", grid.n_phi()}, {"n_lambda", grid.n_lambda()}}},
      {"epsilon", grid.epsilon()},
      {"winding", grid.winding()},
      {"values", grid.values()},
      {"iteration", iteration},
      {"volume", volume},
  };
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    static const std::vector<std::string> kKeys{"mesh", "epsilon", "winding", "values", "iteration", "volume"};
    for (const auto& [key, _] : j.items()) {
      if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
        throw DomainError("checkpoint: unknown key '" + key + "'");
      }
    }
    ThetaGrid grid(j.at("mesh").at("n_phi").get<std::size_t>(), j.at("mesh").at("n_lambda").get<std::size_t>(),
                   j.at("winding").get<int>(), j.at("epsilon").get<double>(),
                   j.at("values").get<std::vector<double>>());
    return Checkpoint{std::move(grid), j.at("iteration").get<std::size_t>(), j.at("volume").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const ThetaGrid& grid, std::size_t iteration,
                     double volume) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(grid, iteration, volume).dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace vfield
