#include "magtrap/trap_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace magtrap {

namespace {

constexpr int kMaxIterations = 200;
constexpr int kMaxHalvings = 60;
constexpr double kRelativeForceTolerance = 1e-12;
constexpr double kAbsoluteForceTolerance = 1e-18;  // N

void require_ordered(const Vec3& z) {
  if (!(z[0] < z[1] && z[1] < z[2]))
    throw std::domain_error("ion positions must be strictly increasing");
}

}  // namespace

TrapLayout TrapLayout::multi_trap(double d, double outer, double middle,
                                  const PhysicalConstants& c) {
  TrapLayout t;
  t.mode = TrapMode::MultiTrap;
  t.centers = Vec3(-d, 0.0, d);
  t.trap_frequencies = Vec3(outer, middle, outer);
  t.spacing = d;
  t.constants = c;
  t.validate();
  return t;
}

TrapLayout TrapLayout::linear(double trap_frequency, const PhysicalConstants& c) {
  TrapLayout t;
  t.mode = TrapMode::Linear;
  t.centers = Vec3::Zero();
  t.trap_frequencies = Vec3::Constant(trap_frequency);
  t.spacing = 0.0;
  t.constants = c;
  t.validate();
  return t;
}

double TrapLayout::linear_frequency_for_spacing(double h, const PhysicalConstants& c) {
  if (!(h > 0)) throw std::invalid_argument("inter-ion distance must be positive");
  // h^3 = (5/4) k / (m W^2)
  return std::sqrt(1.25 * c.coulomb_constant() / (c.ion_mass() * h * h * h));
}

void TrapLayout::validate() const {
  constants.validate();
  if (!(trap_frequencies.array() > 0).all() || !trap_frequencies.allFinite())
    throw std::invalid_argument("trap frequencies must be positive");
  if (trap_frequencies[0] != trap_frequencies[2])
    throw std::invalid_argument("ions 1 and 3 must share a trap frequency");
  if (mode == TrapMode::MultiTrap) {
    if (!(spacing > 0)) throw std::invalid_argument("trap spacing d must be positive");
    const double tol = 1e-12 * spacing;
    if (!(centers[0] < centers[1] && centers[1] < centers[2]) ||
        std::abs((centers[1] - centers[0]) - spacing) > tol ||
        std::abs((centers[2] - centers[1]) - spacing) > tol)
      throw std::invalid_argument("trap centers must be evenly spaced by d");
  } else {
    if (centers[0] != centers[1] || centers[1] != centers[2])
      throw std::invalid_argument("linear trap centers must coincide");
    if (trap_frequencies[0] != trap_frequencies[1])
      throw std::invalid_argument("linear trap has a single frequency");
  }
}

double total_potential(const TrapLayout& layout, const Vec3& z) {
  require_ordered(z);
  const double m = layout.constants.ion_mass();
  const double k = layout.constants.coulomb_constant();
  double energy = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double dz = z[i] - layout.centers[i];
    energy += 0.5 * m * layout.trap_frequencies[i] * layout.trap_frequencies[i] * dz * dz;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) energy += k / std::abs(z[i] - z[j]);
  return energy;
}

Vec3 potential_gradient(const TrapLayout& layout, const Vec3& z) {
  require_ordered(z);
  const double m = layout.constants.ion_mass();
  const double k = layout.constants.coulomb_constant();
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    g[i] = m * layout.trap_frequencies[i] * layout.trap_frequencies[i] *
           (z[i] - layout.centers[i]);
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      const double r = z[i] - z[j];
      g[i] -= k * std::copysign(1.0, r) / (r * r);
    }
  }
  return g;
}

Mat3 potential_hessian(const TrapLayout& layout, const Vec3& z) {
  require_ordered(z);
  const double m = layout.constants.ion_mass();
  const double k = layout.constants.coulomb_constant();
  Mat3 h = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    h(i, i) = m * layout.trap_frequencies[i] * layout.trap_frequencies[i];
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      const double r = std::abs(z[i] - z[j]);
      const double c = 2.0 * k / (r * r * r);
      h(i, i) += c;
      h(i, j) -= c;
    }
  }
  return h;
}

double linear_chain_half_length(double trap_frequency, const PhysicalConstants& c) {
  return std::cbrt(1.25 * c.coulomb_constant() /
                   (c.ion_mass() * trap_frequency * trap_frequency));
}

EquilibriumSolution solve_equilibrium(const TrapLayout& layout) {
  layout.validate();
  const auto& c = layout.constants;
  const double k = c.coulomb_constant();

  Vec3 z;
  if (layout.mode == TrapMode::MultiTrap) {
    z = layout.centers;
  } else {
    const double w = layout.trap_frequencies[0];
    const double scale = std::cbrt(k / (c.ion_mass() * w * w));
    z = layout.centers + Vec3(-scale, 0.0, scale);
  }

  Vec3 g = potential_gradient(layout, z);
  double energy = total_potential(layout, z);
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const double h = z[1] - z[0];
    // Round-off floor from the harmonic terms, relevant for widely spaced wells.
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * c.ion_mass() *
                         layout.trap_frequencies.squaredNorm() * z.cwiseAbs().maxCoeff();
    const double tol = std::min(kAbsoluteForceTolerance,
                                std::max(kRelativeForceTolerance * k / (h * h), floor));
    if (g.lpNorm<Eigen::Infinity>() < tol) break;

    const Vec3 step = potential_hessian(layout, z).ldlt().solve(g);
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < kMaxHalvings; ++halving, scale *= 0.5) {
      const Vec3 trial = z - scale * step;
      if (!(trial[0] < trial[1] && trial[1] < trial[2])) continue;
      const double e_trial = total_potential(layout, trial);
      const Vec3 g_trial = potential_gradient(layout, trial);
      if (e_trial < energy ||
          g_trial.lpNorm<Eigen::Infinity>() < g.lpNorm<Eigen::Infinity>()) {
        z = trial;
        g = g_trial;
        energy = e_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw ConvergenceError("equilibrium line search stalled, residual " +
                                 std::to_string(g.lpNorm<Eigen::Infinity>()) + " N",
                             g.lpNorm<Eigen::Infinity>());
  }
  const double residual = g.lpNorm<Eigen::Infinity>();
  if (it == kMaxIterations)
    throw ConvergenceError("equilibrium not converged after " +
                               std::to_string(kMaxIterations) + " iterations, residual " +
                               std::to_string(residual) + " N",
                           residual);

  EquilibriumSolution sol;
  sol.positions = z;
  sol.spacing = z[1] - z[0];
  sol.outer_displacement = layout.centers[0] - z[0];
  sol.residual = residual;
  sol.iterations = it;
  return sol;
}

void fix_mode_signs(Mat3& vectors) {
  for (int col = 0; col < 3; ++col) {
    const double peak = vectors.col(col).cwiseAbs().maxCoeff();
    int pick = 0;
    for (int row = 0; row < 3; ++row)
      if (std::abs(vectors(row, col)) >= peak * (1.0 - 1e-9)) pick = row;
    if (vectors(pick, col) < 0) vectors.col(col) *= -1.0;
  }
}

NormalModes normal_modes(const TrapLayout& layout, const EquilibriumSolution& eq) {
  const Mat3 hessian = potential_hessian(layout, eq.positions);
  Eigen::SelfAdjointEigenSolver<Mat3> solver(hessian);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("Hessian eigendecomposition failed");
  const Vec3 values = solver.eigenvalues();
  if (!(values.array() > 0).all())
    throw UnstableConfiguration("non-positive Hessian eigenvalue: unstable configuration");

  NormalModes modes;
  modes.frequencies = (values / layout.constants.ion_mass()).cwiseSqrt();
  modes.vectors = solver.eigenvectors();
  fix_mode_signs(modes.vectors);
  return modes;
}

}  // namespace magtrap
