#ifndef MAGTRAP_TRAP_MODEL_HPP
#define MAGTRAP_TRAP_MODEL_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "magtrap/constants.hpp"

namespace magtrap {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class TrapMode { MultiTrap, Linear };

/**
 * Confining potential for three ions along z.
 *
 * Each ion sits in its own harmonic well 1/2 m W_i^2 (z - z_c,i)^2. In the
 * linear mode the three wells coincide (one trap, one frequency). Ions 1 and 3
 * always share a trap frequency so that J_12 = J_23.
 */
struct TrapLayout {
  TrapMode mode = TrapMode::MultiTrap;
  Vec3 centers = Vec3::Zero();      // m
  Vec3 trap_frequencies = Vec3::Ones();  // rad/s
  double spacing = 0.0;             // d in m, multi-trap only
  PhysicalConstants constants{};

  //! Wells at -d, 0, +d with W_1 = W_3 = outer, W_2 = middle.
  static TrapLayout multi_trap(double d, double outer, double middle,
                               const PhysicalConstants& c = {});
  //! Single trap at the origin with frequency W for all ions.
  static TrapLayout linear(double trap_frequency, const PhysicalConstants& c = {});
  //! Single-trap frequency that yields outer-to-middle spacing h.
  static double linear_frequency_for_spacing(double h, const PhysicalConstants& c = {});

  void validate() const;
};

struct EquilibriumSolution {
  Vec3 positions = Vec3::Zero();  // m, strictly increasing
  double outer_displacement = 0.0;  // Delta, m
  double spacing = 0.0;             // h = z2 - z1, m
  double residual = 0.0;            // ||grad||_inf, N
  int iterations = 0;
};

struct NormalModes {
  Vec3 frequencies = Vec3::Zero();  // nu_l, rad/s ascending
  Mat3 vectors = Mat3::Identity();  // D, columns are modes
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class UnstableConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double total_potential(const TrapLayout& layout, const Vec3& positions);
Vec3 potential_gradient(const TrapLayout& layout, const Vec3& positions);
Mat3 potential_hessian(const TrapLayout& layout, const Vec3& positions);

//! Closed-form outer-ion offset |z_1| for three ions in one harmonic trap.
double linear_chain_half_length(double trap_frequency, const PhysicalConstants& c);

EquilibriumSolution solve_equilibrium(const TrapLayout& layout);
NormalModes normal_modes(const TrapLayout& layout, const EquilibriumSolution& eq);

//! Flip each column so its largest-magnitude entry is positive. Ties within
//! 1e-9 relative go to the highest index.
void fix_mode_signs(Mat3& vectors);

}  // namespace magtrap

#endif
