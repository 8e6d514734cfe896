#ifndef MAGTRAP_CONSTANTS_HPP
#define MAGTRAP_CONSTANTS_HPP

#include <numbers>
#include <stdexcept>

namespace magtrap {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

//! Physical constants in SI units. Defaults are CODATA 2018 and a 171Yb+ ion.
struct PhysicalConstants {
  double elementary_charge = 1.602176634e-19;  // C
  double vacuum_permittivity = 8.8541878128e-12;  // F/m
  double hbar = 1.054571817e-34;  // J s
  double bohr_magneton = 9.2740100783e-24;  // J/T
  double atomic_mass_unit = 1.66053906660e-27;  // kg
  double ion_mass_u = 170.936;
  double g_factor = 2.0;
  double hyperfine_splitting = two_pi * 12.6428e9;  // rad/s

  double ion_mass() const { return ion_mass_u * atomic_mass_unit; }

  //! e^2 / (4 pi eps0), the Coulomb prefactor in J m.
  double coulomb_constant() const {
    return elementary_charge * elementary_charge /
           (4.0 * std::numbers::pi * vacuum_permittivity);
  }

  void validate() const {
    if (!(elementary_charge > 0 && vacuum_permittivity > 0 && hbar > 0 &&
          bohr_magneton > 0 && atomic_mass_unit > 0 && g_factor > 0 &&
          hyperfine_splitting > 0))
      throw std::invalid_argument("physical constants must be strictly positive");
    if (!(ion_mass_u >= 100.0 && ion_mass_u <= 300.0))
      throw std::invalid_argument("ion mass outside [100, 300] u");
  }
};

}  // namespace magtrap

#endif
