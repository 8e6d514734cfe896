#ifndef MAGTRAP_SPIN_COUPLINGS_HPP
#define MAGTRAP_SPIN_COUPLINGS_HPP

#include <array>
#include <string>

#include "magtrap/trap_model.hpp"

namespace magtrap {

/**
 * Magnetic field along the ion chain: B(z) = B0 + (dB/dz) z.
 *
 * The qubit frequency is taken in the Paschen-Back form, linear in B with
 * slope 2 mu_B / hbar. `paschen_back` is only a flag carried for reports.
 */
struct FieldConfig {
  double offset = 1.0;        // B0, T
  double gradient = 0.0;      // dB/dz, T/m
  double lamb_dicke = 1e-6;   // bare microwave eta
  bool paschen_back = true;

  void validate() const;
};

struct QubitFrequencies {
  Vec3 frequencies = Vec3::Zero();  // w_i(z0,i), rad/s
  double slope = 0.0;               // dw/dz, rad s^-1 m^-1
};

/**
 * Gradient-induced spin couplings of the three-ion register.
 *
 * J is J_12 (= J_23 when W_1 = W_3) and J13 the next-nearest coupling. The
 * full symmetric matrix is kept in `ising` for diagnostics; the Hamiltonian
 * uses only `J` and `J13`, so tabulated values can be dropped in directly.
 */
struct CouplingSet {
  Vec3 qubit_frequencies = Vec3::Zero();  // rad/s
  double frequency_slope = 0.0;           // dw/dz
  double J = 0.0;    // rad/s
  double J13 = 0.0;  // rad/s
  Mat3 ising = Mat3::Zero();
  Mat3 epsilon = Mat3::Zero();        // signed eps_{i,l}
  double epsilon_max = 0.0;
  Mat3 effective_lamb_dicke = Mat3::Zero();  // sqrt(eta^2 + eps^2)

  //! Bare set for the pulse engine: only frequencies and couplings.
  static CouplingSet from_values(const Vec3& w, double J, double J13);
};

struct LambDicke {
  Mat3 epsilon = Mat3::Zero();
  double epsilon_max = 0.0;
  Mat3 effective = Mat3::Zero();
};

/**
 * Energies of H_0 without the phonon term, in the sigma_z|1> = +|1> convention.
 *
 * `energies` is indexed by 4 b1 + 2 b2 + b3. `listing_order` gives the basis
 * indices in the order |000>, |100>, |010>, |001>, |110>, |101>, |011>, |111>.
 */
struct SpinSpectrum {
  std::array<double, 8> energies{};
  static constexpr std::array<int, 8> listing_order{0, 4, 2, 1, 6, 5, 3, 7};
};

struct CarrierTransition {
  int ion = 0;          // 1..3
  int other_bits = 0;   // states of the two other ions, lower ion first (2 bits)
  std::string label;    // e.g. "|0>_2|1>_3"
  double frequency = 0; // rad/s
};

struct CarrierSpectrum {
  std::array<std::array<CarrierTransition, 4>, 3> transitions{};
  Vec3 spread = Vec3::Zero();  // max - min per ion, rad/s
};

QubitFrequencies qubit_frequencies(const FieldConfig& field, const EquilibriumSolution& eq,
                                   const PhysicalConstants& c);
double neighbor_resonance_shift(const FieldConfig& field, double spacing,
                                const PhysicalConstants& c);
LambDicke effective_lamb_dicke(const NormalModes& modes, const FieldConfig& field,
                               const PhysicalConstants& c);
CouplingSet compute_couplings(const NormalModes& modes, const FieldConfig& field,
                              const EquilibriumSolution& eq, const PhysicalConstants& c);

//! sigma_z eigenvalue (+1 for |1>, -1 for |0>) of `ion` (1..3) in basis index b.
inline int spin_sign(int basis_index, int ion) {
  return ((basis_index >> (3 - ion)) & 1) ? 1 : -1;
}

double spin_energy(const Vec3& w, double J, double J13, int basis_index);
SpinSpectrum spin_spectrum(const CouplingSet& couplings);
CarrierSpectrum carrier_spectrum(const CouplingSet& couplings);

//! Heating time under the R^-4 heating-rate scaling with trap size.
double heating_time_scaled(double reference_time, double reference_size, double size);

}  // namespace magtrap

#endif
