#include "magtrap/spin_couplings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace magtrap {

void FieldConfig::validate() const {
  if (!std::isfinite(offset) || !std::isfinite(gradient) || !std::isfinite(lamb_dicke))
    throw std::invalid_argument("field parameters must be finite");
  if (gradient < 0) throw std::invalid_argument("field gradient must be non-negative");
  if (lamb_dicke < 0) throw std::invalid_argument("Lamb-Dicke parameter must be non-negative");
}

CouplingSet CouplingSet::from_values(const Vec3& w, double J, double J13) {
  CouplingSet s;
  s.qubit_frequencies = w;
  s.J = J;
  s.J13 = J13;
  s.ising << 0, J, J13, J, 0, J, J13, J, 0;
  return s;
}

QubitFrequencies qubit_frequencies(const FieldConfig& field, const EquilibriumSolution& eq,
                                   const PhysicalConstants& c) {
  field.validate();
  QubitFrequencies q;
  const double per_tesla = 2.0 * c.bohr_magneton / c.hbar;
  q.slope = per_tesla * field.gradient;
  for (int i = 0; i < 3; ++i)
    q.frequencies[i] =
        c.hyperfine_splitting + per_tesla * (field.offset + field.gradient * eq.positions[i]);
  return q;
}

double neighbor_resonance_shift(const FieldConfig& field, double spacing,
                                const PhysicalConstants& c) {
  if (!(spacing > 0)) throw std::invalid_argument("spacing must be positive");
  return c.g_factor * c.bohr_magneton * field.gradient * spacing / c.hbar;
}

LambDicke effective_lamb_dicke(const NormalModes& modes, const FieldConfig& field,
                               const PhysicalConstants& c) {
  field.validate();
  const double m = c.ion_mass();
  const double slope = 2.0 * c.bohr_magneton * field.gradient / c.hbar;
  LambDicke out;
  for (int l = 0; l < 3; ++l) {
    const double nu = modes.frequencies[l];
    const double zero_point = std::sqrt(c.hbar / (2.0 * m * nu));
    for (int i = 0; i < 3; ++i) out.epsilon(i, l) = modes.vectors(i, l) * zero_point * slope / nu;
  }
  out.epsilon_max = out.epsilon.cwiseAbs().maxCoeff();
  out.effective =
      (out.epsilon.array().square() + field.lamb_dicke * field.lamb_dicke).sqrt().matrix();
  return out;
}

CouplingSet compute_couplings(const NormalModes& modes, const FieldConfig& field,
                              const EquilibriumSolution& eq, const PhysicalConstants& c) {
  const QubitFrequencies q = qubit_frequencies(field, eq, c);
  const double m = c.ion_mass();

  CouplingSet s;
  s.qubit_frequencies = q.frequencies;
  s.frequency_slope = q.slope;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double sum = 0.0;
      for (int l = 0; l < 3; ++l) {
        const double nu = modes.frequencies[l];
        sum += c.hbar / (2.0 * m * nu * nu) * modes.vectors(i, l) * modes.vectors(j, l);
      }
      s.ising(i, j) = sum * q.slope * q.slope;
    }
  s.J = s.ising(0, 1);
  s.J13 = s.ising(0, 2);

  const LambDicke ld = effective_lamb_dicke(modes, field, c);
  s.epsilon = ld.epsilon;
  s.epsilon_max = ld.epsilon_max;
  s.effective_lamb_dicke = ld.effective;
  return s;
}

double spin_energy(const Vec3& w, double J, double J13, int b) {
  const int s1 = spin_sign(b, 1), s2 = spin_sign(b, 2), s3 = spin_sign(b, 3);
  return 0.5 * (s1 * w[0] + s2 * w[1] + s3 * w[2]) - 0.5 * J * s1 * s2 -
         0.5 * J * s2 * s3 - 0.5 * J13 * s1 * s3;
}

SpinSpectrum spin_spectrum(const CouplingSet& couplings) {
  SpinSpectrum spec;
  for (int b = 0; b < 8; ++b)
    spec.energies[b] = spin_energy(couplings.qubit_frequencies, couplings.J, couplings.J13, b);
  return spec;
}

CarrierSpectrum carrier_spectrum(const CouplingSet& couplings) {
  const SpinSpectrum spec = spin_spectrum(couplings);
  CarrierSpectrum out;
  for (int ion = 1; ion <= 3; ++ion) {
    const int bit = 1 << (3 - ion);
    int others[2], n = 0;
    for (int o = 1; o <= 3; ++o)
      if (o != ion) others[n++] = o;
    double lo = 0, hi = 0;
    for (int k = 0; k < 4; ++k) {
      const int b_first = (k >> 1) & 1, b_second = k & 1;
      const int base = (b_first << (3 - others[0])) | (b_second << (3 - others[1]));
      CarrierTransition& t = out.transitions[ion - 1][k];
      t.ion = ion;
      t.other_bits = k;
      t.label = "|" + std::to_string(b_first) + ">_" + std::to_string(others[0]) + "|" +
                std::to_string(b_second) + ">_" + std::to_string(others[1]);
      t.frequency = spec.energies[base | bit] - spec.energies[base];
      lo = (k == 0) ? t.frequency : std::min(lo, t.frequency);
      hi = (k == 0) ? t.frequency : std::max(hi, t.frequency);
    }
    out.spread[ion - 1] = hi - lo;
  }
  return out;
}

double heating_time_scaled(double reference_time, double reference_size, double size) {
  if (!(reference_size > 0 && size > 0))
    throw std::invalid_argument("trap sizes must be positive");
  const double r = size / reference_size;
  return reference_time * r * r * r * r;
}

}  // namespace magtrap
