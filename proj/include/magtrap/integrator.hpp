#ifndef MAGTRAP_INTEGRATOR_HPP
#define MAGTRAP_INTEGRATOR_HPP

#include <stdexcept>

#include "magtrap/pulse_engine.hpp"

namespace magtrap {

struct DriveModel {
  //! Keep the Ising terms of H_0 switched on, including while pulses play.
  bool include_ising = true;
};

struct IntegrationResult {
  SpinState state;
  double ideal_fidelity = 0.0;  // |<ideal|state>|^2 against apply_schedule
  double norm_drift = 0.0;
  long steps = 0;
};

class StepTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Fixed-step RK4 solution of i d/dt psi = H(t) psi in the interaction frame.
 *
 * During a pulse H = -Omega/2 (e^{-i phi} s+ + e^{i phi} s-) on each addressed
 * ion plus the Ising part of H_0; free segments carry the Ising part only.
 * Each segment is split into ceil(T / step) equal steps.
 */
IntegrationResult integrate_exact(const SpinState& state, const PulseSchedule& schedule,
                                  const CouplingSet& couplings, const DriveModel& drive,
                                  double step);

//! RK4 propagator of a whole segment: the single-step matrix raised to ceil(T/step).
Unitary8 segment_propagator(const Segment& seg, const CouplingSet& couplings,
                            const DriveModel& drive, double step, long* steps = nullptr);

//! Hamiltonian of one segment in the interaction frame (rad/s).
Unitary8 segment_hamiltonian(const Segment& seg, const CouplingSet& couplings,
                             const DriveModel& drive);

}  // namespace magtrap

#endif
