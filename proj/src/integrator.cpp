#include "magtrap/integrator.hpp"

#include <cmath>

namespace magtrap {

Unitary8 segment_hamiltonian(const Segment& seg, const CouplingSet& couplings,
                             const DriveModel& drive) {
  Unitary8 h = Unitary8::Zero();
  if (drive.include_ising)
    for (int b = 0; b < 8; ++b) h(b, b) = spin_energy(Vec3::Zero(), couplings.J, couplings.J13, b);
  if (const auto* p = std::get_if<Pulse>(&seg.item)) {
    const cplx i{0, 1};
    Matrix2c m;
    m << 0, std::exp(i * p->phase), std::exp(-i * p->phase), 0;
    for (int ion : p->ions) h -= 0.5 * p->rabi * embed(m, ion);
  }
  return h;
}

namespace {

struct StepMatrix {
  Unitary8 prop;
  long steps = 0;
};

StepMatrix rk4_step(const Segment& seg, const CouplingSet& couplings, const DriveModel& drive,
                    double step) {
  const double T = seg.duration();
  const long n = std::max(1L, static_cast<long>(std::ceil(T / step - 1e-9)));
  const double h = T / static_cast<double>(n);
  // H is constant within a segment, so one classical RK4 step is the
  // truncated series I + A + A^2/2 + A^3/6 + A^4/24 with A = -i H h.
  const Unitary8 a = cplx{0, -1} * h * segment_hamiltonian(seg, couplings, drive);
  const Unitary8 a2 = a * a;
  const Unitary8 a3 = a2 * a;
  return {Unitary8::Identity() + a + a2 / 2.0 + a3 / 6.0 + a3 * a / 24.0, n};
}

}  // namespace

Unitary8 segment_propagator(const Segment& seg, const CouplingSet& couplings,
                            const DriveModel& drive, double step, long* steps) {
  if (!(step > 0)) throw std::invalid_argument("integration step must be positive");
  Unitary8 out = Unitary8::Identity();
  if (seg.duration() <= 0) return out;
  const StepMatrix m = rk4_step(seg, couplings, drive, step);
  // Repeated squaring keeps long free segments cheap.
  Unitary8 base = m.prop;
  for (long n = m.steps; n > 0; n >>= 1) {
    if (n & 1) out = base * out;
    base = base * base;
  }
  if (steps) *steps += m.steps;
  return out;
}

IntegrationResult integrate_exact(const SpinState& state, const PulseSchedule& schedule,
                                  const CouplingSet& couplings, const DriveModel& drive,
                                  double step) {
  if (state.frame != Frame::Interaction || schedule.frame != Frame::Interaction)
    throw FrameMismatch("the integrator works in the interaction frame only");
  if (!(step > 0)) throw std::invalid_argument("integration step must be positive");

  IntegrationResult r;
  Amplitudes psi = state.amplitudes;
  for (const auto& seg : schedule.segments) {
    if (seg.duration() <= 0) continue;
    const StepMatrix m = rk4_step(seg, couplings, drive, step);
    for (long k = 0; k < m.steps; ++k) psi = m.prop * psi;
    r.steps += m.steps;
  }

  r.norm_drift = std::abs(psi.norm() - state.amplitudes.norm());
  if (r.norm_drift > 1e-6)
    throw StepTooLarge("norm drifted by " + std::to_string(r.norm_drift) +
                       "; use a smaller integration step");
  r.state = state;
  r.state.amplitudes = psi;
  const SpinState ideal = apply_schedule(state, schedule, couplings);
  r.ideal_fidelity = std::norm(ideal.amplitudes.dot(psi)) /
                     (ideal.amplitudes.squaredNorm() * psi.squaredNorm());
  return r;
}

}  // namespace magtrap
