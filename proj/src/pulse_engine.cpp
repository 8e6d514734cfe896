#include "magtrap/pulse_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace magtrap {

namespace {

constexpr double pi = std::numbers::pi;

// Distance of x to the nearest multiple of 2 pi, and that multiple's index.
std::pair<double, long long> wrap_residual(double x) {
  const double n = std::round(x / two_pi);
  return {std::abs(x - two_pi * n), static_cast<long long>(n)};
}

std::string sigma_term(char axis, int ion, bool positive) {
  return std::string("exp(") + (positive ? "+" : "-") + "i pi/4 sigma_" + axis + "," +
         std::to_string(ion) + ")";
}

// w t / 2 reduced to (-pi, pi] in extended precision. Lab-frame phases reach
// 1e9 rad, where a plain double product already loses 1e-7 rad.
double half_phase(double w, double t) {
  constexpr long double two_pi_l = 6.283185307179586476925286766559005768L;
  return static_cast<double>(
      std::remainder(static_cast<long double>(w) * static_cast<long double>(t) / 2.0L, two_pi_l));
}

// exp(-i E_b t), built term by term so that equal Zeeman phases of opposite
// sign cancel exactly when schedules are composed.
Unitary8 diagonal_evolution(const Vec3& w, double J, double J13, double t) {
  Vec3 zeeman;
  for (int i = 0; i < 3; ++i) zeeman[i] = half_phase(w[i], t);
  Unitary8 u = Unitary8::Zero();
  for (int b = 0; b < 8; ++b) {
    const int s1 = spin_sign(b, 1), s2 = spin_sign(b, 2), s3 = spin_sign(b, 3);
    const double ising = (-0.5 * J * (s1 * s2 + s2 * s3) - 0.5 * J13 * s1 * s3) * t;
    u(b, b) = std::exp(cplx{0, -(s1 * zeeman[0] + s2 * zeeman[1] + s3 * zeeman[2] + ising)});
  }
  return u;
}

void push_pulse(PulseSchedule& s, std::vector<int> ions, double angle, double phase,
                const PulseTiming& timing, const std::string& term) {
  s.segments.push_back({make_pulse(std::move(ions), angle, phase, timing), term});
}

void push_free(PulseSchedule& s, double t, const std::string& term) {
  s.segments.push_back({FreeEvolution{t}, term});
}

}  // namespace

double Segment::duration() const {
  return std::visit([](const auto& x) { return x.duration; }, item);
}

double PulseSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration();
  return t;
}

void PulseSchedule::append(const PulseSchedule& other) {
  if (other.frame != frame) throw FrameMismatch("cannot append schedules built for different frames");
  segments.insert(segments.end(), other.segments.begin(), other.segments.end());
}

double PulseSchedule::max_commensuration_residual() const {
  double r = 0.0;
  for (const auto& s : segments)
    if (const auto* p = std::get_if<Pulse>(&s.item))
      for (double x : p->residuals) r = std::max(r, x);
  return r;
}

Commensuration commensurate_pulse(const Vec3& w, double angle, double rabi_nominal,
                                  double tolerance) {
  if (!(w.array() > 0).all()) throw std::invalid_argument("qubit frequencies must be positive");
  if (!(rabi_nominal > 0)) throw std::invalid_argument("nominal Rabi frequency must be positive");
  if (!(angle > 0)) throw std::invalid_argument("rotation angle must be positive");
  const double nominal = angle / rabi_nominal;
  const double lo = 0.8 * nominal, hi = 1.2 * nominal;

  Commensuration best;
  best.max_residual = std::numeric_limits<double>::infinity();
  // Every admissible T that makes one ion exactly periodic is a candidate.
  for (int q = 0; q < 3; ++q) {
    const auto n_lo = static_cast<long long>(std::ceil(lo * w[q] / two_pi));
    const auto n_hi = static_cast<long long>(std::floor(hi * w[q] / two_pi));
    for (long long n = std::max(n_lo, 1LL); n <= n_hi; ++n) {
      const double T = two_pi * static_cast<double>(n) / w[q];
      double worst = 0.0;
      for (int i = 0; i < 3; ++i) worst = std::max(worst, wrap_residual(w[i] * T).first);
      const bool closer = std::abs(T - nominal) < std::abs(best.duration - nominal);
      if (worst < best.max_residual || (worst == best.max_residual && closer)) {
        best.duration = T;
        best.max_residual = worst;
      }
    }
  }
  if (!std::isfinite(best.max_residual) || best.max_residual > tolerance)
    throw CommensurationError("no commensurate pulse length within 20% of nominal; best residual " +
                                  std::to_string(best.max_residual) + " rad",
                              best.max_residual);
  best.rabi = angle / best.duration;
  for (int i = 0; i < 3; ++i) {
    const auto [r, n] = wrap_residual(w[i] * best.duration);
    best.residuals[i] = r;
    best.cycles[i] = n;
  }
  return best;
}

Pulse make_pulse(std::vector<int> ions, double angle, double phase, const PulseTiming& timing) {
  if (ions.empty()) throw std::invalid_argument("pulse needs at least one target ion");
  for (int ion : ions) check_ion(ion);
  Pulse p;
  p.ions = std::move(ions);
  p.angle = angle;
  p.phase = phase;
  p.duration = timing.rabi_frequency > 0 ? angle / timing.rabi_frequency : timing.pulse_time;
  p.rabi = angle / p.duration;
  if (timing.commensurate_with) {
    const Commensuration c =
        commensurate_pulse(*timing.commensurate_with, angle, p.rabi, timing.tolerance);
    p.duration = c.duration;
    p.rabi = c.rabi;
    p.cycles = c.cycles;
    p.residuals = c.residuals;
    p.commensurated = true;
  }
  return p;
}

Matrix2c rotation_2x2(double angle, double phase) {
  const cplx i{0, 1};
  Matrix2c m;
  // e^{-i phi} sigma_+ + e^{i phi} sigma_-, sigma_+ = |1><0|
  m << 0, std::exp(i * phase), std::exp(-i * phase), 0;
  return std::cos(angle / 2) * Matrix2c::Identity() + i * std::sin(angle / 2) * m;
}

Unitary8 single_qubit_rotation(int ion, double angle, double phase) {
  return embed(rotation_2x2(angle, phase), ion);
}

Unitary8 pulse_unitary(const Pulse& pulse) {
  Unitary8 u = Unitary8::Identity();
  for (int ion : pulse.ions) u = single_qubit_rotation(ion, pulse.angle, pulse.phase) * u;
  return u;
}

Unitary8 free_evolution(const CouplingSet& couplings, double t, Frame frame) {
  if (t < 0) throw std::invalid_argument("evolution time must be non-negative");
  const Vec3 w = frame == Frame::Lab ? couplings.qubit_frequencies : Vec3::Zero();
  return diagonal_evolution(w, couplings.J, couplings.J13, t);
}

Unitary8 zeeman_evolution(const Vec3& w, double t) { return diagonal_evolution(w, 0.0, 0.0, t); }

Unitary8 segment_unitary(const Segment& seg, const CouplingSet& couplings, Frame frame) {
  if (const auto* p = std::get_if<Pulse>(&seg.item)) {
    // Ideal pulse: rotation in the rotating frame; in the lab frame the qubits
    // also precess for the pulse length (trivial when commensurated).
    const Unitary8 r = pulse_unitary(*p);
    return frame == Frame::Lab ? Unitary8(zeeman_evolution(couplings.qubit_frequencies, p->duration) * r)
                               : r;
  }
  return free_evolution(couplings, std::get<FreeEvolution>(seg.item).duration, frame);
}

Unitary8 schedule_unitary(const PulseSchedule& schedule, const CouplingSet& couplings) {
  Unitary8 u = Unitary8::Identity();
  for (const auto& seg : schedule.segments) u = segment_unitary(seg, couplings, schedule.frame) * u;
  return u;
}

double pair_coupling(const CouplingSet& couplings, int a, int b) {
  check_ion(a);
  check_ion(b);
  if (a == b) throw std::invalid_argument("pair needs two distinct ions");
  return (std::min(a, b) == 1 && std::max(a, b) == 3) ? couplings.J13 : couplings.J;
}

double refocusing_time(double J) {
  if (!(J > 0)) throw std::invalid_argument("refocused ZZ needs a positive coupling");
  return 7.0 * pi / (2.0 * J);
}

PulseSchedule refocused_zz(const CouplingSet& couplings, Frame frame, std::array<int, 2> pair,
                           const PulseTiming& timing) {
  const double t = refocusing_time(pair_coupling(couplings, pair[0], pair[1]));
  const int spectator = 6 - pair[0] - pair[1];
  std::vector<int> both{std::min(pair[0], pair[1]), std::max(pair[0], pair[1])};
  const std::string term = "exp(-i pi/4 sigma_z," + std::to_string(both[0]) + " sigma_z," +
                           std::to_string(both[1]) + ")";

  PulseSchedule s;
  s.frame = frame;
  for (int half = 0; half < 2; ++half) {
    push_free(s, t / 4, term);
    push_pulse(s, {spectator}, pi, 0.0, timing, term);
    push_free(s, t / 4, term);
    push_pulse(s, both, pi, 0.0, timing, term);
  }
  return s;
}

PulseSchedule composite_z_rotation(int ion, Sense sense, const PulseTiming& timing, Frame frame) {
  check_ion(ion);
  PulseSchedule s;
  s.frame = frame;
  const std::string term = sigma_term('z', ion, sense == Sense::Positive);
  if (sense == Sense::Positive) {
    push_pulse(s, {ion}, 3.5 * pi, pi / 2, timing, term);
    push_pulse(s, {ion}, pi / 2, 0.0, timing, term);
    push_pulse(s, {ion}, pi / 2, pi / 2, timing, term);
  } else {
    // Reverse order, each pulse inverted by shifting its phase by pi.
    push_pulse(s, {ion}, pi / 2, 1.5 * pi, timing, term);
    push_pulse(s, {ion}, pi / 2, pi, timing, term);
    push_pulse(s, {ion}, 3.5 * pi, 1.5 * pi, timing, term);
  }
  return s;
}

PulseSchedule rotation_schedule(int ion, double angle, double phase, const std::string& term,
                                const PulseTiming& timing, Frame frame) {
  PulseSchedule s;
  s.frame = frame;
  push_pulse(s, {ion}, angle, phase, timing, term);
  return s;
}

PulseSchedule build_cnot(int control, int target, const CouplingSet& couplings,
                         const PulseTiming& timing, Frame frame) {
  check_ion(control);
  check_ion(target);
  if (control == target) throw std::invalid_argument("control and target must differ");
  if (!(pair_coupling(couplings, control, target) > 0))
    throw std::invalid_argument("ions " + std::to_string(control) + " and " +
                                std::to_string(target) + " have no positive coupling");

  PulseSchedule s;
  s.frame = frame;
  s.append(rotation_schedule(target, pi / 2, pi / 2, sigma_term('y', target, true), timing, frame));
  s.append(refocused_zz(couplings, frame, {control, target}, timing));
  s.append(composite_z_rotation(target, Sense::Negative, timing, frame));
  s.append(composite_z_rotation(control, Sense::Positive, timing, frame));
  s.append(rotation_schedule(target, 3.5 * pi, pi / 2, sigma_term('y', target, false), timing, frame));
  return s;
}

PulseSchedule hadamard_schedule(int ion, const PulseTiming& timing, Frame frame) {
  PulseSchedule s;
  s.frame = frame;
  s.append(composite_z_rotation(ion, Sense::Positive, timing, frame));
  s.append(composite_z_rotation(ion, Sense::Positive, timing, frame));
  s.append(rotation_schedule(ion, pi / 2, pi / 2, "hadamard", timing, frame));
  for (auto& seg : s.segments) seg.term = "hadamard," + std::to_string(ion);
  return s;
}

Unitary8 cnot_matrix(int control, int target) {
  check_ion(control);
  check_ion(target);
  if (control == target) throw std::invalid_argument("control and target must differ");
  const int cbit = 1 << (3 - control), tbit = 1 << (3 - target);
  Unitary8 u = Unitary8::Zero();
  for (int b = 0; b < 8; ++b) u((b & cbit) ? (b ^ tbit) : b, b) = 1.0;
  return u;
}

Unitary8 hadamard_matrix(int ion) {
  Matrix2c h;
  h << 1, 1, 1, -1;
  return embed(h / std::sqrt(2.0), ion);
}

SpinState apply_unitary(const SpinState& state, const Unitary8& u) {
  SpinState out = state;
  out.amplitudes = u * state.amplitudes;
  return out;
}

SpinState apply_schedule(const SpinState& state, const PulseSchedule& schedule,
                         const CouplingSet& couplings) {
  if (state.frame != schedule.frame)
    throw FrameMismatch(std::string("state is in the ") + to_string(state.frame) +
                        " frame but the schedule targets the " + to_string(schedule.frame) +
                        " frame");
  SpinState out = state;
  for (const auto& seg : schedule.segments)
    out.amplitudes = segment_unitary(seg, couplings, schedule.frame) * out.amplitudes;
  return out;
}

}  // namespace magtrap
