#ifndef MAGTRAP_PULSE_ENGINE_HPP
#define MAGTRAP_PULSE_ENGINE_HPP

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "magtrap/spin_couplings.hpp"
#include "magtrap/spin_state.hpp"

namespace magtrap {

//! Default single-rotation time used for schedule accounting.
inline constexpr double kDefaultPulseTime = 2.5e-6;

/**
 * Microwave rotation U(theta, phi) = exp[i theta/2 (e^{-i phi} s+ + e^{i phi} s-)]
 * applied simultaneously to every ion in `ions`.
 *
 * `rabi * duration == angle` unless the duration was commensurated, in which
 * case rabi is rescaled so the identity still holds.
 */
struct Pulse {
  std::vector<int> ions;  // 1..3
  double angle = 0.0;     // rad
  double phase = 0.0;     // rad
  double rabi = 0.0;      // rad/s
  double duration = 0.0;  // s
  bool commensurated = false;
  std::array<long long, 3> cycles{};     // N_i with w_i T ~ 2 pi N_i
  std::array<double, 3> residuals{};     // |w_i T - 2 pi N_i|, rad
};

struct FreeEvolution {
  double duration = 0.0;  // s
};

struct Segment {
  std::variant<Pulse, FreeEvolution> item;
  std::string term;  // which factor of the gate this segment belongs to

  double duration() const;
  bool is_pulse() const { return std::holds_alternative<Pulse>(item); }
};

struct PulseSchedule {
  Frame frame = Frame::Interaction;
  std::vector<Segment> segments;

  double total_duration() const;
  void append(const PulseSchedule& other);
  double max_commensuration_residual() const;
};

struct PulseTiming {
  double pulse_time = kDefaultPulseTime;  // t_m, used when rabi_frequency == 0
  double rabi_frequency = 0.0;            // if > 0, T = theta / Omega
  std::optional<Vec3> commensurate_with;  // qubit frequencies, rad/s
  double tolerance = 1e-3;                // rad, per pulse
};

struct Commensuration {
  double duration = 0.0;
  double rabi = 0.0;
  std::array<long long, 3> cycles{};
  std::array<double, 3> residuals{};
  double max_residual = 0.0;
};

class CommensurationError : public std::runtime_error {
 public:
  CommensurationError(const std::string& what, double best)
      : std::runtime_error(what), best_residual_(best) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

//! Pulse length near theta/Omega_nominal (within +-20%) with every w_i T close
//! to a multiple of 2 pi. Throws when the best residual exceeds `tolerance`.
Commensuration commensurate_pulse(const Vec3& w, double angle, double rabi_nominal,
                                  double tolerance = 1e-3);

Pulse make_pulse(std::vector<int> ions, double angle, double phase, const PulseTiming& timing);

Unitary8 single_qubit_rotation(int ion, double angle, double phase);
Matrix2c rotation_2x2(double angle, double phase);
Unitary8 pulse_unitary(const Pulse& pulse);
Unitary8 free_evolution(const CouplingSet& couplings, double t, Frame frame);
//! Zeeman-only precession exp(-i sum_i w_i sigma_z,i t / 2).
Unitary8 zeeman_evolution(const Vec3& w, double t);
Unitary8 segment_unitary(const Segment& seg, const CouplingSet& couplings, Frame frame);
Unitary8 schedule_unitary(const PulseSchedule& schedule, const CouplingSet& couplings);

//! Coupling strength acting on an ion pair: J for neighbours, J13 for (1,3).
double pair_coupling(const CouplingSet& couplings, int a, int b);

/**
 * Free-evolution time that turns exp(+i J t/2 sz sz) into exp(-i pi/4 sz sz).
 *
 * The Ising term -J/2 sz sz evolves as exp(+i J t/2 sz sz), so the target is
 * J t/2 = -pi/4 mod pi. The first positive solution is J t/2 = 7 pi/4.
 */
double refocusing_time(double J);

/**
 * exp(-i pi/4 sz_a sz_b) from four quarter intervals of free evolution with
 * pi pulses on the spectator and on the pair between them. Every other term of
 * H_0 changes sign an even number of times and cancels, in either frame.
 */
PulseSchedule refocused_zz(const CouplingSet& couplings, Frame frame,
                           std::array<int, 2> pair = {2, 3},
                           const PulseTiming& timing = {});

enum class Sense { Positive, Negative };

//! exp(+i pi/4 sz) (Positive) or its inverse from three pulses on one ion.
PulseSchedule composite_z_rotation(int ion, Sense sense, const PulseTiming& timing = {},
                                   Frame frame = Frame::Interaction);

//! Single pulse U(theta, phi) on one ion, wrapped as a schedule.
PulseSchedule rotation_schedule(int ion, double angle, double phase, const std::string& term,
                                const PulseTiming& timing = {},
                                Frame frame = Frame::Interaction);

/**
 * CNOT(control, target) in the NMR form
 *   exp(-i pi/4 sy_t) exp(+i pi/4 sz_c) exp(-i pi/4 sz_t) exp(-i pi/4 sz_c sz_t) exp(+i pi/4 sy_t)
 * (rightmost first). The target z rotation carries the minus sign required by
 * the sigma_z|1> = +|1> convention used throughout.
 */
PulseSchedule build_cnot(int control, int target, const CouplingSet& couplings,
                         const PulseTiming& timing = {}, Frame frame = Frame::Interaction);

//! Hadamard up to global phase: two composite z rotations, then U(pi/2, pi/2).
PulseSchedule hadamard_schedule(int ion, const PulseTiming& timing = {},
                                Frame frame = Frame::Interaction);

Unitary8 cnot_matrix(int control, int target);
Unitary8 hadamard_matrix(int ion);

SpinState apply_unitary(const SpinState& state, const Unitary8& u);
SpinState apply_schedule(const SpinState& state, const PulseSchedule& schedule,
                         const CouplingSet& couplings);

}  // namespace magtrap

#endif
