#ifndef MAGTRAP_TELEPORTATION_HPP
#define MAGTRAP_TELEPORTATION_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include <json.hpp>

#include "magtrap/integrator.hpp"
#include "magtrap/pulse_engine.hpp"

namespace magtrap {

enum class GateMode { Ideal, Scheduled, Integrated };

const char* to_string(GateMode m);
GateMode parse_gate_mode(const std::string& s);

//! Bob's correction on ion 3, indexed by the two-bit outcome 2 b1 + b2.
enum class Correction { SigmaX, Identity, ISigmaY, SigmaZ };

const char* to_string(Correction c);
Correction correction_for(int outcome);
//! Computational-basis matrix: sigma_x, I, [[0,1],[-1,0]], diag(1,-1).
Matrix2c correction_matrix(Correction c);
//! Microwave realization, equal to correction_matrix up to global phase.
PulseSchedule correction_schedule(Correction c, const PulseTiming& timing = {});

struct ProtocolConfig {
  cplx alpha{1.0, 0.0};
  cplx beta{0.0, 0.0};
  GateMode mode = GateMode::Ideal;
  std::uint64_t seed = 0;
  Vec3 dephasing_rate = Vec3::Zero();  // 1/s per ion, phase damping of coherences
  CouplingSet couplings;               // only J, J13 matter (interaction frame)
  PulseTiming timing;
  std::optional<int> forced_outcome;   // 0..3, skips sampling
  double integrator_step = 1e-8;       // s
  DriveModel drive;

  void validate() const;
};

struct StageDurations {
  double entangle = 0.0;  // CNOT(2,3)
  double encode = 0.0;    // CNOT(1,2) and Hadamard on ion 1
  double correct = 0.0;
  double total = 0.0;
};

struct TeleportRecord {
  int outcome = 0;  // 2 b1 + b2
  Correction correction = Correction::Identity;
  double outcome_probability = 0.0;
  Vector2c output = Vector2c::Zero();  // qubit 3, pure or dominant eigenvector
  Matrix2c output_density = Matrix2c::Zero();
  double fidelity = 0.0;
  StageDurations durations;
  double max_commensuration_residual = 0.0;
  ProtocolConfig config;

  std::string bits() const;
};

//! (alpha|0> + beta|1>) (|0> + |1>)/sqrt2 |1>.
SpinState prepare_initial(cplx alpha, cplx beta);

// Ideal gate stages.
SpinState entangle_23(const SpinState& state);
SpinState encode_and_rotate(const SpinState& state);

struct Measurement {
  int outcome = 0;
  SpinState collapsed;
  double probability = 0.0;
};

//! Probabilities of the four |b1 b2> outcomes, index 2 b1 + b2.
std::array<double, 4> outcome_probabilities(const SpinState& state);
Measurement project_ions12(const SpinState& state, int outcome);
Measurement measure_ions12(const SpinState& state, std::mt19937_64& rng);
SpinState bob_correct(const SpinState& state, int outcome);

//! Ion 3 amplitudes of a state already collapsed onto |b1 b2>.
Vector2c qubit3_of(const SpinState& collapsed, int outcome);

double fidelity(const Vector2c& output, cplx alpha, cplx beta);
double fidelity(const Matrix2c& rho, cplx alpha, cplx beta);

//! Throws std::logic_error if some correction does not undo its branch.
void check_correction_table();

TeleportRecord run_teleport(const ProtocolConfig& config);

nlohmann::ordered_json to_json(const TeleportRecord& record);

}  // namespace magtrap

#endif
