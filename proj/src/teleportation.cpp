#include "magtrap/teleportation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace magtrap {

namespace {

constexpr double pi = std::numbers::pi;

// Pure state vector, or a density matrix once dephasing is switched on.
class Register {
 public:
  Register(const SpinState& s, bool mixed) : mixed_(mixed), psi_(s.amplitudes) {
    if (mixed_) rho_ = psi_ * psi_.adjoint();
  }

  void apply(const Unitary8& u) {
    if (mixed_)
      rho_ = u * rho_ * u.adjoint();
    else
      psi_ = u * psi_;
  }

  // Independent phase damping: coherences between basis states that differ on
  // ion i decay as exp(-rate_i dt).
  void dephase(const Vec3& rate, double dt) {
    if (!mixed_ || dt <= 0) return;
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        double k = 0.0;
        for (int ion = 1; ion <= 3; ++ion)
          if (((a ^ b) >> (3 - ion)) & 1) k += rate[ion - 1];
        if (k > 0) rho_(a, b) *= std::exp(-k * dt);
      }
  }

  double trace_norm() const { return mixed_ ? rho_.trace().real() : psi_.squaredNorm(); }

  std::array<double, 4> probabilities() const {
    std::array<double, 4> p{};
    const double n = trace_norm();
    for (int b = 0; b < 8; ++b)
      p[b >> 1] += (mixed_ ? rho_(b, b).real() : std::norm(psi_[b])) / n;
    return p;
  }

  void project(int outcome) {
    for (int b = 0; b < 8; ++b)
      if ((b >> 1) != outcome) {
        if (mixed_) {
          rho_.row(b).setZero();
          rho_.col(b).setZero();
        } else {
          psi_[b] = 0.0;
        }
      }
    const double n = trace_norm();
    if (mixed_)
      rho_ /= n;
    else
      psi_ /= std::sqrt(n);
  }

  bool mixed() const { return mixed_; }
  const Amplitudes& psi() const { return psi_; }
  const Density8& rho() const { return rho_; }

 private:
  bool mixed_;
  Amplitudes psi_;
  Density8 rho_ = Density8::Zero();
};

struct Stage {
  const ProtocolConfig& cfg;
  Register& reg;
  double residual = 0.0;

  // Returns the time spent.
  double run(const Unitary8& ideal, const PulseSchedule& schedule) {
    if (cfg.mode == GateMode::Ideal) {
      reg.apply(ideal);
      return 0.0;
    }
    for (const auto& seg : schedule.segments) {
      if (cfg.mode == GateMode::Scheduled) {
        reg.apply(segment_unitary(seg, cfg.couplings, Frame::Interaction));
      } else {
        reg.apply(segment_propagator(seg, cfg.couplings, cfg.drive, cfg.integrator_step));
        if (std::abs(reg.trace_norm() - 1.0) > 1e-6)
          throw StepTooLarge("norm drift above 1e-6 during integration; use a smaller step");
      }
      reg.dephase(cfg.dephasing_rate, seg.duration());
    }
    residual = std::max(residual, schedule.max_commensuration_residual());
    return schedule.total_duration();
  }
};

void check_outcome(int outcome) {
  if (outcome < 0 || outcome > 3)
    throw std::out_of_range("measurement outcome must be 0..3 (2 b1 + b2)");
}

void check_normalized(cplx alpha, cplx beta) {
  const double n = std::norm(alpha) + std::norm(beta);
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-9)
    throw std::invalid_argument("input amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
}

// Inverse-CDF draw over the four outcomes; zero-weight branches are never picked.
int sample_outcome(const std::array<double, 4>& p, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  int pick = -1;
  for (int k = 0; k < 4; ++k) {
    if (p[k] <= 0) continue;
    pick = k;
    acc += p[k];
    if (u < acc) break;
  }
  if (pick < 0) throw std::runtime_error("state has no weight on ions 1 and 2");
  return pick;
}

Vector2c dominant_eigenvector(const Matrix2c& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(rho);
  Vector2c v = es.eigenvectors().col(1);
  // Fix the global phase so the larger component is real and positive.
  const int k = std::abs(v[0]) >= std::abs(v[1]) ? 0 : 1;
  return v * (std::abs(v[k]) / v[k]);
}

}  // namespace

const char* to_string(GateMode m) {
  switch (m) {
    case GateMode::Ideal: return "ideal";
    case GateMode::Scheduled: return "scheduled";
    case GateMode::Integrated: return "integrated";
  }
  return "?";
}

GateMode parse_gate_mode(const std::string& s) {
  if (s == "ideal") return GateMode::Ideal;
  if (s == "scheduled") return GateMode::Scheduled;
  if (s == "integrated") return GateMode::Integrated;
  throw std::invalid_argument("unknown gate mode '" + s + "' (ideal|scheduled|integrated)");
}

const char* to_string(Correction c) {
  switch (c) {
    case Correction::SigmaX: return "sigma_x";
    case Correction::Identity: return "I";
    case Correction::ISigmaY: return "i sigma_y";
    case Correction::SigmaZ: return "sigma_z";
  }
  return "?";
}

Correction correction_for(int outcome) {
  check_outcome(outcome);
  static constexpr Correction table[4] = {Correction::SigmaX, Correction::Identity,
                                          Correction::ISigmaY, Correction::SigmaZ};
  return table[outcome];
}

Matrix2c correction_matrix(Correction c) {
  Matrix2c m;
  switch (c) {
    case Correction::SigmaX: m << 0, 1, 1, 0; break;
    case Correction::Identity: m << 1, 0, 0, 1; break;
    case Correction::ISigmaY: m << 0, 1, -1, 0; break;
    case Correction::SigmaZ: m << 1, 0, 0, -1; break;
  }
  return m;
}

PulseSchedule correction_schedule(Correction c, const PulseTiming& timing) {
  const std::string term = std::string("correction ") + to_string(c);
  PulseSchedule s;
  switch (c) {
    case Correction::SigmaX:
      s.append(rotation_schedule(3, pi, 0.0, term, timing));
      break;
    case Correction::Identity:
      break;
    case Correction::ISigmaY:
      s.append(rotation_schedule(3, pi, pi / 2, term, timing));
      break;
    case Correction::SigmaZ:
      // U(pi, pi/2) U(pi, 0) is proportional to diag(1, -1).
      s.append(rotation_schedule(3, pi, 0.0, term, timing));
      s.append(rotation_schedule(3, pi, pi / 2, term, timing));
      break;
  }
  return s;
}

void ProtocolConfig::validate() const {
  check_normalized(alpha, beta);
  if (!(dephasing_rate.array() >= 0).all() || !dephasing_rate.allFinite())
    throw std::invalid_argument("dephasing rates must be non-negative and finite");
  if (forced_outcome) check_outcome(*forced_outcome);
  if (!(integrator_step > 0)) throw std::invalid_argument("integrator step must be positive");
  if (mode != GateMode::Ideal && !(couplings.J > 0))
    throw std::invalid_argument("scheduled and integrated modes need a positive coupling J");
}

std::string TeleportRecord::bits() const {
  return std::string{static_cast<char>('0' + (outcome >> 1)), static_cast<char>('0' + (outcome & 1))};
}

SpinState prepare_initial(cplx alpha, cplx beta) {
  check_normalized(alpha, beta);
  const double r = 1.0 / std::sqrt(2.0);
  return SpinState::product(Vector2c(alpha, beta), Vector2c(r, r), Vector2c(0, 1));
}

SpinState entangle_23(const SpinState& state) { return apply_unitary(state, cnot_matrix(2, 3)); }

SpinState encode_and_rotate(const SpinState& state) {
  return apply_unitary(state, hadamard_matrix(1) * cnot_matrix(1, 2));
}

std::array<double, 4> outcome_probabilities(const SpinState& state) {
  return Register(state, false).probabilities();
}

Measurement project_ions12(const SpinState& state, int outcome) {
  check_outcome(outcome);
  Measurement m;
  m.outcome = outcome;
  m.probability = outcome_probabilities(state)[outcome];
  if (!(m.probability > 0))
    throw std::runtime_error("outcome " + std::to_string(outcome) + " has zero probability");
  Register reg(state, false);
  reg.project(outcome);
  m.collapsed = state;
  m.collapsed.amplitudes = reg.psi();
  return m;
}

Measurement measure_ions12(const SpinState& state, std::mt19937_64& rng) {
  return project_ions12(state, sample_outcome(outcome_probabilities(state), rng));
}

SpinState bob_correct(const SpinState& state, int outcome) {
  return apply_unitary(state, embed(correction_matrix(correction_for(outcome)), 3));
}

Vector2c qubit3_of(const SpinState& collapsed, int outcome) {
  check_outcome(outcome);
  Vector2c v(collapsed.amplitudes[2 * outcome], collapsed.amplitudes[2 * outcome + 1]);
  const double n = v.norm();
  if (!(n > 0)) throw std::runtime_error("state carries no weight on the measured branch");
  return v / n;
}

double fidelity(const Vector2c& output, cplx alpha, cplx beta) {
  const cplx overlap = std::conj(alpha) * output[0] + std::conj(beta) * output[1];
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

double fidelity(const Matrix2c& rho, cplx alpha, cplx beta) {
  const Vector2c t(alpha, beta);
  return std::clamp((t.adjoint() * rho * t)(0, 0).real(), 0.0, 1.0);
}

void check_correction_table() {
  const cplx alpha{0.6, 0.0}, beta{0.0, 0.8};
  const SpinState s = encode_and_rotate(entangle_23(prepare_initial(alpha, beta)));
  for (int k = 0; k < 4; ++k) {
    const SpinState out = bob_correct(project_ions12(s, k).collapsed, k);
    if (fidelity(qubit3_of(out, k), alpha, beta) < 1.0 - 1e-12)
      throw std::logic_error(std::string("correction ") + to_string(correction_for(k)) +
                             " does not undo outcome " + std::to_string(k));
  }
}

TeleportRecord run_teleport(const ProtocolConfig& config) {
#ifndef NDEBUG
  static const bool table_ok = (check_correction_table(), true);
  (void)table_ok;
#endif
  config.validate();
  TeleportRecord rec;
  rec.config = config;

  const bool mixed = (config.dephasing_rate.array() > 0).any() && config.mode != GateMode::Ideal;
  Register reg(prepare_initial(config.alpha, config.beta), mixed);
  Stage stage{config, reg};
  const PulseTiming& tm = config.timing;
  const bool timed = config.mode != GateMode::Ideal;

  // Schedules are only built when they will be played; ideal mode never
  // needs a positive coupling.
  auto cnot = [&](int c, int t) {
    return timed ? build_cnot(c, t, config.couplings, tm) : PulseSchedule{};
  };

  rec.durations.entangle = stage.run(cnot_matrix(2, 3), cnot(2, 3));
  rec.durations.encode = stage.run(cnot_matrix(1, 2), cnot(1, 2));
  rec.durations.encode += stage.run(hadamard_matrix(1),
                                    timed ? hadamard_schedule(1, tm) : PulseSchedule{});

  const auto p = reg.probabilities();
  if (config.forced_outcome) {
    rec.outcome = *config.forced_outcome;
  } else {
    std::mt19937_64 rng(config.seed);
    rec.outcome = sample_outcome(p, rng);
  }
  rec.outcome_probability = p[rec.outcome];
  if (!(rec.outcome_probability > 1e-15))
    throw std::runtime_error("outcome " + std::to_string(rec.outcome) + " has zero probability");
  reg.project(rec.outcome);

  rec.correction = correction_for(rec.outcome);
  rec.durations.correct = stage.run(embed(correction_matrix(rec.correction), 3),
                                    correction_schedule(rec.correction, tm));
  rec.durations.total = rec.durations.entangle + rec.durations.encode + rec.durations.correct;
  rec.max_commensuration_residual = stage.residual;

  if (reg.mixed()) {
    rec.output_density = reduced_density(reg.rho(), {3});
    rec.output = dominant_eigenvector(rec.output_density);
    rec.fidelity = fidelity(rec.output_density, config.alpha, config.beta);
  } else {
    SpinState collapsed;
    collapsed.amplitudes = reg.psi();
    rec.output = qubit3_of(collapsed, rec.outcome);
    rec.output_density = rec.output * rec.output.adjoint();
    rec.fidelity = fidelity(rec.output, config.alpha, config.beta);
  }
  return rec;
}

nlohmann::ordered_json to_json(const TeleportRecord& r) {
  using nlohmann::ordered_json;
  auto c2 = [](cplx z) { return ordered_json::array({z.real(), z.imag()}); };
  const ProtocolConfig& c = r.config;

  ordered_json cfg;
  cfg["alpha"] = c2(c.alpha);
  cfg["beta"] = c2(c.beta);
  cfg["mode"] = to_string(c.mode);
  cfg["seed"] = c.seed;
  cfg["dephasing_rate_per_s"] = {c.dephasing_rate[0], c.dephasing_rate[1], c.dephasing_rate[2]};
  cfg["J_rad_per_s"] = c.couplings.J;
  cfg["J13_rad_per_s"] = c.couplings.J13;
  cfg["pulse_time_s"] = c.timing.pulse_time;
  cfg["rabi_frequency_rad_per_s"] = c.timing.rabi_frequency;
  cfg["commensurated"] = c.timing.commensurate_with.has_value();
  cfg["forced_outcome"] = c.forced_outcome ? ordered_json(*c.forced_outcome) : ordered_json(nullptr);
  cfg["integrator_step_s"] = c.integrator_step;

  ordered_json j;
  j["outcome"] = r.bits();
  j["correction"] = to_string(r.correction);
  j["outcome_probability"] = r.outcome_probability;
  j["fidelity"] = r.fidelity;
  j["output"] = {c2(r.output[0]), c2(r.output[1])};
  j["durations_s"] = {{"entangle", r.durations.entangle},
                      {"encode", r.durations.encode},
                      {"correct", r.durations.correct},
                      {"total", r.durations.total}};
  j["max_commensuration_residual_rad"] = r.max_commensuration_residual;
  j["seed"] = c.seed;
  j["config"] = cfg;
  return j;
}

}  // namespace magtrap
