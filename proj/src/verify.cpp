#include "magtrap/verify.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "magtrap/integrator.hpp"
#include "magtrap/schedule_io.hpp"
#include "magtrap/teleportation.hpp"

namespace magtrap {

namespace {

constexpr double pi = std::numbers::pi;

struct Suite {
  std::vector<CheckResult> results;

  void run(const std::string& name, double tol, const std::function<double()>& body) {
    CheckResult r;
    r.name = name;
    r.tolerance = tol;
    try {
      r.worst = body();
      r.passed = std::isfinite(r.worst) && r.worst <= tol;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = e.what();
    }
    results.push_back(r);
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TrapLayout random_multi(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(2e-6, 8e-6), w(two_pi * 0.5e6, two_pi * 3e6);
  return TrapLayout::multi_trap(d(rng), w(rng), w(rng));
}

CouplingSet random_couplings(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> j(two_pi * 50, two_pi * 2e3), w(two_pi * 12.9e9, two_pi * 13.1e9);
  return CouplingSet::from_values(Vec3(w(rng), w(rng), w(rng)), j(rng), j(rng));
}

Vector2c random_qubit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vector2c v(cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
  return v / v.norm();
}

Unitary8 zz_target(int a, int b) {
  Unitary8 u = Unitary8::Zero();
  for (int s = 0; s < 8; ++s) u(s, s) = std::exp(cplx{0, -pi / 4 * spin_sign(s, a) * spin_sign(s, b)});
  return u;
}

double worst_unitarity(const PulseSchedule& s, const CouplingSet& c) {
  double worst = 0.0;
  for (const auto& seg : s.segments) {
    const Unitary8 u = segment_unitary(seg, c, s.frame);
    worst = std::max(worst, (u.adjoint() * u - Unitary8::Identity()).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

std::vector<CheckResult> run_verify(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Suite suite;

  suite.run("equilibrium gradient below 1e-9 of the Coulomb force scale", 1e-9, [&] {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const TrapLayout L = random_multi(rng);
      const auto eq = solve_equilibrium(L);
      const double scale = L.constants.coulomb_constant() / (eq.spacing * eq.spacing);
      worst = std::max(worst, potential_gradient(L, eq.positions).cwiseAbs().maxCoeff() / scale);
    }
    return worst;
  });

  suite.run("equilibrium reflection symmetric", 1e-12, [&] {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const auto eq = solve_equilibrium(random_multi(rng));
      const Vec3& z = eq.positions;
      worst = std::max(worst, std::abs(z[0] + z[2] - 2 * z[1]) / eq.spacing);
    }
    return worst;
  });

  suite.run("linear-trap spacing matches closed form", 1e-10, [&] {
    std::uniform_real_distribution<double> w(two_pi * 0.2e6, two_pi * 3e6);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const TrapLayout L = TrapLayout::linear(w(rng));
      const auto eq = solve_equilibrium(L);
      worst = std::max(worst, rel(eq.spacing, linear_chain_half_length(L.trap_frequencies[0], L.constants)));
    }
    return worst;
  });

  suite.run("analytic Hessian matches finite differences", 1e-6, [&] {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const TrapLayout L = random_multi(rng);
      const auto eq = solve_equilibrium(L);
      const Mat3 H = potential_hessian(L, eq.positions);
      const double step = 1e-5 * eq.spacing;
      for (int j = 0; j < 3; ++j) {
        Vec3 zp = eq.positions, zm = eq.positions;
        zp[j] += step;
        zm[j] -= step;
        const Vec3 col = (potential_gradient(L, zp) - potential_gradient(L, zm)) / (2 * step);
        worst = std::max(worst, (col - H.col(j)).cwiseAbs().maxCoeff() / H.cwiseAbs().maxCoeff());
      }
    }
    return worst;
  });

  suite.run("mode matrix orthogonal and reconstructs the Hessian", 1e-10, [&] {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const TrapLayout L = random_multi(rng);
      const auto eq = solve_equilibrium(L);
      const auto m = normal_modes(L, eq);
      const Mat3& D = m.vectors;
      const Mat3 H = potential_hessian(L, eq.positions);
      const Mat3 R = D * (L.constants.ion_mass() * m.frequencies.array().square()).matrix().asDiagonal() *
                     D.transpose();
      worst = std::max(worst, (D.transpose() * D - Mat3::Identity()).cwiseAbs().maxCoeff());
      worst = std::max(worst, (R - H).cwiseAbs().maxCoeff() / H.cwiseAbs().maxCoeff());
    }
    return worst;
  });

  suite.run("couplings invariant under mode sign flips, J12 = J23", 1e-10, [&] {
    std::uniform_real_distribution<double> g(10.0, 1500.0);
    std::bernoulli_distribution flip;
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const TrapLayout L = random_multi(rng);
      const auto eq = solve_equilibrium(L);
      auto modes = normal_modes(L, eq);
      FieldConfig f;
      f.gradient = g(rng);
      const CouplingSet a = compute_couplings(modes, f, eq, L.constants);
      for (int c = 0; c < 3; ++c)
        if (flip(rng)) modes.vectors.col(c) *= -1.0;
      const CouplingSet b = compute_couplings(modes, f, eq, L.constants);
      worst = std::max(worst, (a.ising - b.ising).cwiseAbs().maxCoeff() / a.ising.cwiseAbs().maxCoeff());
      worst = std::max(worst, rel(a.ising(0, 1), a.ising(1, 2)));
    }
    return worst;
  });

  suite.run("spectrum equals the diagonal of the explicit spin Hamiltonian", 1e-12, [&] {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const CouplingSet c = random_couplings(rng);
      Unitary8 H = Unitary8::Zero();
      const Unitary8 z1 = embed(pauli_z(), 1), z2 = embed(pauli_z(), 2), z3 = embed(pauli_z(), 3);
      const Vec3& w = c.qubit_frequencies;
      H = 0.5 * (w[0] * z1 + w[1] * z2 + w[2] * z3) - 0.5 * c.J * (z1 * z2 + z2 * z3) -
          0.5 * c.J13 * z1 * z3;
      const auto s = spin_spectrum(c);
      for (int b = 0; b < 8; ++b) worst = std::max(worst, rel(s.energies[b], H(b, b).real()));
    }
    return worst;
  });

  suite.run("carrier frequencies are spectrum differences", 1e-12, [&] {
    const CouplingSet c = random_couplings(rng);
    const auto s = spin_spectrum(c);
    const auto cs = carrier_spectrum(c);
    double worst = 0.0;
    for (int ion = 1; ion <= 3; ++ion)
      for (const auto& t : cs.transitions[ion - 1]) {
        const int bit = 1 << (3 - ion);
        // Rebuild the basis index from the two other ions' bits, lower ion first.
        int b0 = 0, k = 1;
        for (int other = 3; other >= 1; --other) {
          if (other == ion) continue;
          if ((t.other_bits >> (k == 1 ? 0 : 1)) & 1) b0 |= 1 << (3 - other);
          ++k;
        }
        worst = std::max(worst, rel(t.frequency, s.energies[b0 | bit] - s.energies[b0]));
      }
    return worst;
  });

  suite.run("refocused ZZ exact in the lab frame (100 random coupling sets)", 1e-9, [&] {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const CouplingSet c = random_couplings(rng);
      const auto s = refocused_zz(c, Frame::Lab);
      worst = std::max(worst, distance_up_to_phase(schedule_unitary(s, c), zz_target(2, 3)));
    }
    return worst;
  });

  suite.run("CNOT schedules equal CNOT in both orientations", 1e-9, [&] {
    // Lab frame needs pulses commensurate with every qubit, so there the
    // frequencies are exact multiples of 2 pi / t_m.
    std::uniform_int_distribution<long> cycles(32000, 33000);
    const double tm = kDefaultPulseTime;
    CouplingSet c = random_couplings(rng);
    CouplingSet lab = c;
    for (int i = 0; i < 3; ++i) lab.qubit_frequencies[i] = two_pi * static_cast<double>(cycles(rng)) / tm;
    double worst = 0.0;
    for (auto [ct, tg] : {std::pair{2, 3}, {3, 2}, {1, 2}, {2, 1}}) {
      const auto si = build_cnot(ct, tg, c);
      const auto sl = build_cnot(ct, tg, lab, {}, Frame::Lab);
      worst = std::max(worst, distance_up_to_phase(schedule_unitary(si, c), cnot_matrix(ct, tg)));
      worst = std::max(worst, distance_up_to_phase(schedule_unitary(sl, lab), cnot_matrix(ct, tg)));
    }
    return worst;
  });

  suite.run("composite z rotations and their inverses", 1e-9, [&] {
    const CouplingSet c = random_couplings(rng);
    double worst = 0.0;
    for (int ion = 1; ion <= 3; ++ion) {
      Matrix2c rz;
      rz << std::exp(cplx{0, -pi / 4}), 0, 0, std::exp(cplx{0, pi / 4});  // exp(+i pi/4 sz)
      const auto pos = composite_z_rotation(ion, Sense::Positive);
      const auto neg = composite_z_rotation(ion, Sense::Negative);
      worst = std::max(worst, distance_up_to_phase(schedule_unitary(pos, c), embed(rz, ion)));
      worst = std::max(worst, distance_up_to_phase(schedule_unitary(neg, c), embed(rz.adjoint(), ion)));
    }
    return worst;
  });

  suite.run("every emitted segment unitary", 1e-10, [&] {
    const CouplingSet c = random_couplings(rng);
    double worst = 0.0;
    for (Frame f : {Frame::Interaction, Frame::Lab}) {
      worst = std::max(worst, worst_unitarity(build_cnot(2, 3, c, {}, f), c));
      worst = std::max(worst, worst_unitarity(build_cnot(1, 2, c, {}, f), c));
      worst = std::max(worst, worst_unitarity(hadamard_schedule(1, {}, f), c));
    }
    for (int k = 0; k < 4; ++k) worst = std::max(worst, worst_unitarity(correction_schedule(correction_for(k)), c));
    return worst;
  });

  suite.run("ideal teleportation fidelity (250 inputs x 4 outcomes)", 1e-9, [&] {
    double worst = 0.0;
    for (int k = 0; k < 250; ++k) {
      const Vector2c q = random_qubit(rng);
      const SpinState s = encode_and_rotate(entangle_23(prepare_initial(q[0], q[1])));
      for (int o = 0; o < 4; ++o) {
        const SpinState out = bob_correct(project_ions12(s, o).collapsed, o);
        worst = std::max(worst, 1.0 - fidelity(qubit3_of(out, o), q[0], q[1]));
      }
    }
    return worst;
  });

  suite.run("measurement branches each carry probability 1/4", 1e-12, [&] {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vector2c q = random_qubit(rng);
      const auto p = outcome_probabilities(encode_and_rotate(entangle_23(prepare_initial(q[0], q[1]))));
      for (double x : p) worst = std::max(worst, std::abs(x - 0.25));
    }
    return worst;
  });

  suite.run("ion 3 carries no input information before correction", 1e-10, [&] {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vector2c q = random_qubit(rng);
      const SpinState s = encode_and_rotate(entangle_23(prepare_initial(q[0], q[1])));
      const Eigen::MatrixXcd r3 = reduced_density(s.amplitudes, {3});
      worst = std::max(worst, (r3 - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff());
      const Eigen::MatrixXcd r12 = reduced_density(s.amplitudes, {1, 2});
      for (int b = 0; b < 4; ++b) worst = std::max(worst, std::abs(r12(b, b) - 0.25));
    }
    return worst;
  });

  suite.run("integrator without Ising terms reproduces ideal pulses", 1e-8, [&] {
    std::uniform_real_distribution<double> a(0.1, 4 * pi), ph(0, 2 * pi);
    const CouplingSet c = random_couplings(rng);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const auto s = rotation_schedule(1 + k % 3, a(rng), ph(rng), "check");
      const Vector2c q = random_qubit(rng);
      const SpinState in = SpinState::product(q, random_qubit(rng), random_qubit(rng));
      const auto r = integrate_exact(in, s, c, DriveModel{false}, 1e-9);
      worst = std::max(worst, 1.0 - r.ideal_fidelity);
    }
    return worst;
  });

  suite.run("schedule text round trip", 1e-9, [&] {
    const CouplingSet c = random_couplings(rng);
    const auto s = build_cnot(2, 3, c);
    std::stringstream io;
    write_schedule(io, s);
    const auto back = read_schedule(io);
    double worst = back.frame == s.frame ? 0.0 : 1.0;
    worst = std::max(worst, std::abs(back.total_duration() - s.total_duration()) / s.total_duration());
    worst = std::max(worst, distance_up_to_phase(schedule_unitary(back, c), schedule_unitary(s, c)));
    return worst;
  });

  return suite.results;
}

}  // namespace magtrap
