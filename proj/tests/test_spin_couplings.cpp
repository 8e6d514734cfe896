#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "magtrap/spin_couplings.hpp"
#include "oracles.hpp"

using namespace magtrap;

namespace {

constexpr double MHz = two_pi * 1e6;
constexpr double kHz = two_pi * 1e3;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Pipeline {
  TrapLayout layout;
  EquilibriumSolution eq;
  NormalModes modes;
  FieldConfig field;
  CouplingSet c;
};

Pipeline run(const TrapLayout& L, double gradient) {
  Pipeline p{L, solve_equilibrium(L), {}, {1.0, gradient, 1e-6, true}, {}};
  p.modes = normal_modes(L, p.eq);
  p.c = compute_couplings(p.modes, p.field, p.eq, L.constants);
  return p;
}

}  // namespace

TEST_CASE("couplings of the d = 4 um row against the inverse-Hessian oracle") {
  const auto p = run(TrapLayout::multi_trap(4e-6, 1.37 * MHz, 1.24 * MHz), 500);
  const auto ref = oracle::multi_trap_row(4e-6, 1.37 * MHz, 1.24 * MHz, 500);
  CHECK(rel(p.c.J, ref.J) < 1e-9);
  CHECK(rel(p.c.J13, ref.J13) < 1e-9);
  CHECK(rel(p.c.epsilon_max, ref.eps_max) < 1e-9);
  // tabulated row: J = 0.459, J13 = 0.135 (x 2 pi kHz), eps = 0.034
  CHECK(rel(p.c.J / kHz, 0.459) < 0.03);
  CHECK(rel(p.c.J13 / kHz, 0.135) < 0.04);
  CHECK(rel(p.c.epsilon_max, 0.034) < 0.03);
}

TEST_CASE("couplings over random micro-trap geometries") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(1e-6, 8e-6), w(0.3 * MHz, 3 * MHz), g(10, 1500);
  for (int k = 0; k < 40; ++k) {
    const double dd = d(rng), w1 = w(rng), w2 = w(rng), G = g(rng);
    const auto p = run(TrapLayout::multi_trap(dd, w1, w2), G);
    const Mat3 ref = oracle::couplings_from_hessian(oracle::exact_hessian(p.eq.positions, Vec3(w1, w2, w1)), G);
    CHECK((p.c.ising - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(rel(p.c.ising(0, 1), p.c.ising(1, 2)) < 1e-10);
    CHECK(p.c.J > 0);
    CHECK(p.c.J13 > 0);
  }
}

TEST_CASE("couplings of the linear trap") {
  for (double h : {2e-6, 4e-6, 6e-6}) {
    const double W = oracle::linear_frequency(h);
    const auto p = run(TrapLayout::linear(W), 300);
    const auto ref = oracle::linear_row(W, 300);
    CHECK(rel(p.c.J, ref.J) < 1e-9);
    CHECK(rel(p.c.J13, ref.J13) < 1e-9);
    CHECK(rel(p.c.epsilon_max, ref.eps_max) < 1e-9);
  }
}

TEST_CASE("mode sign flips leave couplings unchanged") {
  auto p = run(TrapLayout::multi_trap(3e-6, 1.1 * MHz, 0.9 * MHz), 700);
  for (int mask = 1; mask < 8; ++mask) {
    NormalModes m = p.modes;
    for (int l = 0; l < 3; ++l)
      if (mask >> l & 1) m.vectors.col(l) *= -1;
    const CouplingSet c = compute_couplings(m, p.field, p.eq, p.layout.constants);
    CHECK((c.ising - p.c.ising).cwiseAbs().maxCoeff() < 1e-14 * p.c.J);
    CHECK(c.epsilon_max == doctest::Approx(p.c.epsilon_max).epsilon(1e-14));
  }
}

TEST_CASE("scaling with the field gradient") {
  const TrapLayout L = TrapLayout::multi_trap(5e-6, 1.2 * MHz, 1.0 * MHz);
  const auto a = run(L, 200), b = run(L, 600);
  CHECK(rel(b.c.J / a.c.J, 9.0) < 1e-12);
  CHECK(rel(b.c.J13 / a.c.J13, 9.0) < 1e-12);
  CHECK(rel(b.c.epsilon_max / a.c.epsilon_max, 3.0) < 1e-12);
  CHECK(run(L, 0).c.J == 0.0);
}

TEST_CASE("effective Lamb-Dicke parameters") {
  auto p = run(TrapLayout::multi_trap(4e-6, 1.37 * MHz, 1.24 * MHz), 500);
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l)
      CHECK(rel(p.c.effective_lamb_dicke(i, l), std::hypot(p.c.epsilon(i, l), 1e-6)) < 1e-12);
  CHECK(p.c.epsilon_max == doctest::Approx(p.c.epsilon.cwiseAbs().maxCoeff()));
}

TEST_CASE("qubit frequencies follow the field along the chain") {
  const auto p = run(TrapLayout::multi_trap(4e-6, 1.37 * MHz, 1.24 * MHz), 500);
  const double slope = 2 * oracle::muB * 500 / oracle::hbar;
  CHECK(rel(p.c.frequency_slope, slope) < 1e-12);
  const Vec3& w = p.c.qubit_frequencies;
  CHECK(rel(w[2] - w[0], 2 * slope * p.eq.spacing) < 1e-9);
  CHECK(rel(w[1] - w[0], w[2] - w[1]) < 1e-9);
  const double centre = two_pi * 12.6428e9 + 2 * oracle::muB * 1.0 / oracle::hbar;
  CHECK(rel(w[1], centre) < 1e-12);
}

TEST_CASE("neighbour resonance shift") {
  const FieldConfig f{1.0, 500, 1e-6, true};
  const double shift = neighbor_resonance_shift(f, 4.628e-6, {}) / MHz;
  CHECK(rel(shift, 2 * oracle::muB * 500 * 4.628e-6 / oracle::hbar / MHz) < 1e-12);
  CHECK(rel(shift, 64.8) < 0.01);
  CHECK_THROWS_AS(neighbor_resonance_shift(f, 0.0, {}), std::invalid_argument);
}

TEST_CASE("spin spectrum equals the diagonal of the explicit Hamiltonian") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 20; ++k) {
    const Vec3 w(u(rng) * 1e6, u(rng) * 1e6, u(rng) * 1e6);
    const double J = u(rng) * 1e4, J13 = u(rng) * 1e4;
    const auto spec = spin_spectrum(CouplingSet::from_values(w, J, J13));
    const oracle::M8 H = oracle::ising(w, J, J13);
    CHECK((H - oracle::M8(H.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    for (int b = 0; b < 8; ++b) CHECK(std::abs(spec.energies[b] - H(b, b).real()) < 1e-9);
  }
  const auto& order = SpinSpectrum::listing_order;
  CHECK(order[1] == 4);  // |100>: ion 1 excited is the most significant bit
  CHECK(order[3] == 1);
}

TEST_CASE("carrier transitions and their spread") {
  const Vec3 w(1.0e6, 1.2e6, 1.4e6);
  const double J = 3e3, J13 = 1e3;
  const auto cs = carrier_spectrum(CouplingSet::from_values(w, J, J13));
  const oracle::M8 H = oracle::ising(w, J, J13);
  for (int ion = 1; ion <= 3; ++ion)
    for (const auto& t : cs.transitions[ion - 1]) {
      // recover the spectator bits from the label and compare to H
      const int a = t.label[1] - '0', b = t.label[6] - '0';
      const int oa = t.label[4] - '0', ob = t.label[9] - '0';
      const int lower = (a << (3 - oa)) | (b << (3 - ob));
      const int upper = lower | (1 << (3 - ion));
      CHECK(std::abs(t.frequency - (H(upper, upper) - H(lower, lower)).real()) < 1e-9);
    }
  CHECK(rel(cs.spread[0], 2 * J + 2 * J13) < 1e-12);
  CHECK(rel(cs.spread[1], 4 * J) < 1e-12);
  CHECK(rel(cs.spread[2], 2 * J + 2 * J13) < 1e-12);
}

TEST_CASE("heating time scales with the fourth power of the size") {
  CHECK(heating_time_scaled(1.0, 1.0, 2.0) == doctest::Approx(16.0));
  CHECK(heating_time_scaled(0.5, 4.0, 2.0) == doctest::Approx(0.5 / 16));
  CHECK_THROWS_AS(heating_time_scaled(1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("field validation") {
  CHECK_THROWS_AS((FieldConfig{1.0, -1.0, 1e-6, true}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((FieldConfig{1.0, 1.0, -1e-6, true}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((FieldConfig{NAN, 1.0, 1e-6, true}.validate()), std::invalid_argument);
}
