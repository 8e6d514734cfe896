#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "magtrap/trap_model.hpp"
#include "oracles.hpp"

using namespace magtrap;

namespace {

constexpr double MHz = two_pi * 1e6;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TrapLayout d4() { return TrapLayout::multi_trap(4e-6, 1.37 * MHz, 1.24 * MHz); }

}  // namespace

TEST_CASE("potential: ions at their own centres feel only Coulomb repulsion") {
  const TrapLayout L = TrapLayout::multi_trap(1.0, 1.0 * MHz, 1.0 * MHz);
  const double u = total_potential(L, L.centers);
  CHECK(rel(u, oracle::kC * (1 + 1 + 0.5)) < 1e-12);
}

TEST_CASE("potential: reflection z -> -z leaves a symmetric layout unchanged") {
  const TrapLayout L = d4();
  const Vec3 z(-4.3e-6, 0.2e-6, 4.9e-6);
  const Vec3 mirrored(-z[2], -z[1], -z[0]);
  CHECK(rel(total_potential(L, mirrored), total_potential(L, z)) < 1e-13);
}

TEST_CASE("potential: coincident or unordered ions are rejected") {
  const TrapLayout L = d4();
  CHECK_THROWS_AS(total_potential(L, Vec3(0, 0, 1e-6)), std::domain_error);
  CHECK_THROWS_AS(total_potential(L, Vec3(1e-6, 0, 2e-6)), std::domain_error);
}

TEST_CASE("layout validation") {
  CHECK_THROWS_AS(TrapLayout::multi_trap(-1e-6, MHz, MHz).validate(), std::invalid_argument);
  CHECK_THROWS_AS(TrapLayout::multi_trap(4e-6, 0.0, MHz).validate(), std::invalid_argument);
  TrapLayout bad = d4();
  bad.trap_frequencies[2] *= 1.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = d4();
  bad.centers[2] += 1e-7;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  PhysicalConstants c;
  c.ion_mass_u = 50;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("equilibrium of the d = 4 um micro-trap row") {
  const auto eq = solve_equilibrium(d4());
  const double delta = oracle::multi_trap_displacement(4e-6, 1.37 * MHz);
  CHECK(rel(eq.outer_displacement, delta) < 1e-9);
  CHECK(rel(eq.spacing, 4e-6 + delta) < 1e-9);
  CHECK(rel(eq.spacing, 4.628e-6) < 0.01);  // reference row value
  CHECK(std::abs(eq.positions[1]) < 1e-12 * eq.spacing);
}

TEST_CASE("equilibrium: gradient vanishes by finite differences of the energy") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(1e-6, 8e-6), w(0.3 * MHz, 3 * MHz);
  for (int k = 0; k < 30; ++k) {
    const TrapLayout L = TrapLayout::multi_trap(d(rng), w(rng), w(rng));
    const auto eq = solve_equilibrium(L);
    const double s = 2e-6 * eq.spacing;
    const double scale = oracle::kC / (eq.spacing * eq.spacing);
    for (int i = 0; i < 3; ++i) {
      Vec3 p = eq.positions, m = eq.positions;
      p[i] += s;
      m[i] -= s;
      const double g = (oracle::potential(p, L.centers, L.trap_frequencies) -
                        oracle::potential(m, L.centers, L.trap_frequencies)) / (2 * s);
      CHECK(std::abs(g) / scale < 1e-9);
    }
    CHECK(std::abs(eq.positions[0] + eq.positions[2] - 2 * eq.positions[1]) < 1e-12 * eq.spacing);
  }
}

TEST_CASE("linear trap: spacing against the closed form") {
  for (double w : {0.1, 0.342, 0.628, 1.77, 4.0}) {
    const auto eq = solve_equilibrium(TrapLayout::linear(w * MHz));
    CHECK(rel(eq.spacing, oracle::linear_trap_spacing(w * MHz)) < 1e-10);
  }
  // W = 0.628 x2pi MHz sits near h = 4 um
  CHECK(rel(solve_equilibrium(TrapLayout::linear(0.628 * MHz)).spacing, 4e-6) < 0.01);
  CHECK(rel(TrapLayout::linear_frequency_for_spacing(4e-6), oracle::linear_frequency(4e-6)) < 1e-12);
}

TEST_CASE("far-apart wells: ions stay at their centres") {
  const TrapLayout L = TrapLayout::multi_trap(1.0, 2 * MHz, 2 * MHz);
  const auto eq = solve_equilibrium(L);
  CHECK((eq.positions - L.centers).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("analytic Hessian matches finite differences of the energy") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(1e-6, 8e-6), w(0.3 * MHz, 3 * MHz);
  for (int k = 0; k < 20; ++k) {
    const TrapLayout L = TrapLayout::multi_trap(d(rng), w(rng), w(rng));
    const auto eq = solve_equilibrium(L);
    const Mat3 H = potential_hessian(L, eq.positions);
    const Mat3 F = oracle::fd_hessian(eq.positions, L.centers, L.trap_frequencies, 4e-4 * eq.spacing);
    CHECK((H - F).cwiseAbs().maxCoeff() / H.cwiseAbs().maxCoeff() < 1e-6);
    CHECK((H - oracle::exact_hessian(eq.positions, L.trap_frequencies)).cwiseAbs().maxCoeff() /
              H.cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("normal modes of the d = 4 um row") {
  const TrapLayout L = d4();
  const auto eq = solve_equilibrium(L);
  const auto m = normal_modes(L, eq);
  const auto ref = oracle::multi_trap_row(4e-6, 1.37 * MHz, 1.24 * MHz, 500);
  for (int l = 0; l < 3; ++l) CHECK(rel(m.frequencies[l], ref.nu[l]) < 1e-9);
  const double published[3] = {1.32, 1.54, 1.70};
  for (int l = 0; l < 3; ++l) CHECK(rel(m.frequencies[l] / MHz, published[l]) < 0.02);
}

TEST_CASE("normal modes: linear trap closed form") {
  const double W = 0.8 * MHz;
  const TrapLayout L = TrapLayout::linear(W);
  const auto m = normal_modes(L, solve_equilibrium(L));
  CHECK(rel(m.frequencies[0], W) < 1e-9);
  CHECK(rel(m.frequencies[1], std::sqrt(3.0) * W) < 1e-9);
  CHECK(rel(m.frequencies[2], std::sqrt(29.0 / 5.0) * W) < 1e-9);
  // Sign rule: largest entry positive, ties to the highest ion index.
  const Vec3 c0 = Vec3(1, 1, 1) / std::sqrt(3.0);
  const Vec3 c1 = Vec3(-1, 0, 1) / std::sqrt(2.0);
  const Vec3 c2 = Vec3(-1, 2, -1) / std::sqrt(6.0);
  CHECK((m.vectors.col(0) - c0).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((m.vectors.col(1) - c1).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((m.vectors.col(2) - c2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("normal modes: orthogonality and Hessian reconstruction") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(1e-6, 8e-6), w(0.3 * MHz, 3 * MHz);
  for (int k = 0; k < 30; ++k) {
    const TrapLayout L = TrapLayout::multi_trap(d(rng), w(rng), w(rng));
    const auto eq = solve_equilibrium(L);
    const auto m = normal_modes(L, eq);
    const Mat3& D = m.vectors;
    CHECK((D.transpose() * D - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    const Mat3 H = potential_hessian(L, eq.positions);
    const Mat3 R = D * (oracle::mass * m.frequencies.array().square()).matrix().asDiagonal() * D.transpose();
    CHECK((R - H).cwiseAbs().maxCoeff() / H.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(m.frequencies[0] <= m.frequencies[1]);
    CHECK(m.frequencies[1] <= m.frequencies[2]);
    for (int c = 0; c < 3; ++c) {
      // antisymmetric mode has equal outer entries; the later one wins
      const double big = D.col(c).cwiseAbs().maxCoeff();
      int r = 2;
      while (std::abs(D(r, c)) < big * (1 - 1e-9)) --r;
      CHECK(D(r, c) > 0);
    }
  }
}

TEST_CASE("mode sign fixing prefers the highest index on ties") {
  Mat3 v;
  v << -1, 0.5, 0.2, 0, 0.5, 0.3, 1, -0.1, -0.9;
  fix_mode_signs(v);
  CHECK(v(2, 0) == doctest::Approx(1.0));
  CHECK(v(0, 0) == doctest::Approx(-1.0));
  CHECK(v(1, 1) == doctest::Approx(0.5));
  CHECK(v(2, 2) == doctest::Approx(0.9));
}
