// Independent reference computations for the test suites. Nothing here calls
// into the library beyond its plain data types.
#ifndef MAGTRAP_TESTS_ORACLES_HPP
#define MAGTRAP_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using M8 = Eigen::Matrix<cplx, 8, 8>;
using V8 = Eigen::Matrix<cplx, 8, 1>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2 * pi;

// CODATA 2018, 171Yb+.
inline constexpr double e = 1.602176634e-19;
inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double muB = 9.2740100783e-24;
inline constexpr double mass = 170.936 * 1.66053906660e-27;
inline const double kC = e * e / (4 * pi * eps0);

// ------------------------------------------------------------------ spins
// Index basis (|0>, |1>) with sigma_z |1> = +|1>.
inline M2 sz() { M2 m; m << -1, 0, 0, 1; return m; }
inline M2 sx() { M2 m; m << 0, 1, 1, 0; return m; }
inline M2 splus() { M2 m; m << 0, 0, 1, 0; return m; }  // |1><0|
inline M2 id2() { return M2::Identity(); }

//! op1 (x) op2 (x) op3 with ion 1 the most significant factor.
inline M8 kron3(const M2& a, const M2& b, const M2& c) {
  Eigen::MatrixXcd ab = Eigen::kroneckerProduct(a, b);
  return Eigen::kroneckerProduct(ab, c);
}

inline M8 on(int ion, const M2& op) {
  return kron3(ion == 1 ? op : id2(), ion == 2 ? op : id2(), ion == 3 ? op : id2());
}

inline M8 expm(const M8& a) { return a.exp(); }
inline M2 expm2(const M2& a) { return a.exp(); }

//! exp[i theta/2 (e^{-i phi} s+ + e^{i phi} s-)] by matrix exponential.
inline M2 rotation(double theta, double phi) {
  const cplx i{0, 1};
  const M2 gen = std::exp(-i * phi) * splus() + std::exp(i * phi) * splus().adjoint();
  return expm2(i * (theta / 2) * gen);
}

inline M8 ising(const Eigen::Vector3d& w, double J, double J13) {
  const M8 z1 = on(1, sz()), z2 = on(2, sz()), z3 = on(3, sz());
  return 0.5 * (w[0] * z1 + w[1] * z2 + w[2] * z3) - 0.5 * J * (z1 * z2 + z2 * z3) - 0.5 * J13 * z1 * z3;
}

//! exp(-i pi/4 sz_a sz_b).
inline M8 zz_quarter(int a, int b) {
  return expm(cplx{0, -pi / 4} * on(a, sz()) * on(b, sz()));
}

//! Permutation matrix of CNOT, built bit by bit.
inline M8 cnot(int control, int target) {
  M8 u = M8::Zero();
  for (int col = 0; col < 8; ++col) {
    int bits[3] = {(col >> 2) & 1, (col >> 1) & 1, col & 1};
    if (bits[control - 1]) bits[target - 1] ^= 1;
    u(4 * bits[0] + 2 * bits[1] + bits[2], col) = 1;
  }
  return u;
}

//! max |a - e^{i chi} b| minimised over the global phase chi (via the trace).
inline double phase_distance(const M8& a, const M8& b) {
  const cplx t = (b.adjoint() * a).trace();
  const cplx ph = std::abs(t) > 0 ? t / std::abs(t) : cplx{1, 0};
  return (a - ph * b).cwiseAbs().maxCoeff();
}

inline Eigen::Vector2cd haar_qubit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Vector2cd v(cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
  return v / v.norm();
}

// ------------------------------------------------------------------ trap
// Ions at (-h, 0, h) by symmetry; force balance on ion 3 in its own well.
inline double multi_trap_displacement(double d, double w_outer) {
  auto f = [&](double delta) {
    const double h = d + delta;
    return -mass * w_outer * w_outer * delta + kC / (h * h) + kC / (4 * h * h);
  };
  double lo = 0.0, hi = 10 * d;  // f(lo) > 0, f(hi) < 0
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double linear_trap_spacing(double w) {
  return std::cbrt(5.0 / 4.0) * std::cbrt(kC / (mass * w * w));
}

inline double potential(const Eigen::Vector3d& z, const Eigen::Vector3d& centers, const Eigen::Vector3d& w) {
  double u = 0;
  for (int i = 0; i < 3; ++i) u += 0.5 * mass * w[i] * w[i] * (z[i] - centers[i]) * (z[i] - centers[i]);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) u += kC / std::abs(z[i] - z[j]);
  return u;
}

//! Second derivatives of the potential by central differences of the energy.
inline Eigen::Matrix3d fd_hessian(const Eigen::Vector3d& z, const Eigen::Vector3d& c, const Eigen::Vector3d& w,
                                  double step) {
  Eigen::Matrix3d H;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto at = [&](double si, double sj) {
        Eigen::Vector3d y = z;
        y[i] += si * step;
        y[j] += sj * step;
        return potential(y, c, w);
      };
      H(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * step * step);
    }
  return H;
}

//! Closed-form Hessian of the harmonic-plus-Coulomb potential.
inline Eigen::Matrix3d exact_hessian(const Eigen::Vector3d& z, const Eigen::Vector3d& w) {
  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) H(i, i) = mass * w[i] * w[i];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double c = 2 * kC / std::pow(std::abs(z[i] - z[j]), 3);
      H(i, i) += c;
      H(i, j) -= c;
    }
  return H;
}

//! Ising couplings via the inverse Hessian: sum_l D D /(m nu^2) = (H^-1)_ij.
inline Eigen::Matrix3d couplings_from_hessian(const Eigen::Matrix3d& H, double gradient) {
  const double dwdz = 2 * muB * gradient / hbar;
  return 0.5 * hbar * dwdz * dwdz * H.inverse();
}

struct Row {
  double displacement, spacing, J, J13, eps_max;
  Eigen::Vector3d nu;
};

//! Full symmetric pipeline: bisection equilibrium, closed-form Hessian,
//! eigen-decomposition for nu and eps.
inline Row evaluate(const Eigen::Vector3d& z, const Eigen::Vector3d& w, double gradient) {
  Row r;
  r.spacing = z[1] - z[0];
  const Eigen::Matrix3d H = exact_hessian(z, w);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H / mass);
  r.nu = es.eigenvalues().cwiseSqrt();
  const Eigen::Matrix3d Jm = couplings_from_hessian(H, gradient);
  r.J = Jm(0, 1);
  r.J13 = Jm(0, 2);
  const double dwdz = 2 * muB * gradient / hbar;
  r.eps_max = 0;
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      r.eps_max = std::max(r.eps_max, std::abs(es.eigenvectors()(i, l)) * std::sqrt(hbar / (2 * mass * r.nu[l])) *
                                          dwdz / r.nu[l]);
  r.displacement = 0;
  return r;
}

inline Row multi_trap_row(double d, double w1, double w2, double gradient) {
  const double delta = multi_trap_displacement(d, w1);
  const double h = d + delta;
  Row r = evaluate(Eigen::Vector3d(-h, 0, h), Eigen::Vector3d(w1, w2, w1), gradient);
  r.displacement = delta;
  return r;
}

inline Row linear_row(double w, double gradient) {
  const double h = linear_trap_spacing(w);
  return evaluate(Eigen::Vector3d(-h, 0, h), Eigen::Vector3d(w, w, w), gradient);
}

//! W that gives spacing h in one harmonic trap.
inline double linear_frequency(double h) { return std::sqrt(5 * kC / (4 * mass * h * h * h)); }

}  // namespace oracle

#endif
