#include "magtrap/spin_state.hpp"

#include <algorithm>
#include <string>

namespace magtrap {

const char* to_string(Frame f) { return f == Frame::Lab ? "lab" : "interaction"; }

void check_ion(int ion) {
  if (ion < 1 || ion > 3)
    throw std::out_of_range("ion index " + std::to_string(ion) + " outside 1..3");
}

SpinState SpinState::basis(int index, Frame frame) {
  if (index < 0 || index > 7) throw std::out_of_range("basis index outside 0..7");
  SpinState s;
  s.amplitudes[index] = 1.0;
  s.frame = frame;
  return s;
}

SpinState SpinState::product(const Vector2c& q1, const Vector2c& q2, const Vector2c& q3,
                             Frame frame) {
  SpinState s;
  s.frame = frame;
  for (int b = 0; b < 8; ++b)
    s.amplitudes[b] = q1[(b >> 2) & 1] * q2[(b >> 1) & 1] * q3[b & 1];
  return s;
}

Matrix2c pauli_x() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2c pauli_y() {
  const cplx i{0, 1};
  Matrix2c m;
  m << 0, i, -i, 0;
  return m;
}

Matrix2c pauli_z() {
  Matrix2c m;
  m << -1, 0, 0, 1;
  return m;
}

Unitary8 embed(const Matrix2c& op, int ion) {
  check_ion(ion);
  const int shift = 3 - ion;
  const int mask = 1 << shift;
  Unitary8 u = Unitary8::Zero();
  for (int row = 0; row < 8; ++row)
    for (int col = 0; col < 8; ++col) {
      if ((row & ~mask) != (col & ~mask)) continue;
      u(row, col) = op((row >> shift) & 1, (col >> shift) & 1);
    }
  return u;
}

bool is_unitary(const Unitary8& u, double tol) {
  return ((u.adjoint() * u - Unitary8::Identity()).cwiseAbs().maxCoeff()) <= tol;
}

namespace {

template <class M>
double phase_distance(const M& a, const M& b) {
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  const cplx ref = b(r, c);
  if (std::abs(ref) == 0.0) return a.cwiseAbs().maxCoeff();
  cplx phase = a(r, c) / ref;
  phase /= std::abs(phase) > 0 ? std::abs(phase) : 1.0;
  return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace

double distance_up_to_phase(const Unitary8& a, const Unitary8& b) { return phase_distance(a, b); }
double distance_up_to_phase(const Amplitudes& a, const Amplitudes& b) {
  return phase_distance(a, b);
}

Eigen::MatrixXcd reduced_density(const Density8& rho, const std::vector<int>& keep) {
  for (int ion : keep) check_ion(ion);
  if (!std::is_sorted(keep.begin(), keep.end()))
    throw std::invalid_argument("kept ions must be ascending");
  const int k = static_cast<int>(keep.size());
  const int dim = 1 << k;
  auto sub_index = [&](int b) {
    int idx = 0;
    for (int ion : keep) idx = (idx << 1) | ((b >> (3 - ion)) & 1);
    return idx;
  };
  int keep_mask = 0;
  for (int ion : keep) keep_mask |= 1 << (3 - ion);

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      if ((a & ~keep_mask) != (b & ~keep_mask)) continue;
      out(sub_index(a), sub_index(b)) += rho(a, b);
    }
  return out;
}

Eigen::MatrixXcd reduced_density(const Amplitudes& psi, const std::vector<int>& keep) {
  return reduced_density(Density8(psi * psi.adjoint()), keep);
}

}  // namespace magtrap
