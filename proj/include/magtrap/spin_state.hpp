#ifndef MAGTRAP_SPIN_STATE_HPP
#define MAGTRAP_SPIN_STATE_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace magtrap {

using cplx = std::complex<double>;
using Amplitudes = Eigen::Matrix<cplx, 8, 1>;
using Unitary8 = Eigen::Matrix<cplx, 8, 8>;
using Density8 = Eigen::Matrix<cplx, 8, 8>;
using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;

//! Lab frame keeps the 1/2 w_i sigma_z terms; interaction frame drops them.
enum class Frame { Lab, Interaction };

const char* to_string(Frame f);

class FrameMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/**
 * Three-qubit register. Basis |b1 b2 b3> has index 4 b1 + 2 b2 + b3, so ion 1
 * is the most significant bit.
 */
struct SpinState {
  Amplitudes amplitudes = Amplitudes::Zero();
  Frame frame = Frame::Interaction;

  static SpinState basis(int index, Frame frame = Frame::Interaction);
  static SpinState product(const Vector2c& q1, const Vector2c& q2, const Vector2c& q3,
                           Frame frame = Frame::Interaction);
  double norm() const { return amplitudes.norm(); }
};

// Pauli matrices in the spin convention sigma_z|1> = +|1>, sigma_+ = |1><0|.
// In the (|0>, |1>) index basis this makes sigma_z = diag(-1, 1) and
// sigma_y = [[0, i], [-i, 0]].
Matrix2c pauli_x();
Matrix2c pauli_y();
Matrix2c pauli_z();

//! Lift a 2x2 operator on `ion` (1..3) to the register.
Unitary8 embed(const Matrix2c& op, int ion);

bool is_unitary(const Unitary8& u, double tol = 1e-10);

//! max |a - e^{i phi} b| with phi chosen on the largest entry of b.
double distance_up_to_phase(const Unitary8& a, const Unitary8& b);
double distance_up_to_phase(const Amplitudes& a, const Amplitudes& b);

//! Reduced density matrix of the listed ions (1..3, ascending), traced over the rest.
Eigen::MatrixXcd reduced_density(const Density8& rho, const std::vector<int>& keep);
Eigen::MatrixXcd reduced_density(const Amplitudes& psi, const std::vector<int>& keep);

void check_ion(int ion);

}  // namespace magtrap

#endif
