#pragma once

// Fixed-size linear algebra for the two-qubit dimer.
//
// Basis order is |00>, |01>, |10>, |11> with the left qubit as the most
// significant bit, so amplitude index k = 2*left + right.

#include <array>
#include <complex>

#include "dimer/angles.hpp"

namespace dimer {

using Complex = std::complex<double>;

struct PureState4 {
  std::array<Complex, 4> amplitudes{};

  Complex& operator[](int k) { return amplitudes[k]; }
  const Complex& operator[](int k) const { return amplitudes[k]; }

  double norm_squared() const;
  PureState4 normalized() const;

  static PureState4 basis(int k);
  /// cos(theta_l/2)|0> + i sin(theta_l/2)|1>, tensored with the same for R.
  static PureState4 product(AngleState angles);
};

Complex inner(const PureState4& bra, const PureState4& ket);

/// Row-major 4x4 complex matrix.
struct Operator4 {
  std::array<Complex, 16> entries{};

  Complex& operator()(int row, int col) { return entries[4 * row + col]; }
  const Complex& operator()(int row, int col) const {
    return entries[4 * row + col];
  }

  static Operator4 identity();
  static Operator4 zero();
  static Operator4 diagonal(const std::array<double, 4>& d);

  Operator4 adjoint() const;
  bool is_diagonal(double tol = 0.0) const;
};

Operator4 operator*(const Operator4& a, const Operator4& b);
Operator4 operator+(const Operator4& a, const Operator4& b);
Operator4 operator*(double s, const Operator4& a);
PureState4 operator*(const Operator4& a, const PureState4& v);

/// max_ij |a_ij - b_ij|
double max_abs_diff(const Operator4& a, const Operator4& b);

/// max |A - A^dagger|
double hermiticity_defect(const Operator4& a);

/// Tensor product of single-qubit operators, left factor first.
Operator4 kron(const std::array<Complex, 4>& left,
               const std::array<Complex, 4>& right);

namespace ops {
Operator4 sigma_x_left();
Operator4 sigma_x_right();
Operator4 n_left();
Operator4 n_right();
Operator4 n_both();
/// omega_s (sigma^x_L + sigma^x_R)
Operator4 system_hamiltonian(double omega_s);
}  // namespace ops

/// The four back-actions of one measurement step: M0 (no click), M1 (left
/// click), M2 (right click), M3 (joint click). All four are diagonal.
struct KrausSet {
  std::array<Operator4, 4> m{};
  /// Diagonals of m, cached for the trajectory hot loops.
  std::array<std::array<double, 4>, 4> diag{};
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double dt = 0.0;

  /// max |sum_r M_r^dagger M_r - I|
  double completeness_defect() const;
};

/// Builds M1 = sqrt(p1) n_L, M2 = sqrt(p1) n_R, M3 = sqrt(p2) n_L n_R and
/// M0 = sqrt(I - M1^2 - M2^2 - M3^2) with p1 = gamma1 dt, p2 = gamma2 dt.
/// Throws ValidationError when (2 gamma1 + gamma2) dt > 1.
KrausSet build_kraus(double gamma1, double gamma2, double dt);

/// Exact detector-model back-actions M_(i,j,k) = M_dL,i M_dR,j M_dB,k for
/// ancilla couplings j1 (on-site detectors) and j2 (bond detector). Index is
/// 4*i + 2*j + k.
std::array<Operator4, 8> detector_kraus(double j1, double j2, double dt);

/// exp(-i H_S dt) for H_S = omega_s (sigma^x_L + sigma^x_R), in closed form.
Operator4 propagator(double omega_s, double dt);

/// Born probabilities <psi|M_r^dagger M_r|psi>. Throws ValidationError when
/// the state norm deviates from one by more than 1e-9.
std::array<double, 4> born_probabilities(const PureState4& state,
                                         const KrausSet& kraus);

struct ReducedBloch {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double purity = 1.0;
};

ReducedBloch reduced_bloch(const PureState4& state, Site site);

/// atan2(y, z) in (-pi, pi]. Throws UndefinedAngleError when y^2 + z^2 is
/// at most 1e-14.
double bloch_angle(const ReducedBloch& b);

/// Von Neumann entropy (bits) of the left reduced density matrix.
double entanglement_entropy(const PureState4& state);

/// Entropy of one reduced density matrix; used to check Schmidt symmetry.
double entanglement_entropy(const PureState4& state, Site traced_in);

}  // namespace dimer
