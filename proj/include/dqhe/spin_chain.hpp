#pragma once

// Open Heisenberg (XYZ) chain of spin-1/2 qubits in a uniform field:
//   H = - sum_j h.sigma_j + sum_j (Jx sx_j sx_j+1 + Jy sy_j sy_j+1 + Jz sz_j sz_j+1)
// Basis states are tensor products with qubit 0 as the most significant factor,
// |0> = spin up (sigma_z = +1).

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <vector>

#include "dqhe/circuit.hpp"

namespace dqhe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Axis { X, Y, Z };

struct MagneticField {
  double h = 0.0;      // rad/ns, >= 0
  double theta = 0.0;  // polar angle
  double phi = 0.0;    // azimuth

  Eigen::Vector3d vector() const;
  /// d(vector)/d(theta) and d(vector)/d(phi)
  Eigen::Vector3d d_theta() const;
  Eigen::Vector3d d_phi() const;
};

struct SpinChainSpec {
  int n = 1;
  std::vector<CouplingStrengths> bonds;  // n - 1 nearest-neighbour bonds
  MagneticField field;

  void validate() const;
  /// Uniform chain: every bond carries the same couplings.
  static SpinChainSpec uniform(int n, const CouplingStrengths& bond, const MagneticField& field = {});
  /// Mean isotropic proxy over bonds; 0 for a single qubit.
  double jbar() const;
};

/// sigma_axis acting on one qubit (0-based site) of an n-qubit register.
Matrix pauli_string(int n, int site, Axis axis);

/// Full Hamiltonian of the chain.
Matrix build_hamiltonian(const SpinChainSpec& spec);

/// Precomputed operator pieces for fast re-assembly of H at any field
/// orientation. Immutable after construction.
class ChainOperators {
 public:
  ChainOperators(int n, const std::vector<CouplingStrengths>& bonds);

  int qubits() const { return n_; }
  Eigen::Index dim() const { return interaction_.rows(); }

  /// H for the given field.
  Matrix hamiltonian(const MagneticField& field) const;
  void hamiltonian_into(const MagneticField& field, Matrix& out) const;
  /// out = H psi without assembling H.
  void apply(const MagneticField& field, const Vector& psi, Vector& out) const;
  /// Analytic derivatives of H with respect to theta and phi.
  Matrix d_theta(const MagneticField& field) const;
  Matrix d_phi(const MagneticField& field) const;

  const Matrix& interaction() const { return interaction_; }
  const Matrix& total(Axis axis) const;
  const Matrix& site(int j, Axis axis) const;

 private:
  Matrix field_term(const Eigen::Vector3d& direction) const;

  using Sparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

  int n_;
  Matrix interaction_;
  Sparse sparse_interaction_, sparse_x_, sparse_y_, sparse_z_;
  Matrix total_x_, total_y_, total_z_;
  std::vector<Matrix> site_x_, site_y_, site_z_;
};

struct Spectrum {
  Eigen::VectorXd energies;  // ascending
  Matrix states;             // columns are orthonormal eigenvectors
  double gap() const { return energies.size() > 1 ? energies(1) - energies(0) : 0.0; }
};

/// Dense Hermitian eigensolver. Throws std::invalid_argument when H deviates
/// from Hermitian by more than 1e-12 relative.
Spectrum diagonalize(const Matrix& H);

struct GroundState {
  Vector state;
  double energy = 0.0;
  // Set when the lowest level is (near-)degenerate and the all-up overlap
  // tie-break picked the state.
  bool degenerate = false;
};

GroundState ground_state(const Matrix& H);

/// <psi|op|psi> for Hermitian op (real part).
double expectation(const Vector& psi, const Matrix& op);

}  // namespace dqhe
