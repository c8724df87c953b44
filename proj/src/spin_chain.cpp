#include "dqhe/spin_chain.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dqhe {

namespace {

Matrix single_pauli(Axis axis) {
  Matrix s(2, 2);
  const Complex i(0.0, 1.0);
  switch (axis) {
    case Axis::X: s << 0.0, 1.0, 1.0, 0.0; break;
    case Axis::Y: s << 0.0, -i, i, 0.0; break;
    case Axis::Z: s << 1.0, 0.0, 0.0, -1.0; break;
  }
  return s;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

double operator_norm(const Matrix& H) {
  // Frobenius norm bounds the spectral norm from above and is cheap.
  return H.norm();
}

}  // namespace

Eigen::Vector3d MagneticField::vector() const {
  return h * Eigen::Vector3d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                             std::cos(theta));
}

Eigen::Vector3d MagneticField::d_theta() const {
  return h * Eigen::Vector3d(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                             -std::sin(theta));
}

Eigen::Vector3d MagneticField::d_phi() const {
  return h * Eigen::Vector3d(-std::sin(theta) * std::sin(phi), std::sin(theta) * std::cos(phi), 0.0);
}

void SpinChainSpec::validate() const {
  if (n < 1) throw std::invalid_argument("spin chain needs at least one qubit");
  if (static_cast<int>(bonds.size()) != n - 1) {
    throw std::invalid_argument("open chain of " + std::to_string(n) + " qubits needs " +
                                std::to_string(n - 1) + " bonds, got " +
                                std::to_string(bonds.size()));
  }
  if (field.h < 0.0) throw std::invalid_argument("field amplitude must be non-negative");
}

SpinChainSpec SpinChainSpec::uniform(int n, const CouplingStrengths& bond,
                                     const MagneticField& field) {
  SpinChainSpec spec;
  spec.n = n;
  spec.bonds.assign(n > 1 ? n - 1 : 0, bond);
  spec.field = field;
  return spec;
}

double SpinChainSpec::jbar() const {
  if (bonds.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& b : bonds) sum += b.jbar();
  return sum / static_cast<double>(bonds.size());
}

Matrix pauli_string(int n, int site, Axis axis) {
  if (n < 1) throw std::invalid_argument("register needs at least one qubit");
  if (site < 0 || site >= n) {
    throw std::out_of_range("site " + std::to_string(site) + " outside a register of " +
                            std::to_string(n) + " qubits");
  }
  Matrix out = Matrix::Identity(1, 1);
  const Matrix id = Matrix::Identity(2, 2);
  const Matrix s = single_pauli(axis);
  for (int k = 0; k < n; ++k) out = kron(out, k == site ? s : id);
  return out;
}

ChainOperators::ChainOperators(int n, const std::vector<CouplingStrengths>& bonds) : n_(n) {
  SpinChainSpec{n, bonds, {}}.validate();
  const Eigen::Index dim = Eigen::Index(1) << n;
  interaction_ = Matrix::Zero(dim, dim);
  total_x_ = total_y_ = total_z_ = Matrix::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    site_x_.push_back(pauli_string(n, j, Axis::X));
    site_y_.push_back(pauli_string(n, j, Axis::Y));
    site_z_.push_back(pauli_string(n, j, Axis::Z));
    total_x_ += site_x_.back();
    total_y_ += site_y_.back();
    total_z_ += site_z_.back();
  }
  for (int j = 0; j + 1 < n; ++j) {
    const auto& b = bonds[static_cast<std::size_t>(j)];
    interaction_ += b.Jx * site_x_[j] * site_x_[j + 1];
    interaction_ += b.Jy * site_y_[j] * site_y_[j + 1];
    interaction_ += b.Jz * site_z_[j] * site_z_[j + 1];
  }
  sparse_interaction_ = interaction_.sparseView();
  sparse_x_ = total_x_.sparseView();
  sparse_y_ = total_y_.sparseView();
  sparse_z_ = total_z_.sparseView();
}

Matrix ChainOperators::field_term(const Eigen::Vector3d& d) const {
  return -(d.x() * total_x_ + d.y() * total_y_ + d.z() * total_z_);
}

Matrix ChainOperators::hamiltonian(const MagneticField& field) const {
  Matrix out;
  hamiltonian_into(field, out);
  return out;
}

void ChainOperators::hamiltonian_into(const MagneticField& field, Matrix& out) const {
  const Eigen::Vector3d h = field.vector();
  out = interaction_;
  out.noalias() -= h.x() * total_x_;
  out.noalias() -= h.y() * total_y_;
  out.noalias() -= h.z() * total_z_;
}

void ChainOperators::apply(const MagneticField& field, const Vector& psi, Vector& out) const {
  const Eigen::Vector3d h = field.vector();
  out.noalias() = sparse_interaction_ * psi;
  if (h.x() != 0.0) out.noalias() -= h.x() * (sparse_x_ * psi);
  if (h.y() != 0.0) out.noalias() -= h.y() * (sparse_y_ * psi);
  if (h.z() != 0.0) out.noalias() -= h.z() * (sparse_z_ * psi);
}

Matrix ChainOperators::d_theta(const MagneticField& field) const {
  return field_term(field.d_theta());
}

Matrix ChainOperators::d_phi(const MagneticField& field) const {
  return field_term(field.d_phi());
}

const Matrix& ChainOperators::total(Axis axis) const {
  switch (axis) {
    case Axis::X: return total_x_;
    case Axis::Y: return total_y_;
    case Axis::Z: break;
  }
  return total_z_;
}

const Matrix& ChainOperators::site(int j, Axis axis) const {
  const auto idx = static_cast<std::size_t>(j);
  switch (axis) {
    case Axis::X: return site_x_.at(idx);
    case Axis::Y: return site_y_.at(idx);
    case Axis::Z: break;
  }
  return site_z_.at(idx);
}

Matrix build_hamiltonian(const SpinChainSpec& spec) {
  spec.validate();
  return ChainOperators(spec.n, spec.bonds).hamiltonian(spec.field);
}

Spectrum diagonalize(const Matrix& H) {
  if (H.rows() != H.cols()) throw std::invalid_argument("Hamiltonian must be square");
  const double scale = std::max(operator_norm(H), 1e-300);
  if ((H - H.adjoint()).norm() > 1e-12 * scale) {
    throw std::invalid_argument("Hamiltonian is not Hermitian within 1e-12 relative");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(H);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

GroundState ground_state(const Matrix& H) {
  const Spectrum spec = diagonalize(H);
  const double scale = spec.energies.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * scale;

  GroundState gs;
  gs.energy = spec.energies(0);
  Eigen::Index deg = 1;
  while (deg < spec.energies.size() && spec.energies(deg) - spec.energies(0) <= tol) ++deg;

  if (deg == 1) {
    gs.state = spec.states.col(0);
    return gs;
  }

  // Degenerate level: take the projection of |up...up> onto the subspace.
  gs.degenerate = true;
  const Matrix sub = spec.states.leftCols(deg);
  Vector all_up = Vector::Zero(H.rows());
  all_up(0) = 1.0;
  Vector projected = sub * (sub.adjoint() * all_up);
  if (projected.norm() < 1e-12) {
    gs.state = spec.states.col(0);
  } else {
    gs.state = projected / projected.norm();
  }
  return gs;
}

double expectation(const Vector& psi, const Matrix& op) {
  return psi.dot(op * psi).real();
}

}  // namespace dqhe
