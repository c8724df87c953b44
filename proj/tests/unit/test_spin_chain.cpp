#include <doctest.h>

#include <algorithm>
#include <random>

#include "../support/oracles.hpp"
#include "dqhe/spin_chain.hpp"
#include "dqhe/units.hpp"

using namespace dqhe;

namespace {

double relative_hermiticity_error(const Matrix& H) { return (H - H.adjoint()).norm() / std::max(H.norm(), 1e-300); }

}  // namespace

TEST_CASE("pauli strings") {
  const Matrix z = pauli_string(1, 0, Axis::Z);
  CHECK(z(0, 0) == Complex(1));
  CHECK(z(1, 1) == Complex(-1));
  CHECK(z(0, 1) == Complex(0));

  const Matrix x0 = pauli_string(2, 0, Axis::X);
  const Matrix y0 = pauli_string(2, 0, Axis::Y);
  const Matrix z0 = pauli_string(2, 0, Axis::Z);
  const Matrix y1 = pauli_string(2, 1, Axis::Y);
  CHECK((x0 * y1 - y1 * x0).norm() == doctest::Approx(0.0));
  CHECK((x0 * y0 - Complex(0, 1) * z0).norm() == doctest::Approx(0.0));
  // qubit 0 is the most significant bit
  CHECK(z0(1, 1) == Complex(1));
  CHECK(z0(2, 2) == Complex(-1));

  CHECK_THROWS_AS(pauli_string(2, 2, Axis::X), std::out_of_range);
  CHECK_THROWS_AS(pauli_string(2, -1, Axis::X), std::out_of_range);
}

TEST_CASE("field vector components") {
  const MagneticField f{2.0, 0.7, 1.3};
  const auto v = f.vector();
  CHECK(v.norm() == doctest::Approx(2.0));
  CHECK(v.x() == doctest::Approx(2.0 * std::sin(0.7) * std::cos(1.3)));
  CHECK(v.y() == doctest::Approx(2.0 * std::sin(0.7) * std::sin(1.3)));
  CHECK(v.z() == doctest::Approx(2.0 * std::cos(0.7)));
}

TEST_CASE("chain spec validation") {
  SpinChainSpec s = SpinChainSpec::uniform(3, CouplingStrengths::isotropic(1.0));
  CHECK_NOTHROW(s.validate());
  s.bonds.pop_back();
  CHECK_THROWS(s.validate());
  SpinChainSpec bad;
  bad.n = 0;
  CHECK_THROWS(bad.validate());
  SpinChainSpec negative_field = SpinChainSpec::uniform(1, {}, MagneticField{-1.0, 0.0, 0.0});
  CHECK_THROWS(negative_field.validate());
}

TEST_CASE("single spin in a z field") {
  const auto spec = SpinChainSpec::uniform(1, {}, MagneticField{0.8, 0.0, 0.0});
  const Spectrum s = diagonalize(build_hamiltonian(spec));
  CHECK(s.energies(0) == doctest::Approx(-0.8));
  CHECK(s.energies(1) == doctest::Approx(0.8));
  const GroundState gs = ground_state(build_hamiltonian(spec));
  CHECK(std::abs(gs.state(0)) == doctest::Approx(1.0));
}

TEST_CASE("two-qubit assembly matches the closed forms entrywise") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double h = std::abs(u(rng)) * 3.0;
    const double theta = (u(rng) + 1.0) * units::pi / 2.0;
    const double phi = u(rng) * units::pi;
    const CouplingStrengths b{u(rng), u(rng), u(rng)};
    const auto spec = SpinChainSpec::uniform(2, b, MagneticField{h, theta, phi});
    const Matrix H = build_hamiltonian(spec);
    const oracle::M4 expected = oracle::from_labels(oracle::two_qubit_hamiltonian(h, theta, phi, b.Jx, b.Jy, b.Jz));
    CAPTURE(trial);
    CHECK((H - expected).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(relative_hermiticity_error(H) <= 1e-12);
  }
}

TEST_CASE("two-qubit isotropic spectrum at theta = 0") {
  const double h = units::mhz_to_rad_per_ns(76.0);
  for (double ratio : {0.1, 0.3, 0.45, 0.55, 0.9, 1.4}) {
    const double J = ratio * h;
    const auto spec = SpinChainSpec::uniform(2, CouplingStrengths::isotropic(J), MagneticField{h, 0.0, 0.0});
    const Spectrum s = diagonalize(build_hamiltonian(spec));
    auto levels = oracle::two_qubit_isotropic_levels(h, J);
    std::sort(levels.begin(), levels.end());
    CAPTURE(ratio);
    for (int k = 0; k < 4; ++k) CHECK(s.energies(k) == doctest::Approx(levels[static_cast<std::size_t>(k)]));
    CHECK(s.gap() == doctest::Approx(std::min(std::abs(4 * J - 2 * h), levels[1] - levels[0])));
  }
}

TEST_CASE("two-qubit ground states on either side of the crossing") {
  const double h = 1.0;
  const Matrix weak = build_hamiltonian(SpinChainSpec::uniform(2, CouplingStrengths::isotropic(0.3), {h, 0, 0}));
  const GroundState up = ground_state(weak);
  CHECK(std::abs(up.state(0)) == doctest::Approx(1.0));
  CHECK_FALSE(up.degenerate);

  const Matrix strong = build_hamiltonian(SpinChainSpec::uniform(2, CouplingStrengths::isotropic(0.7), {h, 0, 0}));
  const GroundState singlet = ground_state(strong);
  CHECK(std::abs(singlet.state(1)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(singlet.state(2)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(singlet.state(1) + singlet.state(2)) == doctest::Approx(0.0));

  // exactly at the crossing the tie-break selects the all-up branch
  const Matrix crossing = build_hamiltonian(SpinChainSpec::uniform(2, CouplingStrengths::isotropic(0.5), {h, 0, 0}));
  const GroundState tie = ground_state(crossing);
  CHECK(tie.degenerate);
  CHECK(std::abs(tie.state(0)) == doctest::Approx(1.0));
}

TEST_CASE("diagonalize") {
  Matrix H = Matrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) H(k, k) = k + 1.0;
  const Spectrum s = diagonalize(H);
  CHECK(s.energies(0) == doctest::Approx(1.0));
  CHECK(s.energies(3) == doctest::Approx(4.0));
  CHECK(s.gap() == doctest::Approx(1.0));

  Matrix bad = H;
  bad(0, 1) = 1.0;
  CHECK_THROWS(diagonalize(bad));
}

TEST_CASE("eigenvector residuals") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {3, 4, 5}) {
    const CouplingStrengths b{u(rng), u(rng), u(rng)};
    const Matrix H = build_hamiltonian(SpinChainSpec::uniform(n, b, {1.0 + u(rng), 3.0 * u(rng), u(rng)}));
    const Spectrum s = diagonalize(H);
    for (Eigen::Index k = 0; k < s.energies.size(); ++k) {
      const Vector r = H * s.states.col(k) - s.energies(k) * s.states.col(k);
      CHECK(r.norm() <= 1e-10 * H.norm());
      if (k > 0) CHECK(s.energies(k) >= s.energies(k - 1));
    }
  }
}

TEST_CASE("isotropic chain conserves the spin projection along the field") {
  for (int n : {2, 3, 4, 5}) {
    const MagneticField f{1.3, 0.9, 0.4};
    const ChainOperators ops(n, std::vector<CouplingStrengths>(static_cast<std::size_t>(n - 1),
                                                               CouplingStrengths::isotropic(0.6)));
    const Matrix H = ops.hamiltonian(f);
    const auto d = f.vector() / f.h;
    const Matrix S = d.x() * ops.total(Axis::X) + d.y() * ops.total(Axis::Y) + d.z() * ops.total(Axis::Z);
    CAPTURE(n);
    CHECK((H * S - S * H).norm() <= 1e-10);
  }
  // anisotropy breaks it
  const ChainOperators aniso(2, {CouplingStrengths{0.5, 0.5, 0.2}});
  const MagneticField f{1.0, 0.9, 0.0};
  const Matrix H = aniso.hamiltonian(f);
  const auto d = f.vector();
  const Matrix S = d.x() * aniso.total(Axis::X) + d.z() * aniso.total(Axis::Z);
  CHECK((H * S - S * H).norm() > 1e-3);
}

TEST_CASE("chain operators agree with the direct assembly and analytic derivatives") {
  const std::vector<CouplingStrengths> bonds = {{0.3, 0.2, 0.5}, {0.1, 0.4, 0.25}};
  const ChainOperators ops(3, bonds);
  const MagneticField f{1.1, 0.8, 0.35};
  SpinChainSpec spec{3, bonds, f};
  CHECK((ops.hamiltonian(f) - build_hamiltonian(spec)).norm() <= 1e-14);

  const double eps = 1e-6;
  const Matrix dth = (ops.hamiltonian({f.h, f.theta + eps, f.phi}) - ops.hamiltonian({f.h, f.theta - eps, f.phi})) / (2 * eps);
  const Matrix dph = (ops.hamiltonian({f.h, f.theta, f.phi + eps}) - ops.hamiltonian({f.h, f.theta, f.phi - eps})) / (2 * eps);
  CHECK((ops.d_theta(f) - dth).norm() <= 1e-8);
  CHECK((ops.d_phi(f) - dph).norm() <= 1e-8);
}

TEST_CASE("ground-state energy is continuous across the two-qubit crossing") {
  const double h = 1.0;
  double prev = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double J = 0.3 + 0.004 * k;
    const double e = diagonalize(build_hamiltonian(SpinChainSpec::uniform(2, CouplingStrengths::isotropic(J), {h, 0, 0})))
                         .energies(0);
    if (k > 0) CHECK(std::abs(e - prev) <= 3.0 * 0.004 + 1e-12);
    prev = e;
  }
}
