#include <gtest/gtest.h>

#include "treverse/quantum_correlator.hpp"
#include "treverse/testing/oracles.hpp"

using namespace treverse;

namespace {

SpinSystem single(const Eigen::Vector3d& b) { return SpinSystem::uniform(1, b); }

}  // namespace

TEST(SpinSystem, HamiltonianShapeAndHermiticity) {
    auto s = SpinSystem::uniform(3, Eigen::Vector3d(0.1, 0.2, 0.3));
    s.exchange.push_back({0, 2, 0.4});
    const MatXc h = s.hamiltonian();
    EXPECT_EQ(h.rows(), 8);
    EXPECT_LT(max_abs_c(h - h.adjoint()), 1e-15);
    s.n = 7;
    EXPECT_THROW(s.hamiltonian(), InvalidArgument);
}

TEST(SpinSystem, SiteZeroIsLeftmost) {
    const MatXc z0 = pauli_at(2, 0, Axis::Z);
    EXPECT_EQ(z0(0, 0), cd(1.0));
    EXPECT_EQ(z0(1, 1), cd(1.0));
    EXPECT_EQ(z0(2, 2), cd(-1.0));
}

TEST(Kubo, CommutingObservableGivesOne) {
    const ThermalState st(single({0, 0, 1}), 0.8);
    const MatXc sz = MatXc(pauli(Axis::Z));
    for (double t : {0.0, 1.3, 7.0}) EXPECT_NEAR(canonical_correlator(st, sz, sz, t).value, 1.0, 1e-14);
}

TEST(Kubo, HighTemperatureLimit) {
    Rng rng(3);
    const auto sys = oracle::random_spin_system(2, rng);
    const MatXc h = sys.hamiltonian();
    const MatXc phi = oracle::random_hermitian(4, rng);
    const MatXc psi = oracle::random_hermitian(4, rng);
    const double t = 0.9;
    const ThermalState st(h, 1e-8);
    const cd i(0.0, 1.0);
    Eigen::SelfAdjointEigenSolver<MatXc> es(h);
    const MatXc ut = es.eigenvectors() * (i * t * es.eigenvalues()).array().exp().matrix().asDiagonal() *
                     es.eigenvectors().adjoint();
    const double direct = (phi * ut * psi * ut.adjoint()).trace().real() / 4.0;
    EXPECT_NEAR(canonical_correlator(st, phi, psi, t).value, direct, 1e-7);
}

TEST(Kubo, MatchesQuadratureSingleSpin) {
    const auto sys = single({0, 0, 1});
    const MatXc sx = MatXc(pauli(Axis::X));
    const double q = oracle::kubo_quadrature(sys.hamiltonian(), 1.0, sx, sx, 0.0).real();
    EXPECT_NEAR(canonical_correlator(sys, 1.0, sx, sx, 0.0).value, q, 1e-8);
    EXPECT_NEAR(q, std::tanh(1.0), 1e-12);
}

TEST(Kubo, MatchesQuadratureRandom) {
    Rng rng(11);
    for (int k = 0; k < 10; ++k) {
        const int n = 1 + k % 3;
        const auto sys = oracle::random_spin_system(n, rng);
        const MatXc phi = oracle::random_hermitian(sys.hilbert_dim(), rng);
        const MatXc psi = oracle::random_hermitian(sys.hilbert_dim(), rng);
        const double beta = 0.3 + 0.2 * k;
        const double t = 0.37 * k;
        const auto q = oracle::kubo_quadrature(sys.hamiltonian(), beta, phi, psi, t);
        const auto c = canonical_correlator(sys, beta, phi, psi, t);
        EXPECT_NEAR(c.value, q.real(), 1e-8);
        EXPECT_LT(std::abs(q.imag()), 1e-10);
        EXPECT_LE(c.imag_residual, kImagTol);
    }
}

TEST(Kubo, Stationarity) {
    Rng rng(21);
    const auto sys = oracle::random_spin_system(2, rng);
    const ThermalState st(sys, 0.7);
    const MatXc phi = oracle::random_hermitian(4, rng);
    const MatXc psi = oracle::random_hermitian(4, rng);
    for (double t : {0.2, 1.0, 3.5})
        EXPECT_NEAR(canonical_correlator(st, phi, psi, t, 0.0).value, canonical_correlator(st, phi, psi, 0.0, -t).value,
                    1e-10);
}

TEST(Kubo, Errors) {
    const auto sys = single({0, 0, 1});
    MatXc bad = MatXc::Zero(2, 2);
    bad(0, 1) = 1.0;
    EXPECT_THROW(canonical_correlator(sys, 1.0, bad, bad, 0.0), InvalidArgument);
    EXPECT_THROW(ThermalState(sys, 0.0), InvalidArgument);
    EXPECT_THROW(ThermalState(sys, -1.0), InvalidArgument);
}

TEST(Kubo, WeightIsStableForLargeGaps) {
    EXPECT_TRUE(std::isfinite(kubo_weight(1e-300, 1.0, 800.0, 5.0)));
    EXPECT_DOUBLE_EQ(kubo_weight(0.4, 0.4, 0.0, 2.0), 0.4);
}

TEST(TrCommutes, Examples) {
    const auto tx = SpinTimeReversal::uniform(1, pauli(Axis::X));
    EXPECT_FALSE(tr_commutes(single({0, 0, 0.8}), tx));
    EXPECT_TRUE(tr_commutes(single({0.8, 0, 0}), tx));
    for (const auto& e : catalog_spin_ops())
        EXPECT_TRUE(tr_commutes(single({0, 0, 0}), SpinTimeReversal::uniform(1, e.op.m))) << e.op.id;
    EXPECT_THROW(tr_commutes(SpinSystem::uniform(2, {0, 0, 1}), tx), DimensionMismatch);
}

TEST(Signature, Detection) {
    const auto t = SpinTimeReversal::uniform(1, pauli(Axis::Y));
    EXPECT_EQ(detect_signature(t, MatXc(pauli(Axis::X))), Signature::Minus);
    EXPECT_EQ(detect_signature(t, MatXc(Mat2c::Identity())), Signature::Plus);
    EXPECT_EQ(detect_signature(t, MatXc(pauli(Axis::X) + Mat2c::Identity())), Signature::None);
}

TEST(KuboSymmetry, TwoSpinInstance) {
    const auto inst = two_spin_instance();
    const auto rep = verify_kubo_symmetry(inst.sys, inst.beta, inst.t, inst.phi, inst.psi, inst.times);
    EXPECT_EQ(rep.points.size(), 16u);
    EXPECT_EQ(rep.eta_phi, Signature::Plus);
    EXPECT_EQ(rep.eta_psi, Signature::Plus);
    EXPECT_TRUE(rep.verdict);
    EXPECT_LE(rep.max_deviation, 1e-8);
}

TEST(KuboSymmetry, EqualObservables) {
    const auto inst = two_spin_instance();
    const auto rep = verify_kubo_symmetry(inst.sys, inst.beta, inst.t, inst.phi, inst.phi, inst.times, 1e-10);
    EXPECT_TRUE(rep.verdict);
}

TEST(KuboSymmetry, SigmaYWithFieldIsRefused) {
    const auto inst = two_spin_instance();
    const auto ty = SpinTimeReversal::uniform(2, pauli(Axis::Y));
    EXPECT_THROW(verify_kubo_symmetry(inst.sys, inst.beta, ty, inst.phi, inst.psi, inst.times), PreconditionError);
}

TEST(KuboSymmetry, MissingSignature) {
    const auto inst = two_spin_instance();
    const MatXc mixed = pauli_at(2, 0, Axis::X) + pauli_at(2, 0, Axis::Z);
    EXPECT_THROW(verify_kubo_symmetry(inst.sys, inst.beta, inst.t, mixed, inst.psi, inst.times), SignatureError);
}
