#include <gtest/gtest.h>

#include <map>

#include "treverse/enumeration.hpp"
#include "treverse/pauli_spin.hpp"

using namespace treverse;

TEST(Pauli, Algebra) {
    const auto s = pauli_triple();
    const cd i(0.0, 1.0);
    EXPECT_LT(max_abs(Mat2c(s[0] * s[1] - i * s[2])), 1e-15);
    for (const auto& m : s) EXPECT_LT(max_abs(Mat2c(m * m - Mat2c::Identity())), 1e-15);
}

TEST(SpinCatalog, VerdictTable) {
    const std::map<std::string, std::pair<bool, TSquared>> expected = {
        {"sigma_x", {true, TSquared::Plus}},  {"sigma_y", {true, TSquared::Minus}},
        {"sigma_z", {true, TSquared::Plus}},  {"U1_xy", {true, TSquared::Plus}},
        {"U1_yz", {true, TSquared::Plus}},   {"U2_xz", {true, TSquared::Plus}},
        {"U2_xy", {true, TSquared::Invalid}}, {"U2_yz", {true, TSquared::Invalid}},
        {"U1_xz", {true, TSquared::Invalid}},
    };
    const auto cat = catalog_spin_ops();
    ASSERT_EQ(cat.size(), 9u);
    int valid = 0;
    for (const auto& e : cat) {
        const auto& want = expected.at(e.op.id);
        EXPECT_EQ(e.verdict.preserves_su2, want.first) << e.op.id;
        EXPECT_EQ(e.verdict.t_squared, want.second) << e.op.id;
        valid += e.verdict.valid();
    }
    EXPECT_EQ(valid, 6);
}

TEST(SpinCatalog, NonUnitaryRejected) {
    EXPECT_THROW(check_su2_preservation(2.0 * Mat2c::Identity(), true), InvalidArgument);
}

TEST(SU2, ParametrizationIsUnitary) {
    SU2Element e{0.3, Eigen::Vector3d(0.2, -1.1, 0.7)};
    EXPECT_LT(unitarity_residual(e.matrix()), 1e-14);
}

TEST(SU2, ToSO3Examples) {
    EXPECT_LT(max_abs(su2_to_so3(Mat2c::Identity()) - Eigen::Matrix3d::Identity()), 1e-15);
    const Mat2c isx = cd(0.0, 1.0) * pauli(Axis::X);
    EXPECT_LT(max_abs(su2_to_so3(isx) - Eigen::Vector3d(1, -1, -1).asDiagonal().toDenseMatrix()), 1e-15);
    EXPECT_THROW(su2_to_so3(pauli(Axis::X)), InvalidArgument);
}

TEST(SU2, DoubleCover) {
    Rng rng(17);
    for (int k = 0; k < 200; ++k) {
        const Mat2c u = random_su2(rng);
        const Eigen::Matrix3d r = su2_to_so3(u);
        EXPECT_LT(max_abs(r * r.transpose() - Eigen::Matrix3d::Identity()), 1e-13);
        EXPECT_NEAR(r.determinant(), 1.0, 1e-13);
        EXPECT_LT(max_abs(su2_to_so3(-u) - r), 1e-15);
        const Mat2c back = so3_to_su2(r);
        EXPECT_LT(std::min(max_abs(Mat2c(back - u)), max_abs(Mat2c(back + u))), 1e-12);
        const Eigen::Vector3d v(0.3, -0.2, 0.9);
        EXPECT_LT(max_abs(Mat2c(u * sigma_dot(v) * u.adjoint() - sigma_dot(r * v))), 1e-13);
    }
}

TEST(SU2, ToSU2Branch) {
    const Mat2c u = so3_to_su2(Eigen::Vector3d(-1, 1, -1).asDiagonal());
    Mat2c want;
    want << 0.0, 1.0, -1.0, 0.0;
    EXPECT_LT(max_abs(Mat2c(u - want)), 1e-15);
    EXPECT_LT(max_abs(Mat2c(so3_to_su2(Eigen::Matrix3d::Identity()) - Mat2c::Identity())), 1e-15);
    EXPECT_THROW(so3_to_su2(-Eigen::Matrix3d::Identity()), InvalidArgument);
}

TEST(SpinLift, KawasakiBlock) {
    const Eigen::Matrix3d m = Eigen::Vector3d(1, -1, 1).asDiagonal();
    const auto lift = spin_lift(m);
    EXPECT_LT(max_abs(lift.p - Eigen::Matrix3d(Eigen::Vector3d(-1, 1, -1).asDiagonal())), 1e-15);
    const auto bz = FieldSpec::make_constant({0, 0, 1});
    EXPECT_TRUE(verify_spin_coupling(m, lift.u_s, bz));
    EXPECT_TRUE(spin_coupling_holds(m, lift.u_s, bz, {100, 1.0, 3}));
}

TEST(SpinLift, CanonicalAtZeroFieldIsSigmaY) {
    const auto lift = spin_lift(Eigen::Matrix3d::Identity());
    EXPECT_LT(max_abs(Mat2c(lift.u_s - pauli(Axis::Y))), 1e-15);
    EXPECT_TRUE(verify_spin_coupling(Eigen::Matrix3d::Identity(), lift.u_s, FieldSpec::make_zero()));
}

TEST(SpinLift, IncompatibleFieldIsRefused) {
    const auto lift = spin_lift(Eigen::Matrix3d::Identity());
    const auto bz = FieldSpec::make_constant({0, 0, 1});
    EXPECT_THROW(verify_spin_coupling(Eigen::Matrix3d::Identity(), lift.u_s, bz), PreconditionError);
    EXPECT_FALSE(spin_coupling_holds(Eigen::Matrix3d::Identity(), lift.u_s, bz));
}

TEST(SpinLift, EveryCompatibleCatalogOp) {
    for (const auto& f : builtin_fields())
        for (const auto& op : find_compatible(f).ops) {
            const Eigen::Matrix3d m = op.matrix();
            const auto lift = spin_lift(m);
            EXPECT_LT(unitarity_residual(lift.u_s), 1e-14);
            EXPECT_TRUE(verify_spin_coupling(m, lift.u_s, f, {100, 1.0, 5})) << op.id() << " " << f.id();
            EXPECT_NE(t_squared(lift.u_s), TSquared::Invalid);
        }
}

TEST(ConjugationIdentity, HoldsForSU2) {
    Rng rng(4);
    for (int k = 0; k < 50; ++k) EXPECT_TRUE(conjugation_identity_check(random_su2(rng)));
    EXPECT_FALSE(conjugation_identity_check(pauli(Axis::X)));
}
