#include <gtest/gtest.h>

#include <numbers>

#include "treverse/enumeration.hpp"
#include "treverse/field_compat.hpp"

using namespace treverse;

namespace {

Eigen::Matrix3d diag(double a, double b, double c) { return Eigen::Vector3d(a, b, c).asDiagonal(); }

Eigen::Matrix3d swap_xy(double s, double t) {
    Eigen::Matrix3d m;
    m << 0, s, 0, s, 0, 0, 0, 0, t;
    return m;
}

}  // namespace

TEST(BCompat, ConstantFieldExamples) {
    const auto bz = FieldSpec::make_constant({0, 0, 1});
    EXPECT_TRUE(check_B_compat(diag(1, -1, 1), bz).verdict);
    EXPECT_TRUE(check_B_compat(diag(-1, 1, 1), bz).verdict);
    EXPECT_FALSE(check_B_compat(diag(1, 1, 1), bz).verdict);
    EXPECT_TRUE(check_B_compat(swap_xy(1, 1), bz).verdict);
    EXPECT_TRUE(check_B_compat(diag(1, 1, 1), FieldSpec::make_zero()).verdict);
}

TEST(BCompat, RejectsNonInvolution) {
    Eigen::Matrix3d rot;
    rot << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    EXPECT_THROW(check_B_compat(rot, FieldSpec::make_zero()), InvalidOperation);
    EXPECT_THROW(check_B_compat(2.0 * Eigen::Matrix3d::Identity(), FieldSpec::make_zero()), InvalidOperation);
}

TEST(BCompat, AxialFieldKeepsMirrorOps) {
    const auto f = FieldSpec::make_axial({1.0, 0.5});
    EXPECT_TRUE(check_B_compat(diag(1, -1, 1), f).verdict);
    EXPECT_TRUE(check_B_compat(diag(1, -1, -1), f).verdict);
    EXPECT_FALSE(check_B_compat(diag(-1, -1, -1), f).verdict);
}

TEST(BCompat, PlanarFieldRequiresMirrorSymmetry) {
    EXPECT_THROW(FieldSpec::make_planar({{1.0, 1, 0}}), InvalidArgument);
    const auto f = builtin_fields()[2];
    EXPECT_TRUE(check_B_compat(diag(1, -1, 1), f).verdict);
    EXPECT_TRUE(check_B_compat(swap_xy(1, 1), f).verdict);
}

TEST(ACompat, AgreesWithBForCatalog) {
    for (const auto& f : builtin_fields())
        for (const auto& op : single_particle_catalog()) {
            const Eigen::Matrix3d a = op.matrix();
            const auto b = check_B_compat(a, f);
            const auto p = check_A_compat(a, f, default_gauge(f));
            EXPECT_EQ(b.verdict, p.verdict) << op.id() << " " << f.id();
        }
}

TEST(Gauge, CurlReproducesField) {
    for (const auto& f : builtin_fields()) {
        const auto r = gauge_residual(f, default_gauge(f));
        EXPECT_LT(r.curl, kCurlTol) << f.id();
        EXPECT_LT(r.divergence, kCurlTol) << f.id();
    }
    const auto c = FieldSpec::make_constant({0.2, -0.4, 1.1});
    EXPECT_LT(gauge_residual(c, GaugeChoice::Symmetric).curl, kCurlTol);
}

TEST(Gauge, PoissonSolution) {
    const Poly2 b(std::vector<Monomial>{{1.0, 0, 0}, {1.0, 2, 0}, {1.0, 0, 2}, {1.0, 2, 2}});
    const Poly2 psi = b.poisson_solution();
    for (double x : {-0.7, 0.1, 0.9})
        for (double y : {-0.4, 0.3}) {
            const double lap = psi.dx().dx()(x, y) + psi.dy().dy()(x, y);
            EXPECT_NEAR(lap, b(x, y), 1e-12);
        }
}

TEST(ContinuousFamily, CompatibleWithConstantZField) {
    const auto bz = FieldSpec::make_constant({0, 0, 1});
    for (int k = 0; k < 64; ++k) {
        const double th = 2.0 * std::numbers::pi * k / 64.0;
        EXPECT_LE(check_B_compat(continuous_family(th).matrix(), bz).max_residual, 1e-12);
    }
    EXPECT_TRUE(find_compatible(bz).continuous_family_applies);
    EXPECT_FALSE(find_compatible(builtin_fields()[2]).continuous_family_applies);
}

TEST(FindCompatible, ConstantZ) {
    const auto set = find_compatible(FieldSpec::make_constant({0, 0, 1}));
    EXPECT_FALSE(set.ops.empty());
    for (const auto& op : set.ops) EXPECT_TRUE(check_B_compat(op.matrix(), FieldSpec::make_constant({0, 0, 1})).verdict);
    EXPECT_EQ(find_compatible(FieldSpec::make_zero()).ops.size(), 20u);
}

TEST(Species, BlockConstraint) {
    EXPECT_EQ(species_block_constraint({1, 1}, {1, 1}), BlockConstraint::Unrestricted);
    EXPECT_EQ(species_block_constraint({1, 2}, {1, 1}), BlockConstraint::PerParticleBlocksRequired);
    EXPECT_THROW(species_block_constraint({1}, {1, 1}), DimensionMismatch);
}

TEST(FieldSpec, IdsAndNegation) {
    EXPECT_EQ(FieldSpec::make_constant({0, 0, 1}).id(), "constant:0,0,1");
    EXPECT_EQ(FieldSpec::make_axial({1, 0.5}).id(), "axial:1,0.5");
    const auto n = FieldSpec::make_axial({1, 0.5}, "named").negated();
    EXPECT_EQ(n.id(), "axial:-1,-0.5");
    EXPECT_TRUE(FieldSpec::make_zero().is_zero());
}
