/**
 * @file pauli_spin.hpp
 * @brief Pauli algebra, spin-space time-reversal catalog and the SU(2) -> SO(3) bridge.
 *
 * Conventions: an anti-unitary T = U K acts on an operator X as U X^* U^dagger.
 * The adjoint map Lambda(U) is defined by U^dagger sigma_j U = Lambda_jk sigma_k,
 * which is equivalent to U (sigma . v) U^dagger = sigma . (Lambda v).
 */
#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "treverse/errors.hpp"
#include "treverse/field_compat.hpp"
#include "treverse/symmetry_core.hpp"

namespace treverse {

using cd = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;

inline constexpr double kUnitaryTol = 1e-14;

enum class Axis { X = 0, Y = 1, Z = 2 };

inline Mat2c pauli(Axis j) {
    Mat2c m;
    switch (j) {
        case Axis::X: m << 0.0, 1.0, 1.0, 0.0; break;
        case Axis::Y: m << 0.0, cd(0.0, -1.0), cd(0.0, 1.0), 0.0; break;
        case Axis::Z: m << 1.0, 0.0, 0.0, -1.0; break;
    }
    return m;
}

inline Mat2c pauli(int j) { return pauli(static_cast<Axis>(j)); }

inline std::array<Mat2c, 3> pauli_triple() { return {pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z)}; }

/// sigma . v
inline Mat2c sigma_dot(const Eigen::Vector3d& v) {
    return v.x() * pauli(Axis::X) + v.y() * pauli(Axis::Y) + v.z() * pauli(Axis::Z);
}

inline double unitarity_residual(const Mat2c& u) { return max_abs(u * u.adjoint() - Mat2c::Identity()); }

/// 2x2 operator on spin space with a label.
struct SpinOp {
    Mat2c m = Mat2c::Identity();
    std::string id;
};

/// e^{i lambda0/2} (I cos(|lambda|/2) + i (lambda . sigma / |lambda|) sin(|lambda|/2)).
struct SU2Element {
    double lambda0 = 0.0;
    Eigen::Vector3d lambda = Eigen::Vector3d::Zero();

    [[nodiscard]] Mat2c matrix() const {
        const double len = lambda.norm();
        Mat2c v = Mat2c::Identity() * std::cos(len / 2.0);
        if (len > 0.0) v += cd(0.0, std::sin(len / 2.0)) * sigma_dot(lambda / len);
        return std::exp(cd(0.0, lambda0 / 2.0)) * v;
    }
};

/// Action of T = U K (conjugate) or of plain conjugation by U on an operator.
inline Mat2c transform(const Mat2c& u, const Mat2c& x, bool conjugate) {
    return u * (conjugate ? Mat2c(x.conjugate()) : x) * u.adjoint();
}

/// Checks [T s_j T^-1, T s_k T^-1] = T [s_j, s_k] T^-1 for all pairs, with T
/// acting anti-linearly when `conjugate` is set.
inline bool check_su2_preservation(const Mat2c& u, bool conjugate, double tol = 1e-13) {
    if (unitarity_residual(u) > 1e-12) throw InvalidArgument("check_su2_preservation: U is not unitary");
    const auto s = pauli_triple();
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            const Mat2c tj = transform(u, s[static_cast<std::size_t>(j)], conjugate);
            const Mat2c tk = transform(u, s[static_cast<std::size_t>(k)], conjugate);
            const Mat2c comm = s[static_cast<std::size_t>(j)] * s[static_cast<std::size_t>(k)] -
                               s[static_cast<std::size_t>(k)] * s[static_cast<std::size_t>(j)];
            if (max_abs(Mat2c(tj * tk - tk * tj) - transform(u, comm, conjugate)) > tol) return false;
        }
    return true;
}

enum class TSquared { Plus, Minus, Invalid };

inline const char* to_string(TSquared t) {
    switch (t) {
        case TSquared::Plus: return "+1";
        case TSquared::Minus: return "-1";
        case TSquared::Invalid: return "invalid";
    }
    return "invalid";
}

/// Sign of T^2 = U K U K = U U^*, or Invalid when it is not +-I.
inline TSquared t_squared(const Mat2c& u, double tol = 1e-12) {
    const Mat2c sq = u * u.conjugate();
    if (max_abs(Mat2c(sq - Mat2c::Identity())) <= tol) return TSquared::Plus;
    if (max_abs(Mat2c(sq + Mat2c::Identity())) <= tol) return TSquared::Minus;
    return TSquared::Invalid;
}

struct SpinTRVerdict {
    std::string id;
    bool preserves_su2 = false;
    TSquared t_squared = TSquared::Invalid;

    [[nodiscard]] bool valid() const noexcept { return preserves_su2 && t_squared != TSquared::Invalid; }
};

struct SpinCatalogEntry {
    SpinOp op;
    SpinTRVerdict verdict;
};

/// The nine spin-space candidates (theta = 1/sqrt 2, upper sign choice):
/// three diagonal sigma_j, the three admissible swaps and the three rejected ones.
inline std::vector<SpinCatalogEntry> catalog_spin_ops() {
    const double th = 1.0 / std::numbers::sqrt2;
    const Mat2c id = Mat2c::Identity();
    const cd i(0.0, 1.0);
    const Mat2c sx = pauli(Axis::X), sy = pauli(Axis::Y), sz = pauli(Axis::Z);
    const std::vector<SpinOp> ops = {
        {sx, "sigma_x"},
        {sy, "sigma_y"},
        {sz, "sigma_z"},
        {th * (sz - i * id), "U1_xy"},
        {th * (sx - i * id), "U1_yz"},
        {th * (sx + sz), "U2_xz"},
        {th * (sx + sy), "U2_xy"},
        {th * (sy + sz), "U2_yz"},
        {th * (sy + i * id), "U1_xz"},
    };
    std::vector<SpinCatalogEntry> out;
    for (const auto& op : ops)
        out.push_back({op, SpinTRVerdict{op.id, check_su2_preservation(op.m, true), t_squared(op.m)}});
    return out;
}

/// Lambda_jk = Tr(sigma_k U^dagger sigma_j U) / 2.
inline Eigen::Matrix3d adjoint_rotation(const Mat2c& u) {
    const auto s = pauli_triple();
    Eigen::Matrix3d lam;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            lam(j, k) = 0.5 * (s[static_cast<std::size_t>(k)] * u.adjoint() * s[static_cast<std::size_t>(j)] * u)
                                  .trace()
                                  .real();
    return lam;
}

inline Eigen::Matrix3d su2_to_so3(const Mat2c& u, double tol = 1e-12) {
    if (unitarity_residual(u) > tol) throw InvalidArgument("su2_to_so3: U is not unitary");
    if (std::abs(u.determinant() - cd(1.0, 0.0)) > tol) throw InvalidArgument("su2_to_so3: det U != 1");
    return adjoint_rotation(u);
}

/// Picks the representative of {U, -U}: Re Tr U > 0; on a tie Im U(0,0) > 0;
/// on a further tie the first nonzero entry (row-major) points into the
/// right half-plane (or the upper half-axis when purely imaginary).
inline Mat2c normalize_sheet(const Mat2c& u, double eps = 1e-12) {
    const double re_tr = u.trace().real();
    if (re_tr > eps) return u;
    if (re_tr < -eps) return -u;
    const double im00 = u(0, 0).imag();
    if (im00 > eps) return u;
    if (im00 < -eps) return -u;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            const cd z = u(r, c);
            if (std::abs(z) <= eps) continue;
            if (z.real() > eps) return u;
            if (z.real() < -eps) return -u;
            return z.imag() > 0.0 ? u : Mat2c(-u);
        }
    return u;
}

/// U with su2_to_so3(U) = P, via the unit quaternion of P.
inline Mat2c so3_to_su2(const Eigen::Matrix3d& p, double tol = 1e-10) {
    if (max_abs(p * p.transpose() - Eigen::Matrix3d::Identity()) > tol || std::abs(p.determinant() - 1.0) > tol)
        throw InvalidArgument("so3_to_su2: P is not special orthogonal");
    const Eigen::Quaterniond q(p);
    // U (sigma . v) U^dagger = sigma . (P v) for U = w I - i (x sx + y sy + z sz).
    const Mat2c u = q.w() * Mat2c::Identity() -
                    cd(0.0, 1.0) * (q.x() * pauli(Axis::X) + q.y() * pauli(Axis::Y) + q.z() * pauli(Axis::Z));
    return normalize_sheet(u);
}

struct SpinLift {
    Eigen::Matrix3d p;  ///< det(M) M, special orthogonal involution
    Mat2c u;            ///< SU(2) preimage of P
    Mat2c u_s;          ///< U sigma_y
};

inline SpinLift spin_lift(const Eigen::Matrix3d& m) {
    require_orthogonal_involution(m);
    SpinLift lift;
    lift.p = m.determinant() * m;
    if (std::abs(lift.p.determinant() - 1.0) > 1e-12 ||
        max_abs(lift.p * lift.p - Eigen::Matrix3d::Identity()) > 1e-12)
        throw NumericalError("spin_lift: det(M) M is not a special orthogonal involution");
    lift.u = so3_to_su2(lift.p);
    lift.u_s = lift.u * pauli(Axis::Y);
    return lift;
}

/// max_x || U_s (S(M x))^* U_s^dagger - S(x) ||, S(x) = sigma . B(x).
inline double spin_coupling_residual(const Eigen::Matrix3d& m, const Mat2c& u_s, const FieldSpec& spec,
                                     const SampleOptions& opt = {}) {
    double worst = 0.0;
    for (const auto& x : sample_points(opt.samples, opt.half_side, opt.seed)) {
        const Mat2c lhs = transform(u_s, sigma_dot(eval_field(spec, m * x)), true);
        worst = std::max(worst, max_abs(Mat2c(lhs - sigma_dot(eval_field(spec, x)))));
    }
    return worst;
}

/// Invariance of the spin-field coupling, with no precondition on the field.
inline bool spin_coupling_holds(const Eigen::Matrix3d& m, const Mat2c& u_s, const FieldSpec& spec,
                                const SampleOptions& opt = {}, double tol = 1e-10) {
    return spin_coupling_residual(m, u_s, spec, opt) <= tol;
}

/// Requires the spatial block to satisfy the field compatibility condition.
inline bool verify_spin_coupling(const Eigen::Matrix3d& m, const Mat2c& u_s, const FieldSpec& spec,
                                 const SampleOptions& opt = {}, double tol = 1e-10) {
    if (!check_B_compat(m, spec, opt).verdict)
        throw PreconditionError("verify_spin_coupling: spatial block is incompatible with the field");
    return spin_coupling_holds(m, u_s, spec, opt, tol);
}

/// sigma_y U sigma_y = U^*.
inline bool conjugation_identity_check(const Mat2c& u, double tol = 1e-13) {
    const Mat2c sy = pauli(Axis::Y);
    return max_abs(Mat2c(sy * u * sy - u.conjugate())) <= tol;
}

/// Random SU(2) element (Haar, via a uniform unit quaternion).
inline Mat2c random_su2(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Vector4d q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    return q[0] * Mat2c::Identity() + cd(0.0, 1.0) * (q[1] * pauli(Axis::X) + q[2] * pauli(Axis::Y) + q[3] * pauli(Axis::Z));
}

}  // namespace treverse
