/**
 * @file symmetry_core.hpp
 * @brief Phase-space points, linear time-reversal maps and their defining checks.
 *
 * A time-reversal operation on the 2M-dimensional phase space (X, P) is stored
 * through its M x M coordinate block A; the induced map is diag(A, -A), i.e.
 * (X, P) -> (A X, -A P). Signed permutations keep an exact compressed form so
 * involution and orthogonality can be decided in integer arithmetic.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "treverse/errors.hpp"
#include "treverse/random.hpp"

namespace treverse {

inline constexpr double kDenseTol = 1e-12;

/// Max-abs entry norm used by every matrix identity check.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

struct PhasePoint {
    Eigen::VectorXd coords;
    Eigen::VectorXd momenta;

    PhasePoint() = default;
    PhasePoint(Eigen::VectorXd x, Eigen::VectorXd p) : coords(std::move(x)), momenta(std::move(p)) {
        if (coords.size() != momenta.size())
            throw DimensionMismatch("PhasePoint: coords and momenta differ in length");
    }

    [[nodiscard]] Eigen::Index dim() const noexcept { return coords.size(); }
    [[nodiscard]] Eigen::Index particles() const noexcept { return coords.size() / 3; }

    /// Largest absolute component over coordinates and momenta.
    [[nodiscard]] double inf_norm() const {
        return std::max(max_abs(coords), max_abs(momenta));
    }
};

inline double inf_distance(const PhasePoint& a, const PhasePoint& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("inf_distance: dimension mismatch");
    return std::max(max_abs(a.coords - b.coords), max_abs(a.momenta - b.momenta));
}

/// Components uniform in [-1, 1].
inline PhasePoint random_phase_point(Eigen::Index m, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd x(m), p(m);
    for (Eigen::Index i = 0; i < m; ++i) x[i] = u(rng);
    for (Eigen::Index i = 0; i < m; ++i) p[i] = u(rng);
    return {std::move(x), std::move(p)};
}

/// Exact signed permutation: (A x)_i = sign[i] * x[perm[i]].
struct SignedPermutation {
    std::vector<int> perm;
    std::vector<int> sign;

    SignedPermutation() = default;
    SignedPermutation(std::vector<int> p, std::vector<int> s) : perm(std::move(p)), sign(std::move(s)) {
        validate();
    }

    static SignedPermutation identity(int m) {
        std::vector<int> p(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) p[static_cast<std::size_t>(i)] = i;
        return {std::move(p), std::vector<int>(static_cast<std::size_t>(m), 1)};
    }

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(perm.size()); }

    void validate() const {
        if (perm.size() != sign.size()) throw DimensionMismatch("SignedPermutation: perm/sign length differ");
        std::vector<char> seen(perm.size(), 0);
        for (std::size_t i = 0; i < perm.size(); ++i) {
            const int j = perm[i];
            if (j < 0 || static_cast<std::size_t>(j) >= perm.size() || seen[static_cast<std::size_t>(j)])
                throw InvalidArgument("SignedPermutation: perm is not a bijection");
            seen[static_cast<std::size_t>(j)] = 1;
            if (sign[i] != 1 && sign[i] != -1) throw InvalidArgument("SignedPermutation: signs must be +-1");
        }
    }

    /// Exact A^2 == s*I for s = +1 or -1.
    [[nodiscard]] bool squares_to(int s) const {
        for (std::size_t i = 0; i < perm.size(); ++i) {
            const auto j = static_cast<std::size_t>(perm[i]);
            if (static_cast<std::size_t>(perm[j]) != i) return false;
            if (sign[i] * sign[j] != s) return false;
        }
        return true;
    }

    /// Exact A == s * A^T.
    [[nodiscard]] bool is_symmetric_with(int s) const {
        // A(i, perm[i]) = sign[i]; A^T(i, perm[i]) = A(perm[i], i).
        for (std::size_t i = 0; i < perm.size(); ++i) {
            const auto j = static_cast<std::size_t>(perm[i]);
            if (static_cast<std::size_t>(perm[j]) != i) return false;
            if (sign[j] != s * sign[i]) return false;
        }
        return true;
    }

    /// Exact A A^T == I, checked entrywise on the integer matrix.
    [[nodiscard]] bool is_orthogonal() const {
        const int m = dim();
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) {
                // (A A^T)(r,c) = sum_k A(r,k) A(c,k); only k = perm[r] contributes to row r.
                const int v = (perm[static_cast<std::size_t>(r)] == perm[static_cast<std::size_t>(c)])
                                  ? sign[static_cast<std::size_t>(r)] * sign[static_cast<std::size_t>(c)]
                                  : 0;
                if (v != (r == c ? 1 : 0)) return false;
            }
        return true;
    }

    [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        if (x.size() != dim()) throw DimensionMismatch("SignedPermutation::apply: dimension mismatch");
        Eigen::VectorXd y(x.size());
        for (std::size_t i = 0; i < perm.size(); ++i)
            y[static_cast<Eigen::Index>(i)] = sign[i] * x[perm[i]];
        return y;
    }

    [[nodiscard]] Eigen::MatrixXd dense() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim(), dim());
        for (std::size_t i = 0; i < perm.size(); ++i)
            a(static_cast<Eigen::Index>(i), perm[i]) = sign[i];
        return a;
    }

    /// Cycle type restricted to 1- and 2-cycles; throws for longer cycles.
    [[nodiscard]] std::pair<int, int> involution_cycle_type() const {
        int r1 = 0, r2 = 0;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            const auto j = static_cast<std::size_t>(perm[i]);
            if (j == i) ++r1;
            else if (static_cast<std::size_t>(perm[j]) == i) { if (i < j) ++r2; }
            else throw InvalidArgument("SignedPermutation: contains a cycle of order >= 3");
        }
        return {r1, r2};
    }

    friend bool operator==(const SignedPermutation&, const SignedPermutation&) = default;
};

enum class OpKind { BinarySignedPermutation, AntisymmetricBlock, ContinuousParametric, General };

inline const char* to_string(OpKind k) {
    switch (k) {
        case OpKind::BinarySignedPermutation: return "binary-signed-permutation";
        case OpKind::AntisymmetricBlock: return "antisymmetric-block";
        case OpKind::ContinuousParametric: return "continuous-parametric";
        case OpKind::General: return "general";
    }
    return "general";
}

class TimeReversalOp {
public:
    TimeReversalOp() = default;

    TimeReversalOp(Eigen::MatrixXd a, OpKind kind, std::string id = {})
        : a_(std::move(a)), kind_(kind), id_(std::move(id)) {
        if (a_.rows() != a_.cols()) throw DimensionMismatch("TimeReversalOp: coordinate block must be square");
    }

    TimeReversalOp(SignedPermutation sp, OpKind kind, std::string id = {})
        : a_(sp.dense()), kind_(kind), id_(std::move(id)), exact_(std::move(sp)) {}

    static TimeReversalOp canonical(int m) {
        return {SignedPermutation::identity(m), OpKind::BinarySignedPermutation, "canonical"};
    }

    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return a_; }
    [[nodiscard]] OpKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] const std::optional<SignedPermutation>& exact() const noexcept { return exact_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return a_.rows(); }

    /// Induced 2M x 2M phase-space matrix diag(A, -A).
    [[nodiscard]] Eigen::MatrixXd phase_space_matrix() const {
        const Eigen::Index m = dim();
        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(2 * m, 2 * m);
        full.topLeftCorner(m, m) = a_;
        full.bottomRightCorner(m, m) = -a_;
        return full;
    }

private:
    Eigen::MatrixXd a_;
    OpKind kind_ = OpKind::General;
    std::string id_;
    std::optional<SignedPermutation> exact_;
};

/// Standard symplectic form [[0, -I], [I, 0]] on a 2M-dimensional space.
struct SymplecticForm {
    Eigen::Index m = 0;

    [[nodiscard]] Eigen::MatrixXd matrix() const {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * m, 2 * m);
        w.topRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
        w.bottomLeftCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
        return w;
    }
};

/// A^2 = I (A^2 = -I for the antisymmetric-block family).
inline bool is_involution(const TimeReversalOp& op, double tol = kDenseTol) {
    const int target = op.kind() == OpKind::AntisymmetricBlock ? -1 : 1;
    if (op.exact()) return op.exact()->squares_to(target);
    const auto& a = op.matrix();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    return max_abs(a * a - target * id) <= tol;
}

inline bool is_orthogonal(const TimeReversalOp& op, double tol = kDenseTol) {
    if (op.exact()) return op.exact()->is_orthogonal();
    const auto& a = op.matrix();
    return max_abs(a * a.transpose() - Eigen::MatrixXd::Identity(a.rows(), a.cols())) <= tol;
}

/// Residual of P^T w P = -w for an arbitrary 2M x 2M matrix.
inline double antisymplectic_residual(const Eigen::MatrixXd& full) {
    if (full.rows() != full.cols() || full.rows() % 2 != 0)
        throw DimensionMismatch("antisymplectic_residual: need a square matrix of even size");
    const Eigen::MatrixXd w = SymplecticForm{full.rows() / 2}.matrix();
    return max_abs(full.transpose() * w * full + w);
}

inline bool is_antisymplectic_matrix(const Eigen::MatrixXd& full, double tol = kDenseTol) {
    return antisymplectic_residual(full) <= tol;
}

inline bool is_antisymplectic(const TimeReversalOp& op, double tol = kDenseTol) {
    return is_antisymplectic_matrix(op.phase_space_matrix(), tol);
}

/// Block-diagonal map diag(A, D) on (X, P).
inline Eigen::MatrixXd block_diagonal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d) {
    if (a.rows() != d.rows() || a.rows() != a.cols() || d.rows() != d.cols())
        throw DimensionMismatch("block_diagonal: blocks must be square and equal in size");
    const Eigen::Index m = a.rows();
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    full.topLeftCorner(m, m) = a;
    full.bottomRightCorner(m, m) = d;
    return full;
}

/// (X, P) -> (A X, -A P).
inline PhasePoint apply(const TimeReversalOp& op, const PhasePoint& g) {
    if (g.dim() != op.dim()) throw DimensionMismatch("apply: phase point and operation differ in dimension");
    if (op.exact()) return {op.exact()->apply(g.coords), -op.exact()->apply(g.momenta)};
    return {op.matrix() * g.coords, -(op.matrix() * g.momenta)};
}

/// Total angular momentum sum_i x_i x p_i.
inline Eigen::Vector3d angular_momentum(const PhasePoint& g) {
    if (g.dim() % 3 != 0) throw DimensionMismatch("angular_momentum: dimension must be a multiple of 3");
    Eigen::Vector3d l = Eigen::Vector3d::Zero();
    for (Eigen::Index i = 0; i < g.dim(); i += 3) {
        const Eigen::Vector3d x = g.coords.segment<3>(i);
        const Eigen::Vector3d p = g.momenta.segment<3>(i);
        l += x.cross(p);
    }
    return l;
}

struct AlwaysReversed {};

struct Counterexample {
    PhasePoint state;
    Eigen::Vector3d before;
    Eigen::Vector3d after;
};

using AngularVerdict = std::variant<AlwaysReversed, Counterexample>;

/// Samples random phase points and looks for one where L(apply(op, g)) != -L(g).
inline AngularVerdict reverses_angular_momentum(const TimeReversalOp& op, int samples, std::uint64_t seed,
                                                double tol = kDenseTol) {
    if (op.dim() % 3 != 0) throw DimensionMismatch("reverses_angular_momentum: dimension must be a multiple of 3");
    Rng rng{seed};
    for (int s = 0; s < samples; ++s) {
        PhasePoint g = random_phase_point(op.dim(), rng);
        const Eigen::Vector3d l0 = angular_momentum(g);
        const Eigen::Vector3d l1 = angular_momentum(apply(op, g));
        if (max_abs(l1 + l0) > tol) return Counterexample{std::move(g), l0, l1};
    }
    return AlwaysReversed{};
}

/// If A is one 3x3 block R repeated along the diagonal, returns R.
inline std::optional<Eigen::Matrix3d> common_particle_block(const Eigen::MatrixXd& a, double tol = 0.0) {
    if (a.rows() != a.cols() || a.rows() % 3 != 0) return std::nullopt;
    const Eigen::Matrix3d r = a.topLeftCorner<3, 3>();
    for (Eigen::Index bi = 0; bi < a.rows(); bi += 3)
        for (Eigen::Index bj = 0; bj < a.cols(); bj += 3) {
            const Eigen::Matrix3d blk = a.block<3, 3>(bi, bj);
            const Eigen::Matrix3d want = bi == bj ? r : Eigen::Matrix3d::Zero();
            if (max_abs(blk - want) > tol) return std::nullopt;
        }
    return r;
}

/// Sampled check of the frame-covariant law L' = -det(R) R L for a common
/// per-particle block R. Returns false when A is not of that form or a sample
/// violates the law.
inline bool angular_momentum_covariant(const TimeReversalOp& op, int samples, std::uint64_t seed,
                                       double tol = kDenseTol) {
    const auto r = common_particle_block(op.matrix());
    if (!r) return false;
    const Eigen::Matrix3d law = -r->determinant() * (*r);
    Rng rng{seed};
    for (int s = 0; s < samples; ++s) {
        const PhasePoint g = random_phase_point(op.dim(), rng);
        if (max_abs(angular_momentum(apply(op, g)) - law * angular_momentum(g)) > tol) return false;
    }
    return true;
}

}  // namespace treverse
