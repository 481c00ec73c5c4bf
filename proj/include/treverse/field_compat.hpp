/**
 * @file field_compat.hpp
 * @brief Magnetic fields, vector potentials and field/time-reversal compatibility.
 *
 * A per-particle coordinate block M (orthogonal involution) is compatible with
 * a field B when det(M) M B(M x) = -B(x) everywhere. The equivalent potential
 * form is tested through the curl of G(x) = M A(M x) + A(x), which must vanish
 * because G is a pure gauge gradient.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <charconv>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treverse/enumeration.hpp"
#include "treverse/errors.hpp"
#include "treverse/random.hpp"
#include "treverse/symmetry_core.hpp"

namespace treverse {

inline constexpr double kAnalyticTol = 1e-9;
inline constexpr double kCurlTol = 1e-6;
inline constexpr double kCurlStep = 1e-5;
inline constexpr int kDefaultFieldSamples = 256;
inline constexpr double kDefaultSampleBox = 1.0;

enum class FieldFamily { Constant, AxialProfile, MirrorPlanar };

inline const char* to_string(FieldFamily f) {
    switch (f) {
        case FieldFamily::Constant: return "constant";
        case FieldFamily::AxialProfile: return "axial";
        case FieldFamily::MirrorPlanar: return "planar";
    }
    return "constant";
}

/// c * x^i * y^j
struct Monomial {
    double coef = 0.0;
    int i = 0;
    int j = 0;
};

/// Polynomial in (x, y), sparse by exponent pair.
class Poly2 {
public:
    Poly2() = default;
    explicit Poly2(const std::vector<Monomial>& terms) {
        for (const auto& t : terms) add(t.coef, t.i, t.j);
    }

    void add(double c, int i, int j) {
        if (i < 0 || j < 0) throw InvalidArgument("Poly2: negative exponent");
        if (c == 0.0) return;
        coef_[{i, j}] += c;
    }

    [[nodiscard]] double operator()(double x, double y) const {
        double s = 0.0;
        for (const auto& [e, c] : coef_) s += c * std::pow(x, e.first) * std::pow(y, e.second);
        return s;
    }

    [[nodiscard]] Poly2 dx() const {
        Poly2 r;
        for (const auto& [e, c] : coef_)
            if (e.first > 0) r.add(c * e.first, e.first - 1, e.second);
        return r;
    }

    [[nodiscard]] Poly2 dy() const {
        Poly2 r;
        for (const auto& [e, c] : coef_)
            if (e.second > 0) r.add(c * e.second, e.first, e.second - 1);
        return r;
    }

    /// Particular solution psi of psi_xx + psi_yy = *this, built as
    /// psi = sum_k (-1)^k Ix^{2(k+1)} d_y^{2k} p with Ix the x-antiderivative.
    [[nodiscard]] Poly2 poisson_solution() const {
        Poly2 psi;
        for (const auto& [e, c] : coef_) {
            double coef = c;
            int i = e.first, j = e.second;
            for (int k = 0; j >= 0; ++k) {
                const double ix = coef / static_cast<double>((i + 1) * (i + 2));
                psi.add(k % 2 == 0 ? ix : -ix, i + 2, j);
                if (j < 2) break;
                coef = ix * j * (j - 1);
                i += 2;
                j -= 2;
            }
        }
        return psi;
    }

    [[nodiscard]] std::vector<Monomial> terms() const {
        std::vector<Monomial> out;
        for (const auto& [e, c] : coef_) out.push_back({c, e.first, e.second});
        return out;
    }

    /// B(x, y) = B(x, -y) = B(y, x) coefficientwise.
    [[nodiscard]] bool mirror_symmetric(double tol = 0.0) const {
        for (const auto& [e, c] : coef_) {
            if (e.second % 2 != 0 && std::abs(c) > tol) return false;
            const auto it = coef_.find({e.second, e.first});
            const double swapped = it == coef_.end() ? 0.0 : it->second;
            if (std::abs(swapped - c) > tol) return false;
        }
        return true;
    }

private:
    std::map<std::pair<int, int>, double> coef_;
};

/// Analytic magnetic field, reduced units.
struct FieldSpec {
    FieldFamily family = FieldFamily::Constant;
    Eigen::Vector3d constant = Eigen::Vector3d::Zero();
    std::vector<double> profile;     ///< axial: B = p(x^2 + y^2) z^, p(u) = sum profile[k] u^k
    std::vector<Monomial> planar;    ///< planar: B = sum c x^i y^j z^
    std::string name;

    static FieldSpec make_constant(const Eigen::Vector3d& b, std::string name = {}) {
        FieldSpec f;
        f.family = FieldFamily::Constant;
        f.constant = b;
        f.name = std::move(name);
        return f;
    }

    static FieldSpec make_zero() { return make_constant(Eigen::Vector3d::Zero(), "zero"); }

    static FieldSpec make_axial(std::vector<double> coeffs, std::string name = {}) {
        FieldSpec f;
        f.family = FieldFamily::AxialProfile;
        f.profile = std::move(coeffs);
        f.name = std::move(name);
        return f;
    }

    static FieldSpec make_planar(std::vector<Monomial> terms, std::string name = {}) {
        FieldSpec f;
        f.family = FieldFamily::MirrorPlanar;
        f.planar = std::move(terms);
        f.name = std::move(name);
        f.validate();
        return f;
    }

    void validate() const {
        if (family == FieldFamily::MirrorPlanar && !Poly2(planar).mirror_symmetric(1e-14))
            throw InvalidArgument("planar field must satisfy B(x,y) = B(x,-y) = B(y,x)");
    }

    /// Canonical textual form, matching the CLI grammar.
    [[nodiscard]] std::string id() const;

    /// The family's flip B -> -B.
    [[nodiscard]] FieldSpec negated() const {
        FieldSpec f = *this;
        f.name.clear();
        f.constant = -constant;
        for (auto& c : f.profile) c = -c;
        for (auto& t : f.planar) t.coef = -t.coef;
        return f;
    }

    [[nodiscard]] bool is_zero() const {
        switch (family) {
            case FieldFamily::Constant: return constant.isZero(0.0);
            case FieldFamily::AxialProfile:
                return std::all_of(profile.begin(), profile.end(), [](double c) { return c == 0.0; });
            case FieldFamily::MirrorPlanar:
                return std::all_of(planar.begin(), planar.end(), [](const Monomial& m) { return m.coef == 0.0; });
        }
        return false;
    }
};

namespace detail {

/// Shortest round-trip decimal form.
inline std::string fmt_num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

}  // namespace detail

inline std::string FieldSpec::id() const {
    if (!name.empty()) return name;
    std::string s;
    switch (family) {
        case FieldFamily::Constant:
            s = "constant:" + detail::fmt_num(constant.x()) + "," + detail::fmt_num(constant.y()) + "," +
                detail::fmt_num(constant.z());
            break;
        case FieldFamily::AxialProfile:
            s = "axial:";
            for (std::size_t k = 0; k < profile.size(); ++k) s += (k ? "," : "") + detail::fmt_num(profile[k]);
            break;
        case FieldFamily::MirrorPlanar:
            s = "planar:";
            for (std::size_t k = 0; k < planar.size(); ++k)
                s += (k ? "," : "") + detail::fmt_num(planar[k].coef) + ":" + std::to_string(planar[k].i) + ":" +
                     std::to_string(planar[k].j);
            break;
    }
    return s;
}

inline double eval_profile(const std::vector<double>& coeffs, double u) {
    double s = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * u + *it;
    return s;
}

inline Eigen::Vector3d eval_field(const FieldSpec& spec, const Eigen::Vector3d& x) {
    switch (spec.family) {
        case FieldFamily::Constant: return spec.constant;
        case FieldFamily::AxialProfile:
            return {0.0, 0.0, eval_profile(spec.profile, x.x() * x.x() + x.y() * x.y())};
        case FieldFamily::MirrorPlanar: {
            double b = 0.0;
            for (const auto& t : spec.planar) b += t.coef * std::pow(x.x(), t.i) * std::pow(x.y(), t.j);
            return {0.0, 0.0, b};
        }
    }
    return Eigen::Vector3d::Zero();
}

/// Largest |B| over the cube [-L, L]^3 (grid estimate for non-constant families).
inline double max_field_magnitude(const FieldSpec& spec, double half_side) {
    if (spec.family == FieldFamily::Constant) return spec.constant.norm();
    constexpr int n = 81;
    double best = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double x = -half_side + 2.0 * half_side * a / (n - 1);
            const double y = -half_side + 2.0 * half_side * b / (n - 1);
            best = std::max(best, eval_field(spec, {x, y, 0.0}).norm());
        }
    return best;
}

enum class GaugeChoice {
    Symmetric,  ///< A = B x x / 2 for constant fields
    Azimuthal,  ///< A_phi(rho) = (1/rho) int_0^rho r p(r^2) dr for axial (and z-directed constant) fields
    Poisson     ///< A = (-d_y psi, d_x psi, 0) with lap psi = B for planar fields
};

inline const char* to_string(GaugeChoice g) {
    switch (g) {
        case GaugeChoice::Symmetric: return "symmetric";
        case GaugeChoice::Azimuthal: return "azimuthal";
        case GaugeChoice::Poisson: return "poisson";
    }
    return "symmetric";
}

inline GaugeChoice default_gauge(const FieldSpec& spec) {
    switch (spec.family) {
        case FieldFamily::Constant: return GaugeChoice::Symmetric;
        case FieldFamily::AxialProfile: return GaugeChoice::Azimuthal;
        case FieldFamily::MirrorPlanar: return GaugeChoice::Poisson;
    }
    return GaugeChoice::Symmetric;
}

/// Coulomb-gauge vector potential; curl A = B.
class VectorPotential {
public:
    VectorPotential(const FieldSpec& spec, GaugeChoice gauge) : spec_(spec), gauge_(gauge) {
        const bool z_constant = spec.family == FieldFamily::Constant && spec.constant.x() == 0.0 &&
                                spec.constant.y() == 0.0;
        switch (gauge) {
            case GaugeChoice::Symmetric:
                if (spec.family != FieldFamily::Constant)
                    throw InvalidArgument("symmetric gauge requires a constant field");
                break;
            case GaugeChoice::Azimuthal:
                if (spec.family == FieldFamily::AxialProfile) profile_ = spec.profile;
                else if (z_constant) profile_ = {spec.constant.z()};
                else throw InvalidArgument("azimuthal gauge requires an axial or z-directed constant field");
                break;
            case GaugeChoice::Poisson: {
                if (spec.family != FieldFamily::MirrorPlanar && !z_constant)
                    throw InvalidArgument("poisson gauge requires a planar or z-directed constant field");
                const Poly2 b = spec.family == FieldFamily::MirrorPlanar
                                    ? Poly2(spec.planar)
                                    : Poly2(std::vector<Monomial>{{spec.constant.z(), 0, 0}});
                const Poly2 psi = b.poisson_solution();
                ax_ = psi.dy();
                ay_ = psi.dx();
                break;
            }
        }
    }

    [[nodiscard]] Eigen::Vector3d operator()(const Eigen::Vector3d& x) const {
        switch (gauge_) {
            case GaugeChoice::Symmetric: return 0.5 * spec_.constant.cross(x);
            case GaugeChoice::Azimuthal: {
                // A_phi / rho = sum c_k rho^{2k} / (2k + 2); regular at rho = 0.
                const double u = x.x() * x.x() + x.y() * x.y();
                double s = 0.0, uk = 1.0;
                for (std::size_t k = 0; k < profile_.size(); ++k, uk *= u)
                    s += profile_[k] * uk / (2.0 * static_cast<double>(k) + 2.0);
                return {-s * x.y(), s * x.x(), 0.0};
            }
            case GaugeChoice::Poisson: return {-ax_(x.x(), x.y()), ay_(x.x(), x.y()), 0.0};
        }
        return Eigen::Vector3d::Zero();
    }

    [[nodiscard]] GaugeChoice gauge() const noexcept { return gauge_; }

private:
    FieldSpec spec_;
    GaugeChoice gauge_;
    std::vector<double> profile_;
    Poly2 ax_, ay_;
};

inline Eigen::Vector3d vector_potential(const FieldSpec& spec, GaugeChoice gauge, const Eigen::Vector3d& x) {
    return VectorPotential(spec, gauge)(x);
}

/// Central-difference curl with step h.
template <typename F>
Eigen::Vector3d numerical_curl(const F& field, const Eigen::Vector3d& x, double h = kCurlStep) {
    Eigen::Matrix3d jac;  // jac(i, k) = d F_i / d x_k
    for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[k] = h;
        jac.col(k) = (field(x + e) - field(x - e)) / (2.0 * h);
    }
    return {jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0), jac(1, 0) - jac(0, 1)};
}

template <typename F>
double numerical_divergence(const F& field, const Eigen::Vector3d& x, double h = kCurlStep) {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[k] = h;
        d += (field(x + e)[k] - field(x - e)[k]) / (2.0 * h);
    }
    return d;
}

inline std::vector<Eigen::Vector3d> sample_points(int samples, double half_side, std::uint64_t seed) {
    Rng rng{seed};
    std::uniform_real_distribution<double> u(-half_side, half_side);
    std::vector<Eigen::Vector3d> pts(static_cast<std::size_t>(samples));
    for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
    return pts;
}

enum class Condition { BField, APotential };

struct CompatReport {
    std::string op_id;
    std::string field_id;
    Condition condition = Condition::BField;
    double max_residual = 0.0;
    double tol = 0.0;
    bool verdict = false;
};

struct SampleOptions {
    int samples = kDefaultFieldSamples;
    double half_side = kDefaultSampleBox;
    std::uint64_t seed = 7;
};

inline void require_orthogonal_involution(const Eigen::Matrix3d& a, double tol = kAnalyticTol) {
    if (max_abs(a * a.transpose() - Eigen::Matrix3d::Identity()) > tol)
        throw InvalidOperation("operation block is not orthogonal");
    if (max_abs(a * a - Eigen::Matrix3d::Identity()) > tol) throw InvalidOperation("operation block is not an involution");
}

/// max_x || det(A) A B(A x) + B(x) ||_inf over sampled points.
inline double b_compat_residual(const Eigen::Matrix3d& a, const FieldSpec& spec, const SampleOptions& opt = {}) {
    const double det = a.determinant();
    double worst = 0.0;
    for (const auto& x : sample_points(opt.samples, opt.half_side, opt.seed))
        worst = std::max(worst, max_abs(det * a * eval_field(spec, a * x) + eval_field(spec, x)));
    return worst;
}

inline CompatReport check_B_compat(const Eigen::Matrix3d& a, const FieldSpec& spec, const SampleOptions& opt = {},
                                   double tol = kAnalyticTol, std::string op_id = {}) {
    require_orthogonal_involution(a);
    CompatReport r{std::move(op_id), spec.id(), Condition::BField, b_compat_residual(a, spec, opt), tol, false};
    r.verdict = r.max_residual <= tol;
    return r;
}

/// max_x || curl( A pot(A x) + pot(x) ) ||_inf over sampled points.
inline CompatReport check_A_compat(const Eigen::Matrix3d& a, const FieldSpec& spec, GaugeChoice gauge,
                                   const SampleOptions& opt = {}, double tol = kCurlTol, std::string op_id = {}) {
    require_orthogonal_involution(a);
    const VectorPotential pot(spec, gauge);
    const auto g = [&](const Eigen::Vector3d& x) -> Eigen::Vector3d { return a * pot(a * x) + pot(x); };
    double worst = 0.0;
    for (const auto& x : sample_points(opt.samples, opt.half_side, opt.seed))
        worst = std::max(worst, max_abs(numerical_curl(g, x)));
    CompatReport r{std::move(op_id), spec.id(), Condition::APotential, worst, tol, false};
    r.verdict = worst <= tol;
    return r;
}

/// Max over sampled points of || curl A - B ||_inf and |div A|.
struct GaugeResidual {
    double curl = 0.0;
    double divergence = 0.0;
};

inline GaugeResidual gauge_residual(const FieldSpec& spec, GaugeChoice gauge, const SampleOptions& opt = {}) {
    const VectorPotential pot(spec, gauge);
    GaugeResidual r;
    for (const auto& x : sample_points(opt.samples, opt.half_side, opt.seed)) {
        r.curl = std::max(r.curl, max_abs(numerical_curl(pot, x) - eval_field(spec, x)));
        r.divergence = std::max(r.divergence, std::abs(numerical_divergence(pot, x)));
    }
    return r;
}

/// A(theta) = [[cos, sin, 0], [sin, -cos, 0], [0, 0, 1]].
inline TimeReversalOp continuous_family(double theta) {
    Eigen::Matrix3d a;
    const double c = std::cos(theta), s = std::sin(theta);
    a << c, s, 0.0, s, -c, 0.0, 0.0, 0.0, 1.0;
    return {Eigen::MatrixXd(a), OpKind::ContinuousParametric, "theta:" + detail::fmt_num(theta)};
}

struct CompatibleSet {
    std::vector<TimeReversalOp> ops;
    bool continuous_family_applies = false;
};

/// Filters the 20-op catalog through the B condition; the continuous family is
/// reported as applicable when every theta on a 16-point grid passes.
inline CompatibleSet find_compatible(const FieldSpec& spec, const SampleOptions& opt = {}) {
    CompatibleSet out;
    for (auto& op : single_particle_catalog())
        if (check_B_compat(op.matrix(), spec, opt).verdict) out.ops.push_back(std::move(op));
    out.continuous_family_applies = true;
    for (int k = 0; k < 16; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / 16.0;
        if (!check_B_compat(continuous_family(theta).matrix(), spec, opt).verdict) {
            out.continuous_family_applies = false;
            break;
        }
    }
    return out;
}

enum class BlockConstraint { PerParticleBlocksRequired, Unrestricted };

inline const char* to_string(BlockConstraint c) {
    return c == BlockConstraint::PerParticleBlocksRequired ? "per-particle-blocks-required" : "unrestricted";
}

inline BlockConstraint species_block_constraint(const std::vector<double>& masses, const std::vector<double>& charges) {
    if (masses.empty() || charges.empty()) throw InvalidArgument("species_block_constraint: empty species list");
    if (masses.size() != charges.size()) throw DimensionMismatch("species_block_constraint: list lengths differ");
    for (std::size_t i = 1; i < masses.size(); ++i)
        if (masses[i] != masses[0] || charges[i] != charges[0]) return BlockConstraint::PerParticleBlocksRequired;
    return BlockConstraint::Unrestricted;
}

/// Constant B z^, axial p(u) = 1 + u/2, planar B = 1 + (x^2 + y^2) + x^2 y^2.
inline std::vector<FieldSpec> builtin_fields() {
    return {
        FieldSpec::make_constant({0.0, 0.0, 1.0}, "constant:0,0,1"),
        FieldSpec::make_axial({1.0, 0.5}, "axial:1,0.5"),
        FieldSpec::make_planar({{1.0, 0, 0}, {1.0, 2, 0}, {1.0, 0, 2}, {1.0, 2, 2}}, "planar:1:0:0,1:2:0,1:0:2,1:2:2"),
    };
}

}  // namespace treverse
