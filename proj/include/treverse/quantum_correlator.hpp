/**
 * @file quantum_correlator.hpp
 * @brief Exact diagonalization of small spin Hamiltonians and the Kubo canonical correlator.
 *
 * Site 0 is the leftmost Kronecker factor. An anti-unitary T = U K with
 * U = U_0 (x) U_1 (x) ... acts on operators as T O T^-1 = U O^* U^dagger.
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "treverse/errors.hpp"
#include "treverse/pauli_spin.hpp"

namespace treverse {

using MatXc = Eigen::MatrixXcd;

inline constexpr int kMaxSites = 6;
inline constexpr double kHermitianTol = 1e-13;
inline constexpr double kGapTol = 1e-12;
inline constexpr double kImagTol = 1e-10;
inline constexpr double kSignatureTol = 1e-10;
inline constexpr double kCommuteTol = 1e-11;

inline double max_abs_c(const MatXc& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline MatXc kron(const MatXc& a, const MatXc& b) {
    MatXc out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// I (x) ... (x) op (at `site`) (x) ... (x) I on n sites.
inline MatXc site_operator(int n, int site, const Mat2c& op) {
    if (site < 0 || site >= n) throw InvalidArgument("site_operator: site out of range");
    MatXc out = MatXc::Identity(1, 1);
    for (int s = 0; s < n; ++s) out = kron(out, s == site ? MatXc(op) : MatXc(Mat2c::Identity()));
    return out;
}

inline MatXc pauli_at(int n, int site, Axis a) { return site_operator(n, site, pauli(a)); }

struct Exchange {
    int j = 0;
    int k = 1;
    double coupling = 0.0;
};

/// H = -sum_j q_j sigma_j . B_j + sum J_jk sigma_j . sigma_k
struct SpinSystem {
    int n = 1;
    std::vector<Eigen::Vector3d> fields;
    std::vector<double> charges;
    std::vector<Exchange> exchange;

    static SpinSystem uniform(int n, const Eigen::Vector3d& b, double q = 1.0) {
        SpinSystem s;
        s.n = n;
        s.fields.assign(static_cast<std::size_t>(n), b);
        s.charges.assign(static_cast<std::size_t>(n), q);
        return s;
    }

    void validate() const {
        if (n < 1 || n > kMaxSites) throw InvalidArgument("SpinSystem: site count must be in 1..6");
        if (fields.size() != static_cast<std::size_t>(n) || charges.size() != static_cast<std::size_t>(n))
            throw DimensionMismatch("SpinSystem: need one field and one coupling per site");
        for (const auto& e : exchange)
            if (e.j < 0 || e.k < 0 || e.j >= n || e.k >= n || e.j == e.k)
                throw InvalidArgument("SpinSystem: bad exchange pair");
    }

    [[nodiscard]] Eigen::Index hilbert_dim() const { return Eigen::Index{1} << n; }

    [[nodiscard]] MatXc hamiltonian() const {
        validate();
        const Eigen::Index d = hilbert_dim();
        MatXc h = MatXc::Zero(d, d);
        for (int j = 0; j < n; ++j) {
            const auto& b = fields[static_cast<std::size_t>(j)];
            h -= charges[static_cast<std::size_t>(j)] * site_operator(n, j, sigma_dot(b));
        }
        for (const auto& e : exchange)
            for (int a = 0; a < 3; ++a)
                h += e.coupling * pauli_at(n, e.j, static_cast<Axis>(a)) * pauli_at(n, e.k, static_cast<Axis>(a));
        if (max_abs_c(h - h.adjoint()) > kHermitianTol) throw NumericalError("SpinSystem: H is not Hermitian");
        return h;
    }
};

/// Eigendecomposition of H with Boltzmann weights at inverse temperature beta.
class ThermalState {
public:
    ThermalState(const MatXc& h, double beta) : beta_(beta) {
        if (!(beta > 0.0)) throw InvalidArgument("ThermalState: beta must be positive");
        if (h.rows() != h.cols()) throw DimensionMismatch("ThermalState: H must be square");
        if (max_abs_c(h - h.adjoint()) > kHermitianTol) throw InvalidArgument("ThermalState: H is not Hermitian");
        Eigen::SelfAdjointEigenSolver<MatXc> es(h);
        if (es.info() != Eigen::Success) throw NumericalError("ThermalState: diagonalization failed");
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
        const double e0 = energies_.minCoeff();
        weights_ = (-(energies_.array() - e0) * beta).exp().matrix();
        weights_ /= weights_.sum();
    }

    ThermalState(const SpinSystem& sys, double beta) : ThermalState(sys.hamiltonian(), beta) {}

    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] const Eigen::VectorXd& energies() const noexcept { return energies_; }
    [[nodiscard]] const MatXc& eigenvectors() const noexcept { return vectors_; }
    [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return weights_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return energies_.size(); }

    /// O in the energy eigenbasis.
    [[nodiscard]] MatXc to_eigenbasis(const MatXc& o) const {
        if (o.rows() != dim() || o.cols() != dim()) throw DimensionMismatch("ThermalState: operator size mismatch");
        return vectors_.adjoint() * o * vectors_;
    }

private:
    double beta_;
    Eigen::VectorXd energies_;
    MatXc vectors_;
    Eigen::VectorXd weights_;
};

/// (1/beta) int_0^beta dlambda p_m e^{lambda (E_m - E_n)}, evaluated without overflow.
inline double kubo_weight(double pm, double pn, double delta, double beta) {
    if (std::abs(delta) <= kGapTol) return pm;
    const double x = beta * delta;
    if (delta < 0.0) return pm * std::expm1(x) / x;
    return -pn * std::expm1(-x) / x;
}

struct CorrelatorValue {
    double value = 0.0;
    double imag_residual = 0.0;
};

inline void require_hermitian(const MatXc& o, const char* what) {
    if (max_abs_c(o - o.adjoint()) > kHermitianTol * std::max(1.0, max_abs_c(o)))
        throw InvalidArgument(std::string(what) + ": observable is not Hermitian");
}

/// <phi(t_phi); psi(t_psi)> in the canonical ensemble.
inline CorrelatorValue canonical_correlator(const ThermalState& st, const MatXc& phi, const MatXc& psi,
                                            double t_psi, double t_phi = 0.0) {
    require_hermitian(phi, "canonical_correlator");
    require_hermitian(psi, "canonical_correlator");
    const MatXc a = st.to_eigenbasis(phi);
    const MatXc b = st.to_eigenbasis(psi);
    const auto& e = st.energies();
    const auto& p = st.weights();
    const double dt = t_psi - t_phi;
    std::complex<double> sum = 0.0;
    for (Eigen::Index m = 0; m < st.dim(); ++m)
        for (Eigen::Index n = 0; n < st.dim(); ++n) {
            const double w = kubo_weight(p(m), p(n), e(m) - e(n), st.beta());
            if (w == 0.0) continue;
            sum += w * a(m, n) * b(n, m) * std::polar(1.0, (e(n) - e(m)) * dt);
        }
    CorrelatorValue out{sum.real(), std::abs(sum.imag())};
    if (out.imag_residual > kImagTol)
        throw NumericalError("canonical_correlator: imaginary residue exceeds tolerance");
    return out;
}

inline CorrelatorValue canonical_correlator(const SpinSystem& sys, double beta, const MatXc& phi, const MatXc& psi,
                                            double t) {
    return canonical_correlator(ThermalState(sys, beta), phi, psi, t);
}

/// Per-site anti-unitary T = (U_0 (x) ... (x) U_{n-1}) K.
class SpinTimeReversal {
public:
    explicit SpinTimeReversal(std::vector<Mat2c> sites, std::string id = {}) : sites_(std::move(sites)), id_(std::move(id)) {
        if (sites_.empty()) throw InvalidArgument("SpinTimeReversal: no sites");
        for (const auto& u : sites_)
            if (unitarity_residual(u) > 1e-12) throw InvalidArgument("SpinTimeReversal: site operator is not unitary");
        u_ = MatXc::Identity(1, 1);
        for (const auto& s : sites_) u_ = kron(u_, MatXc(s));
    }

    static SpinTimeReversal uniform(int n, const Mat2c& u, std::string id = {}) {
        return SpinTimeReversal(std::vector<Mat2c>(static_cast<std::size_t>(n), u), std::move(id));
    }

    [[nodiscard]] int sites() const noexcept { return static_cast<int>(sites_.size()); }
    [[nodiscard]] const MatXc& unitary() const noexcept { return u_; }
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

    [[nodiscard]] MatXc apply(const MatXc& o) const {
        if (o.rows() != u_.rows() || o.cols() != u_.cols()) throw DimensionMismatch("SpinTimeReversal: size mismatch");
        return u_ * o.conjugate() * u_.adjoint();
    }

private:
    std::vector<Mat2c> sites_;
    std::string id_;
    MatXc u_;
};

enum class Signature { Plus, Minus, None };

inline const char* to_string(Signature s) {
    switch (s) {
        case Signature::Plus: return "+1";
        case Signature::Minus: return "-1";
        case Signature::None: return "none";
    }
    return "none";
}

inline Signature detect_signature(const SpinTimeReversal& t, const MatXc& o, double tol = kSignatureTol) {
    const MatXc to = t.apply(o);
    if (max_abs_c(to - o) <= tol) return Signature::Plus;
    if (max_abs_c(to + o) <= tol) return Signature::Minus;
    return Signature::None;
}

inline double signature_value(Signature s) {
    if (s == Signature::None) throw SignatureError("observable has no definite signature");
    return s == Signature::Plus ? 1.0 : -1.0;
}

inline bool tr_commutes(const MatXc& h, const SpinTimeReversal& t, double tol = kCommuteTol) {
    if (h.rows() != t.unitary().rows()) throw DimensionMismatch("tr_commutes: Hilbert dimension mismatch");
    return max_abs_c(t.apply(h) - h) <= tol;
}

inline bool tr_commutes(const SpinSystem& sys, const SpinTimeReversal& t, double tol = kCommuteTol) {
    if (sys.n != t.sites()) throw DimensionMismatch("tr_commutes: site count mismatch");
    return tr_commutes(sys.hamiltonian(), t, tol);
}

struct KuboPoint {
    double t = 0.0;
    double lhs = 0.0;  ///< <phi(0); psi(t)>
    double rhs = 0.0;  ///< eta_phi eta_psi <phi(t); psi(0)>
    double deviation = 0.0;
};

struct KuboSymmetryReport {
    std::string t_id;
    Signature eta_phi = Signature::None;
    Signature eta_psi = Signature::None;
    std::vector<KuboPoint> points;
    double max_deviation = 0.0;
    double max_imag_residual = 0.0;
    double tol = 0.0;
    bool verdict = false;
};

inline KuboSymmetryReport verify_kubo_symmetry(const SpinSystem& sys, double beta, const SpinTimeReversal& t,
                                               const MatXc& phi, const MatXc& psi, const std::vector<double>& times,
                                               double tol = 1e-8) {
    if (!tr_commutes(sys, t))
        throw PreconditionError("verify_kubo_symmetry: time reversal does not commute with the Hamiltonian");
    KuboSymmetryReport rep;
    rep.t_id = t.id();
    rep.eta_phi = detect_signature(t, phi);
    rep.eta_psi = detect_signature(t, psi);
    const double eta = signature_value(rep.eta_phi) * signature_value(rep.eta_psi);
    const ThermalState st(sys, beta);
    rep.tol = tol;
    for (double time : times) {
        const auto l = canonical_correlator(st, phi, psi, time, 0.0);
        const auto r = canonical_correlator(st, phi, psi, 0.0, time);
        KuboPoint pt{time, l.value, eta * r.value, std::abs(l.value - eta * r.value)};
        rep.max_deviation = std::max(rep.max_deviation, pt.deviation);
        rep.max_imag_residual = std::max({rep.max_imag_residual, l.imag_residual, r.imag_residual});
        rep.points.push_back(pt);
    }
    rep.verdict = rep.max_deviation <= tol;
    return rep;
}

/// The documented two-spin instance: field along x on both sites, weak exchange.
struct TwoSpinInstance {
    SpinSystem sys;
    double beta = 1.3;
    SpinTimeReversal t;
    MatXc phi;
    MatXc psi;
    std::vector<double> times;
};

inline TwoSpinInstance two_spin_instance() {
    SpinSystem sys = SpinSystem::uniform(2, Eigen::Vector3d(0.7, 0.0, 0.0));
    sys.exchange.push_back({0, 1, 0.3});
    std::vector<double> times;
    for (int k = 0; k < 16; ++k) times.push_back(10.0 * k / 15.0);
    return {sys, 1.3, SpinTimeReversal::uniform(2, pauli(Axis::X), "sigma_x (x) sigma_x K"), pauli_at(2, 0, Axis::X),
            pauli_at(2, 1, Axis::X), times};
}

}  // namespace treverse
