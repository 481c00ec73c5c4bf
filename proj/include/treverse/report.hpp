/**
 * @file report.hpp
 * @brief JSON and CSV renderings of module results.
 *
 * Key order is fixed (ordered_json) so identical inputs give identical bytes.
 */
#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <array>
#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include "treverse/enumeration.hpp"
#include "treverse/field_compat.hpp"
#include "treverse/md_dynamics.hpp"
#include "treverse/pauli_spin.hpp"
#include "treverse/quantum_correlator.hpp"

namespace treverse::report {

using Json = nlohmann::ordered_json;

inline Json matrix(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c) + 0.0);
        rows.push_back(row);
    }
    return rows;
}

/// Complex entries as [re, im].
inline Json matrix(const Mat2c& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < 2; ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < 2; ++c) row.push_back(Json::array({m(r, c).real() + 0.0, m(r, c).imag() + 0.0}));
        rows.push_back(row);
    }
    return rows;
}

inline Json op(const TimeReversalOp& o) {
    Json j;
    j["id"] = o.id();
    j["kind"] = to_string(o.kind());
    if (o.exact()) {
        j["perm"] = o.exact()->perm;
        j["sign"] = o.exact()->sign;
    } else {
        j["matrix"] = matrix(o.matrix());
    }
    return j;
}

inline Json tagged(const TaggedOp& t) {
    Json j = op(t.op);
    j["class"] = {t.cls.r1, t.cls.r2};
    return j;
}

inline Json enumeration(const EnumerationReport& r) {
    Json j;
    j["dim"] = r.m;
    j["family"] = r.family;
    j["total"] = r.total;
    j["formula_total"] = r.formula_total;
    j["match"] = r.match;
    Json classes = Json::array();
    for (const auto& c : r.per_class)
        classes.push_back({{"r1", c.cls.r1},
                           {"r2", c.cls.r2},
                           {"tableau", c.tableau.rows},
                           {"class_size", c.class_size},
                           {"signed_count", c.signed_count}});
    j["classes"] = classes;
    return j;
}

inline Json compat(const CompatReport& r) {
    return {{"op", r.op_id},
            {"field", r.field_id},
            {"condition", r.condition == Condition::BField ? "B" : "A"},
            {"max_residual", r.max_residual},
            {"tol", r.tol},
            {"verdict", r.verdict}};
}

inline Json spin_entry(const SpinCatalogEntry& e) {
    return {{"id", e.op.id},
            {"matrix", matrix(e.op.m)},
            {"preserves_su2", e.verdict.preserves_su2},
            {"t_squared", to_string(e.verdict.t_squared)},
            {"valid", e.verdict.valid()}};
}

inline Json spin_lift(const SpinLift& l) {
    return {{"p", matrix(Eigen::MatrixXd(l.p))}, {"u", matrix(l.u)}, {"u_s", matrix(l.u_s)}};
}

inline Json kubo_symmetry(const KuboSymmetryReport& r) {
    Json pts = Json::array();
    for (const auto& p : r.points) pts.push_back({{"t", p.t}, {"lhs", p.lhs}, {"rhs", p.rhs}, {"deviation", p.deviation}});
    return {{"tr", r.t_id},
            {"eta_phi", to_string(r.eta_phi)},
            {"eta_psi", to_string(r.eta_psi)},
            {"max_deviation", r.max_deviation},
            {"max_imag_residual", r.max_imag_residual},
            {"tol", r.tol},
            {"verdict", r.verdict},
            {"points", pts}};
}

inline Json diffusion(const DiffusionTensor& d, const AntisymmetryVerdict& v) {
    return {{"t_max", d.t_max},
            {"D", matrix(Eigen::MatrixXd(d.d))},
            {"se", matrix(Eigen::MatrixXd(d.se))},
            {"converged", d.converged},
            {"antisymmetry", {{"sum", v.sum}, {"se", v.se}, {"relative", v.relative}, {"verdict", v.pass}}}};
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest round-trip decimal for a double.
inline std::string num(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// lag, then value and SE per channel.
inline void correlator_csv(std::ostream& os, const CorrelatorEstimate& est) {
    os << "lag";
    for (const auto& ch : est.channels) os << "," << ch.key.label() << "," << ch.key.label() << "_se";
    os << "\n";
    for (std::size_t l = 0; l < est.lags.size(); ++l) {
        os << num(est.lags[l]);
        for (const auto& ch : est.channels)
            os << "," << num(ch.mean(static_cast<Eigen::Index>(l))) << "," << num(ch.se(static_cast<Eigen::Index>(l)));
        os << "\n";
    }
}

/// Two columns (t, value) for one channel.
inline void two_column(std::ostream& os, const CorrelatorEstimate& est, const Channel& ch) {
    for (std::size_t l = 0; l < est.lags.size(); ++l)
        os << num(est.lags[l]) << " " << num(ch.mean(static_cast<Eigen::Index>(l))) << "\n";
}

}  // namespace treverse::report
