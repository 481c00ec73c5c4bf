/**
 * @file acceptance.hpp
 * @brief Acceptance criteria 1-9 as deterministic functions of a seed.
 *
 * Criterion 10 (byte-identical `verify` reports) is checked by running the
 * CLI twice; see tests/acceptance_main.cpp.
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "treverse/enumeration.hpp"
#include "treverse/field_compat.hpp"
#include "treverse/md_dynamics.hpp"
#include "treverse/pauli_spin.hpp"
#include "treverse/quantum_correlator.hpp"
#include "treverse/symmetry_core.hpp"
#include "treverse/testing/oracles.hpp"

namespace treverse::acceptance {

// Pinned tolerances.
inline constexpr double kAntisymplecticTol = 1e-12;
inline constexpr double kPropertyTol = 1e-12;
inline constexpr double kCurlAcceptTol = 1e-6;
inline constexpr double kFamilyTol = 1e-12;
inline constexpr double kSpinCouplingTol = 1e-10;
inline constexpr double kRealityTol = 1e-10;
inline constexpr double kOracleTol = 1e-8;
inline constexpr double kKuboSymmetryTol = 1e-8;
inline constexpr double kSeMultiple = 3.0;
inline constexpr double kRelativeAntisym = 0.1;
inline constexpr double kFreeConjugacyTol = 1e-8;
inline constexpr double kRequiredOrder = 2.0;
/// Scatter of an order estimate from three dt levels averaged over 16 states.
inline constexpr double kOrderEstimateTol = 0.1;
inline constexpr double kAngularTol = 1e-12;

struct Metric {
    std::string name;
    double value = 0.0;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::vector<Metric> metrics;
    std::vector<std::string> notes;

    void metric(std::string n, double v) { metrics.push_back({std::move(n), v}); }
    void note(std::string n) { notes.push_back(std::move(n)); }
    /// Records a failed sub-check and clears the verdict.
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            note("failed: " + what);
        }
    }
};

struct Options {
    std::uint64_t seed = 42;
};

inline std::uint64_t sub_seed(const Options& o, std::uint64_t k) { return o.seed * 1000003ULL + k; }

// ---------------------------------------------------------------------------

inline CriterionResult counting(const Options&) {
    CriterionResult r{1, "counting", true, {}, {}};
    r.metric("count_binary_3", static_cast<double>(count_binary(3)));
    r.require(count_binary(3) == 20, "count_binary(3) == 20");
    r.require(enumerate_binary(3).size() == 20, "enumerate_binary(3) has 20 elements");
    for (int m = 1; m <= 6; ++m) {
        const auto n = enumerate_binary(m).size();
        r.metric("enumerated_binary_" + std::to_string(m), static_cast<double>(n));
        r.require(n == count_binary(m), "binary enumeration length equals formula for M=" + std::to_string(m));
        r.require(n == oracle::brute_force_binary_count(m), "binary enumeration equals brute force for M=" + std::to_string(m));
    }
    r.metric("count_antisymmetric_2", static_cast<double>(count_antisymmetric(2)));
    r.metric("count_antisymmetric_4", static_cast<double>(count_antisymmetric(4)));
    r.require(count_antisymmetric(2) == 2 && enumerate_antisymmetric(2).size() == 2, "antisymmetric M=2 gives 2");
    r.require(count_antisymmetric(4) == 12 && enumerate_antisymmetric(4).size() == 12, "antisymmetric M=4 gives 12");
    for (int m : {2, 4, 6})
        r.require(enumerate_antisymmetric(m).size() == oracle::brute_force_binary_count(m, true),
                  "antisymmetric enumeration equals brute force for M=" + std::to_string(m));
    bool threw = false;
    try {
        (void)count_antisymmetric(3);
    } catch (const NoAntisymmetricFamily&) {
        threw = true;
    }
    r.require(threw, "odd-M antisymmetric request errors");
    return r;
}

inline CriterionResult structural(const Options& o) {
    CriterionResult r{2, "structural_invariants", true, {}, {}};
    std::vector<TimeReversalOp> ops;
    for (int m = 1; m <= 6; ++m)
        for (auto& t : enumerate_binary(m)) ops.push_back(std::move(t.op));
    for (int m : {2, 4, 6})
        for (auto& t : enumerate_antisymmetric(m)) ops.push_back(std::move(t.op));
    double worst = 0.0;
    int exact_fail = 0;
    for (const auto& op : ops) {
        if (!op.exact() || !is_involution(op) || !op.exact()->is_orthogonal()) ++exact_fail;
        worst = std::max(worst, antisymplectic_residual(op.phase_space_matrix()));
    }
    r.metric("operations", static_cast<double>(ops.size()));
    r.metric("exact_failures", exact_fail);
    r.metric("max_antisymplectic_residual", worst);
    r.require(exact_fail == 0, "integer involution and orthogonality");
    r.require(worst <= kAntisymplecticTol, "antisymplectic residual <= 1e-12");

    // omega(P g, P h) = -omega(g, h) and P P g = g on random phase points.
    const auto catalog = single_particle_catalog();
    Rng rng{sub_seed(o, 2)};
    constexpr int kPoints = 10000;
    double sym_dev = 0.0, inv_dev = 0.0;
    for (int k = 0; k < kPoints; ++k) {
        const auto& op = catalog[static_cast<std::size_t>(k) % catalog.size()];
        const PhasePoint g = random_phase_point(3, rng);
        const PhasePoint h = random_phase_point(3, rng);
        const auto omega = [](const PhasePoint& a, const PhasePoint& b) {
            return a.momenta.dot(b.coords) - a.coords.dot(b.momenta);
        };
        const double lhs = omega(apply(op, g), apply(op, h));
        const double rhs = -omega(g, h);
        sym_dev = std::max(sym_dev, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        inv_dev = std::max(inv_dev, inf_distance(apply(op, apply(op, g)), g));
    }
    r.metric("property_points", kPoints);
    r.metric("max_form_deviation", sym_dev);
    r.metric("max_involution_deviation", inv_dev);
    r.require(sym_dev <= kPropertyTol, "symplectic form reversed on random points");
    r.require(inv_dev <= kPropertyTol, "involution on random points");
    return r;
}

inline CriterionResult compat_equivalence(const Options&) {
    CriterionResult r{3, "compatibility_equivalence", true, {}, {}};
    int disagreements = 0, compatible = 0;
    double worst_curl = 0.0;
    for (const auto& f : builtin_fields())
        for (const auto& op : single_particle_catalog()) {
            const Eigen::Matrix3d a = op.matrix();
            const auto b = check_B_compat(a, f);
            const auto ac = check_A_compat(a, f, default_gauge(f));
            if (b.verdict != ac.verdict) {
                ++disagreements;
                r.note("verdicts differ: " + op.id() + " on " + f.id());
            }
            if (b.verdict) {
                ++compatible;
                worst_curl = std::max(worst_curl, ac.max_residual);
            }
        }
    r.metric("pairs", 60);
    r.metric("compatible_pairs", compatible);
    r.metric("disagreements", disagreements);
    r.metric("max_curl_residual_compatible", worst_curl);
    r.require(disagreements == 0, "A and B verdicts agree on 60 pairs");
    r.require(worst_curl <= kCurlAcceptTol, "curl residual <= 1e-6 on compatible pairs");

    const auto constant = FieldSpec::make_constant({0.0, 0.0, 1.0});
    double family = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / 64.0;
        family = std::max(family, check_B_compat(continuous_family(theta).matrix(), constant).max_residual);
    }
    r.metric("continuous_family_max_residual", family);
    r.require(family <= kFamilyTol, "continuous family compatible with constant B along z");
    return r;
}

/// T^2 for the nine spin operators, in catalog order.
inline std::vector<std::pair<std::string, TSquared>> expected_t_squared() {
    return {{"sigma_x", TSquared::Plus}, {"sigma_y", TSquared::Minus},   {"sigma_z", TSquared::Plus},
            {"U1_xy", TSquared::Plus},   {"U1_yz", TSquared::Plus},     {"U2_xz", TSquared::Plus},
            {"U2_xy", TSquared::Invalid}, {"U2_yz", TSquared::Invalid}, {"U1_xz", TSquared::Invalid}};
}

inline CriterionResult spin_lift_check(const Options& o) {
    CriterionResult r{4, "spin_lift", true, {}, {}};
    SampleOptions opt;
    opt.samples = 100;
    opt.seed = sub_seed(o, 4);
    int lifted = 0;
    double worst = 0.0;
    for (const auto& f : builtin_fields())
        for (const auto& op : find_compatible(f, opt).ops) {
            try {
                const auto lift = spin_lift(op.matrix());
                const double res = spin_coupling_residual(op.matrix(), lift.u_s, f, opt);
                worst = std::max(worst, res);
                const bool ok = verify_spin_coupling(op.matrix(), lift.u_s, f, opt, kSpinCouplingTol);
                r.require(ok, "spin coupling for " + op.id() + " on " + f.id());
                ++lifted;
            } catch (const Error& e) {
                r.require(false, "spin_lift for " + op.id() + " on " + f.id() + ": " + e.what());
            }
        }
    r.metric("lifted_pairs", lifted);
    r.metric("max_spin_coupling_residual", worst);

    const auto cat = catalog_spin_ops();
    const auto want = expected_t_squared();
    int mismatches = 0;
    for (std::size_t k = 0; k < want.size(); ++k) {
        const bool ok = k < cat.size() && cat[k].op.id == want[k].first && cat[k].verdict.t_squared == want[k].second;
        if (!ok) {
            ++mismatches;
            r.note("t_squared mismatch at " + want[k].first);
        }
    }
    r.metric("t_squared_mismatches", mismatches);
    r.require(cat.size() == want.size() && mismatches == 0, "t_squared table");
    return r;
}

inline CriterionResult kubo(const Options& o) {
    CriterionResult r{5, "kubo_correlator", true, {}, {}};
    Rng rng{sub_seed(o, 5)};
    std::uniform_real_distribution<double> beta_d(0.2, 2.0), t_d(0.0, 5.0);
    double worst_imag = 0.0, worst_oracle = 0.0;
    for (int k = 0; k < 50; ++k) {
        const int n = 1 + k % 3;
        const auto sys = oracle::random_spin_system(n, rng);
        const MatXc phi = oracle::random_hermitian(sys.hilbert_dim(), rng);
        const MatXc psi = oracle::random_hermitian(sys.hilbert_dim(), rng);
        const double beta = beta_d(rng), t = t_d(rng);
        const auto c = canonical_correlator(sys, beta, phi, psi, t);
        const auto q = oracle::kubo_quadrature(sys.hamiltonian(), beta, phi, psi, t);
        worst_imag = std::max(worst_imag, c.imag_residual);
        worst_oracle = std::max(worst_oracle, std::abs(c.value - q.real()));
    }
    r.metric("systems", 50);
    r.metric("max_imag_residual", worst_imag);
    r.metric("max_oracle_deviation", worst_oracle);
    r.require(worst_imag <= kRealityTol, "reality");
    r.require(worst_oracle <= kOracleTol, "agreement with quadrature");

    const auto inst = two_spin_instance();
    const auto rep = verify_kubo_symmetry(inst.sys, inst.beta, inst.t, inst.phi, inst.psi, inst.times, kKuboSymmetryTol);
    r.metric("symmetry_points", static_cast<double>(rep.points.size()));
    r.metric("symmetry_max_deviation", rep.max_deviation);
    r.require(rep.verdict && rep.points.size() == 16, "symmetry on the two-spin instance");
    return r;
}

/// Free particle, omega = 1, 10^4 trajectories, one origin each, 256 lags over two periods.
inline SimConfig free_particle_config(const Options& o) {
    SimConfig cfg;
    cfg.n = 1;
    cfg.wca = false;
    cfg.half_side = 5.0;
    cfg.field = FieldSpec::make_constant({0.0, 0.0, 1.0});
    cfg.dt = 4.0 * std::numbers::pi / (255.0 * 8.0);
    cfg.burn_in = 0;
    cfg.steps = 255 * 8;
    cfg.sample_stride = 8;
    cfg.origin_stride = 1 << 20;
    cfg.n_trajectories = 10000;
    cfg.seed = sub_seed(o, 6);
    return cfg;
}

inline CriterionResult md_oracle(const Options& o) {
    CriterionResult r{6, "md_free_particle_oracle", true, {}, {}};
    const SimConfig cfg = free_particle_config(o);
    CorrelatorRequest req;
    req.max_lag = 255;
    req.blocks = 100;
    const auto est = velocity_correlator(cfg, req);
    const oracle::FreeParticleOracle orc{cfg.temperature, cfg.mass, cfg.charge, 1.0};
    double max_z = 0.0;
    int violations = 0;
    for (const auto& ch : est.channels)
        for (Eigen::Index l = 0; l < ch.mean.size(); ++l) {
            const double dev = std::abs(ch.mean(l) - orc.correlator(ch.key.a, ch.key.b, est.lags[static_cast<std::size_t>(l)]));
            if (dev > kSeMultiple * ch.se(l)) ++violations;
            if (ch.se(l) > 0.0) max_z = std::max(max_z, dev / ch.se(l));
        }
    r.metric("trajectories", est.n_trajectories);
    r.metric("lags", static_cast<double>(est.lags.size()));
    r.metric("channels", static_cast<double>(est.channels.size()));
    r.metric("max_z", max_z);
    r.metric("violations", violations);
    r.require(violations == 0, "every lag within 3 SE of the cyclotron oracle");
    return r;
}

/// N = 16 WCA particles at T = 1 in a periodic box of side 4.
inline SimConfig interacting_config(const FieldSpec& field, const Options& o, std::uint64_t k) {
    SimConfig cfg;
    cfg.n = 16;
    cfg.half_side = 2.0;
    cfg.field = field;
    cfg.dt = 0.0008;
    cfg.burn_in = 6250;
    cfg.steps = 75000;
    cfg.sample_stride = 25;
    cfg.origin_stride = 5;
    cfg.n_trajectories = 64;
    cfg.seed = sub_seed(o, k);
    return cfg;
}

inline CriterionResult antisymmetry(const Options& o) {
    CriterionResult r{7, "diffusion_antisymmetry", true, {}, {}};
    const std::vector<FieldSpec> fields = {FieldSpec::make_constant({0.0, 0.0, 1.0}, "constant:0,0,1"),
                                           FieldSpec::make_axial({1.0, 0.5}, "axial:1,0.5")};
    std::uint64_t k = 70;
    for (const auto& f : fields) {
        const SimConfig cfg = interacting_config(f, o, k++);
        CorrelatorRequest req;
        req.max_lag = 250;
        req.blocks = 64;
        const auto est = velocity_correlator(cfg, req);
        const auto d = diffusion_tensor(est, est.lags.back());
        const auto v = antisymmetry_check(d);
        const std::string p = f.id() + ".";
        r.metric(p + "D_xx", d.d(0, 0));
        r.metric(p + "D_xy", d.d(0, 1));
        r.metric(p + "D_yx", d.d(1, 0));
        r.metric(p + "sum", v.sum);
        r.metric(p + "sum_se", v.se);
        r.metric(p + "relative", v.relative);
        r.metric(p + "max_energy_drift", est.max_energy_drift);
        r.require(v.pass, f.id() + ": |D_xy + D_yx| <= 3 SE");
        r.require(v.relative < kRelativeAntisym, f.id() + ": relative antisymmetry < 0.1");
    }
    return r;
}

inline CriterionResult conjugacy(const Options& o) {
    CriterionResult r{8, "conjugacy", true, {}, {}};
    const Eigen::Matrix3d kawasaki = Eigen::Vector3d(1.0, -1.0, 1.0).asDiagonal();
    const auto constant = FieldSpec::make_constant({0.0, 0.0, 1.0});

    SimConfig free = interacting_config(constant, o, 80);
    free.wca = false;
    free.dt = 0.005;
    Rng rng = make_stream(free.seed, 0);
    const MDState g0 = init_state(free, rng);
    const double dev = conjugacy_check(kawasaki, g0, 2000, free);
    r.metric("free_deviation", dev);
    r.require(dev <= kFreeConjugacyTol, "free-particle deviation <= 1e-8");

    SimConfig inter = interacting_config(constant, o, 81);
    inter.dt = 0.002;
    inter.burn_in = 500;
    const auto c = conjugacy_convergence_ensemble(kawasaki, inter, 16, 0.5, 0.002, 3);
    for (std::size_t l = 0; l < c.deviations.size(); ++l)
        r.metric("deviation_dt_" + detail::fmt_num(c.dts[l]), c.deviations[l]);
    for (std::size_t l = 0; l < c.orders.size(); ++l) {
        r.metric("order_" + std::to_string(l + 1), c.orders[l]);
        r.require(c.orders[l] >= kRequiredOrder - kOrderEstimateTol, "order >= 2 at refinement " + std::to_string(l + 1));
    }
    return r;
}

inline CriterionResult angular_momentum(const Options& o) {
    CriterionResult r{9, "angular_momentum", true, {}, {}};
    int reversed = 0, covariant = 0;
    for (const auto& op : single_particle_catalog()) {
        const auto v = reverses_angular_momentum(op, 1000, sub_seed(o, 9), kAngularTol);
        if (std::holds_alternative<AlwaysReversed>(v))
            ++reversed;
        else {
            const auto& ce = std::get<Counterexample>(v);
            r.note("L not reversed by " + op.id() + ": L=(" + detail::fmt_num(ce.before.x()) + "," +
                   detail::fmt_num(ce.before.y()) + "," + detail::fmt_num(ce.before.z()) + ") L'=(" +
                   detail::fmt_num(ce.after.x()) + "," + detail::fmt_num(ce.after.y()) + "," +
                   detail::fmt_num(ce.after.z()) + ")");
        }
        if (angular_momentum_covariant(op, 1000, sub_seed(o, 9), kAngularTol)) ++covariant;
    }
    r.metric("ops_reversing_L", reversed);
    r.metric("ops_covariant", covariant);
    r.require(reversed == 20, "all 20 catalog ops reverse L");

    // Two particles, x_1 <-> x_6: the x coordinate of the first with the z coordinate of the second.
    const TimeReversalOp cross(SignedPermutation({5, 1, 2, 3, 4, 0}, {1, 1, 1, 1, 1, 1}),
                               OpKind::BinarySignedPermutation, "swap:x1,x6");
    const auto v = reverses_angular_momentum(cross, 1000, sub_seed(o, 19), kAngularTol);
    const bool counter = std::holds_alternative<Counterexample>(v);
    r.metric("swap_counterexample", counter ? 1.0 : 0.0);
    if (counter) {
        const auto& ce = std::get<Counterexample>(v);
        r.metric("swap_residual", max_abs(ce.after + ce.before));
    }
    r.require(counter, "cross-particle swap yields a counterexample");
    return r;
}

inline std::vector<std::function<CriterionResult(const Options&)>> criteria() {
    return {counting, structural, compat_equivalence, spin_lift_check, kubo, md_oracle, antisymmetry, conjugacy,
            angular_momentum};
}

}  // namespace treverse::acceptance
