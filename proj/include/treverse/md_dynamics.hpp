/**
 * @file md_dynamics.hpp
 * @brief Charged particles in a static magnetic field with a WCA pair potential.
 *
 * Positions are kept unwrapped; the field is evaluated at the image inside
 * [-L, L)^3 and pair forces use the minimum image. Velocities are the
 * mechanical ones, so a time-reversal block A acts as (x, v) -> (A x, -A v).
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "treverse/errors.hpp"
#include "treverse/field_compat.hpp"
#include "treverse/random.hpp"
#include "treverse/stats.hpp"

namespace treverse {

enum class Boundary { Periodic, Open };

inline const char* to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "open"; }

inline constexpr double kMaxCyclotronPhase = 0.2;
inline constexpr double kMinPlacement = 0.9;
inline constexpr int kDefaultBlocks = 100;

struct SimConfig {
    int n = 16;
    double mass = 1.0;
    double charge = 1.0;
    double half_side = 2.0;
    Boundary boundary = Boundary::Periodic;
    bool wca = true;
    double epsilon = 1.0;
    double sigma = 1.0;
    FieldSpec field = FieldSpec::make_constant({0.0, 0.0, 1.0});
    double dt = 0.005;
    int burn_in = 2000;
    int thermostat_interval = 10;
    int steps = 10000;
    int sample_stride = 1;
    int origin_stride = 10;
    double temperature = 1.0;
    std::uint64_t seed = 1;
    int n_trajectories = 8;

    [[nodiscard]] double cyclotron_frequency() const {
        return std::abs(charge) * max_field_magnitude(field, half_side) / mass;
    }

    [[nodiscard]] double cutoff() const { return std::pow(2.0, 1.0 / 6.0) * sigma; }

    void validate() const {
        if (n < 1) throw InvalidArgument("SimConfig: need at least one particle");
        if (!(mass > 0.0)) throw InvalidArgument("SimConfig: mass must be positive");
        if (!(half_side > 0.0)) throw InvalidArgument("SimConfig: box half-side must be positive");
        if (!(dt != 0.0) || !std::isfinite(dt)) throw InvalidArgument("SimConfig: dt must be finite and nonzero");
        if (std::abs(dt) * cyclotron_frequency() >= kMaxCyclotronPhase)
            throw InvalidArgument("SimConfig: dt * omega_c must stay below 0.2");
        if (temperature < 0.0) throw InvalidArgument("SimConfig: temperature must be nonnegative");
        if (steps < 0 || burn_in < 0 || sample_stride < 1 || origin_stride < 1 || thermostat_interval < 1)
            throw InvalidArgument("SimConfig: step counts must be nonnegative and strides positive");
        if (n_trajectories < 1) throw InvalidArgument("SimConfig: need at least one trajectory");
        if (wca && (!(sigma > 0.0) || epsilon < 0.0)) throw InvalidArgument("SimConfig: bad WCA parameters");
        if (wca && boundary == Boundary::Periodic && 2.0 * half_side < 2.0 * cutoff())
            throw InvalidArgument("SimConfig: box too small for the minimum image convention");
    }
};

struct MDState {
    Eigen::VectorXd x;  ///< unwrapped positions, 3N
    Eigen::VectorXd v;  ///< velocities, 3N
    Eigen::VectorXd f;  ///< forces at x
    double potential = 0.0;

    [[nodiscard]] int particles() const { return static_cast<int>(x.size() / 3); }
};

inline double wrap_coordinate(double c, double l) { return c - 2.0 * l * std::floor((c + l) / (2.0 * l)); }

inline Eigen::Vector3d field_position(const SimConfig& cfg, const Eigen::Vector3d& x) {
    if (cfg.boundary == Boundary::Open) return x;
    return {wrap_coordinate(x.x(), cfg.half_side), wrap_coordinate(x.y(), cfg.half_side),
            wrap_coordinate(x.z(), cfg.half_side)};
}

inline Eigen::Vector3d separation(const SimConfig& cfg, const Eigen::Vector3d& d) {
    if (cfg.boundary == Boundary::Open) return d;
    const double box = 2.0 * cfg.half_side;
    return d - box * (d / box).array().round().matrix();
}

/// WCA forces and potential energy.
inline void compute_forces(const SimConfig& cfg, MDState& s) {
    const int n = s.particles();
    s.f = Eigen::VectorXd::Zero(3 * n);
    s.potential = 0.0;
    if (!cfg.wca) return;
    const double rc2 = cfg.cutoff() * cfg.cutoff();
    const double s2 = cfg.sigma * cfg.sigma;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Eigen::Vector3d d = separation(cfg, s.x.segment<3>(3 * i) - s.x.segment<3>(3 * j));
            const double r2 = d.squaredNorm();
            if (r2 >= rc2) continue;
            const double ir6 = std::pow(s2 / r2, 3);
            s.potential += 4.0 * cfg.epsilon * (ir6 * ir6 - ir6) + cfg.epsilon;
            const Eigen::Vector3d fij = (24.0 * cfg.epsilon * (2.0 * ir6 * ir6 - ir6) / r2) * d;
            s.f.segment<3>(3 * i) += fij;
            s.f.segment<3>(3 * j) -= fij;
        }
}

inline double kinetic_energy(const SimConfig& cfg, const MDState& s) { return 0.5 * cfg.mass * s.v.squaredNorm(); }

inline double total_energy(const SimConfig& cfg, const MDState& s) { return kinetic_energy(cfg, s) + s.potential; }

inline MDState make_state(const SimConfig& cfg, Eigen::VectorXd x, Eigen::VectorXd v) {
    if (x.size() != v.size() || x.size() % 3 != 0) throw DimensionMismatch("make_state: bad coordinate vectors");
    MDState s{std::move(x), std::move(v), {}, 0.0};
    compute_forces(cfg, s);
    return s;
}

/// Lattice positions with jitter and Maxwell-Boltzmann velocities, center of mass at rest.
inline MDState init_state(const SimConfig& cfg, Rng& rng) {
    cfg.validate();
    const int n = cfg.n;
    const int side = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-12));
    const double a = 2.0 * cfg.half_side / side;
    std::uniform_real_distribution<double> jitter(-0.05 * a, 0.05 * a);
    Eigen::VectorXd x(3 * n), v(3 * n);
    for (int p = 0; p < n; ++p) {
        const int idx[3] = {p % side, (p / side) % side, p / (side * side)};
        for (int k = 0; k < 3; ++k) x(3 * p + k) = -cfg.half_side + a * (idx[k] + 0.5) + (n > 1 ? jitter(rng) : 0.0);
    }
    if (cfg.wca)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (separation(cfg, x.segment<3>(3 * i) - x.segment<3>(3 * j)).norm() < kMinPlacement * cfg.sigma)
                    throw InvalidArgument("init_state: packing fraction too high to place particles");
    std::normal_distribution<double> mb(0.0, std::sqrt(cfg.temperature / cfg.mass));
    for (int k = 0; k < 3 * n; ++k) v(k) = mb(rng);
    if (n > 1) {
        Eigen::Vector3d com = Eigen::Vector3d::Zero();
        for (int p = 0; p < n; ++p) com += v.segment<3>(3 * p);
        com /= n;
        for (int p = 0; p < n; ++p) v.segment<3>(3 * p) -= com;
        v *= std::sqrt(static_cast<double>(n) / (n - 1));
    }
    return make_state(cfg, std::move(x), std::move(v));
}

/// Exact-angle Boris rotation of v under dv/dt = (q/m) v x B over time h.
inline Eigen::Vector3d boris_rotate(const Eigen::Vector3d& v, const Eigen::Vector3d& b, double qm, double h) {
    const Eigen::Vector3d omega = qm * b;
    const double w = omega.norm();
    if (w == 0.0) return v;
    const Eigen::Vector3d t = omega * (std::tan(0.5 * w * h) / w);
    const Eigen::Vector3d vp = v + v.cross(t);
    const Eigen::Vector3d s = (2.0 / (1.0 + t.squaredNorm())) * t;
    return v + vp.cross(s);
}

/// kick(h/2) drift(h/2) rotate(h) drift(h/2) kick(h/2).
inline void step(MDState& s, const SimConfig& cfg) {
    const double h = cfg.dt;
    const double qm = cfg.charge / cfg.mass;
    const int n = s.particles();
    s.v += (0.5 * h / cfg.mass) * s.f;
    s.x += (0.5 * h) * s.v;
    if (!cfg.field.is_zero())
        for (int p = 0; p < n; ++p) {
            const Eigen::Vector3d b = eval_field(cfg.field, field_position(cfg, s.x.segment<3>(3 * p)));
            s.v.segment<3>(3 * p) = boris_rotate(s.v.segment<3>(3 * p), b, qm, h);
        }
    s.x += (0.5 * h) * s.v;
    compute_forces(cfg, s);
    s.v += (0.5 * h / cfg.mass) * s.f;
}

inline void run_steps(MDState& s, const SimConfig& cfg, int n_steps) {
    for (int k = 0; k < n_steps; ++k) step(s, cfg);
}

inline int worker_count(int jobs) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TREVERSE_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min(hw, static_cast<unsigned>(cap));
    }
    return static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(std::max(jobs, 1))));
}

/// Runs fn(k) for k in [0, jobs) on a small pool; fn writes to its own slot.
template <typename Fn>
void parallel_for(int jobs, Fn&& fn) {
    const int workers = worker_count(jobs);
    if (workers <= 1) {
        for (int k = 0; k < jobs; ++k) fn(k);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int k = next++; k < jobs; k = next++) fn(k);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
                next = jobs;
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline void rescale_temperature(MDState& s, const SimConfig& cfg) {
    const double ke = kinetic_energy(cfg, s);
    if (ke <= 0.0) return;
    s.v *= std::sqrt(1.5 * s.particles() * cfg.temperature / ke);
}

/// Burn-in with periodic velocity rescaling.
inline void equilibrate(MDState& s, const SimConfig& cfg) {
    for (int k = 1; k <= cfg.burn_in; ++k) {
        step(s, cfg);
        if (k % cfg.thermostat_interval == 0) rescale_temperature(s, cfg);
    }
}

/// (x, v) -> (A x, -A v) particle by particle.
inline MDState apply_block(const Eigen::Matrix3d& a, const MDState& s, const SimConfig& cfg) {
    Eigen::VectorXd x(s.x.size()), v(s.v.size());
    for (int p = 0; p < s.particles(); ++p) {
        x.segment<3>(3 * p) = a * s.x.segment<3>(3 * p);
        v.segment<3>(3 * p) = -(a * s.v.segment<3>(3 * p));
    }
    return make_state(cfg, std::move(x), std::move(v));
}

inline double state_inf_norm(const MDState& s) { return std::max(s.x.cwiseAbs().maxCoeff(), s.v.cwiseAbs().maxCoeff()); }

inline double state_distance(const MDState& a, const MDState& b) {
    return std::max((a.x - b.x).cwiseAbs().maxCoeff(), (a.v - b.v).cwiseAbs().maxCoeff());
}

inline double state_l2_distance(const MDState& a, const MDState& b) {
    return std::sqrt((a.x - b.x).squaredNorm() + (a.v - b.v).squaredNorm());
}

inline double state_l2_norm(const MDState& s) { return std::sqrt(s.x.squaredNorm() + s.v.squaredNorm()); }

/// || M S^n M S^n G0 - G0 ||_inf / || G0 ||_inf, without any precondition.
inline double conjugacy_deviation(const Eigen::Matrix3d& a, const MDState& g0, int n_steps, const SimConfig& cfg) {
    MDState g = g0;
    run_steps(g, cfg, n_steps);
    g = apply_block(a, g, cfg);
    run_steps(g, cfg, n_steps);
    g = apply_block(a, g, cfg);
    return state_distance(g, g0) / state_inf_norm(g0);
}

inline bool is_signed_permutation_matrix(const Eigen::Matrix3d& a) {
    for (int r = 0; r < 3; ++r) {
        int nonzero = 0;
        for (int c = 0; c < 3; ++c) {
            if (a(r, c) == 0.0) continue;
            if (std::abs(a(r, c)) != 1.0) return false;
            ++nonzero;
        }
        if (nonzero != 1) return false;
    }
    return true;
}

inline void require_conjugacy_preconditions(const Eigen::Matrix3d& a, const SimConfig& cfg) {
    require_orthogonal_involution(a);
    if (!check_B_compat(a, cfg.field).verdict)
        throw PreconditionError("conjugacy_check: operation is incompatible with the field");
    if (cfg.boundary == Boundary::Periodic && !is_signed_permutation_matrix(a))
        throw PreconditionError("conjugacy_check: periodic box requires a signed permutation block");
}

inline double conjugacy_check(const Eigen::Matrix3d& a, const MDState& g0, int n_steps, const SimConfig& cfg) {
    require_conjugacy_preconditions(a, cfg);
    return conjugacy_deviation(a, g0, n_steps, cfg);
}

struct ConjugacyConvergence {
    std::vector<double> dts;
    std::vector<double> deviations;  ///< || M S^t_dt M G0 - S^-t G0 || / || G0 ||
    std::vector<double> orders;      ///< log2 of successive deviation ratios
    double reference_dt = 0.0;
};

/// Compares the backward flow obtained by conjugation with a fine-step direct
/// backward integration, for dt, dt/2, dt/4, ...
inline ConjugacyConvergence conjugacy_convergence(const Eigen::Matrix3d& a, const MDState& g0, double t, double dt,
                                                  int levels, const SimConfig& cfg, int reference_refinement = 16) {
    require_conjugacy_preconditions(a, cfg);
    if (levels < 2) throw InvalidArgument("conjugacy_convergence: need at least two dt levels");
    const double ratio = t / dt;
    if (!(t > 0.0) || !(dt > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw InvalidArgument("conjugacy_convergence: t must be a positive multiple of dt");
    ConjugacyConvergence out;
    SimConfig ref = cfg;
    ref.dt = -dt / std::pow(2.0, levels - 1) / reference_refinement;
    out.reference_dt = ref.dt;
    MDState back = g0;
    run_steps(back, ref, static_cast<int>(std::llround(t / std::abs(ref.dt))));
    for (int l = 0; l < levels; ++l) {
        SimConfig c = cfg;
        c.dt = dt / std::pow(2.0, l);
        MDState g = apply_block(a, g0, c);
        run_steps(g, c, static_cast<int>(std::llround(t / c.dt)));
        g = apply_block(a, g, c);
        out.dts.push_back(c.dt);
        out.deviations.push_back(state_l2_distance(g, back) / state_l2_norm(g0));
    }
    for (std::size_t l = 1; l < out.deviations.size(); ++l)
        out.orders.push_back(std::log2(out.deviations[l - 1] / out.deviations[l]));
    return out;
}

/// Deviations averaged over `states` equilibrated initial conditions. The
/// order estimate from a single state is noisy because the WCA force has a
/// kink at the cutoff.
inline ConjugacyConvergence conjugacy_convergence_ensemble(const Eigen::Matrix3d& a, const SimConfig& cfg, int states,
                                                           double t, double dt, int levels) {
    if (states < 1) throw InvalidArgument("conjugacy_convergence_ensemble: need at least one state");
    std::vector<ConjugacyConvergence> runs(static_cast<std::size_t>(states));
    parallel_for(states, [&](int k) {
        Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(k));
        MDState s = init_state(cfg, rng);
        equilibrate(s, cfg);
        runs[static_cast<std::size_t>(k)] = conjugacy_convergence(a, s, t, dt, levels, cfg);
    });
    ConjugacyConvergence out = runs.front();
    for (std::size_t l = 0; l < out.deviations.size(); ++l) {
        double sum = 0.0;
        for (const auto& r : runs) sum += r.deviations[l];
        out.deviations[l] = sum / states;
    }
    out.orders.clear();
    for (std::size_t l = 1; l < out.deviations.size(); ++l)
        out.orders.push_back(std::log2(out.deviations[l - 1] / out.deviations[l]));
    return out;
}

// ---------------------------------------------------------------------------
// Correlators

enum class ChannelKind { Self, Distinct, Pair };

/// <v_i^a(0) v_j^b(t)>; Self and Distinct average over particles.
struct ChannelKey {
    ChannelKind kind = ChannelKind::Self;
    int a = 0;
    int b = 0;
    int i = 0;
    int j = 0;

    friend bool operator==(const ChannelKey&, const ChannelKey&) = default;

    [[nodiscard]] std::string label() const {
        static constexpr const char* axes = "xyz";
        std::string s;
        switch (kind) {
            case ChannelKind::Self: s = "self:"; break;
            case ChannelKind::Distinct: s = "distinct:"; break;
            case ChannelKind::Pair: s = "pair:" + std::to_string(i) + "," + std::to_string(j) + ":"; break;
        }
        return s + axes[a] + axes[b];
    }
};

inline ChannelKey self_channel(int a, int b) { return {ChannelKind::Self, a, b, 0, 0}; }

inline std::vector<ChannelKey> all_self_channels() {
    std::vector<ChannelKey> out;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) out.push_back(self_channel(a, b));
    return out;
}

enum class OriginWindow { All, FirstHalf, SecondHalf };

struct CorrelatorRequest {
    std::vector<ChannelKey> channels = all_self_channels();
    int max_lag = 100;  ///< in recorded frames
    OriginWindow window = OriginWindow::All;
    int blocks = kDefaultBlocks;
};

struct Channel {
    ChannelKey key;
    Eigen::MatrixXd blocks;  ///< block x lag
    Eigen::VectorXd mean;
    Eigen::VectorXd se;
};

struct CorrelatorEstimate {
    std::vector<double> lags;
    std::vector<Channel> channels;
    int n_trajectories = 0;
    int n_blocks = 0;
    int origins_per_trajectory = 0;
    double max_energy_drift = 0.0;

    [[nodiscard]] const Channel& channel(const ChannelKey& key) const {
        for (const auto& c : channels)
            if (c.key == key) return c;
        throw InvalidArgument("CorrelatorEstimate: channel not computed: " + key.label());
    }
};

namespace detail {

struct OriginPlan {
    int first = 0;
    int count = 0;
};

inline OriginPlan plan_origins(int frames, int max_lag, int stride, OriginWindow window) {
    int lo = 0, hi = frames - 1 - max_lag;  // inclusive range of admissible origins
    if (hi < 0) throw InvalidArgument("velocity_correlator: max_lag must be shorter than the production run");
    if (window != OriginWindow::All) {
        const int mid = frames / 2;
        if (window == OriginWindow::FirstHalf)
            hi = std::min(hi, mid - 1);
        else
            lo = mid;
        if (hi < lo) throw InvalidArgument("velocity_correlator: window too short for max_lag");
    }
    return {lo, (hi - lo) / stride + 1};
}

inline double channel_product(const ChannelKey& key, const Eigen::MatrixXd& frames, int o, int t, int n) {
    const auto v0 = frames.row(o);
    const auto vt = frames.row(t);
    switch (key.kind) {
        case ChannelKind::Pair: return v0(3 * key.i + key.a) * vt(3 * key.j + key.b);
        case ChannelKind::Self:
        case ChannelKind::Distinct: {
            double self = 0.0, ta = 0.0, tb = 0.0;
            for (int p = 0; p < n; ++p) {
                self += v0(3 * p + key.a) * vt(3 * p + key.b);
                ta += v0(3 * p + key.a);
                tb += vt(3 * p + key.b);
            }
            if (key.kind == ChannelKind::Self) return self / n;
            return n > 1 ? (ta * tb - self) / (static_cast<double>(n) * (n - 1)) : 0.0;
        }
    }
    return 0.0;
}

struct TrajectoryOutput {
    Eigen::MatrixXd values;  ///< channel x lag, origin averaged
    double energy_drift = 0.0;
};

inline TrajectoryOutput run_trajectory(const SimConfig& cfg, const CorrelatorRequest& req, std::uint64_t index) {
    Rng rng = make_stream(cfg.seed, index);
    MDState s = init_state(cfg, rng);
    equilibrate(s, cfg);
    const int frames = cfg.steps / cfg.sample_stride + 1;
    const int n = cfg.n;
    Eigen::MatrixXd rec(frames, 3 * n);
    const double e0 = total_energy(cfg, s);
    double drift = 0.0;
    rec.row(0) = s.v.transpose();
    for (int f = 1; f < frames; ++f) {
        run_steps(s, cfg, cfg.sample_stride);
        rec.row(f) = s.v.transpose();
        if (e0 != 0.0) drift = std::max(drift, std::abs(total_energy(cfg, s) - e0) / std::abs(e0));
    }
    const auto plan = plan_origins(frames, req.max_lag, cfg.origin_stride, req.window);
    TrajectoryOutput out{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(req.channels.size()), req.max_lag + 1), drift};
    for (std::size_t c = 0; c < req.channels.size(); ++c)
        for (int lag = 0; lag <= req.max_lag; ++lag) {
            double acc = 0.0;
            for (int k = 0; k < plan.count; ++k) {
                const int o = plan.first + k * cfg.origin_stride;
                acc += channel_product(req.channels[c], rec, o, o + lag, n);
            }
            out.values(static_cast<Eigen::Index>(c), lag) = acc / plan.count;
        }
    return out;
}

}  // namespace detail

/// Ensemble- and origin-averaged velocity correlators; trajectories are grouped
/// into contiguous blocks for the jackknife.
inline CorrelatorEstimate velocity_correlator(const SimConfig& cfg, const CorrelatorRequest& req) {
    cfg.validate();
    if (req.max_lag < 0) throw InvalidArgument("velocity_correlator: negative max_lag");
    if (req.max_lag >= cfg.steps / cfg.sample_stride + 1)
        throw InvalidArgument("velocity_correlator: max_lag must be shorter than the production run");
    for (const auto& k : req.channels)
        if (k.a < 0 || k.a > 2 || k.b < 0 || k.b > 2 || k.i < 0 || k.j < 0 || k.i >= cfg.n || k.j >= cfg.n)
            throw InvalidArgument("velocity_correlator: channel out of range");
    const int n_blocks = std::min(cfg.n_trajectories, std::max(req.blocks, 2));
    if (n_blocks < 2) throw InvalidArgument("velocity_correlator: need at least two trajectories");
    const auto nc = static_cast<Eigen::Index>(req.channels.size());
    const Eigen::Index nl = req.max_lag + 1;

    std::vector<Eigen::MatrixXd> block_values(static_cast<std::size_t>(n_blocks));
    std::vector<double> block_drift(static_cast<std::size_t>(n_blocks), 0.0);
    parallel_for(n_blocks, [&](int b) {
        const int lo = static_cast<int>(static_cast<long long>(cfg.n_trajectories) * b / n_blocks);
        const int hi = static_cast<int>(static_cast<long long>(cfg.n_trajectories) * (b + 1) / n_blocks);
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nc, nl);
        double drift = 0.0;
        for (int k = lo; k < hi; ++k) {
            const auto out = detail::run_trajectory(cfg, req, static_cast<std::uint64_t>(k));
            acc += out.values;
            drift = std::max(drift, out.energy_drift);
        }
        block_values[static_cast<std::size_t>(b)] = acc / (hi - lo);
        block_drift[static_cast<std::size_t>(b)] = drift;
    });

    CorrelatorEstimate est;
    est.n_trajectories = cfg.n_trajectories;
    est.n_blocks = n_blocks;
    est.origins_per_trajectory =
        detail::plan_origins(cfg.steps / cfg.sample_stride + 1, req.max_lag, cfg.origin_stride, req.window).count;
    est.max_energy_drift = *std::max_element(block_drift.begin(), block_drift.end());
    for (Eigen::Index l = 0; l < nl; ++l) est.lags.push_back(static_cast<double>(l) * cfg.sample_stride * cfg.dt);
    for (Eigen::Index c = 0; c < nc; ++c) {
        Channel ch;
        ch.key = req.channels[static_cast<std::size_t>(c)];
        ch.blocks.resize(n_blocks, nl);
        for (int b = 0; b < n_blocks; ++b) ch.blocks.row(b) = block_values[static_cast<std::size_t>(b)].row(c);
        const auto jk = jackknife(ch.blocks);
        ch.mean = jk.mean;
        ch.se = jk.se;
        est.channels.push_back(std::move(ch));
    }
    return est;
}

// ---------------------------------------------------------------------------
// Green-Kubo

/// Trapezoid rule over lags[0..last].
inline Eigen::VectorXd trapezoid_blocks(const Eigen::MatrixXd& blocks, const std::vector<double>& lags,
                                        Eigen::Index last) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(blocks.rows());
    for (Eigen::Index l = 1; l <= last; ++l)
        out += 0.5 * (lags[static_cast<std::size_t>(l)] - lags[static_cast<std::size_t>(l - 1)]) *
               (blocks.col(l) + blocks.col(l - 1));
    return out;
}

struct DiffusionTensor {
    Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d se = Eigen::Matrix3d::Zero();
    double t_max = 0.0;
    double antisym_sum = 0.0;  ///< D_xy + D_yx
    double antisym_se = 0.0;
    bool converged = false;
};

/// D_ab = int_0^tmax C_ab dt over the self channels, with per-block jackknife errors.
inline DiffusionTensor diffusion_tensor(const CorrelatorEstimate& corr, double t_max) {
    if (corr.lags.empty()) throw InvalidArgument("diffusion_tensor: empty lag grid");
    if (t_max < 0.0 || t_max > corr.lags.back() * (1.0 + 1e-12))
        throw InvalidArgument("diffusion_tensor: t_max outside the lag grid");
    Eigen::Index last = 0;
    while (last + 1 < static_cast<Eigen::Index>(corr.lags.size()) &&
           corr.lags[static_cast<std::size_t>(last + 1)] <= t_max * (1.0 + 1e-12))
        ++last;
    DiffusionTensor out;
    out.t_max = corr.lags[static_cast<std::size_t>(last)];
    Eigen::MatrixXd integrals(corr.n_blocks, 9);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            integrals.col(3 * a + b) = trapezoid_blocks(corr.channel(self_channel(a, b)).blocks, corr.lags, last);
    const auto jk = jackknife(integrals);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            out.d(a, b) = jk.mean(3 * a + b);
            out.se(a, b) = jk.se(3 * a + b);
        }
    const auto sum = jackknife(Eigen::VectorXd(integrals.col(1) + integrals.col(3)));
    out.antisym_sum = sum.mean(0);
    out.antisym_se = sum.se(0);
    out.converged = true;
    const Eigen::Index tail = std::max<Eigen::Index>(1, (last + 1) / 10);
    for (int a = 0; a < 3; ++a) {
        const auto& ch = corr.channel(self_channel(a, a));
        const double c0 = ch.mean(0);
        for (Eigen::Index l = last + 1 - tail; l <= last; ++l)
            if (std::abs(ch.mean(l)) > 0.1 * c0 + 3.0 * ch.se(l)) out.converged = false;
    }
    return out;
}

struct AntisymmetryVerdict {
    double sum = 0.0;
    double se = 0.0;
    double relative = 0.0;  ///< |D_xy + D_yx| / max(|D_xx|, |D_xy|)
    bool pass = false;
};

inline AntisymmetryVerdict antisymmetry_check(const DiffusionTensor& d) {
    AntisymmetryVerdict v;
    v.sum = d.antisym_sum;
    v.se = d.antisym_se;
    const double scale = std::max(std::abs(d.d(0, 0)), std::abs(d.d(0, 1)));
    v.relative = scale > 0.0 ? std::abs(v.sum) / scale : 0.0;
    v.pass = std::abs(v.sum) <= 3.0 * v.se;
    return v;
}

struct CasimirReport {
    std::vector<double> lags;
    Eigen::VectorXd lhs;   ///< <v^x(0) v^y(t)>_B
    Eigen::VectorXd rhs;   ///< <v^y(0) v^x(t)>_{-B}
    Eigen::VectorXd diff_se;
    double max_z = 0.0;
    bool pass = false;
};

/// Same seeds for B and -B; paired jackknife on the per-block difference.
inline CasimirReport casimir_check(const SimConfig& cfg, int max_lag, int blocks = kDefaultBlocks) {
    CorrelatorRequest req;
    req.channels = {self_channel(0, 1), self_channel(1, 0)};
    req.max_lag = max_lag;
    req.blocks = blocks;
    SimConfig flipped = cfg;
    flipped.field = cfg.field.negated();
    const auto plus = velocity_correlator(cfg, req);
    const auto minus = velocity_correlator(flipped, req);
    const Eigen::MatrixXd a = plus.channel(self_channel(0, 1)).blocks;
    const Eigen::MatrixXd b = minus.channel(self_channel(1, 0)).blocks;
    const auto jk = jackknife(Eigen::MatrixXd(a - b));
    CasimirReport rep;
    rep.lags = plus.lags;
    rep.lhs = a.colwise().mean().transpose();
    rep.rhs = b.colwise().mean().transpose();
    rep.diff_se = jk.se;
    rep.pass = true;
    for (Eigen::Index l = 0; l < jk.mean.size(); ++l) {
        const double dev = std::abs(jk.mean(l));
        if (dev > 3.0 * jk.se(l)) rep.pass = false;
        if (jk.se(l) > 0.0) rep.max_z = std::max(rep.max_z, dev / jk.se(l));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Two-symmetry argument

struct ForcedZero {
    int a = 0;
    int b = 0;
    std::string op_plus;   ///< op with sign(a) sign(b) = +1
    std::string op_minus;  ///< op with sign(a) sign(b) = -1
};

/// Component pairs (a, b), a != b, for which two compatible catalog ops fix
/// both axes and carry opposite velocity parity products. Under (x, v) ->
/// (A x, -A v) with A e_a = s_a e_a one has C_ab(t) = s_a s_b C_ba(-t), so two
/// such ops with opposite s_a s_b force C_ab = 0.
inline std::vector<ForcedZero> forced_zero_pairs(const FieldSpec& field) {
    const auto compat = find_compatible(field);
    std::vector<ForcedZero> out;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            if (a == b) continue;
            const TimeReversalOp* plus = nullptr;
            const TimeReversalOp* minus = nullptr;
            for (const auto& op : compat.ops) {
                const auto& sp = op.exact();
                if (!sp || sp->perm[static_cast<std::size_t>(a)] != a || sp->perm[static_cast<std::size_t>(b)] != b)
                    continue;
                const int prod = sp->sign[static_cast<std::size_t>(a)] * sp->sign[static_cast<std::size_t>(b)];
                if (prod > 0 && !plus) plus = &op;
                if (prod < 0 && !minus) minus = &op;
            }
            if (plus && minus) out.push_back({a, b, plus->id(), minus->id()});
        }
    return out;
}

struct VanishingEntry {
    ChannelKey key;
    std::string op_plus;
    std::string op_minus;
    double max_z = 0.0;
    bool pass = false;
};

struct VanishingReport {
    std::vector<VanishingEntry> entries;
    bool pass = false;
};

inline VanishingReport vanishing_correlator_check(const SimConfig& cfg, int max_lag, int blocks = kDefaultBlocks) {
    const auto pairs = forced_zero_pairs(cfg.field);
    if (pairs.empty()) throw NotApplicable("vanishing_correlator_check: no pair of compatible operations for this field");
    CorrelatorRequest req;
    req.channels.clear();
    req.max_lag = max_lag;
    req.blocks = blocks;
    for (const auto& p : pairs) {
        req.channels.push_back({ChannelKind::Self, p.a, p.b, 0, 0});
        if (cfg.n > 1) req.channels.push_back({ChannelKind::Distinct, p.a, p.b, 0, 0});
    }
    const auto est = velocity_correlator(cfg, req);
    VanishingReport rep;
    rep.pass = true;
    for (const auto& ch : est.channels) {
        VanishingEntry e;
        e.key = ch.key;
        for (const auto& p : pairs)
            if (p.a == ch.key.a && p.b == ch.key.b) {
                e.op_plus = p.op_plus;
                e.op_minus = p.op_minus;
            }
        e.pass = true;
        for (Eigen::Index l = 0; l < ch.mean.size(); ++l) {
            const double dev = std::abs(ch.mean(l));
            if (dev > 3.0 * ch.se(l)) e.pass = false;
            if (ch.se(l) > 0.0) e.max_z = std::max(e.max_z, dev / ch.se(l));
        }
        rep.pass = rep.pass && e.pass;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace treverse
