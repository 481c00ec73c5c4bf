/**
 * @file config.hpp
 * @brief Text grammars for operations and fields, and key = value config files.
 *
 * Operation strings:
 *   diag:a,b,c            diagonal signs
 *   perm:swapxy[:s,t]     swap two axes with sign s, third axis sign t (default 1,1)
 *   theta:x               continuous family A(theta)
 *   signed:k1,k2,...      row i picks coordinate |k_i| - 1 with the sign of k_i
 * Field strings:
 *   zero | constant:bx,by,bz | axial:c0,c1,... | planar:c:i:j,...
 */
#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "treverse/enumeration.hpp"
#include "treverse/errors.hpp"
#include "treverse/field_compat.hpp"
#include "treverse/md_dynamics.hpp"
#include "treverse/pauli_spin.hpp"
#include "treverse/quantum_correlator.hpp"

namespace treverse {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(const std::string& s, std::string_view what) {
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError(std::string(what) + ": not a number: '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s, std::string_view what) {
    long long v = 0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError(std::string(what) + ": not an integer: '" + s + "'");
    return v;
}

inline std::vector<double> parse_doubles(const std::string& s, std::string_view what) {
    std::vector<double> out;
    for (const auto& t : split(s, ',')) out.push_back(parse_double(t, what));
    return out;
}

inline Eigen::Vector3d parse_vec3(const std::string& s, std::string_view what) {
    const auto v = parse_doubles(s, what);
    if (v.size() != 3) throw ConfigError(std::string(what) + ": expected three components");
    return {v[0], v[1], v[2]};
}

inline int parse_sign(const std::string& s) {
    const auto v = parse_int(s, "sign");
    if (v != 1 && v != -1) throw ConfigError("sign must be 1 or -1, got '" + s + "'");
    return static_cast<int>(v);
}

inline int axis_index(char c) {
    switch (c) {
        case 'x': return 0;
        case 'y': return 1;
        case 'z': return 2;
        default: throw ConfigError(std::string("unknown axis '") + c + "'");
    }
}

}  // namespace detail

inline TimeReversalOp parse_op(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = colon == std::string::npos ? text : text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
    if (head == "diag") {
        const auto parts = detail::split(rest, ',');
        if (parts.size() != 3) throw ConfigError("diag: expected three signs");
        SignedPermutation sp({0, 1, 2}, {detail::parse_sign(parts[0]), detail::parse_sign(parts[1]), detail::parse_sign(parts[2])});
        return {sp, OpKind::BinarySignedPermutation, op_id(sp)};
    }
    if (head == "perm") {
        const auto parts = detail::split(rest, ':');
        if (parts.empty() || parts[0].size() != 6 || parts[0].rfind("swap", 0) != 0 || parts.size() > 2)
            throw ConfigError("perm: expected perm:swapXY[:s,t]");
        const int a = detail::axis_index(parts[0][4]);
        const int b = detail::axis_index(parts[0][5]);
        if (a == b) throw ConfigError("perm: swap needs two distinct axes");
        int s = 1, t = 1;
        if (parts.size() == 2) {
            const auto st = detail::split(parts[1], ',');
            if (st.size() != 2) throw ConfigError("perm: expected two signs");
            s = detail::parse_sign(st[0]);
            t = detail::parse_sign(st[1]);
        }
        std::vector<int> p = {0, 1, 2}, sg = {t, t, t};
        p[static_cast<std::size_t>(a)] = b;
        p[static_cast<std::size_t>(b)] = a;
        sg[static_cast<std::size_t>(a)] = sg[static_cast<std::size_t>(b)] = s;
        SignedPermutation sp(p, sg);
        return {sp, OpKind::BinarySignedPermutation, op_id(sp)};
    }
    if (head == "theta") return continuous_family(detail::parse_double(rest, "theta"));
    if (head == "signed") {
        std::vector<int> p, sg;
        for (const auto& tok : detail::split(rest, ',')) {
            const auto k = detail::parse_int(tok, "signed");
            if (k == 0) throw ConfigError("signed: entries are 1-based and nonzero");
            p.push_back(static_cast<int>(std::llabs(k) - 1));
            sg.push_back(k > 0 ? 1 : -1);
        }
        try {
            SignedPermutation sp(p, sg);
            return {sp, OpKind::BinarySignedPermutation, op_id(sp)};
        } catch (const Error& e) {
            throw ConfigError(std::string("signed: ") + e.what());
        }
    }
    throw ConfigError("unknown operation '" + text + "'");
}

inline FieldSpec parse_field(const std::string& text) {
    if (text == "zero") return FieldSpec::make_zero();
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("unknown field '" + text + "'");
    const std::string head = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    if (head == "constant") return FieldSpec::make_constant(detail::parse_vec3(rest, "constant"));
    if (head == "axial") {
        auto c = detail::parse_doubles(rest, "axial");
        return FieldSpec::make_axial(std::move(c));
    }
    if (head == "planar") {
        std::vector<Monomial> terms;
        for (const auto& tok : detail::split(rest, ',')) {
            const auto f = detail::split(tok, ':');
            if (f.size() != 3) throw ConfigError("planar: terms are c:i:j");
            const auto i = detail::parse_int(f[1], "planar"), j = detail::parse_int(f[2], "planar");
            if (i < 0 || j < 0 || i > 32 || j > 32) throw ConfigError("planar: exponents must be in 0..32");
            terms.push_back({detail::parse_double(f[0], "planar"), static_cast<int>(i), static_cast<int>(j)});
        }
        try {
            return FieldSpec::make_planar(std::move(terms));
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    throw ConfigError("unknown field family '" + head + "'");
}

// ---------------------------------------------------------------------------
// key = value files

/// Ordered key/value pairs; `#` starts a comment.
class KeyValues {
public:
    static KeyValues parse(std::istream& in, const std::string& source = "config") {
        KeyValues kv;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            const std::string t = detail::trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = detail::trim(t.substr(0, eq));
            const std::string value = detail::trim(t.substr(eq + 1));
            if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
            if (kv.values_.count(key)) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key " + key);
            kv.values_[key] = value;
        }
        return kv;
    }

    static KeyValues parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    static KeyValues load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open " + path);
        return parse(in, path);
    }

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

    [[nodiscard]] std::string get(const std::string& key) const {
        used_.insert(key);
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing key " + key);
        return it->second;
    }

    [[nodiscard]] std::string get(const std::string& key, const std::string& fallback) const {
        return has(key) ? get(key) : fallback;
    }

    [[nodiscard]] double number(const std::string& key, double fallback) const {
        return has(key) ? detail::parse_double(get(key), key) : fallback;
    }

    [[nodiscard]] long long integer(const std::string& key, long long fallback) const {
        return has(key) ? detail::parse_int(get(key), key) : fallback;
    }

    [[nodiscard]] bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto v = get(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(key + ": expected true or false");
    }

    /// Throws on keys that were never read.
    void require_all_used() const {
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) throw ConfigError("unknown key " + k);
    }

    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

/// family = constant|axial|planar|zero, plus b / profile / terms; optional box, samples, seed.
struct FieldFile {
    FieldSpec field;
    SampleOptions samples;
};

inline FieldFile field_from_config(const KeyValues& kv) {
    FieldFile out;
    const auto family = kv.get("family");
    if (family == "zero")
        out.field = FieldSpec::make_zero();
    else if (family == "constant")
        out.field = parse_field("constant:" + kv.get("b"));
    else if (family == "axial")
        out.field = parse_field("axial:" + kv.get("profile"));
    else if (family == "planar")
        out.field = parse_field("planar:" + kv.get("terms"));
    else
        throw ConfigError("family: unknown field family " + family);
    out.samples.half_side = kv.number("box", kDefaultSampleBox);
    out.samples.samples = static_cast<int>(kv.integer("samples", kDefaultFieldSamples));
    out.samples.seed = static_cast<std::uint64_t>(kv.integer("seed", 7));
    if (!(out.samples.half_side > 0.0) || out.samples.samples < 1) throw ConfigError("box and samples must be positive");
    kv.require_all_used();
    return out;
}

/// Named single-site spin operator: sigma_x, sigma_y, sigma_z or a catalog id.
inline Mat2c spin_op_by_name(const std::string& name) {
    for (const auto& e : catalog_spin_ops())
        if (e.op.id == name) return e.op.m;
    throw ConfigError("unknown spin operator " + name);
}

/// `sigma_a@site`, summed with `+`.
inline MatXc parse_observable(const std::string& text, int n) {
    MatXc out = MatXc::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
    for (const auto& term : detail::split(text, '+')) {
        const auto at = term.find('@');
        if (at == std::string::npos) throw ConfigError("observable terms are sigma_a@site");
        const std::string name = detail::trim(term.substr(0, at));
        const auto site = detail::parse_int(detail::trim(term.substr(at + 1)), "observable site");
        if (site < 0 || site >= n) throw ConfigError("observable site out of range");
        if (name != "sigma_x" && name != "sigma_y" && name != "sigma_z")
            throw ConfigError("observable operators are sigma_x, sigma_y, sigma_z");
        out += site_operator(n, static_cast<int>(site), spin_op_by_name(name));
    }
    return out;
}

/// Spin system description plus a Kubo request.
struct KuboJob {
    SpinSystem sys;
    double beta = 1.0;
    std::string tr_name = "sigma_x";
    std::string phi_text;
    std::string psi_text;
    std::vector<double> times;
};

/// n, field (uniform) or field.<j>, charge or charge.<j>, exchange = j:k:J,...,
/// beta, tr, phi, psi, times = t0:t1:count.
inline KuboJob kubo_from_config(const KeyValues& kv) {
    KuboJob job;
    const auto n = kv.integer("n", 1);
    if (n < 1 || n > kMaxSites) throw ConfigError("n must be in 1..6");
    job.sys.n = static_cast<int>(n);
    const Eigen::Vector3d uniform = kv.has("field") ? detail::parse_vec3(kv.get("field"), "field") : Eigen::Vector3d::Zero();
    const double q = kv.number("charge", 1.0);
    for (int j = 0; j < job.sys.n; ++j) {
        const auto key = "field." + std::to_string(j);
        job.sys.fields.push_back(kv.has(key) ? detail::parse_vec3(kv.get(key), key) : uniform);
        job.sys.charges.push_back(kv.number("charge." + std::to_string(j), q));
    }
    if (kv.has("exchange"))
        for (const auto& tok : detail::split(kv.get("exchange"), ',')) {
            const auto f = detail::split(tok, ':');
            if (f.size() != 3) throw ConfigError("exchange terms are j:k:J");
            job.sys.exchange.push_back({static_cast<int>(detail::parse_int(f[0], "exchange")),
                                        static_cast<int>(detail::parse_int(f[1], "exchange")),
                                        detail::parse_double(f[2], "exchange")});
        }
    try {
        job.sys.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    job.beta = kv.number("beta", 1.0);
    if (!(job.beta > 0.0)) throw ConfigError("beta must be positive");
    job.tr_name = kv.get("tr", "sigma_x");
    job.phi_text = kv.get("phi", "sigma_x@0");
    job.psi_text = kv.get("psi", "sigma_x@" + std::to_string(job.sys.n - 1));
    const auto grid = detail::split(kv.get("times", "0:10:16"), ':');
    if (grid.size() != 3) throw ConfigError("times = t0:t1:count");
    const double t0 = detail::parse_double(grid[0], "times"), t1 = detail::parse_double(grid[1], "times");
    const auto count = detail::parse_int(grid[2], "times");
    if (count < 1 || count > 100000) throw ConfigError("times: count must be in 1..100000");
    for (long long k = 0; k < count; ++k) job.times.push_back(count == 1 ? t0 : t0 + (t1 - t0) * k / (count - 1));
    kv.require_all_used();
    return job;
}

/// Simulation settings plus correlator requests.
struct SimJob {
    SimConfig cfg;
    int max_lag = 100;
    double t_max = 0.0;
    int blocks = kDefaultBlocks;
};

inline SimJob sim_from_config(const KeyValues& kv) {
    SimJob job;
    auto& c = job.cfg;
    c.n = static_cast<int>(kv.integer("n", c.n));
    c.mass = kv.number("mass", c.mass);
    c.charge = kv.number("charge", c.charge);
    c.half_side = kv.number("half_side", c.half_side);
    const auto boundary = kv.get("boundary", "periodic");
    if (boundary == "periodic")
        c.boundary = Boundary::Periodic;
    else if (boundary == "open")
        c.boundary = Boundary::Open;
    else
        throw ConfigError("boundary must be periodic or open");
    c.wca = kv.flag("wca", c.wca);
    c.epsilon = kv.number("epsilon", c.epsilon);
    c.sigma = kv.number("sigma", c.sigma);
    if (kv.has("field")) c.field = parse_field(kv.get("field"));
    c.dt = kv.number("dt", c.dt);
    c.burn_in = static_cast<int>(kv.integer("burn_in", c.burn_in));
    c.thermostat_interval = static_cast<int>(kv.integer("thermostat_interval", c.thermostat_interval));
    c.steps = static_cast<int>(kv.integer("steps", c.steps));
    c.sample_stride = static_cast<int>(kv.integer("sample_stride", c.sample_stride));
    c.origin_stride = static_cast<int>(kv.integer("origin_stride", c.origin_stride));
    c.temperature = kv.number("temperature", c.temperature);
    c.seed = static_cast<std::uint64_t>(kv.integer("seed", static_cast<long long>(c.seed)));
    c.n_trajectories = static_cast<int>(kv.integer("trajectories", c.n_trajectories));
    job.max_lag = static_cast<int>(kv.integer("max_lag", job.max_lag));
    job.blocks = static_cast<int>(kv.integer("blocks", job.blocks));
    job.t_max = kv.number("t_max", job.max_lag * c.sample_stride * c.dt);
    try {
        c.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    kv.require_all_used();
    return job;
}

}  // namespace treverse
