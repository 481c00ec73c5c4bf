#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "treverse/config.hpp"
#include "treverse/report.hpp"
#include "treverse/testing/acceptance.hpp"

namespace fs = std::filesystem;
using namespace treverse;
using report::Json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kVerifyFailed = 2;

struct Common {
    std::string format = "json";
    std::string out;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--out", c.out, "Directory for output files (default: stdout)");
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << body;
    if (!os) throw ConfigError("write failed for " + path.string());
}

/// Renders one artifact in the chosen format to stdout or to <out>/<name>.<ext>.
void emit(const Common& c, const std::string& name, const Json& json, const std::function<std::string()>& csv,
          const std::function<std::string()>& text) {
    std::string body;
    std::string ext = c.format;
    if (c.format == "json")
        body = json.dump(2) + "\n";
    else if (c.format == "csv")
        body = csv();
    else {
        body = text();
        ext = "txt";
    }
    if (c.out.empty()) {
        std::cout << body;
        return;
    }
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / (name + "." + ext), body);
}

std::string lines(const std::vector<std::string>& rows) {
    std::string s;
    for (const auto& r : rows) s += r + "\n";
    return s;
}

bool antisymmetric_family(const std::string& family) {
    if (family == "binary") return false;
    if (family == "antisymmetric") return true;
    throw ConfigError("family must be binary or antisymmetric");
}

FieldSpec field_or_default(const std::string& text) { return text.empty() ? builtin_fields().front() : parse_field(text); }

/// Field and sampling options from --config or --field.
FieldFile field_input(const std::string& config, const std::string& field, std::optional<std::uint64_t> seed) {
    FieldFile f;
    if (!config.empty()) {
        if (!field.empty()) throw ConfigError("--field and --config are mutually exclusive");
        f = field_from_config(KeyValues::load(config));
    } else {
        f.field = field_or_default(field);
    }
    if (seed) f.samples.seed = *seed;
    return f;
}

SimJob sim_input(const std::string& config, const std::string& field, std::optional<std::uint64_t> seed) {
    SimJob job = config.empty() ? sim_from_config(KeyValues{}) : sim_from_config(KeyValues::load(config));
    if (!field.empty()) job.cfg.field = parse_field(field);
    if (seed) job.cfg.seed = *seed;
    try {
        job.cfg.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return job;
}

Json criterion_json(const acceptance::CriterionResult& r) {
    Json metrics = Json::object();
    for (const auto& m : r.metrics) metrics[m.name] = m.value;
    return {{"id", r.id}, {"name", r.name}, {"verdict", r.pass}, {"metrics", metrics}, {"notes", r.notes}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-reversal symmetry toolkit"};
    app.require_subcommand(1);

    Common common;
    int dim = 3;
    std::string family = "binary";
    std::string op_text;
    std::string field_text;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::vector<int> only;

    auto* enumerate = app.add_subcommand("enumerate", "List the operations of one family");
    auto* count = app.add_subcommand("count", "Number of operations of one family");
    auto* classes = app.add_subcommand("classes", "Involution classes with tableaux and counts");
    auto* check_field = app.add_subcommand("check-field", "Compatibility of one operation with one field");
    auto* find_sym = app.add_subcommand("find-symmetries", "Catalog operations compatible with a field");
    auto* spin_ops = app.add_subcommand("spin-ops", "The nine spin-space candidates with verdicts");
    auto* spin_lift_cmd = app.add_subcommand("spin-lift", "SU(2) lift of a spatial operation");
    auto* kubo = app.add_subcommand("kubo", "Canonical correlator series and its time-reversal symmetry");
    auto* simulate = app.add_subcommand("simulate", "Run MD trajectories and report energy drift");
    auto* correlate = app.add_subcommand("correlate", "Velocity correlators and the diffusion tensor");
    auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");

    for (auto* sub : app.get_subcommands({})) add_common(sub, common);
    for (auto* sub : {enumerate, count, classes}) {
        sub->add_option("--dim", dim, "Dimension M")->check(CLI::Range(1, 64));
        sub->add_option("--family", family, "binary or antisymmetric");
    }
    for (auto* sub : {check_field, spin_lift_cmd, simulate}) sub->add_option("--op", op_text, "Operation");
    check_field->get_option("--op")->required();
    spin_lift_cmd->get_option("--op")->required();
    for (auto* sub : {check_field, find_sym, spin_lift_cmd, simulate, correlate}) sub->add_option("--field", field_text, "Field");
    for (auto* sub : {check_field, find_sym, kubo, simulate, correlate})
        sub->add_option("--config", config, "key = value file")->check(CLI::ExistingFile);
    for (auto* sub : {check_field, find_sym, spin_lift_cmd, simulate, correlate, verify})
        sub->add_option("--seed", seed, "Random seed");
    for (auto* sub : {check_field, spin_lift_cmd, kubo}) sub->add_option("--tol", tol, "Tolerance")->check(CLI::PositiveNumber);
    verify->add_option("--criteria", only, "Subset of criteria (1-9)")->delimiter(',')->check(CLI::Range(1, 9));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*enumerate) {
            const bool anti = antisymmetric_family(family);
            const auto ops = anti ? enumerate_antisymmetric(dim) : enumerate_binary(dim);
            Json arr = Json::array();
            for (const auto& t : ops) arr.push_back(report::tagged(t));
            emit(common, "enumerate", arr,
                 [&] {
                     std::string s = "id,r1,r2\n";
                     for (const auto& t : ops)
                         s += "\"" + t.op.id() + "\"," + std::to_string(t.cls.r1) + "," + std::to_string(t.cls.r2) + "\n";
                     return s;
                 },
                 [&] {
                     std::vector<std::string> rows;
                     for (const auto& t : ops) rows.push_back(t.op.id());
                     return lines(rows);
                 });
            return kOk;
        }

        if (*count) {
            const bool anti = antisymmetric_family(family);
            const auto n = anti ? count_antisymmetric(dim) : count_binary(dim);
            emit(common, "count", Json(n),
                 [&] { return "dim,family,count\n" + std::to_string(dim) + "," + family + "," + std::to_string(n) + "\n"; },
                 [&] { return std::to_string(n) + "\n"; });
            return kOk;
        }

        if (*classes) {
            const auto rep = enumeration_report(dim, antisymmetric_family(family));
            const auto tableau = [](const YoungTableau& t) {
                std::string s;
                for (std::size_t i = 0; i < t.rows.size(); ++i) s += (i ? " " : "") + std::to_string(t.rows[i]);
                return s;
            };
            emit(common, "classes", report::enumeration(rep),
                 [&] {
                     std::string s = "r1,r2,tableau,class_size,signed_count\n";
                     for (const auto& c : rep.per_class)
                         s += std::to_string(c.cls.r1) + "," + std::to_string(c.cls.r2) + "," + tableau(c.tableau) + "," +
                              std::to_string(c.class_size) + "," + std::to_string(c.signed_count) + "\n";
                     return s;
                 },
                 [&] {
                     std::vector<std::string> rows;
                     for (const auto& c : rep.per_class)
                         rows.push_back("{" + std::to_string(c.cls.r1) + "," + std::to_string(c.cls.r2) + "} [" +
                                        tableau(c.tableau) + "] size " + std::to_string(c.class_size) + " signed " +
                                        std::to_string(c.signed_count));
                     rows.push_back("total " + std::to_string(rep.total));
                     return lines(rows);
                 });
            return rep.match ? kOk : kVerifyFailed;
        }

        if (*check_field) {
            const auto op = parse_op(op_text);
            if (op.dim() != 3) throw ConfigError("check-field: operation must act on three coordinates");
            const auto in = field_input(config, field_text, seed);
            const Eigen::Matrix3d a = op.matrix();
            const auto gauge = default_gauge(in.field);
            const auto b = check_B_compat(a, in.field, in.samples, tol.value_or(kAnalyticTol), op.id());
            const auto ac = check_A_compat(a, in.field, gauge, in.samples, kCurlTol, op.id());
            const std::string result = b.verdict ? "compatible" : "incompatible";
            Json j{{"op", op.id()},
                   {"field", in.field.id()},
                   {"result", result},
                   {"B", report::compat(b)},
                   {"A", report::compat(ac)},
                   {"gauge", to_string(gauge)}};
            emit(common, "check-field", j,
                 [&] {
                     return "op,field,condition,max_residual,tol,verdict\n\"" + b.op_id + "\",\"" + b.field_id + "\",B," +
                            report::num(b.max_residual) + "," + report::num(b.tol) + "," + (b.verdict ? "true" : "false") +
                            "\n\"" + ac.op_id + "\",\"" + ac.field_id + "\",A," + report::num(ac.max_residual) + "," +
                            report::num(ac.tol) + "," + (ac.verdict ? "true" : "false") + "\n";
                 },
                 [&] { return result + "\n"; });
            return b.verdict ? kOk : kVerifyFailed;
        }

        if (*find_sym) {
            const auto in = field_input(config, field_text, seed);
            const auto set = find_compatible(in.field, in.samples);
            Json ops = Json::array();
            for (const auto& o : set.ops) ops.push_back(report::op(o));
            Json j{{"field", in.field.id()}, {"ops", ops}, {"continuous_family", set.continuous_family_applies}};
            emit(common, "find-symmetries", j,
                 [&] {
                     std::string s = "id\n";
                     for (const auto& o : set.ops) s += "\"" + o.id() + "\"\n";
                     return s;
                 },
                 [&] {
                     std::vector<std::string> rows;
                     for (const auto& o : set.ops) rows.push_back(o.id());
                     rows.push_back(std::string("continuous family: ") + (set.continuous_family_applies ? "yes" : "no"));
                     return lines(rows);
                 });
            return kOk;
        }

        if (*spin_ops) {
            const auto cat = catalog_spin_ops();
            Json arr = Json::array();
            for (const auto& e : cat) arr.push_back(report::spin_entry(e));
            emit(common, "spin-ops", arr,
                 [&] {
                     std::string s = "id,preserves_su2,t_squared,valid\n";
                     for (const auto& e : cat)
                         s += e.op.id + "," + (e.verdict.preserves_su2 ? "true" : "false") + "," +
                              to_string(e.verdict.t_squared) + "," + (e.verdict.valid() ? "true" : "false") + "\n";
                     return s;
                 },
                 [&] {
                     std::vector<std::string> rows;
                     for (const auto& e : cat)
                         rows.push_back(e.op.id + " T^2=" + to_string(e.verdict.t_squared) +
                                        (e.verdict.valid() ? " valid" : " invalid"));
                     return lines(rows);
                 });
            return kOk;
        }

        if (*spin_lift_cmd) {
            const auto op = parse_op(op_text);
            if (op.dim() != 3) throw ConfigError("spin-lift: operation must act on three coordinates");
            const Eigen::Matrix3d m = op.matrix();
            const auto lift = spin_lift(m);
            Json j{{"op", op.id()}};
            j.update(report::spin_lift(lift));
            bool ok = true;
            double residual = 0.0;
            if (!field_text.empty()) {
                SampleOptions opt;
                opt.samples = 100;
                if (seed) opt.seed = *seed;
                const auto field = parse_field(field_text);
                const bool compatible = check_B_compat(m, field, opt).verdict;
                residual = spin_coupling_residual(m, lift.u_s, field, opt);
                const bool holds = residual <= tol.value_or(acceptance::kSpinCouplingTol);
                ok = compatible && holds;
                j["coupling"] = {{"field", field.id()},
                                 {"compatible", compatible},
                                 {"max_residual", residual},
                                 {"verdict", ok}};
            }
            emit(common, "spin-lift", j,
                 [&] {
                     std::string s = "entry,re,im\n";
                     for (int r = 0; r < 2; ++r)
                         for (int c = 0; c < 2; ++c)
                             s += "u_s" + std::to_string(r) + std::to_string(c) + "," + report::num(lift.u_s(r, c).real()) +
                                  "," + report::num(lift.u_s(r, c).imag()) + "\n";
                     return s;
                 },
                 [&] {
                     std::ostringstream os;
                     os << "P =\n" << lift.p << "\nU_s =\n" << lift.u_s << "\n";
                     if (!field_text.empty()) os << (ok ? "coupling preserved" : "coupling not preserved") << "\n";
                     return os.str();
                 });
            return ok ? kOk : kVerifyFailed;
        }

        if (*kubo) {
            KuboJob job;
            SpinTimeReversal tr = two_spin_instance().t;
            MatXc phi, psi;
            if (config.empty()) {
                const auto inst = two_spin_instance();
                job.sys = inst.sys;
                job.beta = inst.beta;
                job.tr_name = "sigma_x";
                job.times = inst.times;
                phi = inst.phi;
                psi = inst.psi;
            } else {
                job = kubo_from_config(KeyValues::load(config));
                tr = SpinTimeReversal::uniform(job.sys.n, spin_op_by_name(job.tr_name), job.tr_name);
                phi = parse_observable(job.phi_text, job.sys.n);
                psi = parse_observable(job.psi_text, job.sys.n);
            }
            const ThermalState st(job.sys, job.beta);
            std::vector<CorrelatorValue> series;
            for (double t : job.times) series.push_back(canonical_correlator(st, phi, psi, t));
            Json pts = Json::array();
            for (std::size_t k = 0; k < series.size(); ++k)
                pts.push_back({{"t", job.times[k]}, {"value", series[k].value}, {"imag_residual", series[k].imag_residual}});
            Json j{{"n", job.sys.n}, {"beta", job.beta}, {"tr", job.tr_name}, {"series", pts}};
            bool ok = true;
            const bool commutes = tr_commutes(job.sys, tr);
            j["commutes"] = commutes;
            if (commutes) {
                const auto rep = verify_kubo_symmetry(job.sys, job.beta, tr, phi, psi, job.times,
                                                      tol.value_or(acceptance::kKuboSymmetryTol));
                j["symmetry"] = report::kubo_symmetry(rep);
                ok = rep.verdict;
            }
            emit(common, "kubo", j,
                 [&] {
                     std::string s = "t,value,imag_residual\n";
                     for (std::size_t k = 0; k < series.size(); ++k)
                         s += report::num(job.times[k]) + "," + report::num(series[k].value) + "," +
                              report::num(series[k].imag_residual) + "\n";
                     return s;
                 },
                 [&] {
                     std::vector<std::string> rows;
                     for (std::size_t k = 0; k < series.size(); ++k)
                         rows.push_back(report::num(job.times[k]) + " " + report::num(series[k].value));
                     if (commutes) rows.push_back(ok ? "symmetry holds" : "symmetry violated");
                     return lines(rows);
                 });
            return ok ? kOk : kVerifyFailed;
        }

        if (*simulate) {
            const auto job = sim_input(config, field_text, seed);
            const auto& cfg = job.cfg;
            std::optional<Eigen::Matrix3d> a;
            if (!op_text.empty()) {
                const auto op = parse_op(op_text);
                if (op.dim() != 3) throw ConfigError("simulate: operation must act on three coordinates");
                a = op.matrix();
            }
            struct Row {
                double drift = 0.0;
                double temperature = 0.0;
                double conjugacy = 0.0;
            };
            std::vector<Row> rows(static_cast<std::size_t>(cfg.n_trajectories));
            parallel_for(cfg.n_trajectories, [&](int k) {
                Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(k));
                MDState s = init_state(cfg, rng);
                equilibrate(s, cfg);
                Row& row = rows[static_cast<std::size_t>(k)];
                if (a) row.conjugacy = conjugacy_check(*a, s, cfg.steps, cfg);
                const double e0 = total_energy(cfg, s);
                for (int i = 1; i <= cfg.steps; ++i) {
                    step(s, cfg);
                    if (i % cfg.sample_stride == 0)
                        row.drift = std::max(row.drift, std::abs(total_energy(cfg, s) - e0) / std::abs(e0));
                }
                row.temperature = 2.0 * kinetic_energy(cfg, s) / (3.0 * s.particles());
            });
            Json arr = Json::array();
            for (std::size_t k = 0; k < rows.size(); ++k) {
                Json r{{"trajectory", k}, {"energy_drift", rows[k].drift}, {"temperature", rows[k].temperature}};
                if (a) r["conjugacy_deviation"] = rows[k].conjugacy;
                arr.push_back(r);
            }
            Json j{{"n", cfg.n},
                   {"field", cfg.field.id()},
                   {"boundary", to_string(cfg.boundary)},
                   {"dt", cfg.dt},
                   {"steps", cfg.steps},
                   {"seed", cfg.seed},
                   {"trajectories", arr}};
            emit(common, "simulate", j,
                 [&] {
                     std::string s = a ? "trajectory,energy_drift,temperature,conjugacy_deviation\n"
                                       : "trajectory,energy_drift,temperature\n";
                     for (std::size_t k = 0; k < rows.size(); ++k) {
                         s += std::to_string(k) + "," + report::num(rows[k].drift) + "," + report::num(rows[k].temperature);
                         if (a) s += "," + report::num(rows[k].conjugacy);
                         s += "\n";
                     }
                     return s;
                 },
                 [&] {
                     std::vector<std::string> out;
                     for (std::size_t k = 0; k < rows.size(); ++k)
                         out.push_back("trajectory " + std::to_string(k) + " drift " + report::num(rows[k].drift) +
                                       " T " + report::num(rows[k].temperature));
                     return lines(out);
                 });
            return kOk;
        }

        if (*correlate) {
            const auto job = sim_input(config, field_text, seed);
            CorrelatorRequest req;
            req.max_lag = job.max_lag;
            req.blocks = job.blocks;
            const auto est = velocity_correlator(job.cfg, req);
            const auto d = diffusion_tensor(est, job.t_max);
            const auto v = antisymmetry_check(d);
            Json j{{"field", job.cfg.field.id()},
                   {"trajectories", est.n_trajectories},
                   {"blocks", est.n_blocks},
                   {"origins_per_trajectory", est.origins_per_trajectory},
                   {"max_energy_drift", est.max_energy_drift}};
            j.update(report::diffusion(d, v));
            const auto csv = [&] {
                std::ostringstream os;
                report::correlator_csv(os, est);
                return os.str();
            };
            if (common.out.empty()) {
                emit(common, "correlate", j, csv, [&] {
                    std::ostringstream os;
                    os << "D =\n" << d.d << "\nD_xy + D_yx = " << v.sum << " +- " << v.se << "\n"
                       << (v.pass ? "antisymmetry holds" : "antisymmetry violated") << "\n";
                    return os.str();
                });
            } else {
                fs::create_directories(common.out);
                write_file(fs::path(common.out) / "correlators.csv", csv());
                write_file(fs::path(common.out) / "diffusion.json", j.dump(2) + "\n");
                for (const auto& ch : est.channels) {
                    std::ostringstream os;
                    report::two_column(os, est, ch);
                    std::string name = ch.key.label();
                    std::replace(name.begin(), name.end(), ':', '_');
                    write_file(fs::path(common.out) / ("C_" + name + ".dat"), os.str());
                }
            }
            return v.pass ? kOk : kVerifyFailed;
        }

        if (*verify) {
            acceptance::Options opt;
            opt.seed = seed.value_or(42);
            const auto all = acceptance::criteria();
            std::vector<acceptance::CriterionResult> results;
            for (std::size_t k = 0; k < all.size(); ++k) {
                const int id = static_cast<int>(k) + 1;
                if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
                results.push_back(all[k](opt));
            }
            bool pass = true;
            Json arr = Json::array();
            for (const auto& r : results) {
                pass = pass && r.pass;
                arr.push_back(criterion_json(r));
            }
            Json j{{"seed", opt.seed}, {"criteria", arr}, {"verdict", pass}};
            emit(common, "verify", j,
                 [&] {
                     std::string s = "id,name,verdict\n";
                     for (const auto& r : results)
                         s += std::to_string(r.id) + "," + r.name + "," + (r.pass ? "PASS" : "FAIL") + "\n";
                     return s;
                 },
                 [&] {
                     std::vector<std::string> rows;
                     for (const auto& r : results) {
                         rows.push_back(std::to_string(r.id) + " " + r.name + ": " + (r.pass ? "PASS" : "FAIL"));
                         for (const auto& n : r.notes) rows.push_back("  " + n);
                     }
                     return lines(rows);
                 });
            return pass ? kOk : kVerifyFailed;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
