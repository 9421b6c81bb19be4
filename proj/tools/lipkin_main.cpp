// lipkin_main.cpp - command-line driver: evolve / poincare / tunneling /
// compare / breakdown / sweep. Writes CSV datasets plus a JSON run manifest
// per invocation.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lipkin/analysis.hpp"
#include "lipkin/dynamics.hpp"
#include "lipkin/io.hpp"
#include "lipkin/model.hpp"
#include "lipkin/quantum.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using lipkin::fmt_g17;
using ordered_json = nlohmann::ordered_json;

struct Options {
    double epsilon = 1.0;
    double chi = -6.0;
    double j = 4.0;
    double nu_a = 0.0;
    double nu_b = 0.0;
    std::string level = "semiclassical";
    double e_fig = std::numeric_limits<double>::quiet_NaN();
    std::string ic;
    double t_max = 100.0;
    double sample_dt = 0.05;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long crossings = 1000;
    long max_transitions = 1000;
    int n_ic = 16;
    double delta_max = 0.12;
    std::string hsc_source = "derived";
    std::string j_list;
    std::string out = "out.csv";
    std::string config;
    bool serial = false;
};

// Per-subcommand registry so config-file keys can be validated and applied
// with command-line precedence.
struct OptionRegistry {
    struct Entry {
        CLI::Option* opt;
        std::function<void(const std::string&)> set;
    };
    std::map<std::string, Entry> entries;

    void add(CLI::Option* opt, const std::string& key,
             std::function<void(const std::string&)> set) {
        entries[key] = {opt, std::move(set)};
    }

    void apply_config(const std::string& path) {
        for (const auto& [key, value] : lipkin::read_config_file(path)) {
            auto it = entries.find(key);
            if (it == entries.end())
                throw std::invalid_argument("unknown config key '" + key + "'");
            if (it->second.opt->count() == 0) it->second.set(value);
        }
    }
};

double to_double(const std::string& key, const std::string& v) {
    size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key +
                                    "': expected a number, got '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config key '" + key +
                                    "': expected a number, got '" + v + "'");
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d))
        throw std::invalid_argument("config key '" + key +
                                    "': expected an integer, got '" + v + "'");
    return static_cast<long>(d);
}

void register_common(CLI::App* sub, Options& o, OptionRegistry& reg) {
    auto addd = [&](const char* flag, const char* key, double& target,
                    const char* desc) {
        CLI::Option* opt = sub->add_option(flag, target, desc);
        reg.add(opt, key, [key, &target](const std::string& v) {
            target = to_double(key, v);
        });
    };
    auto addl = [&](const char* flag, const char* key, long& target,
                    const char* desc) {
        CLI::Option* opt = sub->add_option(flag, target, desc);
        reg.add(opt, key, [key, &target](const std::string& v) {
            target = to_long(key, v);
        });
    };
    auto adds = [&](const char* flag, const char* key, std::string& target,
                    const char* desc) {
        CLI::Option* opt = sub->add_option(flag, target, desc);
        reg.add(opt, key,
                [&target](const std::string& v) { target = v; });
    };
    addd("--epsilon", "epsilon", o.epsilon, "level splitting (> 0)");
    addd("--chi", "chi", o.chi, "scaled coupling chi = V N");
    addd("--j", "j", o.j, "half-integer spin (N = 2J)");
    addd("--nu-a", "nu_a", o.nu_a, "mode-a fluctuation occupation");
    addd("--nu-b", "nu_b", o.nu_b, "mode-b fluctuation occupation");
    adds("--level", "level", o.level, "classical | semiclassical | exact");
    addd("--e-fig", "e_fig", o.e_fig, "target reported energy for the IC");
    adds("--ic", "ic", o.ic, "initial condition 'qa,pa[,qb,pb]'");
    addd("--t-max", "t_max", o.t_max, "integration window");
    addd("--sample-dt", "sample_dt", o.sample_dt, "output spacing");
    addd("--rel-tol", "rel_tol", o.rel_tol, "integrator relative tolerance");
    addd("--abs-tol", "abs_tol", o.abs_tol, "integrator absolute tolerance");
    addl("--crossings", "crossings", o.crossings, "section crossing budget");
    addl("--max-transitions", "max_transitions", o.max_transitions,
         "transition cap for tunneling statistics");
    addd("--delta-max", "delta_max", o.delta_max,
         "breakdown error threshold");
    adds("--hsc-source", "hsc_source", o.hsc_source,
         "semiclassical Hamiltonian source: derived | printed");
    adds("--j-list", "j_list", o.j_list, "comma-separated J values");
    {
        CLI::Option* opt =
            sub->add_option("--n-ic", o.n_ic, "portrait initial-condition count");
        reg.add(opt, "n_ic", [&o](const std::string& v) {
            o.n_ic = static_cast<int>(to_long("n_ic", v));
        });
    }
    adds("--out", "out", o.out, "output CSV path");
    {
        CLI::Option* opt = sub->add_flag("--serial", o.serial,
                                         "disable parallel batch loops");
        reg.add(opt, "serial", [&o](const std::string& v) {
            o.serial = (v == "1" || v == "true");
        });
    }
    sub->add_option("--config", o.config, "flat key = value config file");
}

lipkin::Level parse_level(const std::string& s) {
    if (s == "classical") return lipkin::Level::classical;
    if (s == "semiclassical") return lipkin::Level::semiclassical;
    if (s == "exact") return lipkin::Level::exact;
    throw std::invalid_argument("invalid level '" + s + "'");
}

lipkin::HscSource parse_source(const std::string& s) {
    if (s == "derived") return lipkin::HscSource::derived;
    if (s == "printed") return lipkin::HscSource::printed;
    throw std::invalid_argument("invalid hsc source '" + s + "'");
}

lipkin::IntegratorConfig integrator_config(const Options& o) {
    lipkin::IntegratorConfig cfg;
    cfg.rel_tol = o.rel_tol;
    cfg.abs_tol = o.abs_tol;
    cfg.sample_dt = o.sample_dt;
    return cfg;
}

lipkin::MeanPoint resolve_ic(const Options& o, const lipkin::ModelParams& p) {
    if (!o.ic.empty()) {
        const std::vector<double> v = lipkin::parse_double_list(o.ic);
        if (v.size() == 4) return lipkin::MeanPoint{v[0], v[1], v[2], v[3]};
        if (v.size() == 2)
            return lipkin::complete_on_section(
                       v[0], v[1], lipkin::minimal_widths(p.nu_a, p.nu_b), p)
                .mean;
        throw std::invalid_argument("--ic needs 2 or 4 comma-separated values");
    }
    if (std::isfinite(o.e_fig)) return lipkin::section_ic_for_energy(p, o.e_fig);
    throw std::invalid_argument("an initial condition is required: --ic or --e-fig");
}

std::vector<double> resolve_j_list(const Options& o) {
    if (o.j_list.empty()) return {o.j};
    return lipkin::parse_double_list(o.j_list);
}

std::vector<double> sample_grid(double t_max, double dt) {
    std::vector<double> times;
    const long n = static_cast<long>(std::floor(t_max / dt + 1e-9));
    times.reserve(n + 1);
    for (long i = 0; i <= n; ++i) times.push_back(double(i) * dt);
    return times;
}

ordered_json config_echo(const Options& o, const std::string& command) {
    ordered_json c;
    c["command"] = command;
    c["epsilon"] = o.epsilon;
    c["chi"] = o.chi;
    c["j"] = o.j;
    c["nu_a"] = o.nu_a;
    c["nu_b"] = o.nu_b;
    c["level"] = o.level;
    c["e_fig"] = std::isfinite(o.e_fig) ? ordered_json(o.e_fig)
                                        : ordered_json(nullptr);
    c["ic"] = o.ic;
    c["t_max"] = o.t_max;
    c["sample_dt"] = o.sample_dt;
    c["rel_tol"] = o.rel_tol;
    c["abs_tol"] = o.abs_tol;
    c["crossings"] = o.crossings;
    c["max_transitions"] = o.max_transitions;
    c["n_ic"] = o.n_ic;
    c["delta_max"] = o.delta_max;
    c["hsc_source"] = o.hsc_source;
    c["j_list"] = o.j_list;
    c["out"] = o.out;
    c["serial"] = o.serial;
    return c;
}

class RunContext {
  public:
    RunContext(const Options& o, const std::string& command)
        : opts_(o), start_(std::chrono::steady_clock::now()) {
        manifest_["tool"] = "lipkin";
        manifest_["version"] = kVersion;
        manifest_["config"] = config_echo(o, command);
    }

    ordered_json& metrics() { return manifest_["metrics"]; }

    int finish(int code, const std::string& error = "") {
        manifest_["status"] = (code == 0) ? "ok" : "failed";
        if (!error.empty()) manifest_["error"] = error;
        const auto dur = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
        manifest_["duration_seconds"] = dur;
        lipkin::write_file_atomic(opts_.out + ".manifest.json",
                                  manifest_.dump(2) + "\n");
        return code;
    }

  private:
    const Options& opts_;
    std::chrono::steady_clock::time_point start_;
    ordered_json manifest_;
};

// ---- commands ---------------------------------------------------------

int cmd_evolve(const Options& o) {
    RunContext ctx(o, "evolve");
    try {
        const lipkin::ModelParams p =
            lipkin::make_params(o.epsilon, o.chi, o.j, o.nu_a, o.nu_b);
        const lipkin::Level level = parse_level(o.level);
        const lipkin::HscSource src = parse_source(o.hsc_source);
        const lipkin::MeanPoint mean = resolve_ic(o, p);
        std::ostringstream csv;

        if (level == lipkin::Level::exact) {
            const lipkin::SpectralDecomp decomp =
                lipkin::diagonalize(lipkin::build_hamiltonian(p));
            const lipkin::QuantumState psi0 = lipkin::spin_coherent(mean, p.j);
            const std::vector<double> times =
                sample_grid(o.t_max, o.sample_dt);
            const auto samples =
                lipkin::evolve_exact(psi0, decomp, times, p.j, !o.serial);
            csv << "t,jz_over_j,jx_over_j,norm\n";
            double norm_drift = 0.0;
            for (const auto& s : samples) {
                csv << fmt_g17(s.t) << ',' << fmt_g17(s.jz_over_j) << ','
                    << fmt_g17(s.jx_over_j) << ',' << fmt_g17(s.norm) << '\n';
                norm_drift = std::max(norm_drift, std::abs(s.norm - 1.0));
            }
            ctx.metrics()["norm_drift"] = norm_drift;
            lipkin::write_file_atomic(o.out, csv.str());
            return ctx.finish(0);
        }

        lipkin::SemiState s0;
        s0.mean = mean;
        s0.width = lipkin::minimal_widths(p.nu_a, p.nu_b);
        const lipkin::Trajectory traj =
            lipkin::integrate(s0, p, level, o.t_max, integrator_config(o), src);
        csv << "t,q_a,p_a,q_b,p_b,Q_a,P_a,Q_b,P_b,e_fig,n_scaled,"
               "jz_over_j,jx_over_j\n";
        for (size_t i = 0; i < traj.times.size(); ++i) {
            const lipkin::SemiState& s = traj.states[i];
            const lipkin::ObservableSet& ob = traj.observables[i];
            const double e_fig =
                2.0 * lipkin::level_hamiltonian(s, p, level, src) / p.epsilon;
            csv << fmt_g17(traj.times[i]) << ',' << fmt_g17(s.mean.q_a) << ','
                << fmt_g17(s.mean.p_a) << ',' << fmt_g17(s.mean.q_b) << ','
                << fmt_g17(s.mean.p_b) << ',' << fmt_g17(s.width.Q_a) << ','
                << fmt_g17(s.width.P_a) << ',' << fmt_g17(s.width.Q_b) << ','
                << fmt_g17(s.width.P_b) << ',' << fmt_g17(e_fig) << ','
                << fmt_g17(ob.n_scaled) << ',' << fmt_g17(ob.jz_over_j) << ','
                << fmt_g17(ob.jx_over_j) << '\n';
        }
        const lipkin::ConservationReport rep =
            lipkin::conservation_report(traj, p, src);
        ctx.metrics()["max_dh"] = rep.max_dh;
        ctx.metrics()["max_dn"] = rep.max_dn;
        if (traj.failed) {
            ctx.metrics()["t_reached"] = traj.times.back();
            lipkin::write_file_atomic(o.out, csv.str());
            return ctx.finish(3, "integration failed: " + traj.failure);
        }
        lipkin::write_file_atomic(o.out, csv.str());
        return ctx.finish(0);
    } catch (const std::exception& e) {
        return ctx.finish(2, e.what());
    }
}

int cmd_poincare(const Options& o) {
    RunContext ctx(o, "poincare");
    try {
        const lipkin::ModelParams p =
            lipkin::make_params(o.epsilon, o.chi, o.j, o.nu_a, o.nu_b);
        const lipkin::Level level = parse_level(o.level);
        if (level == lipkin::Level::exact)
            throw std::invalid_argument("poincare needs an ODE level");
        const lipkin::HscSource src = parse_source(o.hsc_source);
        std::vector<lipkin::SemiState> ics;
        if (!o.ic.empty() || std::isfinite(o.e_fig)) {
            lipkin::SemiState s0;
            s0.mean = resolve_ic(o, p);
            s0.width = lipkin::minimal_widths(p.nu_a, p.nu_b);
            ics.push_back(s0);
        } else {
            ics = lipkin::default_portrait_ics(p, o.n_ic);
        }
        const auto runs = lipkin::poincare_portrait(
            ics, p, level, static_cast<int>(o.crossings),
            integrator_config(o), src, !o.serial);
        std::ostringstream csv;
        csv << "ic_index,crossing_index,t,q_a,p_a,status\n";
        int n_failed = 0;
        for (const auto& run : runs) {
            const char* status = run.result.failed ? "failed" : "ok";
            if (run.result.failed) ++n_failed;
            if (run.result.points.empty()) {
                csv << run.ic_index << ",-1,nan,nan,nan," << status << '\n';
                continue;
            }
            for (const auto& pt : run.result.points)
                csv << run.ic_index << ',' << pt.index << ',' << fmt_g17(pt.t)
                    << ',' << fmt_g17(pt.q_a) << ',' << fmt_g17(pt.p_a) << ','
                    << status << '\n';
        }
        lipkin::write_file_atomic(o.out, csv.str());
        ctx.metrics()["n_ic"] = runs.size();
        ctx.metrics()["n_failed"] = n_failed;
        return ctx.finish(n_failed == 0 ? 0 : 3,
                          n_failed ? "some initial conditions failed" : "");
    } catch (const std::exception& e) {
        return ctx.finish(2, e.what());
    }
}

int cmd_tunneling(const Options& o) {
    RunContext ctx(o, "tunneling");
    try {
        if (!std::isfinite(o.e_fig))
            throw std::invalid_argument("tunneling requires --e-fig");
        const lipkin::Level level = parse_level(o.level);
        if (level == lipkin::Level::exact)
            throw std::invalid_argument("tunneling needs an ODE level");
        const lipkin::HscSource src = parse_source(o.hsc_source);
        const std::vector<double> js = resolve_j_list(o);
        lipkin::ConfinementBudget budget;
        budget.max_transitions = static_cast<int>(o.max_transitions);
        budget.max_crossings = static_cast<int>(o.crossings);

        std::vector<lipkin::AnalysisMetrics> metrics(js.size());
        const long long n = static_cast<long long>(js.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (!o.serial)
#endif
        for (long long i = 0; i < n; ++i) {
            const lipkin::ModelParams p = lipkin::make_params(
                o.epsilon, o.chi, js[i], o.nu_a, o.nu_b);
            metrics[i] = lipkin::confinement_stats(p, o.e_fig, level, budget,
                                                   integrator_config(o), src);
        }
        std::ostringstream csv;
        csv << "j,e_fig,t_c_mean,t_p_mean,ratio,n_transitions\n";
        for (size_t i = 0; i < js.size(); ++i) {
            const auto& m = metrics[i];
            csv << fmt_g17(js[i]) << ',' << fmt_g17(o.e_fig) << ','
                << fmt_g17(m.t_c_mean) << ',' << fmt_g17(m.t_p_mean) << ','
                << fmt_g17(m.ratio.value_or(
                       std::numeric_limits<double>::quiet_NaN()))
                << ',' << m.n_transitions_observed << '\n';
        }
        lipkin::write_file_atomic(o.out, csv.str());
        ctx.metrics()["n_transitions"] =
            metrics.empty() ? 0 : metrics.front().n_transitions_observed;
        return ctx.finish(0);
    } catch (const std::exception& e) {
        return ctx.finish(2, e.what());
    }
}

int cmd_compare(const Options& o) {
    RunContext ctx(o, "compare");
    try {
        const lipkin::ModelParams p =
            lipkin::make_params(o.epsilon, o.chi, o.j, o.nu_a, o.nu_b);
        const lipkin::HscSource src = parse_source(o.hsc_source);
        const lipkin::MeanPoint mean = resolve_ic(o, p);
        const lipkin::CompareSeries s = lipkin::compare_levels(
            p, mean, o.t_max, integrator_config(o), src, !o.serial);
        if (s.failed) return ctx.finish(3, "trajectory integration failed");
        std::ostringstream csv;
        csv << "t,jz_exact,jz_classical,jz_semiclassical\n";
        for (size_t i = 0; i < s.times.size(); ++i)
            csv << fmt_g17(s.times[i]) << ',' << fmt_g17(s.jz_exact[i]) << ','
                << fmt_g17(s.jz_classical[i]) << ','
                << fmt_g17(s.jz_semiclassical[i]) << '\n';
        lipkin::write_file_atomic(o.out, csv.str());
        ctx.metrics()["delta_classical"] =
            lipkin::delta_approx(s.jz_exact, s.jz_classical, o.sample_dt);
        ctx.metrics()["delta_semiclassical"] =
            lipkin::delta_approx(s.jz_exact, s.jz_semiclassical, o.sample_dt);
        return ctx.finish(0);
    } catch (const std::exception& e) {
        return ctx.finish(2, e.what());
    }
}

int cmd_sweep(const Options& o) {
    RunContext ctx(o, "sweep");
    try {
        const lipkin::ModelParams p0 =
            lipkin::make_params(o.epsilon, o.chi, o.j, o.nu_a, o.nu_b);
        const lipkin::HscSource src = parse_source(o.hsc_source);
        const lipkin::MeanPoint mean = resolve_ic(o, p0);
        const auto rows = lipkin::convergence_sweep(
            resolve_j_list(o), o.epsilon, o.chi, mean, o.t_max,
            integrator_config(o), src, !o.serial);
        std::ostringstream csv;
        csv << "inv_j,delta_classical,delta_semiclassical\n";
        bool any_nan = false;
        for (const auto& r : rows) {
            csv << fmt_g17(r.inv_j) << ',' << fmt_g17(r.delta_classical) << ','
                << fmt_g17(r.delta_semiclassical) << '\n';
            any_nan = any_nan || std::isnan(r.delta_classical);
        }
        lipkin::write_file_atomic(o.out, csv.str());
        return ctx.finish(any_nan ? 3 : 0, any_nan ? "some runs failed" : "");
    } catch (const std::exception& e) {
        return ctx.finish(2, e.what());
    }
}

int cmd_breakdown(const Options& o) {
    RunContext ctx(o, "breakdown");
    try {
        const lipkin::ModelParams p0 =
            lipkin::make_params(o.epsilon, o.chi, o.j, o.nu_a, o.nu_b);
        const lipkin::HscSource src = parse_source(o.hsc_source);
        const lipkin::MeanPoint mean = resolve_ic(o, p0);
        const auto rows = lipkin::breakdown_sweep(
            resolve_j_list(o), o.epsilon, o.chi, mean, o.t_max, o.delta_max,
            integrator_config(o), src, !o.serial);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::ostringstream csv;
        csv << "inv_j,t_b_classical,t_b_semiclassical\n";
        for (const auto& r : rows)
            csv << fmt_g17(r.inv_j) << ','
                << fmt_g17(r.t_b_classical.value_or(nan)) << ','
                << fmt_g17(r.t_b_semiclassical.value_or(nan)) << '\n';
        lipkin::write_file_atomic(o.out, csv.str());
        return ctx.finish(0);
    } catch (const std::exception& e) {
        return ctx.finish(2, e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lipkin-model simulator: classical, Gaussian semiclassical "
                 "and exact quantum evolution with section analysis"};
    app.require_subcommand(1);

    Options opts;
    const std::vector<std::pair<std::string, std::function<int(const Options&)>>>
        commands = {{"evolve", cmd_evolve},       {"poincare", cmd_poincare},
                    {"tunneling", cmd_tunneling}, {"compare", cmd_compare},
                    {"breakdown", cmd_breakdown}, {"sweep", cmd_sweep}};

    std::map<std::string, OptionRegistry> registries;
    for (const auto& [name, fn] : commands) {
        CLI::App* sub = app.add_subcommand(
            name, std::string("run the ") + name + " command");
        register_common(sub, opts, registries[name]);
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, fn] : commands) {
        CLI::App* sub = app.get_subcommand(name);
        if (!sub->parsed()) continue;
        try {
            if (!opts.config.empty())
                registries[name].apply_config(opts.config);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        const int code = fn(opts);
        if (code != 0) std::cerr << name << " exited with status " << code
                                 << " (see manifest)\n";
        return code;
    }
    return 1;
}
