// analysis.cpp - section statistics, error measures and sweeps.

#include "lipkin/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lipkin {

namespace {

void check_series(const std::vector<double>& exact,
                  const std::vector<double>& approx, double dt) {
    if (exact.size() != approx.size())
        throw std::invalid_argument("series lengths differ");
    if (exact.size() < 2)
        throw std::invalid_argument("series too short");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
}

// cumulative trapezoid of |f| on a uniform grid
std::vector<double> cum_abs_integral(const std::vector<double>& f, double dt) {
    std::vector<double> out(f.size(), 0.0);
    for (size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * dt * (std::abs(f[i - 1]) + std::abs(f[i]));
    return out;
}

}  // namespace

double delta_approx(const std::vector<double>& exact,
                    const std::vector<double>& approx, double dt) {
    check_series(exact, approx, dt);
    double num = 0.0, den = 0.0;
    for (size_t i = 1; i < exact.size(); ++i) {
        num += 0.5 * dt * (std::abs(exact[i - 1] - approx[i - 1]) +
                           std::abs(exact[i] - approx[i]));
        den += 0.5 * dt * (std::abs(exact[i - 1]) + std::abs(exact[i]));
    }
    if (den == 0.0)
        throw std::invalid_argument(
            "delta_approx: reference signal identically zero");
    return num / den;
}

std::optional<double> breakdown_time(const std::vector<double>& exact,
                                     const std::vector<double>& approx,
                                     double dt, double delta_max) {
    check_series(exact, approx, dt);
    if (!(delta_max > 0.0))
        throw std::invalid_argument("delta_max must be positive");
    std::vector<double> diff(exact.size());
    for (size_t i = 0; i < exact.size(); ++i) diff[i] = exact[i] - approx[i];
    const std::vector<double> num = cum_abs_integral(diff, dt);
    const std::vector<double> den = cum_abs_integral(exact, dt);
    for (size_t i = 1; i < exact.size(); ++i) {
        if (den[i] > 0.0 && num[i] / den[i] > delta_max)
            return double(i) * dt;
    }
    return std::nullopt;
}

MeanPoint section_ic_for_energy(const ModelParams& p, double e_fig) {
    // Along q_a = 0 the section energy E(x), x = p_a^2, falls monotonically
    // from 1 at x = 0 to its minimum at x_hi = min(2, 1 - 1/chi) for chi < 0.
    double x_hi = 2.0;
    if (p.chi < 0.0) x_hi = std::min(2.0, 1.0 - 1.0 / p.chi);
    const double e_lo = section_energy_on_pa_axis(x_hi, p);
    if (!(e_fig < 1.0) || !(e_fig > e_lo))
        throw std::invalid_argument(
            "target energy " + std::to_string(e_fig) +
            " outside the reachable band (" + std::to_string(e_lo) + ", 1)");
    double a = 0.0, b = x_hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (section_energy_on_pa_axis(mid, p) > e_fig)
            a = mid;
        else
            b = mid;
    }
    const double x = 0.5 * (a + b);
    return MeanPoint{0.0, -std::sqrt(x), 0.0, std::sqrt(2.0 - x)};
}

AnalysisMetrics confinement_stats(const ModelParams& p, double e_fig,
                                  Level level, const ConfinementBudget& budget,
                                  const IntegratorConfig& cfg,
                                  HscSource source) {
    const MeanPoint ic = section_ic_for_energy(p, e_fig);
    SemiState s0;
    s0.mean = ic;
    s0.width = minimal_widths(p.nu_a, p.nu_b);

    std::vector<double> crossing_times;
    std::vector<double> transition_times;
    crossing_times.reserve(budget.max_crossings);
    int prev_sign = 0;
    int transitions = 0;
    auto on_crossing = [&](const SectionPoint& pt, const SemiState&) {
        crossing_times.push_back(pt.t);
        const int sign = pt.p_a > 1e-12 ? 1 : (pt.p_a < -1e-12 ? -1 : 0);
        if (sign != 0) {
            if (prev_sign != 0 && sign != prev_sign) {
                transition_times.push_back(pt.t);
                ++transitions;
            }
            prev_sign = sign;
        }
        return transitions < budget.max_transitions;
    };
    section_crossings(s0, p, level, budget.max_crossings, cfg, source,
                      budget.t_budget, on_crossing);

    AnalysisMetrics m;
    m.n_crossings_observed = static_cast<int>(crossing_times.size());
    m.n_transitions_observed = transitions;
    if (!crossing_times.empty()) {
        // return intervals, the first one measured from the section start
        double prev = 0.0, sum = 0.0;
        for (double t : crossing_times) {
            sum += t - prev;
            prev = t;
        }
        m.t_p_mean = sum / double(crossing_times.size());
    }
    if (!transition_times.empty()) {
        double prev = 0.0, sum = 0.0;
        for (double t : transition_times) {
            sum += t - prev;
            prev = t;
        }
        m.t_c_mean = sum / double(transition_times.size());
        if (m.t_p_mean > 0.0) m.ratio = m.t_c_mean / m.t_p_mean;
    } else if (!crossing_times.empty()) {
        // budget exhausted without a transition: the elapsed time is a
        // censored lower bound on the confinement interval
        m.t_c_mean = crossing_times.back();
        if (m.t_p_mean > 0.0) m.ratio = m.t_c_mean / m.t_p_mean;
    }
    return m;
}

std::vector<PortraitRun> poincare_portrait(const std::vector<SemiState>& ics,
                                           const ModelParams& p, Level level,
                                           int n_crossings,
                                           const IntegratorConfig& cfg,
                                           HscSource source, bool parallel) {
    std::vector<PortraitRun> runs(ics.size());
    const long long n = static_cast<long long>(ics.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long long i = 0; i < n; ++i) {
        PortraitRun run;
        run.ic_index = static_cast<int>(i);
        run.e_fig = 2.0 *
                    level_hamiltonian(ics[i], p, level, source) / p.epsilon;
        run.result =
            section_crossings(ics[i], p, level, n_crossings, cfg, source);
        runs[i] = std::move(run);
    }
    return runs;
}

std::vector<SemiState> default_portrait_ics(const ModelParams& p, int n_ic) {
    if (n_ic < 2) throw std::invalid_argument("n_ic must be >= 2");
    std::vector<SemiState> ics;
    const WidthPoint w = minimal_widths(p.nu_a, p.nu_b);
    const int half = n_ic / 2;
    // fan along the p_a axis (covers rotational and the E_min family) and
    // along the q_a axis (covers the E_max family for |chi| > 1)
    for (int i = 0; i < half; ++i) {
        const double pa = -std::sqrt(2.0) * (i + 0.5) / half;
        ics.push_back(complete_on_section(0.0, pa, w, p));
    }
    for (int i = 0; i < n_ic - half; ++i) {
        const double qa = std::sqrt(2.0) * (i + 0.5) / (n_ic - half);
        ics.push_back(complete_on_section(qa, 0.0, w, p));
    }
    return ics;
}

CompareSeries compare_levels(const ModelParams& p, const MeanPoint& ic,
                             double t_max, const IntegratorConfig& cfg,
                             HscSource source, bool parallel) {
    CompareSeries out;
    SemiState s0;
    s0.mean = ic;
    s0.width = minimal_widths(p.nu_a, p.nu_b);

    const Trajectory cl = integrate(s0, p, Level::classical, t_max, cfg, source);
    const Trajectory sc =
        integrate(s0, p, Level::semiclassical, t_max, cfg, source);
    if (cl.failed || sc.failed || cl.times.size() != sc.times.size()) {
        out.failed = true;
        return out;
    }
    out.times = cl.times;
    out.jz_classical.reserve(cl.times.size());
    out.jz_semiclassical.reserve(sc.times.size());
    for (const auto& o : cl.observables) out.jz_classical.push_back(o.jz_over_j);
    for (const auto& o : sc.observables)
        out.jz_semiclassical.push_back(o.jz_over_j);

    const SpectralDecomp decomp = diagonalize(build_hamiltonian(p));
    const QuantumState psi0 = spin_coherent(ic, p.j);
    const std::vector<ExactSample> ex =
        evolve_exact(psi0, decomp, out.times, p.j, parallel);
    out.jz_exact.reserve(ex.size());
    for (const auto& s : ex) out.jz_exact.push_back(s.jz_over_j);
    return out;
}

std::vector<SweepRow> convergence_sweep(const std::vector<double>& j_list,
                                        double epsilon, double chi,
                                        const MeanPoint& ic, double t_window,
                                        const IntegratorConfig& cfg,
                                        HscSource source, bool parallel) {
    if (j_list.empty()) throw std::invalid_argument("empty j list");
    std::vector<SweepRow> rows(j_list.size());
    const long long n = static_cast<long long>(j_list.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long long i = 0; i < n; ++i) {
        const ModelParams p = make_params(epsilon, chi, j_list[i]);
        const CompareSeries s =
            compare_levels(p, ic, t_window, cfg, source, false);
        SweepRow row;
        row.j = j_list[i];
        row.inv_j = 1.0 / j_list[i];
        if (!s.failed) {
            row.delta_classical =
                delta_approx(s.jz_exact, s.jz_classical, cfg.sample_dt);
            row.delta_semiclassical =
                delta_approx(s.jz_exact, s.jz_semiclassical, cfg.sample_dt);
        } else {
            row.delta_classical = row.delta_semiclassical =
                std::numeric_limits<double>::quiet_NaN();
        }
        rows[i] = row;
    }
    return rows;
}

std::vector<BreakdownRow> breakdown_sweep(const std::vector<double>& j_list,
                                          double epsilon, double chi,
                                          const MeanPoint& ic, double t_max,
                                          double delta_max,
                                          const IntegratorConfig& cfg,
                                          HscSource source, bool parallel) {
    if (j_list.empty()) throw std::invalid_argument("empty j list");
    std::vector<BreakdownRow> rows(j_list.size());
    const long long n = static_cast<long long>(j_list.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long long i = 0; i < n; ++i) {
        const ModelParams p = make_params(epsilon, chi, j_list[i]);
        const CompareSeries s = compare_levels(p, ic, t_max, cfg, source, false);
        BreakdownRow row;
        row.j = j_list[i];
        row.inv_j = 1.0 / j_list[i];
        if (!s.failed) {
            row.t_b_classical = breakdown_time(s.jz_exact, s.jz_classical,
                                               cfg.sample_dt, delta_max);
            row.t_b_semiclassical = breakdown_time(
                s.jz_exact, s.jz_semiclassical, cfg.sample_dt, delta_max);
        }
        rows[i] = row;
    }
    return rows;
}

}  // namespace lipkin
