// analysis.hpp - Poincare portraits, tunneling/confinement statistics, the
// integrated observable-error measure and breakdown/convergence sweeps.
// Batch kernels run serially or fan out over OpenMP threads; results are
// positionally ordered so both paths produce identical output.

#pragma once

#include <optional>
#include <vector>

#include "lipkin/dynamics.hpp"
#include "lipkin/model.hpp"
#include "lipkin/quantum.hpp"

namespace lipkin {

struct AnalysisMetrics {
    double t_c_mean = 0.0;                 // mean confinement time
    double t_p_mean = 0.0;                 // mean Poincare return time
    std::optional<double> ratio;           // t_c_mean / t_p_mean
    int n_transitions_observed = 0;
    int n_crossings_observed = 0;
    double delta_approx = 0.0;
    std::optional<double> t_b;
};

// Trapezoidal integral ratio of |exact - approx| against |exact| on the
// shared uniform grid. Throws if the exact signal is identically zero.
double delta_approx(const std::vector<double>& exact,
                    const std::vector<double>& approx, double dt);

// Smallest grid time where the windowed error ratio exceeds delta_max.
std::optional<double> breakdown_time(const std::vector<double>& exact,
                                     const std::vector<double>& approx,
                                     double dt, double delta_max);

// Section initial condition at a target reported energy: q_a = 0, p_a < 0
// solved by bisection along the p_a axis, completed with q_b = 0,
// p_b = sqrt(2(1 - n_a)). Throws if e_fig is outside the reachable band.
MeanPoint section_ic_for_energy(const ModelParams& p, double e_fig);

struct ConfinementBudget {
    int max_transitions = 1000;
    int max_crossings = 20000;
    double t_budget = 1e9;
};

// Confinement statistics at a target energy: records section crossings,
// detects sign changes of p_a between consecutive crossings and averages
// the transition intervals T_c against the return intervals T_p.
AnalysisMetrics confinement_stats(const ModelParams& p, double e_fig,
                                  Level level, const ConfinementBudget& budget,
                                  const IntegratorConfig& cfg,
                                  HscSource source = HscSource::derived);

struct PortraitRun {
    int ic_index = 0;
    double e_fig = 0.0;
    SectionResult result;
};

std::vector<PortraitRun> poincare_portrait(
    const std::vector<SemiState>& ics, const ModelParams& p, Level level,
    int n_crossings, const IntegratorConfig& cfg,
    HscSource source = HscSource::derived, bool parallel = true);

// Default portrait initial-condition fan: section points along the p_a and
// q_a axes spanning the reachable energy band.
std::vector<SemiState> default_portrait_ics(const ModelParams& p, int n_ic);

struct CompareSeries {
    std::vector<double> times;
    std::vector<double> jz_exact;
    std::vector<double> jz_classical;
    std::vector<double> jz_semiclassical;
    bool failed = false;
};

// Exact, classical and semiclassical <J_z>/J from the coherent-state-matched
// initial condition, on the shared sample grid.
CompareSeries compare_levels(const ModelParams& p, const MeanPoint& ic,
                             double t_max, const IntegratorConfig& cfg,
                             HscSource source = HscSource::derived,
                             bool parallel = true);

struct SweepRow {
    double j = 0.0;
    double inv_j = 0.0;
    double delta_classical = 0.0;
    double delta_semiclassical = 0.0;
};

std::vector<SweepRow> convergence_sweep(const std::vector<double>& j_list,
                                        double epsilon, double chi,
                                        const MeanPoint& ic, double t_window,
                                        const IntegratorConfig& cfg,
                                        HscSource source = HscSource::derived,
                                        bool parallel = true);

struct BreakdownRow {
    double j = 0.0;
    double inv_j = 0.0;
    std::optional<double> t_b_classical;
    std::optional<double> t_b_semiclassical;
};

std::vector<BreakdownRow> breakdown_sweep(const std::vector<double>& j_list,
                                          double epsilon, double chi,
                                          const MeanPoint& ic, double t_max,
                                          double delta_max,
                                          const IntegratorConfig& cfg,
                                          HscSource source = HscSource::derived,
                                          bool parallel = true);

}  // namespace lipkin
