// dynamics.hpp - symplectic-gradient vector fields, adaptive RK5(4)
// integration with cubic-Hermite dense output, and Poincare-plane
// event detection on q_b = 0, p_b > 0.

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "lipkin/model.hpp"

namespace lipkin {

// Flat phase-space layout: (q_a, p_a, q_b, p_b, Q_a, P_a, Q_b, P_b).
using State8 = std::array<double, 8>;

State8 pack(const SemiState& s);
SemiState unpack(const State8& y);

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 1.0;
    double sample_dt = 0.05;
};

// Time derivative of all 8 coordinates under the Poisson bracket
// qdot = dH/dp, pdot = -dH/dq, Qdot = dH/dP, Pdot = -dH/dQ.
// classical: gradient of h_classical, width block frozen.
State8 vector_field(const SemiState& s, const ModelParams& p, Level level,
                    HscSource source = HscSource::derived);

// Gradient of the level Hamiltonian in the State8 layout (analytic).
State8 hamiltonian_gradient(const SemiState& s, const ModelParams& p,
                            Level level, HscSource source = HscSource::derived);

// Value of the level Hamiltonian (h_classical or h_semiclassical).
double level_hamiltonian(const SemiState& s, const ModelParams& p, Level level,
                         HscSource source = HscSource::derived);

struct Trajectory {
    std::vector<double> times;
    std::vector<SemiState> states;
    std::vector<ObservableSet> observables;
    Level level = Level::classical;
    bool failed = false;
    std::string failure;
};

// Sampled trajectory on the uniform sample_dt grid (t_max may be negative;
// the grid then descends). On step-size underflow near the barrier the
// trajectory is truncated at the last good state with failed = true.
Trajectory integrate(const SemiState& s0, const ModelParams& p, Level level,
                     double t_max, const IntegratorConfig& cfg,
                     HscSource source = HscSource::derived);

struct SectionPoint {
    int index = 0;
    double t = 0.0;
    double q_a = 0.0, p_a = 0.0;
};

struct SectionResult {
    std::vector<SectionPoint> points;
    bool complete = false;   // requested crossing count reached
    bool failed = false;     // integration aborted
    std::string failure;
    double t_end = 0.0;
};

// Crossings of q_b = 0 with p_b > 0, located by bisection on the dense
// output to |q_b| < 1e-10. Stops after n_crossings, t_budget time units,
// or when on_crossing returns false.
SectionResult section_crossings(
    const SemiState& s0, const ModelParams& p, Level level, int n_crossings,
    const IntegratorConfig& cfg, HscSource source = HscSource::derived,
    double t_budget = 1e9,
    const std::function<bool(const SectionPoint&, const SemiState&)>&
        on_crossing = {});

struct ConservationReport {
    double max_dh = 0.0;  // max |H(t) - H(0)|
    double max_dn = 0.0;  // max |N(t) - N(0)|
};

ConservationReport conservation_report(const Trajectory& traj,
                                       const ModelParams& p,
                                       HscSource source = HscSource::derived);

}  // namespace lipkin
