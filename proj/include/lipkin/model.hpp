// model.hpp - Two-mode (Schwinger) Lipkin model in the Gaussian semiquantal
// description: parameter set, width kinematics, Hamiltonian functions,
// phase-space observables and section geometry.

#pragma once

#include <array>
#include <complex>
#include <optional>
#include <utility>

namespace lipkin {

using complexd = std::complex<double>;

// Physical and scaled couplings. chi = v * n_particles always; v is stored
// for the quantum-exact builder, chi drives the scaled dynamics.
struct ModelParams {
    double epsilon = 1.0;   // level splitting
    double v = 0.0;         // two-body coupling, v = chi / N
    double chi = 0.0;       // scaled coupling, dimensionless
    double j = 0.5;         // half-integer spin, N = 2J
    double n_particles = 1.0;
    double nu_a = 0.0;      // fluctuation occupation of mode a, frozen
    double nu_b = 0.0;      // fluctuation occupation of mode b, frozen
    static constexpr double mu0 = 1.0;
};

// epsilon > 0, 2j a positive integer, nu >= 0. Throws std::invalid_argument.
ModelParams make_params(double epsilon, double chi, double j,
                        double nu_a = 0.0, double nu_b = 0.0);

// Scaled mean-field coordinates. Mode occupations n_a + n_b = 1 on the
// classical constraint surface.
struct MeanPoint {
    double q_a = 0.0, p_a = 0.0, q_b = 0.0, p_b = 0.0;
    double n_a() const { return 0.5 * (q_a * q_a + p_a * p_a); }
    double n_b() const { return 0.5 * (q_b * q_b + p_b * p_b); }
};

// Canonical width coordinates. Q_a, Q_b > 0 always (centrifugal barrier).
struct WidthPoint {
    double Q_a = 0.0, P_a = 0.0, Q_b = 0.0, P_b = 0.0;
};

// Minimal uncertainty widths: Q = sqrt((1+2nu)/2), P = 0.
WidthPoint minimal_widths(double nu_a = 0.0, double nu_b = 0.0);

struct SemiState {
    MeanPoint mean;
    WidthPoint width;
};

// Squeeze parameters and transformation coefficients of one mode.
// Normalization |x|^2 - |y|^2 = 1.
struct BogoliubovParams {
    double sigma = 0.0, tau = 0.0;
    complexd x{1.0, 0.0}, y{0.0, 0.0};
};

// Per-mode fluctuation moments: occupation <a~+ a~> and pair correlation
// <a~ a~>. Satisfies n_f (n_f + 1) - |c|^2 = nu (nu + 1).
struct GaussianMoments {
    double n_f = 0.0;
    complexd c{0.0, 0.0};
};

struct ObservableSet {
    double jz_over_j = 0.0;
    double jx_over_j = 0.0;
    double jy_over_j = 0.0;
    double energy_fig = 0.0;  // reported energy, E_fig = 2 H / epsilon
    double n_scaled = 0.0;
};

// Unscaled mean amplitudes <a>, <b>.
struct AmplitudePair {
    complexd alpha{0.0, 0.0}, beta{0.0, 0.0};
};

// Which expression generates the semiclassical Hamiltonian: the trace over
// the product Gaussian state (default) or the printed 1/J-expansion form.
// The two differ only in the correction prefactors (1/N^k vs 1/J^k).
enum class HscSource { derived, printed };

enum class Level { classical, semiclassical, exact };

// ---- width kinematics -------------------------------------------------

// (n_f, c) from the canonical width pair. Throws std::domain_error on Q <= 0.
GaussianMoments gaussian_moments(double Q, double P, double nu);

// (dq2, dp2) = (Q^2, P^2 + (1+2nu)^2 / (4 Q^2)).
std::pair<double, double> variances(double Q, double P, double nu);

// sqrt((1+2nu)^2/4 + P^2 Q^2), always >= (1+2nu)/2.
double uncertainty_product(double Q, double P, double nu);

BogoliubovParams bogoliubov_from_canonical(double Q, double P, double nu);
// Inverse map, returns (Q, P).
std::pair<double, double> canonical_from_bogoliubov(const BogoliubovParams& bp,
                                                    double nu);
// (n_f, c) through the transformation coefficients; independent route used
// to validate gaussian_moments.
GaussianMoments moments_from_bogoliubov(const BogoliubovParams& bp, double nu);

// ---- Hamiltonian functions --------------------------------------------

AmplitudePair mean_amplitudes(const MeanPoint& mean, const ModelParams& p);

// Classical-limit Hamiltonian of the scaled mean-field coordinates.
double h_classical(const MeanPoint& mean, const ModelParams& p);

// First- and second-order correction brackets (without their 1/J prefactors).
// Both vanish identically on minimal widths.
double h_correction1(const SemiState& s, const ModelParams& p);
double h_correction2(const SemiState& s, const ModelParams& p);

// Full semiclassical Hamiltonian. source selects the correction prefactors;
// the classical part is identical either way.
double h_semiclassical(const SemiState& s, const ModelParams& p,
                       HscSource source = HscSource::derived);

// Expectation of the two-mode Hamiltonian over the product Gaussian state,
// via mean_amplitudes / gaussian_moments and Wick factorization, normalized
// by N. Agrees with h_semiclassical(derived) to rounding; kept as the
// independent route.
double h_trace(const SemiState& s, const ModelParams& p);

// n_a + n_b + (n_fa + n_fb)/N; equals 1 on the constraint surface at
// minimal widths. Zero-point width contributions excluded.
double scaled_particle_number(const SemiState& s, const ModelParams& p);

ObservableSet observables(const SemiState& s, const ModelParams& p,
                          HscSource source = HscSource::derived);

// ---- fixed points and section geometry --------------------------------

// Extreme reported energies -|1+chi^2|/|2 chi| and +|1+chi^2|/|2 chi| of the
// deformed families; empty for |chi| <= 1 (rotational band only, |E| < 1).
std::optional<std::pair<double, double>> extreme_energies(double chi);

struct FixedPointFamily {
    std::array<MeanPoint, 2> points;  // representatives with p_b > 0
    double e_fig = 0.0;
};

// The two deformed fixed-point families of the Poincare map, |chi| > 1 only.
// first:  q_a = 0, p_a = +-sqrt(1 - 1/chi), p_b = sqrt(1 + 1/chi)
// second: p_a = 0, q_a = +-sqrt(1 + 1/chi), p_b = sqrt(1 - 1/chi)
std::optional<std::pair<FixedPointFamily, FixedPointFamily>>
fixed_points(const ModelParams& p);

// Completes a section point (q_a, p_a) with q_b = 0, p_b = +sqrt(2(1 - n_a))
// so the classical scaled particle number is 1. Throws on n_a > 1.
SemiState complete_on_section(double q_a, double p_a, const WidthPoint& w,
                              const ModelParams& p);

// Reported energy of the classical section completion of (q_a = 0, p_a):
// convenience used when placing initial conditions at a target energy.
double section_energy_on_pa_axis(double pa_sq, const ModelParams& p);

}  // namespace lipkin
