// model.cpp - width kinematics, Hamiltonian functions and section geometry.

#include "lipkin/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lipkin {

namespace {

double sq(double x) { return x * x; }

void require_barrier(double Q) {
    if (!(Q > 0.0))
        throw std::domain_error("width coordinate Q must be positive, got " +
                                std::to_string(Q));
}

void require_nu(double nu) {
    if (!(nu >= 0.0))
        throw std::invalid_argument("occupation nu must be >= 0, got " +
                                    std::to_string(nu));
}

// Correction bracket D = (1+2nu)^2/(8Q^2) - (Q^2 - P^2)/2 = -Re<a~ a~>.
double width_bracket(double Q, double P, double nu) {
    return sq(1.0 + 2.0 * nu) / (8.0 * Q * Q) - 0.5 * (Q * Q - P * P);
}

}  // namespace

ModelParams make_params(double epsilon, double chi, double j, double nu_a,
                        double nu_b) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("epsilon must be positive, got " +
                                    std::to_string(epsilon));
    const double two_j = 2.0 * j;
    if (!(j >= 0.5) || std::abs(two_j - std::round(two_j)) > 1e-9)
        throw std::invalid_argument(
            "j must be a positive half-integer (2j integer), got " +
            std::to_string(j));
    require_nu(nu_a);
    require_nu(nu_b);
    ModelParams p;
    p.epsilon = epsilon;
    p.chi = chi;
    p.j = j;
    p.n_particles = two_j;
    p.v = chi / two_j;
    p.nu_a = nu_a;
    p.nu_b = nu_b;
    return p;
}

WidthPoint minimal_widths(double nu_a, double nu_b) {
    WidthPoint w;
    w.Q_a = std::sqrt(0.5 * (1.0 + 2.0 * nu_a));
    w.Q_b = std::sqrt(0.5 * (1.0 + 2.0 * nu_b));
    w.P_a = w.P_b = 0.0;
    return w;
}

GaussianMoments gaussian_moments(double Q, double P, double nu) {
    require_barrier(Q);
    require_nu(nu);
    const double barrier = sq(1.0 + 2.0 * nu) / (4.0 * Q * Q);
    GaussianMoments m;
    m.n_f = 0.5 * (Q * Q + P * P + barrier - 1.0);
    m.c = complexd(0.5 * (Q * Q - P * P - barrier), -P * Q);
    return m;
}

std::pair<double, double> variances(double Q, double P, double nu) {
    require_barrier(Q);
    require_nu(nu);
    return {Q * Q, P * P + sq(1.0 + 2.0 * nu) / (4.0 * Q * Q)};
}

double uncertainty_product(double Q, double P, double nu) {
    require_barrier(Q);
    require_nu(nu);
    return std::sqrt(0.25 * sq(1.0 + 2.0 * nu) + P * P * Q * Q);
}

BogoliubovParams bogoliubov_from_canonical(double Q, double P, double nu) {
    require_barrier(Q);
    require_nu(nu);
    const double scale = std::sqrt(2.0 / (1.0 + 2.0 * nu));
    BogoliubovParams bp;
    bp.sigma = -std::log(Q * scale);
    bp.tau = P * scale;
    bp.x = complexd(std::cosh(bp.sigma), 0.5 * bp.tau);
    bp.y = complexd(std::sinh(bp.sigma), 0.5 * bp.tau);
    return bp;
}

std::pair<double, double> canonical_from_bogoliubov(const BogoliubovParams& bp,
                                                    double nu) {
    require_nu(nu);
    const double root = std::sqrt(0.5 * (1.0 + 2.0 * nu));
    return {root * std::exp(-bp.sigma), root * bp.tau};
}

GaussianMoments moments_from_bogoliubov(const BogoliubovParams& bp, double nu) {
    require_nu(nu);
    GaussianMoments m;
    m.n_f = std::norm(bp.y) * (1.0 + nu) + std::norm(bp.x) * nu;
    m.c = -std::conj(bp.x) * bp.y * (1.0 + 2.0 * nu);
    return m;
}

AmplitudePair mean_amplitudes(const MeanPoint& mean, const ModelParams& p) {
    const double root = std::sqrt(0.5 * p.n_particles);
    AmplitudePair amp;
    amp.alpha = root * complexd(mean.q_a, mean.p_a);
    amp.beta = root * complexd(mean.q_b, mean.p_b);
    return amp;
}

double h_classical(const MeanPoint& m, const ModelParams& p) {
    const double kinetic = 0.5 * p.epsilon * (m.n_b() - m.n_a());
    const double da = m.q_a * m.q_a - m.p_a * m.p_a;
    const double db = m.q_b * m.q_b - m.p_b * m.p_b;
    return kinetic +
           p.chi * (0.25 * da * db + m.q_a * m.p_a * m.q_b * m.p_b);
}

double h_correction1(const SemiState& s, const ModelParams& p) {
    const WidthPoint& w = s.width;
    require_barrier(w.Q_a);
    require_barrier(w.Q_b);
    const MeanPoint& m = s.mean;
    const double ka = sq(1.0 + 2.0 * p.nu_a);
    const double kb = sq(1.0 + 2.0 * p.nu_b);
    const double Da = width_bracket(w.Q_a, w.P_a, p.nu_a);
    const double Db = width_bracket(w.Q_b, w.P_b, p.nu_b);
    double h = 0.5 * p.epsilon *
               (0.5 * (w.Q_b * w.Q_b + w.P_b * w.P_b) -
                0.5 * (w.Q_a * w.Q_a + w.P_a * w.P_a) +
                kb / (8.0 * w.Q_b * w.Q_b) - ka / (8.0 * w.Q_a * w.Q_a));
    h -= p.chi * (0.5 * (m.q_b * m.q_b - m.p_b * m.p_b) * Da +
                  m.q_b * m.p_b * w.Q_a * w.P_a);
    h -= p.chi * (0.5 * (m.q_a * m.q_a - m.p_a * m.p_a) * Db +
                  m.q_a * m.p_a * w.Q_b * w.P_b);
    return h;
}

double h_correction2(const SemiState& s, const ModelParams& p) {
    const WidthPoint& w = s.width;
    require_barrier(w.Q_a);
    require_barrier(w.Q_b);
    const double Da = width_bracket(w.Q_a, w.P_a, p.nu_a);
    const double Db = width_bracket(w.Q_b, w.P_b, p.nu_b);
    return p.chi * (Da * Db + w.Q_a * w.P_a * w.Q_b * w.P_b);
}

double h_semiclassical(const SemiState& s, const ModelParams& p,
                       HscSource source) {
    // The trace route reproduces the printed correction brackets with the
    // 1/J^k prefactors replaced by 1/N^k; see h_trace.
    const double u =
        (source == HscSource::derived) ? 1.0 / p.n_particles : 1.0 / p.j;
    return h_classical(s.mean, p) + u * h_correction1(s, p) +
           u * u * h_correction2(s, p);
}

double h_trace(const SemiState& s, const ModelParams& p) {
    const AmplitudePair amp = mean_amplitudes(s.mean, p);
    const GaussianMoments ma =
        gaussian_moments(s.width.Q_a, s.width.P_a, p.nu_a);
    const GaussianMoments mb =
        gaussian_moments(s.width.Q_b, s.width.P_b, p.nu_b);
    const double occ_a = std::norm(amp.alpha) + ma.n_f;
    const double occ_b = std::norm(amp.beta) + mb.n_f;
    // <b+ b+ a a> = <b+ b+><a a> for the product state.
    const complexd aa = amp.alpha * amp.alpha + ma.c;
    const complexd bb = amp.beta * amp.beta + mb.c;
    const double h = 0.5 * p.epsilon * (occ_b - occ_a) +
                     p.v * std::real(std::conj(bb) * aa);
    return h / p.n_particles;
}

double scaled_particle_number(const SemiState& s, const ModelParams& p) {
    const GaussianMoments ma =
        gaussian_moments(s.width.Q_a, s.width.P_a, p.nu_a);
    const GaussianMoments mb =
        gaussian_moments(s.width.Q_b, s.width.P_b, p.nu_b);
    return s.mean.n_a() + s.mean.n_b() + (ma.n_f + mb.n_f) / p.n_particles;
}

ObservableSet observables(const SemiState& s, const ModelParams& p,
                          HscSource source) {
    const GaussianMoments ma =
        gaussian_moments(s.width.Q_a, s.width.P_a, p.nu_a);
    const GaussianMoments mb =
        gaussian_moments(s.width.Q_b, s.width.P_b, p.nu_b);
    const MeanPoint& m = s.mean;
    ObservableSet o;
    o.jz_over_j =
        (m.n_b() - m.n_a()) + (mb.n_f - ma.n_f) / (2.0 * p.j);
    o.jx_over_j = 0.5 * (m.q_a * m.q_b + m.p_a * m.p_b);
    o.jy_over_j = 0.5 * (m.q_b * m.p_a - m.q_a * m.p_b);
    o.energy_fig = 2.0 * h_semiclassical(s, p, source) / p.epsilon;
    o.n_scaled = m.n_a() + m.n_b() + (ma.n_f + mb.n_f) / p.n_particles;
    return o;
}

std::optional<std::pair<double, double>> extreme_energies(double chi) {
    if (std::abs(chi) <= 1.0) return std::nullopt;
    const double e = std::abs((1.0 + chi * chi) / (2.0 * chi));
    return std::make_pair(-e, e);
}

std::optional<std::pair<FixedPointFamily, FixedPointFamily>>
fixed_points(const ModelParams& p) {
    if (std::abs(p.chi) <= 1.0) return std::nullopt;
    const double inv = 1.0 / p.chi;
    const double pa = std::sqrt(1.0 - inv);
    const double pb = std::sqrt(1.0 + inv);
    FixedPointFamily fam1;  // q_a = q_b = 0
    fam1.e_fig = (1.0 + p.chi * p.chi) / (2.0 * p.chi);
    fam1.points[0] = MeanPoint{0.0, pa, 0.0, pb};
    fam1.points[1] = MeanPoint{0.0, -pa, 0.0, pb};
    FixedPointFamily fam2;  // p_a = q_b = 0
    fam2.e_fig = -fam1.e_fig;
    fam2.points[0] = MeanPoint{pb, 0.0, 0.0, pa};
    fam2.points[1] = MeanPoint{-pb, 0.0, 0.0, pa};
    return std::make_pair(fam1, fam2);
}

SemiState complete_on_section(double q_a, double p_a, const WidthPoint& w,
                              const ModelParams& p) {
    const double n_a = 0.5 * (q_a * q_a + p_a * p_a);
    if (n_a > 1.0 + 1e-12)
        throw std::invalid_argument(
            "section point infeasible: n_a = " + std::to_string(n_a) +
            " exceeds the particle constraint");
    SemiState s;
    s.mean = MeanPoint{q_a, p_a, 0.0,
                       std::sqrt(std::max(0.0, 2.0 * (1.0 - n_a)))};
    s.width = w;
    if (!(s.width.Q_a > 0.0) || !(s.width.Q_b > 0.0))
        throw std::domain_error("section widths must satisfy Q > 0");
    return s;
}

double section_energy_on_pa_axis(double pa_sq, const ModelParams& p) {
    // E_fig of the classical completion of (q_a = 0, p_a) with x = p_a^2:
    // E(x) = 1 - x + chi x (2 - x) / 2.
    return 1.0 - pa_sq + 0.5 * p.chi * pa_sq * (2.0 - pa_sq);
}

}  // namespace lipkin
