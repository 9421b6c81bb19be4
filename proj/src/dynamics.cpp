// dynamics.cpp - analytic symplectic-gradient vector fields and an embedded
// Dormand-Prince 5(4) integrator with cubic-Hermite dense output and
// section-crossing detection.

#include "lipkin/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lipkin {

namespace {

double sq(double x) { return x * x; }

constexpr double kStepFloor = 1e-14;
constexpr double kCrossingTol = 1e-10;

struct GradTerms {
    double ka, kb;   // (1+2nu)^2 per mode
    double Da, Db;   // width brackets
    double dDa_dQ, dDb_dQ;
    double dnfa_dQ, dnfb_dQ;
};

GradTerms width_terms(const SemiState& s, const ModelParams& p) {
    GradTerms t;
    const WidthPoint& w = s.width;
    t.ka = sq(1.0 + 2.0 * p.nu_a);
    t.kb = sq(1.0 + 2.0 * p.nu_b);
    t.Da = t.ka / (8.0 * w.Q_a * w.Q_a) - 0.5 * (w.Q_a * w.Q_a - w.P_a * w.P_a);
    t.Db = t.kb / (8.0 * w.Q_b * w.Q_b) - 0.5 * (w.Q_b * w.Q_b - w.P_b * w.P_b);
    t.dDa_dQ = -t.ka / (4.0 * w.Q_a * w.Q_a * w.Q_a) - w.Q_a;
    t.dDb_dQ = -t.kb / (4.0 * w.Q_b * w.Q_b * w.Q_b) - w.Q_b;
    t.dnfa_dQ = w.Q_a - t.ka / (4.0 * w.Q_a * w.Q_a * w.Q_a);
    t.dnfb_dQ = w.Q_b - t.kb / (4.0 * w.Q_b * w.Q_b * w.Q_b);
    return t;
}

}  // namespace

State8 pack(const SemiState& s) {
    return {s.mean.q_a,  s.mean.p_a,  s.mean.q_b,  s.mean.p_b,
            s.width.Q_a, s.width.P_a, s.width.Q_b, s.width.P_b};
}

SemiState unpack(const State8& y) {
    SemiState s;
    s.mean = MeanPoint{y[0], y[1], y[2], y[3]};
    s.width = WidthPoint{y[4], y[5], y[6], y[7]};
    return s;
}

double level_hamiltonian(const SemiState& s, const ModelParams& p, Level level,
                         HscSource source) {
    if (level == Level::classical) return h_classical(s.mean, p);
    return h_semiclassical(s, p, source);
}

State8 hamiltonian_gradient(const SemiState& s, const ModelParams& p,
                            Level level, HscSource source) {
    if (!(s.width.Q_a > 0.0) || !(s.width.Q_b > 0.0))
        throw std::domain_error("hamiltonian_gradient: width barrier violated");
    const MeanPoint& m = s.mean;
    const WidthPoint& w = s.width;
    const double eps = p.epsilon, chi = p.chi;
    const double u = (level == Level::classical) ? 0.0
                     : (source == HscSource::derived) ? 1.0 / p.n_particles
                                                      : 1.0 / p.j;
    const GradTerms t = width_terms(s, p);
    const double da = m.q_a * m.q_a - m.p_a * m.p_a;
    const double db = m.q_b * m.q_b - m.p_b * m.p_b;
    const double wa = w.Q_a * w.P_a;
    const double wb = w.Q_b * w.P_b;

    State8 g{};
    g[0] = -0.5 * eps * m.q_a + chi * (0.5 * m.q_a * db + m.p_a * m.q_b * m.p_b)
           - u * chi * (m.q_a * t.Db + m.p_a * wb);
    g[1] = -0.5 * eps * m.p_a + chi * (-0.5 * m.p_a * db + m.q_a * m.q_b * m.p_b)
           + u * chi * (m.p_a * t.Db - m.q_a * wb);
    g[2] = 0.5 * eps * m.q_b + chi * (0.5 * m.q_b * da + m.p_b * m.q_a * m.p_a)
           - u * chi * (m.q_b * t.Da + m.p_b * wa);
    g[3] = 0.5 * eps * m.p_b + chi * (-0.5 * m.p_b * da + m.q_b * m.q_a * m.p_a)
           + u * chi * (m.p_b * t.Da - m.q_b * wa);
    if (level == Level::classical) return g;

    const double u2 = u * u;
    g[4] = u * (-0.5 * eps * t.dnfa_dQ -
                chi * (0.5 * db * t.dDa_dQ + m.q_b * m.p_b * w.P_a)) +
           u2 * chi * (t.Db * t.dDa_dQ + w.P_a * wb);
    g[5] = u * (-0.5 * eps * w.P_a -
                chi * (0.5 * db * w.P_a + m.q_b * m.p_b * w.Q_a)) +
           u2 * chi * (t.Db * w.P_a + w.Q_a * wb);
    g[6] = u * (0.5 * eps * t.dnfb_dQ -
                chi * (0.5 * da * t.dDb_dQ + m.q_a * m.p_a * w.P_b)) +
           u2 * chi * (t.Da * t.dDb_dQ + w.P_b * wa);
    g[7] = u * (0.5 * eps * w.P_b -
                chi * (0.5 * da * w.P_b + m.q_a * m.p_a * w.Q_b)) +
           u2 * chi * (t.Da * w.P_b + w.Q_b * wa);
    return g;
}

State8 vector_field(const SemiState& s, const ModelParams& p, Level level,
                    HscSource source) {
    const State8 g = hamiltonian_gradient(s, p, level, source);
    State8 d{};
    d[0] = g[1];
    d[1] = -g[0];
    d[2] = g[3];
    d[3] = -g[2];
    if (level == Level::semiclassical) {
        d[4] = g[5];
        d[5] = -g[4];
        d[6] = g[7];
        d[7] = -g[6];
    }
    return d;
}

namespace {

// Embedded Dormand-Prince 5(4) with FSAL and cubic-Hermite dense output.
class Stepper {
  public:
    Stepper(const ModelParams& p, Level level, HscSource source,
            const IntegratorConfig& cfg, double direction)
        : p_(p), level_(level), source_(source), cfg_(cfg), dir_(direction) {}

    bool init(const State8& y0, double t0) {
        ta_ = tb_ = t0;
        ya_ = yb_ = y0;
        if (!eval(y0, fb_)) {
            error = "invalid initial state (width barrier violated)";
            return false;
        }
        fa_ = fb_;
        h_ = dir_ * std::min(cfg_.max_step, 1e-3);
        return true;
    }

    // Advances one accepted step; on return [t0(), t1()] brackets the new
    // interval. Returns false on step-size underflow.
    bool advance() {
        State8 k2, k3, k4, k5, k6, k7, y5;
        for (;;) {
            if (std::abs(h_) < kStepFloor) {
                error = "step size underflow near t = " + std::to_string(tb_);
                return false;
            }
            const State8& k1 = fb_;
            const State8& y = yb_;
            State8 w;
            bool ok = true;
            auto stage = [&](State8& k, double c,
                             std::initializer_list<std::pair<double, const State8*>>
                                 terms) {
                for (int i = 0; i < 8; ++i) {
                    double acc = 0.0;
                    for (const auto& [a, kv] : terms) acc += a * (*kv)[i];
                    w[i] = y[i] + h_ * acc;
                }
                (void)c;
                return eval(w, k);
            };
            ok = stage(k2, 0.2, {{0.2, &k1}}) &&
                 stage(k3, 0.3, {{3.0 / 40, &k1}, {9.0 / 40, &k2}}) &&
                 stage(k4, 0.8,
                       {{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}}) &&
                 stage(k5, 8.0 / 9,
                       {{19372.0 / 6561, &k1},
                        {-25360.0 / 2187, &k2},
                        {64448.0 / 6561, &k3},
                        {-212.0 / 729, &k4}}) &&
                 stage(k6, 1.0,
                       {{9017.0 / 3168, &k1},
                        {-355.0 / 33, &k2},
                        {46732.0 / 5247, &k3},
                        {49.0 / 176, &k4},
                        {-5103.0 / 18656, &k5}});
            if (ok) {
                for (int i = 0; i < 8; ++i)
                    y5[i] = y[i] +
                            h_ * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] +
                                  125.0 / 192 * k4[i] - 2187.0 / 6784 * k5[i] +
                                  11.0 / 84 * k6[i]);
                ok = eval(y5, k7);
            }
            double err = std::numeric_limits<double>::infinity();
            if (ok) {
                err = 0.0;
                for (int i = 0; i < 8; ++i) {
                    const double e =
                        h_ * (71.0 / 57600 * k1[i] - 71.0 / 16695 * k3[i] +
                              71.0 / 1920 * k4[i] - 17253.0 / 339200 * k5[i] +
                              22.0 / 525 * k6[i] - 1.0 / 40 * k7[i]);
                    const double scale =
                        cfg_.abs_tol +
                        cfg_.rel_tol *
                            std::max(std::abs(y[i]), std::abs(y5[i]));
                    err += sq(e / scale);
                }
                err = std::sqrt(err / 8.0);
            }
            if (!ok || !(err <= 1.0) || !std::isfinite(err)) {
                const double fac = ok && std::isfinite(err)
                                       ? std::max(0.2, 0.9 * std::pow(err, -0.2))
                                       : 0.5;
                h_ *= std::min(fac, 0.9);
                continue;
            }
            ta_ = tb_;
            ya_ = yb_;
            fa_ = fb_;
            tb_ += h_;
            yb_ = y5;
            fb_ = k7;
            const double fac =
                err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)))
                          : 5.0;
            h_ *= fac;
            if (std::abs(h_) > cfg_.max_step) h_ = dir_ * cfg_.max_step;
            return true;
        }
    }

    double t0() const { return ta_; }
    double t1() const { return tb_; }
    const State8& y1() const { return yb_; }

    State8 dense(double t) const {
        const double h = tb_ - ta_;
        const double th = (t - ta_) / h;
        const double th2 = th * th, th3 = th2 * th;
        const double c0 = 2 * th3 - 3 * th2 + 1;
        const double c1 = th3 - 2 * th2 + th;
        const double c2 = -2 * th3 + 3 * th2;
        const double c3 = th3 - th2;
        State8 out;
        for (int i = 0; i < 8; ++i)
            out[i] = c0 * ya_[i] + c1 * h * fa_[i] + c2 * yb_[i] +
                     c3 * h * fb_[i];
        return out;
    }

    std::string error;

  private:
    bool eval(const State8& y, State8& dydt) {
        if (level_ == Level::semiclassical && (!(y[4] > 0.0) || !(y[6] > 0.0)))
            return false;
        dydt = vector_field(unpack(y), p_, level_, source_);
        for (double d : dydt)
            if (!std::isfinite(d)) return false;
        return true;
    }

    const ModelParams& p_;
    Level level_;
    HscSource source_;
    const IntegratorConfig& cfg_;
    double dir_;
    double ta_ = 0.0, tb_ = 0.0, h_ = 0.0;
    State8 ya_{}, yb_{}, fa_{}, fb_{};
};

}  // namespace

Trajectory integrate(const SemiState& s0, const ModelParams& p, Level level,
                     double t_max, const IntegratorConfig& cfg,
                     HscSource source) {
    if (t_max == 0.0) throw std::invalid_argument("t_max must be nonzero");
    if (!(cfg.sample_dt > 0.0) || !(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw std::invalid_argument("integrator config values must be positive");
    const double dir = t_max > 0.0 ? 1.0 : -1.0;

    Trajectory traj;
    traj.level = level;
    traj.times.push_back(0.0);
    traj.states.push_back(s0);
    traj.observables.push_back(observables(s0, p, source));

    Stepper st(p, level, source, cfg, dir);
    if (!st.init(pack(s0), 0.0)) {
        traj.failed = true;
        traj.failure = st.error;
        return traj;
    }
    long next = 1;
    const double tiny = 1e-12 * cfg.sample_dt;
    while (dir * st.t1() < dir * t_max - tiny) {
        if (!st.advance()) {
            traj.failed = true;
            traj.failure = st.error;
            return traj;
        }
        while (true) {
            const double ts = dir * next * cfg.sample_dt;
            if (dir * ts > dir * st.t1() + tiny || dir * ts > dir * t_max + tiny)
                break;
            SemiState s = unpack(st.dense(ts));
            // the width block is exactly constant at the classical level;
            // keep it bit-identical instead of round-tripping through the
            // interpolant
            if (level == Level::classical) s.width = s0.width;
            traj.times.push_back(ts);
            traj.states.push_back(s);
            traj.observables.push_back(observables(s, p, source));
            ++next;
        }
    }
    return traj;
}

SectionResult section_crossings(
    const SemiState& s0, const ModelParams& p, Level level, int n_crossings,
    const IntegratorConfig& cfg, HscSource source, double t_budget,
    const std::function<bool(const SectionPoint&, const SemiState&)>&
        on_crossing) {
    if (n_crossings < 1)
        throw std::invalid_argument("n_crossings must be >= 1");
    SectionResult res;
    Stepper st(p, level, source, cfg, 1.0);
    if (!st.init(pack(s0), 0.0)) {
        res.failed = true;
        res.failure = st.error;
        return res;
    }
    int found = 0;
    while (found < n_crossings && st.t1() < t_budget) {
        if (!st.advance()) {
            res.failed = true;
            res.failure = st.error;
            res.t_end = st.t1();
            return res;
        }
        // Scan the dense output in quarters so a brief excursion through the
        // plane inside one step is not missed.
        constexpr int kSub = 4;
        double tl = st.t0();
        double gl = st.dense(tl)[2];
        for (int k = 1; k <= kSub && found < n_crossings; ++k) {
            const double tr = st.t0() + (st.t1() - st.t0()) * k / kSub;
            const double gr = st.dense(tr)[2];
            if (gl * gr < 0.0) {
                double a = tl, b = tr, ga = gl;
                double tc = 0.5 * (a + b);
                for (int it = 0; it < 200; ++it) {
                    tc = 0.5 * (a + b);
                    const double gc = st.dense(tc)[2];
                    if (std::abs(gc) < kCrossingTol) break;
                    if (ga * gc < 0.0) {
                        b = tc;
                    } else {
                        a = tc;
                        ga = gc;
                    }
                }
                const State8 yc = st.dense(tc);
                if (yc[3] > 0.0) {  // p_b > 0 branch only
                    SectionPoint pt;
                    pt.index = found;
                    pt.t = tc;
                    pt.q_a = yc[0];
                    pt.p_a = yc[1];
                    res.points.push_back(pt);
                    ++found;
                    if (on_crossing && !on_crossing(pt, unpack(yc))) {
                        res.t_end = tc;
                        res.complete = true;
                        return res;
                    }
                }
            }
            tl = tr;
            gl = gr;
        }
    }
    res.t_end = st.t1();
    res.complete = (found >= n_crossings);
    return res;
}

ConservationReport conservation_report(const Trajectory& traj,
                                       const ModelParams& p,
                                       HscSource source) {
    if (traj.states.empty())
        throw std::invalid_argument("conservation_report: empty trajectory");
    ConservationReport rep;
    const double h0 =
        level_hamiltonian(traj.states.front(), p, traj.level, source);
    const double n0 = scaled_particle_number(traj.states.front(), p);
    for (const SemiState& s : traj.states) {
        rep.max_dh = std::max(
            rep.max_dh,
            std::abs(level_hamiltonian(s, p, traj.level, source) - h0));
        rep.max_dn =
            std::max(rep.max_dn, std::abs(scaled_particle_number(s, p) - n0));
    }
    return rep;
}

}  // namespace lipkin
