// Unit tests for the dynamics layer: vector fields, adaptive integration,
// conservation monitoring and section-crossing detection.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lipkin/dynamics.hpp"

using namespace lipkin;

namespace {

const WidthPoint kMinimal = minimal_widths();

SemiState random_state(std::mt19937& rng) {
    std::uniform_real_distribution<double> um(-1.2, 1.2), uq(0.4, 1.6),
        up(-1.0, 1.0);
    return SemiState{{um(rng), um(rng), um(rng), um(rng)},
                     {uq(rng), up(rng), uq(rng), up(rng)}};
}

// Richardson-refined central difference of the level Hamiltonian.
State8 fd_gradient(const SemiState& s, const ModelParams& p, Level level,
                   HscSource source) {
    const State8 y0 = pack(s);
    State8 g{};
    const double h = 1e-6;
    for (int k = 0; k < 8; ++k) {
        auto f = [&](double d) {
            State8 y = y0;
            y[k] += d;
            return level_hamiltonian(unpack(y), p, level, source);
        };
        g[k] = (8.0 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12.0 * h);
    }
    return g;
}

}  // namespace

TEST_CASE("pack/unpack round trip") {
    const SemiState s{{0.1, -0.2, 0.3, -0.4}, {0.5, 0.6, 0.7, 0.8}};
    const SemiState r = unpack(pack(s));
    CHECK(r.mean.q_a == s.mean.q_a);
    CHECK(r.mean.p_b == s.mean.p_b);
    CHECK(r.width.Q_a == s.width.Q_a);
    CHECK(r.width.P_b == s.width.P_b);
}

TEST_CASE("free vector field is the linear rotation") {
    const ModelParams p = make_params(1.0, 0.0, 4.0);
    const SemiState s{{0.3, -0.7, 0.5, 0.9}, kMinimal};
    const State8 f = vector_field(s, p, Level::classical);
    CHECK(f[0] == doctest::Approx(-s.mean.p_a / 2.0).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(s.mean.q_a / 2.0).epsilon(1e-14));
    CHECK(f[2] == doctest::Approx(s.mean.p_b / 2.0).epsilon(1e-14));
    CHECK(f[3] == doctest::Approx(-s.mean.q_b / 2.0).epsilon(1e-14));
    for (int k = 4; k < 8; ++k) CHECK(f[k] == 0.0);
}

TEST_CASE("semiclassical mean block matches classical at minimal widths") {
    const ModelParams p = make_params(1.0, -6.0, 8.0);
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> um(-1.2, 1.2);
    for (int i = 0; i < 100; ++i) {
        const SemiState s{{um(rng), um(rng), um(rng), um(rng)}, kMinimal};
        const State8 fc = vector_field(s, p, Level::classical);
        const State8 fs = vector_field(s, p, Level::semiclassical);
        for (int k = 0; k < 4; ++k) {
            // classical term plus a bounded O(1/J) residual
            CHECK(std::abs(fs[k] - fc[k]) < 2.0 / p.j);
        }
    }
}

TEST_CASE("vector field is the symplectic finite-difference gradient") {
    std::mt19937 rng(2024);
    for (double chi : {-0.5, -6.0}) {
        for (double j : {2.0, 9.0}) {
            const ModelParams p = make_params(1.0, chi, j);
            for (Level level : {Level::classical, Level::semiclassical}) {
                for (int i = 0; i < 50; ++i) {
                    const SemiState s = random_state(rng);
                    const State8 g =
                        fd_gradient(s, p, level, HscSource::derived);
                    const State8 f =
                        vector_field(s, p, level, HscSource::derived);
                    double scale = 1.0;
                    for (double v : g) scale = std::max(scale, std::abs(v));
                    // symplectic pairing: (qdot, pdot) = (dH/dp, -dH/dq)
                    for (int k = 0; k < 8; k += 2) {
                        CHECK(std::abs(f[k] - g[k + 1]) < 1e-6 * scale);
                        CHECK(std::abs(f[k + 1] + g[k]) < 1e-6 * scale);
                    }
                }
            }
        }
    }
}

TEST_CASE("printed-source gradient is also consistent") {
    std::mt19937 rng(5150);
    const ModelParams p = make_params(1.0, -6.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        const SemiState s = random_state(rng);
        const State8 g =
            fd_gradient(s, p, Level::semiclassical, HscSource::printed);
        const State8 a = hamiltonian_gradient(s, p, Level::semiclassical,
                                              HscSource::printed);
        double scale = 1.0;
        for (double v : g) scale = std::max(scale, std::abs(v));
        for (int k = 0; k < 8; ++k) CHECK(std::abs(a[k] - g[k]) < 1e-6 * scale);
    }
}

TEST_CASE("vector field rejects barrier violations") {
    const ModelParams p = make_params(1.0, -6.0, 4.0);
    const SemiState bad{{0.1, 0.2, 0.3, 0.4}, {0.0, 0.0, 0.7, 0.0}};
    CHECK_THROWS_AS(vector_field(bad, p, Level::semiclassical),
                    std::domain_error);
}

TEST_CASE("free evolution is an exact rotation at frequency eps/2") {
    const ModelParams p = make_params(1.0, 0.0, 4.0);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.max_step = 0.1;
    cfg.sample_dt = M_PI / 16.0;  // grid lands exactly on t = 4 pi
    const SemiState s0{{0.0, 0.0, 1.0, 0.0}, kMinimal};
    const Trajectory traj =
        integrate(s0, p, Level::classical, 4.0 * M_PI, cfg);
    REQUIRE(!traj.failed);
    REQUIRE(traj.times.size() == 65);
    double worst = 0.0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        worst = std::max(worst,
                         std::abs(traj.states[i].mean.q_b - std::cos(t / 2)));
        worst = std::max(worst,
                         std::abs(traj.states[i].mean.p_b + std::sin(t / 2)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("energy and particle-number conservation") {
    const ModelParams p = make_params(1.0, -6.0, 4.0);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    const SemiState s0 =
        complete_on_section(0.0, -0.59464546286402, kMinimal, p);

    const Trajectory cl = integrate(s0, p, Level::classical, 100.0, cfg);
    REQUIRE(!cl.failed);
    const ConservationReport rc = conservation_report(cl, p);
    CHECK(rc.max_dh < 1e-8);
    CHECK(rc.max_dn < 1e-8);

    const Trajectory sc = integrate(s0, p, Level::semiclassical, 100.0, cfg);
    REQUIRE(!sc.failed);
    const ConservationReport rs = conservation_report(sc, p);
    CHECK(rs.max_dh < 1e-8 * std::abs(level_hamiltonian(
                                 s0, p, Level::semiclassical)));
}

TEST_CASE("semiclassical particle-number drift is real at small J") {
    const ModelParams p = make_params(1.0, -6.0, 2.0);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    const SemiState s0 =
        complete_on_section(0.0, -0.59464546286402, kMinimal, p);
    const Trajectory sc = integrate(s0, p, Level::semiclassical, 100.0, cfg);
    REQUIRE(!sc.failed);
    CHECK(conservation_report(sc, p).max_dn > 1e-4);
}

TEST_CASE("time reversal returns the initial state") {
    const ModelParams p = make_params(1.0, -6.0, 4.0);
    IntegratorConfig cfg;
    cfg.max_step = 0.1;
    const SemiState s0{{0.0, -0.6, 0.0, 1.2}, kMinimal};
    const Trajectory fw = integrate(s0, p, Level::semiclassical, 5.0, cfg);
    REQUIRE(!fw.failed);
    const Trajectory bw = integrate(fw.states.back(), p, Level::semiclassical,
                                    -5.0, cfg);
    REQUIRE(!bw.failed);
    const State8 a = pack(bw.states.back()), b = pack(s0);
    for (int k = 0; k < 8; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-6);
}

TEST_CASE("classical level freezes the width block") {
    const ModelParams p = make_params(1.0, -6.0, 4.0);
    IntegratorConfig cfg;
    const SemiState s0{{0.2, -0.5, 0.7, 0.9}, kMinimal};
    const Trajectory traj = integrate(s0, p, Level::classical, 20.0, cfg);
    REQUIRE(!traj.failed);
    for (const SemiState& s : traj.states) {
        CHECK(s.width.Q_a == s0.width.Q_a);
        CHECK(s.width.P_a == 0.0);
        CHECK(s.width.Q_b == s0.width.Q_b);
        CHECK(s.width.P_b == 0.0);
    }
}

TEST_CASE("barrier preservation along semiclassical trajectories") {
    const ModelParams p = make_params(1.0, -6.0, 2.0);
    IntegratorConfig cfg;
    const SemiState s0{{0.0, -0.6, 0.0, 1.2}, kMinimal};
    const Trajectory traj = integrate(s0, p, Level::semiclassical, 50.0, cfg);
    for (const SemiState& s : traj.states) {
        CHECK(s.width.Q_a > 0.0);
        CHECK(s.width.Q_b > 0.0);
        // uncertainty relation holds pointwise
        CHECK(uncertainty_product(s.width.Q_a, s.width.P_a, p.nu_a) >=
              0.5 - 1e-12);
        CHECK(uncertainty_product(s.width.Q_b, s.width.P_b, p.nu_b) >=
              0.5 - 1e-12);
    }
}

TEST_CASE("trajectory sampling grid") {
    const ModelParams p = make_params(1.0, -0.5, 4.0);
    IntegratorConfig cfg;
    cfg.sample_dt = 0.25;
    const SemiState s0{{0.0, -0.6, 0.0, 1.2}, kMinimal};
    const Trajectory traj = integrate(s0, p, Level::classical, 5.0, cfg);
    REQUIRE(traj.times.size() == 21);
    for (size_t i = 0; i < traj.times.size(); ++i)
        CHECK(traj.times[i] == doctest::Approx(0.25 * i).epsilon(1e-14));
    CHECK(traj.observables.size() == traj.states.size());
}

TEST_CASE("free-mode section crossings are spaced by 4 pi / eps") {
    const ModelParams p = make_params(1.0, 0.0, 4.0);
    IntegratorConfig cfg;
    const SemiState s0{{0.0, 0.0, 1.0, 0.0}, kMinimal};
    const SectionResult res =
        section_crossings(s0, p, Level::classical, 4, cfg);
    REQUIRE(res.complete);
    REQUIRE(res.points.size() == 4);
    // q_b = cos(t/2) crosses zero with p_b = -sin(t/2) > 0 at t = 3 pi + 4 pi k
    for (size_t k = 0; k < res.points.size(); ++k) {
        CHECK(res.points[k].t ==
              doctest::Approx(3.0 * M_PI + 4.0 * M_PI * k).epsilon(1e-9));
        CHECK(res.points[k].index == static_cast<int>(k));
    }
}

TEST_CASE("deformed fixed points return to themselves on the section") {
    const ModelParams p = make_params(1.0, -6.0, 4.0);
    IntegratorConfig cfg;
    auto fp = fixed_points(p);
    REQUIRE(fp.has_value());
    for (const FixedPointFamily& fam : {fp->first, fp->second}) {
        const SemiState s0{fam.points[0], kMinimal};
        const SectionResult res =
            section_crossings(s0, p, Level::classical, 1, cfg);
        REQUIRE(res.complete);
        CHECK(std::abs(res.points[0].q_a - fam.points[0].q_a) < 1e-6);
        CHECK(std::abs(res.points[0].p_a - fam.points[0].p_a) < 1e-6);
    }
}

TEST_CASE("deformed-band classical crossings keep the sign of p_a") {
    const ModelParams p = make_params(1.0, -6.0, 4.0);
    IntegratorConfig cfg;
    const SemiState s0 =
        complete_on_section(0.0, -0.59464546286402, kMinimal, p);
    const SectionResult res =
        section_crossings(s0, p, Level::classical, 200, cfg);
    REQUIRE(res.complete);
    for (const SectionPoint& pt : res.points) CHECK(pt.p_a < 0.0);
}

TEST_CASE("crossing callback can stop early and the budget is honored") {
    const ModelParams p = make_params(1.0, 0.0, 4.0);
    IntegratorConfig cfg;
    const SemiState s0{{0.0, 0.0, 1.0, 0.0}, kMinimal};
    int seen = 0;
    const SectionResult res = section_crossings(
        s0, p, Level::classical, 100, cfg, HscSource::derived, 1e9,
        [&](const SectionPoint&, const SemiState&) { return ++seen < 2; });
    CHECK(seen == 2);
    CHECK(res.points.size() == 2);

    // a tight time budget yields a partial, flagged result
    const SectionResult cut = section_crossings(s0, p, Level::classical, 100,
                                                cfg, HscSource::derived, 5.0);
    CHECK(!cut.complete);
    CHECK(cut.points.empty());
}

TEST_CASE("conservation report rejects empty trajectories") {
    Trajectory empty;
    CHECK_THROWS_AS(conservation_report(empty, make_params(1.0, 0.0, 4.0)),
                    std::invalid_argument);
}
