// bench_parallel.cpp - timing of the batch kernels, serial vs OpenMP,
// with a bitwise agreement check between the two paths.

#include <chrono>
#include <cstdio>

#include "lipkin/analysis.hpp"
#include "lipkin/quantum.hpp"

using namespace lipkin;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main() {
    const ModelParams p = make_params(1.0, -6.0, 8.0);
    IntegratorConfig cfg;
    cfg.sample_dt = 0.05;

    // section portrait over a fan of initial conditions
    const auto ics = default_portrait_ics(p, 16);
    auto t0 = std::chrono::steady_clock::now();
    const auto serial =
        poincare_portrait(ics, p, Level::semiclassical, 150, cfg,
                          HscSource::derived, false);
    const double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto parallel =
        poincare_portrait(ics, p, Level::semiclassical, 150, cfg,
                          HscSource::derived, true);
    const double tp = seconds_since(t0);

    bool identical = serial.size() == parallel.size();
    for (size_t i = 0; identical && i < serial.size(); ++i) {
        identical = serial[i].result.points.size() ==
                    parallel[i].result.points.size();
        for (size_t k = 0; identical && k < serial[i].result.points.size();
             ++k) {
            identical = serial[i].result.points[k].t ==
                            parallel[i].result.points[k].t &&
                        serial[i].result.points[k].q_a ==
                            parallel[i].result.points[k].q_a &&
                        serial[i].result.points[k].p_a ==
                            parallel[i].result.points[k].p_a;
        }
    }
    std::printf("portrait   serial %.3fs  parallel %.3fs  speedup %.2fx  %s\n",
                ts, tp, ts / tp, identical ? "bit-identical" : "MISMATCH");

    // exact evolution over a long time grid
    const ModelParams pq = make_params(1.0, -6.0, 60.0);
    const SpectralDecomp decomp = diagonalize(build_hamiltonian(pq));
    const QuantumState psi0 =
        spin_coherent(MeanPoint{1.0, 0.3, 0.5, -0.2}, pq.j);
    std::vector<double> times;
    for (int i = 0; i <= 4000; ++i) times.push_back(0.05 * i);

    t0 = std::chrono::steady_clock::now();
    const auto es = evolve_exact(psi0, decomp, times, pq.j, false);
    const double qs = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto ep = evolve_exact(psi0, decomp, times, pq.j, true);
    const double qp = seconds_since(t0);
    bool qsame = es.size() == ep.size();
    for (size_t i = 0; qsame && i < es.size(); ++i)
        qsame = es[i].jz_over_j == ep[i].jz_over_j;
    std::printf("exact-evol serial %.3fs  parallel %.3fs  speedup %.2fx  %s\n",
                qs, qp, qs / qp, qsame ? "bit-identical" : "MISMATCH");
    return (identical && qsame) ? 0 : 1;
}
