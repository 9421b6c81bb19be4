// quantum.cpp - exact Lipkin reference in the |J,m> basis.

#include "lipkin/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lipkin {

namespace {

// <m+1| J+ |m> = sqrt((J-m)(J+m+1))
double ladder_up(double j, double m) {
    return std::sqrt((j - m) * (j + m + 1.0));
}

double frobenius(const SpinMatrix& m) {
    double s = 0.0;
    for (double v : m.a) s += v * v;
    return std::sqrt(s);
}

}  // namespace

SpinMatrix build_hamiltonian(const ModelParams& p) {
    const int dim = static_cast<int>(std::lround(2.0 * p.j)) + 1;
    SpinMatrix h;
    h.dim = dim;
    h.j = p.j;
    h.a.assign(static_cast<size_t>(dim) * dim, 0.0);
    for (int r = 0; r < dim; ++r) {
        const double m = -p.j + r;
        h.at(r, r) = p.epsilon * m;
        if (r + 2 < dim) {
            // <m+2| J+^2 |m>
            const double el = 0.5 * p.v * ladder_up(p.j, m) *
                              ladder_up(p.j, m + 1.0);
            h.at(r + 2, r) = el;
            h.at(r, r + 2) = el;
        }
    }
    return h;
}

SpectralDecomp diagonalize(const SpinMatrix& m) {
    const int n = m.dim;
    if (n <= 0 || m.a.size() != static_cast<size_t>(n) * n)
        throw std::invalid_argument("diagonalize: malformed matrix");
    const double scale = std::max(1.0, frobenius(m));
    for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c)
            if (std::abs(m.at(r, c) - m.at(c, r)) > 1e-12 * scale)
                throw std::invalid_argument("diagonalize: matrix not symmetric");

    std::vector<double> a = m.a;
    std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i) * n + i] = 1.0;
    auto A = [&](int r, int c) -> double& {
        return a[static_cast<size_t>(r) * n + c];
    };
    auto V = [&](int r, int c) -> double& {
        return v[static_cast<size_t>(r) * n + c];
    };

    const double threshold = 1e-13 * std::max(1.0, frobenius(m));
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int r = 0; r < n; ++r)
            for (int c = r + 1; c < n; ++c) off += 2.0 * A(r, c) * A(r, c);
        if (std::sqrt(off) <= threshold) break;
        for (int pq = 0; pq < n; ++pq) {
            for (int qq = pq + 1; qq < n; ++qq) {
                const double apq = A(pq, qq);
                if (apq == 0.0) continue;
                const double app = A(pq, pq), aqq = A(qq, qq);
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) +
                                  std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, pq), akq = A(k, qq);
                    A(k, pq) = c * akp - s * akq;
                    A(k, qq) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(pq, k), aqk = A(qq, k);
                    A(pq, k) = c * apk - s * aqk;
                    A(qq, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, pq), vkq = V(k, qq);
                    V(k, pq) = c * vkp - s * vkq;
                    V(k, qq) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return A(x, x) < A(y, y); });

    SpectralDecomp d;
    d.dim = n;
    d.j = m.j;
    d.eigenvalues.resize(n);
    d.vectors.assign(static_cast<size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
        const int src = order[k];
        d.eigenvalues[k] = A(src, src);
        // deterministic sign: largest-magnitude component positive
        int imax = 0;
        for (int r = 1; r < n; ++r)
            if (std::abs(V(r, src)) > std::abs(V(imax, src))) imax = r;
        const double sgn = V(imax, src) >= 0.0 ? 1.0 : -1.0;
        for (int r = 0; r < n; ++r)
            d.vectors[static_cast<size_t>(r) * n + k] = sgn * V(r, src);
    }
    return d;
}

QuantumState spin_coherent(const MeanPoint& mean, double j) {
    const complexd u(mean.q_a, mean.p_a);  // lower-level amplitude direction
    const complexd w(mean.q_b, mean.p_b);  // upper-level amplitude direction
    const double mu = std::abs(u), mw = std::abs(w);
    if (mu == 0.0 && mw == 0.0)
        throw std::invalid_argument(
            "spin_coherent: zero mean point has no direction");
    const int dim = static_cast<int>(std::lround(2.0 * j)) + 1;
    const int two_j = dim - 1;

    // amp_m ~ sqrt(C(2J, J+m)) u^(J-m) w^(J+m); evaluated through log
    // magnitudes so large J and extreme |z| stay finite.
    std::vector<double> logmag(dim);
    std::vector<double> phase(dim);
    const double lu = mu > 0.0 ? std::log(mu) : 0.0;
    const double lw = mw > 0.0 ? std::log(mw) : 0.0;
    const double au = std::arg(u), aw = std::arg(w);
    double log_binom = 0.0;  // log C(2J, k) built up recursively
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= two_j; ++k) {
        if (k > 0) log_binom += std::log(double(two_j - k + 1) / double(k));
        const int pow_w = k;          // J + m
        const int pow_u = two_j - k;  // J - m
        if ((pow_u > 0 && mu == 0.0) || (pow_w > 0 && mw == 0.0)) {
            logmag[k] = -std::numeric_limits<double>::infinity();
            phase[k] = 0.0;
            continue;
        }
        logmag[k] = 0.5 * log_binom + pow_u * lu + pow_w * lw;
        phase[k] = pow_u * au + pow_w * aw;
        best = std::max(best, logmag[k]);
    }
    QuantumState psi(dim);
    double nrm = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double mag = std::isfinite(logmag[k])
                               ? std::exp(logmag[k] - best)
                               : 0.0;
        psi[k] = std::polar(mag, phase[k]);
        nrm += mag * mag;
    }
    nrm = std::sqrt(nrm);
    for (auto& c : psi) c /= nrm;
    return psi;
}

double jz_expectation(const QuantumState& psi, double j) {
    double s = 0.0;
    for (size_t k = 0; k < psi.size(); ++k)
        s += (-j + double(k)) * std::norm(psi[k]);
    return s / j;
}

double jx_expectation(const QuantumState& psi, double j) {
    double s = 0.0;
    for (size_t k = 0; k + 1 < psi.size(); ++k) {
        const double m = -j + double(k);
        s += ladder_up(j, m) * std::real(std::conj(psi[k + 1]) * psi[k]);
    }
    return s / j;
}

std::vector<ExactSample> evolve_exact(const QuantumState& state0,
                                      const SpectralDecomp& decomp,
                                      const std::vector<double>& times,
                                      double j, bool parallel) {
    const int n = decomp.dim;
    if (static_cast<int>(state0.size()) != n)
        throw std::invalid_argument("evolve_exact: dimension mismatch");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("evolve_exact: times must increase");

    // project once onto the eigenbasis
    std::vector<complexd> coeff(n, complexd(0.0, 0.0));
    for (int k = 0; k < n; ++k)
        for (int r = 0; r < n; ++r)
            coeff[k] += decomp.vec(r, k) * state0[r];

    std::vector<ExactSample> out(times.size());
    auto sample_at = [&](size_t idx) {
        const double t = times[idx];
        QuantumState psi(n, complexd(0.0, 0.0));
        for (int k = 0; k < n; ++k) {
            const complexd ck =
                coeff[k] * std::polar(1.0, -decomp.eigenvalues[k] * t);
            for (int r = 0; r < n; ++r) psi[r] += decomp.vec(r, k) * ck;
        }
        ExactSample s;
        s.t = t;
        double nrm = 0.0;
        for (const complexd& c : psi) nrm += std::norm(c);
        s.norm = std::sqrt(nrm);
        s.jz_over_j = jz_expectation(psi, j);
        s.jx_over_j = jx_expectation(psi, j);
        out[idx] = s;
    };
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long idx = 0; idx < static_cast<long long>(times.size());
             ++idx)
            sample_at(static_cast<size_t>(idx));
    } else {
        for (size_t idx = 0; idx < times.size(); ++idx) sample_at(idx);
    }
    return out;
}

}  // namespace lipkin
