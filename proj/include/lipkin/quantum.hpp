// quantum.hpp - exact reference: (2J+1)-dimensional quasispin Hamiltonian,
// cyclic-Jacobi eigensolver, spin coherent initial states and exact
// expectation-value evolution.

#pragma once

#include <complex>
#include <vector>

#include "lipkin/model.hpp"

namespace lipkin {

// Dense real symmetric matrix in the |J,m> basis, m = -J..J ascending.
struct SpinMatrix {
    int dim = 0;
    double j = 0.0;
    std::vector<double> a;  // row-major, dim x dim
    double& at(int r, int c) { return a[static_cast<size_t>(r) * dim + c]; }
    double at(int r, int c) const {
        return a[static_cast<size_t>(r) * dim + c];
    }
};

// H = eps J_z + (V/2)(J+^2 + J-^2); couples only m <-> m+-2.
SpinMatrix build_hamiltonian(const ModelParams& p);

struct SpectralDecomp {
    int dim = 0;
    double j = 0.0;
    std::vector<double> eigenvalues;  // ascending
    std::vector<double> vectors;      // row-major; column k = eigenvector k
    double vec(int r, int k) const {
        return vectors[static_cast<size_t>(r) * dim + k];
    }
};

// Cyclic Jacobi rotations; rejects non-symmetric input.
SpectralDecomp diagonalize(const SpinMatrix& m);

using QuantumState = std::vector<complexd>;

// SU(2) coherent state matched to a mean-field point through the
// stereographic label z = (q_b + i p_b)/(q_a + i p_a); the pole
// q_a = p_a = 0 maps to |J,+J>. Rejects the zero mean point.
QuantumState spin_coherent(const MeanPoint& mean, double j);

struct ExactSample {
    double t = 0.0;
    double jz_over_j = 0.0;
    double jx_over_j = 0.0;
    double norm = 0.0;
};

// Eigenphase rotation of state0 evaluated at the given times. Set parallel
// to fan the time loop out over OpenMP threads; results are positionally
// ordered either way.
std::vector<ExactSample> evolve_exact(const QuantumState& state0,
                                      const SpectralDecomp& decomp,
                                      const std::vector<double>& times,
                                      double j, bool parallel = false);

// <J_z>/J and <J_x>/J of an arbitrary normalized state.
double jz_expectation(const QuantumState& psi, double j);
double jx_expectation(const QuantumState& psi, double j);

}  // namespace lipkin
