#pragma once

#include <vector>

#include "metrokit/linalg.hpp"
#include "metrokit/sdp.hpp"

namespace metrokit::qec {

/// Orthonormal Hermitian basis (trace inner product) of
/// S = span{I, Gamma_j, Gamma_j^dag, Gamma_j^dag Gamma_l}.
struct LindbladSpan {
    std::vector<Matrix> basis;

    int dim() const { return basis.empty() ? 0 : static_cast<int>(basis.front().rows()); }
};

/// Two orthonormal codewords on system (x) ancilla with orthogonal ancilla
/// supports.
struct CodePair {
    Vector c0;
    Vector c1;
    int system_dim = 0;
    int ancilla_dim = 0;
};

struct HnlsReport {
    Matrix h_parallel;
    Matrix h_perp;
    bool hnls = false;
    double perp_norm = 0.0;
};

LindbladSpan lindblad_span(const std::vector<Matrix>& lindblad_ops);

/// Orthogonal decomposition H = H_par + H_perp with H_par in the span;
/// hnls is true when the perpendicular part survives.
HnlsReport hnls_decompose(const Matrix& hamiltonian, const LindbladSpan& span);

/// Code from the eigenspace split of H_perp = ||H_perp||_1 (rho0 - rho1) / 2:
/// purifications of rho0 and rho1 with disjoint ancilla sectors.
CodePair build_code(const Matrix& h_perp);

struct CodeReport {
    bool cond_noise_linear = false;    // Pi G_j Pi = lambda_j Pi
    bool cond_noise_quadratic = false; // Pi G_j^dag G_l Pi = mu_jl Pi
    bool cond_signal = false;          // Pi G Pi not proportional to Pi
    std::vector<Cplx> lambdas;
    Matrix mus;
    Matrix g_eff;  // 2x2 effective generator in the code basis
    double gap = 0.0;
};

/// Checks the three error-corrected-metrology conditions for system
/// operators lifted as A (x) I to the code space.
CodeReport verify_code(const CodePair& code, const std::vector<Matrix>& lindblad_ops,
                       const Matrix& generator, double tol = 1e-9);

struct CodeGapResult {
    double primal_value = 0.0;  // max Tr(C~ H_perp), ||C~||_tr <= 2, C~ _|_ S
    double dual_value = 0.0;    // min_nu || H_perp + sum nu_k E_k ||_op
    Matrix c_tilde;
    sdp::Status status = sdp::Status::MaxIter;
};

/// Code-gap optimization; the primal uses the trace-norm ball (the operator
/// norm variant is available through `use_operator_norm` for comparison).
CodeGapResult optimize_code_gap(const Matrix& h_perp, const LindbladSpan& span,
                                bool use_operator_norm = false);

/// Effective QFI t^2 gap^2 of the code-space evolution with the paired
/// extreme probe.
double effective_qfi(double gap, double t);

}  // namespace metrokit::qec
