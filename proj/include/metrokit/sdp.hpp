#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "metrokit/linalg.hpp"

namespace metrokit::sdp {

enum class Sense { Min, Max };
enum class Status { Optimal, Infeasible, MaxIter };

/// Thrown when the Newton system of the interior-point method breaks down.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Standard-form semidefinite program over a block-diagonal PSD variable:
///   min/max  sum_b <C_b, X_b>   s.t.  sum_b <A_{i,b}, X_b> = b_i,  X >= 0.
/// All data matrices are real symmetric; complex Hermitian data enters via
/// complex_embed (see ComplexSdpProblem below).
struct SdpProblem {
    struct Constraint {
        std::vector<RealMatrix> a;
        double b = 0.0;
    };

    std::vector<int> block_dims;
    std::vector<RealMatrix> objective;
    std::vector<Constraint> constraints;
    Sense sense = Sense::Min;

    void validate() const;
};

struct SdpOptions {
    double gap_tol = 1e-8;
    double feas_tol = 1e-8;
    int max_iter = 200;
    bool trace = false;  // per-iteration diagnostics on stderr
};

struct SdpSolution {
    double primal_value = 0.0;
    double dual_value = 0.0;
    std::vector<RealMatrix> x;
    RealVector y;
    std::vector<RealMatrix> s;
    Status status = Status::MaxIter;
    int iterations = 0;

    double gap() const { return std::abs(primal_value - dual_value); }
};

/// Primal-dual interior-point method with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector step; dense Cholesky on the Schur complement.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

/// [[Re H, -Im H], [Im H, Re H]]; eigenvalues of H with doubled multiplicity.
RealMatrix complex_embed(const Matrix& hermitian);

/// Trace norm of a rectangular complex matrix through the SDP
///   min (1/2) Tr(P + Q)  s.t.  [[P, M^dag], [M, Q]] >= 0.
double trace_norm_sdp(const Matrix& m, const SdpOptions& options = {});

/// SDP whose blocks carry complex Hermitian data. Hermitian blocks are
/// embedded into real symmetric blocks of twice the size; inner products and
/// optimal values are reported in the complex convention <A, H> = Tr(A H).
struct ComplexSdpProblem {
    struct Block {
        int dim = 0;
        bool hermitian = true;  // false: plain real symmetric block
    };
    struct Constraint {
        std::vector<Matrix> a;
        double b = 0.0;
    };

    std::vector<Block> blocks;
    std::vector<Matrix> objective;
    std::vector<Constraint> constraints;
    Sense sense = Sense::Min;
};

struct ComplexSdpSolution {
    double primal_value = 0.0;
    double dual_value = 0.0;
    std::vector<Matrix> x;
    RealVector y;
    Status status = Status::MaxIter;
    int iterations = 0;

    double gap() const { return std::abs(primal_value - dual_value); }
};

ComplexSdpSolution solve_complex(const ComplexSdpProblem& problem,
                                 const SdpOptions& options = {});

/// Hermitian pick matrices: <pick_real(d,k,l), Z> = Re Z_kl and
/// <pick_imag(d,k,l), Z> = Im Z_kl for Hermitian Z.
Matrix pick_real(int dim, int k, int l);
Matrix pick_imag(int dim, int k, int l);

std::string to_json_string(const SdpProblem& problem);
SdpProblem problem_from_json_string(const std::string& text);

}  // namespace metrokit::sdp
