#pragma once

#include <functional>
#include <vector>

#include "metrokit/linalg.hpp"
#include "metrokit/qcore.hpp"

namespace metrokit::control {

/// Piecewise-constant control problem: drift H0(x) (with analytic d_x H0),
/// control Hamiltonians H_k with amplitudes V_k(t), Lindblad noise, horizon
/// T split into `steps` slices, and box bounds on the amplitudes.
struct ControlProblem {
    std::function<Matrix(double)> h0;
    std::function<Matrix(double)> dh0;
    double x = 0.0;  // parameter value the QFI is evaluated at
    std::vector<Matrix> controls;
    std::vector<Matrix> noise_ops;
    std::vector<double> rates;
    double t_total = 1.0;
    int steps = 1;
    double v_min = -10.0;
    double v_max = 10.0;

    void validate() const;
    int dim() const;
};

/// steps x P amplitude table.
struct ControlField {
    RealMatrix amplitudes;

    static ControlField zero(const ControlProblem& problem);
    void clip(const ControlProblem& problem);
};

struct Propagation {
    Matrix rho;
    Matrix drho;
};

/// Jointly propagates (rho, d_x rho) through the controlled master equation
/// using per-step exponentials of the doubled generator [[L, 0], [dL, L]].
Propagation propagate_with_derivative(const ControlProblem& problem, const ControlField& field,
                                      const qcore::DensityMatrix& rho_in);

/// QFI of (rho(T), d_x rho(T)).
double terminal_qfi(const ControlProblem& problem, const ControlField& field,
                    const qcore::DensityMatrix& rho_in);

enum class GradientMode { FiniteDifference, Adjoint };

struct GrapeResult {
    ControlField field;
    std::vector<double> qfi_history;
};

/// Gradient ascent on F(T) with amplitude clipping and backtracking on the
/// learning rate; the history is nondecreasing.
GrapeResult grape(const ControlProblem& problem, const ControlField& field_init,
                  const qcore::DensityMatrix& rho_in, double learning_rate, int iters,
                  GradientMode mode = GradientMode::FiniteDifference);

/// Gradient of F(T) with respect to every amplitude; exposed for gradient
/// cross-checks.
RealMatrix grape_gradient(const ControlProblem& problem, const ControlField& field,
                          const qcore::DensityMatrix& rho_in, GradientMode mode);

/// [ integral_0^T (h_max(t) - h_min(t)) dt ]^2 for Hermitian dH(t), an upper
/// bound on the attainable QFI of a time-dependent unitary parametrization.
double pang_jordan_bound(const std::function<Matrix(double)>& dh, double t_total, int steps);

/// Adaptive reversal control H_c = -H(x_hat).
Matrix reversal_control(const std::function<Matrix(double)>& h, double x_hat);

}  // namespace metrokit::control
