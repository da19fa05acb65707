#include "metrokit/control.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "metrokit/fisher.hpp"

namespace metrokit::control {

namespace {

Matrix commutator_superop(const Matrix& h) {
    const Eigen::Index d = h.rows();
    const Matrix id = Matrix::Identity(d, d);
    return Cplx(0, -1) * (kron(id, h) - kron(h.transpose(), id));
}

struct StepCache {
    std::vector<Matrix> step_props;   // doubled per-step propagators
    std::vector<Vector> prefix;       // prefix[t] = state after t steps
    std::vector<Matrix> suffix;       // suffix[t] = product of steps > t
    Matrix dl;                        // parameter-derivative generator
    std::vector<Matrix> control_gens; // commutator superoperators of H_k
    Matrix drift;                     // noise + drift generator
};

Matrix doubled_generator(const Matrix& l, const Matrix& dl) {
    const Eigen::Index n = l.rows();
    Matrix m = Matrix::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = l;
    m.bottomRightCorner(n, n) = l;
    m.bottomLeftCorner(n, n) = dl;
    return m;
}

Matrix step_generator(const StepCache& cache, const ControlProblem& problem,
                      const RealMatrix& amps, int t) {
    Matrix l = cache.drift;
    for (std::size_t k = 0; k < problem.controls.size(); ++k)
        l += amps(t, k) * cache.control_gens[k];
    return doubled_generator(l, cache.dl);
}

StepCache build_cache(const ControlProblem& problem, const ControlField& field,
                      const qcore::DensityMatrix& rho_in) {
    const int d = problem.dim();
    StepCache cache;
    qcore::LindbladModel drift_model(problem.h0(problem.x), problem.noise_ops, problem.rates);
    cache.drift = qcore::lindblad_superoperator(drift_model);
    cache.dl = commutator_superop(hermitize(problem.dh0(problem.x)));
    for (const auto& hk : problem.controls) cache.control_gens.push_back(commutator_superop(hk));

    const double dt = problem.t_total / problem.steps;
    Vector z = Vector::Zero(2 * d * d);
    z.head(d * d) = vec(rho_in.matrix());
    cache.prefix.push_back(z);
    for (int t = 0; t < problem.steps; ++t) {
        Matrix e = (step_generator(cache, problem, field.amplitudes, t) * dt).exp();
        z = e * z;
        cache.step_props.push_back(std::move(e));
        cache.prefix.push_back(z);
    }
    cache.suffix.assign(problem.steps + 1, Matrix());
    cache.suffix[problem.steps] = Matrix::Identity(2 * d * d, 2 * d * d);
    for (int t = problem.steps - 1; t >= 0; --t)
        cache.suffix[t] = cache.suffix[t + 1] * cache.step_props[t];
    return cache;
}

double qfi_of_state(const Vector& z, int d) {
    Matrix rho = hermitize(unvec(z.head(d * d), d, d));
    Matrix drho = hermitize(unvec(z.tail(d * d), d, d));
    return fisher::sld(qcore::DensityMatrix(rho), drho).qfi;
}

}  // namespace

void ControlProblem::validate() const {
    if (!h0 || !dh0) throw std::invalid_argument("ControlProblem: missing drift callables");
    if (steps < 1) throw std::invalid_argument("ControlProblem: steps must be >= 1");
    if (!(t_total > 0.0)) throw std::invalid_argument("ControlProblem: T must be positive");
    if (!(v_min < v_max)) throw std::invalid_argument("ControlProblem: empty amplitude box");
    if (noise_ops.size() != rates.size())
        throw std::invalid_argument("ControlProblem: one rate per noise operator");
    for (double r : rates)
        if (!(r >= 0.0)) throw std::invalid_argument("ControlProblem: negative rate");
}

int ControlProblem::dim() const { return static_cast<int>(h0(x).rows()); }

ControlField ControlField::zero(const ControlProblem& problem) {
    return {RealMatrix::Zero(problem.steps, problem.controls.size())};
}

void ControlField::clip(const ControlProblem& problem) {
    amplitudes = amplitudes.cwiseMax(problem.v_min).cwiseMin(problem.v_max);
}

Propagation propagate_with_derivative(const ControlProblem& problem, const ControlField& field,
                                      const qcore::DensityMatrix& rho_in) {
    problem.validate();
    const int d = problem.dim();
    if (rho_in.dim() != d)
        throw std::invalid_argument("propagate_with_derivative: state dimension mismatch");
    if (field.amplitudes.rows() != problem.steps ||
        field.amplitudes.cols() != static_cast<Eigen::Index>(problem.controls.size()))
        throw std::invalid_argument("propagate_with_derivative: field shape mismatch");
    StepCache cache = build_cache(problem, field, rho_in);
    const Vector& z = cache.prefix.back();
    return {hermitize(unvec(z.head(d * d), d, d)), hermitize(unvec(z.tail(d * d), d, d))};
}

double terminal_qfi(const ControlProblem& problem, const ControlField& field,
                    const qcore::DensityMatrix& rho_in) {
    Propagation p = propagate_with_derivative(problem, field, rho_in);
    return fisher::sld(qcore::DensityMatrix(p.rho), p.drho).qfi;
}

RealMatrix grape_gradient(const ControlProblem& problem, const ControlField& field,
                          const qcore::DensityMatrix& rho_in, GradientMode mode) {
    problem.validate();
    const int d = problem.dim();
    const int num_ctrl = static_cast<int>(problem.controls.size());
    const double dt = problem.t_total / problem.steps;
    StepCache cache = build_cache(problem, field, rho_in);
    RealMatrix grad(problem.steps, num_ctrl);

    if (mode == GradientMode::FiniteDifference) {
        for (int t = 0; t < problem.steps; ++t) {
            for (int k = 0; k < num_ctrl; ++k) {
                const double delta = 1e-6 * (1.0 + std::abs(field.amplitudes(t, k)));
                RealMatrix amps = field.amplitudes;
                amps(t, k) += delta;
                Matrix ep = (step_generator(cache, problem, amps, t) * dt).exp();
                amps(t, k) -= 2.0 * delta;
                Matrix em = (step_generator(cache, problem, amps, t) * dt).exp();
                const double fp =
                    qfi_of_state(cache.suffix[t + 1] * (ep * cache.prefix[t]), d);
                const double fm =
                    qfi_of_state(cache.suffix[t + 1] * (em * cache.prefix[t]), d);
                grad(t, k) = (fp - fm) / (2.0 * delta);
            }
        }
        return grad;
    }

    // Adjoint mode: dF = Tr(2L dD) - Tr(L^2 dS) paired against the exact
    // Frechet derivative of each step exponential.
    const Vector& zt = cache.prefix.back();
    Matrix rho = hermitize(unvec(zt.head(d * d), d, d));
    Matrix drho = hermitize(unvec(zt.tail(d * d), d, d));
    const Matrix sld = fisher::sld(qcore::DensityMatrix(rho), drho).sld;
    Vector w(2 * d * d);
    w.head(d * d) = vec(Matrix(-sld * sld));
    w.tail(d * d) = vec(Matrix(2.0 * sld));

    std::vector<Vector> adjoint(problem.steps + 1);
    adjoint[problem.steps] = w;
    for (int t = problem.steps - 1; t >= 0; --t)
        adjoint[t] = cache.step_props[t].adjoint() * adjoint[t + 1];

    const int n2 = 2 * d * d;
    for (int t = 0; t < problem.steps; ++t) {
        const Matrix m = step_generator(cache, problem, field.amplitudes, t);
        for (int k = 0; k < num_ctrl; ++k) {
            Matrix nk = doubled_generator(cache.control_gens[k], Matrix::Zero(d * d, d * d));
            // Frechet derivative of exp(M dt) in direction N dt via the
            // block-triangular exponential.
            Matrix big = Matrix::Zero(2 * n2, 2 * n2);
            big.topLeftCorner(n2, n2) = m * dt;
            big.bottomRightCorner(n2, n2) = m * dt;
            big.topRightCorner(n2, n2) = nk * dt;
            Matrix frechet = Matrix(big.exp()).topRightCorner(n2, n2);
            grad(t, k) = (adjoint[t + 1].adjoint() * (frechet * cache.prefix[t]))(0, 0).real();
        }
    }
    return grad;
}

GrapeResult grape(const ControlProblem& problem, const ControlField& field_init,
                  const qcore::DensityMatrix& rho_in, double learning_rate, int iters,
                  GradientMode mode) {
    if (iters < 1) throw std::invalid_argument("grape: iters must be >= 1");
    ControlField field = field_init;
    field.clip(problem);
    double f_cur = terminal_qfi(problem, field, rho_in);
    GrapeResult out;
    out.qfi_history.push_back(f_cur);

    double rate = learning_rate;
    for (int it = 0; it < iters; ++it) {
        RealMatrix g = grape_gradient(problem, field, rho_in, mode);
        bool moved = false;
        double trial_rate = rate;
        while (trial_rate >= 1e-6) {
            ControlField trial{field.amplitudes + trial_rate * g};
            trial.clip(problem);
            const double f_trial = terminal_qfi(problem, trial, rho_in);
            if (f_trial >= f_cur - 1e-12) {
                field = trial;
                f_cur = f_trial;
                moved = true;
                break;
            }
            trial_rate *= 0.5;
        }
        rate = std::max(trial_rate, 1e-6);
        out.qfi_history.push_back(f_cur);
        if (!moved) break;  // no ascent direction at the smallest rate
    }
    out.field = field;
    return out;
}

double pang_jordan_bound(const std::function<Matrix(double)>& dh, double t_total, int steps) {
    if (steps < 1) throw std::invalid_argument("pang_jordan_bound: steps must be >= 1");
    double integral = 0.0;
    for (int k = 0; k <= steps; ++k) {
        const double t = t_total * k / steps;
        Matrix m = dh(t);
        if (!is_hermitian(m, 1e-9 * (1.0 + m.cwiseAbs().maxCoeff())))
            throw std::invalid_argument("pang_jordan_bound: dH(t) not Hermitian");
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
        const double gap = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
        integral += (k == 0 || k == steps ? 0.5 : 1.0) * (t_total / steps) * gap;
    }
    return integral * integral;
}

Matrix reversal_control(const std::function<Matrix(double)>& h, double x_hat) {
    return -h(x_hat);
}

}  // namespace metrokit::control
