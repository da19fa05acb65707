#include "metrokit/stateopt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "metrokit/fisher.hpp"

namespace metrokit::stateopt {

void NelderMeadConfig::validate() const {
    if (!(expansion > std::max(1.0, reflection)))
        throw std::invalid_argument("NelderMeadConfig: expansion must exceed max(1, reflection)");
    if (!(contraction > 0.0 && contraction < 1.0) || !(shrink > 0.0 && shrink < 1.0))
        throw std::invalid_argument("NelderMeadConfig: contraction/shrink must lie in (0,1)");
    if (max_iter < 1) throw std::invalid_argument("NelderMeadConfig: max_iter must be >= 1");
}

NelderMeadResult nelder_mead(const std::function<double(const RealVector&)>& objective,
                             std::vector<RealVector> simplex, const NelderMeadConfig& config,
                             const NelderMeadObserver& observer) {
    config.validate();
    const int npts = static_cast<int>(simplex.size());
    if (npts < 2) throw std::invalid_argument("nelder_mead: need n+1 simplex points");
    const Eigen::Index dim = simplex.front().size();
    if (npts != dim + 1) throw std::invalid_argument("nelder_mead: simplex must have n+1 points");

    auto eval = [&](const RealVector& c) {
        const double f = objective(c);
        if (!std::isfinite(f)) throw std::runtime_error("nelder_mead: non-finite objective");
        return f;
    };

    std::vector<double> f(npts);
    for (int i = 0; i < npts; ++i) f[i] = eval(simplex[i]);

    auto order = [&]() {
        std::vector<int> idx(npts);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
        std::vector<RealVector> s2(npts);
        std::vector<double> f2(npts);
        for (int i = 0; i < npts; ++i) {
            s2[i] = simplex[idx[i]];
            f2[i] = f[idx[i]];
        }
        simplex.swap(s2);
        f.swap(f2);
    };

    int iter = 0;
    for (; iter < config.max_iter; ++iter) {
        order();
        if (observer) observer(iter, f[0], f[npts - 1]);
        if (f[npts - 1] - f[0] < config.epsilon) break;

        RealVector centroid = RealVector::Zero(dim);
        for (int i = 0; i < npts - 1; ++i) centroid += simplex[i];
        centroid /= static_cast<double>(npts - 1);

        const RealVector worst = simplex[npts - 1];
        const RealVector reflected = centroid + config.reflection * (centroid - worst);
        const double fr = eval(reflected);

        if (f[0] <= fr && fr < f[npts - 2]) {
            simplex[npts - 1] = reflected;
            f[npts - 1] = fr;
            continue;
        }
        if (fr < f[0]) {
            const RealVector expanded = centroid + config.expansion * (reflected - centroid);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[npts - 1] = expanded;
                f[npts - 1] = fe;
            } else {
                simplex[npts - 1] = reflected;
                f[npts - 1] = fr;
            }
            continue;
        }

        bool contracted = false;
        if (fr < f[npts - 1]) {  // outside contraction
            const RealVector oc = centroid + config.contraction * (reflected - centroid);
            const double foc = eval(oc);
            if (foc <= fr) {
                simplex[npts - 1] = oc;
                f[npts - 1] = foc;
                contracted = true;
            }
        } else {  // inside contraction
            const RealVector ic = centroid - config.contraction * (centroid - worst);
            const double fic = eval(ic);
            if (fic < f[npts - 1]) {
                simplex[npts - 1] = ic;
                f[npts - 1] = fic;
                contracted = true;
            }
        }
        if (!contracted) {
            for (int i = 1; i < npts; ++i) {
                simplex[i] = simplex[0] + config.shrink * (simplex[i] - simplex[0]);
                f[i] = eval(simplex[i]);
            }
        }
    }
    order();
    return {simplex[0], f[0], iter};
}

Matrix generator_hamiltonian(const std::function<Matrix(double)>& u, double x, double dx) {
    if (!(dx > 0.0)) throw std::invalid_argument("generator_hamiltonian: dx must be positive");
    auto check_unitary = [](const Matrix& m) {
        const Eigen::Index d = m.rows();
        if ((m.adjoint() * m - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
            throw std::invalid_argument("generator_hamiltonian: input is not unitary");
    };
    const Matrix u0 = u(x);
    const Matrix up = u(x + dx);
    const Matrix um = u(x - dx);
    check_unitary(u0);
    check_unitary(up);
    check_unitary(um);
    const Matrix du = (up - um) / (2.0 * dx);
    return hermitize(Cplx(0.0, 1.0) * u0.adjoint() * du);
}

UnitaryProbe optimal_unitary_probe(const Matrix& generator) {
    if (!is_hermitian(generator, 1e-9 * (1.0 + generator.cwiseAbs().maxCoeff())))
        throw std::invalid_argument("optimal_unitary_probe: generator not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(generator));
    const Eigen::Index d = generator.rows();
    const double gap = es.eigenvalues()(d - 1) - es.eigenvalues()(0);
    Vector amps = (es.eigenvectors().col(d - 1) + es.eigenvectors().col(0)) / std::sqrt(2.0);
    UnitaryProbe out{qcore::PureState(amps), gap * gap, false};
    if (gap < 1e-12 * (1.0 + std::abs(es.eigenvalues()(d - 1)))) {
        out.degenerate = true;
        out.qfi_rate = 0.0;
    }
    return out;
}

namespace {

RealVector checked_spectrum(RealVector lambda) {
    if (lambda.minCoeff() < -1e-12 || std::abs(lambda.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("spectrum is not a probability vector");
    std::sort(lambda.data(), lambda.data() + lambda.size(), std::greater<double>());
    return lambda;
}

double pair_coefficient(double li, double lj) {
    if (li + lj <= 0.0) return 0.0;
    return (li - lj) * (li - lj) / (li + lj);
}

// The paired-eigenvector construction shared by the static optimum and the
// time-dependent bound: columns of `basis` ordered by decreasing eigenvalue.
Matrix paired_state(const RealVector& lambda, const Matrix& basis) {
    const Eigen::Index d = basis.rows();
    Matrix rho = Matrix::Zero(d, d);
    for (Eigen::Index i = 1; i <= d; ++i) {
        Vector phi;
        if (2 * i < d + 1) {
            phi = (basis.col(i - 1) + basis.col(d - i)) / std::sqrt(2.0);
        } else if (2 * i == d + 1) {
            phi = basis.col(i - 1);
        } else {
            phi = (basis.col(i - 1) - basis.col(d - i)) / std::sqrt(2.0);
        }
        rho += lambda(i - 1) * phi * phi.adjoint();
    }
    return rho;
}

}  // namespace

FfbResult ffb_optimal_mixed(const RealVector& spectrum, const Matrix& generator) {
    const Eigen::Index d = generator.rows();
    if (spectrum.size() != d)
        throw std::invalid_argument("ffb_optimal_mixed: spectrum length must match dim");
    const RealVector lambda = checked_spectrum(spectrum);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(generator));

    Matrix basis(d, d);
    RealVector h(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        basis.col(i) = es.eigenvectors().col(d - 1 - i);
        h(i) = es.eigenvalues()(d - 1 - i);
    }
    double qfi = 0.0;
    for (Eigen::Index i = 1; i <= d; ++i) {
        const double gap = h(i - 1) - h(d - i);
        qfi += 0.5 * pair_coefficient(lambda(i - 1), lambda(d - i)) * gap * gap;
    }
    return {qcore::DensityMatrix(paired_state(lambda, basis)), qfi};
}

FfbBound ffb_upper_bound(const std::function<Matrix(double)>& dh, const RealVector& spectrum,
                         double t_total, int steps) {
    if (steps < 1) throw std::invalid_argument("ffb_upper_bound: steps must be >= 1");
    const Matrix dh0 = dh(0.0);
    const Eigen::Index d = dh0.rows();
    if (spectrum.size() != d)
        throw std::invalid_argument("ffb_upper_bound: spectrum length must match dim");
    const RealVector lambda = checked_spectrum(spectrum);

    RealVector integrals = RealVector::Zero(d);
    Matrix basis0(d, d);
    Matrix prev_vectors(d, d);
    bool crossing = false;
    for (int k = 0; k <= steps; ++k) {
        const double t = t_total * k / steps;
        Matrix m = dh(t);
        if (!is_hermitian(m, 1e-9 * (1.0 + m.cwiseAbs().maxCoeff())))
            throw std::invalid_argument("ffb_upper_bound: dH(t) not Hermitian");
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
        Matrix vecs(d, d);
        RealVector mu(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            vecs.col(i) = es.eigenvectors().col(d - 1 - i);
            mu(i) = es.eigenvalues()(d - 1 - i);
        }
        if (k == 0) {
            basis0 = vecs;
        } else {
            // Continuity check: sorted order must match the eigenvector
            // matching with the previous sample, otherwise a crossing
            // happened inside the step.
            for (Eigen::Index i = 0; i < d; ++i) {
                Eigen::Index best = 0;
                double best_ov = -1.0;
                for (Eigen::Index j = 0; j < d; ++j) {
                    const double ov = std::abs(prev_vectors.col(i).dot(vecs.col(j)));
                    if (ov > best_ov) {
                        best_ov = ov;
                        best = j;
                    }
                }
                if (best != i) crossing = true;
            }
        }
        prev_vectors = vecs;
        const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
        integrals += w * (t_total / steps) * mu;
    }

    double bound = 0.0;
    for (Eigen::Index i = 1; i <= d; ++i) {
        const double gap = integrals(i - 1) - integrals(d - i);
        bound += 0.5 * pair_coefficient(lambda(i - 1), lambda(d - i)) * gap * gap;
    }
    return {bound, qcore::DensityMatrix(paired_state(lambda, basis0)), crossing};
}

double mzi_coherent_squeezed_qfi(double n_a, double n_b) {
    if (n_a < 0.0 || n_b < 0.0)
        throw std::invalid_argument("mzi_coherent_squeezed_qfi: photon numbers must be >= 0");
    return 2.0 * n_a * n_b + n_a + n_b + 2.0 * n_a * std::sqrt(n_b * (n_b + 1.0));
}

RealVector berry_wiseman_state(int n) {
    if (n < 1) throw std::invalid_argument("berry_wiseman_state: N must be >= 1");
    RealVector c(n + 1);
    const double norm = std::sqrt(2.0 / (n + 2.0));
    for (int k = 0; k <= n; ++k) c(k) = norm * std::sin((k + 1) * M_PI / (n + 2.0));
    return c;
}

double thermometer_residual(const RealVector& energies, double temperature) {
    if (!(temperature > 0.0))
        throw std::invalid_argument("thermometer_residual: temperature must be positive");
    const Eigen::Index n = energies.size();
    // Gibbs mean with k_B = 1; shift by E_min for overflow safety.
    const double e0 = energies.minCoeff();
    double z = 0.0, h = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = std::exp(-(energies(i) - e0) / temperature);
        z += w;
        h += w * energies(i);
    }
    const double mean = h / z;
    double residual = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            residual = std::max(residual,
                                std::abs((energies(i) - energies(j)) *
                                         (energies(i) + energies(j) - 2.0 * (mean + temperature))));
    return residual;
}

void SpinModel::validate() const {
    if (n_qubits < 1) throw std::invalid_argument("SpinModel: need at least one qubit");
    if (kind == Kind::Local && n_qubits > 10)
        throw std::invalid_argument("SpinModel: local dephasing limited to N <= 10");
    if (gamma < 0.0) throw std::invalid_argument("SpinModel: negative dephasing rate");
    if (coeffs.size() != n_qubits + 1)
        throw std::invalid_argument("SpinModel: need N+1 Dicke coefficients");
    if (std::abs(coeffs.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("SpinModel: coefficients must be normalized");
}

double collective_dephasing_kernel(double gamma, double t) {
    // Integrated motional-narrowing rate gamma(1 - e^{-gamma tau}); zero at
    // t = 0 and asymptotically gamma t.
    return gamma * t - 1.0 + std::exp(-gamma * t);
}

SpinEvolution evolve_spin_dephasing(const SpinModel& model, double t) {
    model.validate();
    if (t < 0.0) throw std::invalid_argument("evolve_spin_dephasing: negative time");
    const int n = model.n_qubits;
    const Cplx mi(0.0, -1.0);

    if (model.kind == SpinModel::Kind::Collective) {
        const int d = n + 1;
        Vector psi = model.coeffs;
        Matrix rho0 = psi * psi.adjoint();
        Matrix rho(d, d), drho(d, d);
        const double kappa = collective_dephasing_kernel(model.gamma, t);
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                const double dm = static_cast<double>(a - b);  // m_a - m_b
                const Cplx phase = std::exp(mi * model.omega * t * dm);
                const double damp = std::exp(-dm * dm * kappa);
                rho(a, b) = rho0(a, b) * phase * damp;
                drho(a, b) = rho(a, b) * mi * t * dm;
            }
        }
        return {rho, drho};
    }

    // Local dephasing: H = omega S_z and all jump operators are diagonal in
    // the computational basis, so the full 2^N evolution is elementwise
    // exact: phase by omega(m_a - m_b)t, damping by gamma * Hamming distance.
    const int dim = 1 << n;
    Vector psi = Vector::Zero(dim);
    for (int idx = 0; idx <= n; ++idx) {
        const int ones = n - idx;  // m = idx - N/2
        double count = 0.0;
        for (int a = 0; a < dim; ++a)
            if (std::popcount(static_cast<unsigned>(a)) == ones) count += 1.0;
        const double amp = 1.0 / std::sqrt(count);
        for (int a = 0; a < dim; ++a)
            if (std::popcount(static_cast<unsigned>(a)) == ones)
                psi(a) += model.coeffs(idx) * amp;
    }
    Matrix rho0 = psi * psi.adjoint();
    Matrix rho(dim, dim), drho(dim, dim);
    for (int a = 0; a < dim; ++a) {
        const double ma = 0.5 * (n - 2 * std::popcount(static_cast<unsigned>(a)));
        for (int b = 0; b < dim; ++b) {
            const double mb = 0.5 * (n - 2 * std::popcount(static_cast<unsigned>(b)));
            const int hamming = std::popcount(static_cast<unsigned>(a ^ b));
            const Cplx phase = std::exp(mi * model.omega * t * (ma - mb));
            const double damp = std::exp(-model.gamma * t * hamming);
            rho(a, b) = rho0(a, b) * phase * damp;
            drho(a, b) = rho(a, b) * mi * t * (ma - mb);
        }
    }
    return {rho, drho};
}

double spin_dephasing_objective(const SpinModel& model, double t_total) {
    if (!(t_total > 0.0))
        throw std::invalid_argument("spin_dephasing_objective: T must be positive");
    SpinEvolution ev = evolve_spin_dephasing(model, t_total);
    const double f = fisher::sld(qcore::DensityMatrix(ev.rho), ev.drho_domega).qfi;
    return -f / t_total;
}

}  // namespace metrokit::stateopt
