#include "metrokit/qcore.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace metrokit::qcore {

namespace {

void check_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix data, double tol) : data_(std::move(data)) {
    check_square(data_, "DensityMatrix");
    if (data_.rows() < 1) throw std::invalid_argument("DensityMatrix: empty matrix");
    const double scale = 1.0 + data_.cwiseAbs().maxCoeff();
    if ((data_ - data_.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
        throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
    data_ = hermitize(data_);
    if (std::abs(data_.trace().real() - 1.0) > tol * scale)
        throw std::invalid_argument("DensityMatrix: trace differs from 1");
    if (min_eigenvalue(data_) < -tol * scale)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
}

DensityMatrix DensityMatrix::pure(const Vector& amplitudes, double tol) {
    PureState psi(amplitudes, tol);
    return psi.to_density_matrix();
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

PureState::PureState(Vector amplitudes, double tol) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 1) throw std::invalid_argument("PureState: empty vector");
    if (std::abs(amps_.norm() - 1.0) > tol)
        throw std::invalid_argument("PureState: not normalized");
    amps_ /= amps_.norm();
}

KrausChannel::KrausChannel(std::vector<Matrix> operators, double tol) : kraus(std::move(operators)) {
    if (kraus.empty()) throw std::invalid_argument("KrausChannel: no Kraus operators");
    dim_out = static_cast<int>(kraus.front().rows());
    dim_in = static_cast<int>(kraus.front().cols());
    for (const auto& k : kraus)
        if (k.rows() != dim_out || k.cols() != dim_in)
            throw std::invalid_argument("KrausChannel: inconsistent operator shapes");
    Matrix sum = Matrix::Zero(dim_in, dim_in);
    for (const auto& k : kraus) sum += k.adjoint() * k;
    if ((sum - Matrix::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("KrausChannel: completeness violated beyond tolerance");
}

KrausChannel KrausChannel::identity(int dim) {
    return KrausChannel({Matrix::Identity(dim, dim)});
}

LindbladModel::LindbladModel(Matrix h, std::vector<Matrix> ops, std::vector<double> gammas,
                             double tol)
    : hamiltonian(std::move(h)), lindblad_ops(std::move(ops)), rates(std::move(gammas)) {
    check_square(hamiltonian, "LindbladModel");
    if (!is_hermitian(hamiltonian, tol * (1.0 + hamiltonian.cwiseAbs().maxCoeff())))
        throw std::invalid_argument("LindbladModel: Hamiltonian not Hermitian");
    if (lindblad_ops.size() != rates.size())
        throw std::invalid_argument("LindbladModel: one rate per Lindblad operator required");
    for (const auto& g : lindblad_ops)
        if (g.rows() != hamiltonian.rows() || g.cols() != hamiltonian.cols())
            throw std::invalid_argument("LindbladModel: operator dimension mismatch");
    for (double r : rates)
        if (!(r >= 0.0)) throw std::invalid_argument("LindbladModel: negative rate");
}

DensityMatrix apply_channel(const KrausChannel& channel, const DensityMatrix& state) {
    if (channel.dim_in != state.dim())
        throw std::invalid_argument("apply_channel: dimension mismatch");
    Matrix out = Matrix::Zero(channel.dim_out, channel.dim_out);
    for (const auto& k : channel.kraus) out += k * state.matrix() * k.adjoint();
    return DensityMatrix(out);
}

KrausChannel kraus_transform(const KrausChannel& channel, const Matrix& isometry) {
    const auto m = static_cast<Eigen::Index>(channel.kraus.size());
    if (isometry.cols() != m)
        throw std::invalid_argument("kraus_transform: isometry column count must match Kraus count");
    if ((isometry.adjoint() * isometry - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("kraus_transform: V is not an isometry");
    std::vector<Matrix> out;
    out.reserve(isometry.rows());
    for (Eigen::Index j = 0; j < isometry.rows(); ++j) {
        Matrix kj = Matrix::Zero(channel.dim_out, channel.dim_in);
        for (Eigen::Index i = 0; i < m; ++i) kj += isometry(j, i) * channel.kraus[i];
        out.push_back(std::move(kj));
    }
    return KrausChannel(std::move(out));
}

DensityMatrix evolve_unitary(const Matrix& hamiltonian, double t, const DensityMatrix& state) {
    check_square(hamiltonian, "evolve_unitary");
    if (hamiltonian.rows() != state.dim())
        throw std::invalid_argument("evolve_unitary: dimension mismatch");
    Matrix u = expm_hermitian_generator(hamiltonian, t);
    return DensityMatrix(u * state.matrix() * u.adjoint());
}

Matrix lindblad_superoperator(const LindbladModel& model) {
    const Eigen::Index d = model.hamiltonian.rows();
    const Matrix id = Matrix::Identity(d, d);
    const Cplx mi(0.0, -1.0);
    Matrix sup = mi * (kron(id, model.hamiltonian) - kron(model.hamiltonian.transpose(), id));
    for (std::size_t k = 0; k < model.lindblad_ops.size(); ++k) {
        const Matrix& g = model.lindblad_ops[k];
        const Matrix gg = g.adjoint() * g;
        sup += model.rates[k] * (kron(g.conjugate(), g) -
                                 0.5 * (kron(id, gg) + kron(gg.transpose(), id)));
    }
    return sup;
}

DensityMatrix evolve_lindblad(const LindbladModel& model, double t, int steps,
                              const DensityMatrix& state) {
    if (steps < 1) throw std::invalid_argument("evolve_lindblad: steps must be >= 1");
    if (t < 0.0) throw std::invalid_argument("evolve_lindblad: negative time");
    if (model.hamiltonian.rows() != state.dim())
        throw std::invalid_argument("evolve_lindblad: dimension mismatch");
    const Matrix sup = lindblad_superoperator(model);
    const Matrix step = (sup * (t / steps)).exp();
    Vector v = vec(state.matrix());
    for (int s = 0; s < steps; ++s) v = step * v;
    Matrix rho = unvec(v, state.dim(), state.dim());
    return DensityMatrix(hermitize(rho));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(kron(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho_ab, int dim_a, int dim_b, Subsystem which) {
    if (dim_a * dim_b != rho_ab.dim())
        throw std::invalid_argument("partial_trace: dims do not factor the state");
    const Matrix& r = rho_ab.matrix();
    if (which == Subsystem::B) {
        Matrix out = Matrix::Zero(dim_a, dim_a);
        for (int i = 0; i < dim_a; ++i)
            for (int j = 0; j < dim_a; ++j)
                for (int k = 0; k < dim_b; ++k) out(i, j) += r(i * dim_b + k, j * dim_b + k);
        return DensityMatrix(out);
    }
    Matrix out = Matrix::Zero(dim_b, dim_b);
    for (int i = 0; i < dim_b; ++i)
        for (int j = 0; j < dim_b; ++j)
            for (int k = 0; k < dim_a; ++k) out(i, j) += r(k * dim_b + i, k * dim_b + j);
    return DensityMatrix(out);
}

}  // namespace metrokit::qcore
