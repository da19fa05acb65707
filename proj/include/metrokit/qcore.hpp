#pragma once

#include <vector>

#include "metrokit/linalg.hpp"

namespace metrokit::qcore {

inline constexpr double kDefaultTol = 1e-9;

/// Density matrix with validated invariants: Hermitian, unit trace and
/// positive semidefinite, all to an absolute tolerance.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix data, double tol = kDefaultTol);

    static DensityMatrix pure(const Vector& amplitudes, double tol = kDefaultTol);
    static DensityMatrix maximally_mixed(int dim);

    int dim() const { return static_cast<int>(data_.rows()); }
    const Matrix& matrix() const { return data_; }
    double purity() const { return (data_ * data_).trace().real(); }

private:
    Matrix data_;
};

/// Normalized pure state.
class PureState {
public:
    explicit PureState(Vector amplitudes, double tol = kDefaultTol);

    int dim() const { return static_cast<int>(amps_.rows()); }
    const Vector& amplitudes() const { return amps_; }
    DensityMatrix to_density_matrix() const { return DensityMatrix(amps_ * amps_.adjoint()); }

private:
    Vector amps_;
};

/// Kraus representation of a channel; completeness sum_j K_j^dag K_j = I is
/// checked on construction.
struct KrausChannel {
    int dim_in = 0;
    int dim_out = 0;
    std::vector<Matrix> kraus;

    KrausChannel(std::vector<Matrix> operators, double tol = kDefaultTol);
    static KrausChannel identity(int dim);

    int kraus_count() const { return static_cast<int>(kraus.size()); }
};

/// Markovian master-equation model: H plus Lindblad operators with
/// nonnegative rates.
struct LindbladModel {
    Matrix hamiltonian;
    std::vector<Matrix> lindblad_ops;
    std::vector<double> rates;

    LindbladModel(Matrix h, std::vector<Matrix> ops, std::vector<double> gammas,
                  double tol = kDefaultTol);
};

enum class Subsystem { A, B };

DensityMatrix apply_channel(const KrausChannel& channel, const DensityMatrix& state);

/// Equivalent Kraus set K~_j = sum_i v_ji K_i for an isometry V (p x m).
KrausChannel kraus_transform(const KrausChannel& channel, const Matrix& isometry);

DensityMatrix evolve_unitary(const Matrix& hamiltonian, double t, const DensityMatrix& state);

/// Propagates the master equation by `steps` applications of the per-step
/// superoperator exponential (column-stacking vectorization).
DensityMatrix evolve_lindblad(const LindbladModel& model, double t, int steps,
                              const DensityMatrix& state);

/// dim^2 x dim^2 generator of the master equation in column-stacking
/// vectorization.
Matrix lindblad_superoperator(const LindbladModel& model);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Traces out the named factor of a bipartite state with dims (dim_a, dim_b).
DensityMatrix partial_trace(const DensityMatrix& rho_ab, int dim_a, int dim_b, Subsystem which);

}  // namespace metrokit::qcore
