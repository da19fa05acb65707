#pragma once

#include <functional>
#include <vector>

#include "metrokit/linalg.hpp"
#include "metrokit/qcore.hpp"

namespace metrokit::stateopt {

/// Simplex coefficients and stop rule for the Nelder-Mead search.
struct NelderMeadConfig {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double epsilon = 1e-10;  // stop when f_worst - f_best < epsilon
    int max_iter = 2000;

    void validate() const;
};

struct NelderMeadResult {
    RealVector best;
    double value = 0.0;
    int iterations = 0;
};

using NelderMeadObserver = std::function<void(int iter, double f_best, double f_worst)>;

/// Gradient-free simplex minimization with reflection, expansion,
/// contraction and shrink steps.
NelderMeadResult nelder_mead(const std::function<double(const RealVector&)>& objective,
                             std::vector<RealVector> simplex,
                             const NelderMeadConfig& config = {},
                             const NelderMeadObserver& observer = {});

/// Generator of a parameterized unitary family, i U^dag(x) dU/dx, via central
/// differences and Hermitian projection. Returns H for U = exp(-ixH).
Matrix generator_hamiltonian(const std::function<Matrix(double)>& u, double x, double dx);

struct UnitaryProbe {
    qcore::PureState state;
    double qfi_rate = 0.0;
    bool degenerate = false;
};

/// Equal superposition of the extreme eigenvectors of the generator; the QFI
/// per unit parameter is the squared spectral gap.
UnitaryProbe optimal_unitary_probe(const Matrix& generator);

struct FfbResult {
    qcore::DensityMatrix state;
    double qfi = 0.0;
};

/// Optimal initial state of fixed spectrum under a unitary parametrization
/// and its maximal QFI (pairs of extreme generator eigenvectors).
FfbResult ffb_optimal_mixed(const RealVector& spectrum, const Matrix& generator);

struct FfbBound {
    double bound = 0.0;
    qcore::DensityMatrix state;
    bool crossing_flag = false;
};

/// Time-dependent upper bound: integrated eigenvalue gaps of d_x H(t) over
/// [0, T] by the trapezoid rule, with the paired initial state at t = 0.
FfbBound ffb_upper_bound(const std::function<Matrix(double)>& dh, const RealVector& spectrum,
                         double t_total, int steps);

/// Maximal MZI QFI with a coherent state in one port and N_b photons in the
/// other: 2 Na Nb + Na + Nb + 2 Na sqrt(Nb(Nb+1)).
double mzi_coherent_squeezed_qfi(double n_a, double n_b);

/// Sharpness-optimal input coefficients over the J_y eigenbasis,
/// m = -N/2..N/2 (index 0 is m = -N/2).
RealVector berry_wiseman_state(int n);

/// Residual of the thermometer optimality condition
/// (E_i - E_j)[E_i + E_j - 2(<H> + T)] maximized over level pairs; zero iff
/// the spectrum is an optimal degenerate two-level structure.
double thermometer_residual(const RealVector& energies, double temperature);

/// Collective-spin probe: coefficients over Dicke states |J, m>, J = N/2,
/// index 0 holding m = -J. Frequency omega is the estimated parameter.
struct SpinModel {
    enum class Kind { Local, Collective };

    int n_qubits = 1;
    double omega = 1.0;
    double gamma = 0.0;
    Kind kind = Kind::Local;
    Vector coeffs;

    void validate() const;
};

struct SpinEvolution {
    Matrix rho;
    Matrix drho_domega;
};

/// Exact evolved state and its omega-derivative. Local dephasing evolves in
/// the full 2^N tensor space (the dynamics is diagonal there); collective
/// dephasing uses the integrated (m - m')^2 kernel in the Dicke basis.
SpinEvolution evolve_spin_dephasing(const SpinModel& model, double t);

/// Search objective -F(T)/T for the Dicke-coefficient ansatz.
double spin_dephasing_objective(const SpinModel& model, double t_total);

/// Integrated collective-dephasing kernel K with off-diagonal damping
/// exp(-(m-m')^2 K(t)).
double collective_dephasing_kernel(double gamma, double t);

}  // namespace metrokit::stateopt
