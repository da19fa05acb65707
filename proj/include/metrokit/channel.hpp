#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "metrokit/linalg.hpp"
#include "metrokit/qcore.hpp"
#include "metrokit/sdp.hpp"

namespace metrokit::channel {

/// Kraus family x -> {K_j(x)} with analytic derivatives in matching order.
struct ParameterizedChannel {
    std::function<qcore::KrausChannel(double)> evaluator;
    std::function<std::vector<Matrix>(double)> derivative;
    int kraus_count = 0;

    /// Spot-checks the derivative against central differences and the
    /// differentiated completeness identity at x.
    void validate_at(double x, double rel_tol = 1e-5) const;
};

/// Kraus-gauge freedom witness W with ||W||_op <= 1.
struct GaugeMatrix {
    Matrix w;

    explicit GaugeMatrix(Matrix m, double tol = 1e-7);
};

struct ChannelFidelityResult {
    double value = 0.0;
    GaugeMatrix gauge;
    sdp::Status status = sdp::Status::MaxIter;
};

/// Channel fidelity via the SDP
///   max y/2  s.t.  [[I, W^dag], [W, I]] >= 0,  K + K^dag - y I >= 0,
/// K = sum_ij w_ij K1_i^dag K2_j. Kraus lists are zero-padded to a common
/// count.
ChannelFidelityResult channel_fidelity(const qcore::KrausChannel& e1,
                                       const qcore::KrausChannel& e2);

double channel_bures_angle(const qcore::KrausChannel& e1, const qcore::KrausChannel& e2);

/// Step for the finite-difference channel-QFI routes. Sized so that the
/// solver's attainable duality gap (~1e-10) stays far below the second
/// difference it divides into.
inline double default_dx(double x) { return 1e-2 * (1.0 + std::abs(x)); }

/// Channel QFI as 4 Theta_qc^2(E_x, E_{x+dx}) / dx^2 with one Richardson
/// step over (dx, dx/2).
double channel_qfi_fd(const ParameterizedChannel& pc, double x, double dx);

/// Purification quantities for the gauge-rotated Kraus derivatives
/// dK~_j = dK_j - i sum_i h_ji K_i:
///   G1 = sum_j dK~_j^dag dK~_j,  G2 = i sum_j dK~_j^dag K~_j.
std::pair<Matrix, Matrix> g1_g2(const ParameterizedChannel& pc, double x, const Matrix& gauge);

/// Upper bound 4(<G1> - <G2>^2) on the QFI for the probe rho_in (lifted by
/// tensoring with the ancilla identity when rho_in lives on system+ancilla).
double cf_bound(const ParameterizedChannel& pc, double x, const qcore::DensityMatrix& rho_in,
                const Matrix& gauge);

struct NUseBound {
    double value = 0.0;
    Matrix gauge;
    bool sql_flag = false;  // a gauge with ||G2||_op < 1e-6 exists
    double min_g2_norm = 0.0;
    bool certified = true;  // gauge searches converged within budget
};

/// N-use upper bound 4[N ||G1|| + N(N-1) ||G2|| (||G1|| + ||G2|| + 1)]
/// minimized over Hermitian gauges by Nelder-Mead with the given evaluation
/// budget.
NUseBound n_use_bound(const ParameterizedChannel& pc, double x, int n_uses,
                      int gauge_search_budget = 4000);

/// Quantum metrology matrix M_ij = Tr[rho_s K_i^dag(x1) K_j(x2)].
Matrix metrology_matrix(const qcore::DensityMatrix& rho_s, const ParameterizedChannel& pc,
                        double x1, double x2);

struct OptimalProbeResult {
    qcore::DensityMatrix rho_s;
    double qfi = 0.0;
    sdp::Status status = sdp::Status::MaxIter;
};

/// Optimal probe by minimizing ||M(x, x+dx)||_tr over input states (SDP),
/// QFI = 8(1 - ||M||_tr)/dx^2 with one Richardson step. The returned state
/// is pushed to an extreme point of the optimal face, which is pure whenever
/// the channel passes ancilla_free_check.
OptimalProbeResult optimal_probe(const ParameterizedChannel& pc, double x, double dx);

/// True iff all K_i^dag(x1) K_j(x2) commute, in which case the ancilla
/// cannot improve the precision and a pure system-only probe is optimal.
bool ancilla_free_check(const ParameterizedChannel& pc, double x1, double x2);

/// Common families.
ParameterizedChannel unitary_channel_family(const Matrix& generator);
ParameterizedChannel dephasing_channel_family(double p);
/// K_j(x) = A_j e^{-ix h}: encode with e^{-ixh}, then apply the fixed noise
/// {A_j}.
ParameterizedChannel encoded_channel_family(std::vector<Matrix> noise_kraus, Matrix generator);

}  // namespace metrokit::channel
