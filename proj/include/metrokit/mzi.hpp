#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "metrokit/linalg.hpp"
#include "metrokit/rng.hpp"

namespace metrokit::mzi {

/// Two-mode state of fixed total photon number over |k, N-k>, k = 0..N.
struct TwoModeFockState {
    int photons = 0;
    Vector amps;

    TwoModeFockState(int n, Vector amplitudes, bool normalize = false);

    /// Skips the unit-norm check (post-measurement states are unnormalized).
    static TwoModeFockState unnormalized(int n, Vector amplitudes);

    TwoModeFockState normalized() const;
};

/// Gridded distribution over the phase interval [-pi, pi).
struct PhasePrior {
    RealVector grid;
    RealVector weights;

    static PhasePrior uniform(int grid_size = 2048);
    void normalize();
    void validate() const;
};

struct MeasurementRecord {
    std::vector<int> outcomes;
    std::vector<double> feedback_phases;
};

/// Feedback-phase policy. Offline policies carry one delta per photon and
/// follow Phi_m = Phi_{m-1} - (-1)^{u_{m-1}} dPhi_m for m >= 2 (the first
/// delta is inert; Phi_1 comes from phi_1). A fixed-phase run is an offline
/// policy with zero deltas.
struct AdaptivePolicy {
    enum class Kind { Online, Offline };

    Kind kind = Kind::Online;
    RealVector offline_deltas;
    double phi_1 = 0.0;

    static AdaptivePolicy online(double phi_1 = 0.0);
    static AdaptivePolicy offline(RealVector deltas, double phi_1 = 0.0);
    static AdaptivePolicy fixed_phase(int photons, double phi = 0.0);
};

struct PsoConfig {
    int particles = 20;         // L
    int rounds = 50;            // M
    double inertia = 0.7298;    // c0
    double cognitive = 1.49618; // c1
    double social = 1.49618;    // c2
    std::uint64_t seed = 0;
    int sample_budget = 2000;   // trajectories per M_off estimate
    int grid_size = 2048;

    void validate() const;
};

/// Applies the output-port annihilation operator
/// a_u = a sin((phi-Phi)/2 + pi u/2) + b cos((phi-Phi)/2 + pi u/2);
/// returns the unnormalized (N-1)-photon state and its squared norm.
std::pair<TwoModeFockState, double> output_mode_apply(const TwoModeFockState& state, double phi,
                                                      double feedback, int u);

/// p(u) = <a_u^dag a_u> / N for the current normalized state.
double detection_prob(const TwoModeFockState& state, double phi, double feedback, int u);

/// One Bayes step on the grid using p(u | phi_i) from the supplied state.
/// The returned single state applies the output map at the posterior mean;
/// sequential exact runs use AdaptiveEngine below, which tracks one
/// conditional state per grid point.
std::pair<PhasePrior, TwoModeFockState> posterior_update(const PhasePrior& prior,
                                                         const TwoModeFockState& state,
                                                         double feedback, int u);

/// S = |sum_i w_i e^{i phi_i}| and the Holevo variance S^-2 - 1.
double sharpness(const PhasePrior& prior);
double holevo_variance(const PhasePrior& prior);

/// Exact sequential Bayes state: a conditional two-mode state per grid
/// point plus the posterior weights.
class AdaptiveEngine {
public:
    AdaptiveEngine(const TwoModeFockState& input, PhasePrior prior);

    int remaining() const { return remaining_; }
    const PhasePrior& posterior() const { return prior_; }

    /// Likelihoods p(u = 0 | phi_i) for a candidate feedback phase.
    RealVector likelihood0(double feedback) const;

    /// Advances every conditional state and the posterior with outcome u.
    void update(double feedback, int u);

    /// Sharpness-weighted one-step lookahead M_on(Phi) (numerator form).
    double online_target(double feedback) const;

    double estimate() const;

private:
    PhasePrior prior_;
    Matrix states_;  // (N+1) x G conditional amplitudes, columns normalized
    int remaining_;
};

/// Maximizes M_on by a 64-point scan plus golden-section refinement to
/// 1e-4 rad.
double online_next_phase(const AdaptiveEngine& engine);

/// Single-state overload (exact for the first round).
double online_next_phase(const PhasePrior& prior, const TwoModeFockState& state);

struct AdaptiveOutcome {
    MeasurementRecord record;
    PhasePrior posterior;
    double estimate = 0.0;
    double holevo = 0.0;
};

/// Runs N detections, sampling outcomes at phi_true with the seeded
/// generator, and returns the record, final posterior, circular-mean
/// estimate, and Holevo variance.
AdaptiveOutcome simulate_adaptive(const AdaptivePolicy& policy, const TwoModeFockState& input,
                                  double phi_true, std::uint64_t seed, int grid_size = 2048);

/// Monte-Carlo estimate of the offline sharpness target
/// M_off = sum_traj |int p(u|phi) p_in(phi) e^{i phi} dphi|, sampling
/// trajectories from the policy-induced distribution.
double m_off(const RealVector& deltas, const TwoModeFockState& input, int sample_budget,
             std::uint64_t seed, int grid_size = 2048, double phi_1 = 0.0);

struct PsoResult {
    RealVector best_deltas;
    double best_value = 0.0;
    RealVector history;  // global best after each round
};

/// Particle-swarm search over offline deltas with personal/global bests and
/// the inertia-cognitive-social velocity update; fully seeded.
PsoResult pso_offline(const TwoModeFockState& input, const PsoConfig& config);

/// J_y-basis coefficients (m = -N/2..N/2) to the Fock basis through the
/// exact basis rotation exp(i (pi/2) J_x); column k maps to the J_y
/// eigenstate of eigenvalue k - N/2.
TwoModeFockState from_jy_coefficients(const Vector& coeffs);

/// Sharpness-optimal input state for N photons.
TwoModeFockState berry_wiseman_input(int n);

/// Schwinger representation on the N-photon sector.
Matrix schwinger_jx(int n);
Matrix schwinger_jy(int n);

}  // namespace metrokit::mzi
