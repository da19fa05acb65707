#include "metrokit/mzi.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace metrokit::mzi {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_phase(double phi) {
    double w = std::fmod(phi + M_PI, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w - M_PI;
}

Cplx circular_moment(const PhasePrior& prior) {
    Cplx acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < prior.grid.size(); ++i)
        acc += prior.weights(i) * std::exp(Cplx(0.0, prior.grid(i)));
    return acc;
}

}  // namespace

TwoModeFockState::TwoModeFockState(int n, Vector amplitudes, bool normalize)
    : photons(n), amps(std::move(amplitudes)) {
    if (photons < 0) throw std::invalid_argument("TwoModeFockState: negative photon number");
    if (amps.size() != photons + 1)
        throw std::invalid_argument("TwoModeFockState: need N+1 amplitudes");
    const double norm = amps.norm();
    if (normalize) {
        if (norm < 1e-300) throw std::invalid_argument("TwoModeFockState: zero state");
        amps /= norm;
    } else if (std::abs(norm - 1.0) > 1e-9) {
        throw std::invalid_argument("TwoModeFockState: state not normalized");
    }
}

TwoModeFockState TwoModeFockState::unnormalized(int n, Vector amplitudes) {
    TwoModeFockState s(n, Vector::Constant(n + 1, std::sqrt(1.0 / (n + 1.0))));
    s.amps = std::move(amplitudes);
    return s;
}

TwoModeFockState TwoModeFockState::normalized() const {
    return TwoModeFockState(photons, amps, true);
}

PhasePrior PhasePrior::uniform(int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("PhasePrior: grid too small");
    PhasePrior p;
    p.grid.resize(grid_size);
    for (int i = 0; i < grid_size; ++i) p.grid(i) = -M_PI + kTwoPi * i / grid_size;
    p.weights = RealVector::Constant(grid_size, 1.0 / grid_size);
    return p;
}

void PhasePrior::normalize() {
    const double total = weights.sum();
    if (total <= 0.0) throw std::runtime_error("PhasePrior: vanishing posterior");
    weights /= total;
}

void PhasePrior::validate() const {
    if (grid.size() != weights.size())
        throw std::invalid_argument("PhasePrior: grid/weight size mismatch");
    if (weights.minCoeff() < -1e-12) throw std::invalid_argument("PhasePrior: negative weight");
    if (std::abs(weights.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("PhasePrior: weights must sum to 1");
}

AdaptivePolicy AdaptivePolicy::online(double phi_1) {
    AdaptivePolicy p;
    p.kind = Kind::Online;
    p.phi_1 = phi_1;
    return p;
}

AdaptivePolicy AdaptivePolicy::offline(RealVector deltas, double phi_1) {
    AdaptivePolicy p;
    p.kind = Kind::Offline;
    p.offline_deltas = std::move(deltas);
    p.phi_1 = phi_1;
    for (Eigen::Index i = 0; i < p.offline_deltas.size(); ++i)
        if (!std::isfinite(p.offline_deltas(i)))
            throw std::invalid_argument("AdaptivePolicy: non-finite delta");
    return p;
}

AdaptivePolicy AdaptivePolicy::fixed_phase(int photons, double phi) {
    return offline(RealVector::Zero(photons), phi);
}

void PsoConfig::validate() const {
    if (particles < 2) throw std::invalid_argument("PsoConfig: need at least two particles");
    if (rounds < 1) throw std::invalid_argument("PsoConfig: need at least one round");
    if (inertia < 0.0 || cognitive < 0.0 || social < 0.0)
        throw std::invalid_argument("PsoConfig: weights must be nonnegative");
    if (sample_budget < 1) throw std::invalid_argument("PsoConfig: sample budget must be >= 1");
}

std::pair<TwoModeFockState, double> output_mode_apply(const TwoModeFockState& state, double phi,
                                                      double feedback, int u) {
    if (state.photons < 1) throw std::invalid_argument("output_mode_apply: no photons left");
    if (u != 0 && u != 1) throw std::invalid_argument("output_mode_apply: u must be 0 or 1");
    const int n = state.photons;
    const double theta = 0.5 * (phi - feedback) + 0.5 * M_PI * u;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    Vector out(n);
    for (int j = 0; j < n; ++j) {
        out(j) = s * std::sqrt(j + 1.0) * state.amps(j + 1) +
                 c * std::sqrt(static_cast<double>(n - j)) * state.amps(j);
    }
    const double norm2 = out.squaredNorm();
    return {TwoModeFockState::unnormalized(n - 1, std::move(out)), norm2};
}

double detection_prob(const TwoModeFockState& state, double phi, double feedback, int u) {
    auto [unnorm, norm2] = output_mode_apply(state, phi, feedback, u);
    return norm2 / state.photons;
}

std::pair<PhasePrior, TwoModeFockState> posterior_update(const PhasePrior& prior,
                                                         const TwoModeFockState& state,
                                                         double feedback, int u) {
    prior.validate();
    PhasePrior post = prior;
    for (Eigen::Index i = 0; i < prior.grid.size(); ++i)
        post.weights(i) = prior.weights(i) * detection_prob(state, prior.grid(i), feedback, u);
    post.normalize();
    const double phi_hat = std::arg(circular_moment(post));
    auto [next, norm2] = output_mode_apply(state, phi_hat, feedback, u);
    if (norm2 < 1e-300) throw std::runtime_error("posterior_update: impossible outcome");
    next.amps /= std::sqrt(norm2);
    return {std::move(post), std::move(next)};
}

double sharpness(const PhasePrior& prior) { return std::abs(circular_moment(prior)); }

double holevo_variance(const PhasePrior& prior) {
    const double s = sharpness(prior);
    if (s <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (s * s) - 1.0;
}

AdaptiveEngine::AdaptiveEngine(const TwoModeFockState& input, PhasePrior prior)
    : prior_(std::move(prior)), remaining_(input.photons) {
    prior_.validate();
    states_.resize(input.photons + 1, prior_.grid.size());
    for (Eigen::Index i = 0; i < prior_.grid.size(); ++i) states_.col(i) = input.amps;
}

RealVector AdaptiveEngine::likelihood0(double feedback) const {
    const int n = remaining_;
    const Eigen::Index g = prior_.grid.size();
    RealVector like(g);
    for (Eigen::Index i = 0; i < g; ++i) {
        const double theta = 0.5 * (prior_.grid(i) - feedback);
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        double norm2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const Cplx v = s * std::sqrt(j + 1.0) * states_(j + 1, i) +
                           c * std::sqrt(static_cast<double>(n - j)) * states_(j, i);
            norm2 += std::norm(v);
        }
        like(i) = norm2 / n;
    }
    return like;
}

void AdaptiveEngine::update(double feedback, int u) {
    if (remaining_ < 1) throw std::runtime_error("AdaptiveEngine: photon budget exhausted");
    const int n = remaining_;
    const Eigen::Index g = prior_.grid.size();
    Matrix next(n, g);
    for (Eigen::Index i = 0; i < g; ++i) {
        const double theta = 0.5 * (prior_.grid(i) - feedback) + 0.5 * M_PI * u;
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        double norm2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const Cplx v = s * std::sqrt(j + 1.0) * states_(j + 1, i) +
                           c * std::sqrt(static_cast<double>(n - j)) * states_(j, i);
            next(j, i) = v;
            norm2 += std::norm(v);
        }
        prior_.weights(i) *= norm2 / n;
        if (n > 1 && norm2 > 0.0) next.col(i) /= std::sqrt(norm2);
    }
    prior_.normalize();
    states_ = std::move(next);
    --remaining_;
}

double AdaptiveEngine::online_target(double feedback) const {
    const RealVector like0 = likelihood0(feedback);
    Cplx acc0(0.0, 0.0), acc1(0.0, 0.0);
    for (Eigen::Index i = 0; i < prior_.grid.size(); ++i) {
        const Cplx phase = std::exp(Cplx(0.0, prior_.grid(i)));
        acc0 += prior_.weights(i) * like0(i) * phase;
        acc1 += prior_.weights(i) * (1.0 - like0(i)) * phase;
    }
    return std::abs(acc0) + std::abs(acc1);
}

double AdaptiveEngine::estimate() const { return std::arg(circular_moment(prior_)); }

namespace {

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double online_next_phase(const AdaptiveEngine& engine) {
    auto target = [&](double feedback) { return engine.online_target(feedback); };
    const int scan = 64;
    double best_phi = -M_PI;
    double best_val = -1.0;
    for (int i = 0; i < scan; ++i) {
        const double phi = -M_PI + kTwoPi * i / scan;
        const double v = target(phi);
        if (v > best_val) {
            best_val = v;
            best_phi = phi;
        }
    }
    const double half_cell = M_PI / scan;
    return wrap_phase(
        golden_section_max(target, best_phi - half_cell, best_phi + half_cell, 1e-4));
}

double online_next_phase(const PhasePrior& prior, const TwoModeFockState& state) {
    AdaptiveEngine engine(state, prior);
    return online_next_phase(engine);
}

AdaptiveOutcome simulate_adaptive(const AdaptivePolicy& policy, const TwoModeFockState& input,
                                  double phi_true, std::uint64_t seed, int grid_size) {
    const int n = input.photons;
    if (policy.kind == AdaptivePolicy::Kind::Offline && policy.offline_deltas.size() != n)
        throw std::invalid_argument("simulate_adaptive: one delta per photon required");
    Rng rng(seed);
    AdaptiveEngine engine(input, PhasePrior::uniform(grid_size));
    TwoModeFockState truth = input;

    AdaptiveOutcome out;
    double feedback = policy.phi_1;
    for (int m = 1; m <= n; ++m) {
        if (policy.kind == AdaptivePolicy::Kind::Online) {
            feedback = online_next_phase(engine);
        } else if (m >= 2) {
            const int prev = out.record.outcomes.back();
            feedback = wrap_phase(feedback - (prev == 1 ? -1.0 : 1.0) * policy.offline_deltas(m - 1));
        }
        const double p0 = detection_prob(truth, phi_true, feedback, 0);
        const int u = rng.uniform() < p0 ? 0 : 1;
        auto [next, norm2] = output_mode_apply(truth, phi_true, feedback, u);
        if (norm2 < 1e-300) throw std::runtime_error("simulate_adaptive: impossible outcome");
        next.amps /= std::sqrt(norm2);
        truth = std::move(next);
        engine.update(feedback, u);
        out.record.outcomes.push_back(u);
        out.record.feedback_phases.push_back(feedback);
    }
    out.posterior = engine.posterior();
    out.estimate = engine.estimate();
    out.holevo = holevo_variance(out.posterior);
    return out;
}

double m_off(const RealVector& deltas, const TwoModeFockState& input, int sample_budget,
             std::uint64_t seed, int grid_size, double phi_1) {
    if (sample_budget < 1) throw std::invalid_argument("m_off: sample budget must be >= 1");
    if (deltas.size() != input.photons)
        throw std::invalid_argument("m_off: one delta per photon required");
    Rng rng(seed);
    const PhasePrior prior = PhasePrior::uniform(grid_size);
    double acc = 0.0;
    for (int sample = 0; sample < sample_budget; ++sample) {
        // phi ~ prior, then u | phi: trajectories arrive with probability
        // p(u-vec), so averaging the posterior sharpness estimates M_off.
        const double phi_true = prior.grid(static_cast<Eigen::Index>(rng.below(prior.grid.size())));
        AdaptiveEngine engine(input, prior);
        TwoModeFockState truth = input;
        double feedback = phi_1;
        for (int m = 1; m <= input.photons; ++m) {
            const double p0 = detection_prob(truth, phi_true, feedback, 0);
            const int u = rng.uniform() < p0 ? 0 : 1;
            auto [next, norm2] = output_mode_apply(truth, phi_true, feedback, u);
            if (norm2 > 0.0) next.amps /= std::sqrt(norm2);
            truth = std::move(next);
            engine.update(feedback, u);
            if (m < input.photons)
                feedback = wrap_phase(feedback - (u == 1 ? -1.0 : 1.0) * deltas(m));
        }
        acc += sharpness(engine.posterior());
    }
    return acc / sample_budget;
}

PsoResult pso_offline(const TwoModeFockState& input, const PsoConfig& config) {
    config.validate();
    const int dim = input.photons;
    Rng rng(config.seed);

    std::vector<RealVector> position(config.particles), velocity(config.particles);
    std::vector<RealVector> personal_best(config.particles);
    std::vector<double> personal_value(config.particles,
                                       -std::numeric_limits<double>::infinity());
    for (int i = 0; i < config.particles; ++i) {
        position[i].resize(dim);
        for (int k = 0; k < dim; ++k) position[i](k) = rng.uniform(-M_PI, M_PI);
        velocity[i] = RealVector::Zero(dim);
    }

    PsoResult out;
    out.best_value = -std::numeric_limits<double>::infinity();
    out.history.resize(config.rounds);
    for (int round = 0; round < config.rounds; ++round) {
        for (int i = 0; i < config.particles; ++i) {
            Rng eval_rng = rng.spawn(static_cast<std::uint64_t>(round) * config.particles + i);
            const double value = m_off(position[i], input, config.sample_budget, eval_rng.bits(),
                                       config.grid_size);
            if (value > personal_value[i]) {
                personal_value[i] = value;
                personal_best[i] = position[i];
            }
            if (value > out.best_value) {
                out.best_value = value;
                out.best_deltas = position[i];
            }
        }
        out.history(round) = out.best_value;
        for (int i = 0; i < config.particles; ++i) {
            for (int k = 0; k < dim; ++k) {
                velocity[i](k) = config.inertia * velocity[i](k) +
                                 rng.uniform() * config.cognitive *
                                     (personal_best[i](k) - position[i](k)) +
                                 rng.uniform() * config.social *
                                     (out.best_deltas(k) - position[i](k));
                position[i](k) += velocity[i](k);
            }
        }
    }
    return out;
}

Matrix schwinger_jx(int n) {
    Matrix jx = Matrix::Zero(n + 1, n + 1);
    for (int k = 0; k < n; ++k) {
        const double v = 0.5 * std::sqrt((k + 1.0) * (n - k));
        jx(k + 1, k) += v;  // a^dag b / 2
        jx(k, k + 1) += v;  // a b^dag / 2
    }
    return jx;
}

Matrix schwinger_jy(int n) {
    Matrix jy = Matrix::Zero(n + 1, n + 1);
    for (int k = 0; k < n; ++k) {
        const Cplx v(0.0, 0.5 * std::sqrt((k + 1.0) * (n - k)));
        jy(k + 1, k) -= v;  // (a^dag b - a b^dag) / (2i)
        jy(k, k + 1) += v;
    }
    return jy;
}

TwoModeFockState from_jy_coefficients(const Vector& coeffs) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 0) throw std::invalid_argument("from_jy_coefficients: empty coefficient vector");
    const Matrix rot = expm_hermitian_generator(schwinger_jx(n), -0.5 * M_PI);
    // exp(+i pi/2 Jx) maps the J_z eigenbasis (Fock index k <-> m = k - N/2)
    // onto the J_y eigenbasis with matching eigenvalues.
    return TwoModeFockState(n, rot * coeffs, true);
}

TwoModeFockState berry_wiseman_input(int n) {
    Vector c(n + 1);
    const double norm = std::sqrt(2.0 / (n + 2.0));
    for (int k = 0; k <= n; ++k) c(k) = norm * std::sin((k + 1) * M_PI / (n + 2.0));
    return from_jy_coefficients(c);
}

}  // namespace metrokit::mzi
