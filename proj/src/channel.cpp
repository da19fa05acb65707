#include "metrokit/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "metrokit/rng.hpp"
#include "metrokit/stateopt.hpp"

namespace metrokit::channel {

namespace {

// Channel-level SDPs feed second-difference quotients, so they are solved
// well below the default gap tolerance.
sdp::SdpOptions tight_options() {
    sdp::SdpOptions opt;
    opt.gap_tol = 1e-10;
    opt.feas_tol = 1e-10;
    opt.max_iter = 200;
    return opt;
}

void ensure_quality(double gap, double scale, sdp::Status status, const char* who) {
    if (status == sdp::Status::Infeasible)
        throw sdp::NumericalError(std::string(who) + ": SDP reported infeasible");
    if (gap > 1e-8 * (1.0 + std::abs(scale)))
        throw sdp::NumericalError(std::string(who) + ": SDP did not reach the required accuracy");
}

std::vector<Matrix> padded_kraus(const qcore::KrausChannel& ch, int m) {
    std::vector<Matrix> out = ch.kraus;
    while (static_cast<int>(out.size()) < m)
        out.push_back(Matrix::Zero(ch.dim_out, ch.dim_in));
    return out;
}

Matrix unit_dyad(int dim, int r, int c) {
    Matrix e = Matrix::Zero(dim, dim);
    e(r, c) = 1.0;
    return e;
}

// Hermitian matrices A with <A, rho> = Re Tr(rho N) resp. Im Tr(rho N).
Matrix herm_re(const Matrix& n) { return 0.5 * (n + n.adjoint()); }
Matrix herm_im(const Matrix& n) { return (n - n.adjoint()) / Cplx(0.0, 2.0); }

struct GaugeCoords {
    int m;
    int size() const { return m * m; }

    Matrix unpack(const RealVector& v) const {
        Matrix h = Matrix::Zero(m, m);
        int idx = 0;
        for (int i = 0; i < m; ++i) h(i, i) = v(idx++);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                h(i, j) = Cplx(v(idx), v(idx + 1));
                h(j, i) = std::conj(h(i, j));
                idx += 2;
            }
        return h;
    }
};

stateopt::NelderMeadResult minimize_gauge(const std::function<double(const Matrix&)>& f,
                                          const GaugeCoords& coords, int budget) {
    // A few deterministic polish rounds; each restarts the simplex around the
    // best point with a smaller spread.
    const std::vector<double> spreads = {0.5, 0.05, 0.005};
    RealVector center = RealVector::Zero(coords.size());
    stateopt::NelderMeadResult best;
    best.value = f(coords.unpack(center));
    best.best = center;
    best.iterations = 0;
    const int per_round = std::max(16, budget / static_cast<int>(spreads.size()));
    int used = 0;
    for (double spread : spreads) {
        if (used >= budget) break;
        std::vector<RealVector> simplex;
        simplex.push_back(center);
        for (int i = 0; i < coords.size(); ++i) {
            RealVector p = center;
            p(i) += spread;
            simplex.push_back(p);
        }
        stateopt::NelderMeadConfig cfg;
        cfg.epsilon = 1e-12;
        cfg.max_iter = std::min(per_round, budget - used);
        auto res = stateopt::nelder_mead(
            [&](const RealVector& v) { return f(coords.unpack(v)); }, simplex, cfg);
        used += res.iterations;
        if (res.value < best.value) best = res;
        center = best.best;
    }
    best.iterations = used;
    return best;
}

}  // namespace

void ParameterizedChannel::validate_at(double x, double rel_tol) const {
    const auto ch = evaluator(x);
    const auto dk = derivative(x);
    if (static_cast<int>(dk.size()) != ch.kraus_count())
        throw std::invalid_argument("ParameterizedChannel: derivative count mismatch");
    const double h = 1e-5 * (1.0 + std::abs(x));
    const auto plus = evaluator(x + h);
    const auto minus = evaluator(x - h);
    double scale = 0.0;
    for (const auto& d : dk) scale = std::max(scale, d.cwiseAbs().maxCoeff());
    for (std::size_t j = 0; j < dk.size(); ++j) {
        Matrix fd = (plus.kraus[j] - minus.kraus[j]) / (2.0 * h);
        if ((fd - dk[j]).cwiseAbs().maxCoeff() > std::max(rel_tol * scale, 1e-6))
            throw std::invalid_argument("ParameterizedChannel: derivative does not match evaluator");
    }
    Matrix comp = Matrix::Zero(ch.dim_in, ch.dim_in);
    for (std::size_t j = 0; j < dk.size(); ++j)
        comp += dk[j].adjoint() * ch.kraus[j] + ch.kraus[j].adjoint() * dk[j];
    if (comp.cwiseAbs().maxCoeff() > 1e-8 * (1.0 + scale))
        throw std::invalid_argument("ParameterizedChannel: differentiated completeness violated");
}

GaugeMatrix::GaugeMatrix(Matrix m, double tol) : w(std::move(m)) {
    if (operator_norm(w) > 1.0 + tol)
        throw std::invalid_argument("GaugeMatrix: operator norm exceeds 1");
}

ChannelFidelityResult channel_fidelity(const qcore::KrausChannel& e1,
                                       const qcore::KrausChannel& e2) {
    if (e1.dim_in != e2.dim_in || e1.dim_out != e2.dim_out)
        throw std::invalid_argument("channel_fidelity: dimension mismatch");
    const int m = std::max(e1.kraus_count(), e2.kraus_count());
    const int d = e1.dim_in;
    const auto k1 = padded_kraus(e1, m);
    const auto k2 = padded_kraus(e2, m);

    // LMI variables z = (Re w_ij, Im w_ij, y); solved through the dual of the
    // standard form: max b'z  s.t.  C - sum_k z_k A_k >= 0.
    sdp::ComplexSdpProblem prob;
    prob.sense = sdp::Sense::Min;
    prob.blocks.push_back({2 * m, true});  // [[I, W^dag], [W, I]]
    prob.blocks.push_back({d, true});      // K + K^dag - y I
    prob.objective = {Matrix::Identity(2 * m, 2 * m), Matrix::Zero(d, d)};

    auto add_var = [&](Matrix b_w, Matrix b_k, double obj_coeff) {
        sdp::ComplexSdpProblem::Constraint con;
        con.a = {-b_w, -b_k};
        con.b = obj_coeff;
        prob.constraints.push_back(std::move(con));
    };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const Matrix n = k1[i].adjoint() * k2[j];
            // w_ij sits at (m+i, j) in the W block.
            Matrix bw_re = unit_dyad(2 * m, m + i, j) + unit_dyad(2 * m, j, m + i);
            Matrix bw_im =
                Cplx(0, 1) * (unit_dyad(2 * m, m + i, j) - unit_dyad(2 * m, j, m + i));
            add_var(std::move(bw_re), n + n.adjoint(), 0.0);
            add_var(std::move(bw_im), Cplx(0, 1) * (n - n.adjoint()), 0.0);
        }
    add_var(Matrix::Zero(2 * m, 2 * m), -Matrix::Identity(d, d), 0.5);

    auto sol = sdp::solve_complex(prob, tight_options());
    ensure_quality(sol.gap(), sol.dual_value, sol.status, "channel_fidelity");

    Matrix w(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const int base = 2 * (i * m + j);
            w(i, j) = Cplx(sol.y(base), sol.y(base + 1));
        }
    ChannelFidelityResult out{sol.dual_value, GaugeMatrix(std::move(w)), sol.status};
    return out;
}

double channel_bures_angle(const qcore::KrausChannel& e1, const qcore::KrausChannel& e2) {
    const double f = channel_fidelity(e1, e2).value;
    return std::acos(std::clamp(f, -1.0, 1.0));
}

double channel_qfi_fd(const ParameterizedChannel& pc, double x, double dx) {
    if (!(dx > 0.0)) throw std::invalid_argument("channel_qfi_fd: dx must be positive");
    auto quotient = [&](double h) {
        const double theta = channel_bures_angle(pc.evaluator(x), pc.evaluator(x + h));
        return 4.0 * theta * theta / (h * h);
    };
    const double g1 = quotient(dx);
    const double g2 = quotient(dx / 2.0);
    return 2.0 * g2 - g1;
}

std::pair<Matrix, Matrix> g1_g2(const ParameterizedChannel& pc, double x, const Matrix& gauge) {
    const auto ch = pc.evaluator(x);
    const auto dk = pc.derivative(x);
    const int m = ch.kraus_count();
    if (gauge.rows() != m || gauge.cols() != m)
        throw std::invalid_argument("g1_g2: gauge must be m x m");
    if (!is_hermitian(gauge, 1e-9 * (1.0 + gauge.cwiseAbs().maxCoeff())))
        throw std::invalid_argument("g1_g2: gauge not Hermitian");

    const Cplx mi(0.0, -1.0);
    std::vector<Matrix> dkt(m);
    for (int j = 0; j < m; ++j) {
        dkt[j] = dk[j];
        for (int i = 0; i < m; ++i) dkt[j] += mi * gauge(j, i) * ch.kraus[i];
    }
    Matrix g1 = Matrix::Zero(ch.dim_in, ch.dim_in);
    Matrix g2 = Matrix::Zero(ch.dim_in, ch.dim_in);
    for (int j = 0; j < m; ++j) {
        g1 += dkt[j].adjoint() * dkt[j];
        g2 += Cplx(0, 1) * dkt[j].adjoint() * ch.kraus[j];
    }
    const double scale = 1.0 + g2.cwiseAbs().maxCoeff();
    if ((g2 - g2.adjoint()).cwiseAbs().maxCoeff() > 1e-6 * scale)
        throw std::runtime_error("g1_g2: G2 not Hermitian; inconsistent Kraus derivatives");
    return {hermitize(g1), hermitize(g2)};
}

double cf_bound(const ParameterizedChannel& pc, double x, const qcore::DensityMatrix& rho_in,
                const Matrix& gauge) {
    auto [g1, g2] = g1_g2(pc, x, gauge);
    const int d = static_cast<int>(g1.rows());
    if (rho_in.dim() != d) {
        if (rho_in.dim() % d != 0)
            throw std::invalid_argument("cf_bound: probe dimension incompatible with system");
        const int da = rho_in.dim() / d;
        g1 = kron(g1, Matrix::Identity(da, da));
        g2 = kron(g2, Matrix::Identity(da, da));
    }
    const double m1 = (rho_in.matrix() * g1).trace().real();
    const double m2 = (rho_in.matrix() * g2).trace().real();
    return 4.0 * (m1 - m2 * m2);
}

NUseBound n_use_bound(const ParameterizedChannel& pc, double x, int n_uses,
                      int gauge_search_budget) {
    if (n_uses < 1) throw std::invalid_argument("n_use_bound: N must be >= 1");
    const GaugeCoords coords{pc.kraus_count};
    const double n = n_uses;

    auto bound_of = [&](const Matrix& h) {
        auto [g1, g2] = g1_g2(pc, x, h);
        const double a = operator_norm(g1);
        const double b = operator_norm(g2);
        return 4.0 * (n * a + n * (n - 1.0) * b * (a + b + 1.0));
    };
    auto res = minimize_gauge(bound_of, coords, gauge_search_budget);

    auto g2_norm_of = [&](const Matrix& h) { return operator_norm(g1_g2(pc, x, h).second); };
    auto g2_res = minimize_gauge(g2_norm_of, coords, gauge_search_budget);

    NUseBound out;
    out.value = res.value;
    out.gauge = coords.unpack(res.best);
    out.min_g2_norm = g2_res.value;
    out.sql_flag = g2_res.value < 1e-6;
    out.certified = res.iterations < gauge_search_budget && g2_res.iterations < gauge_search_budget;
    return out;
}

Matrix metrology_matrix(const qcore::DensityMatrix& rho_s, const ParameterizedChannel& pc,
                        double x1, double x2) {
    const auto c1 = pc.evaluator(x1);
    const auto c2 = pc.evaluator(x2);
    const int m = c1.kraus_count();
    if (rho_s.dim() != c1.dim_in)
        throw std::invalid_argument("metrology_matrix: probe dimension mismatch");
    Matrix mm(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            mm(i, j) = (rho_s.matrix() * c1.kraus[i].adjoint() * c2.kraus[j]).trace();
    return mm;
}

namespace {

struct ProbeSolve {
    double trace_norm;
    Matrix rho;
    sdp::Status status;
    double gap;
};

// Orthonormal Hermitian basis of an r-dim block, used to parameterize face
// directions.
std::vector<Matrix> hermitian_basis(int r) {
    std::vector<Matrix> basis;
    for (int k = 0; k < r; ++k) {
        Matrix b = Matrix::Zero(r, r);
        b(k, k) = 1.0;
        basis.push_back(b);
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < r; ++k)
        for (int l = k + 1; l < r; ++l) {
            Matrix b = Matrix::Zero(r, r);
            b(k, l) = s;
            b(l, k) = s;
            basis.push_back(b);
            Matrix c = Matrix::Zero(r, r);
            c(k, l) = Cplx(0, s);
            c(l, k) = Cplx(0, -s);
            basis.push_back(c);
        }
    return basis;
}

// Support basis: eigenvectors with eigenvalues above a relative cutoff.
Matrix support_basis(const Matrix& a, double rel_cutoff) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a));
    const double cut = rel_cutoff * std::max(1e-300, es.eigenvalues().maxCoeff());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > cut) keep.push_back(i);
    Matrix p(a.rows(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) p.col(i) = es.eigenvectors().col(keep[i]);
    return p;
}

// Largest t >= 0 with base + t * dir >= 0 inside the support of base;
// negative return means unbounded.
double step_to_psd_boundary(const Matrix& base, const Matrix& dir, const Matrix& support) {
    if (support.cols() == 0) return -1.0;
    const Matrix br = support.adjoint() * base * support;
    const Matrix dr = support.adjoint() * dir * support;
    Eigen::SelfAdjointEigenSolver<Matrix> es(br);
    RealVector ev = es.eigenvalues().cwiseMax(1e-14 * es.eigenvalues().maxCoeff());
    Matrix isq = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().cast<Cplx>().asDiagonal() *
                 es.eigenvectors().adjoint();
    const double nu = min_eigenvalue(isq * dr * isq);
    if (nu >= -1e-12) return -1.0;
    return -1.0 / nu;
}

// Moves an interior optimal point (z, rho) of the probe SDP along null
// directions of the active constraints until no direction remains, keeping
// exact optimality (the support only shrinks, so complementary slackness
// with the dual solution is preserved). Extreme points of the optimal face
// are pure whenever the channel passes ancilla_free_check.
void refine_to_extreme(Matrix& z, Matrix& rho, const std::vector<Matrix>& az,
                       const std::vector<Matrix>& arho, const Matrix& obj_z, const Matrix& tie) {
    for (int round = 0; round < 24; ++round) {
        const Matrix pz = support_basis(z, 1e-7);
        const Matrix pr = support_basis(rho, 1e-7);
        const int rz = static_cast<int>(pz.cols());
        const int rr = static_cast<int>(pr.cols());
        const auto bz = hermitian_basis(rz);
        const auto br = hermitian_basis(rr);
        const int ncols = rz * rz + rr * rr;
        if (ncols == 0) return;

        const int nrows = static_cast<int>(az.size()) + 1;
        RealMatrix sys(nrows, ncols);
        for (int i = 0; i < nrows; ++i) {
            const Matrix& cz = i < static_cast<int>(az.size()) ? az[i] : obj_z;
            const Matrix* crho = i < static_cast<int>(az.size()) ? &arho[i] : nullptr;
            for (int t = 0; t < rz * rz; ++t)
                sys(i, t) = (cz * pz * bz[t] * pz.adjoint()).trace().real();
            for (int t = 0; t < rr * rr; ++t)
                sys(i, rz * rz + t) =
                    crho ? (*crho * pr * br[t] * pr.adjoint()).trace().real() : 0.0;
        }
        Eigen::JacobiSVD<RealMatrix> svd(sys, Eigen::ComputeFullV);
        const double smax = svd.singularValues().size() ? svd.singularValues().maxCoeff() : 0.0;
        int rank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-8 * (1.0 + smax)) ++rank;
        if (rank >= ncols) return;  // no null direction: extreme point

        // Among kernel directions pick the one moving rho the most (tie
        // oriented), so progress is made on the block that matters.
        RealVector best_dir;
        double best_weight = -1.0;
        for (int k = rank; k < ncols; ++k) {
            RealVector cand = svd.matrixV().col(k);
            Matrix drho = Matrix::Zero(rho.rows(), rho.cols());
            for (int t = 0; t < rr * rr; ++t) drho += cand(rz * rz + t) * pr * br[t] * pr.adjoint();
            const double w = std::abs((tie * drho).trace().real()) + 1e-6 * drho.norm();
            if (w > best_weight) {
                best_weight = w;
                best_dir = cand;
            }
        }
        Matrix dz = Matrix::Zero(z.rows(), z.cols());
        Matrix drho = Matrix::Zero(rho.rows(), rho.cols());
        for (int t = 0; t < rz * rz; ++t) dz += best_dir(t) * pz * bz[t] * pz.adjoint();
        for (int t = 0; t < rr * rr; ++t) drho += best_dir(rz * rz + t) * pr * br[t] * pr.adjoint();
        dz = hermitize(dz);
        drho = hermitize(drho);
        if (dz.norm() + drho.norm() < 1e-12) return;
        if ((tie * drho).trace().real() < 0.0) {
            dz = -dz;
            drho = -drho;
        }

        double t_plus = std::min(step_to_psd_boundary(z, dz, pz),
                                 std::numeric_limits<double>::infinity());
        const double t_rho = step_to_psd_boundary(rho, drho, pr);
        if (t_plus < 0.0 || (t_rho >= 0.0 && t_rho < t_plus)) t_plus = t_rho;
        if (t_plus < 0.0) {  // unbounded forward: try the other orientation
            dz = -dz;
            drho = -drho;
            t_plus = step_to_psd_boundary(z, dz, pz);
            const double t2 = step_to_psd_boundary(rho, drho, pr);
            if (t_plus < 0.0 || (t2 >= 0.0 && t2 < t_plus)) t_plus = t2;
            if (t_plus < 0.0) return;
        }
        z = hermitize(z + t_plus * dz);
        rho = hermitize(rho + t_plus * drho);
    }
}

// min ||M(x1, x2)||_tr over probe states; optionally refines the returned
// state to an extreme point of the optimal face.
ProbeSolve solve_probe_sdp(const ParameterizedChannel& pc, double x1, double x2,
                           bool extract_extreme) {
    const auto c1 = pc.evaluator(x1);
    const auto c2 = pc.evaluator(x2);
    const int m = c1.kraus_count();
    const int d = c1.dim_in;

    // Constraint data shared by the SDP and the face refinement.
    std::vector<Matrix> az, arho;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const Matrix n = c1.kraus[i].adjoint() * c2.kraus[j];
            az.push_back(sdp::pick_real(2 * m, m + i, j));
            arho.push_back(-herm_re(n));
            az.push_back(sdp::pick_imag(2 * m, m + i, j));
            arho.push_back(-herm_im(n));
        }
    az.push_back(Matrix::Zero(2 * m, 2 * m));
    arho.push_back(Matrix::Identity(d, d));
    const Matrix zhalf = 0.5 * Matrix::Identity(2 * m, 2 * m);

    sdp::ComplexSdpProblem prob;
    prob.sense = sdp::Sense::Min;
    prob.blocks.push_back({2 * m, true});  // Z = [[P, M^dag], [M, Q]]
    prob.blocks.push_back({d, true});      // rho_s
    prob.objective = {zhalf, Matrix::Zero(d, d)};
    for (std::size_t i = 0; i < az.size(); ++i) {
        sdp::ComplexSdpProblem::Constraint con;
        con.a = {az[i], arho[i]};
        con.b = i + 1 == az.size() ? 1.0 : 0.0;
        prob.constraints.push_back(std::move(con));
    }

    auto sol = sdp::solve_complex(prob, tight_options());
    ensure_quality(sol.gap(), sol.primal_value, sol.status, "optimal_probe");
    ProbeSolve out{sol.primal_value, sol.x[1], sol.status, sol.gap()};

    if (extract_extreme) {
        Rng rng(0xC0FFEEULL + static_cast<std::uint64_t>(d));
        Matrix tie = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) tie(i, j) = Cplx(rng.normal(), rng.normal());
        tie = hermitize(tie);
        Matrix z = sol.x[0];
        refine_to_extreme(z, out.rho, az, arho, zhalf, tie);
    }
    // Clean tiny asymmetries so the result satisfies state invariants.
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(out.rho));
    RealVector ev = es.eigenvalues().cwiseMax(0.0);
    out.rho = es.eigenvectors() * (ev / ev.sum()).cast<Cplx>().asDiagonal() *
              es.eigenvectors().adjoint();
    return out;
}

}  // namespace

OptimalProbeResult optimal_probe(const ParameterizedChannel& pc, double x, double dx) {
    if (!(dx > 0.0)) throw std::invalid_argument("optimal_probe: dx must be positive");
    auto full = solve_probe_sdp(pc, x, x + dx, true);
    auto half = solve_probe_sdp(pc, x, x + dx / 2.0, false);
    const double f_full = 8.0 * (1.0 - full.trace_norm) / (dx * dx);
    const double f_half = 8.0 * (1.0 - half.trace_norm) / (dx * dx / 4.0);
    OptimalProbeResult out{qcore::DensityMatrix(full.rho), 2.0 * f_half - f_full, full.status};
    return out;
}

bool ancilla_free_check(const ParameterizedChannel& pc, double x1, double x2) {
    const auto c1 = pc.evaluator(x1);
    const auto c2 = pc.evaluator(x2);
    const int m = c1.kraus_count();
    std::vector<Matrix> n;
    n.reserve(m * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) n.push_back(c1.kraus[i].adjoint() * c2.kraus[j]);
    for (std::size_t a = 0; a < n.size(); ++a)
        for (std::size_t b = a + 1; b < n.size(); ++b)
            if ((n[a] * n[b] - n[b] * n[a]).cwiseAbs().maxCoeff() > 1e-10) return false;
    return true;
}

ParameterizedChannel unitary_channel_family(const Matrix& generator) {
    if (!is_hermitian(generator, 1e-9 * (1.0 + generator.cwiseAbs().maxCoeff())))
        throw std::invalid_argument("unitary_channel_family: generator not Hermitian");
    const Matrix h = hermitize(generator);
    ParameterizedChannel pc;
    pc.kraus_count = 1;
    pc.evaluator = [h](double x) {
        return qcore::KrausChannel({expm_hermitian_generator(h, x)});
    };
    pc.derivative = [h](double x) {
        return std::vector<Matrix>{Cplx(0, -1) * h * expm_hermitian_generator(h, x)};
    };
    return pc;
}

ParameterizedChannel dephasing_channel_family(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("dephasing_channel_family: p must lie in [0,1]");
    const Matrix sz = pauli_z();
    ParameterizedChannel pc;
    pc.kraus_count = 2;
    pc.evaluator = [p, sz](double x) {
        const Matrix u = expm_hermitian_generator(sz, x);
        return qcore::KrausChannel({std::sqrt(p) * u, std::sqrt(1.0 - p) * sz * u});
    };
    pc.derivative = [p, sz](double x) {
        const Matrix du = Cplx(0, -1) * sz * expm_hermitian_generator(sz, x);
        return std::vector<Matrix>{std::sqrt(p) * du, std::sqrt(1.0 - p) * sz * du};
    };
    return pc;
}

ParameterizedChannel encoded_channel_family(std::vector<Matrix> noise_kraus, Matrix generator) {
    qcore::KrausChannel check(noise_kraus);  // validates completeness
    const Matrix h = hermitize(generator);
    ParameterizedChannel pc;
    pc.kraus_count = check.kraus_count();
    pc.evaluator = [noise_kraus, h](double x) {
        const Matrix u = expm_hermitian_generator(h, x);
        std::vector<Matrix> ops;
        ops.reserve(noise_kraus.size());
        for (const auto& a : noise_kraus) ops.push_back(a * u);
        return qcore::KrausChannel(std::move(ops));
    };
    pc.derivative = [noise_kraus, h](double x) {
        const Matrix du = Cplx(0, -1) * h * expm_hermitian_generator(h, x);
        std::vector<Matrix> ops;
        ops.reserve(noise_kraus.size());
        for (const auto& a : noise_kraus) ops.push_back(a * du);
        return ops;
    };
    return pc;
}

}  // namespace metrokit::channel
