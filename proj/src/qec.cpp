#include "metrokit/qec.hpp"

#include <cmath>
#include <stdexcept>

namespace metrokit::qec {

namespace {

double herm_dot(const Matrix& a, const Matrix& b) { return (a * b).trace().real(); }

void orthonormal_insert(std::vector<Matrix>& basis, Matrix candidate) {
    for (int pass = 0; pass < 2; ++pass)  // twice for numerical orthogonality
        for (const auto& e : basis) candidate -= herm_dot(e, candidate) * e;
    const double norm = std::sqrt(herm_dot(candidate, candidate));
    if (norm > 1e-10) basis.push_back(candidate / norm);
}

Matrix lift(const Matrix& a, int ancilla_dim) {
    return kron(a, Matrix::Identity(ancilla_dim, ancilla_dim));
}

}  // namespace

LindbladSpan lindblad_span(const std::vector<Matrix>& lindblad_ops) {
    if (lindblad_ops.empty()) {
        LindbladSpan out;
        out.basis.push_back(Matrix::Identity(1, 1));
        return out;
    }
    const Eigen::Index d = lindblad_ops.front().rows();
    for (const auto& g : lindblad_ops)
        if (g.rows() != d || g.cols() != d)
            throw std::invalid_argument("lindblad_span: operators must be square, equal dims");

    std::vector<Matrix> ops;
    ops.push_back(Matrix::Identity(d, d));
    for (const auto& g : lindblad_ops) {
        ops.push_back(g);
        ops.push_back(g.adjoint());
    }
    for (const auto& gj : lindblad_ops)
        for (const auto& gl : lindblad_ops) ops.push_back(gj.adjoint() * gl);

    LindbladSpan span;
    for (const auto& op : ops) {
        // Hermitian and anti-Hermitian parts enter separately; the trace
        // inner product is declared on Hermitian matrices.
        orthonormal_insert(span.basis, hermitize(op));
        orthonormal_insert(span.basis, Matrix((op - op.adjoint()) / Cplx(0, 2)));
    }
    return span;
}

HnlsReport hnls_decompose(const Matrix& hamiltonian, const LindbladSpan& span) {
    if (!is_hermitian(hamiltonian, 1e-9 * (1.0 + hamiltonian.cwiseAbs().maxCoeff())))
        throw std::invalid_argument("hnls_decompose: Hamiltonian not Hermitian");
    if (span.dim() != hamiltonian.rows())
        throw std::invalid_argument("hnls_decompose: span dimension mismatch");
    const Matrix h = hermitize(hamiltonian);
    Matrix par = Matrix::Zero(h.rows(), h.cols());
    for (const auto& e : span.basis) par += herm_dot(e, h) * e;
    HnlsReport rep;
    rep.h_parallel = par;
    rep.h_perp = h - par;
    rep.perp_norm = std::sqrt(herm_dot(rep.h_perp, rep.h_perp));
    rep.hnls = rep.perp_norm > 1e-9;
    return rep;
}

CodePair build_code(const Matrix& h_perp) {
    const Eigen::Index d = h_perp.rows();
    if (h_perp.cwiseAbs().maxCoeff() < 1e-12)
        throw std::invalid_argument("build_code: H_perp vanishes; no code available");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h_perp));

    std::vector<std::pair<double, Eigen::Index>> pos, neg;
    const double cut = 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < d; ++i) {
        if (es.eigenvalues()(i) > cut) pos.push_back({es.eigenvalues()(i), i});
        if (es.eigenvalues()(i) < -cut) neg.push_back({-es.eigenvalues()(i), i});
    }
    if (pos.empty() || neg.empty())
        throw std::invalid_argument("build_code: H_perp must be traceless with both signs");

    double tp = 0.0, tn = 0.0;
    for (auto& [v, i] : pos) tp += v;
    for (auto& [v, i] : neg) tn += v;

    // Purifications with disjoint ancilla sectors so the reduced ancilla
    // supports are orthogonal.
    const int r0 = static_cast<int>(pos.size());
    const int r1 = static_cast<int>(neg.size());
    const int da = r0 + r1;
    Vector c0 = Vector::Zero(d * da), c1 = Vector::Zero(d * da);
    for (int a = 0; a < r0; ++a) {
        const double p = pos[a].first / tp;
        for (Eigen::Index s = 0; s < d; ++s)
            c0(s * da + a) = std::sqrt(p) * es.eigenvectors()(s, pos[a].second);
    }
    for (int a = 0; a < r1; ++a) {
        const double p = neg[a].first / tn;
        for (Eigen::Index s = 0; s < d; ++s)
            c1(s * da + r0 + a) = std::sqrt(p) * es.eigenvectors()(s, neg[a].second);
    }
    return {c0, c1, static_cast<int>(d), da};
}

CodeReport verify_code(const CodePair& code, const std::vector<Matrix>& lindblad_ops,
                       const Matrix& generator, double tol) {
    const int d = code.system_dim, da = code.ancilla_dim;
    if (code.c0.size() != d * da || code.c1.size() != d * da)
        throw std::invalid_argument("verify_code: codeword dimensions inconsistent");
    if (std::abs(code.c0.norm() - 1.0) > 1e-9 || std::abs(code.c1.norm() - 1.0) > 1e-9 ||
        std::abs(code.c0.dot(code.c1)) > 1e-9)
        throw std::invalid_argument("verify_code: codewords must be orthonormal");

    auto sandwich = [&](const Matrix& op) {
        Matrix lifted = lift(op, da);
        Matrix out(2, 2);
        out(0, 0) = code.c0.adjoint() * lifted * code.c0;
        out(0, 1) = code.c0.adjoint() * lifted * code.c1;
        out(1, 0) = code.c1.adjoint() * lifted * code.c0;
        out(1, 1) = code.c1.adjoint() * lifted * code.c1;
        return out;
    };
    auto proportional_residual = [&](const Matrix& two_by_two) {
        const Cplx mean = 0.5 * (two_by_two(0, 0) + two_by_two(1, 1));
        return (two_by_two - mean * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff();
    };

    CodeReport rep;
    rep.cond_noise_linear = true;
    rep.cond_noise_quadratic = true;
    const int m = static_cast<int>(lindblad_ops.size());
    rep.mus = Matrix::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        Matrix blk = sandwich(lindblad_ops[j]);
        rep.lambdas.push_back(0.5 * (blk(0, 0) + blk(1, 1)));
        if (proportional_residual(blk) > tol) rep.cond_noise_linear = false;
    }
    for (int j = 0; j < m; ++j)
        for (int l = 0; l < m; ++l) {
            Matrix blk = sandwich(Matrix(lindblad_ops[j].adjoint() * lindblad_ops[l]));
            rep.mus(j, l) = 0.5 * (blk(0, 0) + blk(1, 1));
            if (proportional_residual(blk) > tol) rep.cond_noise_quadratic = false;
        }

    rep.g_eff = sandwich(generator);
    rep.cond_signal = proportional_residual(rep.g_eff) > tol;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(rep.g_eff));
    rep.gap = es.eigenvalues()(1) - es.eigenvalues()(0);
    return rep;
}

CodeGapResult optimize_code_gap(const Matrix& h_perp, const LindbladSpan& span,
                                bool use_operator_norm) {
    const int d = static_cast<int>(h_perp.rows());
    const int ns = static_cast<int>(span.basis.size());

    // Dual: min s s.t. [[sI, H1], [H1, sI]] >= 0 with H1 = H_perp + sum nu E.
    // Encoded through the solver's dual form with variables (s, nu).
    sdp::ComplexSdpProblem dual;
    dual.sense = sdp::Sense::Min;
    dual.blocks.push_back({2 * d, true});
    Matrix c0 = Matrix::Zero(2 * d, 2 * d);
    c0.topRightCorner(d, d) = hermitize(h_perp);
    c0.bottomLeftCorner(d, d) = hermitize(h_perp);
    dual.objective = {c0};
    {
        sdp::ComplexSdpProblem::Constraint s_var;
        s_var.a = {-Matrix::Identity(2 * d, 2 * d)};
        s_var.b = -1.0;  // maximize -s
        dual.constraints.push_back(std::move(s_var));
        for (const auto& e : span.basis) {
            Matrix be = Matrix::Zero(2 * d, 2 * d);
            be.topRightCorner(d, d) = e;
            be.bottomLeftCorner(d, d) = e;
            sdp::ComplexSdpProblem::Constraint nu_var;
            nu_var.a = {-be};
            nu_var.b = 0.0;
            dual.constraints.push_back(std::move(nu_var));
        }
    }
    auto dual_sol = sdp::solve_complex(dual);
    if (dual_sol.status == sdp::Status::Infeasible)
        throw sdp::NumericalError("optimize_code_gap: dual SDP infeasible");
    const double dual_value = dual_sol.y(0);

    // Primal: max Tr(C~ H_perp) over the chosen norm ball, orthogonal to S.
    sdp::ComplexSdpProblem primal;
    primal.sense = sdp::Sense::Max;
    CodeGapResult out;
    if (!use_operator_norm) {
        // C~ = Cp - Cm, Tr(Cp) + Tr(Cm) + slack = 2.
        primal.blocks.push_back({d, true});
        primal.blocks.push_back({d, true});
        primal.blocks.push_back({1, false});
        primal.objective = {hermitize(h_perp), -hermitize(h_perp), Matrix::Zero(1, 1)};
        sdp::ComplexSdpProblem::Constraint ball;
        ball.a = {Matrix::Identity(d, d), Matrix::Identity(d, d), Matrix::Identity(1, 1)};
        ball.b = 2.0;
        primal.constraints.push_back(std::move(ball));
        for (const auto& e : span.basis) {
            sdp::ComplexSdpProblem::Constraint orth;
            orth.a = {e, -e, Matrix::Zero(1, 1)};
            orth.b = 0.0;
            primal.constraints.push_back(std::move(orth));
        }
        auto sol = sdp::solve_complex(primal);
        if (sol.status == sdp::Status::Infeasible)
            throw sdp::NumericalError("optimize_code_gap: primal SDP infeasible");
        out.primal_value = sol.primal_value;
        out.c_tilde = hermitize(sol.x[0] - sol.x[1]);
        out.status = sol.status;
    } else {
        // -2I <= C~ <= 2I via U = 2I - C~ >= 0, V = 2I + C~ >= 0, U + V = 4I.
        primal.blocks.push_back({d, true});
        primal.blocks.push_back({d, true});
        primal.objective = {-0.5 * hermitize(h_perp), 0.5 * hermitize(h_perp)};
        for (int k = 0; k < d; ++k)
            for (int l = k; l < d; ++l) {
                sdp::ComplexSdpProblem::Constraint re;
                re.a = {sdp::pick_real(d, k, l), sdp::pick_real(d, k, l)};
                re.b = k == l ? 4.0 : 0.0;
                primal.constraints.push_back(std::move(re));
                if (k != l) {
                    sdp::ComplexSdpProblem::Constraint im;
                    im.a = {sdp::pick_imag(d, k, l), sdp::pick_imag(d, k, l)};
                    im.b = 0.0;
                    primal.constraints.push_back(std::move(im));
                }
            }
        for (const auto& e : span.basis) {
            sdp::ComplexSdpProblem::Constraint orth;
            orth.a = {-0.5 * e, 0.5 * e};
            orth.b = 0.0;
            primal.constraints.push_back(std::move(orth));
        }
        auto sol = sdp::solve_complex(primal);
        if (sol.status == sdp::Status::Infeasible)
            throw sdp::NumericalError("optimize_code_gap: primal SDP infeasible");
        out.primal_value = sol.primal_value;
        out.c_tilde = hermitize(0.5 * (sol.x[1] - sol.x[0]));
        out.status = sol.status;
    }
    out.dual_value = dual_value;
    return out;
}

double effective_qfi(double gap, double t) {
    if (gap < 0.0) throw std::invalid_argument("effective_qfi: negative gap");
    return t * t * gap * gap;
}

}  // namespace metrokit::qec
