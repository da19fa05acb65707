#include <doctest.h>

#include <cmath>

#include "metrokit/fisher.hpp"
#include "metrokit/qec.hpp"
#include "test_helpers.hpp"

using namespace metrokit;
using namespace metrokit::qec;
using namespace metrokit::testing;

namespace {

bool in_span(const Matrix& a, const LindbladSpan& span, double tol = 1e-10) {
    Matrix res = hermitize(a);
    for (const auto& e : span.basis) res -= (e * hermitize(a)).trace().real() * e;
    return res.cwiseAbs().maxCoeff() < tol;
}

}  // namespace

TEST_SUITE_BEGIN("qec");

TEST_CASE("lindblad_span: sigma_z noise spans {I, sigma_z}") {
    auto span = lindblad_span({pauli_z()});
    CHECK(span.basis.size() == 2);
    CHECK(in_span(Matrix::Identity(2, 2), span));
    CHECK(in_span(pauli_z(), span));
    CHECK(!in_span(pauli_x(), span));
}

TEST_CASE("lindblad_span: sigma_x noise spans {I, sigma_x}") {
    auto span = lindblad_span({pauli_x()});
    CHECK(span.basis.size() == 2);
    CHECK(in_span(pauli_x(), span));
    CHECK(!in_span(pauli_z(), span));
}

TEST_CASE("lindblad_span: no noise spans {I}") {
    auto span = lindblad_span({});
    CHECK(span.basis.size() == 1);
}

TEST_CASE("lindblad_span basis is orthonormal and closed under reprojection") {
    Rng rng(3);
    std::vector<Matrix> ops = {random_complex(rng, 3, 3), random_complex(rng, 3, 3)};
    auto span = lindblad_span(ops);
    for (std::size_t a = 0; a < span.basis.size(); ++a)
        for (std::size_t b = 0; b < span.basis.size(); ++b) {
            const double dot = (span.basis[a] * span.basis[b]).trace().real();
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-10);
        }
    // Generators themselves reproject exactly.
    for (const auto& g : ops) {
        CHECK(in_span(hermitize(g), span));
        CHECK(in_span(Matrix((g - g.adjoint()) / Cplx(0, 2)), span));
        CHECK(in_span(hermitize(g.adjoint() * g), span));
    }
}

TEST_CASE("hnls_decompose: sigma_z signal under sigma_z vs sigma_x noise") {
    auto span_z = lindblad_span({pauli_z()});
    auto rep_z = hnls_decompose(pauli_z(), span_z);
    CHECK(!rep_z.hnls);
    CHECK(rep_z.h_perp.cwiseAbs().maxCoeff() < 1e-10);

    auto span_x = lindblad_span({pauli_x()});
    auto rep_x = hnls_decompose(pauli_z(), span_x);
    CHECK(rep_x.hnls);
    CHECK((rep_x.h_perp - pauli_z()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((rep_x.h_parallel + rep_x.h_perp - pauli_z()).cwiseAbs().maxCoeff() < 1e-10);

    // Identity is always inside the span.
    auto rep_i = hnls_decompose(Matrix::Identity(2, 2), span_x);
    CHECK(!rep_i.hnls);
}

TEST_CASE("hnls_decompose is idempotent and orthogonal to the span") {
    Rng rng(7);
    std::vector<Matrix> ops = {random_complex(rng, 3, 3)};
    auto span = lindblad_span(ops);
    Matrix h = random_hermitian(rng, 3);
    auto rep = hnls_decompose(h, span);
    for (const auto& e : span.basis)
        CHECK(std::abs((e * rep.h_perp).trace().real()) < 1e-10);
    auto rep2 = hnls_decompose(rep.h_perp, span);
    CHECK((rep2.h_perp - rep.h_perp).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("build_code: sigma_z gives |0>|0_A>, |1>|1_A>") {
    auto code = build_code(pauli_z());
    CHECK(code.system_dim == 2);
    CHECK(code.ancilla_dim == 2);
    CHECK(std::abs(std::abs(code.c0(0)) - 1.0) < 1e-12);  // |0>|0_A>
    CHECK(std::abs(std::abs(code.c1(3)) - 1.0) < 1e-12);  // |1>|1_A>
    CHECK(std::abs(code.c0.dot(code.c1)) < 1e-12);
}

TEST_CASE("build_code: rank structure of a traceless qutrit observable") {
    Matrix h = Matrix::Zero(3, 3);
    h(0, 0) = 2;
    h(1, 1) = 1;
    h(2, 2) = -3;
    auto code = build_code(h / 3.0);
    CHECK(code.ancilla_dim == 3);  // rank(rho0)=2 plus rank(rho1)=1, disjoint sectors
    CHECK(std::abs(code.c0.norm() - 1.0) < 1e-12);
    CHECK(std::abs(code.c1.norm() - 1.0) < 1e-12);
    CHECK(std::abs(code.c0.dot(code.c1)) < 1e-12);
    // Reduced ancilla supports are orthogonal by construction.
    Matrix ra0 = Matrix::Zero(3, 3), ra1 = Matrix::Zero(3, 3);
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                ra0(a, b) += code.c0(s * 3 + a) * std::conj(code.c0(s * 3 + b));
                ra1(a, b) += code.c1(s * 3 + a) * std::conj(code.c1(s * 3 + b));
            }
    CHECK((ra0 * ra1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("build_code rejects a vanishing perpendicular part") {
    CHECK_THROWS_AS(build_code(Matrix::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("verify_code: sigma_z signal with sigma_x noise passes all conditions") {
    auto span = lindblad_span({pauli_x()});
    auto rep = hnls_decompose(pauli_z(), span);
    auto code = build_code(rep.h_perp);
    auto report = verify_code(code, {pauli_x()}, pauli_z());
    CHECK(report.cond_noise_linear);
    CHECK(report.cond_noise_quadratic);
    CHECK(report.cond_signal);
    CHECK(report.gap == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(report.lambdas[0]) < 1e-10);
    CHECK(std::abs(report.mus(0, 0) - Cplx(1, 0)) < 1e-10);
}

TEST_CASE("verify_code: a code inside a degenerate eigenspace fails the signal condition") {
    // G acts identically on both codewords.
    Matrix g = Matrix::Zero(4, 4);
    g(0, 0) = g(1, 1) = 1.0;
    g(2, 2) = g(3, 3) = -1.0;
    CodePair code;
    code.system_dim = 2;
    code.ancilla_dim = 2;
    code.c0 = Vector::Zero(4);
    code.c0(0) = 1.0;  // |0>|0>
    code.c1 = Vector::Zero(4);
    code.c1(1) = 1.0;  // |0>|1>
    // Lift of sz acts as +1 on both codewords -> no signal.
    auto report = verify_code(code, {}, pauli_z());
    CHECK(!report.cond_signal);
    CHECK(report.gap < 1e-10);
}

TEST_CASE("verify_code: mu matrix is Hermitian on random noise") {
    Rng rng(13);
    std::vector<Matrix> noise = {random_complex(rng, 2, 2), random_complex(rng, 2, 2)};
    auto code = build_code(pauli_z());
    auto report = verify_code(code, noise, pauli_z());
    CHECK((report.mus - report.mus.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("optimize_code_gap: sigma_z signal with sigma_x noise") {
    auto span = lindblad_span({pauli_x()});
    auto rep = hnls_decompose(pauli_z(), span);
    auto res = optimize_code_gap(rep.h_perp, span);
    CHECK(res.dual_value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(res.primal_value == doctest::Approx(2.0).epsilon(1e-7));
    auto code = build_code(rep.h_perp);
    auto report = verify_code(code, {pauli_x()}, pauli_z());
    CHECK(res.primal_value >= report.gap - 1e-6);

    // Operator-norm reading for comparison: value 4, no strong duality with
    // the printed dual.
    auto opnorm = optimize_code_gap(rep.h_perp, span, true);
    CHECK(opnorm.primal_value == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("optimize_code_gap: zero H_perp gives zero gap") {
    auto span = lindblad_span({pauli_z()});
    auto res = optimize_code_gap(Matrix::Zero(2, 2), span);
    CHECK(std::abs(res.primal_value) < 1e-7);
    CHECK(std::abs(res.dual_value) < 1e-7);
}

TEST_CASE("optimize_code_gap: primal equals twice the dual on random qutrit instances") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Matrix> noise = {random_complex(rng, 3, 3)};
        auto span = lindblad_span(noise);
        Matrix h = random_hermitian(rng, 3);
        auto rep = hnls_decompose(h, span);
        if (!rep.hnls) continue;
        auto res = optimize_code_gap(rep.h_perp, span);
        CHECK(std::abs(res.primal_value - 2.0 * res.dual_value) <
              1e-6 * (1.0 + std::abs(res.primal_value)));
        auto code = build_code(rep.h_perp);
        auto report = verify_code(code, noise, h);
        CHECK(res.primal_value >= report.gap - 1e-6);
        // The optimizer is feasible: orthogonal to the span, trace norm <= 2.
        for (const auto& e : span.basis)
            CHECK(std::abs((e * res.c_tilde).trace().real()) < 1e-6);
        CHECK(trace_norm_svd(res.c_tilde) <= 2.0 + 1e-6);
    }
}

TEST_CASE("effective_qfi") {
    CHECK(effective_qfi(2.0, 1.0) == doctest::Approx(4.0));
    CHECK(effective_qfi(0.0, 3.0) == doctest::Approx(0.0));
    CHECK(effective_qfi(1.5, 2.0) == doctest::Approx(4.0 * effective_qfi(1.5, 1.0)));
    CHECK_THROWS_AS(effective_qfi(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("effective_qfi matches the SLD QFI of the code-space evolution") {
    auto span = lindblad_span({pauli_x()});
    auto rep = hnls_decompose(pauli_z(), span);
    auto code = build_code(rep.h_perp);
    auto report = verify_code(code, {pauli_x()}, pauli_z());

    // Evolve the paired probe under H_eff = x G_eff in the 2-dim code basis.
    const double t = 0.8;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(report.g_eff));
    Vector probe = (es.eigenvectors().col(0) + es.eigenvectors().col(1)) / std::sqrt(2.0);
    Matrix rho = probe * probe.adjoint();
    const Cplx mi(0, -1);
    Matrix drho = mi * t * (report.g_eff * rho - rho * report.g_eff);
    const double f = fisher::sld(qcore::DensityMatrix(rho), drho).qfi;
    CHECK(f == doctest::Approx(effective_qfi(report.gap, t)).epsilon(1e-8));
}

TEST_SUITE_END();
