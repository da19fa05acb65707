#include <doctest.h>

#include <cmath>

#include "metrokit/sdp.hpp"
#include "test_helpers.hpp"

using namespace metrokit;
using namespace metrokit::sdp;
using namespace metrokit::testing;

TEST_SUITE_BEGIN("sdp");

TEST_CASE("solve: min s with [[s,1],[1,s]] >= 0 gives s = 1") {
    // Encoded so the dual variable is s: max -s  s.t.  [[0,1],[1,0]] + s I >= 0.
    SdpProblem p;
    p.block_dims = {2};
    RealMatrix c(2, 2);
    c << 0, 1, 1, 0;
    p.objective = {c};
    p.constraints.push_back({{-RealMatrix::Identity(2, 2)}, -1.0});
    auto sol = solve(p);
    CHECK(sol.status == Status::Optimal);
    CHECK(sol.y(0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sol.gap() <= 1e-8 * (1 + std::abs(sol.primal_value)));
}

TEST_CASE("solve: max Tr(X) under Tr(X) <= 3") {
    SdpProblem p;
    p.sense = Sense::Max;
    p.block_dims = {2, 1};
    p.objective = {RealMatrix::Identity(2, 2), RealMatrix::Zero(1, 1)};
    SdpProblem::Constraint con;
    con.a = {RealMatrix::Identity(2, 2), RealMatrix::Identity(1, 1)};
    con.b = 3.0;
    p.constraints.push_back(con);
    auto sol = solve(p);
    CHECK(sol.status == Status::Optimal);
    CHECK(sol.primal_value == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(std::abs(sol.primal_value - sol.dual_value) <= 1e-7);
}

TEST_CASE("solve: infeasible trace constraint is detected") {
    SdpProblem p;
    p.block_dims = {2};
    p.objective = {RealMatrix::Identity(2, 2)};
    p.constraints.push_back({{RealMatrix::Identity(2, 2)}, -1.0});
    auto sol = solve(p);
    CHECK(sol.status == Status::Infeasible);
}

TEST_CASE("solve is deterministic") {
    Rng rng(3);
    SdpProblem p;
    p.block_dims = {3};
    RealMatrix g = RealMatrix::Random(3, 3);
    p.objective = {RealMatrix(0.5 * (g + g.transpose()))};
    p.constraints.push_back({{RealMatrix::Identity(3, 3)}, 1.0});
    auto a = solve(p);
    auto b = solve(p);
    CHECK(a.iterations == b.iterations);
    CHECK(a.primal_value == b.primal_value);
    CHECK(a.dual_value == b.dual_value);
}

TEST_CASE("trace_norm_sdp: identity and diag(3,-4)") {
    CHECK(trace_norm_sdp(Matrix::Identity(2, 2)) == doctest::Approx(2.0).epsilon(1e-7));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3;
    d(1, 1) = -4;
    CHECK(trace_norm_sdp(d) == doctest::Approx(7.0).epsilon(1e-7));
}

TEST_CASE("trace_norm_sdp matches the singular value sum on random matrices") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix m = random_complex(rng, 4, 4);
        CHECK(std::abs(trace_norm_sdp(m) - trace_norm_svd(m)) < 1e-7 * (1 + trace_norm_svd(m)));
    }
}

TEST_CASE("trace_norm_sdp is unitarily invariant") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix m = random_complex(rng, 3, 3);
        Matrix u = random_unitary(rng, 3);
        Matrix v = random_unitary(rng, 3);
        CHECK(std::abs(trace_norm_sdp(u * m * v) - trace_norm_sdp(m)) < 1e-6);
    }
}

TEST_CASE("complex_embed: real input duplicates the matrix") {
    Rng rng(13);
    Matrix h = random_hermitian(rng, 3);
    Matrix hr = h.real().cast<Cplx>();
    RealMatrix e = complex_embed(hr);
    CHECK((e.topLeftCorner(3, 3) - hr.real()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(e.topRightCorner(3, 3).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("complex_embed: sigma_y embedding and doubled spectrum") {
    RealMatrix e = complex_embed(pauli_y());
    RealMatrix expected(4, 4);
    expected << 0, 0, 0, 1, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 0;
    CHECK((e - expected).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(e);
    RealVector ev = es.eigenvalues();
    CHECK(ev(0) == doctest::Approx(-1.0));
    CHECK(ev(1) == doctest::Approx(-1.0));
    CHECK(ev(2) == doctest::Approx(1.0));
    CHECK(ev(3) == doctest::Approx(1.0));
}

TEST_CASE("complex_embed: identity and non-Hermitian rejection") {
    CHECK((complex_embed(Matrix::Identity(2, 2)) - RealMatrix::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    Matrix bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(complex_embed(bad), std::invalid_argument);
}

TEST_CASE("complex eigenvalue embedding preserves spectra") {
    Rng rng(17);
    Matrix h = random_hermitian(rng, 3);
    Eigen::SelfAdjointEigenSolver<Matrix> es_c(h);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es_r(complex_embed(h));
    for (int i = 0; i < 3; ++i) {
        CHECK(es_r.eigenvalues()(2 * i) == doctest::Approx(es_c.eigenvalues()(i)).epsilon(1e-10));
        CHECK(es_r.eigenvalues()(2 * i + 1) ==
              doctest::Approx(es_c.eigenvalues()(i)).epsilon(1e-10));
    }
}

TEST_CASE("solve_complex: Hermitian trace optimization") {
    // max <H, X> s.t. Tr X = 1, X >= 0 equals the top eigenvalue of H.
    Rng rng(19);
    Matrix h = random_hermitian(rng, 3);
    ComplexSdpProblem p;
    p.sense = Sense::Max;
    p.blocks.push_back({3, true});
    p.objective = {h};
    p.constraints.push_back({{Matrix::Identity(3, 3)}, 1.0});
    auto sol = solve_complex(p);
    CHECK(sol.status == Status::Optimal);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    CHECK(sol.primal_value == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-7));
    CHECK(std::abs(sol.x[0].trace().real() - 1.0) < 1e-7);
    CHECK(min_eigenvalue(sol.x[0]) > -1e-8);
}

TEST_CASE("weak duality holds on solved problems") {
    Rng rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        SdpProblem p;
        p.block_dims = {3};
        RealMatrix g(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g(i, j) = rng.normal();
        p.objective = {RealMatrix(0.5 * (g + g.transpose()))};
        p.constraints.push_back({{RealMatrix::Identity(3, 3)}, 1.0});
        auto sol = solve(p);
        REQUIRE(sol.status == Status::Optimal);
        // min problem: dual lower-bounds primal up to the feasibility slack.
        CHECK(sol.dual_value <= sol.primal_value + 1e-7);
    }
}

TEST_CASE("SdpProblem JSON round trip") {
    SdpProblem p;
    p.sense = Sense::Max;
    p.block_dims = {2, 1};
    p.objective = {RealMatrix::Identity(2, 2), RealMatrix::Zero(1, 1)};
    p.constraints.push_back({{RealMatrix::Identity(2, 2), RealMatrix::Identity(1, 1)}, 3.0});
    auto text = to_json_string(p);
    auto q = problem_from_json_string(text);
    auto a = solve(p);
    auto b = solve(q);
    CHECK(a.primal_value == b.primal_value);
    CHECK(a.iterations == b.iterations);
}

TEST_SUITE_END();
