#include <doctest.h>

#include <cmath>

#include "metrokit/fisher.hpp"
#include "test_helpers.hpp"

using namespace metrokit;
using namespace metrokit::fisher;
using namespace metrokit::qcore;
using namespace metrokit::testing;

namespace {

Matrix commutator_drho(const Matrix& h, const Matrix& rho) {
    const Cplx mi(0.0, -1.0);
    return mi * (h * rho - rho * h);
}

// Unitary orbit of a fixed state: rho(x) = e^{-ixH} rho0 e^{ixH}.
StateFamily unitary_family(const Matrix& h, const Matrix& rho0) {
    return [h, rho0](double x) {
        Matrix u = expm_hermitian_generator(h, x);
        return DensityMatrix(u * rho0 * u.adjoint());
    };
}

}  // namespace

TEST_SUITE_BEGIN("fisher");

TEST_CASE("cfi: binomial family") {
    const double x = 0.25;
    RealVector p(2), dp(2);
    p << x, 1 - x;
    dp << 1, -1;
    CHECK(cfi(ProbabilityDistribution(p, dp)) == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("cfi: zero derivative gives zero information") {
    RealVector p(3), dp(3);
    p << 0.2, 0.3, 0.5;
    dp << 0, 0, 0;
    CHECK(cfi(ProbabilityDistribution(p, dp)) == 0.0);
}

TEST_CASE("cfi: cos^2/sin^2 family has unit information") {
    const double x = M_PI / 3.0;
    RealVector p(2), dp(2);
    p << std::cos(x / 2) * std::cos(x / 2), std::sin(x / 2) * std::sin(x / 2);
    dp << -0.5 * std::sin(x), 0.5 * std::sin(x);
    CHECK(cfi(ProbabilityDistribution(p, dp)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cfi: singular outcome is an error") {
    RealVector p(2), dp(2);
    p << 1.0, 0.0;
    dp << -1, 1;
    CHECK_THROWS_AS(cfi(ProbabilityDistribution(p, dp)), std::runtime_error);
}

TEST_CASE("sld: diagonal family closed form") {
    const double x = 0.25;
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = x;
    rho(1, 1) = 1 - x;
    Matrix drho = Matrix::Zero(2, 2);
    drho(0, 0) = 1;
    drho(1, 1) = -1;
    auto res = sld(DensityMatrix(rho), drho);
    CHECK(res.sld(0, 0).real() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(res.sld(1, 1).real() == doctest::Approx(-4.0 / 3.0).epsilon(1e-12));
    CHECK(res.qfi == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("sld: pure rotating qubit has QFI 4") {
    Matrix rho = plus_state() * plus_state().adjoint();
    auto res = sld(DensityMatrix(rho), commutator_drho(pauli_z(), rho));
    CHECK(res.qfi == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("sld: zero derivative") {
    Rng rng(1);
    auto rho = random_density(rng, 3);
    auto res = sld(rho, Matrix::Zero(3, 3));
    CHECK(res.qfi == 0.0);
    CHECK(res.sld.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sld: derivative outside the support is rejected") {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    // Moves weight into the unsupported level.
    Matrix drho = Matrix::Zero(2, 2);
    drho(0, 0) = -1;
    drho(1, 1) = 1;
    CHECK_THROWS_AS(sld(DensityMatrix(rho), drho), std::runtime_error);
}

TEST_CASE("qfim: single parameter reduces to the QFI") {
    Rng rng(5);
    auto rho = random_density(rng, 3);
    Matrix h = random_hermitian(rng, 3);
    Matrix drho = commutator_drho(h, rho.matrix());
    auto f = qfim(rho, {drho});
    CHECK(f(0, 0) == doctest::Approx(sld(rho, drho).qfi).epsilon(1e-12));
}

TEST_CASE("qfim: commuting diagonal families reproduce the trinomial Fisher matrix") {
    const double x = 0.2, y = 0.3;
    Matrix rho = Matrix::Zero(3, 3);
    rho(0, 0) = x;
    rho(1, 1) = y;
    rho(2, 2) = 1 - x - y;
    Matrix dx = Matrix::Zero(3, 3), dy = Matrix::Zero(3, 3);
    dx(0, 0) = 1;
    dx(2, 2) = -1;
    dy(1, 1) = 1;
    dy(2, 2) = -1;
    auto f = qfim(DensityMatrix(rho), {dx, dy});
    const double z = 1 - x - y;
    CHECK(f(0, 0) == doctest::Approx(1 / x + 1 / z).epsilon(1e-10));
    CHECK(f(1, 1) == doctest::Approx(1 / y + 1 / z).epsilon(1e-10));
    CHECK(f(0, 1) == doctest::Approx(1 / z).epsilon(1e-10));
}

TEST_CASE("qfim: orthogonal rotations of |0> give diag(4,4)") {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    auto f = qfim(DensityMatrix(rho),
                  {commutator_drho(pauli_x(), rho), commutator_drho(pauli_y(), rho)});
    CHECK(f(0, 0) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(f(1, 1) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(std::abs(f(0, 1)) < 1e-10);
}

TEST_CASE("cfi_povm: SLD eigenbasis attains the QFI") {
    Rng rng(9);
    auto rho = random_density(rng, 2);
    Matrix drho = commutator_drho(random_hermitian(rng, 2), rho.matrix());
    auto res = sld(rho, drho);
    Eigen::SelfAdjointEigenSolver<Matrix> es(res.sld);
    std::vector<Matrix> proj;
    for (int i = 0; i < 2; ++i)
        proj.push_back(es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint());
    CHECK(cfi_povm(rho, drho, Povm(proj)) == doctest::Approx(res.qfi).epsilon(1e-8));
}

TEST_CASE("cfi_povm: trivial POVM carries no information") {
    Rng rng(13);
    auto rho = random_density(rng, 2);
    Matrix drho = commutator_drho(pauli_z(), rho.matrix());
    CHECK(cfi_povm(rho, drho, Povm({Matrix::Identity(2, 2)})) == 0.0);
}

TEST_CASE("cfi_povm: random POVMs stay below the QFI") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto rho = random_density(rng, 2);
        Matrix drho = commutator_drho(random_hermitian(rng, 2), rho.matrix());
        const double qfi = sld(rho, drho).qfi;

        std::vector<Matrix> raw;
        Matrix sum = Matrix::Zero(2, 2);
        for (int i = 0; i < 4; ++i) {
            Matrix g = random_complex(rng, 2, 2);
            raw.push_back(g * g.adjoint());
            sum += raw.back();
        }
        Matrix isq = sum.inverse();
        Matrix s = sqrt_psd(sum);
        Matrix sinv = s.inverse();
        std::vector<Matrix> elems;
        for (auto& e : raw) elems.push_back(hermitize(sinv * e * sinv));
        const double c = cfi_povm(rho, drho, Povm(elems));
        CHECK(c >= -1e-12);
        CHECK(c <= qfi + 1e-8);
    }
}

TEST_CASE("fidelity and Bures metrics") {
    Rng rng(21);
    auto rho = random_density(rng, 3);
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(bures_distance(rho, rho) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(bures_angle(rho, rho) == doctest::Approx(0.0).epsilon(1e-5));

    Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
    e0(0) = 1;
    e1(1) = 1;
    auto r0 = DensityMatrix::pure(e0), r1 = DensityMatrix::pure(e1);
    CHECK(fidelity(r0, r1) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(bures_distance(r0, r1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(bures_angle(r0, r1) == doctest::Approx(M_PI / 2).epsilon(1e-10));

    CHECK(fidelity(r0, DensityMatrix::maximally_mixed(2)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("fidelity symmetry and identity of indiscernibles") {
    Rng rng(25);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = random_density(rng, 3);
        auto b = random_density(rng, 3);
        CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) < 1e-10);
        CHECK(fidelity(a, b) < 1.0 - 1e-6);  // distinct random states
    }
}

TEST_CASE("qfi_from_bures: pure rotating qubit") {
    Matrix rho0 = plus_state() * plus_state().adjoint();
    auto family = unitary_family(pauli_z(), rho0);
    CHECK(qfi_from_bures(family, 0.1, 1e-3) == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("qfi_from_bures: constant family") {
    Rng rng(29);
    auto rho = random_density(rng, 2);
    StateFamily family = [rho](double) { return rho; };
    CHECK(std::abs(qfi_from_bures(family, 0.0, 1e-3)) < 1e-6);
}

TEST_CASE("qfi_from_bures: dephased rotating qubit matches the Bloch formula") {
    const double p = 0.75;
    StateFamily family = [p](double x) {
        Matrix u = expm_hermitian_generator(pauli_z(), x);
        Matrix rho0 = plus_state() * plus_state().adjoint();
        Matrix rot = u * rho0 * u.adjoint();
        return DensityMatrix(p * rot + (1 - p) * pauli_z() * rot * pauli_z());
    };
    const double expected = 4.0 * (2 * p - 1) * (2 * p - 1);
    CHECK(qfi_from_bures(family, 0.2, 1e-3) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("qfi_from_bures agrees with the SLD QFI on random full-rank families") {
    Rng rng(33);
    for (int trial = 0; trial < 12; ++trial) {
        const int d = trial % 2 == 0 ? 2 : 3;
        auto rho0 = random_density(rng, d, 0.05);
        Matrix h = random_hermitian(rng, d);
        auto family = unitary_family(h, rho0.matrix());
        const double x = rng.uniform(-1.0, 1.0);
        Matrix drho = commutator_drho(h, family(x).matrix());
        const double exact = sld(family(x), drho).qfi;
        const double fd = qfi_from_bures(family, x, 1e-3);
        if (exact > 1e-6) CHECK(std::abs(fd - exact) / exact < 1e-3);
    }
}

TEST_CASE("qfi_from_bures detects a rank change") {
    // Family loses rank at x just beyond the base point.
    StateFamily family = [](double x) {
        Matrix rho = Matrix::Zero(2, 2);
        const double w = std::max(0.0, 0.5 - 400.0 * x);
        rho(0, 0) = 1 - w;
        rho(1, 1) = w;
        return DensityMatrix(rho);
    };
    CHECK_THROWS_AS(qfi_from_bures(family, 0.0, 1e-2), std::runtime_error);
}

TEST_CASE("QFI convexity under mixing of families with a shared generator") {
    Rng rng(37);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix h = random_hermitian(rng, 2);
        auto r1 = random_density(rng, 2);
        auto r2 = random_density(rng, 2);
        for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            Matrix mix = a * r1.matrix() + (1 - a) * r2.matrix();
            const double fmix = sld(DensityMatrix(mix), commutator_drho(h, mix)).qfi;
            const double f1 = sld(r1, commutator_drho(h, r1.matrix())).qfi;
            const double f2 = sld(r2, commutator_drho(h, r2.matrix())).qfi;
            CHECK(fmix <= a * f1 + (1 - a) * f2 + 1e-8);
        }
    }
}

TEST_SUITE_END();
