#include <doctest.h>

#include <cmath>

#include "metrokit/channel.hpp"
#include "metrokit/fisher.hpp"
#include "test_helpers.hpp"

using namespace metrokit;
using namespace metrokit::channel;
using namespace metrokit::qcore;
using namespace metrokit::testing;

namespace {

std::vector<Matrix> amplitude_damping(double gamma) {
    Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - gamma);
    k1(0, 1) = std::sqrt(gamma);
    return {k0, k1};
}

// Output family of a parameterized channel for a fixed probe.
double output_qfi(const ParameterizedChannel& pc, double x, const DensityMatrix& probe) {
    const auto ch = pc.evaluator(x);
    const auto dk = pc.derivative(x);
    Matrix rho = Matrix::Zero(ch.dim_out, ch.dim_out);
    Matrix drho = Matrix::Zero(ch.dim_out, ch.dim_out);
    for (int j = 0; j < ch.kraus_count(); ++j) {
        rho += ch.kraus[j] * probe.matrix() * ch.kraus[j].adjoint();
        drho += dk[j] * probe.matrix() * ch.kraus[j].adjoint() +
                ch.kraus[j] * probe.matrix() * dk[j].adjoint();
    }
    return fisher::sld(DensityMatrix(rho), hermitize(drho)).qfi;
}

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("parameterized families validate their derivatives") {
    dephasing_channel_family(0.75).validate_at(0.3);
    unitary_channel_family(pauli_z()).validate_at(-0.2);
    Rng rng(3);
    encoded_channel_family(amplitude_damping(0.3), random_hermitian(rng, 2)).validate_at(0.1);
}

TEST_CASE("channel_fidelity: identical channels have fidelity 1") {
    Rng rng(5);
    auto ch = random_channel(rng, 2, 3);
    auto res = channel_fidelity(ch, ch);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("channel_fidelity: unitary pair gives cos(delta)") {
    const double delta = M_PI / 3.0;
    auto e1 = KrausChannel::identity(2);
    auto e2 = KrausChannel({expm_hermitian_generator(pauli_z(), delta)});
    auto res = channel_fidelity(e1, e2);
    CHECK(res.value == doctest::Approx(std::cos(delta)).epsilon(1e-7));
    CHECK(operator_norm(res.gauge.w) <= 1.0 + 1e-6);
}

TEST_CASE("channel_fidelity: symmetric in its arguments") {
    Rng rng(7);
    auto e1 = random_channel(rng, 2, 2);
    auto e2 = random_channel(rng, 2, 2);
    CHECK(std::abs(channel_fidelity(e1, e2).value - channel_fidelity(e2, e1).value) < 1e-8);
}

TEST_CASE("channel_fidelity: invariant under zero-operator padding") {
    Rng rng(9);
    auto e1 = random_channel(rng, 2, 2);
    auto e2 = random_channel(rng, 2, 3);  // forces padding of e1
    auto direct = channel_fidelity(e1, e2).value;
    std::vector<Matrix> padded = e1.kraus;
    padded.push_back(Matrix::Zero(2, 2));
    auto res = channel_fidelity(KrausChannel(padded), e2);
    CHECK(std::abs(res.value - direct) < 1e-8);
}

TEST_CASE("channel_bures_angle and channel QFI of the unitary family") {
    auto pc = unitary_channel_family(pauli_z());
    CHECK(channel_bures_angle(pc.evaluator(0.2), pc.evaluator(0.2)) ==
          doctest::Approx(0.0).epsilon(1e-4));
    CHECK(channel_qfi_fd(pc, 0.2, default_dx(0.2)) == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("channel_qfi_fd: dephasing golden value 4(2p-1)^2") {
    auto pc = dephasing_channel_family(0.75);
    CHECK(channel_qfi_fd(pc, 0.3, default_dx(0.3)) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("g1_g2: unitary family with zero gauge") {
    auto pc = unitary_channel_family(pauli_z());
    auto [g1, g2] = g1_g2(pc, 0.4, Matrix::Zero(1, 1));
    CHECK((g1 - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g2 + pauli_z()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("g1_g2: G2 Hermitian on random channels, gauge rejected if not Hermitian") {
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        auto ch = random_channel(rng, 2, 2);
        auto pc = encoded_channel_family(ch.kraus, random_hermitian(rng, 2));
        Matrix h = random_hermitian(rng, 2);
        auto [g1, g2] = g1_g2(pc, 0.1, h);
        CHECK((g2 - g2.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(min_eigenvalue(g1) > -1e-10);
    }
    auto pc = unitary_channel_family(pauli_z());
    Matrix bad(1, 1);
    bad << Cplx(0, 1);
    CHECK_THROWS_AS(g1_g2(pc, 0.0, bad), std::invalid_argument);
}

TEST_CASE("cf_bound: unitary family with |+> and |0> probes") {
    auto pc = unitary_channel_family(pauli_z());
    const Matrix zero_gauge = Matrix::Zero(1, 1);
    CHECK(cf_bound(pc, 0.0, DensityMatrix::pure(plus_state()), zero_gauge) ==
          doctest::Approx(4.0).epsilon(1e-12));
    Vector ground = Vector::Zero(2);
    ground(0) = 1;
    CHECK(cf_bound(pc, 0.0, DensityMatrix::pure(ground), zero_gauge) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cf_bound upper-bounds the fixed-probe output QFI") {
    Rng rng(17);
    auto pc = dephasing_channel_family(0.7);
    for (int trial = 0; trial < 5; ++trial) {
        auto probe = random_density(rng, 2);
        const double exact = output_qfi(pc, 0.2, probe);
        CHECK(cf_bound(pc, 0.2, probe, Matrix::Zero(2, 2)) >= exact - 1e-6);
    }
}

TEST_CASE("n_use_bound: unitary channel at N=1 and N=2") {
    auto pc = unitary_channel_family(pauli_z());
    auto b1 = n_use_bound(pc, 0.0, 1, 600);
    CHECK(b1.value == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(!b1.sql_flag);  // G2 cannot vanish for a unitary family
    auto b2 = n_use_bound(pc, 0.0, 2, 600);
    CHECK(b2.value == doctest::Approx(32.0).epsilon(1e-6));
    CHECK(b2.value >= 16.0);
}

TEST_CASE("n_use_bound: dephasing admits a gauge with G2 = 0 (SQL flag)") {
    auto pc = dephasing_channel_family(0.75);
    auto b = n_use_bound(pc, 0.0, 3, 4000);
    CHECK(b.sql_flag);
    CHECK(b.min_g2_norm < 1e-6);
    CHECK(b.value >= channel_qfi_fd(pc, 0.0, default_dx(0.0)) * 3.0 - 1e-3);
}

TEST_CASE("metrology_matrix: identity channel, completeness, linearity") {
    Rng rng(19);
    auto id_family = unitary_channel_family(Matrix::Zero(2, 2));
    auto rho = random_density(rng, 2);
    Matrix m = metrology_matrix(rho, id_family, 0.1, 0.1);
    CHECK(m.rows() == 1);
    CHECK(std::abs(m(0, 0) - Cplx(1, 0)) < 1e-12);

    auto pc = dephasing_channel_family(0.6);
    Matrix m2 = metrology_matrix(rho, pc, 0.2, 0.2);
    CHECK(std::abs(trace_norm_svd(m2) - 1.0) < 1e-10);

    auto pcu = unitary_channel_family(pauli_z());
    CHECK(std::abs(trace_norm_svd(metrology_matrix(rho, pcu, 0.1, 0.4)) -
                   std::abs((rho.matrix() * expm_hermitian_generator(pauli_z(), 0.3)).trace())) <
          1e-12);

    auto r1 = random_density(rng, 2);
    auto r2 = random_density(rng, 2);
    const double a = 0.3;
    Matrix mix = a * r1.matrix() + (1 - a) * r2.matrix();
    Matrix lhs = metrology_matrix(DensityMatrix(mix), pc, 0.1, 0.3);
    Matrix rhs = a * metrology_matrix(r1, pc, 0.1, 0.3) +
                 (1 - a) * metrology_matrix(r2, pc, 0.1, 0.3);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("optimal_probe: unitary family recovers QFI 4 with a pure probe") {
    auto pc = unitary_channel_family(pauli_z());
    auto res = optimal_probe(pc, 0.0, default_dx(0.0));
    CHECK(res.qfi == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(res.rho_s.purity() >= 1.0 - 1e-6);
    // |+>-like: no z component.
    CHECK(std::abs((res.rho_s.matrix() * pauli_z()).trace().real()) < 1e-4);
}

TEST_CASE("optimal_probe: dephasing golden value via the probe SDP") {
    auto pc = dephasing_channel_family(0.75);
    auto res = optimal_probe(pc, 0.3, default_dx(0.3));
    CHECK(res.qfi == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(res.rho_s.purity() >= 1.0 - 1e-6);
}

TEST_CASE("optimal_probe agrees with channel_qfi_fd on random encoded channels") {
    Rng rng(23);
    for (int trial = 0; trial < 3; ++trial) {
        auto noise = random_channel(rng, 2, 2);
        auto pc = encoded_channel_family(noise.kraus, random_hermitian(rng, 2));
        const double f1 = channel_qfi_fd(pc, 0.1, default_dx(0.1));
        const double f2 = optimal_probe(pc, 0.1, default_dx(0.1)).qfi;
        CHECK(std::abs(f1 - f2) <= 1e-3 * (1.0 + std::abs(f1)));
    }
}

TEST_CASE("optimal_probe beats any fixed probe's output QFI") {
    Rng rng(29);
    auto pc = dephasing_channel_family(0.8);
    const double opt = optimal_probe(pc, 0.1, default_dx(0.1)).qfi;
    for (int trial = 0; trial < 5; ++trial) {
        CHECK(opt >= output_qfi(pc, 0.1, random_density(rng, 2)) - 1e-4);
    }
}

TEST_CASE("ancilla_free_check") {
    CHECK(ancilla_free_check(dephasing_channel_family(0.75), 0.1, 0.4));
    CHECK(ancilla_free_check(unitary_channel_family(pauli_z()), 0.0, 1.0));
    Rng rng(31);
    auto pc = encoded_channel_family(amplitude_damping(0.4), pauli_z());
    CHECK(!ancilla_free_check(pc, 0.1, 0.3));
}

TEST_SUITE_END();
