#include <cstdio>
#include "metrokit/control.hpp"
#include "metrokit/rng.hpp"
using namespace metrokit;
using namespace metrokit::control;
int main() {
    ControlProblem p;
    p.h0 = [](double x) { return Matrix(0.5 * x * pauli_z()); };
    p.dh0 = [](double) { return Matrix(0.5 * pauli_z()); };
    p.x = 1.0;
    p.controls = {pauli_x(), pauli_y(), pauli_z()};
    p.noise_ops = {pauli_z()};
    p.rates = {0.1};
    p.t_total = 5.0;
    p.steps = 40;
    p.v_min = -5; p.v_max = 5;
    Vector plus(2); plus << 1/std::sqrt(2.0), 1/std::sqrt(2.0);
    auto probe = qcore::DensityMatrix::pure(plus);
    double base = terminal_qfi(p, ControlField::zero(p), probe);
    Rng rng(7);
    RealMatrix amps(40, 3);
    for (int t = 0; t < 40; ++t) for (int k = 0; k < 3; ++k) amps(t,k) = rng.uniform(-0.05, 0.05);
    auto res = grape(p, ControlField{amps}, probe, 0.05, 300, GradientMode::Adjoint);
    std::printf("baseline=%.6f grape=%.6f (analytic partial-transversality cap ~ %.6f)\n",
                base, res.qfi_history.back(), 25.0*0.5*std::exp(-1.0));
    return 0;
}
