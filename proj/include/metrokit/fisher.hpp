#pragma once

#include <functional>
#include <vector>

#include "metrokit/linalg.hpp"
#include "metrokit/qcore.hpp"

namespace metrokit::fisher {

/// Outcome probabilities of a parameterized measurement together with their
/// derivatives with respect to the parameter.
struct ProbabilityDistribution {
    RealVector probs;
    RealVector derivs;

    ProbabilityDistribution(RealVector p, RealVector dp, double tol = 1e-9);
};

/// POVM: positive elements summing to the identity.
struct Povm {
    std::vector<Matrix> elements;

    explicit Povm(std::vector<Matrix> elems, double tol = 1e-9);
    int dim() const { return static_cast<int>(elements.front().rows()); }
};

struct SldResult {
    Matrix sld;
    double qfi = 0.0;
    double support_cutoff = 0.0;
};

/// Classical Fisher information sum_i (dp_i)^2 / p_i over supported outcomes.
double cfi(const ProbabilityDistribution& dist);

/// Symmetric logarithmic derivative of the family (rho, d_x rho), solved in
/// the eigenbasis of rho with the fixed-support cutoff, and the QFI
/// Tr(rho L^2).
SldResult sld(const qcore::DensityMatrix& rho, const Matrix& drho);

/// Quantum Fisher information matrix F_jk = Tr(rho {L_j, L_k}) / 2.
RealMatrix qfim(const qcore::DensityMatrix& rho, const std::vector<Matrix>& drho_list);

/// Classical Fisher information of measuring `povm` on the family.
double cfi_povm(const qcore::DensityMatrix& rho, const Matrix& drho, const Povm& povm);

double fidelity(const qcore::DensityMatrix& rho1, const qcore::DensityMatrix& rho2);
double bures_distance(const qcore::DensityMatrix& rho1, const qcore::DensityMatrix& rho2);
double bures_angle(const qcore::DensityMatrix& rho1, const qcore::DensityMatrix& rho2);

using StateFamily = std::function<qcore::DensityMatrix(double)>;

/// QFI from the Bures-distance expansion, 4 D^2(rho_x, rho_{x+dx}) / dx^2,
/// with one Richardson step over (dx, dx/2).
double qfi_from_bures(const StateFamily& family, double x, double dx);

}  // namespace metrokit::fisher
