#include "metrokit/fisher.hpp"

#include <cmath>
#include <stdexcept>

namespace metrokit::fisher {

namespace {

constexpr double kOutcomeCutoff = 1e-12;

}  // namespace

ProbabilityDistribution::ProbabilityDistribution(RealVector p, RealVector dp, double tol)
    : probs(std::move(p)), derivs(std::move(dp)) {
    if (probs.size() != derivs.size())
        throw std::invalid_argument("ProbabilityDistribution: size mismatch");
    if (probs.minCoeff() < -tol)
        throw std::invalid_argument("ProbabilityDistribution: negative probability");
    if (std::abs(probs.sum() - 1.0) > 1e-8)
        throw std::invalid_argument("ProbabilityDistribution: probabilities must sum to 1");
    if (std::abs(derivs.sum()) > 1e-8)
        throw std::invalid_argument("ProbabilityDistribution: derivatives must sum to 0");
}

Povm::Povm(std::vector<Matrix> elems, double tol) : elements(std::move(elems)) {
    if (elements.empty()) throw std::invalid_argument("Povm: no elements");
    const Eigen::Index d = elements.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& e : elements) {
        if (e.rows() != d || e.cols() != d)
            throw std::invalid_argument("Povm: inconsistent element dims");
        if (min_eigenvalue(e) < -tol) throw std::invalid_argument("Povm: element not PSD");
        sum += e;
    }
    if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("Povm: elements do not sum to identity");
}

double cfi(const ProbabilityDistribution& dist) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < dist.probs.size(); ++i) {
        const double p = dist.probs(i);
        const double dp = dist.derivs(i);
        if (p > kOutcomeCutoff) {
            total += dp * dp / p;
        } else if (std::abs(dp) > kOutcomeCutoff) {
            throw std::runtime_error("cfi: singular Fisher information (p = 0, dp != 0)");
        }
    }
    return total;
}

SldResult sld(const qcore::DensityMatrix& rho, const Matrix& drho) {
    const int d = rho.dim();
    if (drho.rows() != d || drho.cols() != d)
        throw std::invalid_argument("sld: dimension mismatch");
    const double scale = 1.0 + drho.cwiseAbs().maxCoeff();
    if (!is_hermitian(drho, 1e-9 * scale))
        throw std::invalid_argument("sld: drho not Hermitian");
    if (std::abs(drho.trace().real()) > 1e-8 * scale)
        throw std::invalid_argument("sld: drho not traceless");

    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    const RealVector lambda = es.eigenvalues().cwiseMax(0.0);
    const Matrix& v = es.eigenvectors();
    const double cutoff = 1e-12 * lambda.maxCoeff();
    const Matrix d_eig = v.adjoint() * hermitize(drho) * v;

    Matrix l_eig = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            const double denom = lambda(a) + lambda(b);
            if (denom > cutoff) {
                l_eig(a, b) = 2.0 * d_eig(a, b) / denom;
            } else if (std::abs(d_eig(a, b)) > 1e-8) {
                throw std::runtime_error("sld: drho has support outside the state support");
            }
        }
    }
    SldResult out;
    out.sld = hermitize(v * l_eig * v.adjoint());
    out.support_cutoff = cutoff;
    out.qfi = (rho.matrix() * out.sld * out.sld).trace().real();
    if (out.qfi < 0.0 && out.qfi > -1e-12) out.qfi = 0.0;
    return out;
}

RealMatrix qfim(const qcore::DensityMatrix& rho, const std::vector<Matrix>& drho_list) {
    const int n = static_cast<int>(drho_list.size());
    std::vector<Matrix> slds;
    slds.reserve(n);
    for (const auto& drho : drho_list) slds.push_back(sld(rho, drho).sld);
    RealMatrix f(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            f(j, k) = 0.5 * (rho.matrix() * (slds[j] * slds[k] + slds[k] * slds[j]))
                                .trace()
                                .real();
    return 0.5 * (f + f.transpose());
}

double cfi_povm(const qcore::DensityMatrix& rho, const Matrix& drho, const Povm& povm) {
    if (povm.dim() != rho.dim()) throw std::invalid_argument("cfi_povm: dimension mismatch");
    const int n = static_cast<int>(povm.elements.size());
    RealVector p(n), dp(n);
    for (int i = 0; i < n; ++i) {
        p(i) = std::max(0.0, (rho.matrix() * povm.elements[i]).trace().real());
        dp(i) = (drho * povm.elements[i]).trace().real();
    }
    return cfi(ProbabilityDistribution(p, dp));
}

double fidelity(const qcore::DensityMatrix& rho1, const qcore::DensityMatrix& rho2) {
    if (rho1.dim() != rho2.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    // Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)) = || sqrt(rho1) sqrt(rho2) ||_tr;
    // the singular-value route keeps full accuracy for rank-deficient states.
    const Matrix s1 = sqrt_psd(rho1.matrix(), 1e-12);
    const Matrix s2 = sqrt_psd(rho2.matrix(), 1e-12);
    return trace_norm_svd(s1 * s2);
}

double bures_distance(const qcore::DensityMatrix& rho1, const qcore::DensityMatrix& rho2) {
    const double f = std::min(1.0, fidelity(rho1, rho2));
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * f));
}

double bures_angle(const qcore::DensityMatrix& rho1, const qcore::DensityMatrix& rho2) {
    const double f = std::min(1.0, std::max(-1.0, fidelity(rho1, rho2)));
    return std::acos(f);
}

double qfi_from_bures(const StateFamily& family, double x, double dx) {
    if (!(dx > 0.0)) throw std::invalid_argument("qfi_from_bures: dx must be positive");
    const qcore::DensityMatrix base = family(x);

    auto supported = [](const qcore::DensityMatrix& rho) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
        const double cutoff = 1e-12 * es.eigenvalues().maxCoeff();
        int count = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            if (es.eigenvalues()(i) > cutoff) ++count;
        return count;
    };
    const int rank0 = supported(base);

    auto estimate = [&](double h) {
        const qcore::DensityMatrix shifted = family(x + h);
        if (supported(shifted) != rank0)
            throw std::runtime_error("qfi_from_bures: rank change across the step");
        const double d = bures_distance(base, shifted);
        return 4.0 * d * d / (h * h);
    };
    // One Richardson step removes the leading O(dx) error of the one-sided
    // difference.
    const double g1 = estimate(dx);
    const double g2 = estimate(dx / 2.0);
    return 2.0 * g2 - g1;
}

}  // namespace metrokit::fisher
