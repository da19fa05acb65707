#include "metrokit/sdp.hpp"
#include <cstdio>

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace metrokit::sdp {

namespace {

using BlockVec = std::vector<RealMatrix>;

double block_dot(const BlockVec& a, const BlockVec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i].array() * b[i].array()).sum();
    return s;
}

// Factor X = L L^T. Falls back to an eigenvalue factor with clipped spectrum
// when the Cholesky of a near-boundary iterate fails; the factor need not be
// triangular for the NT scaling below.
RealMatrix psd_factor(const RealMatrix& x) {
    Eigen::LLT<RealMatrix> llt(x);
    if (llt.info() == Eigen::Success) return RealMatrix(llt.matrixL());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(x);
    const double floor = 1e-14 * std::max(1.0, es.eigenvalues().maxCoeff());
    RealVector ev = es.eigenvalues().cwiseMax(floor).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal();
}

// Largest step alpha with Lambda + alpha * D >= 0, Lambda = diag(lambda) > 0.
double step_to_boundary(const RealVector& lambda, const RealMatrix& d) {
    RealVector inv_sqrt = lambda.cwiseSqrt().cwiseInverse();
    RealMatrix scaled = inv_sqrt.asDiagonal() * d * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (scaled + scaled.transpose()));
    const double nu = es.eigenvalues().minCoeff();
    if (nu >= -1e-16) return 1.0;
    return std::min(1.0, -1.0 / nu);
}

struct Scaling {
    RealMatrix r;
    RealMatrix rinv;
    RealVector lambda;
};

Scaling nt_scaling(const RealMatrix& x, const RealMatrix& s) {
    const RealMatrix l1 = psd_factor(x);
    const RealMatrix l2 = psd_factor(s);
    Eigen::JacobiSVD<RealMatrix> svd(l2.transpose() * l1,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
    RealVector sv = svd.singularValues();
    const double floor = 1e-150;
    for (Eigen::Index i = 0; i < sv.size(); ++i) sv(i) = std::max(sv(i), floor);
    RealVector inv_sqrt = sv.cwiseSqrt().cwiseInverse();
    Scaling sc;
    sc.r = l1 * svd.matrixV() * inv_sqrt.asDiagonal();
    sc.rinv = inv_sqrt.asDiagonal() * svd.matrixU().transpose() * l2.transpose();
    sc.lambda = sv;
    return sc;
}

}  // namespace

void SdpProblem::validate() const {
    if (block_dims.empty()) throw std::invalid_argument("SdpProblem: no blocks");
    if (objective.size() != block_dims.size())
        throw std::invalid_argument("SdpProblem: objective/block mismatch");
    for (std::size_t b = 0; b < block_dims.size(); ++b) {
        if (block_dims[b] < 1) throw std::invalid_argument("SdpProblem: empty block");
        if (objective[b].rows() != block_dims[b] || objective[b].cols() != block_dims[b])
            throw std::invalid_argument("SdpProblem: objective block dim mismatch");
        if ((objective[b] - objective[b].transpose()).cwiseAbs().maxCoeff() >
            1e-9 * (1.0 + objective[b].cwiseAbs().maxCoeff()))
            throw std::invalid_argument("SdpProblem: objective block not symmetric");
    }
    for (const auto& con : constraints) {
        if (con.a.size() != block_dims.size())
            throw std::invalid_argument("SdpProblem: constraint/block mismatch");
        for (std::size_t b = 0; b < block_dims.size(); ++b) {
            if (con.a[b].rows() != block_dims[b] || con.a[b].cols() != block_dims[b])
                throw std::invalid_argument("SdpProblem: constraint block dim mismatch");
            if ((con.a[b] - con.a[b].transpose()).cwiseAbs().maxCoeff() >
                1e-9 * (1.0 + con.a[b].cwiseAbs().maxCoeff()))
                throw std::invalid_argument("SdpProblem: constraint block not symmetric");
        }
    }
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
    problem.validate();
    const double sign = problem.sense == Sense::Min ? 1.0 : -1.0;
    const std::size_t nblk = problem.block_dims.size();
    const int m = static_cast<int>(problem.constraints.size());
    int ntot = 0;
    for (int d : problem.block_dims) ntot += d;

    BlockVec c(nblk);
    for (std::size_t b = 0; b < nblk; ++b)
        c[b] = sign * 0.5 * (problem.objective[b] + problem.objective[b].transpose());

    RealVector bvec(m);
    for (int i = 0; i < m; ++i) bvec(i) = problem.constraints[i].b;
    const double bnorm = m > 0 ? bvec.cwiseAbs().maxCoeff() : 0.0;
    double cnorm = 0.0;
    for (const auto& cb : c) cnorm = std::max(cnorm, cb.cwiseAbs().maxCoeff());

    BlockVec x(nblk), s(nblk);
    for (std::size_t b = 0; b < nblk; ++b) {
        const int d = problem.block_dims[b];
        x[b] = (1.0 + bnorm) * RealMatrix::Identity(d, d);
        s[b] = (1.0 + cnorm) * RealMatrix::Identity(d, d);
    }
    RealVector y = RealVector::Zero(m);

    // Double precision floors the attainable accuracy on ill-conditioned
    // instances; keep the best iterate seen and return it if later steps
    // degrade.
    BlockVec best_x = x, best_s = s;
    RealVector best_y = y;
    double best_score = std::numeric_limits<double>::infinity();

    SdpSolution sol;
    auto finish = [&](Status st, int iters, bool use_best) {
        sol.status = st;
        sol.iterations = iters;
        sol.x = use_best ? best_x : x;
        sol.s = use_best ? best_s : s;
        sol.y = use_best ? best_y : y;
        double pv = 0.0;
        for (std::size_t b = 0; b < nblk; ++b) pv += (c[b].array() * sol.x[b].array()).sum();
        sol.primal_value = sign * pv;
        sol.dual_value = sign * bvec.dot(sol.y);
        return sol;
    };

    for (int iter = 0; iter < options.max_iter; ++iter) {
        RealVector rp(m);
        for (int i = 0; i < m; ++i) {
            double ax = 0.0;
            for (std::size_t b = 0; b < nblk; ++b)
                ax += (problem.constraints[i].a[b].array() * x[b].array()).sum();
            rp(i) = bvec(i) - ax;
        }
        BlockVec rd(nblk);
        for (std::size_t b = 0; b < nblk; ++b) {
            rd[b] = c[b] - s[b];
            for (int i = 0; i < m; ++i) rd[b] -= y(i) * problem.constraints[i].a[b];
        }
        const double mu = block_dot(x, s) / ntot;

        double pobj = 0.0;
        for (std::size_t b = 0; b < nblk; ++b) pobj += (c[b].array() * x[b].array()).sum();
        const double dobj = bvec.dot(y);
        const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
        const double pres = m > 0 ? rp.cwiseAbs().maxCoeff() / (1.0 + bnorm) : 0.0;
        double dres = 0.0;
        for (const auto& r : rd) dres = std::max(dres, r.cwiseAbs().maxCoeff());
        dres /= 1.0 + cnorm;

        if (options.trace)
            std::fprintf(stderr, "sdp iter %3d  mu=%9.2e gap=%9.2e pres=%9.2e dres=%9.2e\n",
                         iter, mu, relgap, pres, dres);
        const double score = std::max({relgap, pres, dres});
        if (score < best_score) {
            best_score = score;
            best_x = x;
            best_s = s;
            best_y = y;
        }
        if (relgap <= options.gap_tol && pres <= options.feas_tol && dres <= options.feas_tol)
            return finish(Status::Optimal, iter, false);
        if (mu <= 0.0) return finish(Status::MaxIter, iter, true);

        // Diverging dual iterates along a certificate ray mean the primal is
        // infeasible: y with sum_i y_i A_i <= 0 and b'y > 0.
        const double ynorm = m > 0 ? y.cwiseAbs().maxCoeff() : 0.0;
        if (ynorm > 1e8 * (1.0 + bnorm)) {
            double ray_obj = bvec.dot(y) / ynorm;
            double ray_psd = 0.0;
            for (std::size_t b = 0; b < nblk; ++b) {
                RealMatrix ay = RealMatrix::Zero(problem.block_dims[b], problem.block_dims[b]);
                for (int i = 0; i < m; ++i) ay += (y(i) / ynorm) * problem.constraints[i].a[b];
                Eigen::SelfAdjointEigenSolver<RealMatrix> es(ay);
                ray_psd = std::max(ray_psd, es.eigenvalues().maxCoeff());
            }
            if (ray_obj > 1e-6 && ray_psd < 1e-6) return finish(Status::Infeasible, iter, false);
        }

        std::vector<Scaling> sc(nblk);
        for (std::size_t b = 0; b < nblk; ++b) sc[b] = nt_scaling(x[b], s[b]);

        // Scaled constraint matrices and dual residual.
        std::vector<BlockVec> abar(m, BlockVec(nblk));
        for (int i = 0; i < m; ++i)
            for (std::size_t b = 0; b < nblk; ++b)
                abar[i][b] = sc[b].r.transpose() * problem.constraints[i].a[b] * sc[b].r;
        BlockVec rdbar(nblk);
        for (std::size_t b = 0; b < nblk; ++b)
            rdbar[b] = sc[b].r.transpose() * rd[b] * sc[b].r;

        RealMatrix schur(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                const double v = block_dot(abar[i], abar[j]);
                schur(i, j) = v;
                schur(j, i) = v;
            }
        Eigen::LLT<RealMatrix> schur_llt;
        Eigen::LDLT<RealMatrix> schur_ldlt;
        bool use_llt = false;
        if (m > 0) {
            schur_llt.compute(schur);
            use_llt = schur_llt.info() == Eigen::Success;
            if (!use_llt) {
                RealMatrix reg = schur;
                reg.diagonal().array() += 1e-13 * (1.0 + schur.trace());
                schur_ldlt.compute(reg);
                if (schur_ldlt.info() != Eigen::Success)
                    throw NumericalError("sdp::solve: Schur complement factorization failed");
            }
        }
        auto schur_solve = [&](const RealVector& rhs) {
            return use_llt ? RealVector(schur_llt.solve(rhs)) : RealVector(schur_ldlt.solve(rhs));
        };

        auto newton = [&](const BlockVec& rc, RealVector& dy, BlockVec& dxbar, BlockVec& dsbar) {
            BlockVec g(nblk);
            for (std::size_t b = 0; b < nblk; ++b) {
                const RealVector& lam = sc[b].lambda;
                g[b] = rc[b];
                for (Eigen::Index p = 0; p < g[b].rows(); ++p)
                    for (Eigen::Index q = 0; q < g[b].cols(); ++q)
                        g[b](p, q) *= 2.0 / (lam(p) + lam(q));
            }
            RealVector rhs(m);
            for (int i = 0; i < m; ++i) {
                double t = 0.0;
                for (std::size_t b = 0; b < nblk; ++b)
                    t += (abar[i][b].array() * (g[b] - rdbar[b]).array()).sum();
                rhs(i) = rp(i) - t;
            }
            if (m > 0) {
                dy = schur_solve(rhs);
                // Iterative refinement; the Schur complement squares the
                // conditioning, and plain solves floor near 1e-8 residuals.
                for (int round = 0; round < 2; ++round) {
                    RealVector resid = rhs - schur * dy;
                    dy += schur_solve(resid);
                }
            } else {
                dy = RealVector();
            }
            dsbar.assign(nblk, RealMatrix());
            dxbar.assign(nblk, RealMatrix());
            for (std::size_t b = 0; b < nblk; ++b) {
                dsbar[b] = rdbar[b];
                for (int i = 0; i < m; ++i) dsbar[b] -= dy(i) * abar[i][b];
                dxbar[b] = g[b] - dsbar[b];
            }
        };

        // Predictor (affine scaling direction).
        BlockVec rc(nblk);
        for (std::size_t b = 0; b < nblk; ++b) {
            RealMatrix lam2 = sc[b].lambda.cwiseProduct(sc[b].lambda).asDiagonal();
            rc[b] = -lam2;
        }
        RealVector dy_aff;
        BlockVec dx_aff, ds_aff;
        newton(rc, dy_aff, dx_aff, ds_aff);

        double ap_aff = 1.0, ad_aff = 1.0;
        for (std::size_t b = 0; b < nblk; ++b) {
            ap_aff = std::min(ap_aff, step_to_boundary(sc[b].lambda, dx_aff[b]));
            ad_aff = std::min(ad_aff, step_to_boundary(sc[b].lambda, ds_aff[b]));
        }
        double mu_aff = 0.0;
        for (std::size_t b = 0; b < nblk; ++b) {
            RealMatrix xa = RealMatrix(sc[b].lambda.asDiagonal()) + ap_aff * dx_aff[b];
            RealMatrix sa = RealMatrix(sc[b].lambda.asDiagonal()) + ad_aff * ds_aff[b];
            mu_aff += (xa.array() * sa.array()).sum();
        }
        mu_aff /= ntot;
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        // Corrector with the Mehrotra second-order term.
        for (std::size_t b = 0; b < nblk; ++b) {
            const int d = problem.block_dims[b];
            RealMatrix cross = 0.5 * (dx_aff[b] * ds_aff[b] + ds_aff[b] * dx_aff[b]);
            RealMatrix lam2 = sc[b].lambda.cwiseProduct(sc[b].lambda).asDiagonal();
            rc[b] = sigma * mu * RealMatrix::Identity(d, d) - lam2 - cross;
        }
        RealVector dy;
        BlockVec dxbar, dsbar;
        newton(rc, dy, dxbar, dsbar);

        double ap = 1.0, ad = 1.0;
        for (std::size_t b = 0; b < nblk; ++b) {
            ap = std::min(ap, step_to_boundary(sc[b].lambda, dxbar[b]));
            ad = std::min(ad, step_to_boundary(sc[b].lambda, dsbar[b]));
        }
        const double tau = 0.99;
        ap = std::min(1.0, tau * ap);
        ad = std::min(1.0, tau * ad);
        if (ap < 1e-10 && ad < 1e-10) return finish(Status::MaxIter, iter, true);

        for (std::size_t b = 0; b < nblk; ++b) {
            RealMatrix dx = sc[b].r * dxbar[b] * sc[b].r.transpose();
            RealMatrix ds = sc[b].rinv.transpose() * dsbar[b] * sc[b].rinv;
            x[b] += ap * 0.5 * (dx + dx.transpose());
            s[b] += ad * 0.5 * (ds + ds.transpose());
        }
        y += ad * dy;
    }
    return finish(Status::MaxIter, options.max_iter, true);
}

RealMatrix complex_embed(const Matrix& hermitian) {
    if (!is_hermitian(hermitian, 1e-9 * (1.0 + hermitian.cwiseAbs().maxCoeff())))
        throw std::invalid_argument("complex_embed: input not Hermitian");
    const Eigen::Index n = hermitian.rows();
    RealMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = hermitian.real();
    out.topRightCorner(n, n) = -hermitian.imag();
    out.bottomLeftCorner(n, n) = hermitian.imag();
    out.bottomRightCorner(n, n) = hermitian.real();
    return 0.5 * (out + out.transpose());
}

Matrix pick_real(int dim, int k, int l) {
    Matrix a = Matrix::Zero(dim, dim);
    if (k == l) {
        a(k, k) = 1.0;
    } else {
        a(k, l) = 0.5;
        a(l, k) = 0.5;
    }
    return a;
}

Matrix pick_imag(int dim, int k, int l) {
    Matrix a = Matrix::Zero(dim, dim);
    if (k == l) return a;
    a(k, l) = Cplx(0.0, 0.5);
    a(l, k) = Cplx(0.0, -0.5);
    return a;
}

ComplexSdpSolution solve_complex(const ComplexSdpProblem& problem, const SdpOptions& options) {
    const std::size_t nblk = problem.blocks.size();
    if (problem.objective.size() != nblk)
        throw std::invalid_argument("solve_complex: objective/block mismatch");

    // Hermitian block of dim n maps to a real block of dim 2n with matrices
    // embed(A)/2, so that real inner products reproduce <A, H> = Tr(A H).
    auto embed_block = [&](const Matrix& a, std::size_t b) -> RealMatrix {
        if (a.rows() != problem.blocks[b].dim || a.cols() != problem.blocks[b].dim)
            throw std::invalid_argument("solve_complex: block matrix dim mismatch");
        if (problem.blocks[b].hermitian) return 0.5 * complex_embed(a);
        if (a.imag().cwiseAbs().maxCoeff() > 1e-12)
            throw std::invalid_argument("solve_complex: real block with complex entries");
        return RealMatrix(0.5 * (a.real() + a.real().transpose()));
    };

    SdpProblem real;
    real.sense = problem.sense;
    for (std::size_t b = 0; b < nblk; ++b)
        real.block_dims.push_back(problem.blocks[b].hermitian ? 2 * problem.blocks[b].dim
                                                              : problem.blocks[b].dim);
    for (std::size_t b = 0; b < nblk; ++b) real.objective.push_back(embed_block(problem.objective[b], b));
    for (const auto& con : problem.constraints) {
        if (con.a.size() != nblk)
            throw std::invalid_argument("solve_complex: constraint/block mismatch");
        SdpProblem::Constraint rc;
        for (std::size_t b = 0; b < nblk; ++b) rc.a.push_back(embed_block(con.a[b], b));
        rc.b = con.b;
        real.constraints.push_back(std::move(rc));
    }

    SdpSolution rs = solve(real, options);
    ComplexSdpSolution out;
    out.primal_value = rs.primal_value;
    out.dual_value = rs.dual_value;
    out.y = rs.y;
    out.status = rs.status;
    out.iterations = rs.iterations;
    for (std::size_t b = 0; b < nblk; ++b) {
        if (!problem.blocks[b].hermitian) {
            out.x.push_back(rs.x[b].cast<Cplx>());
            continue;
        }
        const int n = problem.blocks[b].dim;
        // De-embedding: H = ((Y11 + Y22) + i (Y21 - Y12)) / 2 is Hermitian PSD
        // for any symmetric PSD Y and preserves all inner products used above.
        RealMatrix re = 0.5 * (rs.x[b].topLeftCorner(n, n) + rs.x[b].bottomRightCorner(n, n));
        RealMatrix im = 0.5 * (rs.x[b].bottomLeftCorner(n, n) - rs.x[b].topRightCorner(n, n));
        Matrix h = re.cast<Cplx>() + Cplx(0, 1) * im.cast<Cplx>();
        out.x.push_back(hermitize(h));
    }
    return out;
}

double trace_norm_sdp(const Matrix& m, const SdpOptions& options) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    const int d = rows + cols;

    ComplexSdpProblem prob;
    prob.blocks.push_back({d, true});
    prob.objective.push_back(0.5 * Matrix::Identity(d, d));
    prob.sense = Sense::Min;
    // Pin the lower-left block of [[P, M^dag], [M, Q]] to M; k runs over the
    // M rows placed below the P block.
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            ComplexSdpProblem::Constraint re;
            re.a.push_back(pick_real(d, cols + i, j));
            re.b = m(i, j).real();
            prob.constraints.push_back(std::move(re));
            ComplexSdpProblem::Constraint im;
            im.a.push_back(pick_imag(d, cols + i, j));
            im.b = m(i, j).imag();
            prob.constraints.push_back(std::move(im));
        }
    }
    ComplexSdpSolution sol = solve_complex(prob, options);
    if (sol.status == Status::Infeasible)
        throw NumericalError("trace_norm_sdp: solver reported infeasible");
    return sol.primal_value;
}

std::string to_json_string(const SdpProblem& problem) {
    nlohmann::json j;
    j["sense"] = problem.sense == Sense::Min ? "min" : "max";
    j["block_dims"] = problem.block_dims;
    auto mat = [](const RealMatrix& m) {
        std::vector<std::vector<double>> rows;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            std::vector<double> r;
            for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
            rows.push_back(std::move(r));
        }
        return rows;
    };
    for (const auto& c : problem.objective) j["objective"].push_back(mat(c));
    j["constraints"] = nlohmann::json::array();
    for (const auto& con : problem.constraints) {
        nlohmann::json jc;
        jc["b"] = con.b;
        for (const auto& a : con.a) jc["a"].push_back(mat(a));
        j["constraints"].push_back(std::move(jc));
    }
    return j.dump(2);
}

SdpProblem problem_from_json_string(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SdpProblem p;
    p.sense = j.at("sense").get<std::string>() == "max" ? Sense::Max : Sense::Min;
    p.block_dims = j.at("block_dims").get<std::vector<int>>();
    auto mat = [](const nlohmann::json& rows) {
        const auto r = rows.size();
        const auto c = rows.empty() ? 0 : rows[0].size();
        RealMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t k = 0; k < c; ++k) m(i, k) = rows[i][k].get<double>();
        return m;
    };
    for (const auto& jm : j.at("objective")) p.objective.push_back(mat(jm));
    for (const auto& jc : j.at("constraints")) {
        SdpProblem::Constraint con;
        con.b = jc.at("b").get<double>();
        for (const auto& jm : jc.at("a")) con.a.push_back(mat(jm));
        p.constraints.push_back(std::move(con));
    }
    p.validate();
    return p;
}

}  // namespace metrokit::sdp
