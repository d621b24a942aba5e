#include "sdae/projectors.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "sdae/errors.hpp"

namespace sdae {

namespace {

void require_finite(const Matrix& m, double t) {
    if (!m.allFinite()) {
        std::ostringstream os;
        os << "matrix has non-finite entries at t = " << t;
        throw NonFiniteMatrix(os.str());
    }
}

} // namespace

ProjectorSet compute_projectors(const MatrixFn& a, double t, double rank_tol) {
    if (!(rank_tol > 0.0)) throw InvalidSpec("rank_tol must be positive");
    const Matrix m = a(t);
    require_finite(m, t);
    if (m.rows() != m.cols()) throw InvalidSpec("mass matrix must be square");
    const Index d = m.rows();

    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    const double cutoff = rank_tol * sigma_max;

    Index rank = 0;
    while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;

    ProjectorSet ps;
    ps.t = t;
    ps.rank = rank;
    if (rank == 0) {
        ps.a_pinv = Matrix::Zero(d, d);
        ps.p = Matrix::Zero(d, d);
        ps.q = Matrix::Identity(d, d);
        ps.r = Matrix::Identity(d, d);
        return ps;
    }

    const auto u = svd.matrixU().leftCols(rank);
    const auto v = svd.matrixV().leftCols(rank);
    ps.a_pinv = v * sigma.head(rank).cwiseInverse().asDiagonal() * u.transpose();
    // Orthogonal projectors built directly from the singular subspaces; this
    // keeps P and I-R symmetric and idempotent to rounding.
    ps.p = v * v.transpose();
    ps.q = Matrix::Identity(d, d) - ps.p;
    ps.r = Matrix::Identity(d, d) - u * u.transpose();
    return ps;
}

double projector_tolerance(const Matrix& a, double rank_tol) {
    Eigen::BDCSVD<Matrix> svd(a);
    const double sigma_max = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    return rank_tol * sigma_max * static_cast<double>(a.rows());
}

double projector_identity_residual(const ProjectorSet& ps, const Matrix& a) {
    const Index d = a.rows();
    const Matrix eye = Matrix::Identity(d, d);
    double worst = (ps.p * ps.p - ps.p).norm();
    worst = std::max(worst, (ps.r * ps.r - ps.r).norm());
    worst = std::max(worst, (ps.r * a).norm());
    worst = std::max(worst, (ps.a_pinv * a - ps.p).norm());
    worst = std::max(worst, (a * ps.a_pinv - (eye - ps.r)).norm());
    worst = std::max(worst, (ps.a_pinv * a * ps.a_pinv - ps.a_pinv).norm());
    worst = std::max(worst, (a * ps.a_pinv * a - a).norm());
    return worst;
}

Matrix projector_derivative(const MatrixFn& a, double t, double fd_step,
                            double rank_tol) {
    const double delta = fd_step > 0.0 ? fd_step : projector_fd_step(t);
    const bool one_sided = (t - delta) < 0.0;
    const double t_lo = one_sided ? t : t - delta;
    const double t_hi = t + delta;

    const ProjectorSet lo = compute_projectors(a, t_lo, rank_tol);
    const ProjectorSet hi = compute_projectors(a, t_hi, rank_tol);
    if (lo.rank != hi.rank) {
        std::ostringstream os;
        os << "rank of A changes from " << lo.rank << " at t = " << t_lo
           << " to " << hi.rank << " at t = " << t_hi;
        throw RankChange(os.str());
    }
    return (hi.p - lo.p) / (t_hi - t_lo);
}

A13Report check_a13(const MatrixFn& a, const std::vector<double>& sample_times,
                    double tol, double rank_tol) {
    A13Report report;
    if (sample_times.empty()) {
        report.notes = "no sample times given";
        return report;
    }

    bool derivative_defined = true;
    for (double t : sample_times) {
        const ProjectorSet ps = compute_projectors(a, t, rank_tol);
        report.ranks.push_back(ps.rank);
        try {
            const Matrix dp = projector_derivative(a, t, 0.0, rank_tol);
            report.max_p_prime_norm = std::max(report.max_p_prime_norm, dp.norm());
        } catch (const RankChange& e) {
            derivative_defined = false;
            report.notes += std::string(e.what()) + "; ";
        }
    }

    report.rank_constant = true;
    for (Index r : report.ranks) {
        if (r != report.ranks.front()) report.rank_constant = false;
    }
    report.pass = derivative_defined && report.rank_constant &&
                  report.max_p_prime_norm <= tol;
    return report;
}

} // namespace sdae
