#include "sdae/problem.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

#include "sdae/errors.hpp"
#include "sdae/rng.hpp"

namespace sdae {

ProjectorSet projectors_at(const SdaeProblem& p, double t, double rank_tol) {
    if (!p.projector_override) return compute_projectors(p.a, t, rank_tol);

    const auto& ov = *p.projector_override;
    ProjectorSet ps;
    ps.t = t;
    ps.a_pinv = ov.a_pinv(t);
    ps.p = ov.p(t);
    ps.r = ov.r(t);
    ps.q = Matrix::Identity(ps.p.rows(), ps.p.cols()) - ps.p;
    ps.rank = static_cast<Index>(std::llround(ps.p.trace()));
    return ps;
}

Matrix projector_derivative_at(const SdaeProblem& p, double t, double rank_tol) {
    if (!p.projector_override) return projector_derivative(p.a, t, 0.0, rank_tol);

    const auto& pv = p.projector_override->p;
    if (pv.time_constant) return Matrix::Zero(p.d, p.d);
    const double delta = projector_fd_step(t);
    const double t_lo = (t - delta) < 0.0 ? t : t - delta;
    return (pv(t + delta) - pv(t_lo)) / (t + delta - t_lo);
}

CheckResult check_index1(const SdaeProblem& p,
                         const std::vector<double>& sample_times,
                         const std::vector<Vector>& sample_states,
                         double tol) {
    CheckResult res;
    double worst = 0.0;
    for (double t : sample_times) {
        const ProjectorSet ps = projectors_at(p, t);
        for (const Vector& y : sample_states) {
            const Matrix gv = p.g(t, y);
            worst = std::max(worst, (ps.r * gv).norm() / (1.0 + gv.norm()));
        }
    }
    res.value = worst;
    res.pass = worst <= tol;
    return res;
}

CheckResult check_jacobian(const SdaeProblem& p,
                           const std::vector<double>& sample_times,
                           const std::vector<Vector>& sample_states,
                           double tol) {
    CheckResult res;
    double min_abs_det = std::numeric_limits<double>::infinity();
    double max_det = -std::numeric_limits<double>::infinity();
    double min_det = std::numeric_limits<double>::infinity();
    int sign = 0;
    bool sign_flip = false;

    for (double t : sample_times) {
        const ProjectorSet ps = projectors_at(p, t);
        const Matrix a = p.a(t);
        const Matrix b = p.b(t);
        const auto mu = [&](const Vector& y) -> Vector { return b * y + p.f(t, y); };

        for (const Vector& y : sample_states) {
            const double step = 1e-6 * (1.0 + y.norm());
            Matrix mu_y(p.d, p.d);
            Vector probe = y;
            for (Index j = 0; j < p.d; ++j) {
                probe(j) = y(j) + step;
                const Vector hi = mu(probe);
                probe(j) = y(j) - step;
                const Vector lo = mu(probe);
                probe(j) = y(j);
                mu_y.col(j) = (hi - lo) / (2.0 * step);
            }
            const Matrix jac = a + ps.r * mu_y;
            const double det = jac.determinant();
            min_abs_det = std::min(min_abs_det, std::abs(det));
            min_det = std::min(min_det, det);
            max_det = std::max(max_det, det);
            const int s = det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
            if (sign == 0) sign = s;
            if (s != 0 && s != sign) sign_flip = true;
        }
    }

    res.value = min_abs_det;
    res.pass = min_abs_det >= tol && !sign_flip;
    std::ostringstream os;
    os << "det range [" << min_det << ", " << max_det << "]";
    if (sign_flip) os << ", sign flips across samples";
    res.note = os.str();
    return res;
}

CheckResult check_iteration_matrix(const SdaeProblem& p, double h,
                                   const std::vector<double>& sample_times,
                                   double tol) {
    CheckResult res;
    double min_sigma = std::numeric_limits<double>::infinity();
    for (double t : sample_times) {
        const Matrix m = p.a(t) - h * p.b(t);
        Eigen::BDCSVD<Matrix> svd(m);
        min_sigma = std::min(min_sigma, svd.singularValues().minCoeff());
    }
    res.value = min_sigma;
    res.pass = min_sigma >= tol;
    return res;
}

ValidationReport validate(const SdaeProblem& p, const ValidationConfig& cfg) {
    ValidationReport report;
    std::ostringstream notes;

    std::vector<double> times;
    for (int i = 0; i < cfg.n_times; ++i) {
        times.push_back(p.horizon * static_cast<double>(i) /
                        static_cast<double>(cfg.n_times - 1));
    }

    std::vector<Vector> states;
    states.push_back(p.zeta);
    for (int k = 0; k < cfg.n_states; ++k) {
        Vector y = p.zeta;
        for (Index j = 0; j < p.d; ++j) {
            const std::uint64_t counter =
                static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(p.d) +
                static_cast<std::uint64_t>(j);
            y(j) += cfg.state_std * rng::standard_normal(cfg.seed, counter);
        }
        states.push_back(y);
    }

    try {
        const CheckResult r = check_index1(p, times, states, cfg.index1_tol);
        report.index1_ok = r.pass;
        report.index1_residual = r.value;
    } catch (const SdaeError& e) {
        notes << "index1 check aborted: " << e.what() << "; ";
    }

    try {
        const CheckResult r = check_jacobian(p, times, states, cfg.jacobian_tol);
        report.jacobian_ok = r.pass;
        report.jacobian_min_abs_det = r.value;
        notes << r.note << "; ";
    } catch (const SdaeError& e) {
        notes << "jacobian check aborted: " << e.what() << "; ";
    }

    try {
        const CheckResult r =
            check_iteration_matrix(p, cfg.h, times, cfg.iteration_tol);
        report.iteration_matrix_ok = r.pass;
        report.iteration_min_sigma = r.value;
    } catch (const SdaeError& e) {
        notes << "iteration-matrix check aborted: " << e.what() << "; ";
    }

    try {
        if (p.projector_override && p.projector_override->p.time_constant) {
            report.a13_ok = true;
            report.a13_max_p_prime = 0.0;
            notes << "a13: projector override declared time-constant; ";
        } else {
            const MatrixFn& a = p.a;
            const A13Report a13 = check_a13(a, times, cfg.a13_tol, cfg.rank_tol);
            report.a13_ok = a13.pass;
            report.a13_max_p_prime = a13.max_p_prime_norm;
            if (!a13.rank_constant) notes << "rank of A varies over [0, T]; ";
        }
    } catch (const SdaeError& e) {
        notes << "a13 check aborted: " << e.what() << "; ";
    }

    report.notes = notes.str();
    return report;
}

std::string to_string(const ValidationReport& report) {
    std::ostringstream os;
    const auto line = [&os](const char* label, bool ok, double value) {
        os << label << ": " << (ok ? "pass" : "FAIL") << " (" << value << ")\n";
    };
    line("index-1 (max |R g| / (1 + |g|))", report.index1_ok, report.index1_residual);
    line("jacobian (min |det J|)", report.jacobian_ok, report.jacobian_min_abs_det);
    line("iteration matrix (min sigma_min(A - hB))", report.iteration_matrix_ok,
         report.iteration_min_sigma);
    line("projector drift (max |P'|)", report.a13_ok, report.a13_max_p_prime);
    if (!report.notes.empty()) os << "notes: " << report.notes << "\n";
    return os.str();
}

} // namespace sdae
