#include "sdae/integrators.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "sdae/csv.hpp"
#include "sdae/errors.hpp"

namespace sdae {

namespace {

void check_state_guard(const Vector& x) {
    if (!x.allFinite() || x.norm() > kGuardRadius) {
        throw Overflow("state norm exceeds the guard radius " +
                       std::to_string(kGuardRadius));
    }
}

Vector eval_drift(const SdaeProblem& p, double t, const Vector& x) {
    Vector f = p.f(t, x);
    if (!f.allFinite()) throw NonFiniteCoefficient("f returned non-finite values");
    return f;
}

Matrix eval_diffusion(const SdaeProblem& p, double t, const Vector& x) {
    Matrix g = p.g(t, x);
    if (!g.allFinite()) throw NonFiniteCoefficient("g returned non-finite values");
    return g;
}

// Factorizations reused across steps when A and B do not depend on t.
struct PrimaryContext {
    Matrix a;
    Matrix iter;                    // A - h B
    Eigen::PartialPivLU<Matrix> lu;

    PrimaryContext(const SdaeProblem& p, double t, double h) {
        a = p.a(t);
        if (!a.allFinite()) throw NonFiniteMatrix("A(t) has non-finite entries");
        iter = a - h * p.b(t);
        lu.compute(iter);
        if (!(lu.rcond() > kSingularSolveTol)) {
            std::ostringstream os;
            os << "A - hB numerically singular at t = " << t
               << " (rcond = " << lu.rcond() << ")";
            throw SingularIterationMatrix(os.str());
        }
    }

    PrimaryStep step(const SdaeProblem& p, double t, double h, const Vector& x,
                     const Vector& dw) const {
        check_state_guard(x);
        const Vector rhs = a * x + h * eval_drift(p, t, x) +
                           eval_diffusion(p, t, x) * dw;
        PrimaryStep out;
        out.x = lu.solve(rhs);
        out.solve_residual = (iter * out.x - rhs).norm();
        check_state_guard(out.x);
        return out;
    }
};

struct DualContext {
    ProjectorSet ps;
    Matrix p_prime;
    Matrix gain;                       // K = P' + A_pinv B
    Matrix constraint_gain;            // M = -S^{-1} R B
    Matrix system;                     // I - h K (I + M)
    Eigen::PartialPivLU<Matrix> lu_constraint; // S = A + R B
    Eigen::PartialPivLU<Matrix> lu_system;
    Index rank = 0;

    DualContext(const SdaeProblem& p, double t, double h, double rank_tol) {
        ps = projectors_at(p, t, rank_tol);
        rank = ps.rank;
        p_prime = projector_derivative_at(p, t, rank_tol);

        const Matrix a = p.a(t);
        const Matrix b = p.b(t);
        const Matrix rb = ps.r * b;
        const Matrix s = a + rb;
        lu_constraint.compute(s);
        if (!(lu_constraint.rcond() > kSingularSolveTol)) {
            std::ostringstream os;
            os << "A + RB numerically singular at t = " << t
               << " (rcond = " << lu_constraint.rcond() << ")";
            throw SingularConstraintMatrix(os.str());
        }
        constraint_gain = -lu_constraint.solve(rb);
        gain = p_prime + ps.a_pinv * b;

        const Index d = p.d;
        system = Matrix::Identity(d, d) -
                 h * gain * (Matrix::Identity(d, d) + constraint_gain);
        lu_system.compute(system);
        if (!(lu_system.rcond() > kSingularSolveTol)) {
            std::ostringstream os;
            os << "dual u-system numerically singular at t = " << t
               << " (rcond = " << lu_system.rcond() << ")";
            throw SingularIterationMatrix(os.str());
        }
    }

    DualStep step(const SdaeProblem& p, double t, double h,
                  const DualState& prev, const Vector& dw) const {
        const Vector x_prev = prev.u + prev.v;
        check_state_guard(x_prev);

        const Vector f_val = eval_drift(p, t, x_prev);
        const Matrix g_val = eval_diffusion(p, t, x_prev);
        const Vector f_hat = ps.a_pinv * f_val;
        const Vector f_constraint = ps.r * f_val;           // f1 = R f
        const Vector c = -lu_constraint.solve(f_constraint);

        const Vector rhs = prev.u + h * (gain * c) + h * f_hat +
                           ps.a_pinv * (g_val * dw);
        DualStep out;
        out.state.u = lu_system.solve(rhs);
        out.solve_residual = (system * out.state.u - rhs).norm();
        out.state.v = constraint_gain * out.state.u + c;
        check_state_guard(out.state.u + out.state.v);
        return out;
    }
};

bool cacheable_coefficients(const SdaeProblem& p) {
    if (!p.a.time_constant || !p.b.time_constant) return false;
    if (p.projector_override) {
        const auto& ov = *p.projector_override;
        return ov.a_pinv.time_constant && ov.p.time_constant && ov.r.time_constant;
    }
    return true;
}

} // namespace

const char* to_string(Scheme s) {
    return s == Scheme::primary ? "primary" : "dual";
}

PrimaryStep step_primary(const SdaeProblem& p, double t, double h,
                         const Vector& x, const Vector& dw) {
    if (!(h > 0.0)) throw InvalidSpec("step size must be positive");
    return PrimaryContext(p, t, h).step(p, t, h, x, dw);
}

DualStep step_dual(const SdaeProblem& p, double t, double h,
                   const DualState& prev, const Vector& dw, double rank_tol) {
    if (!(h > 0.0)) throw InvalidSpec("step size must be positive");
    return DualContext(p, t, h, rank_tol).step(p, t, h, prev, dw);
}

Trajectory integrate(const SdaeProblem& p, Index n, const BrownianPath& path,
                     Scheme scheme, double rank_tol) {
    if (n < 1) throw InvalidResolution("step count must be at least 1");
    if (path.n_fine % n != 0) {
        throw InvalidResolution("n = " + std::to_string(n) +
                                " does not divide the path resolution " +
                                std::to_string(path.n_fine));
    }
    if (p.zeta.size() != p.d) throw InvalidSpec("zeta has wrong length");

    const Matrix dw = coarsen(path, n);
    const double T = p.horizon;
    const double h = T / static_cast<double>(n);

    Trajectory traj;
    traj.scheme = scheme;
    traj.times.resize(n + 1);
    for (Index i = 0; i <= n; ++i) {
        traj.times(i) = T * static_cast<double>(i) / static_cast<double>(n);
    }
    traj.states.resize(n + 1, p.d);
    traj.states.row(0) = p.zeta;
    traj.solve_residuals.resize(n);

    const bool cache = cacheable_coefficients(p);
    std::ostringstream notes;

    if (scheme == Scheme::primary) {
        std::unique_ptr<PrimaryContext> ctx;
        Vector x = p.zeta;
        for (Index i = 0; i < n; ++i) {
            const double t = traj.times(i);
            try {
                if (!ctx || !cache) ctx = std::make_unique<PrimaryContext>(p, t, h);
                PrimaryStep st = ctx->step(p, t, h, x, dw.row(i).transpose());
                x = std::move(st.x);
                traj.solve_residuals[i] = st.solve_residual;
            } catch (SdaeError& e) {
                e.attach_step(i);
                throw;
            }
            traj.states.row(i + 1) = x;
        }
        if (!p.a.time_constant && !p.projector_override) {
            const Index r0 = compute_projectors(p.a, traj.times(0), rank_tol).rank;
            const Index r1 =
                compute_projectors(p.a, traj.times(n - 1), rank_tol).rank;
            if (r0 != r1) {
                notes << "warning: rank of A changes over the run (" << r0
                      << " -> " << r1 << "); ";
            }
        }
    } else {
        std::unique_ptr<DualContext> ctx;
        DualState state;
        Index prev_rank = -1;
        try {
            ctx = std::make_unique<DualContext>(p, 0.0, h, rank_tol);
            state.u = ctx->ps.p * p.zeta;
            state.v = p.zeta - state.u; // Q(0) zeta
            prev_rank = ctx->rank;

            // Consistency of the initial data with the t = 0 constraint.
            const double res0 =
                (ctx->ps.r * (p.b(0.0) * p.zeta + eval_drift(p, 0.0, p.zeta)))
                    .norm();
            if (res0 > 1e-8 * (1.0 + p.zeta.norm())) {
                notes << "warning: zeta violates the t=0 constraint (residual "
                      << res0 << "); not projected; ";
            }
        } catch (SdaeError& e) {
            e.attach_step(0);
            throw;
        }

        for (Index i = 0; i < n; ++i) {
            const double t = traj.times(i);
            try {
                if (!cache && i > 0) {
                    ctx = std::make_unique<DualContext>(p, t, h, rank_tol);
                    if (ctx->rank != prev_rank) {
                        std::ostringstream os;
                        os << "rank of A changes from " << prev_rank << " to "
                           << ctx->rank << " at t = " << t;
                        throw RankChange(os.str());
                    }
                    prev_rank = ctx->rank;
                }
                DualStep st = ctx->step(p, t, h, state, dw.row(i).transpose());
                state = std::move(st.state);
                traj.solve_residuals[i] = st.solve_residual;
            } catch (SdaeError& e) {
                e.attach_step(i);
                throw;
            }
            traj.states.row(i + 1) = state.u + state.v;
        }
    }

    traj.notes = notes.str();
    return traj;
}

std::vector<double> constraint_residuals(const SdaeProblem& p,
                                         const Trajectory& traj,
                                         double rank_tol) {
    const Index n = traj.steps();
    std::vector<double> out(n);
    const bool cache = p.a.time_constant &&
                       (!p.projector_override ||
                        p.projector_override->r.time_constant);
    Matrix r_cached;
    Matrix b_cached;
    for (Index i = 0; i < n; ++i) {
        const double t = traj.times(i);
        if (i == 0 || !cache) r_cached = projectors_at(p, t, rank_tol).r;
        if (i == 0 || !p.b.time_constant) b_cached = p.b(t);
        const Vector x_i = traj.states.row(i).transpose();
        const Vector x_next = traj.states.row(i + 1).transpose();
        const Vector residual = r_cached * (b_cached * x_next + p.f(t, x_i));
        out[i] = residual.norm() / (1.0 + x_next.norm());
    }
    return out;
}

double max_constraint_residual(const SdaeProblem& p, const Trajectory& traj,
                               double rank_tol) {
    const auto res = constraint_residuals(p, traj, rank_tol);
    return res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
}

void write_trajectory_csv(const Trajectory& traj, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw InvalidSpec("cannot open " + filename + " for writing");
    out << 't';
    for (Index j = 0; j < traj.states.cols(); ++j) out << ",x_" << (j + 1);
    out << '\n';
    for (Index i = 0; i < traj.states.rows(); ++i) {
        out << csv::full(traj.times(i));
        for (Index j = 0; j < traj.states.cols(); ++j) {
            out << ',' << csv::full(traj.states(i, j));
        }
        out << '\n';
    }
}

Trajectory read_trajectory_csv(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw InvalidSpec("cannot open " + filename);
    std::string line;
    if (!std::getline(in, line)) throw InvalidSpec("empty trajectory file");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidSpec("trajectory file has no data rows");
    Trajectory traj;
    const Index d = static_cast<Index>(rows.front().size()) - 1;
    traj.times.resize(rows.size());
    traj.states.resize(rows.size(), d);
    for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
        traj.times(i) = rows[i][0];
        for (Index j = 0; j < d; ++j) traj.states(i, j) = rows[i][j + 1];
    }
    return traj;
}

} // namespace sdae
