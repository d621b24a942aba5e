#pragma once

#include <string>
#include <vector>

#include "sdae/brownian.hpp"
#include "sdae/problem.hpp"

namespace sdae {

enum class Scheme { primary, dual };

const char* to_string(Scheme s);

// Iteration matrices with sigma_min / sigma_max below this (estimated via
// the LU reciprocal condition number) are treated as numerically singular.
inline constexpr double kSingularSolveTol = 1e-12;

// Grid states produced by one scheme run: times(i) = i T / n, row i of
// states is X_i, states.row(0) = zeta exactly.
struct Trajectory {
    Vector times;
    Matrix states;                       // (n+1) x d
    Scheme scheme = Scheme::primary;
    std::vector<double> solve_residuals; // one per step
    std::string notes;

    Index steps() const { return states.rows() - 1; }
};

struct PrimaryStep {
    Vector x;
    double solve_residual = 0.0;
};

// One step of the semi-implicit scheme: the linear drift B is implicit, the
// nonlinear drift f and the diffusion g are explicit, so X_{i+1} solves
//   (A(t) - h B(t)) X_{i+1} = A(t) X_i + h f(t, X_i) + g(t, X_i) dw
// with a single dense linear solve.
PrimaryStep step_primary(const SdaeProblem& p, double t, double h,
                         const Vector& x, const Vector& dw);

// Split state of the dual scheme: u lives in the dynamic subspace Im P, v is
// the algebraic component determined by the discrete constraint.
struct DualState {
    Vector u;
    Vector v;
};

struct DualStep {
    DualState state;
    double solve_residual = 0.0;
};

// One step of the projector-split scheme equivalent to step_primary. With
// matrices frozen at t, S = A + R B, M = -S^{-1} R B, c = -S^{-1} R f(t, X_i)
// and K = P'(t) + A_pinv B, the update solves
//   [I - h K (I + M)] u_{i+1} = u_i + h K c + h A_pinv f + A_pinv g dw
// and reconstructs the constraint value v_{i+1} = M u_{i+1} + c.
DualStep step_dual(const SdaeProblem& p, double t, double h,
                   const DualState& prev, const Vector& dw,
                   double rank_tol = kDefaultRankTol);

// Runs n steps on the increments coarsened from path (n must divide
// path.n_fine). Dual-scheme rows hold u_i + v_i. Step errors are rethrown
// with the failing step index attached. Callers are expected to have run
// validate() on the model (or to knowingly skip it); integrate itself only
// enforces the per-step guards.
Trajectory integrate(const SdaeProblem& p, Index n, const BrownianPath& path,
                     Scheme scheme, double rank_tol = kDefaultRankTol);

// Per-step discrete constraint residuals along a primary trajectory:
//   |R(t_i) [B(t_i) X_{i+1} + f(t_i, X_i)]| / (1 + |X_{i+1}|).
// Zero up to solver roundoff whenever the problem is index-1.
std::vector<double> constraint_residuals(const SdaeProblem& p,
                                         const Trajectory& traj,
                                         double rank_tol = kDefaultRankTol);

double max_constraint_residual(const SdaeProblem& p, const Trajectory& traj,
                               double rank_tol = kDefaultRankTol);

// Header t,x_1,...,x_d; one row per grid point, full precision.
void write_trajectory_csv(const Trajectory& traj, const std::string& filename);

Trajectory read_trajectory_csv(const std::string& filename);

} // namespace sdae
