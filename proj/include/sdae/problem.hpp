#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdae/matrix_fn.hpp"
#include "sdae/projectors.hpp"

namespace sdae {

using DriftFn = std::function<Vector(double, const Vector&)>;      // f(t, Y)
using DiffusionFn = std::function<Matrix(double, const Vector&)>;  // g(t, Y), d x d1

// States whose norm exceeds this abort a run with Overflow. The model
// coefficients are only locally Lipschitz, so a diverging path must be cut
// off rather than fed back into f and g.
inline constexpr double kGuardRadius = 1e8;

// User-supplied (A_pinv, P, R) replacing the computed Moore-Penrose set, for
// models that need a non-orthogonal projector choice.
struct ProjectorOverride {
    MatrixFn a_pinv;
    MatrixFn p;
    MatrixFn r;
};

// One SDAE instance:
//   A(t) dY = [B(t) Y + f(t, Y)] dt + g(t, Y) dW,   Y(0) = zeta,  t in [0, T],
// with A(t) allowed to be singular. The linear drift B is stored separately
// from f because the scheme treats B implicitly and f explicitly; models are
// responsible for registering a (B, f) split that keeps A - hB invertible.
struct SdaeProblem {
    Index d = 0;          // state dimension
    Index d1 = 0;         // noise dimension
    double horizon = 1.0; // T
    MatrixFn a;
    MatrixFn b;
    DriftFn f;
    DiffusionFn g;
    Vector zeta;
    std::optional<ProjectorOverride> projector_override;
    std::string name;
    std::string notes;
};

// Projectors at time t, honoring the model override when present.
ProjectorSet projectors_at(const SdaeProblem& p, double t,
                           double rank_tol = kDefaultRankTol);

// P'(t) for the dual scheme; zero when an override is in effect and its P is
// declared time-constant.
Matrix projector_derivative_at(const SdaeProblem& p, double t,
                               double rank_tol = kDefaultRankTol);

struct CheckResult {
    bool pass = false;
    double value = 0.0; // worst residual, min |det|, or min sigma_min
    std::string note;
};

// Index-1 structure: the noise must not reach the constraint rows, i.e.
// R(t) g(t, Y) = 0. Reports max over samples of |R g|_F / (1 + |g|_F).
CheckResult check_index1(const SdaeProblem& p,
                         const std::vector<double>& sample_times,
                         const std::vector<Vector>& sample_states,
                         double tol);

// Constraint Jacobian J(t,Y) = A(t) + R(t) dmu/dY with mu = B Y + f. Passes
// when |det J| stays above tol and the sign of det never flips across the
// samples. dmu/dY is a central finite difference with step 1e-6 (1 + |Y|).
CheckResult check_jacobian(const SdaeProblem& p,
                           const std::vector<double>& sample_times,
                           const std::vector<Vector>& sample_states,
                           double tol);

// Smallest singular value of the iteration matrix A(t) - h B(t) over the
// sample times.
CheckResult check_iteration_matrix(const SdaeProblem& p, double h,
                                   const std::vector<double>& sample_times,
                                   double tol);

struct ValidationConfig {
    int n_times = 11;          // equispaced on [0, T]
    int n_states = 20;         // Gaussian perturbations of zeta
    double state_std = 1.0;
    std::uint64_t seed = 0x5dae;
    double h = 1.0 / 256.0;    // step for the iteration-matrix check
    double index1_tol = 1e-8;
    double jacobian_tol = 1e-8;
    double iteration_tol = 1e-8;
    double a13_tol = 1e-6;
    double rank_tol = kDefaultRankTol;
};

struct ValidationReport {
    bool index1_ok = false;
    double index1_residual = 0.0;
    bool jacobian_ok = false;
    double jacobian_min_abs_det = 0.0;
    bool iteration_matrix_ok = false;
    double iteration_min_sigma = 0.0;
    bool a13_ok = false;
    double a13_max_p_prime = 0.0;
    std::string notes;

    bool all_ok() const {
        return index1_ok && jacobian_ok && iteration_matrix_ok && a13_ok;
    }
};

// Runs the three structural checks plus the A1.3 diagnostic on a default
// sample set. Never throws on finite inputs; failures land in the report.
ValidationReport validate(const SdaeProblem& p,
                          const ValidationConfig& cfg = {});

std::string to_string(const ValidationReport& report);

} // namespace sdae
