#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sdae/matrix_fn.hpp"

namespace sdae {

// Moore-Penrose pseudo-inverse of a possibly singular mass matrix A(t) plus
// the three projectors the schemes need:
//   p = a_pinv * A     (onto the dynamic subspace, i.e. the row space of A)
//   q = I - p          (onto Ker A)
//   r = I - A * a_pinv (along Im A; extracts the algebraic constraints)
struct ProjectorSet {
    double t = 0.0;
    Matrix a_pinv;
    Matrix p;
    Matrix q;
    Matrix r;
    Index rank = 0;
};

inline constexpr double kDefaultRankTol = 1e-10;

// Numerical-rank cutoff and pseudo-inverse via SVD. Singular values at or
// below rank_tol * sigma_max are treated as zero.
// Throws NonFiniteMatrix if a(t) has non-finite entries.
ProjectorSet compute_projectors(const MatrixFn& a, double t,
                                double rank_tol = kDefaultRankTol);

// Frobenius-norm residuals of the defining identities, each of which must
// stay below rank_tol * sigma_max(A) * d for a valid ProjectorSet:
//   P*P - P, R*R - R, R*A, A_pinv*A - P, A*A_pinv - (I - R),
//   A_pinv*A*A_pinv - A_pinv, A*A_pinv*A - A.
double projector_identity_residual(const ProjectorSet& ps, const Matrix& a);

// Tolerance the residual above is measured against.
double projector_tolerance(const Matrix& a, double rank_tol = kDefaultRankTol);

// Central finite difference (P(t+delta) - P(t-delta)) / (2 delta); one-sided
// at t = 0 where model time starts. Throws RankChange when the rank of A
// differs between the two evaluation points (the derivative is undefined
// across a rank change).
Matrix projector_derivative(const MatrixFn& a, double t,
                            double fd_step = 0.0,
                            double rank_tol = kDefaultRankTol);

// Default step used by projector_derivative when fd_step <= 0.
inline double projector_fd_step(double t) {
    return 1e-6 * (std::abs(t) > 1.0 ? std::abs(t) : 1.0);
}

// Diagnostic for the structural assumption that P(t) is constant in time
// (the schemes tolerate mild violations; rank changes are the hard failure).
struct A13Report {
    bool pass = false;
    bool rank_constant = false;
    double max_p_prime_norm = 0.0;
    std::vector<Index> ranks;   // rank of A at each sample time
    std::string notes;
};

A13Report check_a13(const MatrixFn& a, const std::vector<double>& sample_times,
                    double tol, double rank_tol = kDefaultRankTol);

} // namespace sdae
