#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sdae/integrators.hpp"

namespace sdae {

// Least-squares fit of log(error) against log(n); rate is the negated slope,
// so error ~ exp(intercept) * n^{-rate}. Points with error <= 0 are skipped;
// the fit is undefined (valid = false, NaN fields) with fewer than two
// usable points.
struct LogLogFit {
    double rate = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    bool valid = false;
};

LogLogFit fit_loglog(const std::vector<double>& ns,
                     const std::vector<double>& errors);

// Max over shared grid points of the Euclidean distance between a coarse
// trajectory and the reference on the same Brownian path.
// Requires nested grids: n_coarse | n_ref.
double pathwise_error(const Trajectory& coarse, const Trajectory& reference);

struct ConvergenceReport {
    std::uint64_t seed = 0;
    Index n_ref = 0;
    std::vector<Index> resolutions;
    std::vector<double> errors;   // NaN where the run did not complete
    double rate = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    bool rate_valid = false;
    bool ok = false;              // false when any run overflowed
    std::string message;
};

// One sample of the pathwise-convergence experiment: a fine-grid primary run
// stands in for the exact solution, each coarse resolution integrates the
// same path, and the per-sample rate is fitted from the sup-norm errors.
// Overflow at any resolution marks the sample failed; other integrator
// errors propagate.
ConvergenceReport run_sample(const SdaeProblem& p, std::uint64_t seed,
                             Index n_ref, const std::vector<Index>& resolutions);

struct StudySummary {
    double mean_rate = std::numeric_limits<double>::quiet_NaN();
    double std_rate = std::numeric_limits<double>::quiet_NaN();
    int n_success = 0;
    int n_failed = 0;
};

// One report per seed. Samples are independent; with parallel = true they
// fan out across hardware threads, and the output is bit-identical to the
// serial run because every sample is a pure function of its inputs.
std::vector<ConvergenceReport> run_study(const SdaeProblem& p,
                                         const std::vector<std::uint64_t>& seeds,
                                         Index n_ref,
                                         const std::vector<Index>& resolutions,
                                         bool parallel);

StudySummary summarize(const std::vector<ConvergenceReport>& reports);

// CSV emitters used by the CLI: per-sample rows `seed,n,h,error`, summary
// rows `seed,rate,intercept,status`, and plot-ready
// `log2n,log10_mean_error` over successful samples.
void write_samples_csv(const std::vector<ConvergenceReport>& reports,
                       double horizon, const std::string& filename);
void write_summary_csv(const std::vector<ConvergenceReport>& reports,
                       const std::string& filename);
void write_loglog_csv(const std::vector<ConvergenceReport>& reports,
                      const std::string& filename);

} // namespace sdae
