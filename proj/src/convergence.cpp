#include "sdae/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include "sdae/csv.hpp"
#include "sdae/errors.hpp"

namespace sdae {

LogLogFit fit_loglog(const std::vector<double>& ns,
                     const std::vector<double>& errors) {
    LogLogFit fit;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ns.size() && i < errors.size(); ++i) {
        if (errors[i] > 0.0 && std::isfinite(errors[i])) {
            xs.push_back(std::log(ns[i]));
            ys.push_back(std::log(errors[i]));
        }
    }
    if (xs.size() < 2) return fit;

    const double nn = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = nn * sxx - sx * sx;
    if (denom == 0.0) return fit;
    const double slope = (nn * sxy - sx * sy) / denom;
    fit.rate = -slope;
    fit.intercept = (sy - slope * sx) / nn;
    fit.valid = true;
    return fit;
}

double pathwise_error(const Trajectory& coarse, const Trajectory& reference) {
    const Index n_coarse = coarse.steps();
    const Index n_ref = reference.steps();
    if (n_coarse < 1 || n_ref < 1 || n_ref % n_coarse != 0) {
        throw GridMismatch("coarse resolution " + std::to_string(n_coarse) +
                           " is not nested in reference resolution " +
                           std::to_string(n_ref));
    }
    const Index stride = n_ref / n_coarse;
    double worst = 0.0;
    for (Index i = 0; i <= n_coarse; ++i) {
        const double dist =
            (coarse.states.row(i) - reference.states.row(i * stride)).norm();
        worst = std::max(worst, dist);
    }
    return worst;
}

ConvergenceReport run_sample(const SdaeProblem& p, std::uint64_t seed,
                             Index n_ref,
                             const std::vector<Index>& resolutions) {
    ConvergenceReport report;
    report.seed = seed;
    report.n_ref = n_ref;
    report.resolutions = resolutions;
    report.errors.assign(resolutions.size(),
                         std::numeric_limits<double>::quiet_NaN());

    const BrownianPath path = generate_brownian(seed, p.horizon, n_ref, p.d1);

    Trajectory reference;
    try {
        reference = integrate(p, n_ref, path, Scheme::primary);
    } catch (const Overflow& e) {
        report.ok = false;
        report.message = std::string("reference run overflowed: ") + e.what();
        return report;
    }

    bool all_ok = true;
    for (std::size_t k = 0; k < resolutions.size(); ++k) {
        try {
            const Trajectory coarse =
                integrate(p, resolutions[k], path, Scheme::primary);
            report.errors[k] = pathwise_error(coarse, reference);
        } catch (const Overflow& e) {
            all_ok = false;
            report.message += "n=" + std::to_string(resolutions[k]) +
                              " overflowed: " + e.what() + "; ";
        }
    }

    std::vector<double> ns(resolutions.begin(), resolutions.end());
    const LogLogFit fit = fit_loglog(ns, report.errors);
    report.rate = fit.rate;
    report.intercept = fit.intercept;
    report.rate_valid = fit.valid;
    report.ok = all_ok;
    return report;
}

std::vector<ConvergenceReport> run_study(const SdaeProblem& p,
                                         const std::vector<std::uint64_t>& seeds,
                                         Index n_ref,
                                         const std::vector<Index>& resolutions,
                                         bool parallel) {
    if (seeds.empty()) throw InvalidSpec("study needs at least one seed");
    std::vector<ConvergenceReport> reports(seeds.size());

    if (!parallel || seeds.size() == 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            reports[i] = run_sample(p, seeds[i], n_ref, resolutions);
        }
        return reports;
    }

    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(seeds.size()));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < seeds.size(); i += workers) {
                    reports[i] = run_sample(p, seeds[i], n_ref, resolutions);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
    return reports;
}

StudySummary summarize(const std::vector<ConvergenceReport>& reports) {
    StudySummary summary;
    std::vector<double> rates;
    for (const auto& r : reports) {
        if (r.ok && r.rate_valid) {
            rates.push_back(r.rate);
            ++summary.n_success;
        } else {
            ++summary.n_failed;
        }
    }
    if (rates.empty()) return summary;

    double mean = 0.0;
    for (double r : rates) mean += r;
    mean /= static_cast<double>(rates.size());
    double var = 0.0;
    for (double r : rates) var += (r - mean) * (r - mean);
    summary.mean_rate = mean;
    summary.std_rate = rates.size() > 1
                           ? std::sqrt(var / static_cast<double>(rates.size() - 1))
                           : 0.0;
    return summary;
}

void write_samples_csv(const std::vector<ConvergenceReport>& reports,
                       double horizon, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw InvalidSpec("cannot open " + filename + " for writing");
    out << "seed,n,h,error\n";
    for (const auto& r : reports) {
        for (std::size_t k = 0; k < r.resolutions.size(); ++k) {
            out << r.seed << ',' << r.resolutions[k] << ','
                << csv::full(horizon / static_cast<double>(r.resolutions[k]))
                << ',' << csv::full(r.errors[k]) << '\n';
        }
    }
}

void write_summary_csv(const std::vector<ConvergenceReport>& reports,
                       const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw InvalidSpec("cannot open " + filename + " for writing");
    out << "seed,rate,intercept,status\n";
    for (const auto& r : reports) {
        out << r.seed << ',' << csv::full(r.rate) << ',' << csv::full(r.intercept)
            << ',' << (r.ok ? (r.rate_valid ? "ok" : "rate-undefined") : "failed")
            << '\n';
    }
}

void write_loglog_csv(const std::vector<ConvergenceReport>& reports,
                      const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw InvalidSpec("cannot open " + filename + " for writing");
    out << "log2n,log10_mean_error\n";
    if (reports.empty()) return;

    const auto& resolutions = reports.front().resolutions;
    for (std::size_t k = 0; k < resolutions.size(); ++k) {
        double sum = 0.0;
        int count = 0;
        for (const auto& r : reports) {
            if (r.ok && k < r.errors.size() && std::isfinite(r.errors[k])) {
                sum += r.errors[k];
                ++count;
            }
        }
        if (count == 0) continue;
        const double mean = sum / static_cast<double>(count);
        out << csv::full(std::log2(static_cast<double>(resolutions[k]))) << ','
            << csv::full(std::log10(mean)) << '\n';
    }
}

} // namespace sdae
