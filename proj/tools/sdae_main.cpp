// Command-line front end: simulate one trajectory, run the pathwise
// convergence study, validate a model, or run the porous-media demo.
// Exit codes: 0 success, 1 domain/model failure, 2 usage failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "sdae/convergence.hpp"
#include "sdae/csv.hpp"
#include "sdae/errors.hpp"
#include "sdae/integrators.hpp"
#include "sdae/models.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

bool power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

int usage_error(const std::string& msg) {
    std::cerr << "usage error: " << msg << "\n";
    return kExitUsage;
}

std::string default_output_dir() {
    if (const char* env = std::getenv("SDAE_OUTPUT_DIR")) return env;
    return ".";
}

struct ModelOptions {
    std::string name = "example3d";
    long long m = 20;
    double noise_amp = 1e-4;
    std::string porosity_file;
};

// Returns false (after printing) when the model name is unknown.
bool resolve_model(const ModelOptions& opt, sdae::SdaeProblem& out) {
    if (opt.name == "example3d") {
        out = sdae::example3d();
        return true;
    }
    if (opt.name == "example3d-unsplit") {
        out = sdae::example3d_unsplit();
        return true;
    }
    if (opt.name == "broken-index1") {
        out = sdae::broken_index1_model();
        return true;
    }
    if (opt.name == "heat2d") {
        sdae::Heat2dSpec spec;
        spec.m = opt.m;
        spec.noise_amp = opt.noise_amp;
        if (!opt.porosity_file.empty()) {
            spec.porosity = sdae::read_porosity_csv(opt.porosity_file);
        }
        out = sdae::build_heat2d(spec);
        return true;
    }
    std::cerr << "usage error: unknown model '" << opt.name
              << "' (known: example3d, example3d-unsplit, heat2d, broken-index1)\n";
    return false;
}

int cmd_simulate(const ModelOptions& model_opt, long long n, long long n_ref,
                 std::uint64_t seed, const std::string& scheme_name,
                 bool dump_increments, const std::string& output_dir) {
    if (n_ref == 0) n_ref = n;
    if (!power_of_two(n_ref)) {
        return usage_error("--n-ref (default: --n) must be a power of two, got " +
                           std::to_string(n_ref));
    }
    if (n < 1 || n_ref % n != 0) {
        return usage_error("--n must divide --n-ref, got --n " + std::to_string(n) +
                           ", --n-ref " + std::to_string(n_ref));
    }

    sdae::SdaeProblem problem;
    if (!resolve_model(model_opt, problem)) return kExitUsage;
    const sdae::Scheme scheme =
        scheme_name == "dual" ? sdae::Scheme::dual : sdae::Scheme::primary;

    std::filesystem::create_directories(output_dir);
    const auto path = sdae::generate_brownian(seed, problem.horizon, n_ref,
                                              problem.d1);
    if (dump_increments) {
        sdae::write_increments_csv(path, output_dir + "/increments.csv");
    }
    const auto traj = sdae::integrate(problem, n, path, scheme);
    const std::string file = output_dir + "/trajectory.csv";
    sdae::write_trajectory_csv(traj, file);
    if (!traj.notes.empty()) std::cerr << traj.notes << "\n";
    std::cout << "wrote " << file << " (" << traj.states.rows() << " rows, scheme "
              << sdae::to_string(traj.scheme) << ")\n";
    return kExitOk;
}

int cmd_converge(const ModelOptions& model_opt,
                 const std::vector<std::uint64_t>& seeds, long long n_ref,
                 const std::vector<long long>& resolutions, bool parallel,
                 const std::string& output_dir) {
    if (seeds.empty()) return usage_error("--seeds must be nonempty");
    if (!power_of_two(n_ref)) {
        return usage_error("--n-ref must be a power of two, got " +
                           std::to_string(n_ref));
    }
    std::vector<sdae::Index> res;
    for (long long n : resolutions) {
        if (n < 1 || n_ref % n != 0) {
            return usage_error("every --resolutions entry must divide --n-ref; " +
                               std::to_string(n) + " does not divide " +
                               std::to_string(n_ref));
        }
        res.push_back(n);
    }
    if (res.empty()) return usage_error("--resolutions must be nonempty");

    sdae::SdaeProblem problem;
    if (!resolve_model(model_opt, problem)) return kExitUsage;

    std::filesystem::create_directories(output_dir);
    const auto reports = sdae::run_study(problem, seeds, n_ref, res, parallel);
    const auto summary = sdae::summarize(reports);

    sdae::write_samples_csv(reports, problem.horizon, output_dir + "/samples.csv");
    sdae::write_summary_csv(reports, output_dir + "/summary.csv");
    sdae::write_loglog_csv(reports, output_dir + "/loglog.csv");

    for (const auto& r : reports) {
        std::cout << "seed " << r.seed << ": ";
        if (!r.ok) {
            std::cout << "failed (" << r.message << ")\n";
        } else if (!r.rate_valid) {
            std::cout << "rate undefined\n";
        } else {
            std::cout << "rate " << sdae::csv::full(r.rate) << "\n";
        }
    }
    std::cout << "mean rate " << sdae::csv::full(summary.mean_rate) << " +/- "
              << sdae::csv::full(summary.std_rate) << " over " << summary.n_success
              << " successful samples (" << summary.n_failed << " failed)\n";
    return kExitOk;
}

int cmd_check(const ModelOptions& model_opt) {
    sdae::SdaeProblem problem;
    if (!resolve_model(model_opt, problem)) return kExitUsage;
    const auto report = sdae::validate(problem);
    std::cout << "model " << problem.name << "\n" << sdae::to_string(report);
    return report.all_ok() ? kExitOk : kExitDomain;
}

int cmd_heat2d(long long m, long long n, std::uint64_t seed, double noise_amp,
               const std::string& porosity_file, const std::string& output_dir) {
    if (!power_of_two(n)) {
        return usage_error("--n must be a power of two, got " + std::to_string(n));
    }

    sdae::Heat2dSpec spec;
    spec.m = m;
    spec.noise_amp = noise_amp;
    if (!porosity_file.empty()) {
        spec.porosity = sdae::read_porosity_csv(porosity_file);
    } else {
        spec.porosity = sdae::default_porosity(m);
    }

    std::filesystem::create_directories(output_dir);

    const auto run = [&](double amp) {
        sdae::Heat2dSpec s = spec;
        s.noise_amp = amp;
        const auto problem = sdae::build_heat2d(s);
        const auto path =
            sdae::generate_brownian(seed, problem.horizon, n, problem.d1);
        const auto traj =
            sdae::integrate(problem, n, path, sdae::Scheme::primary);
        return sdae::Vector(traj.states.row(traj.steps()).transpose());
    };

    sdae::write_grid_csv(run(spec.noise_amp), m, output_dir + "/solution_noise.csv");
    sdae::write_grid_csv(run(0.0), m, output_dir + "/solution_nonoise.csv");
    sdae::write_porosity_csv(spec.porosity, output_dir + "/porosity.csv");
    std::cout << "wrote solution_noise.csv, solution_nonoise.csv, porosity.csv in "
              << output_dir << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"index-1 SDAE simulator: semi-implicit scheme, dual-scheme "
                 "verification, pathwise convergence studies"};
    app.require_subcommand(1);

    ModelOptions model_opt;
    std::string output_dir = default_output_dir();
    long long sim_n = 256;
    long long sim_n_ref = 0; // 0: use sim_n
    std::uint64_t seed = 1;
    std::string scheme = "primary";
    std::vector<std::uint64_t> seeds;
    std::vector<long long> resolutions;
    long long conv_n_ref = 16384;
    bool parallel = false;
    bool dump_increments = false;
    double heat_noise_amp = 1e-4;
    long long heat_m = 20;
    long long heat_n = 64;
    std::string porosity_file;

    const auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_opt.name, "model name");
        cmd->add_option("--m", model_opt.m, "heat2d grid cells per side");
        cmd->add_option("--noise-amp", model_opt.noise_amp, "heat2d noise amplitude");
        cmd->add_option("--porosity", model_opt.porosity_file,
                        "heat2d porosity CSV file");
        cmd->add_option("--output-dir", output_dir, "output directory");
    };

    auto* sim = app.add_subcommand("simulate", "integrate one trajectory");
    add_model_flags(sim);
    sim->add_option("--n", sim_n, "step count");
    sim->add_option("--n-ref", sim_n_ref,
                    "Brownian fine-grid resolution (default --n)");
    sim->add_option("--seed", seed, "Brownian seed");
    sim->add_option("--scheme", scheme, "primary or dual")
        ->check(CLI::IsMember({"primary", "dual"}));
    sim->add_flag("--dump-increments", dump_increments,
                  "also write the fine-grid Brownian increments");

    auto* conv = app.add_subcommand("converge", "pathwise convergence study");
    add_model_flags(conv);
    conv->add_option("--seeds", seeds, "comma-separated seeds")
        ->required()
        ->delimiter(',');
    conv->add_option("--n-ref", conv_n_ref, "reference resolution (power of two)");
    conv->add_option("--resolutions", resolutions, "comma-separated coarse n values")
        ->required()
        ->delimiter(',');
    conv->add_flag("--parallel", parallel, "fan samples out across threads");

    auto* check = app.add_subcommand("check", "validate a model");
    add_model_flags(check);

    auto* heat = app.add_subcommand("heat2d", "porous-media demo grids");
    heat->add_option("--m", heat_m, "grid cells per side");
    heat->add_option("--n", heat_n, "step count (power of two)");
    heat->add_option("--seed", seed, "Brownian seed");
    heat->add_option("--noise-amp", heat_noise_amp, "noise amplitude");
    heat->add_option("--porosity", porosity_file, "porosity CSV file");
    heat->add_option("--output-dir", output_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(model_opt, sim_n, sim_n_ref, seed, scheme,
                                dump_increments, output_dir);
        }
        if (conv->parsed()) {
            return cmd_converge(model_opt, seeds, conv_n_ref, resolutions,
                                parallel, output_dir);
        }
        if (check->parsed()) {
            return cmd_check(model_opt);
        }
        if (heat->parsed()) {
            return cmd_heat2d(heat_m, heat_n, seed, heat_noise_amp,
                              porosity_file, output_dir);
        }
    } catch (const sdae::SdaeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}
