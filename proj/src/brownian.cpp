#include "sdae/brownian.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sdae/csv.hpp"
#include "sdae/errors.hpp"
#include "sdae/rng.hpp"

namespace sdae {

namespace {

bool power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

BrownianPath generate_brownian(std::uint64_t seed, double horizon, Index n_fine,
                               Index d1) {
    if (!power_of_two(n_fine)) {
        throw InvalidResolution("n_fine = " + std::to_string(n_fine) +
                                " is not a power of two");
    }
    if (!(horizon > 0.0)) throw InvalidSpec("horizon must be positive");
    if (d1 < 1) throw InvalidSpec("noise dimension must be at least 1");

    BrownianPath path;
    path.seed = seed;
    path.horizon = horizon;
    path.n_fine = n_fine;
    path.d1 = d1;
    path.increments.resize(n_fine, d1);

    const double scale = std::sqrt(horizon / static_cast<double>(n_fine));
    for (Index i = 0; i < n_fine; ++i) {
        for (Index j = 0; j < d1; ++j) {
            const std::uint64_t counter =
                static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(d1) +
                static_cast<std::uint64_t>(j);
            path.increments(i, j) = scale * rng::standard_normal(seed, counter);
        }
    }
    return path;
}

Matrix coarsen(const BrownianPath& path, Index n_coarse) {
    if (n_coarse <= 0 || path.n_fine % n_coarse != 0) {
        throw InvalidResolution("n_coarse = " + std::to_string(n_coarse) +
                                " does not divide n_fine = " +
                                std::to_string(path.n_fine));
    }
    Matrix current = path.increments;
    while (current.rows() > n_coarse) {
        const Index half = current.rows() / 2;
        Matrix next(half, current.cols());
        for (Index i = 0; i < half; ++i) {
            next.row(i) = current.row(2 * i) + current.row(2 * i + 1);
        }
        current = std::move(next);
    }
    return current;
}

void write_increments_csv(const BrownianPath& path, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw InvalidSpec("cannot open " + filename + " for writing");
    out << "step,component,increment\n";
    for (Index i = 0; i < path.n_fine; ++i) {
        for (Index j = 0; j < path.d1; ++j) {
            out << i << ',' << j << ',' << csv::full(path.increments(i, j)) << '\n';
        }
    }
}

} // namespace sdae
