#pragma once

#include <cstdint>
#include <string>

#include "sdae/matrix_fn.hpp"

namespace sdae {

// Brownian increments on a dyadic fine grid. Entry (i, j) is the increment
// of noise component j over [i T/n, (i+1) T/n], drawn N(0, T/n). Generation
// is counter-based and keyed by (seed, i, j): the same seed reproduces the
// same path bit for bit, and any entry can be produced independently.
struct BrownianPath {
    std::uint64_t seed = 0;
    double horizon = 1.0;
    Index n_fine = 0;   // power of two
    Index d1 = 0;
    Matrix increments;  // n_fine x d1
};

BrownianPath generate_brownian(std::uint64_t seed, double horizon, Index n_fine,
                               Index d1);

// Sums fine increments into n_coarse blocks. Coarsening halves the grid one
// level at a time, so nested coarsenings agree bit for bit:
// coarsen(coarsen(p, m), k) == coarsen(p, k) whenever k | m | n_fine.
Matrix coarsen(const BrownianPath& path, Index n_coarse);

// CSV rows: step index, component, increment (full precision).
void write_increments_csv(const BrownianPath& path, const std::string& filename);

} // namespace sdae
