#include "sdae/models.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sdae/csv.hpp"
#include "sdae/errors.hpp"

namespace sdae {

SdaeProblem example3d() {
    SdaeProblem p;
    p.name = "example3d";
    p.d = 3;
    p.d1 = 3;
    p.horizon = 1.0;
    p.zeta = Vector{{1.0, -2.0, 1.0}};

    p.a = MatrixFn{[](double t) {
        Matrix a(3, 3);
        a << 1.0, 0.0, 0.0,
            -1.0, 0.0, t * t + 1.0,
             0.0, 0.0, 0.0;
        return a;
    }};

    // Linear drift rows; leaves f with the cubic remainder so that A - hB is
    // invertible for h in (0, 1): det(A - hB) = (1 + h) h (t^2 + 1 - h).
    Matrix b(3, 3);
    b << -1.0, 0.0, 0.0,
          1.0, 0.0, 1.0,
          1.0, 1.0, 1.0;
    p.b = constant_matrix(b);

    p.f = [](double, const Vector& y) {
        const double cubic = y(0) * y(0) * y(0);
        return Vector{{-cubic, cubic, 0.0}};
    };

    p.g = [](double, const Vector& y) {
        const double s = std::sqrt(2.0) * y(0) * y(0);
        Matrix g(3, 3);
        g <<  s, 0.0, 0.0,
             -s + y(1), y(0) + y(2), y(0),
              0.0, 0.0, 0.0;
        return g;
    };

    p.notes = "drift split: full drift mu(Y) = (-y1 - y1^3, y1 + y1^3 + y3, "
              "y1 + y2 + y3); B carries the linear part, f the cubic part";
    return p;
}

SdaeProblem example3d_unsplit() {
    SdaeProblem p = example3d();
    p.name = "example3d-unsplit";
    p.b = constant_matrix(Matrix::Zero(3, 3));
    p.f = [](double, const Vector& y) {
        const double cubic = y(0) * y(0) * y(0);
        return Vector{{-y(0) - cubic, y(0) + cubic + y(2), y(0) + y(1) + y(2)}};
    };
    p.notes = "whole drift in f, B = 0; A - hB is singular for every h";
    return p;
}

SdaeProblem broken_index1_model() {
    SdaeProblem p;
    p.name = "broken-index1";
    p.d = 2;
    p.d1 = 1;
    p.horizon = 1.0;
    p.zeta = Vector{{1.0, 0.0}};
    p.a = constant_matrix(Matrix{{1.0, 0.0}, {0.0, 0.0}});
    p.b = constant_matrix(Matrix::Zero(2, 2));
    p.f = [](double, const Vector&) { return Vector::Zero(2).eval(); };
    p.g = [](double, const Vector&) {
        Matrix g(2, 1);
        g << 0.0, 1.0;
        return g;
    };
    p.notes = "noise drives the algebraic row; index-1 check must fail";
    return p;
}

PorosityField default_porosity(Index m) {
    if (m < 8) throw InvalidSpec("default porosity needs m >= 8");
    PorosityField field;
    field.m = m;
    field.phi = Vector::Ones((m + 1) * (m + 1));

    const auto block = [&](double x0, double x1, double y0, double y1) {
        const Index ix0 = static_cast<Index>(std::llround(x0 * static_cast<double>(m)));
        const Index ix1 = static_cast<Index>(std::llround(x1 * static_cast<double>(m)));
        const Index iy0 = static_cast<Index>(std::llround(y0 * static_cast<double>(m)));
        const Index iy1 = static_cast<Index>(std::llround(y1 * static_cast<double>(m)));
        for (Index iy = iy0; iy <= iy1; ++iy) {
            for (Index ix = ix0; ix <= ix1; ++ix) {
                field.phi(iy * (m + 1) + ix) = 0.0;
            }
        }
    };
    // Two impermeable rocks, both away from the Dirichlet wall x = 0.
    block(0.30, 0.45, 0.25, 0.45);
    block(0.60, 0.75, 0.55, 0.75);
    return field;
}

PorosityField read_porosity_csv(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw InvalidSpec("cannot open " + filename);
    std::string line;
    if (!std::getline(in, line)) throw InvalidSpec("empty porosity file");
    PorosityField field;
    field.m = static_cast<Index>(std::stoll(line));
    if (field.m < 1) throw InvalidSpec("porosity grid needs m >= 1");
    field.phi.resize(field.nodes());

    Index row = 0;
    while (row <= field.m && std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        Index col = 0;
        while (col <= field.m && std::getline(ss, cell, ',')) {
            const double v = std::stod(cell);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw InvalidSpec("porosity value outside [0, 1]: " + cell);
            }
            field.phi(row * (field.m + 1) + col) = v;
            ++col;
        }
        if (col != field.m + 1) throw InvalidSpec("short porosity row");
        ++row;
    }
    if (row != field.m + 1) throw InvalidSpec("porosity file has too few rows");
    return field;
}

void write_porosity_csv(const PorosityField& field, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw InvalidSpec("cannot open " + filename + " for writing");
    out << field.m << '\n';
    for (Index iy = 0; iy <= field.m; ++iy) {
        for (Index ix = 0; ix <= field.m; ++ix) {
            if (ix > 0) out << ',';
            out << csv::full(field.at(ix, iy));
        }
        out << '\n';
    }
}

SdaeProblem build_heat2d(const Heat2dSpec& spec) {
    if (spec.m < 4) throw InvalidSpec("heat2d needs m >= 4");
    if (!(spec.diffusion > 0.0)) throw InvalidSpec("diffusion must be positive");
    if (!(spec.noise_amp >= 0.0)) throw InvalidSpec("noise_amp must be >= 0");
    if (!(spec.horizon > 0.0)) throw InvalidSpec("horizon must be positive");

    PorosityField porosity = spec.porosity;
    if (porosity.m == 0) porosity = default_porosity(spec.m);
    if (porosity.m != spec.m || porosity.phi.size() != porosity.nodes()) {
        throw InvalidSpec("porosity grid does not match m");
    }
    for (Index k = 0; k < porosity.phi.size(); ++k) {
        const double v = porosity.phi(k);
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidSpec("porosity value outside [0, 1]");
        }
    }

    const Index m = spec.m;
    const Index n_nodes = (m + 1) * (m + 1);
    const double dx = 2.0 / static_cast<double>(m);
    const double s = spec.diffusion / (dx * dx);
    const auto idx = [m](Index ix, Index iy) { return iy * (m + 1) + ix; };
    const auto dirichlet = [](Index ix, Index) { return ix == 0; };

    SdaeProblem p;
    p.name = "heat2d";
    p.d = n_nodes;
    p.d1 = n_nodes;
    p.horizon = spec.horizon;

    p.a = constant_matrix(Matrix(porosity.phi.asDiagonal()));

    // Five-point Laplacian scaled by D; homogeneous Neumann edges fold the
    // ghost node back onto the inner neighbor. Dirichlet rows stay zero: the
    // wall value is enforced through f.
    Matrix b = Matrix::Zero(n_nodes, n_nodes);
    for (Index iy = 0; iy <= m; ++iy) {
        for (Index ix = 0; ix <= m; ++ix) {
            if (dirichlet(ix, iy)) continue;
            const Index row = idx(ix, iy);
            b(row, row) -= 4.0 * s;
            b(row, idx(ix - 1, iy)) += s;
            b(row, idx(ix == m ? ix - 1 : ix + 1, iy)) += s;
            b(row, idx(ix, iy == 0 ? iy + 1 : iy - 1)) += s;
            b(row, idx(ix, iy == m ? iy - 1 : iy + 1)) += s;
        }
    }
    p.b = constant_matrix(std::move(b));

    const Vector phi = porosity.phi;
    p.f = [phi, m, idx, dirichlet](double, const Vector& y) {
        Vector f(y.size());
        for (Index iy = 0; iy <= m; ++iy) {
            for (Index ix = 0; ix <= m; ++ix) {
                const Index k = idx(ix, iy);
                f(k) = dirichlet(ix, iy) ? 1.0 - y(k) : y(k) - phi(k);
            }
        }
        return f;
    };

    Vector noise_diag = spec.noise_amp * phi;
    for (Index iy = 0; iy <= m; ++iy) noise_diag(idx(0, iy)) = 0.0;
    const Matrix g_mat = noise_diag.asDiagonal();
    p.g = [g_mat](double, const Vector&) { return g_mat; };

    Vector zeta = Vector::Zero(n_nodes);
    for (Index iy = 0; iy <= m; ++iy) zeta(idx(0, iy)) = 1.0;
    p.zeta = zeta;

    p.notes = "finite differences on [0,2]^2, dx = " + std::to_string(dx) +
              "; Dirichlet value 1 on x = 0, Neumann elsewhere";
    return p;
}

void write_grid_csv(const Vector& values, Index m, const std::string& filename) {
    if (values.size() != (m + 1) * (m + 1)) {
        throw InvalidSpec("grid values do not match m");
    }
    std::ofstream out(filename);
    if (!out) throw InvalidSpec("cannot open " + filename + " for writing");
    for (Index iy = 0; iy <= m; ++iy) {
        for (Index ix = 0; ix <= m; ++ix) {
            if (ix > 0) out << ',';
            out << csv::full(values(iy * (m + 1) + ix));
        }
        out << '\n';
    }
}

} // namespace sdae
