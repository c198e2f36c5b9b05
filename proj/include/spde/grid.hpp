#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace spde {

// Uniform 1-D grid on (0, L) with homogeneous Dirichlet boundary. Only the
// n interior nodes x_j = j*h are stored; the boundary values are implicit
// zeros everywhere, which removes a whole class of bookkeeping errors.
class Grid {
public:
    Grid(double domain_length, int n_interior)
        : length_(domain_length), n_(n_interior) {
        if (!(domain_length > 0.0))
            throw std::invalid_argument("Grid: domain length must be positive");
        if (n_interior < 3)
            throw std::invalid_argument("Grid: need at least 3 interior nodes");
        h_ = domain_length / static_cast<double>(n_interior + 1);
    }

    double length() const { return length_; }
    int n_interior() const { return n_; }
    double h() const { return h_; }
    double node(int j) const { return static_cast<double>(j + 1) * h_; }  // j in [0, n)

    // Exact spectral data of the discrete Dirichlet Laplacian stencil:
    //   alpha_i = (4/h^2) sin^2(i*pi*h / (2L)),  e_i(x_j) = sqrt(2/L) sin(i*pi*x_j/L),
    // with <e_i, e_j>_H = delta_ij under the h-weighted inner product.
    double eigenvalue(int i) const {  // i in [1, n]
        const double s = std::sin(static_cast<double>(i) * M_PI * h_ / (2.0 * length_));
        return 4.0 / (h_ * h_) * s * s;
    }

    const std::vector<double>& eigenvector(int i) const {  // i in [1, n]
        ensure_basis();
        return basis_[static_cast<std::size_t>(i - 1)];
    }

    double alpha1() const { return eigenvalue(1); }

private:
    void ensure_basis() const {
        std::call_once(basis_once_, [this] {
            basis_.resize(static_cast<std::size_t>(n_));
            const double scale = std::sqrt(2.0 / length_);
            for (int i = 1; i <= n_; ++i) {
                auto& e = basis_[static_cast<std::size_t>(i - 1)];
                e.resize(static_cast<std::size_t>(n_));
                for (int j = 0; j < n_; ++j)
                    e[static_cast<std::size_t>(j)] =
                        scale * std::sin(static_cast<double>(i) * M_PI * node(j) / length_);
            }
        });
    }

    double length_;
    int n_;
    double h_;
    mutable std::once_flag basis_once_;
    mutable std::vector<std::vector<double>> basis_;
};

// Interior nodal values of a Dirichlet field on a Grid.
struct GridFunction {
    const Grid* grid = nullptr;
    std::vector<double> v;

    GridFunction() = default;
    explicit GridFunction(const Grid& g, double fill = 0.0)
        : grid(&g), v(static_cast<std::size_t>(g.n_interior()), fill) {}

    template <class Fn>
    static GridFunction sample(const Grid& g, Fn f) {
        GridFunction u(g);
        for (int j = 0; j < g.n_interior(); ++j)
            u.v[static_cast<std::size_t>(j)] = f(g.node(j));
        return u;
    }

    int size() const { return grid ? grid->n_interior() : 0; }
    double& operator[](int j) { return v[static_cast<std::size_t>(j)]; }
    double operator[](int j) const { return v[static_cast<std::size_t>(j)]; }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

inline void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.grid == nullptr || a.grid != b.grid)
        throw std::invalid_argument("grid functions live on different grids");
}

inline double inner_h(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g);
    double s = 0.0;
    for (int j = 0; j < f.size(); ++j) s += f[j] * g[j];
    return f.grid->h() * s;
}

// Second-difference Laplacian with implicit zero boundary values.
inline GridFunction laplacian_apply(const GridFunction& f) {
    const Grid& g = *f.grid;
    GridFunction out(g);
    const int n = g.n_interior();
    const double inv_h2 = 1.0 / (g.h() * g.h());
    for (int j = 0; j < n; ++j) {
        const double left = (j > 0) ? f[j - 1] : 0.0;
        const double right = (j + 1 < n) ? f[j + 1] : 0.0;
        out[j] = (left - 2.0 * f[j] + right) * inv_h2;
    }
    return out;
}

struct Eigenpair {
    double alpha;  // eigenvalue of the NEGATIVE discrete Dirichlet Laplacian
    GridFunction mode;
};

inline std::vector<Eigenpair> eigenpairs(const Grid& g, int k) {
    if (k > g.n_interior())
        throw std::invalid_argument("eigenpairs: k exceeds interior node count");
    std::vector<Eigenpair> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
        Eigenpair p{g.eigenvalue(i), GridFunction(g)};
        p.mode.v = g.eigenvector(i);
        out.push_back(std::move(p));
    }
    return out;
}

inline double norm_lp(const GridFunction& f, double p) {
    if (p < 1.0) throw std::invalid_argument("norm_lp: p must be >= 1");
    double s = 0.0;
    for (int j = 0; j < f.size(); ++j) s += std::pow(std::abs(f[j]), p);
    return std::pow(f.grid->h() * s, 1.0 / p);
}

inline double norm_l1(const GridFunction& f) {
    double s = 0.0;
    for (int j = 0; j < f.size(); ++j) s += std::abs(f[j]);
    return f.grid->h() * s;
}

inline double norm_h(const GridFunction& f) { return std::sqrt(inner_h(f, f)); }

// Forward differences including the two boundary gaps, so that the discrete
// norm matches ||grad u|| for Dirichlet fields under refinement.
inline double norm_h1(const GridFunction& f) {
    const int n = f.size();
    const double h = f.grid->h();
    double s = 0.0;
    double prev = 0.0;
    for (int j = 0; j < n; ++j) {
        const double d = f[j] - prev;
        s += d * d;
        prev = f[j];
    }
    s += prev * prev;  // gap to the right boundary zero
    return std::sqrt(s / h);
}

// Spectral coefficients <f, e_i>_H for i = 1..k.
inline std::vector<double> spectral_coefficients(const GridFunction& f, int k) {
    const Grid& g = *f.grid;
    if (k > g.n_interior())
        throw std::invalid_argument("spectral_coefficients: k exceeds node count");
    std::vector<double> c(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
        const auto& e = g.eigenvector(i);
        double s = 0.0;
        for (int j = 0; j < g.n_interior(); ++j) s += f[j] * e[static_cast<std::size_t>(j)];
        c[static_cast<std::size_t>(i - 1)] = g.h() * s;
    }
    return c;
}

inline double norm_hminus(const GridFunction& f, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("norm_hminus: delta must be positive");
    const Grid& g = *f.grid;
    const auto c = spectral_coefficients(f, g.n_interior());
    double s = 0.0;
    for (int i = 1; i <= g.n_interior(); ++i)
        s += std::pow(g.eigenvalue(i), -delta) * c[static_cast<std::size_t>(i - 1)] *
             c[static_cast<std::size_t>(i - 1)];
    return std::sqrt(s);
}

// h * sum max(f_j - g_j, 0): the L1 norm of the positive part of f - g.
inline double positive_part_gap(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g);
    double s = 0.0;
    for (int j = 0; j < f.size(); ++j) s += std::max(f[j] - g[j], 0.0);
    return f.grid->h() * s;
}

}  // namespace spde
