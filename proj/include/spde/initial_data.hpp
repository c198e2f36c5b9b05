#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/grid.hpp"
#include "spde/rng.hpp"

namespace spde {

// Named initial-data profiles. Interior storage keeps the Dirichlet zeros
// structural, so even the "constant" profile is an admissible L1 datum.
//
// Text form: "name" or "name:p1,p2,..." with family-specific parameters:
//   constant:amplitude
//   bump:amplitude,center,width
//   two_bump:amplitude,c1,c2,width
//   step:amplitude,a,b
//   random_h1:amplitude,n_modes,seed
//   zero
inline GridFunction make_initial_data(const Grid& grid, const std::string& text) {
    std::string name = text;
    std::vector<double> p;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        name = text.substr(0, colon);
        std::stringstream ss(text.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) p.push_back(std::stod(tok));
    }
    auto param = [&](std::size_t i, double dflt) { return i < p.size() ? p[i] : dflt; };
    const double L = grid.length();

    if (name == "zero") return GridFunction(grid);
    if (name == "constant") return GridFunction(grid, param(0, 1.0));
    if (name == "bump") {
        const double amp = param(0, 1.0), c = param(1, 0.5 * L), w = param(2, 0.1 * L);
        return GridFunction::sample(grid, [=](double x) {
            return amp * std::exp(-0.5 * (x - c) * (x - c) / (w * w));
        });
    }
    if (name == "two_bump") {
        const double amp = param(0, 1.0), c1 = param(1, 0.3 * L), c2 = param(2, 0.7 * L),
                     w = param(3, 0.07 * L);
        return GridFunction::sample(grid, [=](double x) {
            return amp * (std::exp(-0.5 * (x - c1) * (x - c1) / (w * w)) +
                          std::exp(-0.5 * (x - c2) * (x - c2) / (w * w)));
        });
    }
    if (name == "step") {
        const double amp = param(0, 1.0), a = param(1, 0.25 * L), b = param(2, 0.75 * L);
        return GridFunction::sample(grid,
                                    [=](double x) { return (x > a && x < b) ? amp : 0.0; });
    }
    if (name == "random_h1") {
        const double amp = param(0, 1.0);
        const int k = std::min(static_cast<int>(param(1, 8)), grid.n_interior());
        const std::uint64_t seed = static_cast<std::uint64_t>(param(2, 99));
        GridFunction u(grid);
        for (int i = 1; i <= k; ++i) {
            const double xi = counter_gaussian(seed, 17, 0, static_cast<std::uint64_t>(i));
            const double w = amp * xi * std::pow(static_cast<double>(i), -1.5);
            const auto& e = grid.eigenvector(i);
            for (int j = 0; j < grid.n_interior(); ++j)
                u[j] += w * e[static_cast<std::size_t>(j)];
        }
        return u;
    }
    throw std::invalid_argument("unknown initial-data profile '" + name + "'");
}

// Rescale so that the L^p norm hits an exact target (for sweep experiments).
inline GridFunction scaled_to_lp(const GridFunction& u, double p, double target) {
    const double cur = norm_lp(u, p);
    if (!(cur > 0.0)) throw std::invalid_argument("scaled_to_lp: zero profile");
    GridFunction out = u;
    const double c = target / cur;
    for (int j = 0; j < out.size(); ++j) out[j] *= c;
    return out;
}

}  // namespace spde
