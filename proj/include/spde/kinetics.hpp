#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "spde/grid.hpp"
#include "spde/stats.hpp"
#include "spde/stepper.hpp"

namespace spde {

// Kinetic function h = 1_{u > xi} as a binary nodal field.
inline std::vector<int> kinetic_function(const GridFunction& u, double xi) {
    std::vector<int> h(static_cast<std::size_t>(u.size()));
    for (int j = 0; j < u.size(); ++j) h[static_cast<std::size_t>(j)] = u[j] > xi ? 1 : 0;
    return h;
}

// chi = 1_{u > xi} - 1_{0 > xi}
inline std::vector<int> kinetic_chi(const GridFunction& u, double xi) {
    const int base = 0.0 > xi ? 1 : 0;
    std::vector<int> c(static_cast<std::size_t>(u.size()));
    for (int j = 0; j < u.size(); ++j) c[static_cast<std::size_t>(j)] = (u[j] > xi ? 1 : 0) - base;
    return c;
}

// Accumulated parabolic-dissipation mass binned over the xi axis. Deposits
// are hard-binned (no smoothing) so mass accounting is exact; dyadic band
// tallies are kept alongside, exact in xi.
struct KineticHistogram {
    double lo = 0.0;
    double hi = 0.0;
    int nbins = 0;
    std::vector<double> mass;   // per bin, n1 + n2
    double total = 0.0;
    double n1_total = 0.0;
    double n2_total = 0.0;
    std::map<int, double> bands;  // l -> mass with 2^l <= |xi| < 2^{l+1}

    KineticHistogram() = default;
    KineticHistogram(double lo_, double hi_, int nbins_) : lo(lo_), hi(hi_), nbins(nbins_) {
        if (!(hi_ > lo_) || nbins_ < 1)
            throw std::invalid_argument("KineticHistogram: bad bin layout");
        mass.assign(static_cast<std::size_t>(nbins_), 0.0);
    }

    void deposit(double xi, double m_n1, double m_n2) {
        const double m = m_n1 + m_n2;
        if (m == 0.0) return;
        int idx = static_cast<int>((xi - lo) / (hi - lo) * nbins);
        if (idx < 0) idx = 0;
        if (idx >= nbins) idx = nbins - 1;  // clamp: totals stay exact
        mass[static_cast<std::size_t>(idx)] += m;
        total += m;
        n1_total += m_n1;
        n2_total += m_n2;
        const double a = std::abs(xi);
        if (a > 0.0) bands[static_cast<int>(std::floor(std::log2(a)))] += m;
    }

    double band_mass(int l) const {
        const auto it = bands.find(l);
        return it == bands.end() ? 0.0 : it->second;
    }

    // mass of bins whose center lies within [-k, k]; xi resolution is a
    // report axis, not a model parameter
    double mass_within(double k) const {
        double s = 0.0;
        const double w = (hi - lo) / nbins;
        for (int i = 0; i < nbins; ++i) {
            const double center = lo + (i + 0.5) * w;
            if (std::abs(center) <= k) s += mass[static_cast<std::size_t>(i)];
        }
        return s;
    }

    void merge(const KineticHistogram& o) {
        if (o.nbins != nbins || o.lo != lo || o.hi != hi)
            throw std::invalid_argument("KineticHistogram::merge: incompatible binning");
        for (int i = 0; i < nbins; ++i) mass[static_cast<std::size_t>(i)] += o.mass[static_cast<std::size_t>(i)];
        total += o.total;
        n1_total += o.n1_total;
        n2_total += o.n2_total;
        for (const auto& [l, m] : o.bands) bands[l] += m;
    }
};

// Node gradient: average of the two face differences, matching the stepper
// dissipation convention.
inline double node_gradient(const GridFunction& u, int j) {
    const int n = u.size();
    const double h = u.grid->h();
    const double left = (j > 0) ? u[j - 1] : 0.0;
    const double right = (j + 1 < n) ? u[j + 1] : 0.0;
    return 0.5 * ((u[j] - left) / h + (right - u[j]) / h);
}

// Deposit dissipation of one trajectory into an existing histogram with fixed
// binning (for ensembles). Deposits b(u_j) |grad u|_j^2 h dt into the bin of
// u_j per interior node and step; the tau part is booked as n2.
inline void accumulate_dissipation_into(const Trajectory& traj,
                                        const std::function<double(double)>& n1_coef,
                                        double tau, KineticHistogram& histo) {
    if (traj.snapshots.size() < 2)
        throw std::invalid_argument("accumulate_dissipation: trajectory has no steps");
    const double dt = traj.times[1] - traj.times[0];
    const double h = traj.snapshots.front().grid->h();
    for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
        const GridFunction& u = traj.snapshots[k];
        for (int j = 0; j < u.size(); ++j) {
            const double grad = node_gradient(u, j);
            const double g2 = grad * grad * h * dt;
            histo.deposit(u[j], n1_coef(u[j]) * g2, tau * g2);
        }
    }
}

// Fresh histogram whose bins cover the observed state range with margin.
inline KineticHistogram accumulate_dissipation(const Trajectory& traj,
                                               const std::function<double(double)>& n1_coef,
                                               double tau, int nbins = 256) {
    if (traj.snapshots.empty())
        throw std::invalid_argument("accumulate_dissipation: empty trajectory");
    double lo = 0.0, hi = 0.0;
    for (const auto& u : traj.snapshots)
        for (int j = 0; j < u.size(); ++j) {
            lo = std::min(lo, u[j]);
            hi = std::max(hi, u[j]);
        }
    const double margin = 0.05 * (hi - lo) + 1e-9;
    KineticHistogram histo(lo - margin, hi + margin, nbins);
    accumulate_dissipation_into(traj, n1_coef, tau, histo);
    return histo;
}

inline KineticHistogram accumulate_dissipation(const Trajectory& traj,
                                               const DiffusionSpec& spec, int nbins = 256) {
    return accumulate_dissipation(traj, [&spec](double r) { return spec.b(r); }, 0.0, nbins);
}

// 2^{-l} * m(A_{2^l}): the dyadic decay functional of one histogram.
inline double dyadic_decay(const KineticHistogram& histo, int l) {
    return std::pow(2.0, -static_cast<double>(l)) * histo.band_mass(l);
}

// Ensemble average of the dyadic decay functional with its standard error.
inline MeanStderr ensemble_dyadic_decay(const std::vector<KineticHistogram>& ensemble, int l) {
    std::vector<double> vals;
    vals.reserve(ensemble.size());
    for (const auto& h : ensemble) vals.push_back(dyadic_decay(h, l));
    return mean_stderr(vals);
}

// Empirical p-th moment of the band-limited mass m([0,T] x O x [-k,k]).
inline MeanStderr measure_bound_report(const std::vector<KineticHistogram>& ensemble,
                                       double k, double p) {
    if (ensemble.empty())
        throw std::invalid_argument("measure_bound_report: empty ensemble");
    std::vector<double> vals;
    vals.reserve(ensemble.size());
    for (const auto& h : ensemble) vals.push_back(std::pow(h.mass_within(k), p));
    return mean_stderr(vals);
}

}  // namespace spde
