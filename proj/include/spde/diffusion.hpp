#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/expr.hpp"

namespace spde {

// Growth regime of the diffusion coefficient. NonDegenerate carries the
// floor b0 and the polynomial envelope (theta, c); Degenerate carries the
// two-sided power envelope with theta2 >= theta1 > 2.
struct Regime {
    enum class Kind { NonDegenerate, Degenerate } kind = Kind::NonDegenerate;
    // NonDegenerate parameters
    double b0 = 1.0;
    double theta = 1.0;
    double c = 1.0;
    // Degenerate parameters
    double theta1 = 3.0;
    double theta2 = 3.0;
    double c1 = 1.0;
    double c2 = 1.0;

    static Regime non_degenerate(double b0, double theta, double c) {
        if (!(b0 > 0.0) || !(theta >= 1.0) || !(c > 0.0))
            throw std::invalid_argument("non-degenerate regime needs b0,c > 0 and theta >= 1");
        Regime r;
        r.kind = Kind::NonDegenerate;
        r.b0 = b0;
        r.theta = theta;
        r.c = c;
        return r;
    }
    static Regime degenerate(double theta1, double theta2, double c1, double c2) {
        if (!(theta1 > 2.0) || !(theta2 >= theta1) || !(c1 > 0.0) || !(c2 > 0.0))
            throw std::invalid_argument(
                "degenerate regime needs theta2 >= theta1 > 2 and c1, c2 > 0");
        Regime r;
        r.kind = Kind::Degenerate;
        r.theta1 = theta1;
        r.theta2 = theta2;
        r.c1 = c1;
        r.c2 = c2;
        return r;
    }
};

namespace detail {

// Adaptive Simpson quadrature; the recursion error estimate is the usual
// |S2 - S| / 15 Richardson bound.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw std::runtime_error("primitive quadrature did not converge");
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace detail

// The diffusion coefficient b with its regime, Holder exponent for sqrt(b),
// and (when available) a closed form for the primitive \int_0^r b.
struct DiffusionSpec {
    std::function<double(double)> b;
    Regime regime;
    double holder_gamma = 1.0;
    std::function<double(double)> closed_form_primitive;  // empty -> quadrature
    std::string family = "custom";
    bool bypass_validation = false;  // negative-control hook; see experiments

    double operator()(double r) const { return b(r); }
};

// primitive of b: uses the closed form when supplied, adaptive quadrature
// to 1e-10 otherwise. Always 0 at r = 0 and strictly increasing.
inline double primitive_b(const DiffusionSpec& spec, double r, double quad_tol = 1e-10) {
    if (spec.closed_form_primitive) return spec.closed_form_primitive(r);
    return detail::integrate(spec.b, 0.0, r, quad_tol);
}

// btilde(r) = primitive(r) - b0 * r, the monotone part split off in the
// non-degenerate regime.
inline double primitive_b_tilde(const DiffusionSpec& spec, double r) {
    if (spec.regime.kind != Regime::Kind::NonDegenerate)
        throw std::invalid_argument("btilde requires the non-degenerate regime");
    return primitive_b(spec, r) - spec.regime.b0 * r;
}

// ---------------------------------------------------------------------------
// Shipped coefficient families

inline DiffusionSpec make_constant(double b0) {
    DiffusionSpec s;
    s.b = [b0](double) { return b0; };
    s.regime = Regime::non_degenerate(b0, 1.0, b0);
    s.holder_gamma = 1.0;
    s.closed_form_primitive = [b0](double r) { return b0 * r; };
    s.family = "constant";
    return s;
}

inline DiffusionSpec make_affine_floor(double b0, double slope) {
    if (!(slope >= 0.0)) throw std::invalid_argument("affine_floor: slope must be >= 0");
    DiffusionSpec s;
    s.b = [b0, slope](double r) { return b0 + slope * std::abs(r); };
    s.regime = Regime::non_degenerate(b0, 2.0, b0 + slope);
    s.holder_gamma = 1.0;
    s.closed_form_primitive = [b0, slope](double r) {
        return b0 * r + 0.5 * slope * r * std::abs(r);
    };
    s.family = "affine_floor";
    return s;
}

inline DiffusionSpec make_porous(double c, double theta) {
    DiffusionSpec s;
    s.b = [c, theta](double r) { return c * std::pow(std::abs(r), theta - 1.0); };
    s.regime = Regime::degenerate(theta, theta, c, c);
    s.holder_gamma = theta >= 3.0 ? 1.0 : 0.25 * theta;  // midpoint of (1/2,(theta-1)/2)
    s.closed_form_primitive = [c, theta](double r) {
        return c * r * std::pow(std::abs(r), theta - 1.0) / theta;
    };
    s.family = "porous";
    return s;
}

inline DiffusionSpec make_porous_floor(double b0, double c, double theta) {
    DiffusionSpec s;
    s.b = [b0, c, theta](double r) { return b0 + c * std::pow(std::abs(r), theta - 1.0); };
    s.regime = Regime::non_degenerate(b0, theta, b0 + c);
    s.holder_gamma = 1.0;
    s.closed_form_primitive = [b0, c, theta](double r) {
        return b0 * r + c * r * std::pow(std::abs(r), theta - 1.0) / theta;
    };
    s.family = "porous_floor";
    return s;
}

// Smooth interpolation between floor b0 at r = 0 and ceiling b1 at infinity.
inline DiffusionSpec make_bounded(double b0, double b1) {
    if (!(b1 >= b0)) throw std::invalid_argument("bounded: needs b1 >= b0");
    DiffusionSpec s;
    s.b = [b0, b1](double r) { return b0 + (b1 - b0) * r * r / (1.0 + r * r); };
    s.regime = Regime::non_degenerate(b0, 1.0, b1);
    s.holder_gamma = 1.0;
    s.closed_form_primitive = [b0, b1](double r) {
        return b0 * r + (b1 - b0) * (r - std::atan(r));
    };
    s.family = "bounded";
    return s;
}

inline DiffusionSpec make_expression(const std::string& text, Regime regime,
                                     double holder_gamma = 1.0) {
    Expression e = Expression::parse(text);
    DiffusionSpec s;
    s.b = [e](double r) { return e(r); };
    s.regime = regime;
    s.holder_gamma = holder_gamma;
    s.family = "expr(" + text + ")";
    return s;
}

// Constant negative coefficient behind the validator bypass flag; exists so
// the harness honesty check has something to fail on.
inline DiffusionSpec make_anti_diffusion(double magnitude) {
    DiffusionSpec s;
    s.b = [magnitude](double) { return -magnitude; };
    s.regime = Regime::non_degenerate(1.0, 1.0, 1.0);  // deliberately wrong
    s.holder_gamma = 1.0;
    s.closed_form_primitive = [magnitude](double r) { return -magnitude * r; };
    s.family = "anti_diffusion";
    s.bypass_validation = true;
    return s;
}

// b(r) + tau; satisfies the non-degenerate hypothesis with floor tau (plus
// whatever floor b already had).
inline DiffusionSpec make_viscous(const DiffusionSpec& base, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("viscous: tau must be positive");
    DiffusionSpec s;
    auto b = base.b;
    s.b = [b, tau](double r) { return b(r) + tau; };
    if (base.regime.kind == Regime::Kind::NonDegenerate) {
        s.regime = Regime::non_degenerate(base.regime.b0 + tau, base.regime.theta,
                                          base.regime.c + tau);
    } else {
        s.regime =
            Regime::non_degenerate(tau, base.regime.theta2, base.regime.c2 + tau);
    }
    s.holder_gamma = base.holder_gamma;
    if (base.closed_form_primitive) {
        auto p = base.closed_form_primitive;
        s.closed_form_primitive = [p, tau](double r) { return p(r) + tau * r; };
    }
    s.family = base.family + "+tau";
    s.bypass_validation = base.bypass_validation;
    return s;
}

inline double viscous_b(const DiffusionSpec& spec, double tau, double r) {
    if (!(tau > 0.0)) throw std::invalid_argument("viscous_b: tau must be positive");
    return spec.b(r) + tau;
}

// ---------------------------------------------------------------------------
// Yosida regularization of the monotone part btilde = primitive - b0*r.
//
// The resolvent J solves J + eps*btilde(J) = r. The map is strictly
// increasing and fixes 0, so [min(0,r), max(0,r)] always brackets the root;
// bisection narrows it and a few Newton steps polish to the residual
// tolerance.
class YosidaRegularizer {
public:
    YosidaRegularizer(const DiffusionSpec& spec, double epsilon, double tolerance = 1e-10)
        : spec_(&spec), eps_(epsilon), tol_(tolerance) {
        if (spec.regime.kind != Regime::Kind::NonDegenerate)
            throw std::invalid_argument("Yosida regularization requires non-degenerate b");
        if (!(epsilon > 0.0)) throw std::invalid_argument("Yosida: epsilon must be positive");
    }

    double epsilon() const { return eps_; }
    double tolerance() const { return tol_; }
    const DiffusionSpec& spec() const { return *spec_; }

    double resolvent(double r) const {
        double lo = std::min(0.0, r);
        double hi = std::max(0.0, r);
        const double scale = 1.0 + std::abs(r);
        auto F = [&](double j) { return j + eps_ * primitive_b_tilde(*spec_, j); };
        if (F(lo) - r > tol_ * scale || F(hi) - r < -tol_ * scale)
            throw std::runtime_error(
                "yosida resolvent: bracket failed; b is not monotone-compatible");
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * scale; ++it) {
            mid = 0.5 * (lo + hi);
            if (F(mid) > r)
                hi = mid;
            else
                lo = mid;
        }
        double j = 0.5 * (lo + hi);
        for (int it = 0; it < 4; ++it) {  // Newton polish
            const double res = F(j) - r;
            const double slope = 1.0 + eps_ * (spec_->b(j) - spec_->regime.b0);
            const double next = j - res / slope;
            if (std::isfinite(next) && next >= std::min(0.0, r) && next <= std::max(0.0, r))
                j = next;
        }
        if (std::abs(F(j) - r) > tol_ * scale)
            throw std::runtime_error("yosida resolvent: residual above tolerance");
        return j;
    }

    // btilde_eps(r) = (r - J_eps(r)) / eps = btilde(J_eps(r))
    double b_tilde_eps(double r) const { return (r - resolvent(r)) / eps_; }

    // primitive_eps(r) = btilde_eps(r) + b0*r
    double primitive_eps(double r) const {
        return b_tilde_eps(r) + spec_->regime.b0 * r;
    }

    // b_eps(r) = b0 + (b(J) - b0) / (1 + eps*(b(J) - b0)); always within
    // [b0, b0 + 2/eps].
    double b_eps(double r) const {
        const double bj = spec_->b(resolvent(r));
        const double excess = bj - spec_->regime.b0;
        return spec_->regime.b0 + excess / (1.0 + eps_ * excess);
    }

private:
    const DiffusionSpec* spec_;
    double eps_;
    double tol_;
};

// Tabulated b_eps for hot loops. Linear interpolation on a uniform grid;
// construction measures the worst interpolation error against the exact
// solve so callers can decide whether the table is usable. Queries outside
// the table range fall back to the exact resolvent.
class YosidaTable {
public:
    YosidaTable(const YosidaRegularizer& y, double lo, double hi, int n_points = 16385)
        : y_(&y), lo_(lo), hi_(hi) {
        if (!(hi > lo) || n_points < 16)
            throw std::invalid_argument("YosidaTable: bad range or resolution");
        values_.resize(static_cast<std::size_t>(n_points));
        dr_ = (hi - lo) / static_cast<double>(n_points - 1);
        for (int i = 0; i < n_points; ++i)
            values_[static_cast<std::size_t>(i)] = y.b_eps(lo + dr_ * i);
        // validation pass on midpoints
        max_error_ = 0.0;
        for (int i = 0; i + 1 < n_points; i += 7) {
            const double r = lo + dr_ * (i + 0.5);
            max_error_ = std::max(max_error_, std::abs(eval_interp(r) - y.b_eps(r)));
        }
    }

    double max_validation_error() const { return max_error_; }

    double operator()(double r) const {
        if (r < lo_ || r > hi_) return y_->b_eps(r);
        return eval_interp(r);
    }

private:
    double eval_interp(double r) const {
        const double t = (r - lo_) / dr_;
        std::size_t i = static_cast<std::size_t>(t);
        if (i + 1 >= values_.size()) i = values_.size() - 2;
        const double frac = t - static_cast<double>(i);
        return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
    }

    const YosidaRegularizer* y_;
    double lo_, hi_, dr_;
    double max_error_ = 0.0;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Hypothesis validators. Sampling-based on [-R, R]: reported as "checked on
// range", never proved.

struct HypothesisReport {
    bool positivity_ok = true;
    bool growth_ok = true;
    bool holder_ok = true;
    int growth_violations = 0;
    double worst_growth_excess = 0.0;   // max relative overshoot of the envelope
    double holder_constant = 0.0;       // sup |sqrt b(r1)-sqrt b(r2)| / |r1-r2|^gamma
    double holder_scale_slope = 0.0;    // d log C / d log scale; < 0 means blow-up
    double sample_range = 0.0;
    int sample_count = 0;

    bool pass() const { return positivity_ok && growth_ok && holder_ok; }
};

inline HypothesisReport validate_hypotheses(const DiffusionSpec& spec, double R,
                                            int sample_count = 4000) {
    if (!(R > 0.0)) throw std::invalid_argument("validate_hypotheses: R must be positive");
    HypothesisReport rep;
    rep.sample_range = R;
    rep.sample_count = sample_count;
    if (spec.bypass_validation) return rep;  // negative-control hook

    const double rel_slack = 1e-9;
    std::vector<double> rs(static_cast<std::size_t>(sample_count));
    for (int i = 0; i < sample_count; ++i)
        rs[static_cast<std::size_t>(i)] =
            -R + 2.0 * R * static_cast<double>(i) / static_cast<double>(sample_count - 1);

    for (double r : rs) {
        const double br = spec.b(r);
        if (!(br > 0.0) || !std::isfinite(br)) rep.positivity_ok = false;
        double lo = 0.0, hi = 0.0;
        if (spec.regime.kind == Regime::Kind::NonDegenerate) {
            lo = spec.regime.b0;
            hi = spec.regime.c * (1.0 + std::pow(std::abs(r), spec.regime.theta - 1.0));
        } else {
            lo = spec.regime.c1 * std::pow(std::abs(r), spec.regime.theta1 - 1.0);
            hi = spec.regime.c2 * (1.0 + std::pow(std::abs(r), spec.regime.theta2 - 1.0));
        }
        if (br < lo * (1.0 - rel_slack) - rel_slack || br > hi * (1.0 + rel_slack) + rel_slack) {
            ++rep.growth_violations;
            rep.worst_growth_excess =
                std::max(rep.worst_growth_excess,
                         std::max(lo - br, br - hi) / std::max(1.0, hi));
        }
    }
    rep.growth_ok = rep.growth_violations == 0;

    // Holder constant of sqrt(b) at small dyadic pair scales; if the constant
    // keeps growing as the scale shrinks, the chosen gamma is too large. The
    // coarse scales are skipped: quotients of smooth b only stabilize once the
    // pair distance resolves the derivative.
    const double gamma = spec.holder_gamma;
    std::vector<double> log_scale, log_const;
    for (int k = 5; k <= 12; ++k) {
        const double d = R * std::pow(2.0, -k);
        double worst = 0.0;
        const int pairs = 800;
        for (int i = 0; i < pairs; ++i) {
            const double r1 = -R + 2.0 * R * (static_cast<double>(i) + 0.31) /
                                      static_cast<double>(pairs);
            const double r2 = r1 + d;
            if (r2 > R) continue;
            const double q = std::abs(std::sqrt(std::max(spec.b(r1), 0.0)) -
                                      std::sqrt(std::max(spec.b(r2), 0.0))) /
                             std::pow(d, gamma);
            worst = std::max(worst, q);
        }
        rep.holder_constant = std::max(rep.holder_constant, worst);
        if (worst > 0.0) {
            log_scale.push_back(std::log(d));
            log_const.push_back(std::log(worst));
        }
    }
    if (log_scale.size() >= 3) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const std::size_t n = log_scale.size();
        for (std::size_t i = 0; i < n; ++i) {
            sx += log_scale[i];
            sy += log_const[i];
        }
        const double mx = sx / n, my = sy / n;
        for (std::size_t i = 0; i < n; ++i) {
            sxx += (log_scale[i] - mx) * (log_scale[i] - mx);
            sxy += (log_scale[i] - mx) * (log_const[i] - my);
        }
        rep.holder_scale_slope = sxy / sxx;
    }
    rep.holder_ok = std::isfinite(rep.holder_constant) && rep.holder_scale_slope > -0.05;
    return rep;
}

// ---------------------------------------------------------------------------
// Nondegeneracy of the kinetic symbol iu + b(xi) n^2: Lebesgue measure of
// {xi in [eta_lo, eta_hi] : |L| <= delta}, maximized over a u-grid and
// |n| ~ J, estimated on a uniform xi-grid.

struct SymbolEstimate {
    double omega = 0.0;           // measure estimate
    double reference_rate = 0.0;  // (delta / J^2)^(1/(theta1-1))
};

inline SymbolEstimate symbol_nondegeneracy(const DiffusionSpec& spec, double eta_lo,
                                           double eta_hi, double J, double delta,
                                           int xi_points = 100000) {
    if (!(delta > 0.0) || !(J >= 1.0) || !(eta_hi > eta_lo))
        throw std::invalid_argument("symbol_nondegeneracy: need delta > 0, J >= 1");
    const double n = std::round(J);
    const double n2 = n * n;
    const double dxi = (eta_hi - eta_lo) / static_cast<double>(xi_points);

    // |L|^2 = u^2 + b(xi)^2 n^4; only |u| <= delta contributes, and the
    // measure is largest near u = 0.
    double max_abs_b = 0.0;
    std::vector<double> bvals(static_cast<std::size_t>(xi_points));
    for (int i = 0; i < xi_points; ++i) {
        const double xi = eta_lo + (static_cast<double>(i) + 0.5) * dxi;
        bvals[static_cast<std::size_t>(i)] = spec.b(xi);
        max_abs_b = std::max(max_abs_b, std::abs(bvals[static_cast<std::size_t>(i)]));
    }
    const double u_cap = std::min(delta, 10.0 * max_abs_b * n2);
    SymbolEstimate est;
    for (int ui = 0; ui <= 16; ++ui) {
        const double u = u_cap * static_cast<double>(ui) / 16.0;
        if (u > delta) break;
        const double budget2 = delta * delta - u * u;
        int count = 0;
        for (int i = 0; i < xi_points; ++i) {
            const double bb = bvals[static_cast<std::size_t>(i)];
            if (bb * bb * n2 * n2 <= budget2) ++count;
        }
        est.omega = std::max(est.omega, count * dxi);
    }
    const double theta1 =
        spec.regime.kind == Regime::Kind::Degenerate ? spec.regime.theta1 : spec.regime.theta;
    est.reference_rate = std::pow(delta / (J * J), 1.0 / std::max(theta1 - 1.0, 1e-12));
    return est;
}

struct SymbolDecayFit {
    double fitted_exponent = 0.0;     // slope of log omega vs log delta
    double reference_exponent = 0.0;  // 1 / (theta1 - 1)
    std::vector<double> deltas;
    std::vector<double> omegas;
};

inline SymbolDecayFit symbol_decay_fit(const DiffusionSpec& spec, double eta_lo,
                                       double eta_hi, double J,
                                       const std::vector<double>& deltas,
                                       int xi_points = 100000) {
    SymbolDecayFit fit;
    std::vector<double> lx, ly;
    for (double d : deltas) {
        const auto est = symbol_nondegeneracy(spec, eta_lo, eta_hi, J, d, xi_points);
        fit.deltas.push_back(d);
        fit.omegas.push_back(est.omega);
        if (est.omega > 0.0) {
            lx.push_back(std::log(d));
            ly.push_back(std::log(est.omega));
        }
    }
    if (lx.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const std::size_t n = lx.size();
        for (std::size_t i = 0; i < n; ++i) {
            sx += lx[i];
            sy += ly[i];
        }
        const double mx = sx / n, my = sy / n;
        for (std::size_t i = 0; i < n; ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        fit.fitted_exponent = sxy / sxx;
    }
    const double theta1 =
        spec.regime.kind == Regime::Kind::Degenerate ? spec.regime.theta1 : spec.regime.theta;
    fit.reference_exponent = 1.0 / std::max(theta1 - 1.0, 1e-12);
    return fit;
}

}  // namespace spde
