#include "httool/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "httool/errors.hpp"

namespace httool {

namespace {

// 15-point Kronrod abscissae on [-1,1]; even entries form the 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

double eval_checked(const Integrand& f, double x) {
    const double y = f(x);
    if (std::isnan(y)) {
        std::ostringstream os;
        os << "integrand returned NaN at x = " << x;
        throw EvaluationError(os.str());
    }
    return y;
}

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double err = 0.0;
    bool splittable = true;
};

// One G7/K15 evaluation with the QUADPACK-style sharpened error estimate.
Panel gk15(const Integrand& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);

    double fv_plus[7];
    double fv_minus[7];
    const double fc = eval_checked(f, centre);

    double resg = kWg[3] * fc;
    double resk = kWgk[7] * fc;
    double resabs = kWgk[7] * std::fabs(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = hlgth * kXgk[j];
        fv_plus[j] = eval_checked(f, centre + dx);
        fv_minus[j] = eval_checked(f, centre - dx);
        const double fsum = fv_plus[j] + fv_minus[j];
        if (j % 2 == 1)
            resg += kWg[j / 2] * fsum;
        resk += kWgk[j] * fsum;
        resabs += kWgk[j] * (std::fabs(fv_plus[j]) + std::fabs(fv_minus[j]));
    }

    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::fabs(fv_plus[j] - reskh) + std::fabs(fv_minus[j] - reskh));

    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk * hlgth;
    resabs *= std::fabs(hlgth);
    resasc *= std::fabs(hlgth);

    double err = std::fabs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    const double uflow = std::numeric_limits<double>::min();
    if (resabs > uflow / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);
    p.err = err;
    return p;
}

double neumaier_sum(const std::vector<double>& xs) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

// Seed points: user breakpoints plus decade marks. Decade marks keep
// narrow features (e^{-y} mass on [0,1e7], y^{alpha-1} spikes near 0)
// from being invisible to the coarse first panels.
std::vector<double> seed_points(double a, double b, std::span<const double> breakpoints) {
    std::vector<double> pts;
    for (double x : breakpoints)
        if (x > a && x < b)
            pts.push_back(x);

    const double lo_scale = std::max(a, b * 1e-9);
    if (lo_scale > 0.0 && b > lo_scale) {
        int k_lo = static_cast<int>(std::floor(std::log10(lo_scale)));
        int k_hi = static_cast<int>(std::ceil(std::log10(b)));
        k_hi = std::min(k_hi, k_lo + 40);
        for (int k = k_lo; k <= k_hi; ++k) {
            const double x = std::pow(10.0, k);
            if (x > a && x < b)
                pts.push_back(x);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

struct PanelWorse {
    bool operator()(const Panel& x, const Panel& y) const { return x.err < y.err; }
};

} // namespace

QuadratureResult integrate_finite(const Integrand& f, double a, double b,
                                  std::span<const double> breakpoints,
                                  const QuadratureConfig& cfg) {
    if (!(a >= 0.0) || !(b >= a) || !std::isfinite(b))
        throw DomainError("integrate_finite requires 0 <= a <= b < infinity");
    QuadratureResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }

    std::priority_queue<Panel, std::vector<Panel>, PanelWorse> active;
    std::vector<Panel> settled; // panels too narrow to split further

    const std::vector<double> seeds = seed_points(a, b, breakpoints);
    double total_value = 0.0;
    double total_err = 0.0;
    {
        double lo = a;
        for (double s : seeds) {
            Panel p = gk15(f, lo, s);
            total_value += p.value;
            total_err += p.err;
            active.push(p);
            lo = s;
        }
        Panel p = gk15(f, lo, b);
        total_value += p.value;
        total_err += p.err;
        active.push(p);
    }

    int nsub = 0;
    while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total_value)) &&
           nsub < cfg.max_subdivisions && !active.empty()) {
        Panel worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            worst.splittable = false;
            settled.push_back(worst);
            continue;
        }
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        active.push(left);
        active.push(right);
        ++nsub;
    }

    // Exact resummation of the final panel decomposition.
    std::vector<double> vals;
    std::vector<double> errs;
    vals.reserve(active.size() + settled.size());
    errs.reserve(active.size() + settled.size());
    for (const Panel& p : settled) {
        vals.push_back(p.value);
        errs.push_back(p.err);
    }
    while (!active.empty()) {
        vals.push_back(active.top().value);
        errs.push_back(active.top().err);
        active.pop();
    }
    res.value = neumaier_sum(vals);
    res.abs_error_estimate = neumaier_sum(errs);
    res.subdivisions = nsub;
    res.converged = res.abs_error_estimate <=
                    std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(res.value));
    return res;
}

namespace {

// z = a/(1-u) maps [a, inf) to u in [0,1).
double u_of_z(double a, double z) { return 1.0 - a / z; }

Integrand substituted(const Integrand& f, double a) {
    return [&f, a](double u) {
        const double one_minus = 1.0 - u;
        const double z = a / one_minus;
        const double y = f(z);
        if (std::isnan(y)) {
            std::ostringstream os;
            os << "integrand returned NaN at z = " << z;
            throw EvaluationError(os.str());
        }
        return y * a / (one_minus * one_minus);
    };
}

// Octave images 1 - 2^{-k}: one seed per doubling of z, so every octave of
// the original axis owns at least one panel.
std::vector<double> octave_seeds(double u_max) {
    std::vector<double> seeds;
    double u = 0.5;
    while (u < u_max && seeds.size() < 2000) {
        seeds.push_back(u);
        u = 0.5 * (1.0 + u);
    }
    return seeds;
}

} // namespace

QuadratureResult integrate_tail(const Integrand& f, double a,
                                const QuadratureConfig& cfg,
                                std::optional<double> decay_exponent,
                                std::span<const double> breakpoints) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("integrate_tail requires a > 0");

    const Integrand g = substituted(f, a);

    std::vector<double> u_breaks;
    for (double z : breakpoints)
        if (z > a && std::isfinite(z))
            u_breaks.push_back(u_of_z(a, z));

    if (decay_exponent && *decay_exponent > 1.0) {
        const double p = *decay_exponent;
        // Find the cutoff where the power-law remainder bound is negligible.
        const double z_cap = 1e120 * std::max(1.0, a);
        double z_max = 2.0 * a;
        double remainder = 0.0;
        for (int k = 0; k < 600; ++k) {
            remainder = std::max(std::fabs(eval_checked(f, z_max)),
                                 std::fabs(eval_checked(f, 1.37 * z_max))) *
                        z_max / (p - 1.0);
            if (!(remainder > 0.1 * cfg.abs_tol) || z_max >= z_cap)
                break;
            z_max *= 2.0;
        }
        const double u_max = u_of_z(a, z_max);

        std::vector<double> seeds = octave_seeds(u_max);
        seeds.insert(seeds.end(), u_breaks.begin(), u_breaks.end());
        QuadratureResult r = integrate_finite(g, 0.0, u_max, seeds, cfg);
        r.abs_error_estimate += remainder;
        r.converged = r.abs_error_estimate <=
                      std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(r.value));
        return r;
    }

    // No decay hint: double the truncation point until Cauchy.
    QuadratureResult total;
    double u_lo = 0.0;
    double increment = std::numeric_limits<double>::infinity();
    bool cauchy = false;
    const int max_doublings = 120;
    int budget = cfg.max_subdivisions;
    for (int k = 1; k <= max_doublings && budget > 0; ++k) {
        const double u_hi = 1.0 - std::ldexp(1.0, -k); // z in [a*2^{k-1}, a*2^k]
        QuadratureConfig seg_cfg = cfg;
        seg_cfg.max_subdivisions = budget;
        QuadratureResult seg = integrate_finite(g, u_lo, u_hi, u_breaks, seg_cfg);
        budget -= seg.subdivisions;
        total.value += seg.value;
        total.abs_error_estimate += seg.abs_error_estimate;
        total.subdivisions += seg.subdivisions;
        increment = std::fabs(seg.value);
        u_lo = u_hi;
        if (increment < std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total.value))) {
            cauchy = true;
            break;
        }
    }
    if (!cauchy) {
        std::ostringstream os;
        os << "tail integral from " << a
           << " is not Cauchy after " << max_doublings
           << " doublings (last increment " << increment << "): divergent";
        throw DivergenceError(os.str());
    }
    // Unclaimed tail beyond the last truncation.
    total.abs_error_estimate += increment;
    total.converged = total.abs_error_estimate <=
                      std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total.value));
    return total;
}

std::optional<double> estimate_decay_exponent(const Integrand& f, double from) {
    const double z1 = std::max(from, 1.0) * 1048576.0; // 2^20 past the start
    const double z2 = 2.0 * z1;
    const double f1 = std::fabs(f(z1));
    const double f2 = std::fabs(f(z2));
    if (!std::isfinite(f1) || !std::isfinite(f2) || f1 <= 0.0 || f2 <= 0.0)
        return std::nullopt;
    const double p_emp = -std::log2(f2 / f1);
    if (!(p_emp > 1.0))
        return std::nullopt;
    // Shrink toward 1 so slowly varying factors cannot defeat the bound.
    const double p = 1.0 + 0.8 * (p_emp - 1.0);
    if (p <= 1.02)
        return std::nullopt;
    return std::min(p, 60.0);
}

} // namespace httool
