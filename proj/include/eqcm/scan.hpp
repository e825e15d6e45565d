// Parameter sweeps along affine paths and 2D grids, finite-difference
// derivatives, and first/second-order transition classification.
#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "eqcm/correlations.hpp"
#include "eqcm/fermions.hpp"
#include "eqcm/model.hpp"

namespace eqcm {

enum class Quantity { mutual_info, classical, discord, concurrence, cxx, cyy, czz, mz, gap, e0 };

inline constexpr std::array kAllQuantities{Quantity::mutual_info, Quantity::classical, Quantity::discord,
                                           Quantity::concurrence, Quantity::cxx,       Quantity::cyy,
                                           Quantity::czz,         Quantity::mz,        Quantity::gap,
                                           Quantity::e0};

inline std::string_view quantity_name(Quantity q) {
    switch (q) {
        case Quantity::mutual_info: return "mutual_info";
        case Quantity::classical: return "classical";
        case Quantity::discord: return "discord";
        case Quantity::concurrence: return "concurrence";
        case Quantity::cxx: return "cxx";
        case Quantity::cyy: return "cyy";
        case Quantity::czz: return "czz";
        case Quantity::mz: return "mz";
        case Quantity::gap: return "gap";
        case Quantity::e0: return "e0_per_site";
    }
    return "?";
}

inline std::optional<Quantity> parse_quantity(std::string_view name) {
    if (name == "e0") return Quantity::e0;
    for (Quantity q : kAllQuantities)
        if (quantity_name(q) == name) return q;
    return std::nullopt;
}

/// (dJ1, dJ2, dL1, dL2, dh)
using Direction = std::array<double, 5>;

inline ModelParams shifted(const ModelParams& base, const Direction& dir, double t) {
    ModelParams p = base;
    p.j1 += t * dir[0];
    p.j2 += t * dir[1];
    p.l1 += t * dir[2];
    p.l2 += t * dir[3];
    p.h += t * dir[4];
    return p;
}

/// Everything the pipeline produces for one bond at one parameter point.
struct PointEvaluation {
    ModelParams params;
    BondKind bond = BondKind::odd;
    BondCorrelators correlators;
    CorrelationMeasures measures;
    double gap = std::numeric_limits<double>::quiet_NaN();
    double e0_per_site = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;
    std::string error;

    bool ok() const { return error.empty(); }

    double value(Quantity q) const {
        if (!ok()) return std::numeric_limits<double>::quiet_NaN();
        switch (q) {
            case Quantity::mutual_info: return measures.mutual_info;
            case Quantity::classical: return measures.classical;
            case Quantity::discord: return measures.discord;
            case Quantity::concurrence: return measures.concurrence;
            case Quantity::cxx: return correlators.cxx;
            case Quantity::cyy: return correlators.cyy;
            case Quantity::czz: return correlators.czz;
            case Quantity::mz: return correlators.mz_left;
            case Quantity::gap: return gap;
            case Quantity::e0: return e0_per_site;
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
};

/// model-core -> fermion correlators (momentum route) -> X-state measures.
/// Failures are captured in `error` rather than thrown.
inline PointEvaluation evaluate_point(const ModelParams& p, BondKind bond, const MeasureOptions& opt = {}) {
    PointEvaluation ev;
    ev.params = p;
    ev.bond = bond;
    try {
        const auto nn = momentum_correlators(p);
        ev.correlators = nn.bond(bond);
        ev.degenerate = nn.degenerate();
        ev.measures = correlation_measures(assemble_xstate(ev.correlators), opt);
        ev.gap = acoustic_gap(p);
        ev.e0_per_site = ground_energy(p).per_site;
    } catch (const std::exception& e) {
        ev.error = e.what();
    }
    return ev;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Each index is handled exactly once; fn must not share state.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
}

// ---------------------------------------------------------------------------
// 1D sweeps
// ---------------------------------------------------------------------------

struct SweepSpec {
    ModelParams base;
    Direction slope{};
    double t_min = 0.0;
    double t_max = 1.0;
    int samples = 101;
    BondKind bond = BondKind::odd;
    std::vector<Quantity> quantities{kAllQuantities.begin(), kAllQuantities.end()};
    MeasureOptions measure;
    int threads = 0;

    void validate() const {
        base.validate();
        if (samples < 16) throw std::invalid_argument("sweep needs at least 16 samples");
        if (!std::isfinite(t_min) || !std::isfinite(t_max) || !(t_max > t_min)) {
            throw std::invalid_argument("sweep needs finite t_min < t_max");
        }
        for (double d : slope)
            if (!std::isfinite(d)) throw std::invalid_argument("sweep slope must be finite");
    }

    double t_at(int i) const { return t_min + (t_max - t_min) * i / (samples - 1); }
    double spacing() const { return (t_max - t_min) / (samples - 1); }
    ModelParams params_at(double t) const { return shifted(base, slope, t); }

    /// Same path with `factor` times the sample density; keeps every coarse sample.
    SweepSpec refined(int factor = 2) const {
        SweepSpec r = *this;
        r.samples = factor * (samples - 1) + 1;
        return r;
    }
};

struct Sample {
    double t = 0.0;
    PointEvaluation eval;

    double value(Quantity q) const { return eval.value(q); }
    bool degenerate() const { return eval.degenerate; }
};

struct SweepResult {
    SweepSpec spec;
    std::vector<Sample> samples;

    std::vector<double> series(Quantity q) const {
        std::vector<double> out;
        out.reserve(samples.size());
        for (const auto& s : samples) out.push_back(s.value(q));
        return out;
    }
};

inline SweepResult sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult res;
    res.spec = spec;
    res.samples.resize(static_cast<std::size_t>(spec.samples));
    parallel_for(res.samples.size(), spec.threads, [&](std::size_t i) {
        const double t = spec.t_at(static_cast<int>(i));
        res.samples[i] = {t, evaluate_point(spec.params_at(t), spec.bond, spec.measure)};
    });
    return res;
}

// ---------------------------------------------------------------------------
// Derivatives
// ---------------------------------------------------------------------------

struct DerivativeSeries {
    std::vector<double> t;
    std::vector<double> value;
    double spacing = 0.0;
};

/**
 * Central differences inside, second-order one-sided differences at the ends.
 * Points whose stencil touches an excluded or non-finite sample are NaN.
 * Throws on fewer than 3 samples or non-uniform spacing.
 */
inline DerivativeSeries finite_difference(std::span<const double> t, std::span<const double> y,
                                          std::span<const bool> excluded = {}) {
    const std::size_t n = t.size();
    if (n < 3 || y.size() != n) throw std::invalid_argument("finite_difference needs >= 3 matching samples");
    if (!excluded.empty() && excluded.size() != n) throw std::invalid_argument("finite_difference: mask size");
    const double dt = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
            throw std::invalid_argument("finite_difference: non-uniform spacing at index " + std::to_string(i));
        }
    }
    auto usable = [&](std::size_t i) { return std::isfinite(y[i]) && (excluded.empty() || !excluded[i]); };
    const double nan = std::numeric_limits<double>::quiet_NaN();

    DerivativeSeries d;
    d.t.assign(t.begin(), t.end());
    d.value.assign(n, nan);
    d.spacing = dt;
    if (usable(0) && usable(1) && usable(2)) d.value[0] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * dt);
    if (usable(n - 1) && usable(n - 2) && usable(n - 3))
        d.value[n - 1] = (3 * y[n - 1] - 4 * y[n - 2] + y[n - 3]) / (2 * dt);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (usable(i - 1) && usable(i) && usable(i + 1)) d.value[i] = (y[i + 1] - y[i - 1]) / (2 * dt);
    }
    return d;
}

inline DerivativeSeries finite_difference(const SweepResult& res, Quantity q) {
    std::vector<double> t, y;
    std::vector<char> mask;
    for (const auto& s : res.samples) {
        t.push_back(s.t);
        y.push_back(s.value(q));
        mask.push_back(s.degenerate() ? 1 : 0);
    }
    std::unique_ptr<bool[]> excluded(new bool[mask.size()]);
    for (std::size_t i = 0; i < mask.size(); ++i) excluded[i] = mask[i] != 0;
    return finite_difference(t, y, std::span<const bool>(excluded.get(), mask.size()));
}

// ---------------------------------------------------------------------------
// Transition classification
// ---------------------------------------------------------------------------

enum class TransitionOrder { first, second, unresolved };

inline std::string_view to_string(TransitionOrder o) {
    switch (o) {
        case TransitionOrder::first: return "first-order";
        case TransitionOrder::second: return "second-order";
        case TransitionOrder::unresolved: return "unresolved";
    }
    return "?";
}

/// Zero means "use the default": 10x the median absolute adjacent difference
/// (jump) or 10x the median absolute derivative (peak).
struct Thresholds {
    double jump = 0.0;
    double peak = 0.0;
};

struct CriticalPointReport {
    double t = 0.0;
    ModelParams params;
    TransitionOrder order = TransitionOrder::unresolved;
    /// Largest adjacent-sample change of the quantity near t (coarse grid).
    double jump = 0.0;
    /// refined jump / coarse jump; NaN without a refined sweep.
    double jump_ratio = std::numeric_limits<double>::quiet_NaN();
    /// Largest |derivative| near t (coarse grid).
    double peak = 0.0;
    /// refined peak / coarse peak; NaN without a refined sweep.
    double peak_ratio = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double median_abs(std::vector<double> v) {
    std::erase_if(v, [](double x) { return !std::isfinite(x); });
    if (v.empty()) return 0.0;
    for (auto& x : v) x = std::abs(x);
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

/// Adjacent differences y[i+1] - y[i]; NaN where either end is not finite.
/// Degenerate samples take part: a level crossing often shows up only there.
inline std::vector<double> adjacent_jumps(const std::vector<double>& y) {
    std::vector<double> d(y.size() > 0 ? y.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < y.size(); ++i) d[i] = y[i + 1] - y[i];
    return d;
}

/// Largest finite |jump| over intervals [t_i, t_{i+1}] that overlap [lo, hi].
inline double max_jump_in(const SweepResult& r, const std::vector<double>& jumps, double lo, double hi) {
    double best = 0.0;
    const double eps = 1e-12 * std::max(1.0, std::abs(hi - lo));
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        const double a = r.samples[i].t, b = r.samples[i + 1].t;
        if (b < lo - eps || a > hi + eps) continue;
        if (std::isfinite(jumps[i])) best = std::max(best, std::abs(jumps[i]));
    }
    return best;
}

inline double max_abs_in(const DerivativeSeries& d, double lo, double hi) {
    double best = 0.0;
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        if (d.t[i] < lo || d.t[i] > hi || !std::isfinite(d.value[i])) continue;
        best = std::max(best, std::abs(d.value[i]));
    }
    return best;
}

struct Candidates {
    std::vector<CriticalPointReport> jumps;
    std::vector<CriticalPointReport> peaks;
    std::vector<std::pair<double, double>> jump_spans;
};

inline Candidates find_candidates(const SweepResult& r, Quantity q, const Thresholds& th) {
    const auto y = r.series(q);
    const auto jumps = adjacent_jumps(y);
    const auto deriv = finite_difference(r, q);
    const double dt = r.spec.spacing();

    const double floor = 1e-9;
    const double jump_thr = th.jump > 0 ? th.jump : std::max(10.0 * median_abs(jumps), floor);
    const double peak_thr = th.peak > 0 ? th.peak : std::max(10.0 * median_abs(deriv.value), floor);

    Candidates c;
    for (std::size_t i = 0; i < jumps.size();) {
        if (!(std::abs(jumps[i]) > jump_thr)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        double biggest = 0.0;
        while (j < jumps.size() && std::abs(jumps[j]) > jump_thr) biggest = std::max(biggest, std::abs(jumps[j++]));
        const double lo = r.samples[i].t, hi = r.samples[j].t;
        CriticalPointReport rep;
        rep.t = 0.5 * (lo + hi);
        rep.params = r.spec.params_at(rep.t);
        rep.jump = biggest;
        rep.peak = max_abs_in(deriv, lo - dt, hi + dt);
        c.jumps.push_back(rep);
        c.jump_spans.emplace_back(lo, hi);
        i = j;
    }

    // Local maxima of |d| above threshold; of maxima closer than three
    // spacings only the tallest is kept.
    std::vector<std::size_t> maxima;
    const std::size_t n = deriv.value.size();
    auto mag = [&](std::size_t i) { return std::isfinite(deriv.value[i]) ? std::abs(deriv.value[i]) : 0.0; };
    // Interior points only, with both neighbours usable: a monotone slope
    // running into the sweep edge or into an excluded sample is not a peak.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(mag(i) > peak_thr)) continue;
        if (!std::isfinite(deriv.value[i - 1]) || !std::isfinite(deriv.value[i + 1])) continue;
        if (mag(i - 1) > mag(i) || mag(i + 1) >= mag(i)) continue;
        maxima.push_back(i);
    }
    std::stable_sort(maxima.begin(), maxima.end(), [&](auto a, auto b) { return mag(a) > mag(b); });
    std::vector<std::size_t> kept;
    for (std::size_t i : maxima) {
        const bool close = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return std::abs(deriv.t[k] - deriv.t[i]) < 3.0 * dt * (1 + 1e-9);
        });
        if (!close) kept.push_back(i);
    }
    std::sort(kept.begin(), kept.end());
    for (std::size_t i : kept) {
        CriticalPointReport rep;
        rep.t = deriv.t[i];
        rep.params = r.spec.params_at(rep.t);
        rep.peak = mag(i);
        rep.jump = max_jump_in(r, jumps, rep.t - dt, rep.t + dt);
        c.peaks.push_back(rep);
    }
    return c;
}

/// Index of the jump candidate whose span, widened by two spacings, holds t; -1 if none.
inline int near_jump(const Candidates& c, double t, double dt) {
    const double pad = 2.0 * dt * (1.0 + 1e-9);
    for (std::size_t k = 0; k < c.jump_spans.size(); ++k) {
        if (t >= c.jump_spans[k].first - pad && t <= c.jump_spans[k].second + pad) return static_cast<int>(k);
    }
    return -1;
}

}  // namespace detail

/// Candidates from a single resolution; all come back unresolved.
inline std::vector<CriticalPointReport> classify_transitions(const SweepResult& res, Quantity q,
                                                             const Thresholds& th = {}) {
    auto c = detail::find_candidates(res, q, th);
    std::vector<CriticalPointReport> out = c.jumps;
    const double dt = res.spec.spacing();
    for (const auto& p : c.peaks) {
        if (detail::near_jump(c, p.t, dt) < 0) out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    return out;
}

/**
 * Two-resolution classification. With s = refined spacing / coarse spacing:
 *  - first order: a jump above threshold whose refined size stays above
 *    (1 + s)/2 of the coarse one (a smooth change would shrink by s);
 *  - second order: a derivative peak above threshold that keeps at least 90%
 *    of its height under refinement while the local jump shrinks below (1 + s)/2;
 *  - anything else above threshold is unresolved.
 * First order wins when both fire within two coarse spacings.
 */
inline std::vector<CriticalPointReport> classify_transitions(const SweepResult& coarse, const SweepResult& refined,
                                                             Quantity q, const Thresholds& th = {}) {
    const double dt = coarse.spec.spacing();
    const double dt_ref = refined.spec.spacing();
    if (!(dt_ref <= 0.5 * dt * (1 + 1e-9))) {
        throw std::invalid_argument("classify_transitions: refined sweep must be at least twice as dense");
    }
    const double s = dt_ref / dt;
    const double shrink_cut = 0.5 * (1.0 + s);

    const auto cand = detail::find_candidates(coarse, q, th);
    const auto ref_jumps = detail::adjacent_jumps(refined.series(q));
    const auto ref_deriv = finite_difference(refined, q);

    std::vector<CriticalPointReport> out;
    for (std::size_t k = 0; k < cand.jumps.size(); ++k) {
        auto rep = cand.jumps[k];
        const auto [lo, hi] = cand.jump_spans[k];
        rep.jump_ratio = detail::max_jump_in(refined, ref_jumps, lo, hi) / rep.jump;
        const double ref_peak = detail::max_abs_in(ref_deriv, lo - dt, hi + dt);
        rep.peak_ratio = rep.peak > 0 ? ref_peak / rep.peak : std::numeric_limits<double>::quiet_NaN();
        rep.order = rep.jump_ratio > shrink_cut ? TransitionOrder::first : TransitionOrder::unresolved;
        out.push_back(rep);
    }
    for (auto rep : cand.peaks) {
        const double ref_peak = detail::max_abs_in(ref_deriv, rep.t - 2 * dt, rep.t + 2 * dt);
        rep.peak_ratio = ref_peak / rep.peak;
        const double ref_jump = detail::max_jump_in(refined, ref_jumps, rep.t - dt, rep.t + dt);
        rep.jump_ratio = rep.jump > 0 ? ref_jump / rep.jump : 0.0;
        const bool persists = rep.peak_ratio >= 0.9;
        const bool shrinks = rep.jump_ratio <= shrink_cut;
        rep.order = (persists && shrinks) ? TransitionOrder::second : TransitionOrder::unresolved;

        const int near = detail::near_jump(cand, rep.t, dt);
        if (near < 0) {
            out.push_back(rep);
        } else if (out[near].order != TransitionOrder::first && rep.order == TransitionOrder::second) {
            out[near] = rep;
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    return out;
}

// ---------------------------------------------------------------------------
// 2D scans
// ---------------------------------------------------------------------------

enum class Axis { x, y };

struct Scan2DSpec {
    ModelParams base;
    Direction x_slope{};
    Direction y_slope{};
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    int nx = 64, ny = 64;
    BondKind bond = BondKind::odd;
    Quantity quantity = Quantity::discord;
    Axis axis = Axis::x;
    MeasureOptions measure;
    int threads = 0;

    void validate() const {
        base.validate();
        if (nx < 2 || ny < 2) throw std::invalid_argument("scan_2d needs at least 2 points per axis");
        if (!(x_max > x_min) || !(y_max > y_min)) throw std::invalid_argument("scan_2d needs increasing ranges");
    }
    double x_at(int i) const { return x_min + (x_max - x_min) * i / (nx - 1); }
    double y_at(int j) const { return y_min + (y_max - y_min) * j / (ny - 1); }
    ModelParams params_at(double x, double y) const { return shifted(shifted(base, x_slope, x), y_slope, y); }
};

/// Row-major grid: index = iy * nx + ix.
struct Scan2DResult {
    Scan2DSpec spec;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<PointEvaluation> points;
    /// |d quantity / d axis|, NaN where the stencil is unusable.
    std::vector<double> derivative;

    const PointEvaluation& at(int ix, int iy) const { return points[static_cast<std::size_t>(iy * spec.nx + ix)]; }
};

inline Scan2DResult scan_2d(const Scan2DSpec& spec) {
    spec.validate();
    Scan2DResult res;
    res.spec = spec;
    for (int i = 0; i < spec.nx; ++i) res.x.push_back(spec.x_at(i));
    for (int j = 0; j < spec.ny; ++j) res.y.push_back(spec.y_at(j));
    const std::size_t total = static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny);
    res.points.resize(total);
    parallel_for(total, spec.threads, [&](std::size_t idx) {
        const int ix = static_cast<int>(idx % static_cast<std::size_t>(spec.nx));
        const int iy = static_cast<int>(idx / static_cast<std::size_t>(spec.nx));
        res.points[idx] = evaluate_point(spec.params_at(res.x[ix], res.y[iy]), spec.bond, spec.measure);
    });

    res.derivative.assign(total, std::numeric_limits<double>::quiet_NaN());
    const bool along_x = spec.axis == Axis::x;
    const int lines = along_x ? spec.ny : spec.nx;
    const int len = along_x ? spec.nx : spec.ny;
    if (len < 3) return res;
    for (int line = 0; line < lines; ++line) {
        std::vector<double> coord(len), val(len);
        std::unique_ptr<bool[]> mask(new bool[static_cast<std::size_t>(len)]);
        std::vector<std::size_t> index(len);
        for (int k = 0; k < len; ++k) {
            const int ix = along_x ? k : line;
            const int iy = along_x ? line : k;
            index[k] = static_cast<std::size_t>(iy * spec.nx + ix);
            coord[k] = along_x ? res.x[ix] : res.y[iy];
            val[k] = res.points[index[k]].value(spec.quantity);
            mask[k] = res.points[index[k]].degenerate;
        }
        const auto d = finite_difference(coord, val, std::span<const bool>(mask.get(), static_cast<std::size_t>(len)));
        for (int k = 0; k < len; ++k) res.derivative[index[k]] = std::abs(d.value[k]);
    }
    return res;
}

}  // namespace eqcm
