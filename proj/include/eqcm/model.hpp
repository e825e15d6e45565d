// Extended quantum compass chain in a transverse field: parameters, momentum
// grid and the analytic two-branch Bogoliubov spectrum.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqcm {

/**
 * Couplings of the chain
 *
 *   H = sum_i [ J1 sx_{2i-1} sx_{2i} + J2 sy_{2i-1} sy_{2i}
 *             + L1 sx_{2i} sx_{2i+1} + L2 sy_{2i} sy_{2i+1}
 *             + h/2 (sz_{2i-1} + sz_{2i}) ]
 *
 * on a ring of N = 2 * n_cells sites.
 */
struct ModelParams {
    double j1 = 0.0;
    double j2 = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double h = 0.0;
    int n_cells = 512;

    int n_sites() const { return 2 * n_cells; }

    /// Largest absolute coupling or field; sets the energy scale for tolerances.
    double energy_scale() const {
        return std::max({std::abs(j1), std::abs(j2), std::abs(l1), std::abs(l2), std::abs(h)});
    }

    void validate() const {
        if (n_cells < 2) {
            throw std::invalid_argument("n_cells must be >= 2, got " + std::to_string(n_cells));
        }
        for (double v : {j1, j2, l1, l2, h}) {
            if (!std::isfinite(v)) throw std::invalid_argument("couplings and field must be finite");
        }
    }

    bool operator==(const ModelParams&) const = default;
};

/// Antiperiodic (even fermion parity) momenta k = n pi / n_cells with n odd and
/// -n_cells < n <= n_cells, ascending. For even n_cells this is n = -(n_cells-1), ..., n_cells-1.
struct KGrid {
    std::vector<double> momenta;

    std::size_t size() const { return momenta.size(); }
};

struct SpectrumPoint {
    double k = 0.0;
    double e_optical = 0.0;
    double e_acoustic = 0.0;
};

struct AlphaBeta {
    std::complex<double> alpha;
    std::complex<double> beta;
};

struct GroundEnergy {
    double total = 0.0;
    double per_site = 0.0;
};

inline KGrid build_kgrid(int n_cells) {
    if (n_cells < 2) {
        throw std::invalid_argument("k-grid needs n_cells >= 2, got " + std::to_string(n_cells));
    }
    KGrid grid;
    grid.momenta.reserve(static_cast<std::size_t>(n_cells));
    const int first = (n_cells % 2 == 0) ? -(n_cells - 1) : -(n_cells - 2);
    for (int n = first; n <= n_cells; n += 2) {
        grid.momenta.push_back(n * std::numbers::pi / n_cells);
    }
    return grid;
}

inline AlphaBeta alpha_beta(const ModelParams& p, double k) {
    const std::complex<double> phase = std::polar(1.0, k);
    return {(p.j1 + p.j2) + (p.l1 + p.l2) * phase, (p.j1 - p.j2) - (p.l1 - p.l2) * phase};
}

/**
 * Optical and acoustic quasiparticle energies at momentum k.
 *
 * varsigma = |alpha|^2 + |beta|^2 + h^2, tau = (alpha* beta + alpha beta*)^2 + 4 |alpha|^2 h^2,
 * E_o = sqrt(varsigma + sqrt(tau)), E_a = sqrt(varsigma - sqrt(tau)).
 * Throws std::runtime_error if varsigma^2 < tau beyond rounding.
 */
inline SpectrumPoint spectrum_at(const ModelParams& p, double k) {
    const auto [alpha, beta] = alpha_beta(p, k);
    const double a2 = std::norm(alpha);
    const double varsigma = a2 + std::norm(beta) + p.h * p.h;
    const double cross = 2.0 * std::real(std::conj(alpha) * beta);
    const double tau = cross * cross + 4.0 * a2 * p.h * p.h;

    const double slack = 1e-12 * std::max(1.0, varsigma * varsigma);
    if (varsigma * varsigma - tau < -slack) {
        throw std::runtime_error("spectrum_at: varsigma^2 < tau, inconsistent spectrum");
    }
    const double root = std::sqrt(tau);
    double lower = varsigma - root;
    if (lower < 1e-12) lower = 0.0;
    return {k, std::sqrt(varsigma + root), std::sqrt(lower)};
}

inline std::vector<SpectrumPoint> spectrum(const ModelParams& p) {
    p.validate();
    const KGrid grid = build_kgrid(p.n_cells);
    std::vector<SpectrumPoint> out;
    out.reserve(grid.size());
    for (double k : grid.momenta) out.push_back(spectrum_at(p, k));
    return out;
}

/// E_0 = -1/2 sum_k (E_o + E_a) over the even-parity grid.
inline GroundEnergy ground_energy(const ModelParams& p) {
    double sum = 0.0;
    for (const auto& s : spectrum(p)) sum += s.e_optical + s.e_acoustic;
    const double total = -0.5 * sum;
    return {total, total / p.n_sites()};
}

inline double acoustic_gap(const ModelParams& p) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& s : spectrum(p)) gap = std::min(gap, s.e_acoustic);
    return gap;
}

/// Fields h = 2 sqrt((J1 +- L2)(J2 +- L1)) at which the acoustic branch closes
/// (k = 0 for +, k = pi for -). Negative radicands contribute nothing.
inline std::vector<double> critical_field(const ModelParams& p) {
    std::vector<double> fields;
    for (double sign : {1.0, -1.0}) {
        const double radicand = (p.j1 + sign * p.l2) * (p.j2 + sign * p.l1);
        if (radicand >= 0.0) fields.push_back(2.0 * std::sqrt(radicand));
    }
    std::sort(fields.begin(), fields.end());
    fields.erase(std::unique(fields.begin(), fields.end()), fields.end());
    return fields;
}

}  // namespace eqcm
