// Two-qubit X-states built from bond correlators, and the correlation
// measures on them: mutual information, classical correlation (closed form and
// optimised over projective measurements), discord and concurrence.
//
// All entropies are in bits. Two-qubit basis order is |00>, |01>, |10>, |11>
// with |0> = spin up and the first label on the left site of the bond.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eqcm/fermions.hpp"

namespace eqcm {

inline constexpr double kNegativeEigenTolerance = 1e-10;

/// -sum p log2 p with 0 log 0 = 0. Entries in [-1e-10, 0) are treated as 0.
inline double shannon_bits(std::span<const double> probs) {
    double s = 0.0;
    for (double p : probs) {
        if (p < -kNegativeEigenTolerance) {
            throw std::domain_error("shannon_bits: negative probability " + std::to_string(p));
        }
        if (p > 0.0) s -= p * std::log2(p);
    }
    return s;
}

inline double binary_entropy(double p) {
    p = std::clamp(p, 0.0, 1.0);
    const std::array<double, 2> probs{p, 1.0 - p};
    return shannon_bits(probs);
}

struct SingleQubitState {
    double p_up = 0.5;
    double p_down = 0.5;

    static SingleQubitState from_magnetization(double mz) { return {(1.0 + mz) / 2.0, (1.0 - mz) / 2.0}; }
    double entropy() const { return binary_entropy(p_up); }
};

/**
 *     | u+  0   0   z- |
 *     | 0   w1  z+  0  |
 *     | 0   z+  w2  0  |
 *     | z-  0   0   u- |
 */
struct TwoQubitXState {
    double u_plus = 0.25;
    double u_minus = 0.25;
    double w1 = 0.25;
    double w2 = 0.25;
    double z_plus = 0.0;
    double z_minus = 0.0;
    BondCorrelators source;
    /// Set when the two site magnetizations differ by more than 1e-8.
    bool asymmetric_magnetization = false;

    Eigen::Matrix4d matrix() const {
        Eigen::Matrix4d rho = Eigen::Matrix4d::Zero();
        rho(0, 0) = u_plus;
        rho(1, 1) = w1;
        rho(2, 2) = w2;
        rho(3, 3) = u_minus;
        rho(0, 3) = rho(3, 0) = z_minus;
        rho(1, 2) = rho(2, 1) = z_plus;
        return rho;
    }

    /// Eigenvalues of the {|00>,|11>} block followed by the {|01>,|10>} block.
    std::array<double, 4> eigenvalues() const {
        const auto pair = [](double a, double d, double off) {
            const double mean = 0.5 * (a + d);
            const double r = std::hypot(0.5 * (a - d), off);
            return std::array<double, 2>{mean + r, mean - r};
        };
        const auto outer = pair(u_plus, u_minus, z_minus);
        const auto inner = pair(w1, w2, z_plus);
        return {outer[0], outer[1], inner[0], inner[1]};
    }

    double trace() const { return u_plus + u_minus + w1 + w2; }

    /// Correlators read back from the matrix elements.
    BondCorrelators correlators() const {
        BondCorrelators bc = source;
        bc.cxx = 2.0 * (z_plus + z_minus);
        bc.cyy = 2.0 * (z_plus - z_minus);
        bc.czz = u_plus + u_minus - w1 - w2;
        bc.mz_left = u_plus + w1 - w2 - u_minus;
        bc.mz_right = u_plus + w2 - w1 - u_minus;
        return bc;
    }
};

/// u+- = (1 +- (mz_l + mz_r) + czz)/4, w1,2 = (1 +- (mz_l - mz_r) - czz)/4,
/// z+- = (cxx +- cyy)/4. Throws if the result is not positive within 1e-8.
inline TwoQubitXState assemble_xstate(const BondCorrelators& bc) {
    TwoQubitXState x;
    x.source = bc;
    const double msum = bc.mz_left + bc.mz_right;
    const double mdiff = bc.mz_left - bc.mz_right;
    x.u_plus = 0.25 * (1.0 + msum + bc.czz);
    x.u_minus = 0.25 * (1.0 - msum + bc.czz);
    x.w1 = 0.25 * (1.0 + mdiff - bc.czz);
    x.w2 = 0.25 * (1.0 - mdiff - bc.czz);
    x.z_plus = 0.25 * (bc.cxx + bc.cyy);
    x.z_minus = 0.25 * (bc.cxx - bc.cyy);
    x.asymmetric_magnetization = std::abs(mdiff) > 1e-8;

    constexpr double tol = 1e-8;
    const bool diagonal_ok = std::min({x.u_plus, x.u_minus, x.w1, x.w2}) >= -tol;
    const bool outer_ok = x.u_plus * x.u_minus >= x.z_minus * x.z_minus - tol;
    const bool inner_ok = x.w1 * x.w2 >= x.z_plus * x.z_plus - tol;
    if (!diagonal_ok || !outer_ok || !inner_ok) {
        throw std::domain_error("assemble_xstate: correlators do not form a positive density matrix");
    }
    return x;
}

inline double entropy_bits(const TwoQubitXState& x) {
    const auto ev = x.eigenvalues();
    return shannon_bits(ev);
}

/// I = S(rho_i) + S(rho_j) - S(rho_ij).
inline double mutual_information(const TwoQubitXState& x) {
    const auto bc = x.correlators();
    const double sa = SingleQubitState::from_magnetization(bc.mz_left).entropy();
    const double sb = SingleQubitState::from_magnetization(bc.mz_right).entropy();
    return sa + sb - entropy_bits(x);
}

/// H_bin(p1) - H_bin(p2), the conditional entropy reduction for a measurement
/// of sx or sy (whichever correlator is larger) on the right qubit.
inline double classical_correlation_closed_form(const TwoQubitXState& x) {
    const auto bc = x.correlators();
    const double c = std::max(std::abs(bc.cxx), std::abs(bc.cyy));
    const double p1 = (1.0 + bc.mz_left) / 2.0;
    const double p2 = std::min(1.0, (1.0 + std::sqrt(c * c + bc.mz_left * bc.mz_left)) / 2.0);
    return binary_entropy(p1) - binary_entropy(p2);
}

// ---------------------------------------------------------------------------
// Projective measurements on the right qubit.
// ---------------------------------------------------------------------------

/// Theta_par = cos(t/2)|0> + e^{i phi} sin(t/2)|1>, Theta_perp its complement.
struct MeasurementBasis {
    double theta = std::numbers::pi / 2;
    double phi = 0.0;

    std::array<Eigen::Vector2cd, 2> vectors() const {
        const double c = std::cos(theta / 2), s = std::sin(theta / 2);
        const std::complex<double> e = std::polar(1.0, phi);
        Eigen::Vector2cd par, perp;
        par << c, e * s;
        perp << std::conj(e) * s, -c;
        return {par, perp};
    }

    /// Distance to the nearest of theta = pi/2, phi in {0, pi/2, pi, 3pi/2}.
    double distance_to_canonical() const {
        const double quarter = std::numbers::pi / 2;
        const double dphi = std::abs(std::remainder(phi, quarter));
        return std::max(std::abs(theta - quarter), dphi);
    }
};

inline Eigen::Matrix4cd to_complex(const Eigen::Matrix4d& rho) { return rho.cast<std::complex<double>>(); }

/// Von Neumann entropy (bits) of a 2x2 Hermitian density matrix.
inline double qubit_entropy(const Eigen::Matrix2cd& rho) {
    const double tr = rho.trace().real();
    if (tr <= 0.0) return 0.0;
    const double a = rho(0, 0).real() / tr, d = rho(1, 1).real() / tr;
    const double r = std::sqrt(std::pow(a - d, 2) + 4.0 * std::norm(rho(0, 1) / tr));
    return binary_entropy((1.0 + std::min(r, 1.0)) / 2.0);
}

/// I(rho | B) = S(rho_A) - sum_k p_k S(rho_k) for the projective measurement B
/// on the second qubit.
inline double measured_information(const Eigen::Matrix4cd& rho, const MeasurementBasis& basis) {
    Eigen::Matrix2cd rho_a;
    rho_a << rho(0, 0) + rho(1, 1), rho(0, 2) + rho(1, 3), rho(2, 0) + rho(3, 1), rho(2, 2) + rho(3, 3);

    double conditional = 0.0;
    for (const auto& v : basis.vectors()) {
        // <v|_B rho |v>_B, an unnormalised state of A.
        Eigen::Matrix2cd block;
        for (int a = 0; a < 2; ++a) {
            for (int ap = 0; ap < 2; ++ap) {
                std::complex<double> acc = 0.0;
                for (int b = 0; b < 2; ++b)
                    for (int bp = 0; bp < 2; ++bp)
                        acc += std::conj(v(b)) * rho(2 * a + b, 2 * ap + bp) * v(bp);
                block(a, ap) = acc;
            }
        }
        const double pk = block.trace().real();
        if (pk > 0.0) conditional += pk * qubit_entropy(block);
    }
    return qubit_entropy(rho_a) - conditional;
}

struct NumericClassical {
    double value = 0.0;
    MeasurementBasis argmax;
};

/**
 * sup over projective measurements, by a (theta, phi) grid with `grid` points
 * per angle followed by compass pattern search down to 1e-9 rad. The canonical
 * bases (theta = pi/2, phi = 0 or pi/2) and theta = 0 are always tried as
 * extra seeds.
 */
inline NumericClassical classical_correlation_numeric(const Eigen::Matrix4cd& rho, int grid = 64) {
    if (grid < 64) throw std::invalid_argument("classical_correlation_numeric: grid must be >= 64");
    const double pi = std::numbers::pi;

    auto f = [&](double t, double p) { return measured_information(rho, {t, p}); };

    std::vector<MeasurementBasis> seeds{{pi / 2, 0.0}, {pi / 2, pi / 2}, {0.0, 0.0}};
    MeasurementBasis best_grid{};
    double best_grid_value = -1.0;
    for (int i = 0; i < grid; ++i) {
        const double t = pi * i / (grid - 1);
        for (int j = 0; j < grid; ++j) {
            const double p = 2 * pi * j / grid;
            const double v = f(t, p);
            if (v > best_grid_value) {
                best_grid_value = v;
                best_grid = {t, p};
            }
        }
    }
    seeds.push_back(best_grid);

    NumericClassical best{-1.0, {}};
    const double initial_step = pi / (grid - 1);
    for (const auto& seed : seeds) {
        double t = seed.theta, p = seed.phi;
        double value = f(t, p);
        for (double step = initial_step; step > 1e-9;) {
            bool moved = false;
            for (const auto& [dt, dp] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
                const double nt = std::clamp(t + dt, 0.0, pi);
                const double np = p + dp;
                const double v = f(nt, np);
                if (v > value + 1e-15) {
                    value = v;
                    t = nt;
                    p = np;
                    moved = true;
                    break;
                }
            }
            if (!moved) step *= 0.5;
        }
        if (value > best.value) {
            best.value = value;
            best.argmax = {t, std::fmod(std::fmod(p, 2 * pi) + 2 * pi, 2 * pi)};
        }
    }
    best.value = std::max(best.value, 0.0);
    return best;
}

inline NumericClassical classical_correlation_numeric(const TwoQubitXState& x, int grid = 64) {
    return classical_correlation_numeric(to_complex(x.matrix()), grid);
}

/// Wootters concurrence from the closed-form spin-flip eigenvalues of an X-state.
inline double concurrence(const BondCorrelators& bc) {
    const auto radical = [](double a, double b) {
        const double v = a * b;
        if (v < -kNegativeEigenTolerance) {
            throw std::domain_error("concurrence: negative radicand " + std::to_string(v));
        }
        return std::sqrt(std::max(v, 0.0));
    };
    const double ml = bc.mz_left, mr = bc.mz_right, zz = bc.czz;
    const double r12 = radical(1 + ml + mr + zz, 1 - ml - mr + zz);
    const double r34 = radical(1 + ml - mr - zz, 1 - ml + mr - zz);
    const double d12 = std::abs(bc.cxx - bc.cyy);
    const double d34 = std::abs(bc.cxx + bc.cyy);
    std::array<double, 4> lam{0.25 * std::abs(r12 + d12), 0.25 * std::abs(r12 - d12),
                              0.25 * std::abs(r34 + d34), 0.25 * std::abs(r34 - d34)};
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

inline double concurrence(const TwoQubitXState& x) { return concurrence(x.correlators()); }

struct MeasureOptions {
    bool numeric = true;
    int grid = 64;
    double violation_tolerance = 1e-6;
};

struct CorrelationMeasures {
    double mutual_info = 0.0;
    double classical = 0.0;
    double discord = 0.0;
    double concurrence = 0.0;
    double classical_closed = 0.0;
    double classical_numeric = std::numeric_limits<double>::quiet_NaN();
    /// |closed form - numeric|; NaN when the numeric optimiser was skipped.
    double optimizer_agreement = std::numeric_limits<double>::quiet_NaN();
    MeasurementBasis argmax;
    /// Closed form above the numeric supremum by more than the tolerance.
    bool formula_violation = false;
};

/// D = I - max(closed form, numeric); values in [-1e-9, 1e-12) are reported as 0.
inline CorrelationMeasures correlation_measures(const TwoQubitXState& x, const MeasureOptions& opt = {}) {
    CorrelationMeasures m;
    m.mutual_info = mutual_information(x);
    m.classical_closed = classical_correlation_closed_form(x);
    m.classical = m.classical_closed;
    if (opt.numeric) {
        const auto num = classical_correlation_numeric(x, opt.grid);
        m.classical_numeric = num.value;
        m.argmax = num.argmax;
        m.optimizer_agreement = std::abs(m.classical_closed - num.value);
        m.formula_violation = m.classical_closed > num.value + opt.violation_tolerance;
        m.classical = std::max(m.classical_closed, num.value);
    }
    m.discord = m.mutual_info - m.classical;
    // Rounding noise from I - C; larger negative values are left visible.
    if (m.discord < 1e-12 && m.discord >= -1e-9) m.discord = 0.0;
    m.concurrence = concurrence(x);
    return m;
}

inline double discord(const TwoQubitXState& x) { return correlation_measures(x).discord; }

/**
 * Zero-discord criterion for Bell-diagonal states: true iff the largest
 * eigenvalue is below 1/2. Throws unless u+ = u- and w1 = w2 (so mz = 0) within 1e-10.
 *
 * Only sufficient for states whose correlation tensor has rank one (the
 * compass-point states); e.g. a Werner state with small singlet weight passes
 * the test and still has positive discord.
 */
inline bool bell_diagonal_discord_zero_test(const TwoQubitXState& x) {
    constexpr double tol = 1e-10;
    if (std::abs(x.u_plus - x.u_minus) > tol || std::abs(x.w1 - x.w2) > tol) {
        throw std::invalid_argument("bell_diagonal_discord_zero_test: state is not Bell-diagonal");
    }
    const auto ev = x.eigenvalues();
    return *std::max_element(ev.begin(), ev.end()) < 0.5;
}

}  // namespace eqcm
