// Jordan-Wigner fermions for the compass chain: real-space quadratic form,
// Bogoliubov-de Gennes solve, contraction matrix and nearest-neighbour spin
// correlators.
//
// Conventions. Sites are 0-based; the odd bond of cell i is (2i, 2i+1) and the
// even bond is (2i+1, 2i+2 mod N). With A_l = c_l^+ + c_l, B_l = c_l^+ - c_l
// and sz = 1 - 2 c^+ c the spin operators on a bond (l, l+1) become
//
//   sx_l sx_{l+1} = B_l A_{l+1},   sy_l sy_{l+1} = -A_l B_{l+1},   sz_l = A_l B_l,
//
// and the wrap-around bond picks up -P (P = fermion parity). Only the P = +1
// sector (antiperiodic fermions, odd-n momentum grid) is represented.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqcm/model.hpp"

namespace eqcm {

enum class BondKind { odd, even };

inline const char* to_string(BondKind kind) { return kind == BondKind::odd ? "odd" : "even"; }

/// Quasiparticle energies below this (times the energy scale) count as zero modes.
inline constexpr double kZeroModeTolerance = 1e-10;

inline double zero_mode_threshold(const ModelParams& p) {
    return kZeroModeTolerance * std::max(1.0, p.energy_scale());
}

/// H = sum c^+ a c + 1/2 sum (c^+ b c^+ + h.c.) + const, with a symmetric and b antisymmetric.
struct QuadraticForm {
    Eigen::MatrixXd a_matrix;
    Eigen::MatrixXd b_matrix;
    int boundary_sign = -1;
    double zero_tolerance = kZeroModeTolerance;

    Eigen::Index size() const { return a_matrix.rows(); }
};

/// Rows of phi / psi are the mode vectors; (a + b) phi_q = energy_q psi_q.
struct BdgModes {
    Eigen::VectorXd energies;
    Eigen::MatrixXd phi;
    Eigen::MatrixXd psi;
    double zero_tolerance = kZeroModeTolerance;
};

/// g(l, m) = <B_l A_m>. Zero modes are left out of the sum, i.e. the
/// degenerate vacuum is averaged with equal weights; `zero_modes` counts them.
struct GreenMatrix {
    Eigen::MatrixXd g;
    int zero_modes = 0;

    bool degenerate() const { return zero_modes > 0; }
    Eigen::Index size() const { return g.rows(); }
};

struct BondCorrelators {
    BondKind kind = BondKind::odd;
    double cxx = 0.0;
    double cyy = 0.0;
    double czz = 0.0;
    double mz_left = 0.0;
    double mz_right = 0.0;
    bool degenerate = false;
};

inline QuadraticForm build_quadratic_form(const ModelParams& p) {
    p.validate();
    const int n = p.n_sites();
    QuadraticForm form;
    form.a_matrix = Eigen::MatrixXd::Zero(n, n);
    form.b_matrix = Eigen::MatrixXd::Zero(n, n);
    form.zero_tolerance = zero_mode_threshold(p);

    for (int l = 0; l < n; ++l) {
        form.a_matrix(l, l) = -p.h;
        const int r = (l + 1) % n;
        const bool odd_bond = (l % 2 == 0);
        const double jx = odd_bond ? p.j1 : p.l1;
        const double jy = odd_bond ? p.j2 : p.l2;
        const double sign = (r == 0) ? form.boundary_sign : 1.0;
        form.a_matrix(l, r) = sign * (jx + jy);
        form.a_matrix(r, l) = sign * (jx + jy);
        form.b_matrix(l, r) = sign * (jx - jy);
        form.b_matrix(r, l) = -sign * (jx - jy);
    }
    return form;
}

/**
 * Real BdG solve. The singular value decomposition of a + b = U diag(Lambda) V^T
 * gives psi_q = U(:, q), phi_q = V(:, q) directly, which is equivalent to
 * diagonalising (a - b)(a + b) and (a + b)(a - b) but stays orthonormal when
 * Lambda_q vanishes.
 */
inline BdgModes solve_bdg(const QuadraticForm& form) {
    const Eigen::MatrixXd m = form.a_matrix + form.b_matrix;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);

    const Eigen::Index n = m.rows();
    BdgModes modes;
    modes.zero_tolerance = form.zero_tolerance;
    modes.energies.resize(n);
    modes.phi.resize(n, n);
    modes.psi.resize(n, n);
    // SVD returns descending singular values.
    for (Eigen::Index q = 0; q < n; ++q) {
        const Eigen::Index src = n - 1 - q;
        modes.energies(q) = svd.singularValues()(src);
        modes.phi.row(q) = svd.matrixV().col(src).transpose();
        modes.psi.row(q) = svd.matrixU().col(src).transpose();
    }

    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const double phi_err = (modes.phi * modes.phi.transpose() - id).cwiseAbs().maxCoeff();
    const double psi_err = (modes.psi * modes.psi.transpose() - id).cwiseAbs().maxCoeff();
    if (phi_err > 1e-10 || psi_err > 1e-10) {
        throw std::runtime_error("solve_bdg: mode vectors lost orthonormality (" +
                                 std::to_string(std::max(phi_err, psi_err)) + ")");
    }
    return modes;
}

inline double bdg_ground_energy(const BdgModes& modes) { return -0.5 * modes.energies.sum(); }

inline GreenMatrix green_matrix(const BdgModes& modes) {
    const Eigen::Index n = modes.energies.size();
    GreenMatrix out;
    out.g = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index q = 0; q < n; ++q) {
        if (modes.energies(q) < modes.zero_tolerance) {
            ++out.zero_modes;
            continue;
        }
        out.g.noalias() -= modes.psi.row(q).transpose() * modes.phi.row(q);
    }
    return out;
}

inline GreenMatrix green_matrix(const ModelParams& p) {
    return green_matrix(solve_bdg(build_quadratic_form(p)));
}

/// <sz_site> for a 0-based site.
inline double magnetization(const GreenMatrix& gm, int site) {
    if (site < 0 || site >= gm.size()) {
        throw std::out_of_range("magnetization: site " + std::to_string(site) + " out of range");
    }
    return -gm.g(site, site);
}

/// Correlators on the `kind` bond of unit cell `cell`.
inline BondCorrelators bond_correlators(const GreenMatrix& gm, BondKind kind, int cell = 0) {
    const int n = static_cast<int>(gm.size());
    const int l = 2 * cell + (kind == BondKind::odd ? 0 : 1);
    if (cell < 0 || l >= n) {
        throw std::out_of_range("bond_correlators: cell " + std::to_string(cell) + " out of range");
    }
    const int r = (l + 1) % n;
    // Crossing the boundary costs -P = -1 in the even sector.
    const double wrap = (r == 0) ? -1.0 : 1.0;

    BondCorrelators bc;
    bc.kind = kind;
    bc.cxx = wrap * gm.g(l, r);
    bc.cyy = wrap * gm.g(r, l);
    bc.mz_left = magnetization(gm, l);
    bc.mz_right = magnetization(gm, r);
    // Wick: <A_l B_l A_r B_r> with <A A> = delta, <B B> = -delta.
    bc.czz = bc.mz_left * bc.mz_right - gm.g(l, r) * gm.g(r, l);
    bc.degenerate = gm.degenerate();
    return bc;
}

// ---------------------------------------------------------------------------
// Momentum-space route. a + b is block-circulant (antiperiodic) in the cell
// index with 2x2 blocks, so its polar factor U V^T = -G is assembled from the
// polar factors of
//
//   M_k = [[ -h,                   2 (J1 + L2 e^{-ik}) ],
//          [ 2 (J2 + L1 e^{ik}),   -h                  ]],
//
// whose singular values are exactly (E_o(k), E_a(k)).
// ---------------------------------------------------------------------------

struct NearestNeighbourCorrelators {
    BondCorrelators odd;
    BondCorrelators even;
    int zero_modes = 0;

    const BondCorrelators& bond(BondKind kind) const { return kind == BondKind::odd ? odd : even; }
    bool degenerate() const { return zero_modes > 0; }
};

inline Eigen::Matrix2cd momentum_block(const ModelParams& p, double k) {
    const std::complex<double> e = std::polar(1.0, k);
    Eigen::Matrix2cd m;
    m << -p.h, 2.0 * (p.j1 + p.l2 * std::conj(e)), 2.0 * (p.j2 + p.l1 * e), -p.h;
    return m;
}

inline NearestNeighbourCorrelators momentum_correlators(const ModelParams& p) {
    p.validate();
    const KGrid grid = build_kgrid(p.n_cells);
    const double tol = zero_mode_threshold(p);

    // Accumulate -G entries in one cell / across one cell boundary.
    std::complex<double> diag0 = 0.0, diag1 = 0.0;
    std::complex<double> odd_lr = 0.0, odd_rl = 0.0;
    std::complex<double> even_lr = 0.0, even_rl = 0.0;
    int zero_modes = 0;

    for (double k : grid.momenta) {
        const Eigen::Matrix2cd m = momentum_block(p, k);
        Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::Matrix2cd w = Eigen::Matrix2cd::Zero();
        for (int s = 0; s < 2; ++s) {
            if (svd.singularValues()(s) < tol) {
                ++zero_modes;
                continue;
            }
            w.noalias() += svd.matrixU().col(s) * svd.matrixV().col(s).adjoint();
        }
        const std::complex<double> e = std::polar(1.0, k);
        diag0 += w(0, 0);
        diag1 += w(1, 1);
        odd_lr += w(0, 1);
        odd_rl += w(1, 0);
        even_lr += std::conj(e) * w(1, 0);
        even_rl += e * w(0, 1);
    }

    const double norm = -1.0 / p.n_cells;
    const double g00 = norm * diag0.real();
    const double g11 = norm * diag1.real();

    auto assemble = [&](BondKind kind, double g_lr, double g_rl, double g_ll, double g_rr) {
        BondCorrelators bc;
        bc.kind = kind;
        bc.cxx = g_lr;
        bc.cyy = g_rl;
        bc.mz_left = -g_ll;
        bc.mz_right = -g_rr;
        bc.czz = bc.mz_left * bc.mz_right - g_lr * g_rl;
        bc.degenerate = zero_modes > 0;
        return bc;
    };

    NearestNeighbourCorrelators out;
    out.zero_modes = zero_modes;
    out.odd = assemble(BondKind::odd, norm * odd_lr.real(), norm * odd_rl.real(), g00, g11);
    out.even = assemble(BondKind::even, norm * even_lr.real(), norm * even_rl.real(), g11, g00);
    return out;
}

}  // namespace eqcm
