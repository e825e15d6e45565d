// Brute-force exact diagonalisation of the compass chain for small rings.
//
// Basis: bit (N-1-s) of the basis index holds site s (0-based), so site 0 is
// the most significant bit. Bit value 0 is spin up (sz = +1), 1 is spin down.
#pragma once

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqcm/fermions.hpp"
#include "eqcm/model.hpp"

namespace eqcm::ed {

inline constexpr int kMaxSites = 14;
inline constexpr double kDegeneracyTolerance = 1e-10;

struct DenseHamiltonian {
    Eigen::MatrixXd matrix;
    ModelParams params;

    int n_sites() const { return params.n_sites(); }
};

struct EDResult {
    double ground_energy = 0.0;
    int degeneracy = 0;
    /// Energy of the first level above the ground multiplet (NaN if not computed).
    double first_excited = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd ground_vector;
    int n_sites = 0;

    bool unique() const { return degeneracy == 1; }
};

namespace detail {

inline int bit_of(int n_sites, int site) { return n_sites - 1 - site; }

inline double flip_sign_yy(std::uint32_t state, int bl, int br) {
    // sy|b> = i (-1)^b |1-b>, so sy sy picks up -(-1)^(b_l + b_r).
    const int parity = static_cast<int>(((state >> bl) & 1u) + ((state >> br) & 1u));
    return (parity % 2 == 0) ? -1.0 : 1.0;
}

}  // namespace detail

inline DenseHamiltonian build_dense(const ModelParams& p) {
    p.validate();
    const int n = p.n_sites();
    if (n > kMaxSites) {
        throw std::invalid_argument("build_dense: N = " + std::to_string(n) + " exceeds the limit of " +
                                    std::to_string(kMaxSites) + " sites");
    }
    const std::uint32_t dim = 1u << n;
    DenseHamiltonian out{Eigen::MatrixXd::Zero(dim, dim), p};
    auto& hm = out.matrix;

    for (std::uint32_t s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int site = 0; site < n; ++site) {
            const bool down = (s >> detail::bit_of(n, site)) & 1u;
            diag += 0.5 * p.h * (down ? -1.0 : 1.0);
        }
        hm(s, s) += diag;

        for (int l = 0; l < n; ++l) {
            const int r = (l + 1) % n;
            const bool odd_bond = (l % 2 == 0);
            const double jx = odd_bond ? p.j1 : p.l1;
            const double jy = odd_bond ? p.j2 : p.l2;
            const int bl = detail::bit_of(n, l);
            const int br = detail::bit_of(n, r);
            const std::uint32_t t = s ^ (1u << bl) ^ (1u << br);
            hm(t, s) += jx + jy * detail::flip_sign_yy(s, bl, br);
        }
    }
    return out;
}

namespace detail {

inline EDResult summarize(const std::vector<double>& levels, const Eigen::VectorXd& vector, int n_sites) {
    EDResult res;
    res.n_sites = n_sites;
    res.ground_energy = levels.front();
    for (double level : levels) {
        if (level - levels.front() <= kDegeneracyTolerance) {
            ++res.degeneracy;
        } else {
            res.first_excited = level;
            break;
        }
    }
    res.ground_vector = vector.normalized();
    return res;
}

inline bool is_eigenpair(const Eigen::MatrixXd& hm, const Eigen::VectorXd& v, double e) {
    const double scale = std::max(1.0, std::abs(e));
    return std::abs(v.norm() - 1.0) < 1e-8 && (hm * v - e * v).norm() < 1e-8 * scale;
}

}  // namespace detail

/// Lowest eigenpairs by a dense LAPACK dsyevr solve. Enough levels are
/// requested to resolve the 2^{n_cells - 1} compass-point multiplet. The
/// returned pair is checked against H; if the LAPACK build misbehaves the
/// solve is redone with Eigen's (slower) tridiagonal QR.
inline EDResult ground(const DenseHamiltonian& dense) {
    const lapack_int dim = static_cast<lapack_int>(dense.matrix.rows());
    const lapack_int want =
        std::min<lapack_int>(dim, (lapack_int{1} << (dense.params.n_cells - 1)) + 2);

    Eigen::MatrixXd work = dense.matrix;
    std::vector<double> w(static_cast<std::size_t>(dim));
    Eigen::MatrixXd z(dim, want);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(dim));
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', dim, work.data(), dim, 0.0, 0.0, 1, want, 0.0,
                       &found, w.data(), z.data(), dim, support.data());
    if (info == 0 && found > 0 && detail::is_eigenpair(dense.matrix, z.col(0), w[0])) {
        w.resize(static_cast<std::size_t>(found));
        return detail::summarize(w, z.col(0), dense.n_sites());
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense.matrix);
    if (solver.info() != Eigen::Success) throw std::runtime_error("ed::ground: eigensolver failed");
    const auto& ev = solver.eigenvalues();
    std::vector<double> levels(ev.data(), ev.data() + ev.size());
    return detail::summarize(levels, solver.eigenvectors().col(0), dense.n_sites());
}

inline EDResult ground(const ModelParams& p) { return ground(build_dense(p)); }

/// <P> with P = prod_i sz_i; +1 for the even fermion-parity sector.
inline double parity(const EDResult& res) {
    double acc = 0.0;
    for (Eigen::Index s = 0; s < res.ground_vector.size(); ++s) {
        const double amp = res.ground_vector(s);
        acc += (std::popcount(static_cast<std::uint32_t>(s)) % 2 == 0 ? 1.0 : -1.0) * amp * amp;
    }
    return acc;
}

/// Partial trace of |psi><psi| onto sites (i, j), ordered |00>,|01>,|10>,|11>
/// with the first label belonging to site i.
inline Eigen::Matrix4d two_site_rdm(const EDResult& res, int site_i, int site_j) {
    const int n = res.n_sites;
    if (site_i == site_j || site_i < 0 || site_j < 0 || site_i >= n || site_j >= n) {
        throw std::out_of_range("two_site_rdm: invalid site pair");
    }
    const int bi = detail::bit_of(n, site_i);
    const int bj = detail::bit_of(n, site_j);
    const std::uint32_t mask = (1u << bi) | (1u << bj);
    Eigen::Matrix4d rho = Eigen::Matrix4d::Zero();
    const auto dim = static_cast<std::uint32_t>(res.ground_vector.size());
    for (std::uint32_t s = 0; s < dim; ++s) {
        if (s & mask) continue;  // enumerate the environment once
        double amp[4];
        for (std::uint32_t a = 0; a < 4; ++a) {
            std::uint32_t idx = s;
            if (a & 2u) idx |= 1u << bi;
            if (a & 1u) idx |= 1u << bj;
            amp[a] = res.ground_vector(idx);
        }
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) rho(a, b) += amp[a] * amp[b];
    }
    return rho;
}

/// Correlators evaluated directly on the ground vector.
inline BondCorrelators ed_correlators(const EDResult& res, BondKind kind, int cell = 0) {
    const int n = res.n_sites;
    const int l = 2 * cell + (kind == BondKind::odd ? 0 : 1);
    if (cell < 0 || l >= n) throw std::out_of_range("ed_correlators: cell out of range");
    const int r = (l + 1) % n;
    const int bl = detail::bit_of(n, l);
    const int br = detail::bit_of(n, r);

    BondCorrelators bc;
    bc.kind = kind;
    bc.degenerate = !res.unique();
    const auto& psi = res.ground_vector;
    const auto dim = static_cast<std::uint32_t>(psi.size());
    for (std::uint32_t s = 0; s < dim; ++s) {
        const double amp = psi(s);
        const std::uint32_t t = s ^ (1u << bl) ^ (1u << br);
        const double zl = ((s >> bl) & 1u) ? -1.0 : 1.0;
        const double zr = ((s >> br) & 1u) ? -1.0 : 1.0;
        bc.cxx += psi(t) * amp;
        bc.cyy += psi(t) * amp * detail::flip_sign_yy(s, bl, br);
        bc.czz += zl * zr * amp * amp;
        bc.mz_left += zl * amp * amp;
        bc.mz_right += zr * amp * amp;
    }
    return bc;
}

}  // namespace eqcm::ed
