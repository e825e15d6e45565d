#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

#include "eqcm/correlations.hpp"
#include "eqcm/ed.hpp"

using namespace eqcm;
using std::numbers::pi;

namespace {

/// Random valid X-state; `symmetric` forces mz_left = mz_right (w1 = w2).
TwoQubitXState random_xstate(std::mt19937& rng, bool symmetric) {
    std::uniform_real_distribution<double> u(0, 1);
    std::array<double, 4> d{u(rng), u(rng), u(rng), u(rng)};
    if (symmetric) d[3] = d[2];
    const double sum = d[0] + d[1] + d[2] + d[3];
    TwoQubitXState x;
    x.u_plus = d[0] / sum;
    x.u_minus = d[1] / sum;
    x.w1 = d[2] / sum;
    x.w2 = d[3] / sum;
    x.z_minus = (2 * u(rng) - 1) * std::sqrt(x.u_plus * x.u_minus);
    x.z_plus = (2 * u(rng) - 1) * std::sqrt(x.w1 * x.w2);
    return x;
}

/// Wootters concurrence straight from the definition.
double generic_concurrence(const Eigen::Matrix4d& rho) {
    Eigen::Matrix4d yy = Eigen::Matrix4d::Zero();
    yy(0, 3) = yy(3, 0) = -1;
    yy(1, 2) = yy(2, 1) = 1;
    const Eigen::Matrix4d r = rho * yy * rho * yy;  // rho real, so rho* = rho
    Eigen::EigenSolver<Eigen::Matrix4d> es(r);
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double matrix_entropy_bits(const Eigen::MatrixXd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
    double s = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double p = es.eigenvalues()(i);
        if (p > 1e-15) s -= p * std::log2(p);
    }
    return s;
}

TwoQubitXState bell_diagonal(double l1, double l2, double l3, double l4) {
    // Eigenvalues on |Phi+>, |Phi->, |Psi+>, |Psi->.
    TwoQubitXState x;
    x.u_plus = x.u_minus = (l1 + l2) / 2;
    x.z_minus = (l1 - l2) / 2;
    x.w1 = x.w2 = (l3 + l4) / 2;
    x.z_plus = (l3 - l4) / 2;
    return x;
}

BondCorrelators from_values(double cxx, double cyy, double czz, double mz) {
    BondCorrelators bc;
    bc.cxx = cxx;
    bc.cyy = cyy;
    bc.czz = czz;
    bc.mz_left = bc.mz_right = mz;
    return bc;
}

}  // namespace

// Oracles first: ED reduced density matrices and a definition-level concurrence.

TEST(XStateVsEd, MatchesReducedDensityMatrix) {
    for (const ModelParams& p : {ModelParams{0.7, 1.3, 1, 0.2, 0.6, 4}, ModelParams{1, 0, 1, 0, 0.3, 4}}) {
        const auto res = ed::ground(p);
        ASSERT_TRUE(res.unique());
        const auto nn = momentum_correlators(p);
        for (BondKind k : {BondKind::odd, BondKind::even}) {
            const int l = k == BondKind::odd ? 0 : 1;
            const Eigen::Matrix4d rho = ed::two_site_rdm(res, l, l + 1);
            EXPECT_LT((assemble_xstate(nn.bond(k)).matrix() - rho).cwiseAbs().maxCoeff(), 1e-8);
        }
    }
}

TEST(MutualInformationVsEd, EntropiesFromReducedStates) {
    const ModelParams p{0.7, 1.3, 1, 0.2, 0.6, 4};
    const auto res = ed::ground(p);
    const Eigen::Matrix4d rho = ed::two_site_rdm(res, 0, 1);
    Eigen::Matrix2d ra, rb;
    ra << rho(0, 0) + rho(1, 1), rho(0, 2) + rho(1, 3), rho(2, 0) + rho(3, 1), rho(2, 2) + rho(3, 3);
    rb << rho(0, 0) + rho(2, 2), rho(0, 1) + rho(2, 3), rho(1, 0) + rho(3, 2), rho(1, 1) + rho(3, 3);
    const double want = matrix_entropy_bits(ra) + matrix_entropy_bits(rb) - matrix_entropy_bits(rho);
    const auto x = assemble_xstate(momentum_correlators(p).odd);
    EXPECT_NEAR(mutual_information(x), want, 1e-8);
}

TEST(Concurrence, ClosedFormMatchesDefinition) {
    std::mt19937 rng(31);
    for (int i = 0; i < 10000; ++i) {
        const auto x = random_xstate(rng, i % 2 == 0);
        EXPECT_NEAR(concurrence(x), generic_concurrence(x.matrix()), 1e-9);
    }
}

TEST(Concurrence, RejectsNegativeRadicand) {
    EXPECT_THROW(concurrence(from_values(0, 0, 0.5, 0.9)), std::domain_error);
}

TEST(XState, CompassOddBondMatrix) {
    const double cy = -0.63;
    const auto x = assemble_xstate(from_values(0, cy, 0, 0));
    Eigen::Matrix4d want;
    want << 1, 0, 0, -cy, 0, 1, cy, 0, 0, cy, 1, 0, -cy, 0, 0, 1;
    EXPECT_LT((x.matrix() - want / 4).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(XState, SaturatedIsPure) {
    const auto x = assemble_xstate(from_values(0, 0, 1, -1));
    EXPECT_NEAR(x.u_minus, 1.0, 1e-15);
    EXPECT_NEAR(x.u_plus + x.w1 + x.w2, 0.0, 1e-15);
}

TEST(XState, RejectsNonPositive) {
    EXPECT_THROW(assemble_xstate(from_values(1, 1, -1, 0.5)), std::domain_error);
}

TEST(XState, InvariantsOnModelStates) {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(-2, 2), uh(0, 3);
    for (int i = 0; i < 1000; ++i) {
        const auto nn = momentum_correlators({u(rng), u(rng), u(rng), u(rng), uh(rng), 32});
        for (const auto* bc : {&nn.odd, &nn.even}) {
            const auto x = assemble_xstate(*bc);
            EXPECT_NEAR(x.trace(), 1.0, 1e-12);
            EXPECT_GE(x.u_plus * x.u_minus, x.z_minus * x.z_minus - 1e-12);
            EXPECT_GE(x.w1 * x.w2, x.z_plus * x.z_plus - 1e-12);
            EXPECT_NEAR(x.w1, x.w2, 1e-10);
        }
    }
}

TEST(Measures, ProductState) {
    const auto x = assemble_xstate(from_values(0, 0, 0, 0));
    const auto m = correlation_measures(x);
    EXPECT_NEAR(m.mutual_info, 0, 1e-12);
    EXPECT_NEAR(m.classical, 0, 1e-12);
    EXPECT_NEAR(m.discord, 0, 1e-12);
    EXPECT_NEAR(classical_correlation_numeric(x).value, 0, 1e-12);
}

TEST(Measures, BellState) {
    const auto x = bell_diagonal(0, 0, 1, 0);
    const auto m = correlation_measures(x);
    EXPECT_NEAR(m.mutual_info, 2, 1e-12);
    EXPECT_NEAR(m.classical, 1, 1e-9);
    EXPECT_NEAR(classical_correlation_numeric(x).value, 1, 1e-9);
    EXPECT_NEAR(m.discord, 1, 1e-9);
    EXPECT_NEAR(m.concurrence, 1, 1e-12);
}

TEST(Measures, AdditivityAndBoundsOnModelStates) {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> u(-2, 2), uh(0, 3);
    for (int i = 0; i < 1000; ++i) {
        const auto nn = momentum_correlators({u(rng), u(rng), u(rng), u(rng), uh(rng), 32});
        for (const auto* bc : {&nn.odd, &nn.even}) {
            const auto x = assemble_xstate(*bc);
            const auto m = correlation_measures(x);
            const double s = entropy_bits(x);
            EXPECT_NEAR(m.mutual_info, m.classical + m.discord, 1e-12);
            EXPECT_GE(s, -1e-12);
            EXPECT_LE(s, 2 + 1e-12);
            EXPECT_GE(m.mutual_info, -1e-12);
            EXPECT_LE(m.mutual_info, 2 + 1e-12);
            EXPECT_GE(m.classical, -1e-12);
            EXPECT_LE(m.classical, m.mutual_info + 1e-12);
            EXPECT_GE(m.discord, -1e-12);
            EXPECT_LE(m.discord, 1 + 1e-12);
            EXPECT_GE(m.concurrence, 0);
            EXPECT_LE(m.concurrence, 1 + 1e-12);
        }
    }
}

TEST(Measures, NumericDominatesClosedForm) {
    std::mt19937 rng(47);
    for (int i = 0; i < 1000; ++i) {
        const auto x = random_xstate(rng, true);
        EXPECT_GE(classical_correlation_numeric(x).value, classical_correlation_closed_form(x) - 1e-8);
    }
}

TEST(Measures, LocalUnitaryInvariance) {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> u(-2, 2), uh(0, 3);
    for (int i = 0; i < 200; ++i) {
        const auto nn = momentum_correlators({u(rng), u(rng), u(rng), u(rng), uh(rng), 32});
        BondCorrelators bc = nn.odd;
        const auto base = correlation_measures(assemble_xstate(bc));
        // Rotation by pi about z on one qubit flips both transverse correlators.
        BondCorrelators flipped = bc;
        flipped.cxx = -bc.cxx;
        flipped.cyy = -bc.cyy;
        const auto m1 = correlation_measures(assemble_xstate(flipped));
        EXPECT_NEAR(m1.discord, base.discord, 1e-9);
        EXPECT_NEAR(m1.concurrence, base.concurrence, 1e-9);
        // Rotation by pi/2 about z on one qubit swaps and negates: cxx <-> cyy.
        BondCorrelators swapped = bc;
        std::swap(swapped.cxx, swapped.cyy);
        const auto m2 = correlation_measures(assemble_xstate(swapped));
        EXPECT_NEAR(m2.discord, base.discord, 1e-9);
        EXPECT_NEAR(m2.concurrence, base.concurrence, 1e-9);
    }
}

TEST(ClassicalNumeric, GridMinimum) {
    EXPECT_THROW(classical_correlation_numeric(bell_diagonal(0.25, 0.25, 0.25, 0.25), 32), std::invalid_argument);
}

TEST(ClassicalNumeric, ArgmaxIsCanonicalForTransverseDominatedState) {
    const auto x = assemble_xstate(from_values(-0.8, 0.1, 0.2, -0.3));
    const auto num = classical_correlation_numeric(x);
    EXPECT_NEAR(num.value, classical_correlation_closed_form(x), 1e-9);
    EXPECT_LT(num.argmax.distance_to_canonical(), 1e-3);
}

TEST(MeasurementBasis, ProjectorsAreComplete) {
    std::mt19937 rng(59);
    std::uniform_real_distribution<double> ut(0, pi), up(0, 2 * pi);
    for (int i = 0; i < 100; ++i) {
        const auto [a, b] = MeasurementBasis{ut(rng), up(rng)}.vectors();
        EXPECT_NEAR(std::abs(a.dot(b)), 0.0, 1e-14);
        const Eigen::Matrix2cd sum = a * a.adjoint() + b * b.adjoint();
        EXPECT_LT((sum - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(SingleQubit, Probabilities) {
    const auto s = SingleQubitState::from_magnetization(-0.4);
    EXPECT_NEAR(s.p_up, 0.3, 1e-15);
    EXPECT_NEAR(s.p_down, 0.7, 1e-15);
    EXPECT_NEAR(SingleQubitState::from_magnetization(0).entropy(), 1.0, 1e-15);
}

TEST(Entropy, ZeroLogZero) {
    const std::array<double, 3> p{1.0, 0.0, -1e-12};
    EXPECT_EQ(shannon_bits(p), 0.0);
    const std::array<double, 2> bad{1.1, -0.1};
    EXPECT_THROW(shannon_bits(bad), std::domain_error);
}

TEST(Discord, CompassPointBothBonds) {
    const auto nn = momentum_correlators({0, 1, 1, 0, 0, 512});
    for (const auto* bc : {&nn.odd, &nn.even}) EXPECT_NEAR(discord(assemble_xstate(*bc)), 0, 1e-10);
}

TEST(Discord, DimerChain) {
    const auto nn = momentum_correlators({1.3, 0, 0.7, 0, 0, 512});
    for (const auto* bc : {&nn.odd, &nn.even}) EXPECT_NEAR(discord(assemble_xstate(*bc)), 0, 1e-10);
}

TEST(BellDiagonal, MaximallyMixed) {
    const auto x = bell_diagonal(0.25, 0.25, 0.25, 0.25);
    EXPECT_TRUE(bell_diagonal_discord_zero_test(x));
    EXPECT_NEAR(discord(x), 0, 1e-12);
}

TEST(BellDiagonal, CompassStateFires) {
    const auto nn = momentum_correlators({0, 1, 1, 0, 0, 64});
    const auto x = assemble_xstate(nn.odd);
    const auto ev = x.eigenvalues();
    // Eigenvalues are (1 -+ |cyy|)/4, each twice: they sum to one.
    EXPECT_NEAR(*std::max_element(ev.begin(), ev.end()), (1 + std::abs(nn.odd.cyy)) / 4, 1e-12);
    EXPECT_TRUE(bell_diagonal_discord_zero_test(x));
    EXPECT_LT(discord(x), 1e-9);
}

TEST(BellDiagonal, LargeWeightDoesNotFire) {
    const auto x = bell_diagonal(0.6, 0.4, 0, 0);
    EXPECT_FALSE(bell_diagonal_discord_zero_test(x));
    EXPECT_GT(discord(x), 1e-3);
}

TEST(BellDiagonal, WernerStateShowsCriterionIsOnlyForRankOneTensors) {
    // Werner state with singlet weight 0.4: lambda_max = 0.55 is excluded, but
    // weight 0.3 gives lambda_max = 0.475 < 1/2 with nonzero discord.
    const double f = 0.3;
    const auto x = bell_diagonal((1 - f) / 4, (1 - f) / 4, (1 - f) / 4, (1 - f) / 4 + f);
    EXPECT_TRUE(bell_diagonal_discord_zero_test(x));
    EXPECT_GT(discord(x), 1e-3);
}

TEST(BellDiagonal, ZeroCriterionConsistentOnModelStates) {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 1000; ++i) {
        // Compass points with arbitrary couplings: the states the criterion is meant for.
        const auto nn = momentum_correlators({0, u(rng), u(rng), 0, 0, 32});
        for (const auto* bc : {&nn.odd, &nn.even}) {
            const auto x = assemble_xstate(*bc);
            if (bell_diagonal_discord_zero_test(x)) {
                EXPECT_LT(discord(x), 1e-9);
            }
        }
    }
}

TEST(BellDiagonal, RejectsNonBellDiagonal) {
    EXPECT_THROW(bell_diagonal_discord_zero_test(assemble_xstate(from_values(0.2, 0.1, 0.3, 0.2))),
                 std::invalid_argument);
}
