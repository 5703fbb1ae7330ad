#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "csq/analytic.hpp"

using namespace csq;

namespace {

SystemParams params(double omega, double kappa, std::size_t n_fock = 20) {
    SystemParams p;
    p.omega = omega;
    p.kappa = kappa;
    p.n_fock = n_fock;
    return p;
}

} // namespace

TEST(SqueezeParameter, NoDamping) {
    const SqueezeSolution s = squeeze_parameter(params(2, 0));
    EXPECT_TRUE(s.in_domain);
    EXPECT_EQ(s.e2r, 1.0);
    EXPECT_EQ(s.r, 0.0);
}

TEST(SqueezeParameter, DomainEdge) {
    const SqueezeSolution s = squeeze_parameter(params(2, 0.25));
    EXPECT_TRUE(s.in_domain);
    EXPECT_EQ(s.e2r, 0.0);
    EXPECT_TRUE(s.r_infinite());
    EXPECT_EQ(s.r, -std::numeric_limits<double>::infinity());
}

TEST(SqueezeParameter, OutsideDomain) {
    const SqueezeSolution s = squeeze_parameter(params(2, 0.3));
    EXPECT_FALSE(s.in_domain);
    EXPECT_TRUE(std::isnan(s.r));
}

TEST(SqueezeParameter, StrongDampingPoint) {
    const SqueezeSolution s = squeeze_parameter(params(0.53, 0.665));
    const double x = 2 * 0.53 * 0.665;
    EXPECT_NEAR(x, 0.7049, 5e-5);
    // oracle: direct closed form
    const double e2r = std::sqrt(1.0 - x * x);
    EXPECT_NEAR(s.e2r, e2r, 1e-15);
    EXPECT_NEAR(s.r, 0.5 * std::log(e2r), 1e-15);
    EXPECT_NEAR(s.e2r, 0.709307, 1e-6);
    EXPECT_NEAR(s.r, -0.171734, 1e-6);
}

TEST(SqueezeParameter, StrictlyMonotoneInKappa) {
    double prev = 2.0;
    for (int k = 0; k <= 50; ++k) {
        const SqueezeSolution s = squeeze_parameter(params(2, 0.25 * k / 50.0));
        EXPECT_LT(s.e2r, prev);
        EXPECT_LE(s.r, 0.0);
        prev = s.e2r;
    }
}

TEST(OptimalKappa, Locus) {
    EXPECT_DOUBLE_EQ(optimal_kappa(2, 1), 0.25);
    EXPECT_DOUBLE_EQ(optimal_kappa(0.5, 1), 1.0);
    EXPECT_DOUBLE_EQ(optimal_kappa(1.5, 3), 3.0);
    EXPECT_LT(optimal_kappa(1e6, 1), 1e-6);
    EXPECT_GT(optimal_kappa(1, 1), optimal_kappa(2, 1));
    EXPECT_THROW(optimal_kappa(0, 1), InvalidArgument);
}

TEST(Eigenenergies, Examples) {
    const EnergyPair e0 = eigenenergies(params(2, 0.1), 0);
    EXPECT_EQ(e0.plus, 0.0);
    EXPECT_EQ(e0.minus, 0.0);
    const EnergyPair e1 = eigenenergies(params(2, 0), 1);
    EXPECT_DOUBLE_EQ(e1.plus, 1.0);
    EXPECT_DOUBLE_EQ(e1.minus, -1.0);
    const double x = 2 * 0.53 * 0.665;
    const EnergyPair f3 = eigenenergies(params(0.53, 0.665), 1);
    EXPECT_NEAR(f3.plus, std::pow(1 - x * x, 0.75), 1e-15);
    EXPECT_NEAR(f3.plus, 0.5973, 1e-4);
    EXPECT_THROW(eigenenergies(params(2, 0.3), 1), OutOfDomain);
}

TEST(Eigenenergies, SqrtNScaling) {
    for (double kappa : {0.0, 0.05, 0.13, 0.21, 0.25}) {
        const SystemParams p = params(2, kappa);
        EXPECT_NEAR(eigenenergies(p, 4).plus, 2.0 * eigenenergies(p, 1).plus, 1e-15);
        EXPECT_NEAR(eigenenergies(p, 9).minus, 3.0 * eigenenergies(p, 1).minus, 1e-15);
    }
}

TEST(SpectralPeaks, MatchesFirstDoublet) {
    for (double kappa : {0.0, 0.665, 0.9433962264150942}) {
        const SystemParams p = params(0.53, kappa);
        EXPECT_EQ(spectral_peaks(p).plus, eigenenergies(p, 1).plus);
        EXPECT_EQ(spectral_peaks(p).minus, eigenenergies(p, 1).minus);
    }
    EXPECT_DOUBLE_EQ(spectral_peaks(params(2, 0)).plus, 1.0);
    EXPECT_NEAR(spectral_peaks(params(2, 0.25)).plus, 0.0, 1e-12);
}

TEST(GroundState, UndampedIsProductState) {
    const SystemParams p = params(2, 0, 30);
    const StateVector gs = ground_state(p, false);
    EXPECT_EQ((gs.amplitudes() - basis_state(p.space(), AtomLevel::ground, 0).amplitudes()).norm(), 0.0);
    const StateVector back = ground_state(p, true);
    EXPECT_NEAR(std::abs(back.amplitudes().dot(coherent_state(p.space(), 2.0).amplitudes())), 1.0, 1e-12);
}

TEST(GroundState, Normalized) {
    for (double kappa : {0.05, 0.1, 0.2})
        for (bool back : {false, true})
            EXPECT_NEAR(ground_state(params(2, kappa, 40), back).amplitudes().norm(), 1.0, 1e-10);
    EXPECT_THROW(ground_state(params(2, 0.25), false), OutOfDomain);
    EXPECT_THROW(ground_state(params(2, 0.3), false), OutOfDomain);
}

TEST(GroundState, ZeroEnergyEigenstateOfEffectiveHamiltonian) {
    const SystemParams p = params(0.53, 0.665, 60);
    // oracle: dense eigendecomposition of H_eff in the displaced frame
    const Operator h = hamiltonian(p, Frame::displaced);
    const Vector v = ground_state(p, false).amplitudes();
    const cplx e = v.dot(h.matrix() * v);
    const double residual = (h.matrix() * v - e * v).norm();
    EXPECT_LT(residual, 1e-4);
    EXPECT_LT(std::abs(e), 1e-4);
    // the E = 0 eigenspace is two-fold; v must lie inside it
    const Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    double weight = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        if (std::abs(es.eigenvalues()(k)) < 1e-6) weight += std::norm(es.eigenvectors().col(k).dot(v));
    EXPECT_NEAR(weight, 1.0, 1e-6);
}

TEST(GroundState, DressedAmplitudes) {
    const SqueezeSolution sq = squeeze_parameter(params(0.53, 0.665));
    const Eigen::Vector2cd amp = dressed_atom_amplitudes(sq);
    EXPECT_NEAR(std::norm(amp(0)) + std::norm(amp(1)), 1.0, 1e-15);
    EXPECT_NEAR(amp(0).real(), std::sqrt((1 + sq.e2r) / 2), 1e-15);
    EXPECT_NEAR(amp(1).real(), std::sqrt((1 - sq.e2r) / 2), 1e-15);
}
