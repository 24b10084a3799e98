#include <ddirac/linalg_dirac.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace ddirac;

namespace {

Vector e(Eigen::Index n, Eigen::Index i)
{
    return Vector::Unit(n, i);
}

/// True when the column spans of a and b coincide.
bool same_span(const Matrix& a, const Matrix& b)
{
    if (oracle::gram_schmidt(a).cols() != oracle::gram_schmidt(b).cols()) return false;
    return (oracle::projector(a) - oracle::projector(b)).cwiseAbs().maxCoeff() < 1e-10;
}

Matrix stacked(std::initializer_list<PairedVector> vs)
{
    Matrix m(2 * vs.begin()->dim(), static_cast<Eigen::Index>(vs.size()));
    Eigen::Index j = 0;
    for (const auto& v : vs) m.col(j++) = v.stacked();
    return m;
}

} // namespace

TEST(Pairing, VanishesWithoutCovectorParts)
{
    std::mt19937 rng(1);
    for (int i = 0; i < 10; ++i) {
        const PairedVector x(oracle::random_vector(rng, 3), Vector::Zero(3));
        const PairedVector y(oracle::random_vector(rng, 3), Vector::Zero(3));
        EXPECT_EQ(pairing(x, y), 0.0);
    }
}

TEST(Pairing, UnitPairCountsTwice)
{
    const PairedVector x(e(2, 0), e(2, 0));
    EXPECT_DOUBLE_EQ(pairing(x, x), 2.0);
}

TEST(Pairing, SymmetricAndBilinear)
{
    std::mt19937 rng(2);
    for (int i = 0; i < 100; ++i) {
        const PairedVector x(oracle::random_vector(rng, 4), oracle::random_vector(rng, 4));
        const PairedVector y(oracle::random_vector(rng, 4), oracle::random_vector(rng, 4));
        const PairedVector z(oracle::random_vector(rng, 4), oracle::random_vector(rng, 4));
        EXPECT_NEAR(pairing(x, y), pairing(y, x), 1e-12);
        const PairedVector yz(2.0 * y.v - z.v, 2.0 * y.a - z.a);
        EXPECT_NEAR(pairing(x, yz), 2.0 * pairing(x, y) - pairing(x, z), 1e-12);
    }
}

TEST(Pairing, DimensionMismatchThrows)
{
    const PairedVector x(Vector::Zero(2), Vector::Zero(2));
    const PairedVector y(Vector::Zero(3), Vector::Zero(3));
    EXPECT_THROW(pairing(x, y), InvalidInput);
    EXPECT_THROW(PairedVector(Vector::Zero(2), Vector::Zero(3)), InvalidInput);
}

TEST(LinSubspace, RejectsRankDeficientBasis)
{
    Matrix b(3, 2);
    b << 1, 2, 0, 0, 1, 2;
    EXPECT_THROW(LinSubspace{b}, InvalidInput);
    EXPECT_THROW(LinSubspace{Matrix::Zero(2, 1)}, InvalidInput);
    EXPECT_EQ(LinSubspace::span(b).dim(), 1);
}

TEST(SkewForm, RejectsNonSkewMatrix)
{
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    EXPECT_THROW(SkewForm{m}, InvalidInput);
}

TEST(InducedDirac, FullSpaceZeroFormIsTangentPart)
{
    const LinSubspace d = induced_dirac(LinSubspace::full(2), SkewForm::zero(2));
    EXPECT_EQ(d.dim(), 2);
    const Matrix expected = stacked({PairedVector(e(2, 0), Vector::Zero(2)), PairedVector(e(2, 1), Vector::Zero(2))});
    EXPECT_TRUE(same_span(d.basis(), expected));
}

TEST(InducedDirac, FullSpaceNondegenerateFormIsGraph)
{
    Matrix w(2, 2);
    w << 0, 1, -1, 0;
    const LinSubspace d = induced_dirac(LinSubspace::full(2), SkewForm(w));
    EXPECT_EQ(d.dim(), 2);
    const Matrix expected = stacked({PairedVector(e(2, 0), w * e(2, 0)), PairedVector(e(2, 1), w * e(2, 1))});
    EXPECT_TRUE(same_span(d.basis(), expected));
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
        const auto x = PairedVector::from_stacked(d.basis().col(j));
        EXPECT_LT((x.a - w * x.v).norm(), 1e-10);
    }
}

TEST(InducedDirac, LineWithZeroForm)
{
    const LinSubspace d = induced_dirac(LinSubspace(e(2, 0)), SkewForm::zero(2));
    const Matrix expected = stacked({PairedVector(e(2, 0), Vector::Zero(2)), PairedVector(Vector::Zero(2), e(2, 1))});
    EXPECT_EQ(d.dim(), 2);
    EXPECT_TRUE(same_span(d.basis(), expected));
}

TEST(InducedDirac, ZeroDistributionGivesCotangentFibre)
{
    const LinSubspace d = induced_dirac(LinSubspace::zero(3), SkewForm(Matrix::Zero(3, 3)));
    EXPECT_EQ(d.dim(), 3);
    EXPECT_LT(d.basis().topRows(3).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InducedDirac, DimensionMismatchThrows)
{
    EXPECT_THROW(induced_dirac(LinSubspace::full(2), SkewForm::zero(3)), InvalidInput);
}

TEST(InducedDirac, GraphOfNondegenerateFormOnFullSpace)
{
    std::mt19937 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 2 * (1 + trial % 3);
        const Matrix w = oracle::random_skew(rng, n);
        const LinSubspace d = induced_dirac(LinSubspace::full(n), SkewForm(w));
        for (Eigen::Index j = 0; j < d.dim(); ++j) {
            const auto x = PairedVector::from_stacked(d.basis().col(j));
            EXPECT_LT((x.a - w * x.v).norm(), 1e-10);
        }
    }
}

TEST(IsDirac, GraphOfSkewFormIsDirac)
{
    std::mt19937 rng(4);
    for (Eigen::Index n = 1; n <= 5; ++n) {
        const Matrix w = oracle::random_skew(rng, n);
        Matrix graph(2 * n, n);
        graph << Matrix::Identity(n, n), w;
        EXPECT_TRUE(is_dirac(LinSubspace(graph), n, 1e-10));
    }
}

TEST(IsDirac, DiagonalLineIsNotIsotropic)
{
    Matrix d(2, 1);
    d << 1, 1;
    EXPECT_FALSE(is_dirac(LinSubspace(d), 1, 1e-10));
}

TEST(IsDirac, WrongDimensionIsNotDirac)
{
    Matrix d(4, 1);
    d << 1, 0, 0, 0;
    EXPECT_FALSE(is_dirac(LinSubspace(d), 2, 1e-10));
}

TEST(IsDirac, OddAmbientDimensionThrows)
{
    EXPECT_THROW(is_dirac(LinSubspace::full(3), 1, 1e-10), InvalidInput);
    EXPECT_THROW(is_dirac(LinSubspace::full(4), 1, 1e-10), InvalidInput);
}

TEST(IsDirac, InducedStructuresAreDiracInDimensionFour)
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index k = trial % 5;
        const LinSubspace delta(oracle::random_matrix(rng, 4, k));
        const SkewForm omega(oracle::random_skew(rng, 4));
        EXPECT_TRUE(is_dirac(induced_dirac(delta, omega), 4, 1e-10)) << "trial " << trial;
    }
}

TEST(IsDirac, InducedStructuresAreDiracAllDimensions)
{
    std::mt19937 rng(6);
    for (Eigen::Index n = 1; n <= 6; ++n) {
        for (Eigen::Index k = 0; k <= n; ++k) {
            const LinSubspace delta(oracle::random_matrix(rng, n, k));
            const SkewForm omega(oracle::random_skew(rng, n));
            EXPECT_TRUE(is_dirac(induced_dirac(delta, omega), n, 1e-10)) << "n=" << n << " k=" << k;
        }
    }
}

TEST(MembershipResidual, BasisVectorsOfInducedStructureAreMembers)
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 1 + trial % 6;
        const LinSubspace delta(oracle::random_matrix(rng, n, trial % (n + 1)));
        const SkewForm omega(oracle::random_skew(rng, n));
        const LinSubspace d = induced_dirac(delta, omega);
        for (Eigen::Index j = 0; j < d.dim(); ++j)
            EXPECT_LT(membership_residual(PairedVector::from_stacked(d.basis().col(j)), delta, omega), 1e-12);
        // and every combination of them
        const Vector mix = d.basis() * oracle::random_vector(rng, d.dim());
        EXPECT_LT(membership_residual(PairedVector::from_stacked(mix), delta, omega), 1e-12);
    }
}

TEST(MembershipResidual, UnitDistanceOffLine)
{
    const PairedVector x(e(2, 0), Vector::Zero(2));
    EXPECT_NEAR(membership_residual(x, LinSubspace(e(2, 1)), SkewForm::zero(2)), 1.0, 1e-15);
}

TEST(MembershipResidual, AgreesWithLeastSquaresOracle)
{
    std::mt19937 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix basis = oracle::random_matrix(rng, 4, 1 + trial % 3);
        const Matrix w = oracle::random_skew(rng, 4);
        const PairedVector x(oracle::random_vector(rng, 4), oracle::random_vector(rng, 4));

        const double off = oracle::ls_distance(basis, x.v);
        double form = 0.0;
        for (Eigen::Index j = 0; j < basis.cols(); ++j)
            form = std::max(form, std::abs(x.a.dot(basis.col(j)) - (w * x.v).dot(basis.col(j))));
        const double expected = std::max(off, form);

        const double got = membership_residual(x, LinSubspace(basis), SkewForm(w));
        EXPECT_GT(got, 1e-6);
        EXPECT_NEAR(got, expected, 1e-12 * std::max(1.0, expected));
    }
}

TEST(MembershipResidual, PositiveOffTheStructure)
{
    std::mt19937 rng(9);
    const LinSubspace delta(oracle::random_matrix(rng, 4, 2));
    const SkewForm omega(oracle::random_skew(rng, 4));
    const LinSubspace d = induced_dirac(delta, omega);
    const Matrix p = oracle::projector(d.basis());
    for (int i = 0; i < 20; ++i) {
        const Vector v = oracle::random_vector(rng, 8);
        const Vector outside = v - p * v;
        const Vector member = d.basis() * oracle::random_vector(rng, 4);
        EXPECT_GT(membership_residual(PairedVector::from_stacked(member + outside), delta, omega), 1e-8);
    }
}
