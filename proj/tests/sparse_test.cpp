#include <doctest.h>

#include <Eigen/Dense>

#include "bff/error.h"
#include "bff/sparse.h"
#include "test_support.h"

using namespace bff;

namespace {

CotanMatrix laplaceOf(const shapes::MeshData& data) {
    const auto disk = data.disk();
    return buildLaplace(*disk, interiorAngles(disk->surface()));
}

} // namespace

TEST_CASE("unit square matrix matches hand assembly") {
    // Corners at 0..3 counterclockwise, diagonal 0-2. cot(pi/4) = 1, cot(pi/2) = 0.
    const shapes::MeshData data{{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}}};
    const Eigen::MatrixXd a = Eigen::MatrixXd(laplaceOf(data).matrix());
    Eigen::Matrix4d expected;
    expected << 1.0, -0.5, 0.0, -0.5,
                -0.5, 1.0, -0.5, 0.0,
                0.0, -0.5, 1.0, -0.5,
                -0.5, 0.0, -0.5, 1.0;
    CHECK((a - expected).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(a(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("sparse matrix matches the dense position-based assembly") {
    for (const auto& data : oracle::smallDisks()) {
        const CotanMatrix m = laplaceOf(data);
        const oracle::Dense ref = oracle::cotanLaplacian(data);
        const Eigen::MatrixXd a = Eigen::MatrixXd(m.matrix());
        double worst = 0.0;
        for (int i = 0; i < m.size(); ++i)
            for (int j = 0; j < m.size(); ++j) worst = std::max(worst, std::abs(a(i, j) - ref[i][j]));
        CHECK(worst <= 1e-12);
        CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("nonzero pattern is vertex adjacency plus the diagonal") {
    const auto data = shapes::randomDisk(3, 2);
    const SurfaceMesh mesh = data.surface();
    const CotanMatrix m = laplaceOf(data);
    CHECK(m.matrix().nonZeros() == mesh.vertexCount() + 2 * mesh.edgeCount());
}

TEST_CASE("blocks partition the matrix") {
    const auto data = shapes::hemisphere(3);
    const CotanMatrix m = laplaceOf(data);
    const Eigen::MatrixXd a = Eigen::MatrixXd(m.matrix());
    const auto in = m.interior();
    const auto bd = m.boundary();
    const Eigen::MatrixXd ii = Eigen::MatrixXd(m.interiorBlock());
    const Eigen::MatrixXd ib = Eigen::MatrixXd(m.interiorBoundaryBlock());
    const Eigen::MatrixXd bb = Eigen::MatrixXd(m.boundaryBlock());
    for (std::size_t i = 0; i < in.size(); ++i) {
        for (std::size_t j = 0; j < in.size(); ++j) CHECK(ii(i, j) == a(in[i], in[j]));
        for (std::size_t j = 0; j < bd.size(); ++j) CHECK(ib(i, j) == a(in[i], bd[j]));
    }
    for (std::size_t i = 0; i < bd.size(); ++i)
        for (std::size_t j = 0; j < bd.size(); ++j) CHECK(bb(i, j) == a(bd[i], bd[j]));
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(m.blockIndex(in[i]) == static_cast<int>(i));
}

TEST_CASE("interior factor is the leading block of the full factor") {
    const auto data = shapes::randomDisk(4, 9);
    const CotanMatrix m = laplaceOf(data);
    const auto factor = FactoredLaplace::factor(m);
    const int nI = factor->interiorCount();
    CHECK(nI == static_cast<int>(m.interior().size()));
    const Eigen::MatrixXd full = Eigen::MatrixXd(factor->lowerFactor());
    const Eigen::MatrixXd lead = Eigen::MatrixXd(factor->interiorFactor());
    CHECK((full.topLeftCorner(nI, nI) - lead).cwiseAbs().maxCoeff() == 0.0);
    for (int k = 0; k < nI; ++k) CHECK_FALSE(m.isBoundary(factor->order()[k]));
}

TEST_CASE("full and interior solves match dense solves") {
    std::mt19937_64 rng(4);
    for (const auto& data : oracle::smallDisks()) {
        const CotanMatrix m = laplaceOf(data);
        const auto factor = FactoredLaplace::factor(m);
        const oracle::Dense a = oracle::cotanLaplacian(data);

        Eigen::VectorXd b = oracle::uniform(rng, m.size(), -1.0, 1.0);
        const Eigen::VectorXd x = factor->solveFull(b);
        const Eigen::VectorXd ref = oracle::toEigen(oracle::solveNeumann(a, oracle::toVec(b)));
        CHECK(std::abs(x.mean()) <= 1e-12);
        CHECK((x - ref).cwiseAbs().maxCoeff() <= 1e-9);
        // Residual of the consistent part.
        const Eigen::VectorXd centered = b.array() - b.mean();
        CHECK((m.matrix() * x - centered).norm() <= 1e-7 * centered.norm());

        if (m.interior().empty()) continue;
        const Eigen::VectorXd c = oracle::uniform(rng, static_cast<long>(m.interior().size()), -1.0, 1.0);
        const Eigen::VectorXd y = factor->solveInterior(c);
        const oracle::Vec yRef = oracle::solve(oracle::block(a, m.interior(), m.interior()), oracle::toVec(c));
        CHECK((y - oracle::toEigen(yRef)).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((m.interiorBlock() * y - c).norm() <= 1e-7 * c.norm());
    }
}

TEST_CASE("backsolves leave the factor unchanged and are counted") {
    const auto data = shapes::randomDisk(3, 1);
    const CotanMatrix m = laplaceOf(data);
    const auto factor = FactoredLaplace::factor(m);
    const Eigen::MatrixXd before = Eigen::MatrixXd(factor->lowerFactor());
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(m.size(), -1.0, 1.0);
    const Eigen::VectorXd first = factor->solveFull(b);
    const std::size_t full = factor->fullSolveCount();
    for (int k = 0; k < 5; ++k) CHECK(factor->solveFull(b) == first);
    factor->solveInterior(Eigen::VectorXd::Ones(static_cast<long>(m.interior().size())));
    CHECK(factor->fullSolveCount() == full + 5);
    CHECK(factor->interiorSolveCount() == 1);
    CHECK(factor->solveCount() == full + 6);
    CHECK((Eigen::MatrixXd(factor->lowerFactor()) - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("factorization counter counts factorizations only") {
    const auto data = shapes::squareGrid(4);
    const CotanMatrix m = laplaceOf(data);
    const std::size_t start = factorizationCount();
    const auto factor = FactoredLaplace::factor(m);
    CHECK(factorizationCount() == start + 1);
    factor->solveFull(Eigen::VectorXd::Ones(m.size()));
    CHECK(factorizationCount() == start + 1);
}

TEST_CASE("solver input validation") {
    const auto data = shapes::squareGrid(2);
    const CotanMatrix m = laplaceOf(data);
    const auto factor = FactoredLaplace::factor(m);
    CHECK_THROWS_AS(factor->solveFull(Eigen::VectorXd::Ones(3)), Error);
    CHECK_THROWS_AS(factor->solveInterior(Eigen::VectorXd::Ones(7)), Error);
    CHECK_THROWS_AS(FactoredLaplace::factor(m, -1.0), Error);
}
