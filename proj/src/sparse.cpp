#include "bff/sparse.h"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

namespace bff {

namespace {

std::atomic<std::size_t> gFactorizations{0};

using Triplet = Eigen::Triplet<double>;

std::vector<int> amdOrder(const SparseMatrix& block) {
    const int n = static_cast<int>(block.rows());
    std::vector<int> order(n);
    if (n == 0) return order;
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> inverse;
    amd(block, inverse);
    for (int k = 0; k < n; ++k) order[k] = inverse.indices()[k];
    return order;
}

CotanMatrix assembleLaplace(const SurfaceMesh& mesh, const CornerAngles& angles,
                            std::vector<int> boundary) {
    if (static_cast<int>(angles.size()) != mesh.faceCount())
        throw Error(ErrorCode::DimensionMismatch, "angle table does not match the mesh");

    std::vector<Triplet> triplets;
    triplets.reserve(12 * mesh.faceCount());
    for (int f = 0; f < mesh.faceCount(); ++f) {
        const Face& face = mesh.faces()[f];
        for (int c = 0; c < 3; ++c) {
            const int i = face[(c + 1) % 3];
            const int j = face[(c + 2) % 3];
            const double w = 0.5 / std::tan(angles[f][c]);
            triplets.emplace_back(i, i, w);
            triplets.emplace_back(j, j, w);
            triplets.emplace_back(i, j, -w);
            triplets.emplace_back(j, i, -w);
        }
    }
    SparseMatrix matrix(mesh.vertexCount(), mesh.vertexCount());
    matrix.setFromTriplets(triplets.begin(), triplets.end());

    std::vector<int> interior;
    std::vector<char> onLoop(mesh.vertexCount(), 0);
    for (int v : boundary) onLoop[v] = 1;
    for (int v = 0; v < mesh.vertexCount(); ++v)
        if (!onLoop[v]) interior.push_back(v);
    return CotanMatrix(std::move(matrix), std::move(interior), std::move(boundary));
}

} // namespace

CotanMatrix::CotanMatrix(SparseMatrix matrix, std::vector<int> interior, std::vector<int> boundary)
    : matrix_(std::move(matrix)), interior_(std::move(interior)), boundary_(std::move(boundary)) {
    const int n = size();
    if (static_cast<int>(interior_.size() + boundary_.size()) != n)
        throw Error(ErrorCode::DimensionMismatch, "partition does not cover the matrix");

    blockIndex_.assign(n, -1);
    isBoundary_.assign(n, 0);
    for (int k = 0; k < static_cast<int>(interior_.size()); ++k) blockIndex_[interior_[k]] = k;
    for (int k = 0; k < static_cast<int>(boundary_.size()); ++k) {
        blockIndex_[boundary_[k]] = k;
        isBoundary_[boundary_[k]] = 1;
    }

    const int nI = static_cast<int>(interior_.size());
    const int nB = static_cast<int>(boundary_.size());
    std::vector<Triplet> ii, ib, bb;
    for (int col = 0; col < matrix_.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(matrix_, col); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            const int br = blockIndex_[r];
            const int bc = blockIndex_[c];
            if (!isBoundary_[r] && !isBoundary_[c]) {
                ii.emplace_back(br, bc, it.value());
            } else if (!isBoundary_[r] && isBoundary_[c]) {
                ib.emplace_back(br, bc, it.value());
            } else if (isBoundary_[r] && isBoundary_[c]) {
                bb.emplace_back(br, bc, it.value());
            }
        }
    }
    interiorBlock_.resize(nI, nI);
    interiorBlock_.setFromTriplets(ii.begin(), ii.end());
    interiorBoundaryBlock_.resize(nI, nB);
    interiorBoundaryBlock_.setFromTriplets(ib.begin(), ib.end());
    boundaryBlock_.resize(nB, nB);
    boundaryBlock_.setFromTriplets(bb.begin(), bb.end());
}

CotanMatrix buildLaplace(const DiskMesh& mesh, const CornerAngles& angles) {
    return assembleLaplace(mesh.surface(), angles,
                           std::vector<int>(mesh.boundary().begin(), mesh.boundary().end()));
}

CotanMatrix buildLaplace(const SurfaceMesh& mesh, const CornerAngles& angles) {
    std::vector<int> boundary;
    for (const auto& loop : mesh.boundaryLoops()) boundary.insert(boundary.end(), loop.begin(), loop.end());
    return assembleLaplace(mesh, angles, std::move(boundary));
}

std::size_t factorizationCount() { return gFactorizations.load(); }

std::shared_ptr<const FactoredLaplace> FactoredLaplace::factor(const CotanMatrix& matrix,
                                                               double regularization) {
    if (!(regularization >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "regularization must be nonnegative");

    const int n = matrix.size();
    const int nI = static_cast<int>(matrix.interior().size());
    const int nB = static_cast<int>(matrix.boundary().size());

    std::shared_ptr<FactoredLaplace> result(new FactoredLaplace());
    FactoredLaplace& f = *result;
    f.interiorCount_ = nI;

    // Fill-reducing orderings are computed per block and concatenated, so the
    // interior rows of the factor never mix with boundary rows.
    const std::vector<int> interiorOrder = amdOrder(matrix.interiorBlock());
    const std::vector<int> boundaryOrder = amdOrder(matrix.boundaryBlock());
    f.order_.reserve(n);
    f.interiorPosition_.assign(nI, -1);
    for (int k = 0; k < nI; ++k) {
        f.order_.push_back(matrix.interior()[interiorOrder[k]]);
        f.interiorPosition_[interiorOrder[k]] = k;
    }
    for (int k = 0; k < nB; ++k) f.order_.push_back(matrix.boundary()[boundaryOrder[k]]);
    f.position_.assign(n, -1);
    for (int k = 0; k < n; ++k) f.position_[f.order_[k]] = k;

    const SparseMatrix& a = matrix.matrix();
    std::vector<Triplet> triplets;
    triplets.reserve(a.nonZeros() + 1);
    for (int col = 0; col < a.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(a, col); it; ++it)
            triplets.emplace_back(f.position_[it.row()], f.position_[it.col()], it.value());
    const double meanDiagonal = a.diagonal().sum() / std::max(n, 1);
    triplets.emplace_back(n - 1, n - 1, regularization * meanDiagonal);
    SparseMatrix permuted(n, n);
    permuted.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> llt(permuted);
    ++gFactorizations;
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::NotPositiveDefinite,
                    "Cholesky factorization failed; the cotan matrix is not positive definite");

    f.lower_ = llt.matrixL();
    f.interiorLower_ = f.lower_.block(0, 0, nI, nI);
    return result;
}

Eigen::VectorXd FactoredLaplace::solveFull(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != size())
        throw Error(ErrorCode::DimensionMismatch, "full solve expects " + std::to_string(size()) +
                                                      " values, got " + std::to_string(rhs.size()));
    const double mean = rhs.mean();
    Eigen::VectorXd y(size());
    for (int k = 0; k < size(); ++k) y[k] = rhs[order_[k]] - mean;
    lower_.triangularView<Eigen::Lower>().solveInPlace(y);
    lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(y);

    Eigen::VectorXd x(size());
    for (int k = 0; k < size(); ++k) x[order_[k]] = y[k];
    x.array() -= x.mean();
    ++*fullSolves_;
    return x;
}

Eigen::VectorXd FactoredLaplace::solveInterior(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != interiorCount_)
        throw Error(ErrorCode::DimensionMismatch,
                    "interior solve expects " + std::to_string(interiorCount_) + " values, got " +
                        std::to_string(rhs.size()));
    if (boundaryCount() == 0)
        throw Error(ErrorCode::InvalidArgument, "a closed surface has no Dirichlet problem");

    Eigen::VectorXd y(interiorCount_);
    for (int l = 0; l < interiorCount_; ++l) y[interiorPosition_[l]] = rhs[l];
    interiorLower_.triangularView<Eigen::Lower>().solveInPlace(y);
    interiorLower_.transpose().triangularView<Eigen::Upper>().solveInPlace(y);

    Eigen::VectorXd x(interiorCount_);
    for (int l = 0; l < interiorCount_; ++l) x[l] = y[interiorPosition_[l]];
    ++*interiorSolves_;
    return x;
}

} // namespace bff
