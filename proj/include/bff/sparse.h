#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "bff/mesh.h"

namespace bff {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Zero-Neumann cotan Laplace matrix (positive semidefinite, constants in its
/// kernel) together with an interior/boundary partition of the vertices.
class CotanMatrix {
public:
    CotanMatrix(SparseMatrix matrix, std::vector<int> interior, std::vector<int> boundary);

    const SparseMatrix& matrix() const { return matrix_; }
    int size() const { return static_cast<int>(matrix_.rows()); }

    std::span<const int> interior() const { return interior_; }
    std::span<const int> boundary() const { return boundary_; }

    // Index of v within its own block.
    int blockIndex(int v) const { return blockIndex_[v]; }
    bool isBoundary(int v) const { return isBoundary_[v]; }

    const SparseMatrix& interiorBlock() const { return interiorBlock_; }
    const SparseMatrix& interiorBoundaryBlock() const { return interiorBoundaryBlock_; }
    const SparseMatrix& boundaryBlock() const { return boundaryBlock_; }

private:
    SparseMatrix matrix_;
    std::vector<int> interior_;
    std::vector<int> boundary_;
    std::vector<int> blockIndex_;
    std::vector<char> isBoundary_;
    SparseMatrix interiorBlock_;
    SparseMatrix interiorBoundaryBlock_;
    SparseMatrix boundaryBlock_;
};

// Boundary block follows the loop order of the disk.
CotanMatrix buildLaplace(const DiskMesh& mesh, const CornerAngles& angles);
// Boundary block follows the surface's loops, concatenated.
CotanMatrix buildLaplace(const SurfaceMesh& mesh, const CornerAngles& angles);

// Process-wide number of Cholesky factorizations performed so far.
std::size_t factorizationCount();

/// Sparse Cholesky factor of a cotan matrix, ordered interior-first so the
/// leading block doubles as the factor of the interior (Dirichlet) block.
///
/// The constant kernel is removed by adding `regularization` times the mean
/// diagonal to a single boundary entry. For right-hand sides orthogonal to
/// the constants that shift is exact: the solution satisfies the singular
/// system and the interior block is left untouched.
class FactoredLaplace {
public:
    static constexpr double kDefaultRegularization = 1.0;

    static std::shared_ptr<const FactoredLaplace> factor(const CotanMatrix& matrix,
                                                         double regularization = kDefaultRegularization);

    int size() const { return static_cast<int>(order_.size()); }
    int interiorCount() const { return interiorCount_; }
    int boundaryCount() const { return size() - interiorCount_; }

    // Solves the Neumann system A x = b over all vertices. The mean of b is
    // discarded and x is returned with zero mean.
    Eigen::VectorXd solveFull(const Eigen::VectorXd& rhs) const;

    // Solves A_II x = b, indexed like CotanMatrix::interior().
    Eigen::VectorXd solveInterior(const Eigen::VectorXd& rhs) const;

    // Lower factor of the permuted matrix, and its leading interior block.
    const SparseMatrix& lowerFactor() const { return lower_; }
    const SparseMatrix& interiorFactor() const { return interiorLower_; }
    // order()[k] is the vertex placed at row k of the factor.
    std::span<const int> order() const { return order_; }

    std::size_t fullSolveCount() const { return fullSolves_->load(); }
    std::size_t interiorSolveCount() const { return interiorSolves_->load(); }
    std::size_t solveCount() const { return fullSolveCount() + interiorSolveCount(); }

private:
    FactoredLaplace() = default;

    int interiorCount_ = 0;
    std::vector<int> order_;
    std::vector<int> position_;
    // Position within the interior factor for each entry of CotanMatrix::interior().
    std::vector<int> interiorPosition_;
    SparseMatrix lower_;
    SparseMatrix interiorLower_;
    std::unique_ptr<std::atomic<std::size_t>> fullSolves_ = std::make_unique<std::atomic<std::size_t>>(0);
    std::unique_ptr<std::atomic<std::size_t>> interiorSolves_ = std::make_unique<std::atomic<std::size_t>>(0);
};

} // namespace bff
