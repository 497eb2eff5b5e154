#include "bff/bvp.h"

#include <string>

namespace bff {

namespace {

void expectSize(const Eigen::VectorXd& v, std::size_t n, const char* what) {
    if (static_cast<std::size_t>(v.size()) != n)
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " expects " + std::to_string(n) +
                                                      " values, got " + std::to_string(v.size()));
}

Eigen::VectorXd gather(std::span<const int> indices, const Eigen::VectorXd& perVertex) {
    Eigen::VectorXd out(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) out[k] = perVertex[indices[k]];
    return out;
}

} // namespace

Eigen::VectorXd boundaryValues(const CotanMatrix& matrix, const Eigen::VectorXd& perVertex) {
    expectSize(perVertex, matrix.size(), "boundaryValues");
    return gather(matrix.boundary(), perVertex);
}

Eigen::VectorXd dirichletToNeumann(const FactoredLaplace& factor, const CotanMatrix& matrix,
                                   const Eigen::VectorXd& phi, const Eigen::VectorXd& g) {
    expectSize(phi, matrix.size(), "source term");
    expectSize(g, matrix.boundary().size(), "Dirichlet data");

    const Eigen::VectorXd phiI = gather(matrix.interior(), phi);
    const Eigen::VectorXd phiB = gather(matrix.boundary(), phi);
    const Eigen::VectorXd a = factor.solveInterior(phiI - matrix.interiorBoundaryBlock() * g);
    return phiB - matrix.interiorBoundaryBlock().transpose() * a - matrix.boundaryBlock() * g;
}

Eigen::VectorXd solveNeumann(const FactoredLaplace& factor, const CotanMatrix& matrix,
                             const Eigen::VectorXd& phi, const Eigen::VectorXd& h) {
    expectSize(phi, matrix.size(), "source term");
    expectSize(h, matrix.boundary().size(), "Neumann data");

    Eigen::VectorXd rhs = phi;
    for (std::size_t k = 0; k < matrix.boundary().size(); ++k) rhs[matrix.boundary()[k]] -= h[k];
    return factor.solveFull(rhs);
}

Eigen::VectorXd neumannToDirichlet(const FactoredLaplace& factor, const CotanMatrix& matrix,
                                   const Eigen::VectorXd& phi, const Eigen::VectorXd& h) {
    return gather(matrix.boundary(), solveNeumann(factor, matrix, phi, h));
}

Eigen::VectorXd harmonicExtend(const FactoredLaplace& factor, const CotanMatrix& matrix,
                               const Eigen::VectorXd& g) {
    expectSize(g, matrix.boundary().size(), "Dirichlet data");

    const Eigen::VectorXd a = factor.solveInterior(-(matrix.interiorBoundaryBlock() * g));
    Eigen::VectorXd out(matrix.size());
    for (std::size_t k = 0; k < matrix.interior().size(); ++k) out[matrix.interior()[k]] = a[k];
    for (std::size_t k = 0; k < matrix.boundary().size(); ++k) out[matrix.boundary()[k]] = g[k];
    return out;
}

Eigen::VectorXd hilbertTransform(const Eigen::VectorXd& boundaryValues) {
    const Eigen::Index n = boundaryValues.size();
    Eigen::VectorXd h(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index i = j == 0 ? n - 1 : j - 1;
        const Eigen::Index k = j + 1 == n ? 0 : j + 1;
        h[j] = 0.5 * (boundaryValues[k] - boundaryValues[i]);
    }
    return h;
}

Eigen::VectorXd conjugateExtend(const FactoredLaplace& factor, const CotanMatrix& matrix,
                                const Eigen::VectorXd& a) {
    expectSize(a, matrix.size(), "harmonic function");
    const Eigen::VectorXd h = hilbertTransform(gather(matrix.boundary(), a));
    return solveNeumann(factor, matrix, Eigen::VectorXd::Zero(matrix.size()), h);
}

} // namespace bff
