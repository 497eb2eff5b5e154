#pragma once

#include <Eigen/Core>

#include "bff/sparse.h"

namespace bff {

// Boundary-indexed vectors follow CotanMatrix::boundary(); vertex-indexed
// vectors have one entry per vertex. Source terms are integrated densities.

/// Dirichlet-to-Neumann map with source phi: solves the Dirichlet-Poisson
/// problem with boundary values g and returns the integrated Neumann data
/// h = phi_B - A_IB^T a_I - A_BB g. One interior backsolve.
Eigen::VectorXd dirichletToNeumann(const FactoredLaplace& factor, const CotanMatrix& matrix,
                                   const Eigen::VectorXd& phi, const Eigen::VectorXd& g);

/// Solves the Neumann-Poisson problem A a = phi - [0; h] and returns the full
/// zero-mean solution. One full backsolve.
Eigen::VectorXd solveNeumann(const FactoredLaplace& factor, const CotanMatrix& matrix,
                             const Eigen::VectorXd& phi, const Eigen::VectorXd& h);

/// Neumann-to-Dirichlet map: boundary values of solveNeumann.
Eigen::VectorXd neumannToDirichlet(const FactoredLaplace& factor, const CotanMatrix& matrix,
                                   const Eigen::VectorXd& phi, const Eigen::VectorXd& h);

/// Discrete harmonic function with boundary values g; equals g on the
/// boundary exactly.
Eigen::VectorXd harmonicExtend(const FactoredLaplace& factor, const CotanMatrix& matrix,
                               const Eigen::VectorXd& g);

/// Neumann data of the harmonic conjugate of boundary values a, given in
/// cyclic boundary order: h_j = (a_k - a_i) / 2 for consecutive i, j, k.
Eigen::VectorXd hilbertTransform(const Eigen::VectorXd& boundaryValues);

/// Harmonic conjugate of a vertex function a: the zero-mean Neumann-Laplace
/// solution with data hilbertTransform(a|_B). Requires a single boundary loop
/// listed in cyclic order.
Eigen::VectorXd conjugateExtend(const FactoredLaplace& factor, const CotanMatrix& matrix,
                                const Eigen::VectorXd& a);

// Gathers the boundary block of a vertex function, in CotanMatrix::boundary() order.
Eigen::VectorXd boundaryValues(const CotanMatrix& matrix, const Eigen::VectorXd& perVertex);

} // namespace bff
