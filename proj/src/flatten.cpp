#include "bff/flatten.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Dense>

namespace bff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Looser than kAngleSumTolerance: the curve also sees angles produced by the
// Dirichlet-to-Neumann map, which carry solver roundoff.
constexpr double kCurveClosureTolerance = 1e-6;

// Closure directions weaker than this (relative to the total dual length,
// i.e. a rotation below about 1e-9 radians) are treated as absent.
constexpr double kDegenerateClosure = 1e-18;

void requireFinite(const Eigen::VectorXd& values, const char* what) {
    if (!values.allFinite())
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " contain non-finite values");
}

void requireSize(const Eigen::VectorXd& values, int expected, const char* what) {
    if (values.size() != expected)
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected " +
                                                      std::to_string(expected) + " values, got " +
                                                      std::to_string(values.size()));
}

void checkSum(const Eigen::VectorXd& angles, double tolerance) {
    const double sum = angles.sum();
    if (!(std::abs(sum - kTwoPi) <= tolerance)) {
        std::ostringstream message;
        message.precision(17);
        message << "exterior angles sum to " << sum << ", expected 2*pi (difference " << sum - kTwoPi
                << ")";
        throw Error(ErrorCode::AngleSumViolation, message.str());
    }
}

} // namespace

const char* extensionKindName(ExtensionKind kind) {
    return kind == ExtensionKind::Holomorphic ? "holomorphic" : "harmonic";
}

BoundaryConditions BoundaryConditions::withScaleFactors(Eigen::VectorXd u, ExtensionKind extension) {
    BoundaryConditions result;
    result.mode = Mode::ScaleFactors;
    result.scaleFactors = std::move(u);
    result.extension = extension;
    return result;
}

BoundaryConditions BoundaryConditions::withExteriorAngles(Eigen::VectorXd angles,
                                                          ExtensionKind extension) {
    BoundaryConditions result;
    result.mode = Mode::ExteriorAngles;
    result.exteriorAngles = std::move(angles);
    result.extension = extension;
    return result;
}

void checkAngleSum(const Eigen::VectorXd& angles, double tolerance) {
    requireFinite(angles, "exterior angles");
    checkSum(angles, tolerance);
}

BoundaryConditions completeBoundaryData(const FactoredLaplace& factor, const CotanMatrix& matrix,
                                        const Eigen::VectorXd& angleDefect,
                                        const Eigen::VectorXd& exteriorAngles,
                                        BoundaryConditions conditions) {
    const int nB = static_cast<int>(matrix.boundary().size());
    requireSize(angleDefect, matrix.size(), "angle defect");
    requireSize(exteriorAngles, nB, "boundary curvature");
    const Eigen::VectorXd phi = -angleDefect;

    if (conditions.mode == BoundaryConditions::Mode::ScaleFactors) {
        requireSize(conditions.scaleFactors, nB, "scale factors");
        requireFinite(conditions.scaleFactors, "scale factors");
        const Eigen::VectorXd h = dirichletToNeumann(factor, matrix, phi, conditions.scaleFactors);
        conditions.exteriorAngles = exteriorAngles - h;
    } else {
        requireSize(conditions.exteriorAngles, nB, "exterior angles");
        checkAngleSum(conditions.exteriorAngles);
        const Eigen::VectorXd h = exteriorAngles - conditions.exteriorAngles;
        conditions.scaleFactors = neumannToDirichlet(factor, matrix, phi, h);
    }
    return conditions;
}

Eigen::VectorXd targetLengths(const DiskMesh& mesh, const Eigen::VectorXd& scaleFactors) {
    const int n = mesh.boundaryCount();
    requireSize(scaleFactors, n, "scale factors");
    Eigen::VectorXd lengths(n);
    for (int i = 0; i < n; ++i) {
        const int j = mesh.nextBoundary(i);
        lengths[i] = std::exp(0.5 * (scaleFactors[i] + scaleFactors[j])) * mesh.boundaryEdgeLength(i);
    }
    return lengths;
}

BoundaryCurve bestFitCurve(const Eigen::VectorXd& targetLengths, const Eigen::VectorXd& exteriorAngles,
                           const Eigen::VectorXd& dualLengths, std::span<const int> edgePartner) {
    const int n = static_cast<int>(targetLengths.size());
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "a closed curve needs at least three edges");
    requireSize(exteriorAngles, n, "exterior angles");
    requireSize(dualLengths, n, "dual lengths");
    if (!edgePartner.empty() && static_cast<int>(edgePartner.size()) != n)
        throw Error(ErrorCode::DimensionMismatch, "edge partner table does not match the boundary");
    requireFinite(targetLengths, "target lengths");
    requireFinite(dualLengths, "dual lengths");
    checkAngleSum(exteriorAngles, kCurveClosureTolerance);
    if ((dualLengths.array() <= 0.0).any())
        throw Error(ErrorCode::InvalidArgument, "dual lengths must be positive");

    BoundaryCurve curve;
    curve.targetLengths = targetLengths;
    curve.cumulativeAngles.resize(n);
    curve.tangents.resize(2, n);
    double phi = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i > 0) phi += exteriorAngles[i];
        curve.cumulativeAngles[i] = phi;
        curve.tangents(0, i) = std::cos(phi);
        curve.tangents(1, i) = std::sin(phi);
    }

    // One unknown per edge, or per seam pair. Each unknown x_v carries the
    // summed mass W_v, the mass-weighted mean target t_v and the summed
    // tangent M_v, which reduces the constrained least squares problem to the
    // same closed form as the unshared case.
    std::vector<int> variable(n, -1);
    int count = 0;
    for (int i = 0; i < n; ++i) {
        const int partner = edgePartner.empty() ? -1 : edgePartner[i];
        if (partner >= 0 && partner < i) {
            variable[i] = variable[partner];
        } else {
            variable[i] = count++;
        }
    }
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(count);
    Eigen::VectorXd target = Eigen::VectorXd::Zero(count);
    Eigen::Matrix2Xd tangent = Eigen::Matrix2Xd::Zero(2, count);
    for (int i = 0; i < n; ++i) {
        const double w = 1.0 / dualLengths[i];
        mass[variable[i]] += w;
        target[variable[i]] += w * targetLengths[i];
        tangent.col(variable[i]) += curve.tangents.col(i);
    }
    target.array() /= mass.array();

    Eigen::Matrix2d gram = Eigen::Matrix2d::Zero();
    for (int v = 0; v < count; ++v) gram += tangent.col(v) * tangent.col(v).transpose() / mass[v];
    const Eigen::Vector2d gap = tangent * target;

    // Seam pairs whose tangents cancel (no rotation across the seam, as on a
    // flat torus) close by themselves. Their constraint directions vanish up
    // to roundoff and are dropped rather than inverted.
    const double scale = dualLengths.sum();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eigen(gram);
    Eigen::Vector2d multiplier = Eigen::Vector2d::Zero();
    for (int k = 0; k < 2; ++k) {
        const double lambda = eigen.eigenvalues()[k];
        if (lambda > kDegenerateClosure * scale) {
            const Eigen::Vector2d dir = eigen.eigenvectors().col(k);
            multiplier += dir.dot(gap) / lambda * dir;
        }
    }
    Eigen::VectorXd x(count);
    for (int v = 0; v < count; ++v) x[v] = target[v] - tangent.col(v).dot(multiplier) / mass[v];

    curve.adjustedLengths.resize(n);
    for (int i = 0; i < n; ++i) curve.adjustedLengths[i] = x[variable[i]];

    std::vector<int> bad;
    for (int i = 0; i < n; ++i)
        if (!(curve.adjustedLengths[i] > 0.0)) bad.push_back(i);
    if (!bad.empty()) {
        std::ostringstream message;
        message << bad.size() << " boundary edge(s) received nonpositive length, first at edge "
                << bad.front() << " (" << curve.adjustedLengths[bad.front()]
                << "); the requested boundary data is too far from any closed curve";
        throw Error(ErrorCode::NonPositiveLength, message.str());
    }

    curve.positions.resize(2, n);
    Eigen::Vector2d p = Eigen::Vector2d::Zero();
    for (int i = 0; i < n; ++i) {
        curve.positions.col(i) = p;
        p += curve.adjustedLengths[i] * curve.tangents.col(i);
    }
    return curve;
}

BoundaryCurve bestFitCurve(const DiskMesh& mesh, const Eigen::VectorXd& targetLengths,
                           const Eigen::VectorXd& exteriorAngles) {
    return bestFitCurve(targetLengths, exteriorAngles, mesh.dualLengths());
}

PlanarMap extendCurve(const FactoredLaplace& factor, const CotanMatrix& matrix,
                      const Eigen::Matrix2Xd& boundaryPositions, ExtensionKind kind) {
    if (boundaryPositions.cols() != static_cast<long>(matrix.boundary().size()))
        throw Error(ErrorCode::DimensionMismatch, "curve does not match the boundary");

    PlanarMap uv(matrix.size(), 2);
    const Eigen::VectorXd re = boundaryPositions.row(0).transpose();
    uv.col(0) = harmonicExtend(factor, matrix, re);
    if (kind == ExtensionKind::Holomorphic) {
        uv.col(1) = conjugateExtend(factor, matrix, uv.col(0));
    } else {
        const Eigen::VectorXd im = boundaryPositions.row(1).transpose();
        uv.col(1) = harmonicExtend(factor, matrix, im);
    }
    return uv;
}

Flattener::Flattener(std::shared_ptr<const DiskMesh> mesh, std::vector<int> edgePartner)
    : mesh_(std::move(mesh)),
      edgePartner_(std::move(edgePartner)),
      angles_(interiorAngles(mesh_->surface())),
      curvatures_(discreteCurvatures(mesh_->surface(), angles_)),
      boundaryCurvature_(restrictToBoundary(*mesh_, curvatures_.exteriorAngle)),
      laplace_(buildLaplace(*mesh_, angles_)),
      factor_(FactoredLaplace::factor(laplace_)) {
    if (!edgePartner_.empty() && static_cast<int>(edgePartner_.size()) != mesh_->boundaryCount())
        throw Error(ErrorCode::DimensionMismatch, "edge partner table does not match the boundary");
}

BoundaryConditions Flattener::complete(const BoundaryConditions& conditions) const {
    return completeBoundaryData(*factor_, laplace_, curvatures_.angleDefect, boundaryCurvature_, conditions);
}

Flattening Flattener::flatten(const BoundaryConditions& conditions) const {
    Flattening result;
    result.boundaryData = complete(conditions);
    const Eigen::VectorXd lengths = targetLengths(*mesh_, result.boundaryData.scaleFactors);
    result.curve = bestFitCurve(lengths, result.boundaryData.exteriorAngles, mesh_->dualLengths(),
                                edgePartner_);
    result.uv = extendCurve(*factor_, laplace_, result.curve.positions, conditions.extension);
    result.method = conditions.mode == BoundaryConditions::Mode::ScaleFactors ? "scaleFactors"
                                                                              : "exteriorAngles";
    return result;
}

} // namespace bff
