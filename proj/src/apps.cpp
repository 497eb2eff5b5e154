#include "bff/apps.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <Eigen/Dense>

namespace bff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kConeSumTolerance = 1e-9;
// Turning of a sampled target polygon; exact up to accumulated roundoff.
constexpr double kTurningTolerance = 1e-8;

// Representative of an angle in (-pi, pi].
double wrapAngle(double angle) {
    double wrapped = std::remainder(angle, kTwoPi);
    if (wrapped <= -kPi) wrapped += kTwoPi;
    return wrapped;
}

std::complex<double> toComplex(const Eigen::Vector2d& p) { return {p.x(), p.y()}; }

struct Circle {
    Eigen::Vector2d center;
    double radius;
};

Circle fitCircle(const Eigen::Matrix2Xd& points) {
    const long n = points.cols();
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "a circle fit needs at least three points");
    const Eigen::Vector2d mean = points.rowwise().mean();
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (long i = 0; i < n; ++i) {
        const Eigen::Vector2d p = points.col(i) - mean;
        design(i, 0) = p.x();
        design(i, 1) = p.y();
        design(i, 2) = 1.0;
        rhs[i] = -p.squaredNorm();
    }
    const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs);
    const Eigen::Vector2d center(-0.5 * c[0], -0.5 * c[1]);
    const double r2 = center.squaredNorm() - c[2];
    if (!(r2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "points do not determine a circle");
    return {center + mean, std::sqrt(r2)};
}

Eigen::Matrix2Xd boundaryImage(const DiskMesh& mesh, const PlanarMap& uv) {
    Eigen::Matrix2Xd points(2, mesh.boundaryCount());
    for (int i = 0; i < mesh.boundaryCount(); ++i) points.col(i) = uv.row(mesh.boundary()[i]).transpose();
    return points;
}

Eigen::VectorXd polygonEdgeLengths(const Eigen::Matrix2Xd& points) {
    const long n = points.cols();
    Eigen::VectorXd lengths(n);
    for (long i = 0; i < n; ++i) lengths[i] = (points.col((i + 1) % n) - points.col(i)).norm();
    return lengths;
}

// Least squares similarity z -> a p + b taking `from` onto `to`.
std::pair<std::complex<double>, std::complex<double>> fitSimilarity(const Eigen::Matrix2Xd& from,
                                                                    const Eigen::Matrix2Xd& to) {
    const Eigen::Vector2d fromMean = from.rowwise().mean();
    const Eigen::Vector2d toMean = to.rowwise().mean();
    std::complex<double> numerator = 0.0;
    double denominator = 0.0;
    for (long i = 0; i < from.cols(); ++i) {
        const std::complex<double> p = toComplex(from.col(i) - fromMean);
        const std::complex<double> q = toComplex(to.col(i) - toMean);
        numerator += std::conj(p) * q;
        denominator += std::norm(p);
    }
    const std::complex<double> a = numerator / denominator;
    return {a, toComplex(toMean) - a * toComplex(fromMean)};
}

Eigen::Matrix2Xd transformed(const Eigen::Matrix2Xd& points, std::complex<double> a, std::complex<double> b) {
    Eigen::Matrix2Xd out(2, points.cols());
    for (long i = 0; i < points.cols(); ++i) {
        const std::complex<double> z = a * toComplex(points.col(i)) + b;
        out.col(i) = Eigen::Vector2d(z.real(), z.imag());
    }
    return out;
}

bool segmentsCross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                   const Eigen::Vector2d& d) {
    const auto orient = [](const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r) {
        const double s = (q - p).x() * (r - p).y() - (q - p).y() * (r - p).x();
        return (s > 0.0) - (s < 0.0);
    };
    return orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0;
}

} // namespace

Flattening flattenAuto(const Flattener& flattener, ExtensionKind extension) {
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(flattener.mesh().boundaryCount());
    Flattening result = flattener.flatten(BoundaryConditions::withScaleFactors(u, extension));
    result.method = "auto";
    return result;
}

Eigen::VectorXd anglesFromDirections(const Eigen::VectorXd& directions) {
    const long n = directions.size();
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "a closed boundary needs at least three edges");
    if (!directions.allFinite()) throw Error(ErrorCode::InvalidArgument, "edge directions must be finite");
    Eigen::VectorXd angles(n);
    for (long i = 0; i < n; ++i) angles[i] = wrapAngle(directions[i] - directions[(i + n - 1) % n]);
    const double turning = angles.sum();
    if (std::abs(turning - kTwoPi) > kAngleSumTolerance) {
        std::ostringstream message;
        message << "edge directions turn by " << turning << " radians; a closed boundary needs 2*pi";
        throw Error(ErrorCode::WindingMismatch, message.str());
    }
    return angles;
}

Eigen::VectorXd scaleFactorsFromLengths(const DiskMesh& mesh, const Eigen::VectorXd& targetLengths) {
    const int n = mesh.boundaryCount();
    if (targetLengths.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "expected one target length per boundary edge");
    for (int i = 0; i < n; ++i) {
        if (!(targetLengths[i] > 0.0) || !std::isfinite(targetLengths[i]))
            throw Error(ErrorCode::NonPositiveLength,
                        "target length of boundary edge " + std::to_string(i) + " is not positive");
    }
    Eigen::VectorXd edgeScale(n);
    for (int i = 0; i < n; ++i) edgeScale[i] = std::log(targetLengths[i] / mesh.boundaryEdgeLength(i));
    Eigen::VectorXd u(n);
    for (int j = 0; j < n; ++j) {
        const int i = mesh.prevBoundary(j);
        u[j] = (targetLengths[i] * edgeScale[i] + targetLengths[j] * edgeScale[j]) /
               (targetLengths[i] + targetLengths[j]);
    }
    return u;
}

Eigen::VectorXd sharpCornerAngles(const DiskMesh& mesh, std::span<const Corner> corners) {
    const int n = mesh.boundaryCount();
    std::vector<char> marked(n, 0);
    Eigen::VectorXd angles = Eigen::VectorXd::Zero(n);
    double used = 0.0;
    for (const Corner& corner : corners) {
        const int i = corner.vertex >= 0 && corner.vertex < mesh.vertexCount() ? mesh.boundaryIndex(corner.vertex) : -1;
        if (i < 0)
            throw Error(ErrorCode::InvalidArgument,
                        "corner vertex " + std::to_string(corner.vertex) + " is not on the boundary");
        if (marked[i])
            throw Error(ErrorCode::InvalidArgument,
                        "corner vertex " + std::to_string(corner.vertex) + " is listed twice");
        if (!std::isfinite(corner.angle)) throw Error(ErrorCode::InvalidArgument, "corner angles must be finite");
        marked[i] = 1;
        angles[i] = corner.angle;
        used += corner.angle;
    }

    double freeLength = 0.0;
    for (int i = 0; i < n; ++i)
        if (!marked[i]) freeLength += mesh.dualLength(i);
    if (freeLength == 0.0) {
        checkAngleSum(angles);
        return angles;
    }
    const double remainder = kTwoPi - used;
    for (int i = 0; i < n; ++i)
        if (!marked[i]) angles[i] = remainder * mesh.dualLength(i) / freeLength;
    return angles;
}

Flattening flattenSharp(const Flattener& flattener, std::span<const Corner> corners, ExtensionKind extension) {
    const Eigen::VectorXd angles = sharpCornerAngles(flattener.mesh(), corners);
    Flattening result = flattener.flatten(BoundaryConditions::withExteriorAngles(angles, extension));
    result.method = "sharp";
    return result;
}

double signedCornerAngle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    const Eigen::Vector2d u = b - a;
    const Eigen::Vector2d v = c - a;
    return std::atan2(u.x() * v.y() - u.y() * v.x(), u.dot(v));
}

double layoutAngleSum(const SurfaceMesh& mesh, const PlanarMap& uv, int v) {
    double sum = 0.0;
    for (const Face& f : mesh.faces()) {
        for (int c = 0; c < 3; ++c) {
            if (f[c] != v) continue;
            sum += signedCornerAngle(uv.row(f[c]).transpose(), uv.row(f[(c + 1) % 3]).transpose(),
                                     uv.row(f[(c + 2) % 3]).transpose());
        }
    }
    return sum;
}

ConeFlattener::ConeFlattener(const SurfaceMesh& surface, std::vector<int> cones)
    : surface_(surface), cones_(std::move(cones)) {
    std::set<int> seen;
    for (int c : cones_) {
        if (!seen.insert(c).second)
            throw Error(ErrorCode::InvalidArgument, "cone vertex " + std::to_string(c) + " is listed twice");
    }
    cut_ = cutToDisk(surface_, cones_);

    const CornerAngles angles = interiorAngles(surface_);
    angleDefect_ = discreteCurvatures(surface_, angles).angleDefect;
    laplace_ = std::make_unique<CotanMatrix>(buildLaplace(surface_, angles));
    factor_ = FactoredLaplace::factor(*laplace_);
    flattener_ = std::make_unique<Flattener>(cut_.mesh, cut_.seams.edgePartner);
}

Eigen::VectorXd ConeFlattener::scaleFactors(std::span<const double> coneAngles) const {
    if (coneAngles.size() != cones_.size())
        throw Error(ErrorCode::DimensionMismatch, "expected one angle per cone");
    Eigen::VectorXd phi = -angleDefect_;
    double total = 0.0;
    for (std::size_t c = 0; c < cones_.size(); ++c) {
        if (!std::isfinite(coneAngles[c]) || coneAngles[c] >= kTwoPi)
            throw Error(ErrorCode::InvalidArgument,
                        "cone angle at vertex " + std::to_string(cones_[c]) + " must be finite and below 2*pi");
        phi[cones_[c]] += coneAngles[c];
        total += coneAngles[c];
    }

    if (surface_.isClosed()) {
        const double expected = kTwoPi * surface_.eulerCharacteristic();
        if (std::abs(total - expected) > kConeSumTolerance) {
            std::ostringstream message;
            message.precision(17);
            message << "cone angles sum to " << total << " but a closed surface with Euler characteristic "
                    << surface_.eulerCharacteristic() << " needs " << expected;
            throw Error(ErrorCode::ConeSumViolation, message.str());
        }
        return factor_->solveFull(phi);
    }

    // Zero Dirichlet data on the original boundary.
    Eigen::VectorXd phiI(laplace_->interior().size());
    for (std::size_t k = 0; k < laplace_->interior().size(); ++k) phiI[k] = phi[laplace_->interior()[k]];
    const Eigen::VectorXd uI = factor_->solveInterior(phiI);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(surface_.vertexCount());
    for (std::size_t k = 0; k < laplace_->interior().size(); ++k) u[laplace_->interior()[k]] = uI[k];
    return u;
}

ConeFlattening ConeFlattener::flatten(std::span<const double> coneAngles) const {
    const Eigen::VectorXd u = scaleFactors(coneAngles);
    const DiskMesh& cutMesh = *cut_.mesh;
    Eigen::VectorXd uB(cutMesh.boundaryCount());
    for (int i = 0; i < cutMesh.boundaryCount(); ++i) uB[i] = u[cut_.seams.vertexOrigin[cutMesh.boundary()[i]]];

    ConeFlattening result;
    result.flattening = flattener_->flatten(BoundaryConditions::withScaleFactors(uB, ExtensionKind::Harmonic));
    result.flattening.method = "cones";
    result.cutMesh = cut_.mesh;
    result.seams = cut_.seams;
    result.cones = cones_;
    result.coneAngles.assign(coneAngles.begin(), coneAngles.end());

    std::vector<int> coneIndex(surface_.vertexCount(), -1);
    for (std::size_t c = 0; c < cones_.size(); ++c) coneIndex[cones_[c]] = static_cast<int>(c);
    result.angleSums.assign(cones_.size(), 0.0);
    const PlanarMap& uv = result.flattening.uv;
    for (const Face& f : cutMesh.faces()) {
        for (int c = 0; c < 3; ++c) {
            const int cone = coneIndex[cut_.seams.vertexOrigin[f[c]]];
            if (cone < 0) continue;
            result.angleSums[cone] += signedCornerAngle(uv.row(f[c]).transpose(), uv.row(f[(c + 1) % 3]).transpose(),
                                                        uv.row(f[(c + 2) % 3]).transpose());
        }
    }
    return result;
}

ConeFlattening flattenCones(const SurfaceMesh& surface, std::span<const Cone> cones) {
    std::vector<int> vertices;
    std::vector<double> angles;
    for (const Cone& c : cones) {
        vertices.push_back(c.vertex);
        angles.push_back(c.angle);
    }
    return ConeFlattener(surface, std::move(vertices)).flatten(angles);
}

double circleDeviation(const Eigen::Matrix2Xd& points) {
    const Circle circle = fitCircle(points);
    double deviation = 0.0;
    for (long i = 0; i < points.cols(); ++i)
        deviation = std::max(deviation, std::abs((points.col(i) - circle.center).norm() - circle.radius));
    return deviation / circle.radius;
}

void applySimilarity(Flattening& flattening, std::complex<double> scale, std::complex<double> shift) {
    for (long v = 0; v < flattening.uv.rows(); ++v) {
        const std::complex<double> z = scale * std::complex<double>(flattening.uv(v, 0), flattening.uv(v, 1)) + shift;
        flattening.uv(v, 0) = z.real();
        flattening.uv(v, 1) = z.imag();
    }
    BoundaryCurve& curve = flattening.curve;
    curve.positions = transformed(curve.positions, scale, shift);
    curve.tangents = transformed(curve.tangents, scale / std::abs(scale), 0.0);
    curve.cumulativeAngles.array() += std::arg(scale);
    curve.targetLengths *= std::abs(scale);
    curve.adjustedLengths *= std::abs(scale);
    flattening.boundaryData.scaleFactors.array() += std::log(std::abs(scale));
}

Flattening uniformizeDisk(const Flattener& flattener, const UniformizeOptions& options) {
    if (options.maxIterations < 1 || !(options.damping > 0.0 && options.damping <= 1.0) || !(options.tolerance > 0.0))
        throw Error(ErrorCode::InvalidArgument, "invalid uniformization options");
    const DiskMesh& mesh = flattener.mesh();
    const int n = mesh.boundaryCount();

    // Start from the geodesic curvature of the input, with any deficit
    // (from interior curvature) spread along the boundary by length.
    const Eigen::VectorXd dual = mesh.dualLengths();
    const Eigen::VectorXd& k = flattener.boundaryCurvature();
    Eigen::VectorXd angles = k + (kTwoPi - k.sum()) * dual / dual.sum();

    std::vector<double> history;
    std::vector<double> turning;
    for (int iteration = 1; iteration <= options.maxIterations; ++iteration) {
        turning.push_back(angles.sum());
        Flattening result = flattener.flatten(BoundaryConditions::withExteriorAngles(angles, ExtensionKind::Harmonic));
        const double deviation = circleDeviation(result.curve.positions);
        history.push_back(deviation);
        if (deviation <= options.tolerance) {
            const Circle circle = fitCircle(result.curve.positions);
            applySimilarity(result, 1.0 / circle.radius, -toComplex(circle.center) / circle.radius);
            result.method = "disk";
            result.iterations = iteration;
            result.history = std::move(history);
            result.turning = std::move(turning);
            return result;
        }

        const Eigen::VectorXd& l = result.curve.adjustedLengths;
        Eigen::VectorXd next(n);
        for (int i = 0; i < n; ++i) next[i] = 0.5 * (l[mesh.prevBoundary(i)] + l[i]);
        next *= kTwoPi / next.sum();
        angles = options.damping * next + (1.0 - options.damping) * angles;
    }
    std::ostringstream message;
    message << "uniformization did not reach relative circle deviation " << options.tolerance << " in "
            << options.maxIterations << " iterations (last " << history.back() << ")";
    throw Error(ErrorCode::NoConvergence, message.str());
}

TargetCurve::TargetCurve(std::vector<Eigen::Vector2d> points) {
    for (const Eigen::Vector2d& p : points) {
        if (!p.allFinite()) throw Error(ErrorCode::InvalidArgument, "target curve points must be finite");
        if (points_.empty() || (p - points_.back()).norm() > 0.0) points_.push_back(p);
    }
    while (points_.size() > 1 && (points_.front() - points_.back()).norm() == 0.0) points_.pop_back();
    const std::size_t n = points_.size();
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "target curve needs at least three distinct points");

    double area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d& p = points_[i];
        const Eigen::Vector2d& q = points_[(i + 1) % n];
        area += p.x() * q.y() - p.y() * q.x();
    }
    if (area == 0.0) throw Error(ErrorCode::InvalidArgument, "target curve encloses no area");
    if (area < 0.0) std::reverse(points_.begin(), points_.end());

    // Pairwise segment test; skipped for very dense polylines.
    if (n <= 4096) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                if (segmentsCross(points_[i], points_[(i + 1) % n], points_[j], points_[(j + 1) % n]))
                    throw Error(ErrorCode::InvalidArgument, "target curve intersects itself");
            }
        }
    }

    cumulative_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) cumulative_[i + 1] = cumulative_[i] + (points_[(i + 1) % n] - points_[i]).norm();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) diameter_ = std::max(diameter_, (points_[i] - points_[j]).norm());
}

Eigen::Vector2d TargetCurve::sample(double s) const {
    const double total = length();
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
    const std::size_t n = points_.size();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()) - 1, n - 1);
    const double span = cumulative_[k + 1] - cumulative_[k];
    const double t = span > 0.0 ? (s - cumulative_[k]) / span : 0.0;
    return (1.0 - t) * points_[k] + t * points_[(k + 1) % n];
}

Flattening flattenToCurve(const Flattener& flattener, const TargetCurve& target, const CurveOptions& options) {
    if (options.maxIterations < 1 || !(options.tolerance > 0.0))
        throw Error(ErrorCode::InvalidArgument, "invalid curve mapping options");
    const DiskMesh& mesh = flattener.mesh();
    const int n = mesh.boundaryCount();
    const double threshold = options.tolerance * target.diameter();

    Flattening current = flattenAuto(flattener, options.extension);
    Eigen::Matrix2Xd previous;
    std::vector<double> history;
    std::vector<double> turning;
    for (int iteration = 1; iteration <= options.maxIterations; ++iteration) {
        const Eigen::Matrix2Xd image = boundaryImage(mesh, current.uv);
        const Eigen::VectorXd lengths = polygonEdgeLengths(image);

        // Sample the target at intervals proportional to the current lengths.
        const double scale = target.length() / lengths.sum();
        Eigen::Matrix2Xd samples(2, n);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            samples.col(i) = target.sample(scale * s);
            s += lengths[i];
        }
        if (iteration == 1) {
            const auto [a, b] = fitSimilarity(image, samples);
            previous = transformed(image, a, b);
        }

        Eigen::VectorXd angles(n);
        for (int i = 0; i < n; ++i) {
            const std::complex<double> in = toComplex(samples.col(i) - samples.col((i + n - 1) % n));
            const std::complex<double> out = toComplex(samples.col((i + 1) % n) - samples.col(i));
            angles[i] = std::arg(out / in);
        }
        const double total = angles.sum();
        turning.push_back(total);
        if (!(std::abs(total - kTwoPi) <= kTurningTolerance)) {
            std::ostringstream message;
            message << "sampled target polygon turns by " << total << " radians at iteration " << iteration
                    << "; the samples no longer follow the curve once";
            throw Error(ErrorCode::NoConvergence, message.str());
        }

        current = flattener.flatten(BoundaryConditions::withExteriorAngles(angles, options.extension));
        const auto [a, b] = fitSimilarity(boundaryImage(mesh, current.uv), samples);
        applySimilarity(current, a, b);

        const Eigen::Matrix2Xd aligned = boundaryImage(mesh, current.uv);
        const double displacement = (aligned - previous).colwise().norm().maxCoeff();
        history.push_back(displacement);
        if (displacement <= threshold) {
            current.method = "curve";
            current.iterations = iteration;
            current.history = std::move(history);
            current.turning = std::move(turning);
            return current;
        }
        previous = aligned;
    }
    std::ostringstream message;
    message << "boundary still moved " << history.back() << " (threshold " << threshold << ") after "
            << options.maxIterations << " iterations";
    throw Error(ErrorCode::NoConvergence, message.str());
}

} // namespace bff
