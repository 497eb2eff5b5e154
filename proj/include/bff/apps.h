#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bff/flatten.h"
#include "bff/mesh.h"

namespace bff {

// Zero scale factors along the boundary.
Flattening flattenAuto(const Flattener& flattener, ExtensionKind extension = ExtensionKind::Holomorphic);

/// Exterior angles of a polygon whose edge i has direction theta[i]; vertex i
/// sits between edges i - 1 and i. Each turn is taken in (-pi, pi]. Throws
/// WindingMismatch unless the turns add up to one full revolution.
Eigen::VectorXd anglesFromDirections(const Eigen::VectorXd& directions);

/// Scale factors reproducing target boundary edge lengths: per-edge log
/// ratios averaged at each vertex with weights given by the target lengths.
Eigen::VectorXd scaleFactorsFromLengths(const DiskMesh& mesh, const Eigen::VectorXd& targetLengths);

struct Corner {
    int vertex;
    double angle;
};

/// Exterior angles with the requested values at the marked boundary vertices.
/// What is left of 2*pi goes to the unmarked vertices in proportion to their
/// dual lengths.
Eigen::VectorXd sharpCornerAngles(const DiskMesh& mesh, std::span<const Corner> corners);

Flattening flattenSharp(const Flattener& flattener, std::span<const Corner> corners,
                        ExtensionKind extension = ExtensionKind::Harmonic);

// Signed interior angle at a of the image triangle (a, b, c).
double signedCornerAngle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

// Sum of signed layout angles at every corner of vertex v.
double layoutAngleSum(const SurfaceMesh& mesh, const PlanarMap& uv, int v);

struct Cone {
    int vertex;
    // Target angle defect; the flattened angle sum around the cone is 2*pi - angle.
    double angle;
};

struct ConeFlattening {
    Flattening flattening;
    std::shared_ptr<const DiskMesh> cutMesh;
    SeamMap seams;
    std::vector<int> cones;
    std::vector<double> coneAngles;
    // Layout angle sum around each cone, gathered over all of its copies.
    std::vector<double> angleSums;
};

/// Cone flattening of a surface with a fixed set of cone vertices. The
/// surface is factored once uncut and once cut; flatten() then accepts any
/// cone angles using backsolves only.
class ConeFlattener {
public:
    ConeFlattener(const SurfaceMesh& surface, std::vector<int> cones);

    const SurfaceMesh& surface() const { return surface_; }
    std::span<const int> cones() const { return cones_; }
    const CutMesh& cut() const { return cut_; }
    const Flattener& flattener() const { return *flattener_; }

    // Log scale factors of the flat cone metric on the uncut surface.
    Eigen::VectorXd scaleFactors(std::span<const double> coneAngles) const;

    ConeFlattening flatten(std::span<const double> coneAngles) const;

private:
    SurfaceMesh surface_;
    std::vector<int> cones_;
    Eigen::VectorXd angleDefect_;
    std::unique_ptr<CotanMatrix> laplace_;
    std::shared_ptr<const FactoredLaplace> factor_;
    CutMesh cut_;
    std::unique_ptr<Flattener> flattener_;
};

ConeFlattening flattenCones(const SurfaceMesh& surface, std::span<const Cone> cones);

/// Largest distance of the points from their least squares (Kasa) circle,
/// relative to its radius. Points are columns.
double circleDeviation(const Eigen::Matrix2Xd& points);

struct UniformizeOptions {
    int maxIterations = 20;
    // Weight of the new angles when averaging with the previous guess.
    double damping = 0.5;
    double tolerance = 1e-3;
};

/// Conformal map onto a disk by fixed-point iteration on exterior angles
/// proportional to the current dual lengths. The result is centered at the
/// origin with unit radius. Throws NoConvergence after maxIterations.
Flattening uniformizeDisk(const Flattener& flattener, const UniformizeOptions& options = {});

/// Closed polyline parameterized by arc length. Repeated closing points are
/// dropped and clockwise input is reversed, so the curve runs
/// counterclockwise.
class TargetCurve {
public:
    explicit TargetCurve(std::vector<Eigen::Vector2d> points);

    std::span<const Eigen::Vector2d> points() const { return points_; }
    double length() const { return cumulative_.back(); }
    double diameter() const { return diameter_; }

    // Point at arc length s, taken modulo length().
    Eigen::Vector2d sample(double s) const;

private:
    std::vector<Eigen::Vector2d> points_;
    std::vector<double> cumulative_;
    double diameter_ = 0.0;
};

struct CurveOptions {
    int maxIterations = 20;
    // Stop once no boundary vertex moves farther than tolerance * diameter.
    double tolerance = 1e-4;
    ExtensionKind extension = ExtensionKind::Harmonic;
};

/// Conformal map whose boundary follows the target curve. Starts from
/// flattenAuto with the same extension; each iteration samples the curve at
/// the current image edge lengths, prescribes the
/// exterior angles of the sampled polygon, and aligns the result to the
/// samples with a least squares similarity.
Flattening flattenToCurve(const Flattener& flattener, const TargetCurve& target, const CurveOptions& options = {});

// Applies z -> scale * z + shift to the map and its boundary curve.
void applySimilarity(Flattening& flattening, std::complex<double> scale, std::complex<double> shift);

} // namespace bff
