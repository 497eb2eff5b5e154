#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bff/flatten.h"
#include "bff/mesh.h"

namespace bff {

struct QualityReport {
    // Ratio of singular values of the map on each face; infinite on
    // degenerate image faces.
    std::vector<double> faceQ;
    // Source-area weighted mean over non-degenerate faces, and maximum.
    double qAvg = 1.0;
    double qMax = 1.0;
    // Log scale per vertex recovered from image edge lengths, as measured
    // and shifted to zero area-weighted mean.
    Eigen::VectorXd rawScaleFactors;
    Eigen::VectorXd scaleFactors;
    // Faces whose image has nonpositive signed area.
    std::vector<int> flippedFaces;
    double flippedAreaFraction = 0.0;
    // Faces whose image has (numerically) zero area.
    std::vector<int> degenerateFaces;
};

/// Quasi-conformal error of the linear map taking the triangle with the given
/// edge lengths (entry c opposite corner c) onto the image triangle. Returns
/// infinity when the image is degenerate.
double faceQuasiConformalError(const FaceLengths& lengths, const Eigen::Vector2d& f0, const Eigen::Vector2d& f1,
                               const Eigen::Vector2d& f2);

QualityReport measureQuality(const SurfaceMesh& mesh, const PlanarMap& uv);

struct ConvergenceRow {
    int level = 0;
    int vertices = 0;
    int faces = 0;
    double meanEdgeLength = 0.0;
    double qAvgMinusOne = 0.0;
    double qMax = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    // Least squares slope of log(Q_avg - 1) against log(mean edge length).
    double slope = 0.0;
};

using MeshGenerator = std::function<std::shared_ptr<const DiskMesh>(int level)>;
using FlattenMethod = std::function<Flattening(const Flattener&)>;

ConvergenceStudy convergenceStudy(const MeshGenerator& generator, int levels, const FlattenMethod& method);

double logLogSlope(std::span<const double> x, std::span<const double> y);

std::string convergenceCsv(const ConvergenceStudy& study);

} // namespace bff
