#include "bff/metrics.h"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace bff {

namespace {

// Image triangles smaller than this fraction of their squared stretch are
// treated as degenerate.
constexpr double kDegenerateImage = 1e-14;

} // namespace

double faceQuasiConformalError(const FaceLengths& lengths, const Eigen::Vector2d& f0, const Eigen::Vector2d& f1,
                               const Eigen::Vector2d& f2) {
    // Source layout: corner 0 at the origin, corner 1 on the +x axis.
    const double l01 = lengths[2];
    const double l02 = lengths[1];
    const double l12 = lengths[0];
    const double x2 = (l01 * l01 + l02 * l02 - l12 * l12) / (2.0 * l01);
    const double y2 = std::sqrt(std::max(0.0, l02 * l02 - x2 * x2));

    Eigen::Matrix2d source;
    source << l01, x2, 0.0, y2;
    Eigen::Matrix2d image;
    image.col(0) = f1 - f0;
    image.col(1) = f2 - f0;
    const Eigen::Matrix2d j = image * source.inverse();

    const double e = 0.5 * (j(0, 0) + j(1, 1));
    const double f = 0.5 * (j(0, 0) - j(1, 1));
    const double g = 0.5 * (j(1, 0) + j(0, 1));
    const double h = 0.5 * (j(1, 0) - j(0, 1));
    const double q = std::hypot(e, h);
    const double r = std::hypot(f, g);
    const double sigma1 = q + r;
    const double sigma2 = std::abs(q - r);
    if (!(sigma2 > kDegenerateImage * sigma1)) return std::numeric_limits<double>::infinity();
    return sigma1 / sigma2;
}

QualityReport measureQuality(const SurfaceMesh& mesh, const PlanarMap& uv) {
    if (uv.rows() != mesh.vertexCount())
        throw Error(ErrorCode::DimensionMismatch, "map does not match the mesh");

    QualityReport report;
    report.faceQ.resize(mesh.faceCount());
    double weighted = 0.0;
    double totalArea = 0.0;
    double measuredArea = 0.0;
    double flippedArea = 0.0;
    report.qMax = 1.0;
    std::vector<double> vertexArea(mesh.vertexCount(), 0.0);
    for (int f = 0; f < mesh.faceCount(); ++f) {
        const Face& face = mesh.faces()[f];
        const FaceLengths l = mesh.faceLengths(f);
        const double s = 0.5 * (l[0] + l[1] + l[2]);
        const double area = std::sqrt(std::max(0.0, s * (s - l[0]) * (s - l[1]) * (s - l[2])));
        totalArea += area;
        for (int v : face) vertexArea[v] += area / 3.0;

        const Eigen::Vector2d p0 = uv.row(face[0]).transpose();
        const Eigen::Vector2d p1 = uv.row(face[1]).transpose();
        const Eigen::Vector2d p2 = uv.row(face[2]).transpose();
        const Eigen::Vector2d a = p1 - p0;
        const Eigen::Vector2d b = p2 - p0;
        const double signedArea = 0.5 * (a.x() * b.y() - a.y() * b.x());
        if (signedArea <= 0.0) {
            report.flippedFaces.push_back(f);
            flippedArea += area;
        }

        const double q = faceQuasiConformalError(l, p0, p1, p2);
        report.faceQ[f] = q;
        if (std::isinf(q)) {
            report.degenerateFaces.push_back(f);
            continue;
        }
        weighted += q * area;
        measuredArea += area;
        report.qMax = std::max(report.qMax, q);
    }
    report.qAvg = measuredArea > 0.0 ? weighted / measuredArea : std::numeric_limits<double>::infinity();
    report.flippedAreaFraction = totalArea > 0.0 ? flippedArea / totalArea : 0.0;

    // Per-vertex log scale from incident edges, weighted by edge length.
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(mesh.vertexCount());
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(mesh.vertexCount());
    for (int e = 0; e < mesh.edgeCount(); ++e) {
        const auto [i, j] = mesh.edgeVertices(e);
        const double length = mesh.length(e);
        const double image = (uv.row(i) - uv.row(j)).norm();
        if (!(image > 0.0)) continue;
        const double ratio = std::log(image / length);
        for (int v : {i, j}) {
            sum[v] += length * ratio;
            weight[v] += length;
        }
    }
    report.rawScaleFactors = Eigen::VectorXd::Zero(mesh.vertexCount());
    for (int v = 0; v < mesh.vertexCount(); ++v)
        if (weight[v] > 0.0) report.rawScaleFactors[v] = sum[v] / weight[v];
    double mean = 0.0;
    for (int v = 0; v < mesh.vertexCount(); ++v) mean += vertexArea[v] * report.rawScaleFactors[v];
    mean /= totalArea;
    report.scaleFactors = report.rawScaleFactors.array() - mean;
    return report;
}

double logLogSlope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "a slope fit needs at least two matching samples");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw Error(ErrorCode::InvalidArgument, "log-log fit needs positive samples");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy convergenceStudy(const MeshGenerator& generator, int levels, const FlattenMethod& method) {
    ConvergenceStudy study;
    std::vector<double> h;
    std::vector<double> error;
    for (int level = 0; level < levels; ++level) {
        const std::shared_ptr<const DiskMesh> mesh = generator(level);
        const Flattener flattener(mesh);
        const Flattening flattening = method(flattener);
        const QualityReport report = measureQuality(mesh->surface(), flattening.uv);

        ConvergenceRow row;
        row.level = level;
        row.vertices = mesh->vertexCount();
        row.faces = mesh->faceCount();
        double total = 0.0;
        for (double l : mesh->surface().lengths()) total += l;
        row.meanEdgeLength = total / mesh->surface().edgeCount();
        row.qAvgMinusOne = report.qAvg - 1.0;
        row.qMax = report.qMax;
        study.rows.push_back(row);
        h.push_back(row.meanEdgeLength);
        error.push_back(row.qAvgMinusOne);
    }
    bool positive = levels >= 2;
    for (double e : error) positive = positive && e > 0.0;
    study.slope = positive ? logLogSlope(h, error) : std::numeric_limits<double>::quiet_NaN();
    return study;
}

std::string convergenceCsv(const ConvergenceStudy& study) {
    std::ostringstream out;
    out.precision(17);
    out << "level,vertices,faces,mean_edge_length,q_avg_minus_one,q_max\n";
    for (const ConvergenceRow& row : study.rows) {
        out << row.level << ',' << row.vertices << ',' << row.faces << ',' << row.meanEdgeLength << ','
            << row.qAvgMinusOne << ',' << row.qMax << '\n';
    }
    return out.str();
}

} // namespace bff
