// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "bff/apps.h"
#include "bff/bvp.h"
#include "bff/flatten.h"
#include "bff/metrics.h"
#include "test_support.h"

using namespace bff;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kTwoPi = oracle::kTwoPi;
constexpr double kPi = kTwoPi / 2;

double seconds(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
}

std::string format(const char* fmt, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, fmt, args...);
    return buffer;
}

double cornerAngleSum(const SurfaceMesh& mesh, const PlanarMap& uv, int v) {
    double sum = 0.0;
    for (const Face& f : mesh.faces()) {
        for (int c = 0; c < 3; ++c) {
            if (f[c] != v) continue;
            const Eigen::Vector2d a = uv.row(f[c]), b = uv.row(f[(c + 1) % 3]), d = uv.row(f[(c + 2) % 3]);
            const Eigen::Vector2d p = b - a, q = d - a;
            sum += std::atan2(p.x() * q.y() - p.y() * q.x(), p.dot(q));
        }
    }
    return sum;
}

Eigen::MatrixX2d planar(const shapes::MeshData& data) {
    Eigen::MatrixX2d xy(data.positions.size(), 2);
    for (std::size_t v = 0; v < data.positions.size(); ++v) xy.row(v) << data.positions[v].x(), data.positions[v].y();
    return xy;
}

// Ring disk with interior vertices moved randomly in the plane.
shapes::MeshData jitteredFlatDisk(int rings, std::uint64_t seed) {
    shapes::MeshData data = shapes::ringDisk(rings);
    const auto disk = data.disk();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int v : disk->interior()) {
        data.positions[v].x() += 0.25 / rings * unit(rng);
        data.positions[v].y() += 0.25 / rings * unit(rng);
    }
    return data;
}

Outcome angleSums() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> ringCount(4, 40);
    double worst = 0.0;
    int smallest = 1 << 30, largest = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto data = shapes::randomDisk(ringCount(rng), 5000 + trial);
        const Flattener flattener(data.disk());
        smallest = std::min(smallest, flattener.mesh().vertexCount());
        largest = std::max(largest, flattener.mesh().vertexCount());
        const Eigen::VectorXd u = oracle::uniform(rng, flattener.mesh().boundaryCount(), -1.0, 1.0);
        const BoundaryConditions bc = flattener.complete(BoundaryConditions::withScaleFactors(u));
        worst = std::max(worst, std::abs(bc.exteriorAngles.sum() - kTwoPi));
    }
    const double time = seconds(start);
    return {worst <= 1e-9 && time < 60.0 && smallest >= 50 && largest <= 5000,
            format("100 meshes, %d..%d vertices, max |sum - 2pi| = %.2e, %.1f s", smallest, largest, worst, time)};
}

Outcome coneSums() {
    std::mt19937_64 rng(1002);
    const SurfaceMesh sphere = shapes::icosphere(3).surface();
    const SurfaceMesh torus = shapes::torus(40, 16, 1.0, 0.35).surface();
    double worstSum = 0.0;
    long seamPairs = 0, seamMismatches = 0;
    double layoutSeamGap = 0.0;
    for (int config = 0; config < 20; ++config) {
        // Sphere configurations sum to 4 pi; torus configurations to zero.
        const bool onTorus = config % 4 == 3;
        const SurfaceMesh& surface = onTorus ? torus : sphere;
        std::uniform_int_distribution<int> pick(0, surface.vertexCount() - 1);
        const int count = onTorus ? 2 * (1 + config % 3) : 3 + config % 6;
        std::vector<int> vertices;
        while (static_cast<int>(vertices.size()) < count) {
            const int v = pick(rng);
            if (std::find(vertices.begin(), vertices.end(), v) == vertices.end()) vertices.push_back(v);
        }
        std::vector<Cone> cones;
        if (onTorus) {
            for (int i = 0; i < count; i += 2) {
                const double a = std::uniform_real_distribution<double>(0.3, 1.2)(rng);
                cones.push_back({vertices[i], a});
                cones.push_back({vertices[i + 1], -a});
            }
        } else {
            const Eigen::VectorXd w = oracle::uniform(rng, count, 0.7, 1.3);
            for (int i = 0; i < count; ++i) cones.push_back({vertices[i], 2 * kTwoPi * w[i] / w.sum()});
        }
        const ConeFlattening r = flattenCones(surface, cones);

        const SurfaceMesh& cut = r.cutMesh->surface();
        for (std::size_t i = 0; i < r.cones.size(); ++i) {
            double sum = 0.0;
            for (int v = 0; v < cut.vertexCount(); ++v)
                if (r.seams.vertexOrigin[v] == r.cones[i]) sum += cornerAngleSum(cut, r.flattening.uv, v);
            worstSum = std::max(worstSum, std::abs(sum - (kTwoPi - r.coneAngles[i])));
        }
        const DiskMesh& disk = *r.cutMesh;
        const auto& partner = r.seams.edgePartner;
        for (std::size_t i = 0; i < partner.size(); ++i) {
            if (partner[i] < 0) continue;
            ++seamPairs;
            if (r.flattening.curve.adjustedLengths[i] != r.flattening.curve.adjustedLengths[partner[i]]) ++seamMismatches;
            const auto edgeLength = [&](int b) {
                return (r.flattening.uv.row(disk.boundary()[b]) - r.flattening.uv.row(disk.boundary()[disk.nextBoundary(b)])).norm();
            };
            layoutSeamGap = std::max(layoutSeamGap, std::abs(edgeLength(static_cast<int>(i)) - edgeLength(partner[i])));
        }
    }
    return {worstSum <= 1e-7 && seamMismatches == 0 && seamPairs > 0,
            format("20 configurations, max cone sum error %.2e, %ld seam edges, %ld length mismatches, "
                   "measured seam gap %.1e",
                   worstSum, seamPairs, seamMismatches, layoutSeamGap)};
}

Outcome denseOracle() {
    std::mt19937_64 rng(1003);
    std::vector<shapes::MeshData> meshes;
    for (auto& d : oracle::smallDisks())
        if (d.positions.size() <= 50) meshes.push_back(std::move(d));
    for (int seed = 0; seed < 10; ++seed) meshes.push_back(shapes::randomDisk(2 + seed % 2, 700 + seed));
    double worst = 0.0;
    for (const auto& data : meshes) {
        const auto disk = data.disk();
        const CotanMatrix m = buildLaplace(*disk, interiorAngles(disk->surface()));
        const auto factor = FactoredLaplace::factor(m);
        const oracle::Dense dense = oracle::cotanLaplacian(data);
        const auto in = m.interior();
        const auto bd = m.boundary();
        const long n = m.size(), nB = static_cast<long>(bd.size());

        const Eigen::VectorXd phi = oracle::uniform(rng, n, -0.3, 0.3);
        const Eigen::VectorXd g = oracle::uniform(rng, nB, -1.0, 1.0);
        const Eigen::VectorXd h = dirichletToNeumann(*factor, m, phi, g);
        const auto hRef = oracle::dirichletToNeumann(dense, in, bd, oracle::toVec(phi), oracle::toVec(g));
        worst = std::max(worst, (h - oracle::toEigen(hRef)).cwiseAbs().maxCoeff());

        Eigen::VectorXd flux = oracle::uniform(rng, nB, -0.3, 0.3);
        flux.array() += (phi.sum() - flux.sum()) / nB;
        const Eigen::VectorXd back = neumannToDirichlet(*factor, m, phi, flux);
        oracle::Vec rhs = oracle::toVec(phi);
        for (long i = 0; i < nB; ++i) rhs[bd[i]] -= flux[i];
        const Eigen::VectorXd backRef = oracle::toEigen(oracle::gather(oracle::solveNeumann(dense, rhs), bd));
        worst = std::max(worst, oracle::alignedMaxDiff(back, backRef));

        const Eigen::VectorXd a = harmonicExtend(*factor, m, g);
        const auto aRef = oracle::harmonicExtend(dense, in, bd, oracle::toVec(g));
        worst = std::max(worst, (a - oracle::toEigen(aRef)).cwiseAbs().maxCoeff());

        const Eigen::VectorXd b = conjugateExtend(*factor, m, a);
        oracle::Vec hilbert(n, 0.0);
        for (long j = 0; j < nB; ++j) hilbert[bd[j]] = -0.5 * (a[bd[(j + 1) % nB]] - a[bd[(j + nB - 1) % nB]]);
        worst = std::max(worst, oracle::alignedMaxDiff(b, oracle::toEigen(oracle::solveNeumann(dense, hilbert))));
    }
    return {worst <= 1e-9, format("%zu meshes with <= 50 vertices, max deviation %.2e", meshes.size(), worst)};
}

Outcome identity() {
    double worst = 0.0;
    const std::vector<shapes::MeshData> meshes = {shapes::squareGrid(12), shapes::ringDisk(8),
                                                  shapes::rectangleGrid(15, 5, 3.0, 1.0), jitteredFlatDisk(10, 3)};
    for (const auto& data : meshes) {
        const Flattener flattener(data.disk());
        for (ExtensionKind kind : {ExtensionKind::Holomorphic, ExtensionKind::Harmonic}) {
            const Flattening f = flattener.flatten(
                BoundaryConditions::withScaleFactors(Eigen::VectorXd::Zero(flattener.mesh().boundaryCount()), kind));
            worst = std::max(worst, oracle::rigidResidual(f.uv, planar(data)));
        }
    }
    return {worst <= 1e-8, format("4 flat meshes x 2 extensions, max deviation after rigid alignment %.2e", worst)};
}

// Hemisphere levels from about 200 to 50k faces.
const int kCapRings[4] = {6, 14, 36, 92};

Outcome convergenceRate() {
    const auto start = Clock::now();
    const ConvergenceStudy study = convergenceStudy([](int level) { return shapes::hemisphere(kCapRings[level]).disk(); }, 4,
                                                    [](const Flattener& f) { return flattenAuto(f, ExtensionKind::Holomorphic); });
    const double time = seconds(start);
    std::string rows;
    for (const ConvergenceRow& r : study.rows) rows += format(" [%d faces, Q-1 %.2e]", r.faces, r.qAvgMinusOne);
    return {study.slope >= 0.7 && study.slope <= 1.3 && time < 120.0,
            format("slope %.3f, %.1f s;", study.slope, time) + rows};
}

Outcome closureQuality() {
    const Flattener flattener(shapes::hemisphere(kCapRings[3]).disk());
    const Flattening f = flattenAuto(flattener, ExtensionKind::Holomorphic);
    const Eigen::VectorXd ratio = f.curve.adjustedLengths.cwiseQuotient(f.curve.targetLengths);
    std::vector<double> sorted(ratio.data(), ratio.data() + ratio.size());
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double lo = ratio.minCoeff(), hi = ratio.maxCoeff();
    return {lo >= 0.99 && hi <= 1.01 && median >= 0.999 && median <= 1.001,
            format("%ld boundary edges, ratio in [%.9f, %.9f], median %.9f", ratio.size(), lo, hi, median)};
}

Outcome uniformization() {
    std::string detail;
    bool pass = true;
    const std::vector<std::pair<const char*, shapes::MeshData>> meshes = {
        {"hemisphere", shapes::hemisphere(24)}, {"jittered hemisphere", oracle::jitteredHemisphere(24, 7)}};
    for (const auto& [name, data] : meshes) {
        const Flattener flattener(data.disk());
        const std::size_t before = factorizationCount();
        const Flattening f = uniformizeDisk(flattener);
        const std::size_t extra = factorizationCount() - before;
        const double deviation = f.history.back();
        pass = pass && f.iterations <= 20 && deviation <= 1e-3 && extra == 0;
        detail += format("%s%s: %d iterations, deviation %.2e, %zu factorizations", detail.empty() ? "" : "; ", name,
                         f.iterations, deviation, extra);
    }
    return {pass, detail};
}

Outcome sharpCorners() {
    bool pass = true;
    double worstAngle = 0.0;
    std::vector<double> errors;
    std::string detail;
    for (int rings : {8, 16, 32, 64}) {
        const auto data = shapes::hemisphere(rings);
        const Flattener flattener(data.disk());
        const DiskMesh& mesh = flattener.mesh();
        const int n = mesh.boundaryCount();
        std::vector<Corner> corners;
        for (int q = 0; q < 4; ++q) corners.push_back({mesh.boundary()[q * n / 4], kPi / 2});
        const Flattening f = flattenSharp(flattener, corners, ExtensionKind::Harmonic);
        for (const Corner& c : corners)
            worstAngle = std::max(worstAngle, std::abs(kPi - cornerAngleSum(mesh.surface(), f.uv, c.vertex) - kPi / 2));
        errors.push_back(measureQuality(mesh.surface(), f.uv).qAvg - 1.0);
        detail += format(" [%d rings, Q-1 %.3e]", rings, errors.back());
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double ratio = errors[i] / errors[i - 1];
        pass = pass && ratio >= 0.35 && ratio <= 0.65;
        detail += format(" ratio %.3f", ratio);
    }
    pass = pass && worstAngle <= 1e-9;
    return {pass, format("max corner error %.2e;", worstAngle) + detail};
}

Outcome amortization() {
    const auto data = shapes::hemisphere(200);
    const auto disk = data.disk();
    const CotanMatrix matrix = buildLaplace(*disk, interiorAngles(disk->surface()));
    auto start = Clock::now();
    FactoredLaplace::factor(matrix);
    const double factorTime = seconds(start);

    const std::size_t before = factorizationCount();
    const Flattener flattener(disk);
    const int n = flattener.mesh().boundaryCount();
    std::mt19937_64 rng(1009);
    std::uniform_real_distribution<double> unit(-0.3, 0.3);
    double editTime = 0.0;
    for (int edit = 0; edit < 50; ++edit) {
        // Smooth random boundary scale factors, as from a dragged spline.
        const double a = unit(rng), b = unit(rng), c = unit(rng);
        Eigen::VectorXd u(n);
        for (int i = 0; i < n; ++i) {
            const double t = kTwoPi * i / n;
            u[i] = a * std::cos(t) + b * std::sin(2 * t) + c * std::cos(3 * t);
        }
        start = Clock::now();
        flattener.flatten(BoundaryConditions::withScaleFactors(u));
        editTime += seconds(start);
    }
    const std::size_t factorizations = factorizationCount() - before;
    const double mean = editTime / 50;
    return {factorizations == 1 && mean <= factorTime / 5 && flattener.mesh().vertexCount() >= 100000,
            format("%d vertices, %zu factorization, factor %.3f s, mean edit %.4f s (ratio %.3f)",
                   flattener.mesh().vertexCount(), factorizations, factorTime, mean, mean / factorTime)};
}

Outcome targetCurve() {
    const Flattener flattener(shapes::hemisphere(16).disk());
    const TargetCurve square({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const std::size_t before = factorizationCount();
    const Flattening f = flattenToCurve(flattener, square);
    double turningError = 0.0;
    for (double t : f.turning) turningError = std::max(turningError, std::abs(t - kTwoPi));
    const double displacement = f.history.back() / square.diameter();
    return {f.iterations <= 20 && displacement <= 1e-4 && turningError <= 1e-9 &&
                f.turning.size() == static_cast<std::size_t>(f.iterations),
            format("%d iterations, final displacement %.2e diameters, max turning error %.2e, %zu factorizations",
                   f.iterations, displacement, turningError, factorizationCount() - before)};
}

} // namespace

int main() {
    report(1, "exterior angles sum to 2 pi", angleSums);
    report(2, "cone angle sums and seam lengths", coneSums);
    report(3, "dense oracle equivalence", denseOracle);
    report(4, "identity recovery", identity);
    report(5, "convergence rate", convergenceRate);
    report(6, "curve closure quality", closureQuality);
    report(7, "uniformization", uniformization);
    report(8, "sharp corners", sharpCorners);
    report(9, "amortized edits", amortization);
    report(10, "target curve mapping", targetCurve);
    return failures == 0 ? 0 : 1;
}
