#include "bff/shapes.h"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <utility>

namespace bff::shapes {

namespace {

constexpr double kPi = std::numbers::pi;

// Triangulates concentric rings around a center vertex. counts[r] is the
// number of vertices on ring r + 1; `place(r, t)` maps ring r + 1 and a
// turning fraction t in [0, 1) to a position.
template <class Place>
MeshData ringMesh(const std::vector<int>& counts, Place place) {
    MeshData mesh;
    mesh.positions.push_back(place(0, 0.0));
    std::vector<int> start;
    for (std::size_t r = 0; r < counts.size(); ++r) {
        start.push_back(static_cast<int>(mesh.positions.size()));
        for (int k = 0; k < counts[r]; ++k)
            mesh.positions.push_back(place(static_cast<int>(r) + 1, static_cast<double>(k) / counts[r]));
    }

    const int first = counts[0];
    for (int k = 0; k < first; ++k) mesh.faces.push_back({0, start[0] + k, start[0] + (k + 1) % first});

    for (std::size_t r = 1; r < counts.size(); ++r) {
        const int na = counts[r - 1];
        const int nb = counts[r];
        const int a0 = start[r - 1];
        const int b0 = start[r];
        int i = 0;
        int j = 0;
        // Zip the rings together, always advancing the side whose next
        // vertex comes first in angle.
        while (i < na || j < nb) {
            const bool advanceInner =
                j == nb || (i < na && static_cast<double>(i + 1) / na < static_cast<double>(j + 1) / nb);
            if (advanceInner) {
                mesh.faces.push_back({a0 + i % na, b0 + j % nb, a0 + (i + 1) % na});
                ++i;
            } else {
                mesh.faces.push_back({a0 + i % na, b0 + j % nb, b0 + (j + 1) % nb});
                ++j;
            }
        }
    }
    return mesh;
}

} // namespace

SurfaceMesh MeshData::surface() const { return SurfaceMesh::fromPositions(positions, faces); }

std::shared_ptr<const DiskMesh> MeshData::disk() const { return std::make_shared<const DiskMesh>(surface()); }

MeshData ringDisk(int rings) {
    if (rings < 1) throw Error(ErrorCode::InvalidArgument, "a ring disk needs at least one ring");
    std::vector<int> counts;
    for (int r = 1; r <= rings; ++r) counts.push_back(6 * r);
    return ringMesh(counts, [rings](int r, double t) {
        const double radius = static_cast<double>(r) / rings;
        return Eigen::Vector3d(radius * std::cos(2 * kPi * t), radius * std::sin(2 * kPi * t), 0.0);
    });
}

MeshData sphericalCap(int rings, double polarAngle) {
    if (rings < 1) throw Error(ErrorCode::InvalidArgument, "a spherical cap needs at least one ring");
    if (!(polarAngle > 0.0 && polarAngle < kPi))
        throw Error(ErrorCode::InvalidArgument, "cap polar angle must lie in (0, pi)");
    const double step = polarAngle / rings;
    std::vector<int> counts;
    for (int r = 1; r <= rings; ++r)
        counts.push_back(std::max(6, static_cast<int>(std::lround(2 * kPi * std::sin(r * step) / step))));
    return ringMesh(counts, [step](int r, double t) {
        const double theta = r * step;
        return Eigen::Vector3d(std::sin(theta) * std::cos(2 * kPi * t), std::sin(theta) * std::sin(2 * kPi * t),
                               std::cos(theta));
    });
}

MeshData hemisphere(int rings) { return sphericalCap(rings, kPi / 2); }

MeshData rectangleGrid(int cellsX, int cellsY, double width, double height) {
    if (cellsX < 1 || cellsY < 1) throw Error(ErrorCode::InvalidArgument, "grid needs at least one cell");
    MeshData mesh;
    for (int y = 0; y <= cellsY; ++y)
        for (int x = 0; x <= cellsX; ++x)
            mesh.positions.emplace_back(width * x / cellsX, height * y / cellsY, 0.0);
    const auto id = [cellsX](int x, int y) { return y * (cellsX + 1) + x; };
    for (int y = 0; y < cellsY; ++y) {
        for (int x = 0; x < cellsX; ++x) {
            mesh.faces.push_back({id(x, y), id(x + 1, y), id(x + 1, y + 1)});
            mesh.faces.push_back({id(x, y), id(x + 1, y + 1), id(x, y + 1)});
        }
    }
    return mesh;
}

MeshData squareGrid(int cells) { return rectangleGrid(cells, cells); }

MeshData randomDisk(int rings, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // A few Gaussian bumps of random sign and width.
    struct Bump {
        Eigen::Vector2d center;
        double height;
        double width;
    };
    std::vector<Bump> bumps(4);
    for (Bump& b : bumps) {
        b.center = Eigen::Vector2d(0.7 * unit(rng), 0.7 * unit(rng));
        b.height = 0.4 * unit(rng);
        b.width = 0.25 + 0.2 * (unit(rng) + 1.0);
    }

    MeshData mesh = ringDisk(rings);
    const double spacing = 1.0 / rings;
    const int interiorEnd = 1 + 3 * rings * (rings - 1);
    for (int v = 0; v < static_cast<int>(mesh.positions.size()); ++v) {
        Eigen::Vector3d& p = mesh.positions[v];
        if (v < interiorEnd) {
            p.x() += 0.2 * spacing * unit(rng);
            p.y() += 0.2 * spacing * unit(rng);
        }
        for (const Bump& b : bumps) {
            const double d2 = (p.head<2>() - b.center).squaredNorm();
            p.z() += b.height * std::exp(-d2 / (b.width * b.width));
        }
    }
    return mesh;
}

MeshData icosphere(int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    MeshData mesh;
    mesh.positions = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& p : mesh.positions) p.normalize();
    mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                  {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        const auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int id = static_cast<int>(mesh.positions.size());
            mesh.positions.push_back((mesh.positions[a] + mesh.positions[b]).normalized());
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<Face> faces;
        for (const Face& f : mesh.faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            faces.push_back({f[0], ab, ca});
            faces.push_back({f[1], bc, ab});
            faces.push_back({f[2], ca, bc});
            faces.push_back({ab, bc, ca});
        }
        mesh.faces = std::move(faces);
    }
    return mesh;
}

MeshData torus(int majorSegments, int minorSegments, double majorRadius, double minorRadius) {
    if (majorSegments < 3 || minorSegments < 3)
        throw Error(ErrorCode::InvalidArgument, "torus needs at least three segments each way");
    MeshData mesh;
    for (int i = 0; i < majorSegments; ++i) {
        const double u = 2 * kPi * i / majorSegments;
        for (int j = 0; j < minorSegments; ++j) {
            const double v = 2 * kPi * j / minorSegments;
            const double ring = majorRadius + minorRadius * std::cos(v);
            mesh.positions.emplace_back(ring * std::cos(u), ring * std::sin(u), minorRadius * std::sin(v));
        }
    }
    const auto id = [&](int i, int j) { return (i % majorSegments) * minorSegments + j % minorSegments; };
    for (int i = 0; i < majorSegments; ++i) {
        for (int j = 0; j < minorSegments; ++j) {
            mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return mesh;
}

} // namespace bff::shapes
