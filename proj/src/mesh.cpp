#include "bff/mesh.h"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>

namespace bff {

namespace {

constexpr double kTriangleSlack = 1e-12;

class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) std::swap(a, b);
        parent_[a] = b;
    }

private:
    std::vector<int> parent_;
};

std::uint64_t edgeKey(int u, int v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

int cornerOf(const Face& face, int v) {
    for (int c = 0; c < 3; ++c)
        if (face[c] == v) return c;
    return -1;
}

void checkTriangle(int f, const FaceLengths& l) {
    const double perimeter = l[0] + l[1] + l[2];
    for (int c = 0; c < 3; ++c) {
        const double a = l[c];
        const double b = l[(c + 1) % 3];
        const double d = l[(c + 2) % 3];
        if (!std::isfinite(a) || a <= 0.0 || b + d - a <= kTriangleSlack * perimeter) {
            throw Error(ErrorCode::DegenerateFace,
                        "face " + std::to_string(f) + " violates the triangle inequality");
        }
    }
}

} // namespace

SurfaceMesh SurfaceMesh::fromPositions(std::span<const Eigen::Vector3d> positions,
                                       std::vector<Face> faces) {
    SurfaceMesh mesh;
    mesh.vertexCount_ = static_cast<int>(positions.size());
    mesh.faces_ = std::move(faces);
    mesh.buildConnectivity();

    mesh.lengths_.resize(mesh.edges_.size());
    for (std::size_t e = 0; e < mesh.edges_.size(); ++e) {
        const auto [u, v] = mesh.edges_[e];
        mesh.lengths_[e] = (positions[u] - positions[v]).norm();
    }
    for (int f = 0; f < mesh.faceCount(); ++f) checkTriangle(f, mesh.faceLengths(f));

    mesh.checkManifold();
    return mesh;
}

SurfaceMesh SurfaceMesh::fromFaceLengths(int vertexCount, std::vector<Face> faces,
                                         std::span<const FaceLengths> lengths) {
    if (lengths.size() != faces.size())
        throw Error(ErrorCode::DimensionMismatch, "need one length triple per face");

    SurfaceMesh mesh;
    mesh.vertexCount_ = vertexCount;
    mesh.faces_ = std::move(faces);
    mesh.buildConnectivity();

    mesh.lengths_.assign(mesh.edges_.size(), -1.0);
    for (int f = 0; f < mesh.faceCount(); ++f) {
        for (int c = 0; c < 3; ++c) {
            const int e = mesh.faceEdges_[f][c];
            const double l = lengths[f][c];
            double& stored = mesh.lengths_[e];
            if (stored < 0.0) {
                stored = l;
            } else if (std::abs(stored - l) > 1e-12 * std::max(stored, l)) {
                throw Error(ErrorCode::InvalidArgument,
                            "faces disagree on the length of edge " + std::to_string(e));
            }
        }
    }
    for (int f = 0; f < mesh.faceCount(); ++f) checkTriangle(f, mesh.faceLengths(f));

    mesh.checkManifold();
    return mesh;
}

void SurfaceMesh::buildConnectivity() {
    if (faces_.empty()) throw Error(ErrorCode::InvalidArgument, "mesh has no faces");

    std::unordered_map<std::uint64_t, int> edgeIndex;
    edgeIndex.reserve(faces_.size() * 2);
    faceEdges_.resize(faces_.size());

    for (int f = 0; f < faceCount(); ++f) {
        const Face& face = faces_[f];
        for (int c = 0; c < 3; ++c) {
            if (face[c] < 0 || face[c] >= vertexCount_)
                throw Error(ErrorCode::InvalidArgument,
                            "face " + std::to_string(f) + " references a missing vertex");
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
            throw Error(ErrorCode::DegenerateFace,
                        "face " + std::to_string(f) + " repeats a vertex");

        for (int c = 0; c < 3; ++c) {
            const int a = face[(c + 1) % 3];
            const int b = face[(c + 2) % 3];
            auto [it, inserted] = edgeIndex.try_emplace(edgeKey(a, b), edgeCount());
            const int e = it->second;
            if (inserted) {
                edges_.push_back({std::min(a, b), std::max(a, b)});
                edgeFaces_.push_back({f, -1});
            } else {
                auto& adjacent = edgeFaces_[e];
                if (adjacent[1] >= 0)
                    throw Error(ErrorCode::NonManifold,
                                "edge {" + std::to_string(a) + ", " + std::to_string(b) +
                                    "} has more than two faces");
                const Face& other = faces_[adjacent[0]];
                const int ca = cornerOf(other, a);
                if (other[(ca + 1) % 3] == b)
                    throw Error(ErrorCode::NonManifold,
                                "faces " + std::to_string(adjacent[0]) + " and " +
                                    std::to_string(f) + " have inconsistent orientation");
                adjacent[1] = f;
            }
            faceEdges_[f][c] = e;
        }
    }

    vertexEdges_.assign(vertexCount_, {});
    for (int e = 0; e < edgeCount(); ++e) {
        const auto [u, v] = edges_[e];
        vertexEdges_[u].emplace_back(v, e);
        vertexEdges_[v].emplace_back(u, e);
    }
    for (auto& adjacency : vertexEdges_) std::sort(adjacency.begin(), adjacency.end());

    // Boundary half-edges keep the orientation of their face, so loops run
    // with the surface on their left.
    std::vector<int> next(vertexCount_, -1);
    onBoundary_.assign(vertexCount_, 0);
    for (int e = 0; e < edgeCount(); ++e) {
        if (!isBoundaryEdge(e)) continue;
        const int f = edgeFaces_[e][0];
        const Face& face = faces_[f];
        int a = -1;
        int b = -1;
        for (int c = 0; c < 3; ++c) {
            if (faceEdges_[f][c] == e) {
                a = face[(c + 1) % 3];
                b = face[(c + 2) % 3];
            }
        }
        if (next[a] >= 0)
            throw Error(ErrorCode::NonManifold,
                        "vertex " + std::to_string(a) + " touches the boundary more than once");
        next[a] = b;
        onBoundary_[a] = 1;
        onBoundary_[b] = 1;
    }

    std::vector<char> visited(vertexCount_, 0);
    for (int start = 0; start < vertexCount_; ++start) {
        if (next[start] < 0 || visited[start]) continue;
        std::vector<int> loop;
        int v = start;
        while (!visited[v]) {
            visited[v] = 1;
            loop.push_back(v);
            v = next[v];
            if (v < 0) throw Error(ErrorCode::NonManifold, "boundary is not a closed loop");
        }
        if (v != start) throw Error(ErrorCode::NonManifold, "boundary loops intersect");
        boundaryLoops_.push_back(std::move(loop));
    }
}

void SurfaceMesh::checkManifold() const {
    // Corners around a vertex joined through interior edges must form a
    // single fan; faces joined through edges must form a single component.
    DisjointSets corners(3 * faceCount());
    DisjointSets components(faceCount());
    for (int e = 0; e < edgeCount(); ++e) {
        const auto [f0, f1] = edgeFaces_[e];
        if (f1 < 0) continue;
        components.unite(f0, f1);
        for (int v : edges_[e]) {
            corners.unite(3 * f0 + cornerOf(faces_[f0], v), 3 * f1 + cornerOf(faces_[f1], v));
        }
    }

    std::vector<int> fanRoot(vertexCount_, -1);
    for (int f = 0; f < faceCount(); ++f) {
        for (int c = 0; c < 3; ++c) {
            const int v = faces_[f][c];
            const int root = corners.find(3 * f + c);
            if (fanRoot[v] < 0) {
                fanRoot[v] = root;
            } else if (fanRoot[v] != root) {
                throw Error(ErrorCode::NonManifold,
                            "vertex " + std::to_string(v) + " is not manifold");
            }
        }
    }
    for (int v = 0; v < vertexCount_; ++v) {
        if (fanRoot[v] < 0)
            throw Error(ErrorCode::NonManifold,
                        "vertex " + std::to_string(v) + " is not used by any face");
    }

    const int root = components.find(0);
    for (int f = 1; f < faceCount(); ++f) {
        if (components.find(f) != root)
            throw Error(ErrorCode::NotADisk, "mesh is not connected");
    }
}

FaceLengths SurfaceMesh::faceLengths(int f) const {
    return {lengths_[faceEdges_[f][0]], lengths_[faceEdges_[f][1]], lengths_[faceEdges_[f][2]]};
}

int SurfaceMesh::findEdge(int u, int v) const {
    const auto& adjacency = vertexEdges_[u];
    auto it = std::lower_bound(adjacency.begin(), adjacency.end(), std::make_pair(v, -1));
    return it != adjacency.end() && it->first == v ? it->second : -1;
}

DiskMesh::DiskMesh(SurfaceMesh surface) : surface_(std::move(surface)) {
    const auto& loops = surface_.boundaryLoops();
    if (loops.size() != 1) {
        throw Error(ErrorCode::NotADisk, "expected one boundary loop, found " +
                                             std::to_string(loops.size()));
    }
    if (surface_.eulerCharacteristic() != 1) {
        throw Error(ErrorCode::NotADisk, "Euler characteristic is " +
                                             std::to_string(surface_.eulerCharacteristic()));
    }

    boundary_ = loops.front();
    boundaryIndex_.assign(surface_.vertexCount(), -1);
    for (int i = 0; i < boundaryCount(); ++i) boundaryIndex_[boundary_[i]] = i;
    for (int v = 0; v < surface_.vertexCount(); ++v)
        if (boundaryIndex_[v] < 0) interior_.push_back(v);

    boundaryEdges_.resize(boundary_.size());
    for (int i = 0; i < boundaryCount(); ++i)
        boundaryEdges_[i] = surface_.findEdge(boundary_[i], boundary_[nextBoundary(i)]);
}

Eigen::VectorXd DiskMesh::boundaryEdgeLengths() const {
    Eigen::VectorXd lengths(boundaryCount());
    for (int i = 0; i < boundaryCount(); ++i) lengths[i] = boundaryEdgeLength(i);
    return lengths;
}

double DiskMesh::dualLength(int i) const {
    return 0.5 * (boundaryEdgeLength(prevBoundary(i)) + boundaryEdgeLength(i));
}

Eigen::VectorXd DiskMesh::dualLengths() const {
    Eigen::VectorXd lengths(boundaryCount());
    for (int i = 0; i < boundaryCount(); ++i) lengths[i] = dualLength(i);
    return lengths;
}

CornerAngles interiorAngles(const SurfaceMesh& mesh) {
    CornerAngles angles(mesh.faceCount());
    for (int f = 0; f < mesh.faceCount(); ++f) {
        const FaceLengths l = mesh.faceLengths(f);
        const double s = 0.5 * (l[0] + l[1] + l[2]);
        for (int c = 0; c < 3; ++c) {
            // Half-angle form of the law of cosines; well conditioned for
            // both very small and nearly straight angles.
            const double a = l[c];
            const double b = l[(c + 1) % 3];
            const double d = l[(c + 2) % 3];
            const double ratio = ((s - b) * (s - d)) / (s * (s - a));
            if (!(ratio > 0.0) || !std::isfinite(ratio))
                throw Error(ErrorCode::DegenerateFace,
                            "face " + std::to_string(f) + " has a degenerate corner");
            angles[f][c] = 2.0 * std::atan(std::sqrt(ratio));
        }
    }
    return angles;
}

DiscreteCurvatures discreteCurvatures(const SurfaceMesh& mesh, const CornerAngles& angles) {
    if (static_cast<int>(angles.size()) != mesh.faceCount())
        throw Error(ErrorCode::DimensionMismatch, "angle table does not match the mesh");

    Eigen::VectorXd angleSum = Eigen::VectorXd::Zero(mesh.vertexCount());
    for (int f = 0; f < mesh.faceCount(); ++f)
        for (int c = 0; c < 3; ++c) angleSum[mesh.faces()[f][c]] += angles[f][c];

    DiscreteCurvatures k;
    k.angleDefect = Eigen::VectorXd::Zero(mesh.vertexCount());
    k.exteriorAngle = Eigen::VectorXd::Zero(mesh.vertexCount());
    for (int v = 0; v < mesh.vertexCount(); ++v) {
        if (mesh.onBoundary(v)) {
            k.exteriorAngle[v] = std::numbers::pi - angleSum[v];
        } else {
            k.angleDefect[v] = 2.0 * std::numbers::pi - angleSum[v];
        }
    }
    return k;
}

Eigen::VectorXd restrictToBoundary(const DiskMesh& mesh, const Eigen::VectorXd& perVertex) {
    if (perVertex.size() != mesh.vertexCount())
        throw Error(ErrorCode::DimensionMismatch, "expected one value per vertex");
    Eigen::VectorXd values(mesh.boundaryCount());
    for (int i = 0; i < mesh.boundaryCount(); ++i) values[i] = perVertex[mesh.boundary()[i]];
    return values;
}

CutMesh cutToDisk(const SurfaceMesh& surface, std::span<const int> cones) {
    const int nV = surface.vertexCount();
    std::vector<char> isCone(nV, 0);
    for (int c : cones) {
        if (c < 0 || c >= nV)
            throw Error(ErrorCode::ConeNotReachable, "cone " + std::to_string(c) + " is not a vertex");
        if (surface.onBoundary(c))
            throw Error(ErrorCode::ConeNotReachable,
                        "cone " + std::to_string(c) + " lies on the boundary");
        isCone[c] = 1;
    }
    std::vector<int> coneList;
    for (int v = 0; v < nV; ++v)
        if (isCone[v]) coneList.push_back(v);

    const bool alreadyDisk = surface.boundaryLoops().size() == 1 && surface.eulerCharacteristic() == 1;
    if (alreadyDisk && coneList.empty()) {
        CutMesh result{std::make_shared<const DiskMesh>(surface), {}};
        result.seams.vertexOrigin.resize(nV);
        std::iota(result.seams.vertexOrigin.begin(), result.seams.vertexOrigin.end(), 0);
        result.seams.edgePartner.assign(result.mesh->boundaryCount(), -1);
        return result;
    }

    // Shortest-path forest rooted at the boundary, or at the first cone when
    // the surface is closed.
    std::vector<double> distance(nV, std::numeric_limits<double>::infinity());
    std::vector<int> parentEdge(nV, -1);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    if (!surface.isClosed()) {
        for (int v = 0; v < nV; ++v) {
            if (surface.onBoundary(v)) {
                distance[v] = 0.0;
                frontier.emplace(0.0, v);
            }
        }
    } else {
        const int root = coneList.empty() ? 0 : coneList.front();
        distance[root] = 0.0;
        frontier.emplace(0.0, root);
    }
    std::vector<char> settled(nV, 0);
    while (!frontier.empty()) {
        const auto [d, v] = frontier.top();
        frontier.pop();
        if (settled[v]) continue;
        settled[v] = 1;
        for (const auto& [w, e] : surface.vertexNeighbors(v)) {
            if (settled[w]) continue;
            const double candidate = d + surface.length(e);
            if (candidate < distance[w]) {
                distance[w] = candidate;
                parentEdge[w] = e;
                frontier.emplace(candidate, w);
            }
        }
    }

    std::vector<char> inTree(surface.edgeCount(), 0);
    for (int v = 0; v < nV; ++v)
        if (parentEdge[v] >= 0) inTree[parentEdge[v]] = 1;

    // Dual spanning tree over faces that never crosses the primal forest.
    std::vector<char> crossed(surface.edgeCount(), 0);
    std::vector<char> reached(surface.faceCount(), 0);
    std::queue<int> pending;
    reached[0] = 1;
    pending.push(0);
    while (!pending.empty()) {
        const int f = pending.front();
        pending.pop();
        for (int c = 0; c < 3; ++c) {
            const int e = surface.faceEdge(f, c);
            if (surface.isBoundaryEdge(e) || inTree[e]) continue;
            const auto [f0, f1] = surface.edgeFaces(e);
            const int g = f0 == f ? f1 : f0;
            if (reached[g]) continue;
            reached[g] = 1;
            crossed[e] = 1;
            pending.push(g);
        }
    }

    // Everything the dual tree does not cross is a candidate cut edge; trim
    // dangling branches that end away from cones and the boundary.
    std::vector<char> cut(surface.edgeCount(), 0);
    std::vector<int> degree(nV, 0);
    for (int e = 0; e < surface.edgeCount(); ++e) {
        if (surface.isBoundaryEdge(e) || !crossed[e]) {
            if (!surface.isBoundaryEdge(e)) cut[e] = 1;
            for (int v : surface.edgeVertices(e)) ++degree[v];
        }
    }
    std::queue<int> leaves;
    auto prunable = [&](int v) { return degree[v] == 1 && !isCone[v] && !surface.onBoundary(v); };
    for (int v = 0; v < nV; ++v)
        if (prunable(v)) leaves.push(v);
    while (!leaves.empty()) {
        const int v = leaves.front();
        leaves.pop();
        if (!prunable(v)) continue;
        for (const auto& [w, e] : surface.vertexNeighbors(v)) {
            if (!cut[e]) continue;
            cut[e] = 0;
            --degree[v];
            --degree[w];
            if (prunable(w)) leaves.push(w);
            break;
        }
    }

    std::vector<int> cutEdges;
    for (int e = 0; e < surface.edgeCount(); ++e)
        if (cut[e]) cutEdges.push_back(e);
    if (cutEdges.empty()) {
        throw Error(ErrorCode::AlreadyOpenWithCuts,
                    "no cut opens this surface into a disk; a closed surface of genus zero "
                    "needs at least two cones");
    }

    // Split vertices into one copy per fan of corners not separated by the cut.
    const auto& faces = surface.faces();
    DisjointSets corners(3 * surface.faceCount());
    for (int e = 0; e < surface.edgeCount(); ++e) {
        const auto [f0, f1] = surface.edgeFaces(e);
        if (f1 < 0 || cut[e]) continue;
        for (int v : surface.edgeVertices(e))
            corners.unite(3 * f0 + cornerOf(faces[f0], v), 3 * f1 + cornerOf(faces[f1], v));
    }

    std::vector<int> copyOf(3 * surface.faceCount(), -1);
    std::vector<std::pair<int, int>> order;
    order.reserve(copyOf.size());
    for (int corner = 0; corner < 3 * surface.faceCount(); ++corner)
        if (corners.find(corner) == corner) order.emplace_back(faces[corner / 3][corner % 3], corner);
    std::sort(order.begin(), order.end());

    SeamMap seams;
    std::unordered_map<int, int> rootToVertex;
    for (const auto& [v, root] : order) {
        rootToVertex[root] = static_cast<int>(seams.vertexOrigin.size());
        seams.vertexOrigin.push_back(v);
    }
    std::vector<Face> cutFaces(faces.size());
    std::vector<FaceLengths> cutLengths(faces.size());
    for (int f = 0; f < surface.faceCount(); ++f) {
        for (int c = 0; c < 3; ++c) cutFaces[f][c] = rootToVertex.at(corners.find(3 * f + c));
        cutLengths[f] = surface.faceLengths(f);
    }

    auto disk = std::make_shared<const DiskMesh>(SurfaceMesh::fromFaceLengths(
        static_cast<int>(seams.vertexOrigin.size()), std::move(cutFaces), cutLengths));

    // A cut edge becomes two boundary edges, each the outgoing boundary edge
    // of its start vertex in the face that owns it.
    seams.edgePartner.assign(disk->boundaryCount(), -1);
    for (int e : cutEdges) {
        const auto [f0, f1] = surface.edgeFaces(e);
        int start[2] = {-1, -1};
        for (int side = 0; side < 2; ++side) {
            const int f = side == 0 ? f0 : f1;
            for (int c = 0; c < 3; ++c) {
                if (surface.faceEdge(f, c) == e) start[side] = disk->faces()[f][(c + 1) % 3];
            }
        }
        const int i0 = disk->boundaryIndex(start[0]);
        const int i1 = disk->boundaryIndex(start[1]);
        seams.edgePartner[i0] = i1;
        seams.edgePartner[i1] = i0;
    }
    seams.cutEdges = std::move(cutEdges);
    return CutMesh{std::move(disk), std::move(seams)};
}

} // namespace bff
