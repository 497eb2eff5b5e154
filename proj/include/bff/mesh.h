#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bff/error.h"

namespace bff {

using Face = std::array<int, 3>;
using EdgeVertices = std::array<int, 2>;

// Per-face lengths; entry c is the length of the edge opposite corner c.
using FaceLengths = std::array<double, 3>;

// Corner angles per face; entry c is the angle at corner c.
using CornerAngles = std::vector<std::array<double, 3>>;

/// Oriented manifold triangle mesh of arbitrary topology, described
/// intrinsically by its connectivity and edge lengths.
///
/// Construction validates orientability, edge and vertex manifoldness,
/// connectivity, and the strict triangle inequality in every face. Vertex
/// positions, if any, are used only to measure lengths and are not retained.
class SurfaceMesh {
public:
    static SurfaceMesh fromPositions(std::span<const Eigen::Vector3d> positions,
                                     std::vector<Face> faces);
    static SurfaceMesh fromFaceLengths(int vertexCount, std::vector<Face> faces,
                                       std::span<const FaceLengths> lengths);

    int vertexCount() const { return vertexCount_; }
    int faceCount() const { return static_cast<int>(faces_.size()); }
    int edgeCount() const { return static_cast<int>(edges_.size()); }
    int eulerCharacteristic() const { return vertexCount() - edgeCount() + faceCount(); }

    const std::vector<Face>& faces() const { return faces_; }
    const EdgeVertices& edgeVertices(int e) const { return edges_[e]; }

    // Second entry is -1 for boundary edges.
    const std::array<int, 2>& edgeFaces(int e) const { return edgeFaces_[e]; }

    // Edge opposite corner c of face f.
    int faceEdge(int f, int c) const { return faceEdges_[f][c]; }

    double length(int e) const { return lengths_[e]; }
    std::span<const double> lengths() const { return lengths_; }
    FaceLengths faceLengths(int f) const;

    bool isBoundaryEdge(int e) const { return edgeFaces_[e][1] < 0; }
    bool onBoundary(int v) const { return onBoundary_[v]; }
    bool isClosed() const { return boundaryLoops_.empty(); }

    // Each loop is ordered so that the mesh lies to its left.
    const std::vector<std::vector<int>>& boundaryLoops() const { return boundaryLoops_; }

    // Edge index of {u, v}, or -1.
    int findEdge(int u, int v) const;

    // (neighbor vertex, edge) pairs around v, sorted by neighbor index.
    std::span<const std::pair<int, int>> vertexNeighbors(int v) const { return vertexEdges_[v]; }

private:
    SurfaceMesh() = default;
    void buildConnectivity();
    void checkManifold() const;

    int vertexCount_ = 0;
    std::vector<Face> faces_;
    std::vector<EdgeVertices> edges_;
    std::vector<std::array<int, 2>> edgeFaces_;
    std::vector<std::array<int, 3>> faceEdges_;
    std::vector<double> lengths_;
    std::vector<char> onBoundary_;
    std::vector<std::vector<int>> boundaryLoops_;
    std::vector<std::vector<std::pair<int, int>>> vertexEdges_;
};

/// A SurfaceMesh with disk topology: connected, Euler characteristic one, and
/// exactly one boundary loop. Immutable after construction.
class DiskMesh {
public:
    explicit DiskMesh(SurfaceMesh surface);

    const SurfaceMesh& surface() const { return surface_; }
    int vertexCount() const { return surface_.vertexCount(); }
    int faceCount() const { return surface_.faceCount(); }
    const std::vector<Face>& faces() const { return surface_.faces(); }

    // Boundary vertices in cyclic order, interior on the left.
    std::span<const int> boundary() const { return boundary_; }
    // Interior vertices in ascending index order.
    std::span<const int> interior() const { return interior_; }
    int boundaryCount() const { return static_cast<int>(boundary_.size()); }
    int interiorCount() const { return static_cast<int>(interior_.size()); }

    // Position of v along the boundary loop, or -1 for interior vertices.
    int boundaryIndex(int v) const { return boundaryIndex_[v]; }
    int nextBoundary(int i) const { return i + 1 == boundaryCount() ? 0 : i + 1; }
    int prevBoundary(int i) const { return i == 0 ? boundaryCount() - 1 : i - 1; }

    // Boundary edge i joins boundary()[i] to boundary()[i + 1].
    int boundaryEdge(int i) const { return boundaryEdges_[i]; }
    double boundaryEdgeLength(int i) const { return surface_.length(boundaryEdges_[i]); }
    Eigen::VectorXd boundaryEdgeLengths() const;

    // Half the sum of the two boundary edges meeting at boundary vertex i.
    double dualLength(int i) const;
    Eigen::VectorXd dualLengths() const;

private:
    SurfaceMesh surface_;
    std::vector<int> boundary_;
    std::vector<int> interior_;
    std::vector<int> boundaryIndex_;
    std::vector<int> boundaryEdges_;
};

/// Angle defect at interior vertices and exterior angle at boundary vertices,
/// both indexed by vertex. Each vector is zero where the other applies.
struct DiscreteCurvatures {
    Eigen::VectorXd angleDefect;
    Eigen::VectorXd exteriorAngle;
};

CornerAngles interiorAngles(const SurfaceMesh& mesh);
DiscreteCurvatures discreteCurvatures(const SurfaceMesh& mesh, const CornerAngles& angles);

// Gathers a per-vertex quantity into boundary loop order.
Eigen::VectorXd restrictToBoundary(const DiskMesh& mesh, const Eigen::VectorXd& perVertex);

/// Bookkeeping produced when a surface is cut open into a disk.
struct SeamMap {
    // Original vertex for every vertex of the cut mesh.
    std::vector<int> vertexOrigin;
    // For each boundary edge of the cut mesh (indexed by loop position), the
    // loop position of its twin across the seam, or -1 on the original boundary.
    std::vector<int> edgePartner;
    // Original edges that were cut.
    std::vector<int> cutEdges;

    bool empty() const { return cutEdges.empty(); }
};

struct CutMesh {
    std::shared_ptr<const DiskMesh> mesh;
    SeamMap seams;
};

/// Cuts a manifold surface into a disk along a cut graph that passes through
/// every listed cone vertex and opens every handle and extra boundary loop.
///
/// Paths follow a shortest-path forest grown from the boundary (or, on closed
/// surfaces, from the lowest-index cone), with ties broken toward lower vertex
/// indices. Cone vertices must be interior.
CutMesh cutToDisk(const SurfaceMesh& surface, std::span<const int> cones);

} // namespace bff
