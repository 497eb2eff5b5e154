#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "bff/mesh.h"

// Procedural test surfaces. All generators are deterministic.
namespace bff::shapes {

struct MeshData {
    std::vector<Eigen::Vector3d> positions;
    std::vector<Face> faces;

    SurfaceMesh surface() const;
    std::shared_ptr<const DiskMesh> disk() const;
};

// Flat unit disk in the xy-plane; ring r carries 6r vertices, so the
// boundary is a regular 6*rings-gon.
MeshData ringDisk(int rings);

// Cap of the unit sphere around +z reaching polar angle `polarAngle`, with
// rings spaced evenly in polar angle and ring sizes proportional to their
// circumference.
MeshData sphericalCap(int rings, double polarAngle);
MeshData hemisphere(int rings);

// [0, width] x [0, height] split into cellsX x cellsY squares, each cut along
// its rising diagonal.
MeshData rectangleGrid(int cellsX, int cellsY, double width = 1.0, double height = 1.0);
MeshData squareGrid(int cells);

// Ring disk with jittered interior vertices lifted onto a random smooth
// height field. Roughly 3 * rings^2 vertices.
MeshData randomDisk(int rings, std::uint64_t seed);

// Subdivided icosahedron projected to the unit sphere.
MeshData icosphere(int subdivisions);

MeshData torus(int majorSegments, int minorSegments, double majorRadius = 1.0, double minorRadius = 0.4);

} // namespace bff::shapes
