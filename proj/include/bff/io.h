#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "bff/apps.h"
#include "bff/flatten.h"
#include "bff/mesh.h"
#include "bff/metrics.h"

namespace bff {

/// Triangle mesh as read from a Wavefront OBJ file. Texture coordinates are
/// kept when present but never used to build meshes.
struct ObjDocument {
    std::vector<Eigen::Vector3d> positions;
    std::vector<Face> faces;
    std::vector<Eigen::Vector2d> texcoords;
    // Texture coordinate index per face corner; empty unless every face has them.
    std::vector<Face> faceTexcoords;
};

ObjDocument parseObj(std::string_view text);
ObjDocument readObj(const std::filesystem::path& path);

std::string readTextFile(const std::filesystem::path& path);
void writeTextFile(const std::filesystem::path& path, std::string_view contents);

// Uniform translate and scale into [0, 1]^2, preserving aspect ratio.
PlanarMap normalizeToUnitSquare(const PlanarMap& uv);

// OBJ with one `vt` per vertex, normalized to the unit square.
std::string writeObj(std::span<const Eigen::Vector3d> positions, const std::vector<Face>& faces, const PlanarMap& uv);

// Wireframe plus boundary loops as SVG polylines at 100 px per unit.
std::string layoutSvg(const SurfaceMesh& mesh, const PlanarMap& uv);

std::vector<Cone> parseCones(std::string_view json);

TargetCurve parseTargetCurve(std::string_view json);

/// Boundary data file: exactly one of exteriorAngles, edgeDirections,
/// edgeLengths, scaleFactors (arrays in boundary order) or corners
/// ([{vertexIndex, angle}]).
struct BoundaryDataSpec {
    enum class Kind { ExteriorAngles, EdgeDirections, EdgeLengths, ScaleFactors, Corners };
    Kind kind = Kind::ScaleFactors;
    Eigen::VectorXd values;
    std::vector<Corner> corners;
};

BoundaryDataSpec parseBoundaryData(std::string_view json);

nlohmann::json toJson(const Eigen::VectorXd& values);
nlohmann::json toJson(const PlanarMap& uv);

/// Quality and provenance of a flattening of `mesh`.
nlohmann::json flatteningReport(const DiskMesh& mesh, const Flattening& flattening, const QualityReport& quality);

} // namespace bff
