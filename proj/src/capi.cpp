#include "bff/bff.h"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bff/apps.h"
#include "bff/io.h"
#include "bff/metrics.h"

struct bff_mesh {
    std::vector<Eigen::Vector3d> positions;
    std::vector<bff::Face> faces;
    bff::SurfaceMesh surface;
};

struct bff_session {
    std::shared_ptr<const bff::DiskMesh> disk;
    std::vector<Eigen::Vector3d> positions;
    std::unique_ptr<bff::Flattener> flattener;
    std::size_t factorizations = 0;
    std::atomic<std::size_t> flattenings{0};
};

struct bff_layout {
    std::shared_ptr<const bff::DiskMesh> mesh;
    std::vector<Eigen::Vector3d> positions;
    std::vector<int> origin;
    bff::Flattening flattening;
    nlohmann::json extra = nlohmann::json::object();

    const bff::QualityReport& quality() const {
        std::call_once(qualityOnce, [this] { qualityReport = bff::measureQuality(mesh->surface(), flattening.uv); });
        return *qualityReport;
    }

private:
    mutable std::once_flag qualityOnce;
    mutable std::optional<bff::QualityReport> qualityReport;
};

namespace {

thread_local std::string gLastError;

bff_status fail(bff_status status, std::string message) {
    gLastError = std::move(message);
    return status;
}

template <class Body>
bff_status guarded(Body&& body) {
    try {
        body();
        gLastError.clear();
        return BFF_OK;
    } catch (const bff::Error& e) {
        return fail(static_cast<bff_status>(static_cast<int>(e.code())), e.what());
    } catch (const std::bad_alloc&) {
        return fail(BFF_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(BFF_ERR_INTERNAL, e.what());
    }
}

void require(bool condition, const char* message) {
    if (!condition) throw bff::Error(bff::ErrorCode::InvalidArgument, message);
}

bff::ExtensionKind extensionKind(bff_extension extension) {
    switch (extension) {
    case BFF_EXTENSION_HOLOMORPHIC: return bff::ExtensionKind::Holomorphic;
    case BFF_EXTENSION_HARMONIC: return bff::ExtensionKind::Harmonic;
    }
    throw bff::Error(bff::ErrorCode::InvalidArgument, "unknown extension kind");
}

Eigen::VectorXd boundaryArray(const bff_session* session, const double* values, int count) {
    require(values != nullptr, "values must not be null");
    if (count != session->disk->boundaryCount())
        throw bff::Error(bff::ErrorCode::DimensionMismatch,
                         "expected " + std::to_string(session->disk->boundaryCount()) + " boundary values, got " +
                             std::to_string(count));
    return Eigen::Map<const Eigen::VectorXd>(values, count);
}

bff_mesh* makeMesh(std::vector<Eigen::Vector3d> positions, std::vector<bff::Face> faces) {
    bff::SurfaceMesh surface = bff::SurfaceMesh::fromPositions(positions, faces);
    return new bff_mesh{std::move(positions), std::move(faces), std::move(surface)};
}

bff_layout* sessionLayout(bff_session* session, bff::Flattening flattening) {
    auto* layout = new bff_layout;
    layout->mesh = session->disk;
    layout->positions = session->positions;
    layout->origin.resize(session->positions.size());
    std::iota(layout->origin.begin(), layout->origin.end(), 0);
    layout->flattening = std::move(flattening);
    ++session->flattenings;
    return layout;
}

template <class Compute>
bff_status flattenInto(bff_session* session, bff_layout** out, Compute&& compute) {
    return guarded([&] {
        require(session != nullptr && out != nullptr, "session and output must not be null");
        *out = sessionLayout(session, compute(*session->flattener));
    });
}

} // namespace

extern "C" {

const char* bff_last_error(void) { return gLastError.c_str(); }

const char* bff_status_name(bff_status status) {
    if (status == BFF_OK) return "Ok";
    if (status == BFF_ERR_INTERNAL) return "Internal";
    if (status >= BFF_ERR_INVALID_ARGUMENT && status <= BFF_ERR_NO_CONVERGENCE)
        return bff::errorCodeName(static_cast<bff::ErrorCode>(static_cast<int>(status)));
    return "Unknown";
}

size_t bff_factorization_count(void) { return bff::factorizationCount(); }

void bff_string_free(char* text) { std::free(text); }

bff_status bff_mesh_load_obj_file(const char* path, bff_mesh** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path and output must not be null");
        bff::ObjDocument doc = bff::readObj(path);
        *out = makeMesh(std::move(doc.positions), std::move(doc.faces));
    });
}

bff_status bff_mesh_load_obj_string(const char* text, size_t length, bff_mesh** out) {
    return guarded([&] {
        require(text != nullptr && out != nullptr, "text and output must not be null");
        bff::ObjDocument doc = bff::parseObj(std::string_view(text, length));
        *out = makeMesh(std::move(doc.positions), std::move(doc.faces));
    });
}

bff_status bff_mesh_from_arrays(const double* xyz, int vertex_count, const int* triangles, int face_count,
                                bff_mesh** out) {
    return guarded([&] {
        require(xyz != nullptr && triangles != nullptr && out != nullptr, "arrays and output must not be null");
        require(vertex_count > 0 && face_count > 0, "mesh needs vertices and faces");
        std::vector<Eigen::Vector3d> positions(vertex_count);
        for (int v = 0; v < vertex_count; ++v) positions[v] = Eigen::Vector3d(xyz[3 * v], xyz[3 * v + 1], xyz[3 * v + 2]);
        std::vector<bff::Face> faces(face_count);
        for (int f = 0; f < face_count; ++f) faces[f] = {triangles[3 * f], triangles[3 * f + 1], triangles[3 * f + 2]};
        *out = makeMesh(std::move(positions), std::move(faces));
    });
}

void bff_mesh_free(bff_mesh* mesh) { delete mesh; }

int bff_mesh_vertex_count(const bff_mesh* mesh) { return mesh ? mesh->surface.vertexCount() : 0; }
int bff_mesh_face_count(const bff_mesh* mesh) { return mesh ? mesh->surface.faceCount() : 0; }
int bff_mesh_euler_characteristic(const bff_mesh* mesh) { return mesh ? mesh->surface.eulerCharacteristic() : 0; }
int bff_mesh_boundary_loop_count(const bff_mesh* mesh) {
    return mesh ? static_cast<int>(mesh->surface.boundaryLoops().size()) : 0;
}

bff_status bff_session_create(const bff_mesh* mesh, bff_session** out) {
    return guarded([&] {
        require(mesh != nullptr && out != nullptr, "mesh and output must not be null");
        auto session = std::make_unique<bff_session>();
        session->disk = std::make_shared<const bff::DiskMesh>(mesh->surface);
        session->positions = mesh->positions;
        const std::size_t before = bff::factorizationCount();
        session->flattener = std::make_unique<bff::Flattener>(session->disk);
        session->factorizations = bff::factorizationCount() - before;
        *out = session.release();
    });
}

void bff_session_free(bff_session* session) { delete session; }

int bff_session_boundary_count(const bff_session* session) { return session ? session->disk->boundaryCount() : 0; }

bff_status bff_session_boundary_vertices(const bff_session* session, int* out) {
    return guarded([&] {
        require(session != nullptr && out != nullptr, "session and output must not be null");
        std::copy(session->disk->boundary().begin(), session->disk->boundary().end(), out);
    });
}

bff_status bff_session_boundary_curvature(const bff_session* session, double* out) {
    return guarded([&] {
        require(session != nullptr && out != nullptr, "session and output must not be null");
        Eigen::Map<Eigen::VectorXd>(out, session->disk->boundaryCount()) = session->flattener->boundaryCurvature();
    });
}

bff_status bff_session_dual_lengths(const bff_session* session, double* out) {
    return guarded([&] {
        require(session != nullptr && out != nullptr, "session and output must not be null");
        Eigen::Map<Eigen::VectorXd>(out, session->disk->boundaryCount()) = session->disk->dualLengths();
    });
}

bff_status bff_session_edge_lengths(const bff_session* session, double* out) {
    return guarded([&] {
        require(session != nullptr && out != nullptr, "session and output must not be null");
        Eigen::Map<Eigen::VectorXd>(out, session->disk->boundaryCount()) = session->disk->boundaryEdgeLengths();
    });
}

bff_status bff_session_stats(const bff_session* session, bff_stats* out) {
    return guarded([&] {
        require(session != nullptr && out != nullptr, "session and output must not be null");
        const bff::FactoredLaplace& factor = session->flattener->factor();
        out->factorizations = session->factorizations;
        out->full_solves = factor.fullSolveCount();
        out->interior_solves = factor.interiorSolveCount();
        out->flattenings = session->flattenings.load();
    });
}

bff_status bff_session_flatten_auto(bff_session* session, bff_extension extension, bff_layout** out) {
    return flattenInto(session, out, [&](const bff::Flattener& f) { return bff::flattenAuto(f, extensionKind(extension)); });
}

bff_status bff_session_flatten_scale_factors(bff_session* session, const double* u, int count,
                                             bff_extension extension, bff_layout** out) {
    return flattenInto(session, out, [&](const bff::Flattener& f) {
        return f.flatten(bff::BoundaryConditions::withScaleFactors(boundaryArray(session, u, count),
                                                                   extensionKind(extension)));
    });
}

bff_status bff_session_flatten_angles(bff_session* session, const double* angles, int count,
                                      bff_extension extension, bff_layout** out) {
    return flattenInto(session, out, [&](const bff::Flattener& f) {
        return f.flatten(bff::BoundaryConditions::withExteriorAngles(boundaryArray(session, angles, count),
                                                                     extensionKind(extension)));
    });
}

bff_status bff_session_flatten_lengths(bff_session* session, const double* lengths, int count,
                                       bff_extension extension, bff_layout** out) {
    return flattenInto(session, out, [&](const bff::Flattener& f) {
        const Eigen::VectorXd u = bff::scaleFactorsFromLengths(f.mesh(), boundaryArray(session, lengths, count));
        bff::Flattening result = f.flatten(bff::BoundaryConditions::withScaleFactors(u, extensionKind(extension)));
        result.method = "lengths";
        return result;
    });
}

bff_status bff_session_flatten_directions(bff_session* session, const double* directions, int count,
                                          bff_extension extension, bff_layout** out) {
    return flattenInto(session, out, [&](const bff::Flattener& f) {
        const Eigen::VectorXd angles = bff::anglesFromDirections(boundaryArray(session, directions, count));
        bff::Flattening result = f.flatten(bff::BoundaryConditions::withExteriorAngles(angles, extensionKind(extension)));
        result.method = "directions";
        return result;
    });
}

bff_status bff_session_flatten_sharp(bff_session* session, const int* vertices, const double* angles, int count,
                                     bff_extension extension, bff_layout** out) {
    return flattenInto(session, out, [&](const bff::Flattener& f) {
        require(count >= 0 && (count == 0 || (vertices != nullptr && angles != nullptr)), "bad corner arrays");
        std::vector<bff::Corner> corners;
        for (int c = 0; c < count; ++c) corners.push_back({vertices[c], angles[c]});
        return bff::flattenSharp(f, corners, extensionKind(extension));
    });
}

bff_status bff_session_flatten_disk(bff_session* session, int max_iterations, double tolerance, bff_layout** out) {
    return flattenInto(session, out, [&](const bff::Flattener& f) {
        bff::UniformizeOptions options;
        if (max_iterations > 0) options.maxIterations = max_iterations;
        if (tolerance > 0.0) options.tolerance = tolerance;
        return bff::uniformizeDisk(f, options);
    });
}

bff_status bff_session_flatten_curve(bff_session* session, const double* xy, int point_count, int max_iterations,
                                     double tolerance, bff_extension extension, bff_layout** out) {
    return flattenInto(session, out, [&](const bff::Flattener& f) {
        require(xy != nullptr && point_count >= 3, "target curve needs at least three points");
        std::vector<Eigen::Vector2d> points(point_count);
        for (int i = 0; i < point_count; ++i) points[i] = Eigen::Vector2d(xy[2 * i], xy[2 * i + 1]);
        bff::CurveOptions options;
        if (max_iterations > 0) options.maxIterations = max_iterations;
        if (tolerance > 0.0) options.tolerance = tolerance;
        options.extension = extensionKind(extension);
        return bff::flattenToCurve(f, bff::TargetCurve(std::move(points)), options);
    });
}

bff_status bff_flatten_cones(const bff_mesh* mesh, const int* vertices, const double* angles, int count,
                             bff_layout** out) {
    return guarded([&] {
        require(mesh != nullptr && out != nullptr, "mesh and output must not be null");
        require(count >= 0 && (count == 0 || (vertices != nullptr && angles != nullptr)), "bad cone arrays");
        std::vector<bff::Cone> cones;
        for (int c = 0; c < count; ++c) cones.push_back({vertices[c], angles[c]});
        bff::ConeFlattening result = bff::flattenCones(mesh->surface, cones);

        auto layout = std::make_unique<bff_layout>();
        layout->mesh = result.cutMesh;
        layout->origin = result.seams.vertexOrigin;
        for (int v : layout->origin) layout->positions.push_back(mesh->positions[v]);
        layout->flattening = std::move(result.flattening);
        nlohmann::json list = nlohmann::json::array();
        for (std::size_t c = 0; c < result.cones.size(); ++c) {
            list.push_back({{"vertexIndex", result.cones[c]},
                            {"coneAngle", result.coneAngles[c]},
                            {"angleSum", result.angleSums[c]},
                            {"expectedAngleSum", 2.0 * std::numbers::pi - result.coneAngles[c]}});
        }
        layout->extra["cones"] = std::move(list);
        layout->extra["cutEdges"] = result.seams.cutEdges.size();
        layout->extra["edgePartner"] = result.seams.edgePartner;
        layout->extra["vertexOrigin"] = result.seams.vertexOrigin;
        *out = layout.release();
    });
}

void bff_layout_free(bff_layout* layout) { delete layout; }

int bff_layout_vertex_count(const bff_layout* layout) { return layout ? layout->mesh->vertexCount() : 0; }
int bff_layout_face_count(const bff_layout* layout) { return layout ? layout->mesh->faceCount() : 0; }
int bff_layout_boundary_count(const bff_layout* layout) { return layout ? layout->mesh->boundaryCount() : 0; }
int bff_layout_iterations(const bff_layout* layout) { return layout ? layout->flattening.iterations : 0; }

bff_status bff_layout_uv(const bff_layout* layout, double* out) {
    return guarded([&] {
        require(layout != nullptr && out != nullptr, "layout and output must not be null");
        const bff::PlanarMap& uv = layout->flattening.uv;
        for (long v = 0; v < uv.rows(); ++v) {
            out[2 * v] = uv(v, 0);
            out[2 * v + 1] = uv(v, 1);
        }
    });
}

bff_status bff_layout_faces(const bff_layout* layout, int* out) {
    return guarded([&] {
        require(layout != nullptr && out != nullptr, "layout and output must not be null");
        const auto& faces = layout->mesh->faces();
        for (std::size_t f = 0; f < faces.size(); ++f)
            for (int c = 0; c < 3; ++c) out[3 * f + c] = faces[f][c];
    });
}

bff_status bff_layout_vertex_origin(const bff_layout* layout, int* out) {
    return guarded([&] {
        require(layout != nullptr && out != nullptr, "layout and output must not be null");
        std::copy(layout->origin.begin(), layout->origin.end(), out);
    });
}

bff_status bff_layout_boundary_data(const bff_layout* layout, double* scale_factors, double* exterior_angles) {
    return guarded([&] {
        require(layout != nullptr, "layout must not be null");
        const bff::BoundaryConditions& data = layout->flattening.boundaryData;
        const int n = layout->mesh->boundaryCount();
        if (scale_factors) Eigen::Map<Eigen::VectorXd>(scale_factors, n) = data.scaleFactors;
        if (exterior_angles) Eigen::Map<Eigen::VectorXd>(exterior_angles, n) = data.exteriorAngles;
    });
}

bff_status bff_layout_quality(const bff_layout* layout, double* q_avg, double* q_max, int* flipped_faces) {
    return guarded([&] {
        require(layout != nullptr, "layout must not be null");
        const bff::QualityReport& q = layout->quality();
        if (q_avg) *q_avg = q.qAvg;
        if (q_max) *q_max = q.qMax;
        if (flipped_faces) *flipped_faces = static_cast<int>(q.flippedFaces.size());
    });
}

bff_status bff_layout_write_obj(const bff_layout* layout, const char* path) {
    return guarded([&] {
        require(layout != nullptr && path != nullptr, "layout and path must not be null");
        bff::writeTextFile(path, bff::writeObj(layout->positions, layout->mesh->faces(), layout->flattening.uv));
    });
}

bff_status bff_layout_write_svg(const bff_layout* layout, const char* path) {
    return guarded([&] {
        require(layout != nullptr && path != nullptr, "layout and path must not be null");
        bff::writeTextFile(path, bff::layoutSvg(layout->mesh->surface(), layout->flattening.uv));
    });
}

bff_status bff_layout_report_json(const bff_layout* layout, char** out) {
    return guarded([&] {
        require(layout != nullptr && out != nullptr, "layout and output must not be null");
        nlohmann::json report = bff::flatteningReport(*layout->mesh, layout->flattening, layout->quality());
        for (const auto& [key, value] : layout->extra.items()) report[key] = value;
        const std::string text = report.dump();
        char* buffer = static_cast<char*>(std::malloc(text.size() + 1));
        if (!buffer) throw std::bad_alloc();
        std::memcpy(buffer, text.c_str(), text.size() + 1);
        *out = buffer;
    });
}

} // extern "C"
