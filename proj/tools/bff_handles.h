#pragma once

// Owning wrappers over the C API handles. Failed calls throw ApiError.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bff/bff.h"

namespace bffcli {

class ApiError : public std::runtime_error {
public:
    ApiError(bff_status status, const std::string& message) : std::runtime_error(message), status_(status) {}
    bff_status status() const { return status_; }
    const char* name() const { return bff_status_name(status_); }

private:
    bff_status status_;
};

inline void check(bff_status status) {
    if (status != BFF_OK) throw ApiError(status, bff_last_error());
}

[[noreturn]] inline void invalid(const std::string& message) { throw ApiError(BFF_ERR_INVALID_ARGUMENT, message); }

struct MeshDeleter {
    void operator()(bff_mesh* p) const { bff_mesh_free(p); }
};
struct SessionDeleter {
    void operator()(bff_session* p) const { bff_session_free(p); }
};
struct LayoutDeleter {
    void operator()(bff_layout* p) const { bff_layout_free(p); }
};

using Mesh = std::unique_ptr<bff_mesh, MeshDeleter>;
using Session = std::unique_ptr<bff_session, SessionDeleter>;
using Layout = std::unique_ptr<bff_layout, LayoutDeleter>;

inline Mesh loadObjFile(const std::string& path) {
    bff_mesh* mesh = nullptr;
    check(bff_mesh_load_obj_file(path.c_str(), &mesh));
    return Mesh(mesh);
}

inline Mesh loadObjString(const std::string& text) {
    bff_mesh* mesh = nullptr;
    check(bff_mesh_load_obj_string(text.data(), text.size(), &mesh));
    return Mesh(mesh);
}

inline Session openSession(const bff_mesh* mesh) {
    bff_session* session = nullptr;
    check(bff_session_create(mesh, &session));
    return Session(session);
}

// Runs a flatten call of the form f(args..., bff_layout**).
template <class Fn, class... Args>
Layout makeLayout(Fn fn, Args... args) {
    bff_layout* layout = nullptr;
    check(fn(args..., &layout));
    return Layout(layout);
}

inline std::vector<double> boundaryCurvature(const bff_session* s) {
    std::vector<double> out(bff_session_boundary_count(s));
    check(bff_session_boundary_curvature(s, out.data()));
    return out;
}

inline std::vector<double> dualLengths(const bff_session* s) {
    std::vector<double> out(bff_session_boundary_count(s));
    check(bff_session_dual_lengths(s, out.data()));
    return out;
}

inline std::vector<double> edgeLengths(const bff_session* s) {
    std::vector<double> out(bff_session_boundary_count(s));
    check(bff_session_edge_lengths(s, out.data()));
    return out;
}

inline std::vector<int> boundaryVertices(const bff_session* s) {
    std::vector<int> out(bff_session_boundary_count(s));
    check(bff_session_boundary_vertices(s, out.data()));
    return out;
}

inline std::vector<double> uv(const bff_layout* layout) {
    std::vector<double> out(2 * static_cast<std::size_t>(bff_layout_vertex_count(layout)));
    check(bff_layout_uv(layout, out.data()));
    return out;
}

inline std::vector<int> faces(const bff_layout* layout) {
    std::vector<int> out(3 * static_cast<std::size_t>(bff_layout_face_count(layout)));
    check(bff_layout_faces(layout, out.data()));
    return out;
}

struct BoundaryData {
    std::vector<double> scaleFactors;
    std::vector<double> exteriorAngles;
};

inline BoundaryData boundaryData(const bff_layout* layout) {
    BoundaryData data;
    data.scaleFactors.resize(bff_layout_boundary_count(layout));
    data.exteriorAngles.resize(data.scaleFactors.size());
    check(bff_layout_boundary_data(layout, data.scaleFactors.data(), data.exteriorAngles.data()));
    return data;
}

inline nlohmann::json reportJson(const bff_layout* layout) {
    char* text = nullptr;
    check(bff_layout_report_json(layout, &text));
    std::unique_ptr<char, decltype(&bff_string_free)> owned(text, &bff_string_free);
    return nlohmann::json::parse(owned.get());
}

inline nlohmann::json errorJson(const ApiError& e) {
    return {{"error", e.name()}, {"code", static_cast<int>(e.status())}, {"message", e.what()}};
}

} // namespace bffcli
