#ifndef BFF_BFF_H
#define BFF_BFF_H

/* C interface to the boundary first flattening library.
 *
 * Every fallible call returns a bff_status; on failure a description is
 * available from bff_last_error() on the calling thread. Objects are opaque
 * and owned by the caller, who releases them with the matching _free call.
 * Output arrays are caller-allocated; query their sizes first.
 */

#include <stddef.h>

#if defined(_WIN32)
#define BFF_API __declspec(dllexport)
#else
#define BFF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bff_status {
    BFF_OK = 0,
    BFF_ERR_INVALID_ARGUMENT = 1,
    BFF_ERR_PARSE = 2,
    BFF_ERR_IO = 3,
    BFF_ERR_NON_MANIFOLD = 4,
    BFF_ERR_NOT_A_DISK = 5,
    BFF_ERR_DEGENERATE_FACE = 6,
    BFF_ERR_NOT_POSITIVE_DEFINITE = 7,
    BFF_ERR_DIMENSION_MISMATCH = 8,
    BFF_ERR_ANGLE_SUM_VIOLATION = 9,
    BFF_ERR_NON_POSITIVE_LENGTH = 10,
    BFF_ERR_WINDING_MISMATCH = 11,
    BFF_ERR_CONE_SUM_VIOLATION = 12,
    BFF_ERR_CONE_NOT_REACHABLE = 13,
    BFF_ERR_ALREADY_OPEN_WITH_CUTS = 14,
    BFF_ERR_NO_CONVERGENCE = 15,
    BFF_ERR_INTERNAL = 99
} bff_status;

typedef enum bff_extension {
    BFF_EXTENSION_HOLOMORPHIC = 0,
    BFF_EXTENSION_HARMONIC = 1
} bff_extension;

/* A triangle mesh of any topology, with its vertex positions. */
typedef struct bff_mesh bff_mesh;
/* A disk mesh with its factored Laplacian; flattens by backsolves only. */
typedef struct bff_session bff_session;
/* The result of one flattening: a planar map plus its report. */
typedef struct bff_layout bff_layout;

typedef struct bff_stats {
    size_t factorizations;   /* performed by this session */
    size_t full_solves;
    size_t interior_solves;
    size_t flattenings;
} bff_stats;

BFF_API const char* bff_last_error(void);
BFF_API const char* bff_status_name(bff_status status);
/* Process-wide number of Cholesky factorizations. */
BFF_API size_t bff_factorization_count(void);
/* Frees strings returned by the library. */
BFF_API void bff_string_free(char* text);

BFF_API bff_status bff_mesh_load_obj_file(const char* path, bff_mesh** out);
BFF_API bff_status bff_mesh_load_obj_string(const char* text, size_t length, bff_mesh** out);
/* xyz holds 3 * vertex_count coordinates, triangles 3 * face_count indices. */
BFF_API bff_status bff_mesh_from_arrays(const double* xyz, int vertex_count, const int* triangles, int face_count,
                                        bff_mesh** out);
BFF_API void bff_mesh_free(bff_mesh* mesh);
BFF_API int bff_mesh_vertex_count(const bff_mesh* mesh);
BFF_API int bff_mesh_face_count(const bff_mesh* mesh);
BFF_API int bff_mesh_euler_characteristic(const bff_mesh* mesh);
BFF_API int bff_mesh_boundary_loop_count(const bff_mesh* mesh);

/* Fails with BFF_ERR_NOT_A_DISK unless the mesh is a topological disk. */
BFF_API bff_status bff_session_create(const bff_mesh* mesh, bff_session** out);
BFF_API void bff_session_free(bff_session* session);
BFF_API int bff_session_boundary_count(const bff_session* session);
/* Boundary vertices in loop order (interior on the left). */
BFF_API bff_status bff_session_boundary_vertices(const bff_session* session, int* out);
/* Exterior angle k of the surface at each boundary vertex. */
BFF_API bff_status bff_session_boundary_curvature(const bff_session* session, double* out);
BFF_API bff_status bff_session_dual_lengths(const bff_session* session, double* out);
BFF_API bff_status bff_session_edge_lengths(const bff_session* session, double* out);
BFF_API bff_status bff_session_stats(const bff_session* session, bff_stats* out);

/* Flattenings. Boundary arrays have bff_session_boundary_count entries and
 * follow the boundary loop order; edge i joins boundary vertices i and i + 1. */
BFF_API bff_status bff_session_flatten_auto(bff_session* session, bff_extension extension, bff_layout** out);
BFF_API bff_status bff_session_flatten_scale_factors(bff_session* session, const double* u, int count,
                                                     bff_extension extension, bff_layout** out);
BFF_API bff_status bff_session_flatten_angles(bff_session* session, const double* angles, int count,
                                              bff_extension extension, bff_layout** out);
BFF_API bff_status bff_session_flatten_lengths(bff_session* session, const double* lengths, int count,
                                               bff_extension extension, bff_layout** out);
BFF_API bff_status bff_session_flatten_directions(bff_session* session, const double* directions, int count,
                                                  bff_extension extension, bff_layout** out);
/* Exterior angles at the listed boundary vertices; the rest share the remainder. */
BFF_API bff_status bff_session_flatten_sharp(bff_session* session, const int* vertices, const double* angles,
                                             int count, bff_extension extension, bff_layout** out);
/* Pass max_iterations <= 0 or tolerance <= 0 for the defaults. */
BFF_API bff_status bff_session_flatten_disk(bff_session* session, int max_iterations, double tolerance,
                                            bff_layout** out);
/* xy holds 2 * point_count coordinates of a closed polyline. */
BFF_API bff_status bff_session_flatten_curve(bff_session* session, const double* xy, int point_count,
                                             int max_iterations, double tolerance, bff_extension extension,
                                             bff_layout** out);

/* Cone flattening of any mesh; cuts it open through the cones. `angles` are
 * target angle defects, so the layout angle sum at each cone is 2*pi - angle. */
BFF_API bff_status bff_flatten_cones(const bff_mesh* mesh, const int* vertices, const double* angles, int count,
                                     bff_layout** out);

BFF_API void bff_layout_free(bff_layout* layout);
BFF_API int bff_layout_vertex_count(const bff_layout* layout);
BFF_API int bff_layout_face_count(const bff_layout* layout);
BFF_API int bff_layout_boundary_count(const bff_layout* layout);
BFF_API int bff_layout_iterations(const bff_layout* layout);
/* 2 * vertex_count coordinates. */
BFF_API bff_status bff_layout_uv(const bff_layout* layout, double* out);
/* 3 * face_count indices into the layout's vertices. */
BFF_API bff_status bff_layout_faces(const bff_layout* layout, int* out);
/* Input mesh vertex of each layout vertex (they differ only after cutting). */
BFF_API bff_status bff_layout_vertex_origin(const bff_layout* layout, int* out);
/* Completed boundary data; either pointer may be null. */
BFF_API bff_status bff_layout_boundary_data(const bff_layout* layout, double* scale_factors, double* exterior_angles);
BFF_API bff_status bff_layout_quality(const bff_layout* layout, double* q_avg, double* q_max, int* flipped_faces);
BFF_API bff_status bff_layout_write_obj(const bff_layout* layout, const char* path);
BFF_API bff_status bff_layout_write_svg(const bff_layout* layout, const char* path);
/* JSON report; release with bff_string_free. */
BFF_API bff_status bff_layout_report_json(const bff_layout* layout, char** out);

#ifdef __cplusplus
}
#endif

#endif
