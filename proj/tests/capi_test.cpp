// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <bff/bff.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Arrays {
    std::vector<double> xyz;
    std::vector<int> tris;
    int vertices() const { return static_cast<int>(xyz.size() / 3); }
    int faces() const { return static_cast<int>(tris.size() / 3); }
};

// (n+1)^2 grid over the unit square with height z = bump * (x^2 + y^2).
Arrays grid(int n, double bump = 0.0) {
    Arrays a;
    for (int y = 0; y <= n; ++y)
        for (int x = 0; x <= n; ++x) {
            const double px = double(x) / n, py = double(y) / n;
            a.xyz.insert(a.xyz.end(), {px, py, bump * (px * px + py * py)});
        }
    const auto id = [n](int x, int y) { return y * (n + 1) + x; };
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            a.tris.insert(a.tris.end(), {id(x, y), id(x + 1, y), id(x + 1, y + 1)});
            a.tris.insert(a.tris.end(), {id(x, y), id(x + 1, y + 1), id(x, y + 1)});
        }
    return a;
}

// Once-subdivided icosahedron on the unit sphere.
Arrays icosphere() {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<std::array<double, 3>> p = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                            {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    std::map<std::pair<int, int>, int> mid;
    const auto midpoint = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        if (auto it = mid.find(key); it != mid.end()) return it->second;
        p.push_back({p[a][0] + p[b][0], p[a][1] + p[b][1], p[a][2] + p[b][2]});
        return mid[key] = static_cast<int>(p.size()) - 1;
    };
    Arrays a;
    for (const auto& tri : f) {
        const int ab = midpoint(tri[0], tri[1]), bc = midpoint(tri[1], tri[2]), ca = midpoint(tri[2], tri[0]);
        a.tris.insert(a.tris.end(), {tri[0], ab, ca, tri[1], bc, ab, tri[2], ca, bc, ab, bc, ca});
    }
    for (auto& q : p) {
        const double r = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
        a.xyz.insert(a.xyz.end(), {q[0] / r, q[1] / r, q[2] / r});
    }
    return a;
}

bff_mesh* load(const Arrays& a) {
    bff_mesh* mesh = nullptr;
    REQUIRE(bff_mesh_from_arrays(a.xyz.data(), a.vertices(), a.tris.data(), a.faces(), &mesh) == BFF_OK);
    return mesh;
}

bff_session* open(const bff_mesh* mesh) {
    bff_session* session = nullptr;
    REQUIRE(bff_session_create(mesh, &session) == BFF_OK);
    return session;
}

std::vector<double> uvOf(const bff_layout* layout) {
    std::vector<double> uv(2 * bff_layout_vertex_count(layout));
    REQUIRE(bff_layout_uv(layout, uv.data()) == BFF_OK);
    return uv;
}

// Largest distance between uv and xy after the best similarity of uv onto xy.
double similarityResidual(const std::vector<double>& uv, const std::vector<double>& xyz) {
    const std::size_t n = uv.size() / 2;
    double cu[2] = {0, 0}, cx[2] = {0, 0};
    for (std::size_t v = 0; v < n; ++v)
        for (int k = 0; k < 2; ++k) {
            cu[k] += uv[2 * v + k] / n;
            cx[k] += xyz[3 * v + k] / n;
        }
    // Complex least squares: x = z * u.
    double re = 0, im = 0, norm = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const double ux = uv[2 * v] - cu[0], uy = uv[2 * v + 1] - cu[1];
        const double xx = xyz[3 * v] - cx[0], xy = xyz[3 * v + 1] - cx[1];
        re += ux * xx + uy * xy;
        im += ux * xy - uy * xx;
        norm += ux * ux + uy * uy;
    }
    re /= norm;
    im /= norm;
    double worst = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const double ux = uv[2 * v] - cu[0], uy = uv[2 * v + 1] - cu[1];
        const double dx = re * ux - im * uy - (xyz[3 * v] - cx[0]);
        const double dy = im * ux + re * uy - (xyz[3 * v + 1] - cx[1]);
        worst = std::max(worst, std::hypot(dx, dy));
    }
    return worst;
}

nlohmann::json report(const bff_layout* layout) {
    char* text = nullptr;
    REQUIRE(bff_layout_report_json(layout, &text) == BFF_OK);
    nlohmann::json j = nlohmann::json::parse(text);
    bff_string_free(text);
    return j;
}

} // namespace

TEST_CASE("status names and last error") {
    CHECK(std::string(bff_status_name(BFF_OK)) == "Ok");
    CHECK(std::string(bff_status_name(BFF_ERR_NOT_A_DISK)) == "NotADisk");
    CHECK(std::string(bff_status_name(BFF_ERR_NO_CONVERGENCE)) == "NoConvergence");
    CHECK(std::string(bff_status_name(BFF_ERR_INTERNAL)) == "Internal");

    bff_mesh* mesh = nullptr;
    const std::string bad = "v 0 0 0\nv 1 0 0\nv 0 1 zz\nf 1 2 3\n";
    CHECK(bff_mesh_load_obj_string(bad.data(), bad.size(), &mesh) == BFF_ERR_PARSE);
    CHECK(mesh == nullptr);
    CHECK(std::string(bff_last_error()).find("line 3") != std::string::npos);
    CHECK(bff_mesh_load_obj_file("/nonexistent/file.obj", &mesh) == BFF_ERR_IO);
    CHECK(bff_mesh_load_obj_string(nullptr, 0, &mesh) == BFF_ERR_INVALID_ARGUMENT);
    bff_mesh_free(nullptr);
    bff_session_free(nullptr);
    bff_layout_free(nullptr);
}

TEST_CASE("last error is per thread") {
    bff_mesh* mesh = nullptr;
    CHECK(bff_mesh_load_obj_file("/nonexistent/main.obj", &mesh) == BFF_ERR_IO);
    const std::string mine = bff_last_error();
    std::string theirs;
    std::thread([&] {
        const std::string bad = "f 1 2 3\n";
        bff_mesh* m = nullptr;
        bff_mesh_load_obj_string(bad.data(), bad.size(), &m);
        theirs = bff_last_error();
    }).join();
    CHECK(theirs != mine);
    CHECK(std::string(bff_last_error()) == mine);
}

TEST_CASE("mesh construction and topology queries") {
    const Arrays g = grid(4);
    bff_mesh* mesh = load(g);
    CHECK(bff_mesh_vertex_count(mesh) == 25);
    CHECK(bff_mesh_face_count(mesh) == 32);
    CHECK(bff_mesh_euler_characteristic(mesh) == 1);
    CHECK(bff_mesh_boundary_loop_count(mesh) == 1);
    bff_mesh_free(mesh);

    bff_mesh* sphere = load(icosphere());
    CHECK(bff_mesh_euler_characteristic(sphere) == 2);
    CHECK(bff_mesh_boundary_loop_count(sphere) == 0);
    bff_session* session = nullptr;
    CHECK(bff_session_create(sphere, &session) == BFF_ERR_NOT_A_DISK);
    CHECK(session == nullptr);
    bff_mesh_free(sphere);

    const std::vector<int> outOfRange = {0, 1, 7};
    bff_mesh* broken = nullptr;
    CHECK(bff_mesh_from_arrays(g.xyz.data(), 3, outOfRange.data(), 1, &broken) != BFF_OK);
    const std::vector<double> flat = {0, 0, 0, 1, 0, 0, 2, 0, 0};
    const std::vector<int> tri = {0, 1, 2};
    CHECK(bff_mesh_from_arrays(flat.data(), 3, tri.data(), 1, &broken) == BFF_ERR_DEGENERATE_FACE);
}

TEST_CASE("session queries follow the boundary loop") {
    bff_mesh* mesh = load(grid(3));
    bff_session* session = open(mesh);
    const int nB = bff_session_boundary_count(session);
    CHECK(nB == 12);
    std::vector<int> boundary(nB);
    std::vector<double> k(nB), dual(nB), lengths(nB);
    REQUIRE(bff_session_boundary_vertices(session, boundary.data()) == BFF_OK);
    REQUIRE(bff_session_boundary_curvature(session, k.data()) == BFF_OK);
    REQUIRE(bff_session_dual_lengths(session, dual.data()) == BFF_OK);
    REQUIRE(bff_session_edge_lengths(session, lengths.data()) == BFF_OK);
    double sumK = 0, sumDual = 0, perimeter = 0;
    for (int i = 0; i < nB; ++i) {
        sumK += k[i];
        sumDual += dual[i];
        perimeter += lengths[i];
        CHECK(lengths[i] == doctest::Approx(1.0 / 3.0));
    }
    CHECK(sumK == doctest::Approx(kTwoPi).epsilon(1e-12));
    CHECK(sumDual == doctest::Approx(perimeter).epsilon(1e-12));
    // The four corners turn by pi/2, the rest are straight.
    int corners = 0;
    for (double v : k) corners += std::abs(v - std::numbers::pi / 2) < 1e-12;
    CHECK(corners == 4);
    bff_session_free(session);
    bff_mesh_free(mesh);
}

TEST_CASE("auto flattening of a flat mesh reproduces it and costs no new factorization") {
    const Arrays g = grid(5);
    bff_mesh* mesh = load(g);
    const std::size_t before = bff_factorization_count();
    bff_session* session = open(mesh);
    CHECK(bff_factorization_count() == before + 1);

    for (bff_extension e : {BFF_EXTENSION_HOLOMORPHIC, BFF_EXTENSION_HARMONIC}) {
        bff_layout* layout = nullptr;
        REQUIRE(bff_session_flatten_auto(session, e, &layout) == BFF_OK);
        CHECK(bff_layout_vertex_count(layout) == g.vertices());
        CHECK(bff_layout_face_count(layout) == g.faces());
        CHECK(similarityResidual(uvOf(layout), g.xyz) <= 1e-8);

        std::vector<int> faces(3 * g.faces());
        REQUIRE(bff_layout_faces(layout, faces.data()) == BFF_OK);
        CHECK(faces == g.tris);
        std::vector<int> origin(g.vertices());
        REQUIRE(bff_layout_vertex_origin(layout, origin.data()) == BFF_OK);
        for (int v = 0; v < g.vertices(); ++v) CHECK(origin[v] == v);

        double qAvg = 0, qMax = 0;
        int flipped = -1;
        REQUIRE(bff_layout_quality(layout, &qAvg, &qMax, &flipped) == BFF_OK);
        CHECK(qAvg == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(flipped == 0);
        bff_layout_free(layout);
    }

    bff_stats stats{};
    REQUIRE(bff_session_stats(session, &stats) == BFF_OK);
    CHECK(stats.factorizations == 1);
    CHECK(stats.flattenings == 2);
    CHECK(stats.full_solves + stats.interior_solves == 6);
    CHECK(bff_factorization_count() == before + 1);
    bff_session_free(session);
    bff_mesh_free(mesh);
}

TEST_CASE("boundary data flattenings and their errors") {
    bff_mesh* mesh = load(grid(4, 0.4));
    bff_session* session = open(mesh);
    const int nB = bff_session_boundary_count(session);
    bff_layout* layout = nullptr;

    std::vector<double> u(nB, 0.0);
    REQUIRE(bff_session_flatten_scale_factors(session, u.data(), nB, BFF_EXTENSION_HOLOMORPHIC, &layout) == BFF_OK);
    CHECK(bff_layout_boundary_count(layout) == nB);
    std::vector<double> uOut(nB), angles(nB);
    REQUIRE(bff_layout_boundary_data(layout, uOut.data(), angles.data()) == BFF_OK);
    double sum = 0;
    for (int i = 0; i < nB; ++i) {
        CHECK(uOut[i] == 0.0);
        sum += angles[i];
    }
    CHECK(sum == doctest::Approx(kTwoPi).epsilon(1e-9));
    REQUIRE(bff_layout_boundary_data(layout, nullptr, nullptr) == BFF_OK);
    bff_layout_free(layout);

    // Regular polygon angles round trip through the layout.
    std::vector<double> regular(nB, kTwoPi / nB);
    REQUIRE(bff_session_flatten_angles(session, regular.data(), nB, BFF_EXTENSION_HARMONIC, &layout) == BFF_OK);
    REQUIRE(bff_layout_boundary_data(layout, nullptr, angles.data()) == BFF_OK);
    for (double a : angles) CHECK(a == doctest::Approx(kTwoPi / nB).epsilon(1e-9));
    bff_layout_free(layout);

    std::vector<double> lengths(nB, 0.25);
    REQUIRE(bff_session_flatten_lengths(session, lengths.data(), nB, BFF_EXTENSION_HOLOMORPHIC, &layout) == BFF_OK);
    bff_layout_free(layout);
    std::vector<double> directions(nB);
    for (int i = 0; i < nB; ++i) directions[i] = kTwoPi * i / nB;
    REQUIRE(bff_session_flatten_directions(session, directions.data(), nB, BFF_EXTENSION_HARMONIC, &layout) ==
            BFF_OK);
    bff_layout_free(layout);

    layout = nullptr;
    CHECK(bff_session_flatten_scale_factors(session, u.data(), nB - 1, BFF_EXTENSION_HOLOMORPHIC, &layout) ==
          BFF_ERR_DIMENSION_MISMATCH);
    CHECK(layout == nullptr);
    std::vector<double> wrong(nB, 0.3);
    CHECK(bff_session_flatten_angles(session, wrong.data(), nB, BFF_EXTENSION_HOLOMORPHIC, &layout) ==
          BFF_ERR_ANGLE_SUM_VIOLATION);
    CHECK(std::string(bff_last_error()).size() > 0);
    CHECK(bff_session_flatten_auto(session, static_cast<bff_extension>(7), &layout) == BFF_ERR_INVALID_ARGUMENT);
    CHECK(bff_session_flatten_auto(nullptr, BFF_EXTENSION_HOLOMORPHIC, &layout) == BFF_ERR_INVALID_ARGUMENT);
    bff_session_free(session);
    bff_mesh_free(mesh);
}

TEST_CASE("sharp corners, disk and curve targets") {
    bff_mesh* mesh = load(grid(6, 0.5));
    bff_session* session = open(mesh);
    const int nB = bff_session_boundary_count(session);
    std::vector<int> boundary(nB);
    REQUIRE(bff_session_boundary_vertices(session, boundary.data()) == BFF_OK);

    bff_layout* layout = nullptr;
    const int corners[4] = {boundary[0], boundary[nB / 4], boundary[nB / 2], boundary[3 * nB / 4]};
    const double quarter[4] = {kTwoPi / 4, kTwoPi / 4, kTwoPi / 4, kTwoPi / 4};
    REQUIRE(bff_session_flatten_sharp(session, corners, quarter, 4, BFF_EXTENSION_HARMONIC, &layout) == BFF_OK);
    std::vector<double> angles(nB);
    REQUIRE(bff_layout_boundary_data(layout, nullptr, angles.data()) == BFF_OK);
    for (int c : {0, nB / 4, nB / 2, 3 * nB / 4}) CHECK(angles[c] == doctest::Approx(kTwoPi / 4).epsilon(1e-12));
    bff_layout_free(layout);

    REQUIRE(bff_session_flatten_disk(session, 0, 0.0, &layout) == BFF_OK);
    CHECK(bff_layout_iterations(layout) >= 1);
    const std::vector<double> uv = uvOf(layout);
    for (int v : boundary) CHECK(std::hypot(uv[2 * v], uv[2 * v + 1]) == doctest::Approx(1.0).epsilon(2e-3));
    bff_layout_free(layout);

    const double square[8] = {0, 0, 1, 0, 1, 1, 0, 1};
    REQUIRE(bff_session_flatten_curve(session, square, 4, 20, 1e-4, BFF_EXTENSION_HARMONIC, &layout) == BFF_OK);
    const nlohmann::json r = report(layout);
    CHECK(r.contains("uv"));
    bff_layout_free(layout);
    CHECK(bff_session_flatten_curve(session, square, 2, 20, 1e-4, BFF_EXTENSION_HARMONIC, &layout) != BFF_OK);

    bff_stats stats{};
    REQUIRE(bff_session_stats(session, &stats) == BFF_OK);
    CHECK(stats.factorizations == 1);
    bff_session_free(session);
    bff_mesh_free(mesh);
}

TEST_CASE("cone flattening of a sphere reports per-cone angle sums") {
    bff_mesh* mesh = load(icosphere());
    const int vertices[4] = {0, 3, 5, 6};
    const double angles[4] = {std::numbers::pi, std::numbers::pi, std::numbers::pi, std::numbers::pi};
    bff_layout* layout = nullptr;
    REQUIRE(bff_flatten_cones(mesh, vertices, angles, 4, &layout) == BFF_OK);
    CHECK(bff_layout_vertex_count(layout) > bff_mesh_vertex_count(mesh));
    CHECK(bff_layout_face_count(layout) == bff_mesh_face_count(mesh));
    std::vector<int> origin(bff_layout_vertex_count(layout));
    REQUIRE(bff_layout_vertex_origin(layout, origin.data()) == BFF_OK);
    for (int v : origin) CHECK((v >= 0 && v < bff_mesh_vertex_count(mesh)));

    const nlohmann::json r = report(layout);
    REQUIRE(r["cones"].size() == 4);
    for (const auto& c : r["cones"])
        CHECK(c["angleSum"].get<double>() == doctest::Approx(c["expectedAngleSum"].get<double>()).epsilon(1e-7));
    CHECK(r["cutEdges"].get<int>() > 0);
    bff_layout_free(layout);

    const double tooSmall[4] = {1.0, 1.0, 1.0, 1.0};
    CHECK(bff_flatten_cones(mesh, vertices, tooSmall, 4, &layout) == BFF_ERR_CONE_SUM_VIOLATION);
    bff_mesh_free(mesh);
}

TEST_CASE("layouts write OBJ and SVG files") {
    bff_mesh* mesh = load(grid(2));
    bff_session* session = open(mesh);
    bff_layout* layout = nullptr;
    REQUIRE(bff_session_flatten_auto(session, BFF_EXTENSION_HOLOMORPHIC, &layout) == BFF_OK);
    const auto dir = std::filesystem::temp_directory_path();
    const auto obj = dir / "bff_capi_test.obj", svg = dir / "bff_capi_test.svg";
    REQUIRE(bff_layout_write_obj(layout, obj.c_str()) == BFF_OK);
    REQUIRE(bff_layout_write_svg(layout, svg.c_str()) == BFF_OK);
    bff_mesh* reloaded = nullptr;
    REQUIRE(bff_mesh_load_obj_file(obj.c_str(), &reloaded) == BFF_OK);
    CHECK(bff_mesh_face_count(reloaded) == 8);
    bff_mesh_free(reloaded);
    std::ifstream in(svg);
    std::string head;
    in >> head;
    CHECK(head == "<svg");
    CHECK(bff_layout_write_obj(layout, "/nonexistent/dir/out.obj") == BFF_ERR_IO);
    std::filesystem::remove(obj);
    std::filesystem::remove(svg);

    // Layouts outlive their session.
    bff_session_free(session);
    bff_mesh_free(mesh);
    CHECK(uvOf(layout).size() == 18);
    bff_layout_free(layout);
}
