// Command line front end for boundary first flattening.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bff_handles.h"
#include "edit_service.h"

namespace {

using nlohmann::json;
using namespace bffcli;

struct Options {
    std::string input;
    std::string mode = "auto";
    std::string boundaryData;
    std::string cones;
    std::string targetCurve;
    std::string extension;
    std::string outObj;
    std::string outSvg;
    std::string report;
    int serve = -1;
    std::string host = "127.0.0.1";
    int maxIterations = 0;
    double tolerance = 0.0;
};

json readJsonFile(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ApiError(BFF_ERR_IO, std::string("cannot open ") + what + " file " + path);
    std::stringstream text;
    text << in.rdbuf();
    try {
        return json::parse(text.str());
    } catch (const json::exception& e) {
        throw ApiError(BFF_ERR_PARSE, std::string(what) + " file " + path + ": " + e.what());
    }
}

std::vector<double> numberArray(const json& value, const std::string& key) {
    if (!value.is_array()) throw ApiError(BFF_ERR_PARSE, key + " must be an array of numbers");
    std::vector<double> out;
    for (const json& x : value) {
        if (!x.is_number()) throw ApiError(BFF_ERR_PARSE, key + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// Index/angle pairs from [{vertexIndex, <angleKey>}].
void indexAnglePairs(const json& list, const char* angleKey, std::vector<int>& vertices, std::vector<double>& angles) {
    if (!list.is_array()) throw ApiError(BFF_ERR_PARSE, "expected an array of {vertexIndex, " + std::string(angleKey) + "}");
    for (const json& item : list) {
        if (!item.is_object() || !item.contains("vertexIndex") || !item["vertexIndex"].is_number_integer() ||
            !item.contains(angleKey) || !item[angleKey].is_number())
            throw ApiError(BFF_ERR_PARSE, "each entry needs an integer vertexIndex and a numeric " + std::string(angleKey));
        vertices.push_back(item["vertexIndex"].get<int>());
        angles.push_back(item[angleKey].get<double>());
    }
}

// The single key of a boundary data file and its value.
std::pair<std::string, json> boundaryDataEntry(const std::string& path) {
    const json doc = readJsonFile(path, "boundary data");
    static const char* keys[] = {"exteriorAngles", "edgeDirections", "edgeLengths", "scaleFactors", "corners"};
    std::pair<std::string, json> found;
    int count = 0;
    if (doc.is_object())
        for (const char* key : keys)
            if (doc.contains(key)) {
                ++count;
                found = {key, doc[key]};
            }
    if (count != 1)
        throw ApiError(BFF_ERR_PARSE, "boundary data needs exactly one of exteriorAngles, edgeDirections, "
                                      "edgeLengths, scaleFactors, corners");
    return found;
}

bff_extension extensionOr(const Options& o, bff_extension fallback) {
    if (o.extension.empty()) return fallback;
    return o.extension == "harmonic" ? BFF_EXTENSION_HARMONIC : BFF_EXTENSION_HOLOMORPHIC;
}

Layout flattenDisk(const Options& o, bff_mesh* mesh) {
    Session session = openSession(mesh);
    bff_session* s = session.get();
    if (o.mode == "auto") return makeLayout(bff_session_flatten_auto, s, extensionOr(o, BFF_EXTENSION_HOLOMORPHIC));
    if (o.mode == "disk") return makeLayout(bff_session_flatten_disk, s, o.maxIterations, o.tolerance);

    if (o.mode == "curve") {
        if (o.targetCurve.empty()) invalid("--mode curve needs --target-curve");
        const json doc = readJsonFile(o.targetCurve, "target curve");
        if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
            throw ApiError(BFF_ERR_PARSE, "target curve needs a points array");
        if (doc.contains("closed") && !doc["closed"].get<bool>()) invalid("target curve must be closed");
        std::vector<double> xy;
        for (const json& p : doc["points"]) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ApiError(BFF_ERR_PARSE, "target curve points must be [x, y] pairs");
            xy.push_back(p[0].get<double>());
            xy.push_back(p[1].get<double>());
        }
        return makeLayout(bff_session_flatten_curve, s, xy.data(), static_cast<int>(xy.size() / 2), o.maxIterations,
                          o.tolerance, extensionOr(o, BFF_EXTENSION_HARMONIC));
    }

    if (o.boundaryData.empty()) invalid("--mode " + o.mode + " needs --boundary-data");
    const auto [key, value] = boundaryDataEntry(o.boundaryData);
    if (o.mode == "sharp") {
        if (key != "corners") invalid("--mode sharp needs corners in the boundary data");
        std::vector<int> vertices;
        std::vector<double> angles;
        indexAnglePairs(value, "angle", vertices, angles);
        return makeLayout(bff_session_flatten_sharp, s, vertices.data(), angles.data(), static_cast<int>(vertices.size()),
                          extensionOr(o, BFF_EXTENSION_HARMONIC));
    }
    const std::vector<double> values = numberArray(value, key);
    const int n = static_cast<int>(values.size());
    const bff_extension ext = extensionOr(o, BFF_EXTENSION_HOLOMORPHIC);
    if (o.mode == "angles") {
        if (key == "exteriorAngles") return makeLayout(bff_session_flatten_angles, s, values.data(), n, ext);
        if (key == "edgeDirections") return makeLayout(bff_session_flatten_directions, s, values.data(), n, ext);
        invalid("--mode angles needs exteriorAngles or edgeDirections");
    }
    if (key == "edgeLengths") return makeLayout(bff_session_flatten_lengths, s, values.data(), n, ext);
    if (key == "scaleFactors") return makeLayout(bff_session_flatten_scale_factors, s, values.data(), n, ext);
    invalid("--mode lengths needs edgeLengths or scaleFactors");
}

Layout flattenCones(const Options& o, bff_mesh* mesh) {
    if (o.cones.empty()) invalid("--mode cones needs --cones");
    std::vector<int> vertices;
    std::vector<double> angles;
    indexAnglePairs(readJsonFile(o.cones, "cones"), "coneAngle", vertices, angles);
    return makeLayout(bff_flatten_cones, mesh, vertices.data(), angles.data(), static_cast<int>(vertices.size()));
}

int serve(const Options& o) {
    EditService service;
    const int port = service.bind(o.host, o.serve);
    if (port < 0) throw ApiError(BFF_ERR_IO, "cannot bind " + o.host + ":" + std::to_string(o.serve));
    std::cout << json{{"listening", o.host}, {"port", port}}.dump() << std::endl;
    service.listen();
    return 0;
}

int run(const Options& o) {
    threadLimit();
    if (o.serve >= 0) return serve(o);
    if (o.input.empty()) invalid("--input is required unless --serve is given");

    Mesh mesh = loadObjFile(o.input);
    Layout layout = o.mode == "cones" ? flattenCones(o, mesh.get()) : flattenDisk(o, mesh.get());

    if (!o.outObj.empty()) check(bff_layout_write_obj(layout.get(), o.outObj.c_str()));
    if (!o.outSvg.empty()) check(bff_layout_write_svg(layout.get(), o.outSvg.c_str()));
    const json report = reportJson(layout.get());
    if (!o.report.empty()) {
        std::ofstream out(o.report);
        if (!out) throw ApiError(BFF_ERR_IO, "cannot write " + o.report);
        out << report.dump(1) << '\n';
        if (!out) throw ApiError(BFF_ERR_IO, "cannot write " + o.report);
    }
    std::cout << json{{"method", report["method"]},
                      {"vertices", report["vertexCount"]},
                      {"faces", report["faceCount"]},
                      {"iterations", report["iterations"]},
                      {"qAvg", report["qAvg"]},
                      {"qMax", report["qMax"]},
                      {"flippedFaces", report["flippedFaces"].size()}}
                     .dump()
              << '\n';
    return 0;
}

void printError(const json& error) { std::cerr << error.dump() << std::endl; }

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Boundary first flattening of triangle meshes"};
    app.add_option("--input", o.input, "Input OBJ mesh");
    app.add_option("--mode", o.mode, "Flattening mode")
        ->check(CLI::IsMember({"auto", "angles", "lengths", "sharp", "cones", "disk", "curve"}));
    app.add_option("--boundary-data", o.boundaryData, "Boundary data JSON");
    app.add_option("--cones", o.cones, "Cone list JSON [{vertexIndex, coneAngle}]");
    app.add_option("--target-curve", o.targetCurve, "Target curve JSON {points, closed}");
    app.add_option("--extension", o.extension, "Interior extension")
        ->check(CLI::IsMember({"holomorphic", "harmonic"}));
    app.add_option("--out-obj", o.outObj, "Write OBJ with per-vertex texture coordinates");
    app.add_option("--out-svg", o.outSvg, "Write SVG layout");
    app.add_option("--report", o.report, "Write JSON quality report");
    app.add_option("--serve", o.serve, "Start the editing service on this port (0 picks one)")
        ->check(CLI::Range(0, 65535));
    app.add_option("--host", o.host, "Address for --serve");
    app.add_option("--max-iterations", o.maxIterations, "Iteration cap for disk and curve modes");
    app.add_option("--tolerance", o.tolerance, "Stopping tolerance for disk and curve modes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        printError({{"error", "UsageError"}, {"code", 2}, {"message", e.what()}});
        return 2;
    }

    try {
        return run(o);
    } catch (const ApiError& e) {
        printError(errorJson(e));
    } catch (const std::exception& e) {
        printError({{"error", "Internal"}, {"code", static_cast<int>(BFF_ERR_INTERNAL)}, {"message", e.what()}});
    }
    return 1;
}
