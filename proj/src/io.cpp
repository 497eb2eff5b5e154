#include "bff/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace bff {

namespace {

using nlohmann::json;

[[noreturn]] void parseError(int line, const std::string& what) {
    throw Error(ErrorCode::ParseError, "OBJ line " + std::to_string(line) + ": " + what);
}

double parseNumber(std::string_view token, int line) {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size())
        parseError(line, "bad number '" + std::string(token) + "'");
    return value;
}

// Resolves a 1-based (or negative, relative) OBJ index.
int resolveIndex(std::string_view token, int count, int line) {
    long value = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size() || value == 0)
        parseError(line, "bad index '" + std::string(token) + "'");
    const long index = value > 0 ? value - 1 : count + value;
    if (index < 0 || index >= count) parseError(line, "index " + std::to_string(value) + " out of range");
    return static_cast<int>(index);
}

std::vector<std::string_view> splitWhitespace(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

json parseJson(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
    }
}

Eigen::VectorXd numberArray(const json& value, const char* what) {
    if (!value.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array of numbers");
    Eigen::VectorXd out(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) throw Error(ErrorCode::ParseError, std::string(what) + " must hold numbers");
        out[static_cast<long>(i)] = value[i].get<double>();
    }
    return out;
}

json finiteOrNull(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

} // namespace

ObjDocument parseObj(std::string_view text) {
    ObjDocument doc;
    std::vector<Face> texFaces;
    bool allTextured = true;
    int lineNumber = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineNumber;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::vector<std::string_view> tokens = splitWhitespace(line);
        if (tokens.empty()) continue;

        if (tokens[0] == "v") {
            if (tokens.size() < 4) parseError(lineNumber, "vertex needs three coordinates");
            doc.positions.emplace_back(parseNumber(tokens[1], lineNumber), parseNumber(tokens[2], lineNumber),
                                       parseNumber(tokens[3], lineNumber));
        } else if (tokens[0] == "vt") {
            if (tokens.size() < 3) parseError(lineNumber, "texture coordinate needs two values");
            doc.texcoords.emplace_back(parseNumber(tokens[1], lineNumber), parseNumber(tokens[2], lineNumber));
        } else if (tokens[0] == "f") {
            if (tokens.size() != 4) parseError(lineNumber, "only triangles are supported");
            Face face{};
            Face tex{};
            bool textured = true;
            for (int c = 0; c < 3; ++c) {
                const std::string_view token = tokens[c + 1];
                const std::size_t slash = token.find('/');
                face[c] = resolveIndex(token.substr(0, slash), static_cast<int>(doc.positions.size()), lineNumber);
                if (slash == std::string_view::npos) {
                    textured = false;
                    continue;
                }
                const std::string_view rest = token.substr(slash + 1);
                const std::string_view vt = rest.substr(0, rest.find('/'));
                if (vt.empty()) {
                    textured = false;
                } else {
                    tex[c] = resolveIndex(vt, static_cast<int>(doc.texcoords.size()), lineNumber);
                }
            }
            doc.faces.push_back(face);
            texFaces.push_back(tex);
            allTextured = allTextured && textured;
        }
        if (end == text.size()) break;
    }
    if (doc.faces.empty()) throw Error(ErrorCode::ParseError, "OBJ contains no faces");
    if (allTextured) doc.faceTexcoords = std::move(texFaces);
    return doc;
}

std::string readTextFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void writeTextFile(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

ObjDocument readObj(const std::filesystem::path& path) { return parseObj(readTextFile(path)); }

PlanarMap normalizeToUnitSquare(const PlanarMap& uv) {
    if (uv.rows() == 0) return uv;
    const Eigen::RowVector2d lo = uv.colwise().minCoeff();
    const Eigen::RowVector2d hi = uv.colwise().maxCoeff();
    const double extent = (hi - lo).maxCoeff();
    PlanarMap out = uv.rowwise() - lo;
    if (extent > 0.0) out /= extent;
    return out;
}

std::string writeObj(std::span<const Eigen::Vector3d> positions, const std::vector<Face>& faces, const PlanarMap& uv) {
    if (static_cast<long>(positions.size()) != uv.rows())
        throw Error(ErrorCode::DimensionMismatch, "one texture coordinate per vertex is required");
    const PlanarMap tex = normalizeToUnitSquare(uv);
    std::ostringstream out;
    out.precision(17);
    for (const Eigen::Vector3d& p : positions) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (long v = 0; v < tex.rows(); ++v) out << "vt " << tex(v, 0) << ' ' << tex(v, 1) << '\n';
    for (const Face& f : faces) {
        out << 'f';
        for (int v : f) out << ' ' << v + 1 << '/' << v + 1;
        out << '\n';
    }
    return out.str();
}

std::string layoutSvg(const SurfaceMesh& mesh, const PlanarMap& uv) {
    constexpr double kPixelsPerUnit = 100.0;
    constexpr double kMargin = 10.0;
    if (uv.rows() != mesh.vertexCount()) throw Error(ErrorCode::DimensionMismatch, "map does not match the mesh");
    const Eigen::RowVector2d lo = uv.colwise().minCoeff();
    const Eigen::RowVector2d hi = uv.colwise().maxCoeff();
    const double width = (hi.x() - lo.x()) * kPixelsPerUnit + 2 * kMargin;
    const double height = (hi.y() - lo.y()) * kPixelsPerUnit + 2 * kMargin;

    std::ostringstream out;
    out.precision(10);
    const auto point = [&](int v) {
        // SVG's y axis points down.
        out << (uv(v, 0) - lo.x()) * kPixelsPerUnit + kMargin << ',' << (hi.y() - uv(v, 1)) * kPixelsPerUnit + kMargin;
    };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<g fill=\"none\" stroke=\"#555\" stroke-width=\"0.5\">\n";
    for (const Face& f : mesh.faces()) {
        out << "<polyline points=\"";
        for (int c = 0; c <= 3; ++c) {
            if (c > 0) out << ' ';
            point(f[c % 3]);
        }
        out << "\"/>\n";
    }
    out << "</g>\n<g fill=\"none\" stroke=\"#000\" stroke-width=\"2\">\n";
    for (const auto& loop : mesh.boundaryLoops()) {
        out << "<polyline class=\"boundary\" points=\"";
        for (std::size_t k = 0; k <= loop.size(); ++k) {
            if (k > 0) out << ' ';
            point(loop[k % loop.size()]);
        }
        out << "\"/>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

std::vector<Cone> parseCones(std::string_view text) {
    const json doc = parseJson(text, "cone file");
    if (!doc.is_array()) throw Error(ErrorCode::ParseError, "cone file must be an array");
    std::vector<Cone> cones;
    for (const json& entry : doc) {
        if (!entry.is_object() || !entry.contains("vertexIndex") || !entry.contains("coneAngle") ||
            !entry["vertexIndex"].is_number_integer() || !entry["coneAngle"].is_number())
            throw Error(ErrorCode::ParseError, "each cone needs an integer vertexIndex and a numeric coneAngle");
        cones.push_back({entry["vertexIndex"].get<int>(), entry["coneAngle"].get<double>()});
    }
    return cones;
}

TargetCurve parseTargetCurve(std::string_view text) {
    const json doc = parseJson(text, "target curve");
    if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
        throw Error(ErrorCode::ParseError, "target curve needs a points array");
    if (doc.contains("closed") && !(doc["closed"].is_boolean() && doc["closed"].get<bool>()))
        throw Error(ErrorCode::InvalidArgument, "target curve must be closed");
    std::vector<Eigen::Vector2d> points;
    for (const json& p : doc["points"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw Error(ErrorCode::ParseError, "target curve points must be [x, y] pairs");
        points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return TargetCurve(std::move(points));
}

BoundaryDataSpec parseBoundaryData(std::string_view text) {
    const json doc = parseJson(text, "boundary data");
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "boundary data must be an object");
    static const std::pair<const char*, BoundaryDataSpec::Kind> kinds[] = {
        {"exteriorAngles", BoundaryDataSpec::Kind::ExteriorAngles},
        {"edgeDirections", BoundaryDataSpec::Kind::EdgeDirections},
        {"edgeLengths", BoundaryDataSpec::Kind::EdgeLengths},
        {"scaleFactors", BoundaryDataSpec::Kind::ScaleFactors},
        {"corners", BoundaryDataSpec::Kind::Corners},
    };
    BoundaryDataSpec spec;
    int found = 0;
    for (const auto& [key, kind] : kinds) {
        if (!doc.contains(key)) continue;
        ++found;
        spec.kind = kind;
        if (kind == BoundaryDataSpec::Kind::Corners) {
            if (!doc[key].is_array()) throw Error(ErrorCode::ParseError, "corners must be an array");
            for (const json& c : doc[key]) {
                if (!c.is_object() || !c.contains("vertexIndex") || !c.contains("angle") ||
                    !c["vertexIndex"].is_number_integer() || !c["angle"].is_number())
                    throw Error(ErrorCode::ParseError, "each corner needs an integer vertexIndex and a numeric angle");
                spec.corners.push_back({c["vertexIndex"].get<int>(), c["angle"].get<double>()});
            }
        } else {
            spec.values = numberArray(doc[key], key);
        }
    }
    if (found != 1)
        throw Error(ErrorCode::ParseError,
                    "boundary data needs exactly one of exteriorAngles, edgeDirections, edgeLengths, "
                    "scaleFactors, corners");
    return spec;
}

json toJson(const Eigen::VectorXd& values) {
    json out = json::array();
    for (long i = 0; i < values.size(); ++i) out.push_back(finiteOrNull(values[i]));
    return out;
}

json toJson(const PlanarMap& uv) {
    json out = json::array();
    for (long v = 0; v < uv.rows(); ++v) out.push_back({uv(v, 0), uv(v, 1)});
    return out;
}

json flatteningReport(const DiskMesh& mesh, const Flattening& flattening, const QualityReport& quality) {
    json report;
    report["method"] = flattening.method;
    report["extension"] = extensionKindName(flattening.boundaryData.extension);
    report["iterations"] = flattening.iterations;
    report["history"] = flattening.history;
    report["turning"] = flattening.turning;
    report["vertexCount"] = mesh.vertexCount();
    report["faceCount"] = mesh.faceCount();

    report["qAvg"] = finiteOrNull(quality.qAvg);
    report["qMax"] = finiteOrNull(quality.qMax);
    json faceQ = json::array();
    for (double q : quality.faceQ) faceQ.push_back(finiteOrNull(q));
    report["faceQ"] = std::move(faceQ);
    report["flippedFaces"] = quality.flippedFaces;
    report["flippedAreaFraction"] = quality.flippedAreaFraction;
    report["degenerateFaces"] = quality.degenerateFaces;
    report["scaleFactors"] = toJson(quality.scaleFactors);

    const BoundaryCurve& curve = flattening.curve;
    json boundary;
    boundary["vertices"] = std::vector<int>(mesh.boundary().begin(), mesh.boundary().end());
    boundary["scaleFactors"] = toJson(flattening.boundaryData.scaleFactors);
    boundary["exteriorAngles"] = toJson(flattening.boundaryData.exteriorAngles);
    boundary["targetLengths"] = toJson(curve.targetLengths);
    boundary["adjustedLengths"] = toJson(curve.adjustedLengths);
    if (curve.targetLengths.size() > 0) {
        const Eigen::ArrayXd ratio = curve.adjustedLengths.array() / curve.targetLengths.array();
        std::vector<double> sorted(ratio.data(), ratio.data() + ratio.size());
        std::sort(sorted.begin(), sorted.end());
        boundary["lengthRatio"] = {{"min", sorted.front()},
                                   {"max", sorted.back()},
                                   {"median", sorted[sorted.size() / 2]}};
    }
    report["boundary"] = std::move(boundary);
    report["uv"] = toJson(flattening.uv);
    return report;
}

} // namespace bff
