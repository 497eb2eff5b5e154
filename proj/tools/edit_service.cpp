#include "edit_service.h"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>

namespace bffcli {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleSumTolerance = 1e-9;

// Non-API failures that map to a specific HTTP status.
struct HttpError {
    int status;
    json body;
};

int httpStatus(bff_status status) {
    switch (status) {
    case BFF_ERR_IO:
    case BFF_ERR_INTERNAL: return 500;
    default: return 400;
    }
}

template <class Handler>
void respond(httplib::Response& res, Handler&& handler) {
    try {
        const json body = handler();
        res.status = 200;
        res.set_content(body.dump(), "application/json");
    } catch (const HttpError& e) {
        res.status = e.status;
        res.set_content(e.body.dump(), "application/json");
    } catch (const ApiError& e) {
        res.status = httpStatus(e.status());
        res.set_content(errorJson(e).dump(), "application/json");
    } catch (const json::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", "ParseError"}, {"message", e.what()}}.dump(), "application/json");
    } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(json{{"error", "Internal"}, {"message", e.what()}}.dump(), "application/json");
    }
}

json parseBody(const httplib::Request& req) {
    json body = json::parse(req.body);
    if (!body.is_object()) invalid("request body must be a JSON object");
    return body;
}

bff_extension extensionFrom(const json& request, bff_extension fallback) {
    if (!request.contains("extension")) return fallback;
    const std::string name = request["extension"].get<std::string>();
    if (name == "holomorphic") return BFF_EXTENSION_HOLOMORPHIC;
    if (name == "harmonic") return BFF_EXTENSION_HARMONIC;
    invalid("extension must be holomorphic or harmonic");
}

std::vector<double> numbers(const json& array, const char* what) {
    if (!array.is_array()) invalid(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const json& x : array) {
        if (!x.is_number()) invalid(std::string(what) + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// Samples a closed spline at each boundary vertex, parameterized by arc length.
// Several samples per vertex are averaged over the vertex's dual cell.
std::vector<double> sampleSpline(const json& spline, const std::vector<double>& edgeLength) {
    if (!spline.is_object() || !spline.contains("controlPoints")) invalid("spline needs controlPoints");
    const std::vector<double> control = numbers(spline["controlPoints"], "controlPoints");
    if (control.size() < 4) invalid("a closed spline needs at least four control points");
    const int samples = spline.value("samplesPerVertex", 1);
    if (samples < 1) invalid("samplesPerVertex must be positive");

    const std::size_t n = edgeLength.size();
    const double total = std::accumulate(edgeLength.begin(), edgeLength.end(), 0.0);
    std::vector<double> out(n);
    double position = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double before = edgeLength[(i + n - 1) % n] / (2.0 * total);
        const double after = edgeLength[i] / (2.0 * total);
        double sum = 0.0;
        for (int k = 0; k < samples; ++k) {
            const double offset = -1.0 + (2.0 * k + 1.0) / samples;
            const double t = position / total + offset * (offset < 0.0 ? before : after);
            sum += catmullRom(control, t - std::floor(t));
        }
        out[i] = sum / samples;
        position += edgeLength[i];
    }
    return out;
}

json toJson(const std::vector<double>& values) {
    json out = json::array();
    for (double x : values) out.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    return out;
}

int meshIdFrom(const httplib::Request& req) {
    if (!req.has_param("meshId")) invalid("meshId query parameter is required");
    try {
        return std::stoi(req.get_param_value("meshId"));
    } catch (const std::exception&) {
        invalid("meshId must be an integer");
    }
}

} // namespace

std::optional<int> threadLimit() {
    const char* text = std::getenv("BFF_THREADS");
    if (!text || !*text) return std::nullopt;
    char* end = nullptr;
    const long value = std::strtol(text, &end, 10);
    if (*end != '\0' || value < 1 || value > 1024) invalid("BFF_THREADS must be a positive integer");
    return static_cast<int>(value);
}

double catmullRom(const std::vector<double>& c, double t) {
    const int m = static_cast<int>(c.size());
    const double x = t * m;
    const int j = static_cast<int>(std::floor(x));
    const double f = x - j;
    auto at = [&](int k) { return c[((k % m) + m) % m]; };
    const double p0 = at(j - 1), p1 = at(j), p2 = at(j + 1), p3 = at(j + 2);
    return 0.5 * (2.0 * p1 + (p2 - p0) * f + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f * f +
                  (3.0 * p1 - p0 - 3.0 * p2 + p3) * f * f * f);
}

std::vector<double> normalizeAngles(const std::vector<double>& angles, const std::vector<double>& dual) {
    const double sum = std::accumulate(angles.begin(), angles.end(), 0.0);
    const double length = std::accumulate(dual.begin(), dual.end(), 0.0);
    std::vector<double> out(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) out[i] = angles[i] + (kTwoPi - sum) * dual[i] / length;
    return out;
}

EditService::EditService() {
    if (const std::optional<int> threads = threadLimit()) {
        const int n = *threads;
        server_.new_task_queue = [n] { return new httplib::ThreadPool(static_cast<std::size_t>(n)); };
    }
    install();
}

int EditService::bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
}

void EditService::listen() { server_.listen_after_bind(); }

std::shared_ptr<EditService::EditSession> EditService::find(const json& request) {
    if (!request.contains("meshId") || !request["meshId"].is_number_integer()) invalid("meshId is required");
    const int id = request["meshId"].get<int>();
    std::lock_guard lock(registryMutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end())
        throw HttpError{404, {{"error", "UnknownMesh"}, {"message", "no mesh with id " + std::to_string(id)}}};
    return it->second;
}

json EditService::flatteningJson(int id, EditSession& s, bool withFaces) const {
    const bff_layout* layout = s.layout.get();
    const std::vector<double> coords = uv(layout);
    json points = json::array();
    for (std::size_t v = 0; v < coords.size() / 2; ++v) points.push_back({coords[2 * v], coords[2 * v + 1]});
    double qAvg = 0.0, qMax = 0.0;
    int flipped = 0;
    check(bff_layout_quality(layout, &qAvg, &qMax, &flipped));
    const BoundaryData data = boundaryData(layout);

    json out = {{"meshId", id},
                {"revision", s.revision},
                {"iterations", bff_layout_iterations(layout)},
                {"uv", std::move(points)},
                {"quality", {{"qAvg", qAvg}, {"qMax", qMax}, {"flippedFaces", flipped}}},
                {"boundary", {{"scaleFactors", toJson(data.scaleFactors)}, {"exteriorAngles", toJson(data.exteriorAngles)}}}};
    if (withFaces) {
        const std::vector<int> f = faces(layout);
        json list = json::array();
        for (std::size_t i = 0; i < f.size(); i += 3) list.push_back({f[i], f[i + 1], f[i + 2]});
        out["faces"] = std::move(list);
        out["vertexCount"] = bff_layout_vertex_count(layout);
        out["faceCount"] = bff_layout_face_count(layout);
        out["boundaryVertexCount"] = bff_session_boundary_count(s.session.get());
    }
    return out;
}

json EditService::boundaryJson(int id, EditSession& s) const {
    const BoundaryData data = boundaryData(s.layout.get());
    json out = {{"meshId", id},
                {"revision", s.revision},
                {"mode", s.boundaryMode},
                {"vertices", boundaryVertices(s.session.get())},
                {"k", toJson(boundaryCurvature(s.session.get()))},
                {"kTilde", toJson(data.exteriorAngles)},
                {"u", toJson(data.scaleFactors)},
                {"dualLengths", toJson(dualLengths(s.session.get()))}};
    return out;
}

void EditService::install() {
    server_.Post("/mesh", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            std::string obj = req.body;
            if (req.get_header_value("Content-Type").starts_with("application/json")) {
                const json body = parseBody(req);
                if (!body.contains("obj") || !body["obj"].is_string()) invalid("obj must be a string");
                obj = body["obj"].get<std::string>();
            }
            auto s = std::make_shared<EditSession>();
            s->mesh = loadObjString(obj);
            s->session = openSession(s->mesh.get());
            s->layout = makeLayout(bff_session_flatten_auto, s->session.get(), BFF_EXTENSION_HOLOMORPHIC);
            int id = 0;
            {
                std::lock_guard lock(registryMutex_);
                id = nextId_++;
                sessions_[id] = s;
            }
            std::lock_guard lock(s->mutex);
            return flatteningJson(id, *s, true);
        });
    });

    server_.Get("/boundary", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            const int id = meshIdFrom(req);
            const auto s = find(json{{"meshId", id}});
            std::lock_guard lock(s->mutex);
            return boundaryJson(id, *s);
        });
    });

    server_.Post("/boundary", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            const json request = parseBody(req);
            const auto s = find(request);
            std::lock_guard lock(s->mutex);
            if (request.contains("revision") && request["revision"].get<long>() != s->revision)
                throw HttpError{409, {{"error", "StaleRevision"},
                                      {"message", "revision " + request["revision"].dump() + " is stale"},
                                      {"revision", s->revision}}};

            const std::string mode = request.value("mode", "");
            if (mode != "angles" && mode != "lengths") invalid("mode must be angles or lengths");
            const bff_extension extension = extensionFrom(request, BFF_EXTENSION_HOLOMORPHIC);
            bff_session* session = s->session.get();
            const std::vector<double> dual = dualLengths(session);
            const std::size_t n = dual.size();

            std::vector<double> values;
            if (request.contains("values") && request.contains("spline")) invalid("give values or spline, not both");
            if (request.contains("values")) {
                values = numbers(request["values"], "values");
            } else if (request.contains("spline")) {
                values = sampleSpline(request["spline"], edgeLengths(session));
                if (mode == "angles") {
                    for (std::size_t i = 0; i < n; ++i) values[i] *= dual[i];
                    values = normalizeAngles(values, dual);
                }
            } else {
                // No new data: re-express the current boundary data in the requested mode.
                const BoundaryData data = boundaryData(s->layout.get());
                values = mode == "angles" ? data.exteriorAngles : data.scaleFactors;
            }
            if (values.size() != n)
                throw ApiError(BFF_ERR_DIMENSION_MISMATCH, "expected " + std::to_string(n) + " boundary values, got " +
                                                               std::to_string(values.size()));

            Layout next;
            if (mode == "angles") {
                const double sum = std::accumulate(values.begin(), values.end(), 0.0);
                if (!(std::abs(sum - kTwoPi) <= kAngleSumTolerance))
                    throw HttpError{400, {{"error", "AngleSumViolation"},
                                          {"message", "exterior angles must sum to 2*pi"},
                                          {"sum", sum},
                                          {"suggestion", toJson(normalizeAngles(values, dual))}}};
                next = makeLayout(bff_session_flatten_angles, session, values.data(), static_cast<int>(n), extension);
            } else {
                next = makeLayout(bff_session_flatten_scale_factors, session, values.data(), static_cast<int>(n),
                                  extension);
            }
            s->layout = std::move(next);
            s->boundaryMode = mode;
            ++s->revision;
            return flatteningJson(request["meshId"].get<int>(), *s, false);
        });
    });

    server_.Post("/mode", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            const json request = parseBody(req);
            const auto s = find(request);
            std::lock_guard lock(s->mutex);
            if (request.contains("revision") && request["revision"].get<long>() != s->revision)
                throw HttpError{409, {{"error", "StaleRevision"},
                                      {"message", "revision " + request["revision"].dump() + " is stale"},
                                      {"revision", s->revision}}};

            const std::string mode = request.value("mode", "");
            bff_session* session = s->session.get();
            const int maxIterations = request.value("maxIterations", 0);
            const double tolerance = request.value("tolerance", 0.0);
            Layout next;
            if (mode == "auto") {
                next = makeLayout(bff_session_flatten_auto, session, extensionFrom(request, BFF_EXTENSION_HOLOMORPHIC));
            } else if (mode == "disk") {
                next = makeLayout(bff_session_flatten_disk, session, maxIterations, tolerance);
            } else if (mode == "curve") {
                if (!request.contains("targetCurve") || !request["targetCurve"].contains("points"))
                    invalid("curve mode needs targetCurve.points");
                std::vector<double> xy;
                for (const json& p : request["targetCurve"]["points"]) {
                    if (!p.is_array() || p.size() != 2) invalid("points must be [x, y] pairs");
                    xy.push_back(p[0].get<double>());
                    xy.push_back(p[1].get<double>());
                }
                next = makeLayout(bff_session_flatten_curve, session, xy.data(), static_cast<int>(xy.size() / 2),
                                  maxIterations, tolerance, extensionFrom(request, BFF_EXTENSION_HARMONIC));
            } else if (mode == "sharp") {
                std::vector<int> vertices;
                std::vector<double> angles;
                for (const json& c : request.value("corners", json::array())) {
                    vertices.push_back(c.at("vertexIndex").get<int>());
                    angles.push_back(c.at("angle").get<double>());
                }
                next = makeLayout(bff_session_flatten_sharp, session, vertices.data(), angles.data(),
                                  static_cast<int>(vertices.size()), extensionFrom(request, BFF_EXTENSION_HARMONIC));
            } else if (mode == "cones") {
                invalid("cone flattening cuts the mesh and needs a new factorization; use the command line");
            } else {
                invalid("mode must be auto, disk, curve or sharp");
            }
            s->layout = std::move(next);
            ++s->revision;
            return flatteningJson(request["meshId"].get<int>(), *s, false);
        });
    });

    server_.Get("/stats", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            json out = {{"processFactorizations", bff_factorization_count()}};
            {
                std::lock_guard lock(registryMutex_);
                out["sessions"] = sessions_.size();
            }
            if (!req.has_param("meshId")) return out;
            const int id = meshIdFrom(req);
            const auto s = find(json{{"meshId", id}});
            std::lock_guard lock(s->mutex);
            bff_stats stats{};
            check(bff_session_stats(s->session.get(), &stats));
            out["meshId"] = id;
            out["revision"] = s->revision;
            out["factorizations"] = stats.factorizations;
            out["fullSolves"] = stats.full_solves;
            out["interiorSolves"] = stats.interior_solves;
            out["flattenings"] = stats.flattenings;
            return out;
        });
    });
}

} // namespace bffcli
