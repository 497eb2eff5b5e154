#pragma once

// Local HTTP service for interactive boundary editing. Each uploaded mesh gets
// its own session with one factorization; edits re-flatten by backsolves.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "bff_handles.h"

namespace bffcli {

// Positive integer from BFF_THREADS, or nullopt when unset. Throws on junk.
std::optional<int> threadLimit();

// Closed uniform Catmull-Rom spline through `controlPoints`, evaluated at t in [0, 1).
double catmullRom(const std::vector<double>& controlPoints, double t);

// Adds (2*pi - sum) spread in proportion to dual length, so the result sums to 2*pi.
std::vector<double> normalizeAngles(const std::vector<double>& angles, const std::vector<double>& dual);

class EditService {
public:
    EditService();
    EditService(const EditService&) = delete;
    EditService& operator=(const EditService&) = delete;

    httplib::Server& server() { return server_; }

    // Binds host:port (port 0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    void listen();
    void stop() { server_.stop(); }

private:
    struct EditSession {
        std::mutex mutex;
        Mesh mesh;
        Session session;
        Layout layout;
        std::string boundaryMode = "lengths";
        long revision = 0;
    };

    std::shared_ptr<EditSession> find(const nlohmann::json& request);
    nlohmann::json flatteningJson(int id, EditSession& s, bool withFaces) const;
    nlohmann::json boundaryJson(int id, EditSession& s) const;
    void install();

    httplib::Server server_;
    std::mutex registryMutex_;
    std::map<int, std::shared_ptr<EditSession>> sessions_;
    int nextId_ = 1;
};

} // namespace bffcli
