#ifndef DTAC_SERVICE_HPP
#define DTAC_SERVICE_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "dtac/engine.hpp"
#include "dtac/oracle.hpp"

namespace httplib {
class Server;
}

namespace dtac {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

// In-memory proof sessions.  Each session serializes its own mutations;
// different sessions run independently.  With a snapshot directory, every
// state change appends `<dir>/<id>/NNNN.mdfy`.
class SessionManager {
public:
    explicit SessionManager(Library stdlib, std::optional<std::filesystem::path> snapshot_dir = std::nullopt,
                            EvalOptions opts = {});

    ApiResponse create(const nlohmann::json& body);
    ApiResponse program(const std::string& id) const;
    ApiResponse apply(const std::string& id, const nlohmann::json& body);
    ApiResponse undo(const std::string& id);
    ApiResponse history(const std::string& id) const;
    ApiResponse stdlib() const;

private:
    struct HistoryEntry {
        Program program;
        std::string invocation;
        GuardReport guard;
        Environment env;
    };
    struct Session {
        std::string id;
        mutable std::mutex mu;
        FixtureOracle oracle;
        Library lib;
        std::vector<HistoryEntry> history;
        int snapshots = 0;
    };

    Library stdlib_;
    std::optional<std::filesystem::path> snapshot_dir_;
    EvalOptions opts_;
    mutable std::shared_mutex store_mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;

    std::shared_ptr<Session> find(const std::string& id) const;
    void snapshot(Session& s) const;
    nlohmann::json state(const Session& s) const;
};

// JSON encodings shared by the CLI and the service.
nlohmann::json to_json(const GuardReport& g);
nlohmann::json to_json(const ErrorReport& e);

// Anchor name to 1-based line in the printed program.
std::map<std::string, int> anchor_lines(const std::string& printed);

// Registers the HTTP routes on `server`.
void install_routes(httplib::Server& server, SessionManager& sessions);

} // namespace dtac

#endif
