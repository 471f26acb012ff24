#pragma once

#include "heatshift/calibration.hpp"
#include "heatshift/dataset.hpp"
#include "heatshift/results.hpp"
#include "heatshift/simulation.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace heatshift::service {

struct Response {
    int status = 200;
    std::string body;
};

enum class RunState { Running, Completed, Failed };

std::string_view to_string(RunState s) noexcept;

/// HTTP-independent request handlers; `mount` wires them to routes. Every
/// body is JSON. Time series travel as {years: [...], values: [...]}.
class Service {
public:
    using Clock = std::chrono::steady_clock;

    Service(std::map<std::string, std::shared_ptr<const io::Dataset>> datasets,
            RunOptions defaults = {}, std::chrono::seconds session_ttl = std::chrono::hours{1});
    ~Service();

    Service(const Service &) = delete;
    Service &operator=(const Service &) = delete;

    Response list_datasets() const;
    /// Body: {"dataset": id, "gamma": "dataset" | "zero" | "auto"}.
    Response create_session(const std::string &body);
    Response session_regions(const std::string &session);
    /// Body: {"region": id}.
    Response calibrate_auto(const std::string &session, const std::string &body);
    /// Body: {"region": id, "tech": id, "gamma_cent_per_kwh": number}.
    Response update_gamma(const std::string &session, const std::string &body);
    /// Body: {"scenario": preset-id | ScenarioSpec, "options": {...}}.
    Response start_run(const std::string &session, const std::string &body);
    Response run_status(const std::string &run) const;
    /// Empty report returns the full result document.
    Response run_results(const std::string &run, const std::string &report) const;
    Response run_events(const std::string &run, std::size_t since) const;

    /// Blocks until the run leaves the running state.
    void wait(const std::string &run) const;

    void mount(httplib::Server &server);

private:
    struct Session;
    struct Run;

    std::shared_ptr<Session> session(const std::string &id);
    std::shared_ptr<Run> run(const std::string &id) const;
    std::string next_id(const char *prefix);

    std::map<std::string, std::shared_ptr<const io::Dataset>> datasets_;
    RunOptions defaults_;
    std::chrono::seconds ttl_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::map<std::string, std::shared_ptr<Run>> runs_;
    std::vector<std::thread> workers_;
    unsigned long counter_ = 0;
};

} // namespace heatshift::service
