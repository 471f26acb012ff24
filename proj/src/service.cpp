#include "heatshift/service.hpp"

#include "heatshift/csv.hpp"
#include "heatshift/errors.hpp"
#include "heatshift/scenario.hpp"
#include "heatshift/units.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <condition_variable>
#include <spdlog/spdlog.h>

namespace heatshift::service {
namespace {

using nlohmann::json;

Response ok(const json &body, int status = 200) { return {status, body.dump()}; }

Response error_response(int status, const std::vector<std::string> &errors) {
    return {status, json{{"errors", errors}}.dump()};
}

template <typename Fn> Response guarded(Fn &&fn) {
    try {
        return fn();
    } catch (const ValidationError &e) {
        return error_response(400, e.violations());
    } catch (const NotFoundError &e) {
        return error_response(404, {e.what()});
    } catch (const SessionError &e) {
        return error_response(410, {e.what()});
    } catch (const ConflictError &e) {
        return error_response(409, {e.what()});
    } catch (const json::exception &e) {
        return error_response(400, {std::string{"malformed JSON: "} + e.what()});
    } catch (const std::exception &e) {
        return error_response(500, {e.what()});
    }
}

json parse_body(const std::string &body) {
    if (body.empty()) {
        return json::object();
    }
    auto j = json::parse(body);
    if (!j.is_object()) {
        throw ValidationError(std::vector<std::string>{"$: expected an object"});
    }
    return j;
}

std::string required_string(const json &j, const char *key) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw ValidationError(std::vector<std::string>{std::string{"$."} + key +
                                                       ": required string"});
    }
    return j.at(key).get<std::string>();
}

RunOptions options_from_json(const json &j, RunOptions base) {
    std::vector<std::string> errors;
    if (!j.is_object()) {
        throw ValidationError(std::vector<std::string>{"$.options: expected an object"});
    }
    for (const auto &[key, value] : j.items()) {
        const auto path = "$.options." + key;
        if (key == "start_year" && value.is_number_integer()) {
            base.sim.start_year = value.get<int>();
        } else if (key == "end_year" && value.is_number_integer()) {
            base.sim.end_year = value.get<int>();
        } else if (key == "dt" && value.is_number()) {
            base.sim.dt = value.get<double>();
        } else if (key == "scrapping" && value.is_boolean()) {
            base.sim.scrapping_enabled = value.get<bool>();
        } else if (key == "payback_mean" && value.is_number()) {
            base.behaviour.payback_years.mean = value.get<double>();
        } else if (key == "payback_sd" && value.is_number()) {
            base.behaviour.payback_years.sd = value.get<double>();
        } else if (key == "discount_rate" && value.is_number()) {
            base.behaviour.discount_rate = value.get<double>();
        } else {
            errors.push_back(path + ": unknown field or wrong type");
        }
    }
    try {
        dynamics::validate(base.sim);
    } catch (const ValidationError &e) {
        for (const auto &v : e.violations()) {
            errors.push_back("$.options: " + v);
        }
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
    return base;
}

json series_json(const std::vector<int> &years, const std::vector<double> &values) {
    return {{"years", years}, {"values", values}};
}

json projection_json(const io::Dataset &data, std::size_t region,
                     const calibration::Projection &p, const costs::GammaVector &gamma,
                     const std::vector<double> &historical_slopes) {
    const auto &rd = data.regions[region];
    json shares = json::object();
    json history = json::object();
    json gammas = json::object();
    json slopes = json::object();
    for (std::size_t k = 0; k < data.techs.size(); ++k) {
        const auto &id = data.techs[k].id;
        std::vector<double> v;
        for (const auto &row : p.shares) {
            v.push_back(row[k]);
        }
        shares[id] = series_json(p.years, v);
        history[id] = scenario::series_to_json(rd.history[k]);
        gammas[id] = {{"gamma_cent_per_kwh", gamma[k].value * units::kCentPerEuro},
                      {"provenance", std::string{costs::to_string(gamma[k].provenance)}}};
        slopes[id] = {{"simulated", p.simulated_slopes[k]},
                      {"historical", historical_slopes[k]},
                      {"residual", p.residuals[k]}};
    }
    return {{"region", rd.id},
            {"handover_year", rd.history_last_year()},
            {"projection", shares},
            {"history", history},
            {"gamma", gammas},
            {"slopes", slopes}};
}

} // namespace

std::string_view to_string(RunState s) noexcept {
    switch (s) {
    case RunState::Running: return "running";
    case RunState::Completed: return "completed";
    case RunState::Failed: return "failed";
    }
    return "failed";
}

struct Service::Session {
    std::string id;
    std::string dataset_id;
    std::shared_ptr<const io::Dataset> data;
    Clock::time_point expiry;
    std::mutex mutex;
    costs::GammaTable gammas;
    std::map<std::size_t, std::unique_ptr<calibration::CalibrationSession>> calibrations;
    std::string active_run;
};

struct Service::Run {
    std::string id;
    std::string session;
    mutable std::mutex mutex;
    mutable std::condition_variable done;
    RunState state = RunState::Running;
    std::vector<std::pair<std::string, int>> events;
    std::vector<std::string> errors;
    std::shared_ptr<const RunResult> result;
    std::string payload;
};

Service::Service(std::map<std::string, std::shared_ptr<const io::Dataset>> datasets,
                 RunOptions defaults, std::chrono::seconds session_ttl)
    : datasets_{std::move(datasets)}, defaults_{std::move(defaults)}, ttl_{session_ttl} {}

Service::~Service() {
    for (auto &w : workers_) {
        if (w.joinable()) {
            w.join();
        }
    }
}

std::string Service::next_id(const char *prefix) {
    return std::string{prefix} + "-" + std::to_string(++counter_);
}

std::shared_ptr<Service::Session> Service::session(const std::string &id) {
    std::lock_guard lock{mutex_};
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        throw NotFoundError("unknown session '" + id + "'");
    }
    const auto now = Clock::now();
    if (now > it->second->expiry) {
        sessions_.erase(it);
        throw SessionError("session '" + id + "' has expired");
    }
    it->second->expiry = now + ttl_;
    return it->second;
}

std::shared_ptr<Service::Run> Service::run(const std::string &id) const {
    std::lock_guard lock{mutex_};
    const auto it = runs_.find(id);
    if (it == runs_.end()) {
        throw NotFoundError("unknown run '" + id + "'");
    }
    return it->second;
}

Response Service::list_datasets() const {
    return guarded([&] {
        json out = json::array();
        for (const auto &[id, data] : datasets_) {
            out.push_back({{"id", id},
                           {"name", data->name},
                           {"hash", data->content_hash},
                           {"regions", data->region_ids()},
                           {"has_gamma", data->gammas.has_value()}});
        }
        return ok({{"datasets", out}});
    });
}

Response Service::create_session(const std::string &body) {
    return guarded([&] {
        const auto j = parse_body(body);
        const auto dataset_id = required_string(j, "dataset");
        const auto it = datasets_.find(dataset_id);
        if (it == datasets_.end()) {
            throw NotFoundError("unknown dataset '" + dataset_id + "'");
        }
        const auto &data = *it->second;
        std::string mode = j.value("gamma", data.gammas ? "dataset" : "zero");

        auto s = std::make_shared<Session>();
        s->dataset_id = dataset_id;
        s->data = it->second;
        if (mode == "dataset") {
            s->gammas = require_gammas(data);
        } else if (mode == "zero" || mode == "auto") {
            for (std::size_t g = 0; g < data.regions.size(); ++g) {
                s->gammas[data.regions[g].id] = costs::GammaVector(data.techs.size());
                if (mode == "auto") {
                    s->gammas[data.regions[g].id] =
                        calibration::auto_calibrate(data, g, defaults_).gamma;
                }
            }
        } else {
            throw ValidationError(std::vector<std::string>{
                "$.gamma: expected 'dataset', 'zero' or 'auto'"});
        }
        {
            std::lock_guard lock{mutex_};
            s->id = next_id("session");
            s->expiry = Clock::now() + ttl_;
            sessions_[s->id] = s;
        }
        return ok({{"session", s->id},
                   {"dataset", dataset_id},
                   {"gamma", mode},
                   {"expires_in_s", ttl_.count()}},
                  201);
    });
}

Response Service::session_regions(const std::string &id) {
    return guarded([&] {
        auto s = session(id);
        std::lock_guard lock{s->mutex};
        const auto &data = *s->data;
        json regions = json::array();
        for (const auto &rd : data.regions) {
            json gamma = json::object();
            const auto &vec = s->gammas.at(rd.id);
            for (std::size_t k = 0; k < data.techs.size(); ++k) {
                gamma[data.techs[k].id] = vec[k].value * units::kCentPerEuro;
            }
            regions.push_back({{"id", rd.id},
                               {"kick_start_eligible", rd.kick_start_eligible},
                               {"district_present", rd.district_present(data.techs)},
                               {"history_years", {rd.history_first_year(), rd.history_last_year()}},
                               {"gamma_cent_per_kwh", gamma}});
        }
        json techs = json::array();
        for (const auto &t : data.techs) {
            techs.push_back({{"id", t.id}, {"class", std::string{to_string(t.tech_class)}}});
        }
        return ok({{"session", id}, {"regions", regions}, {"technologies", techs}});
    });
}

namespace {

calibration::CalibrationSession &
calibration_for(std::map<std::size_t, std::unique_ptr<calibration::CalibrationSession>> &cals,
                const std::shared_ptr<const io::Dataset> &data, std::size_t region,
                const costs::GammaVector &gamma, const RunOptions &options) {
    auto &slot = cals[region];
    if (!slot) {
        slot = std::make_unique<calibration::CalibrationSession>(data, region, gamma, options);
    }
    return *slot;
}

} // namespace

Response Service::calibrate_auto(const std::string &id, const std::string &body) {
    return guarded([&] {
        auto s = session(id);
        const auto j = parse_body(body);
        const auto region_id = required_string(j, "region");
        std::lock_guard lock{s->mutex};
        const auto region = s->data->region_index(region_id);
        auto &cal = calibration_for(s->calibrations, s->data, region, s->gammas.at(region_id),
                                    defaults_);
        const auto result = cal.auto_calibrate();
        s->gammas[region_id] = cal.gamma();
        auto payload = projection_json(*s->data, region, cal.projection(), cal.gamma(),
                                       cal.historical_slopes());
        payload["converged"] = result.diagnostics.converged;
        payload["iterations"] = result.diagnostics.iterations;
        payload["max_abs_residual"] = result.diagnostics.max_abs_residual;
        payload["gauge_tech"] = s->data->techs[result.gauge_tech].id;
        return ok(payload);
    });
}

Response Service::update_gamma(const std::string &id, const std::string &body) {
    return guarded([&] {
        auto s = session(id);
        const auto j = parse_body(body);
        const auto region_id = required_string(j, "region");
        const auto tech_id = required_string(j, "tech");
        if (!j.contains("gamma_cent_per_kwh") || !j.at("gamma_cent_per_kwh").is_number()) {
            throw ValidationError(
                std::vector<std::string>{"$.gamma_cent_per_kwh: required number"});
        }
        const double cents = j.at("gamma_cent_per_kwh").get<double>();
        std::lock_guard lock{s->mutex};
        const auto region = s->data->region_index(region_id);
        const auto tech = s->data->tech_index(tech_id);
        auto &cal = calibration_for(s->calibrations, s->data, region, s->gammas.at(region_id),
                                    defaults_);
        const auto projection = cal.apply_gamma_override(tech, cents / units::kCentPerEuro);
        s->gammas[region_id] = cal.gamma();
        return ok(projection_json(*s->data, region, projection, cal.gamma(),
                                  cal.historical_slopes()));
    });
}

Response Service::start_run(const std::string &id, const std::string &body) {
    return guarded([&] {
        auto s = session(id);
        const auto j = parse_body(body);
        if (!j.contains("scenario")) {
            throw ValidationError(std::vector<std::string>{"$.scenario: required"});
        }
        scenario::ScenarioSpec spec;
        const auto &sj = j.at("scenario");
        if (sj.is_string()) {
            spec = scenario::preset_scenario(sj.get<std::string>());
        } else {
            try {
                spec = scenario::scenario_from_json(sj);
            } catch (const ValidationError &e) {
                std::vector<std::string> errors;
                for (const auto &v : e.violations()) {
                    errors.push_back(v.rfind("$", 0) == 0 ? "$.scenario" + v.substr(1) : v);
                }
                throw ValidationError(std::move(errors));
            }
        }
        const auto options =
            j.contains("options") ? options_from_json(j.at("options"), defaults_) : defaults_;

        auto r = std::make_shared<Run>();
        costs::GammaTable gammas;
        std::shared_ptr<const io::Dataset> data;
        {
            std::lock_guard session_lock{s->mutex};
            if (!s->active_run.empty()) {
                const auto active = run(s->active_run);
                std::lock_guard run_lock{active->mutex};
                if (active->state == RunState::Running) {
                    throw ConflictError("session '" + id + "' already has a run in flight");
                }
            }
            gammas = s->gammas;
            data = s->data;
            std::lock_guard lock{mutex_};
            r->id = next_id("run");
            r->session = id;
            runs_[r->id] = r;
            s->active_run = r->id;
        }
        std::lock_guard lock{mutex_};
        workers_.emplace_back([r, data, spec, options, gammas] {
            try {
                auto result = simulate_run(*data, spec, options, gammas,
                                           [&](const std::string &region, int year) {
                                               std::lock_guard g{r->mutex};
                                               r->events.emplace_back(region, year);
                                           });
                auto payload = serialize(result);
                std::lock_guard g{r->mutex};
                r->result = std::make_shared<const RunResult>(std::move(result));
                r->payload = std::move(payload);
                r->state = RunState::Completed;
            } catch (const ValidationError &e) {
                std::lock_guard g{r->mutex};
                r->errors = e.violations();
                r->state = RunState::Failed;
            } catch (const std::exception &e) {
                std::lock_guard g{r->mutex};
                r->errors = {e.what()};
                r->state = RunState::Failed;
            }
            spdlog::info("run {} finished: {}", r->id, to_string(r->state));
            r->done.notify_all();
        });
        return ok({{"run", r->id}, {"status", "running"}}, 202);
    });
}

Response Service::run_status(const std::string &id) const {
    return guarded([&] {
        auto r = run(id);
        std::lock_guard lock{r->mutex};
        json out{{"run", id}, {"status", std::string{to_string(r->state)}},
                 {"events", r->events.size()}};
        if (!r->events.empty()) {
            out["last_event"] = {{"region", r->events.back().first},
                                 {"year", r->events.back().second}};
        }
        if (!r->errors.empty()) {
            out["errors"] = r->errors;
        }
        return ok(out);
    });
}

Response Service::run_events(const std::string &id, std::size_t since) const {
    return guarded([&] {
        auto r = run(id);
        std::lock_guard lock{r->mutex};
        json events = json::array();
        for (std::size_t k = since; k < r->events.size(); ++k) {
            events.push_back({{"region", r->events[k].first}, {"year", r->events[k].second}});
        }
        return ok({{"run", id},
                   {"status", std::string{to_string(r->state)}},
                   {"next", r->events.size()},
                   {"events", events}});
    });
}

Response Service::run_results(const std::string &id, const std::string &report) const {
    return guarded([&] {
        auto r = run(id);
        std::lock_guard lock{r->mutex};
        if (r->state == RunState::Running) {
            return error_response(409, {"run '" + id + "' is still running"});
        }
        if (r->state == RunState::Failed) {
            return error_response(422, r->errors);
        }
        if (report.empty()) {
            return Response{200, r->payload};
        }
        return ok(report_json(*r->result, report));
    });
}

void Service::wait(const std::string &id) const {
    auto r = run(id);
    std::unique_lock lock{r->mutex};
    r->done.wait(lock, [&] { return r->state != RunState::Running; });
}

void Service::mount(httplib::Server &server) {
    auto reply = [](httplib::Response &res, const Response &out) {
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    auto body_with_query = [](const httplib::Request &req) {
        json j = req.body.empty() ? json::object() : json::parse(req.body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            return req.body;
        }
        for (const auto &[key, value] : req.params) {
            if (!j.contains(key)) {
                j[key] = value;
            }
        }
        return j.dump();
    };
    server.Get("/datasets", [this, reply](const httplib::Request &, httplib::Response &res) {
        reply(res, list_datasets());
    });
    server.Post("/sessions", [this, reply, body_with_query](const httplib::Request &req,
                                                            httplib::Response &res) {
        reply(res, create_session(body_with_query(req)));
    });
    server.Get(R"(/sessions/([^/]+)/regions)",
               [this, reply](const httplib::Request &req, httplib::Response &res) {
                   reply(res, session_regions(req.matches[1]));
               });
    server.Post(R"(/sessions/([^/]+)/calibrate/auto)",
                [this, reply, body_with_query](const httplib::Request &req,
                                               httplib::Response &res) {
                    reply(res, calibrate_auto(req.matches[1], body_with_query(req)));
                });
    server.Put(R"(/sessions/([^/]+)/gamma)",
               [this, reply](const httplib::Request &req, httplib::Response &res) {
                   reply(res, update_gamma(req.matches[1], req.body));
               });
    server.Post(R"(/sessions/([^/]+)/runs)",
                [this, reply](const httplib::Request &req, httplib::Response &res) {
                    reply(res, start_run(req.matches[1], req.body));
                });
    server.Get(R"(/runs/([^/]+)/status)",
               [this, reply](const httplib::Request &req, httplib::Response &res) {
                   reply(res, run_status(req.matches[1]));
               });
    server.Get(R"(/runs/([^/]+)/events)",
               [this, reply](const httplib::Request &req, httplib::Response &res) {
                   std::size_t since = 0;
                   if (req.has_param("since")) {
                       const auto text = req.get_param_value("since");
                       const auto parsed = csv::parse_int(text);
                       if (!parsed || *parsed < 0) {
                           reply(res, error_response(400, {"since: expected a non-negative integer"}));
                           return;
                       }
                       since = static_cast<std::size_t>(*parsed);
                   }
                   reply(res, run_events(req.matches[1], since));
               });
    server.Get(R"(/runs/([^/]+)/results)",
               [this, reply](const httplib::Request &req, httplib::Response &res) {
                   const auto report =
                       req.has_param("report") ? req.get_param_value("report") : std::string{};
                   reply(res, run_results(req.matches[1], report));
               });
}

} // namespace heatshift::service
