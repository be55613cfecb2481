#include "msmbias/api.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "msmbias/json_io.hpp"

#include <httplib.h>

namespace msmbias::api {

namespace {

using io::json;

constexpr int kUnprocessable = 422;

ApiResponse ok(const json& j) { return {200, j.dump()}; }

ApiResponse failure(int status, ErrorCode code, const std::string& message) {
  return {status, io::error_response(code, message).dump()};
}

// Parses the body and maps errors onto the status taxonomy: malformed
// requests are 400, domain errors 422.
template <class Fn>
ApiResponse guarded(const std::string& body, Fn&& fn) {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::parse_error& e) {
    return failure(400, ErrorCode::parse, std::string("malformed JSON: ") + e.what());
  }
  try {
    return ok(fn(request));
  } catch (const DomainError& e) {
    const int status = e.code() == ErrorCode::parse ? 400 : kUnprocessable;
    return failure(status, e.code(), e.what());
  } catch (const json::exception& e) {
    return failure(400, ErrorCode::parse, e.what());
  }
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

}  // namespace

ApiConfig config_from_env(ApiConfig base) {
  base.host = env_or("MSMBIAS_HOST", base.host);
  base.static_dir = env_or("MSMBIAS_STATIC_DIR", base.static_dir);
  base.cors_origin = env_or("MSMBIAS_CORS_ORIGIN", base.cors_origin);
  if (const char* v = std::getenv("MSMBIAS_PORT")) base.port = std::stoi(v);
  if (const char* v = std::getenv("MSMBIAS_MAX_DRAWS")) base.max_draws = std::stoul(v);
  return base;
}

ApiResponse handle_health() {
  return ok({{"schema_version", io::kSchemaVersion}, {"status", "ok"}});
}

ApiResponse handle_bias(const std::string& body) {
  return guarded(body, [](const json& j) {
    return io::bias_response(io::latent_params_from_json(j));
  });
}

ApiResponse handle_curve(const std::string& body) {
  return guarded(body, [](const json& j) {
    return io::curve_response(io::curve_request_from_json(j));
  });
}

ApiResponse handle_sensitivity(const std::string& body, const ApiConfig& config) {
  return guarded(body, [&](const json& j) {
    SensitivityConfig cfg = io::sensitivity_config_from_json(j);
    if (static_cast<std::size_t>(std::max(cfg.draws, 0)) > config.max_draws) {
      throw DomainError(ErrorCode::invalid_parameter,
                        "draws exceeds the per-request cap of " +
                            std::to_string(config.max_draws));
    }
    return io::sensitivity_response(cfg, run_sensitivity(cfg));
  });
}

ApiResponse handle_invert(const std::string& body) {
  return guarded(body, [](const json& j) {
    return io::invert_response(io::invert_request_from_json(j));
  });
}

struct Server::Impl {
  ApiConfig config;
  httplib::Server http;
  int port = -1;
};

Server::Server(ApiConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  auto& http = impl_->http;
  const ApiConfig& cfg = impl_->config;

  http.set_post_routing_handler([&cfg](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", cfg.cors_origin);
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
  });
  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  http.Get("/health", [reply](const httplib::Request&, httplib::Response& res) {
    reply(res, handle_health());
  });
  http.Post("/api/bias", [reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_bias(req.body));
  });
  http.Post("/api/curve", [reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_curve(req.body));
  });
  http.Post("/api/sensitivity", [reply, &cfg](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_sensitivity(req.body, cfg));
  });
  http.Post("/api/invert", [reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_invert(req.body));
  });
  if (!cfg.static_dir.empty() && !http.set_mount_point("/", cfg.static_dir)) {
    throw std::runtime_error("static directory '" + cfg.static_dir + "' does not exist");
  }
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& i = *impl_;
  if (i.config.port == 0) {
    i.port = i.http.bind_to_any_port(i.config.host);
  } else {
    i.port = i.http.bind_to_port(i.config.host, i.config.port) ? i.config.port : -1;
  }
  if (i.port < 0) {
    throw std::runtime_error("cannot bind " + i.config.host + ":" +
                             std::to_string(i.config.port));
  }
  return i.port;
}

void Server::listen() {
  if (impl_->port < 0) bind();
  impl_->http.listen_after_bind();
}

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace msmbias::api
