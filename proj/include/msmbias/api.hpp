#pragma once

#include <cstddef>
#include <memory>
#include <string>

namespace msmbias::api {

struct ApiConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_draws = 100000;
  std::string static_dir;  // served under / when non-empty
  std::string cors_origin = "*";
};

// Reads MSMBIAS_HOST, MSMBIAS_PORT, MSMBIAS_MAX_DRAWS, MSMBIAS_STATIC_DIR and
// MSMBIAS_CORS_ORIGIN over the defaults.
ApiConfig config_from_env(ApiConfig base = {});

struct ApiResponse {
  int status = 200;
  std::string body;
};

// Stateless handlers; the server only routes to these.
ApiResponse handle_health();
ApiResponse handle_bias(const std::string& body);
ApiResponse handle_curve(const std::string& body);
ApiResponse handle_sensitivity(const std::string& body, const ApiConfig& config);
ApiResponse handle_invert(const std::string& body);

class Server {
 public:
  explicit Server(ApiConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the socket; port 0 picks a free port. Returns the bound port.
  int bind();
  // Blocks serving requests until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace msmbias::api
