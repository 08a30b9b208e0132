#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "expert/engine.hpp"

namespace expert {

struct ApiResponse {
    int status = 200;
    /// JSON document.
    std::string body;
};

using ApiParams = std::multimap<std::string, std::string, std::less<>>;

/// The /api routes as a pure function of path and query parameters, so they
/// can be exercised without a socket. See README for the payloads.
class Api {
  public:
    explicit Api(const Engine& engine) : m_engine(engine) {}

    ApiResponse get(std::string_view path, const ApiParams& params) const;

  private:
    ApiResponse search(const ApiParams& params) const;
    ApiResponse explain(const ApiParams& params) const;
    ApiResponse strategies() const;
    ApiResponse author(std::string_view id, std::string_view view) const;

    const Engine& m_engine;
};

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    bool cors = true;
    /// Directory mounted at `/` for a built UI; ignored when empty.
    std::filesystem::path static_dir;
};

/// Blocks serving `api` over HTTP until the process is stopped.
void serve(const Api& api, const ServeOptions& options);

}  // namespace expert
