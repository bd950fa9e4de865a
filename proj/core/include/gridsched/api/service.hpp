#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace gridsched::api {

inline constexpr std::size_t kMaxRequestBytes = 5 * 1024 * 1024;

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Routes one request. Pure: equal inputs give equal responses, and no state survives the call.
///
///   POST /api/validate   body: dag                              -> {ok, errors}
///   POST /api/schedule   body: {dag, resources, options}        -> {ok, plan}
///   POST /api/simulate   body: {dag, resources, options}        -> {ok, result}
///   GET  /api/algorithms                                        -> {algorithms, orders}
///
/// `dag` and `resources` may be file envelopes or bare bodies. `options` is optional:
/// {"algorithm": "min-min", "order": "fastest" | "cheapest"}.
/// Status codes: 400 malformed, 404 unknown path, 405 wrong method, 413 too large,
/// 422 invalid dag or resources, 500 plan/simulation mismatch.
Response handle(std::string_view method, std::string_view path, std::string_view body);

struct ServerOptions {
    std::string host = "0.0.0.0";
    int port = 8080;  // 0 picks a free port
    std::optional<std::filesystem::path> static_dir;
};

/// HTTP/1.1 front end for handle(), plus static files mounted at "/".
class Server {
public:
    explicit Server(ServerOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the socket and returns the bound port. Throws std::runtime_error on failure.
    int bind();
    /// Serves until stop(). Binds first if bind() was not called.
    void run();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace gridsched::api
