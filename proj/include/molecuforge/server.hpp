#pragma once

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace molecuforge {

/// "host:port" for TCP, "unix:<path>" or an absolute path for a Unix socket.
struct Endpoint {
    enum class Kind { tcp, unix_socket };
    Kind kind = Kind::tcp;
    std::string host = "127.0.0.1";
    int port = 7878;
    std::string path;
};

inline constexpr std::string_view kDefaultAddress = "127.0.0.1:7878";

/// Throws BadArguments for unparseable addresses.
Endpoint parse_endpoint(std::string_view address);

/// MOLECUFORGE_ADDR when set, else kDefaultAddress.
std::string default_address();

/// Runs one session over a pair of streams until EOF or "shutdown".
void serve_stream(std::istream& in, std::ostream& out, const std::filesystem::path& base_dir = {});

/// Multi-session socket server. Every connection owns a private workspace.
/// A connection that opens with an HTTP request is answered as HTTP: a
/// WebSocket upgrade carries the same protocol (one message per line), and
/// other GETs serve static files from ui_root when configured.
class Server {
public:
    struct Options {
        std::string address{kDefaultAddress};
        std::optional<std::filesystem::path> ui_root;
        std::filesystem::path base_dir;
    };

    explicit Server(Options options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts accepting. Throws BindError.
    void start();
    /// Closes the listener and every live connection, then joins workers.
    void stop();
    /// Bound TCP port (useful with port 0).
    int port() const { return port_; }

private:
    void accept_loop();
    void handle(int fd);

    Options options_;
    Endpoint endpoint_;
    int listen_fd_ = -1;
    int port_ = 0;
    std::atomic<bool> running_{false};
    std::thread acceptor_;
    std::mutex mu_;
    std::set<int> clients_;
    std::vector<std::thread> workers_;
};

}  // namespace molecuforge
