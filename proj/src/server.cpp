#include "molecuforge/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <openssl/evp.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <sys/un.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>

#include "molecuforge/error.hpp"
#include "molecuforge/persistence.hpp"
#include "molecuforge/session.hpp"

namespace molecuforge {

namespace {

constexpr std::string_view kWebSocketGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";

/// Buffered reader/writer over a connected socket.
class Connection {
public:
    explicit Connection(int fd) : fd_(fd) {}

    bool fill() {
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n <= 0) return false;
        buf_.append(chunk, static_cast<std::size_t>(n));
        return true;
    }

    bool read_line(std::string& line) {
        for (;;) {
            if (auto pos = buf_.find('\n'); pos != std::string::npos) {
                line = buf_.substr(0, pos);
                buf_.erase(0, pos + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return true;
            }
            if (!fill()) return false;
        }
    }

    bool read_exact(std::size_t n, std::string& out) {
        while (buf_.size() < n) {
            if (!fill()) return false;
        }
        out = buf_.substr(0, n);
        buf_.erase(0, n);
        return true;
    }

    /// Waits until the buffer holds `n` bytes (or the peer closes).
    const std::string& peek(std::size_t n) {
        while (buf_.size() < n && buf_.find('\n') == std::string::npos) {
            if (!fill()) break;
        }
        return buf_;
    }

    bool write_all(std::string_view data) {
        while (!data.empty()) {
            const ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
            if (n <= 0) return false;
            data.remove_prefix(static_cast<std::size_t>(n));
        }
        return true;
    }

private:
    int fd_;
    std::string buf_;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::string websocket_accept(const std::string& key) {
    const std::string input = key + std::string(kWebSocketGuid);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(input.data(), input.size(), digest, &len, EVP_sha1(), nullptr);
    std::array<unsigned char, 64> out{};
    const int n = EVP_EncodeBlock(out.data(), digest, static_cast<int>(len));
    return std::string(reinterpret_cast<const char*>(out.data()), static_cast<std::size_t>(n));
}

std::string ws_frame(std::uint8_t opcode, std::string_view payload) {
    std::string f;
    f.push_back(static_cast<char>(0x80 | opcode));
    const std::size_t n = payload.size();
    if (n < 126) {
        f.push_back(static_cast<char>(n));
    } else if (n <= 0xFFFF) {
        f.push_back(static_cast<char>(126));
        f.push_back(static_cast<char>((n >> 8) & 0xFF));
        f.push_back(static_cast<char>(n & 0xFF));
    } else {
        f.push_back(static_cast<char>(127));
        for (int i = 7; i >= 0; --i) f.push_back(static_cast<char>((static_cast<std::uint64_t>(n) >> (8 * i)) & 0xFF));
    }
    f.append(payload);
    return f;
}

/// Reads one client frame. Returns false on disconnect or protocol error.
bool read_ws_frame(Connection& conn, std::uint8_t& opcode, bool& fin, std::string& payload) {
    std::string head;
    if (!conn.read_exact(2, head)) return false;
    const auto b0 = static_cast<unsigned char>(head[0]);
    const auto b1 = static_cast<unsigned char>(head[1]);
    fin = (b0 & 0x80) != 0;
    opcode = b0 & 0x0F;
    const bool masked = (b1 & 0x80) != 0;
    std::uint64_t len = b1 & 0x7F;
    std::string ext;
    if (len == 126) {
        if (!conn.read_exact(2, ext)) return false;
        len = (static_cast<unsigned char>(ext[0]) << 8) | static_cast<unsigned char>(ext[1]);
    } else if (len == 127) {
        if (!conn.read_exact(8, ext)) return false;
        len = 0;
        for (char c : ext) len = (len << 8) | static_cast<unsigned char>(c);
    }
    if (len > (64u << 20)) return false;
    std::string mask;
    if (masked && !conn.read_exact(4, mask)) return false;
    if (!conn.read_exact(static_cast<std::size_t>(len), payload)) return false;
    if (masked) {
        for (std::size_t i = 0; i < payload.size(); ++i) payload[i] = static_cast<char>(payload[i] ^ mask[i % 4]);
    }
    return true;
}

/// Executes one request line; returns the outgoing lines in send order.
std::vector<std::string> run_line(Session& session, std::string_view line, bool& close) {
    Outcome outcome = session.execute_line(line);
    std::vector<std::string> out{to_line(outcome.response)};
    for (const auto& e : outcome.events) out.push_back(to_line(e));
    close = outcome.close;
    return out;
}

void serve_lines(Connection& conn, const std::filesystem::path& base_dir) {
    Session session(base_dir);
    std::string line;
    while (conn.read_line(line)) {
        if (trim(line).empty()) continue;
        bool close = false;
        for (const auto& msg : run_line(session, line, close)) {
            if (!conn.write_all(msg + "\n")) return;
        }
        if (close) return;
    }
}

void serve_websocket(Connection& conn, const std::filesystem::path& base_dir) {
    Session session(base_dir);
    std::string message;
    for (;;) {
        std::uint8_t opcode = 0;
        bool fin = false;
        std::string payload;
        if (!read_ws_frame(conn, opcode, fin, payload)) return;
        if (opcode == 0x8) {
            conn.write_all(ws_frame(0x8, {}));
            return;
        }
        if (opcode == 0x9) {
            conn.write_all(ws_frame(0xA, payload));
            continue;
        }
        if (opcode != 0x1 && opcode != 0x0) continue;
        message += payload;
        if (!fin) continue;

        std::string_view rest = message;
        bool close = false;
        while (!rest.empty() && !close) {
            const auto nl = rest.find('\n');
            std::string_view line = rest.substr(0, nl);
            rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
            if (trim(line).empty()) continue;
            for (const auto& msg : run_line(session, line, close)) {
                if (!conn.write_all(ws_frame(0x1, msg))) return;
            }
        }
        message.clear();
        if (close) {
            conn.write_all(ws_frame(0x8, {}));
            return;
        }
    }
}

std::string content_type(const std::filesystem::path& p) {
    static const std::map<std::string, std::string> kTypes{
        {".html", "text/html; charset=utf-8"}, {".js", "text/javascript"}, {".mjs", "text/javascript"},
        {".css", "text/css"},                  {".json", "application/json"}, {".svg", "image/svg+xml"},
        {".png", "image/png"},                 {".xml", "application/xml"},
    };
    auto it = kTypes.find(p.extension().string());
    return it == kTypes.end() ? "application/octet-stream" : it->second;
}

std::string http_response(int status, std::string_view reason, std::string_view type, std::string_view body) {
    return "HTTP/1.1 " + std::to_string(status) + " " + std::string(reason) + "\r\nContent-Type: " + std::string(type) +
           "\r\nContent-Length: " + std::to_string(body.size()) + "\r\nConnection: close\r\n\r\n" + std::string(body);
}

void serve_http(Connection& conn, const Server::Options& options) {
    std::string request_line;
    if (!conn.read_line(request_line)) return;
    std::map<std::string, std::string> headers;
    std::string line;
    while (conn.read_line(line) && !line.empty()) {
        const auto colon = line.find(':');
        if (colon != std::string::npos) headers[lower(trim(line.substr(0, colon)))] = trim(line.substr(colon + 1));
    }
    std::string target = request_line.substr(4);
    target = target.substr(0, target.find(' '));
    target = target.substr(0, target.find('?'));

    if (lower(headers["upgrade"]) == "websocket" && headers.contains("sec-websocket-key")) {
        conn.write_all("HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                       "Sec-WebSocket-Accept: " +
                       websocket_accept(headers["sec-websocket-key"]) + "\r\n\r\n");
        serve_websocket(conn, options.base_dir);
        return;
    }
    if (!options.ui_root || target.find("..") != std::string::npos) {
        conn.write_all(http_response(404, "Not Found", "text/plain", "not found\n"));
        return;
    }
    std::filesystem::path file = *options.ui_root / (target == "/" ? "index.html" : target.substr(1));
    try {
        const std::string body = read_file(file);
        conn.write_all(http_response(200, "OK", content_type(file), body));
    } catch (const Error&) {
        conn.write_all(http_response(404, "Not Found", "text/plain", "not found\n"));
    }
}

}  // namespace

Endpoint parse_endpoint(std::string_view address) {
    Endpoint ep;
    if (address.starts_with("unix:") || address.starts_with("/")) {
        ep.kind = Endpoint::Kind::unix_socket;
        ep.path = std::string(address.starts_with("unix:") ? address.substr(5) : address);
        if (ep.path.empty() || ep.path.size() >= sizeof(sockaddr_un::sun_path)) {
            throw Error(ErrorCode::BadArguments, "bad unix socket path '" + std::string(address) + "'");
        }
        return ep;
    }
    const auto colon = address.rfind(':');
    if (colon == std::string_view::npos) throw Error(ErrorCode::BadArguments, "address must be host:port");
    ep.host = std::string(address.substr(0, colon));
    const auto port = address.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), ep.port);
    if (ep.host.empty() || ec != std::errc() || ptr != port.data() + port.size() || ep.port < 0 || ep.port > 65535) {
        throw Error(ErrorCode::BadArguments, "bad address '" + std::string(address) + "'");
    }
    return ep;
}

std::string default_address() {
    const char* env = std::getenv("MOLECUFORGE_ADDR");
    return env && *env ? std::string(env) : std::string(kDefaultAddress);
}

void serve_stream(std::istream& in, std::ostream& out, const std::filesystem::path& base_dir) {
    Session session(base_dir);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        bool close = false;
        for (const auto& msg : run_line(session, line, close)) out << msg << '\n';
        out.flush();
        if (close) return;
    }
}

Server::Server(Options options) : options_(std::move(options)), endpoint_(parse_endpoint(options_.address)) {}

Server::~Server() { stop(); }

void Server::start() {
    auto fail = [&](const std::string& what) {
        const std::string msg = what + ": " + std::strerror(errno);
        if (listen_fd_ >= 0) ::close(listen_fd_);
        listen_fd_ = -1;
        throw Error(ErrorCode::BindError, msg);
    };

    if (endpoint_.kind == Endpoint::Kind::unix_socket) {
        listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
        if (listen_fd_ < 0) fail("socket");
        struct stat st{};
        if (::stat(endpoint_.path.c_str(), &st) == 0 && S_ISSOCK(st.st_mode)) ::unlink(endpoint_.path.c_str());
        sockaddr_un addr{};
        addr.sun_family = AF_UNIX;
        std::strncpy(addr.sun_path, endpoint_.path.c_str(), sizeof(addr.sun_path) - 1);
        if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) fail("bind " + endpoint_.path);
    } else {
        addrinfo hints{};
        hints.ai_family = AF_INET;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        const std::string port = std::to_string(endpoint_.port);
        if (::getaddrinfo(endpoint_.host.c_str(), port.c_str(), &hints, &res) != 0 || !res) {
            throw Error(ErrorCode::BindError, "cannot resolve host '" + endpoint_.host + "'");
        }
        listen_fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
        if (listen_fd_ < 0) {
            ::freeaddrinfo(res);
            fail("socket");
        }
        const int yes = 1;
        ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
        const int rc = ::bind(listen_fd_, res->ai_addr, res->ai_addrlen);
        ::freeaddrinfo(res);
        if (rc != 0) fail("bind " + options_.address);
        sockaddr_in bound{};
        socklen_t len = sizeof bound;
        ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
        port_ = ntohs(bound.sin_port);
    }
    if (::listen(listen_fd_, 16) != 0) fail("listen");
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::accept_loop() {
    while (running_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (!running_) break;
            if (errno == EINTR || errno == ECONNABORTED) continue;
            break;
        }
        if (endpoint_.kind == Endpoint::Kind::tcp) {
            const int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        }
        std::lock_guard lock(mu_);
        if (!running_) {
            ::close(fd);
            break;
        }
        clients_.insert(fd);
        workers_.emplace_back([this, fd] { handle(fd); });
    }
}

void Server::handle(int fd) {
    try {
        Connection conn(fd);
        if (conn.peek(4).starts_with("GET ")) {
            serve_http(conn, options_);
        } else {
            serve_lines(conn, options_.base_dir);
        }
    } catch (const std::exception&) {
        // A broken connection only ends its own session.
    }
    std::lock_guard lock(mu_);
    clients_.erase(fd);
    ::close(fd);
}

void Server::stop() {
    if (!running_.exchange(false)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
    if (acceptor_.joinable()) acceptor_.join();
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(mu_);
        for (int fd : clients_) ::shutdown(fd, SHUT_RDWR);
        workers.swap(workers_);
    }
    for (auto& w : workers) w.join();
    if (endpoint_.kind == Endpoint::Kind::unix_socket) ::unlink(endpoint_.path.c_str());
}

}  // namespace molecuforge
