#pragma once

// File transfer over TCP/IPv4.
//
// One frame per connection, answered by exactly one ack byte:
//
//   "ETEAXFER" | version u8 (=1) | name_len u16 BE | name | body_len u64 BE
//   | body | crc32 u32 BE (over every preceding byte)
//
// The server treats bodies as opaque bytes. Each connection runs on its own
// thread; handlers only share the output directory, and a received file is
// published with link(2) so name-collision resolution is atomic.

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include "etea/bytes.hpp"
#include "etea/error.hpp"

namespace etea::net {

inline constexpr std::array<std::uint8_t, 8> kFrameMagic{'E', 'T', 'E', 'A', 'X', 'F', 'E', 'R'};
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 7474;
inline constexpr std::size_t kMaxNameLength = 255;
inline constexpr std::chrono::milliseconds kDefaultTimeout{30'000};

enum class Ack : std::uint8_t { Accepted = 0x06, Rejected = 0x15 };

// Plain file name: non-empty, at most 255 bytes, no separators or NUL, and
// not a dot entry.
inline bool valid_filename(std::string_view name) noexcept {
  if (name.empty() || name.size() > kMaxNameLength || name == "." || name == "..") return false;
  return name.find_first_of(std::string_view("/\\\0", 3)) == std::string_view::npos;
}

// Everything up to and including body_len.
inline Bytes encode_frame_header(std::string_view name, std::uint64_t body_len) {
  Bytes out;
  append(out, kFrameMagic);
  out.push_back(kFrameVersion);
  append_be<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
  append(out, name);
  append_be<std::uint64_t>(out, body_len);
  return out;
}

// Whole frame in memory. Does not validate the name, so tests can build
// hostile frames with it.
inline Bytes encode_frame(std::string_view name, ByteView body) {
  Bytes out = encode_frame_header(name, body.size());
  append(out, body);
  append_be<std::uint32_t>(out, crc32(out));
  return out;
}

// RAII socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) noexcept : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { reset(); }

  int fd() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

  void set_timeout(std::chrono::milliseconds t) const noexcept {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(t.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((t.count() % 1000) * 1000);
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  }

  void write_all(ByteView data) const {
    while (!data.empty()) {
      const auto n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::IoError, std::string("send: ") + std::strerror(errno));
      }
      data = data.subspan(static_cast<std::size_t>(n));
    }
  }

  // False on orderly EOF before `len` bytes; throws on error or timeout.
  bool read_exact(std::uint8_t* buf, std::size_t len) const {
    while (len > 0) {
      const auto n = ::recv(fd_, buf, len, 0);
      if (n == 0) return false;
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK) throw Error(ErrorCode::IoError, "read timed out");
        throw Error(ErrorCode::IoError, std::string("recv: ") + std::strerror(errno));
      }
      buf += n;
      len -= static_cast<std::size_t>(n);
    }
    return true;
  }

 private:
  int fd_ = -1;
};

inline sockaddr_in resolve_ipv4(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
    throw Error(ErrorCode::ConnectFailed, "cannot resolve IPv4 address for " + host);
  addr.sin_addr = reinterpret_cast<const sockaddr_in*>(res->ai_addr)->sin_addr;
  ::freeaddrinfo(res);
  return addr;
}

inline Socket connect_to(const std::string& host, std::uint16_t port,
                         std::chrono::milliseconds timeout = kDefaultTimeout) {
  const auto addr = resolve_ipv4(host, port);
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s) throw Error(ErrorCode::ConnectFailed, std::string("socket: ") + std::strerror(errno));
  s.set_timeout(timeout);
  if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0)
    throw Error(ErrorCode::ConnectFailed,
                "connect " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  return s;
}

struct SendOptions {
  std::chrono::milliseconds timeout = kDefaultTimeout;
  // Name announced to the server; defaults to the source file's name.
  std::optional<std::string> remote_name;
  // Fault injection: transmit a deliberately wrong CRC.
  bool corrupt_crc = false;
};

namespace detail {

inline Ack read_ack(const Socket& s) {
  std::uint8_t ack = 0;
  if (!s.read_exact(&ack, 1)) throw Error(ErrorCode::IoError, "connection closed before ack");
  if (ack != static_cast<std::uint8_t>(Ack::Accepted) && ack != static_cast<std::uint8_t>(Ack::Rejected))
    throw Error(ErrorCode::IoError, "unexpected ack byte " + std::to_string(ack));
  return static_cast<Ack>(ack);
}

// Streams header, body chunks, and CRC, then waits for the ack. `next_chunk`
// fills the buffer and returns the count written (0 at end).
template <typename ChunkSource>
Ack send_stream(const std::string& host, std::uint16_t port, std::string_view name, std::uint64_t body_len,
                ChunkSource&& next_chunk, const SendOptions& opts) {
  auto s = connect_to(host, port, opts.timeout);
  const auto header = encode_frame_header(name, body_len);
  std::uint32_t crc = crc32(header);

  try {
    s.write_all(header);
    Bytes buf(1 << 16);
    std::uint64_t sent = 0;
    while (sent < body_len) {
      const auto n = next_chunk(std::span<std::uint8_t>(buf));
      if (n == 0) throw Error(ErrorCode::IoError, "source ended early");
      const ByteView chunk(buf.data(), n);
      crc = crc32(chunk, crc);
      s.write_all(chunk);
      sent += n;
    }
    if (opts.corrupt_crc) crc = ~crc;
    std::array<std::uint8_t, 4> tail{};
    store_be<std::uint32_t>(tail.data(), crc);
    s.write_all(tail);
  } catch (const Error&) {
    // The server may have rejected early and closed; its ack is still readable.
    try {
      return read_ack(s);
    } catch (const Error&) {
    }
    throw;
  }
  return read_ack(s);
}

}  // namespace detail

// Sends an in-memory body. Returns the server's verdict without throwing on
// rejection.
inline Ack send_bytes(const std::string& host, std::uint16_t port, std::string_view name, ByteView body,
                      const SendOptions& opts = {}) {
  std::size_t off = 0;
  return detail::send_stream(
      host, port, name, body.size(),
      [&](std::span<std::uint8_t> buf) {
        const auto n = std::min(buf.size(), body.size() - off);
        std::copy_n(body.begin() + static_cast<std::ptrdiff_t>(off), n, buf.begin());
        off += n;
        return n;
      },
      opts);
}

// Streams a file from disk. Throws Rejected if the server answers 0x15.
inline Ack send_file(const std::string& host, std::uint16_t port, const std::filesystem::path& path,
                     const SendOptions& opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot stat " + path.string());
  const auto name = opts.remote_name.value_or(path.filename().string());
  if (!valid_filename(name)) throw Error(ErrorCode::IoError, "invalid remote file name '" + name + "'");

  const auto ack = detail::send_stream(
      host, port, name, size,
      [&](std::span<std::uint8_t> buf) {
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        return static_cast<std::size_t>(in.gcount());
      },
      opts);
  if (ack == Ack::Rejected) throw Error(ErrorCode::Rejected, "server rejected " + name);
  return ack;
}

struct ServerOptions {
  std::string bind = "0.0.0.0";
  std::uint16_t port = kDefaultPort;  // 0 picks an ephemeral port
  std::filesystem::path out_dir = ".";
  std::chrono::milliseconds read_timeout = kDefaultTimeout;
  std::uint64_t max_body = std::uint64_t{1} << 36;
  std::function<void(const std::string&)> log;
};

// Threaded receiver. start() binds and returns; run() blocks until stop().
class Server {
 public:
  explicit Server(ServerOptions opts) : opts_(std::move(opts)) {
    if (!opts_.log) opts_.log = [](const std::string& line) { std::cerr << line << '\n'; };
  }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;
  ~Server() { stop(); }

  void start() {
    std::error_code ec;
    if (!std::filesystem::is_directory(opts_.out_dir, ec))
      throw Error(ErrorCode::BindFailed, "output directory " + opts_.out_dir.string() + " does not exist");

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(opts_.port);
    if (::inet_pton(AF_INET, opts_.bind.c_str(), &addr.sin_addr) != 1)
      throw Error(ErrorCode::BindFailed, "not an IPv4 address: " + opts_.bind);

    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s) throw Error(ErrorCode::BindFailed, std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0 || ::listen(s.fd(), 64) != 0)
      throw Error(ErrorCode::BindFailed,
                  "bind " + opts_.bind + ":" + std::to_string(opts_.port) + ": " + std::strerror(errno));

    socklen_t len = sizeof addr;
    ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    listener_ = std::move(s);
    stopping_ = false;
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  void run() {
    if (!listener_) start();
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return stopping_.load(); });
  }

  // Stops accepting, interrupts in-flight connections, and waits for every
  // handler to finish. Idempotent.
  void stop() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
      for (const int fd : active_) ::shutdown(fd, SHUT_RDWR);
    }
    cv_.notify_all();
    if (acceptor_.joinable()) acceptor_.join();
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return active_.empty(); });
    listener_.reset();
  }

  std::uint16_t port() const noexcept { return port_; }
  std::uint64_t accepted() const noexcept { return accepted_; }
  std::uint64_t rejected() const noexcept { return rejected_; }

 private:
  void accept_loop() {
    while (!stopping_) {
      pollfd p{listener_.fd(), POLLIN, 0};
      if (::poll(&p, 1, 100) <= 0) continue;
      const int fd = ::accept(listener_.fd(), nullptr, nullptr);
      if (fd < 0) continue;
      {
        std::lock_guard lock(mu_);
        if (stopping_) {
          ::close(fd);
          break;
        }
        active_.insert(fd);
      }
      std::thread([this, fd] { handle(fd); }).detach();
    }
  }

  void handle(int fd) {
    Socket s(fd);
    s.set_timeout(opts_.read_timeout);
    Ack verdict = Ack::Rejected;
    try {
      verdict = receive(s);
    } catch (const std::exception& e) {
      log(std::string("connection failed: ") + e.what());
    }
    try {
      const auto b = static_cast<std::uint8_t>(verdict);
      s.write_all(ByteView(&b, 1));
    } catch (const std::exception&) {
    }
    (verdict == Ack::Accepted ? accepted_ : rejected_)++;
    std::lock_guard lock(mu_);
    active_.erase(fd);
    s.reset();
    cv_.notify_all();
  }

  Ack receive(const Socket& s) {
    std::array<std::uint8_t, 11> head{};
    if (!s.read_exact(head.data(), head.size())) throw Error(ErrorCode::IoError, "truncated frame header");
    if (!std::equal(kFrameMagic.begin(), kFrameMagic.end(), head.begin()) || head[8] != kFrameVersion) {
      log("rejected: bad frame magic or version");
      return Ack::Rejected;
    }
    const auto name_len = load_be<std::uint16_t>(head.data() + 9);
    if (name_len > kMaxNameLength) {
      log("rejected: file name too long");
      return Ack::Rejected;
    }
    std::string name(name_len, '\0');
    std::array<std::uint8_t, 8> len_buf{};
    if (!s.read_exact(reinterpret_cast<std::uint8_t*>(name.data()), name.size()) ||
        !s.read_exact(len_buf.data(), len_buf.size()))
      throw Error(ErrorCode::IoError, "truncated frame header");
    const auto body_len = load_be<std::uint64_t>(len_buf.data());
    std::uint32_t crc = crc32(len_buf, crc32(as_bytes(name), crc32(head)));

    if (body_len > opts_.max_body) {
      log("rejected: body of " + std::to_string(body_len) + " bytes exceeds limit");
      return Ack::Rejected;
    }
    const bool name_ok = valid_filename(name);

    // Bodies with a bad name are still drained so the client reads a clean ack.
    TempFile tmp;
    if (name_ok) tmp = TempFile::create(opts_.out_dir);

    Bytes buf(1 << 16);
    for (std::uint64_t left = body_len; left > 0;) {
      const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(left, buf.size()));
      if (!s.read_exact(buf.data(), n)) throw Error(ErrorCode::IoError, "client disconnected mid-body");
      crc = crc32(ByteView(buf.data(), n), crc);
      if (name_ok) tmp.write(ByteView(buf.data(), n));
      left -= n;
    }
    std::array<std::uint8_t, 4> crc_buf{};
    if (!s.read_exact(crc_buf.data(), crc_buf.size())) throw Error(ErrorCode::IoError, "truncated frame checksum");

    if (!name_ok) {
      log("rejected: unsafe file name '" + name + "'");
      return Ack::Rejected;
    }
    if (load_be<std::uint32_t>(crc_buf.data()) != crc) {
      log("rejected: checksum mismatch for '" + name + "'");
      return Ack::Rejected;
    }
    const auto stored = tmp.publish(opts_.out_dir, name);
    log("stored " + stored.filename().string() + " (" + std::to_string(body_len) + " bytes)");
    return Ack::Accepted;
  }

  // Receive buffer in the output directory; removed unless published.
  class TempFile {
   public:
    TempFile() = default;
    TempFile(TempFile&& o) noexcept : path_(std::move(o.path_)), fd_(std::exchange(o.fd_, -1)) { o.path_.clear(); }
    TempFile& operator=(TempFile&& o) noexcept {
      if (this != &o) {
        discard();
        path_ = std::move(o.path_);
        o.path_.clear();
        fd_ = std::exchange(o.fd_, -1);
      }
      return *this;
    }
    ~TempFile() { discard(); }

    static TempFile create(const std::filesystem::path& dir) {
      static thread_local std::mt19937_64 rng{std::random_device{}()};
      for (int attempt = 0; attempt < 16; ++attempt) {
        TempFile t;
        t.path_ = dir / (".etea-recv-" + std::to_string(rng()) + ".part");
        t.fd_ = ::open(t.path_.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
        if (t.fd_ >= 0) return t;
        if (errno != EEXIST) break;
      }
      throw Error(ErrorCode::IoError, "cannot create receive file in " + dir.string());
    }

    void write(ByteView data) {
      while (!data.empty()) {
        const auto n = ::write(fd_, data.data(), data.size());
        if (n < 0) {
          if (errno == EINTR) continue;
          throw Error(ErrorCode::IoError, std::string("write: ") + std::strerror(errno));
        }
        data = data.subspan(static_cast<std::size_t>(n));
      }
    }

    // Links the data under `name`, or name-1, name-2, ... if taken.
    std::filesystem::path publish(const std::filesystem::path& dir, const std::string& name) {
      ::close(std::exchange(fd_, -1));
      const std::filesystem::path base(name);
      for (unsigned n = 0;; ++n) {
        auto candidate = dir / (n == 0 ? base : std::filesystem::path(base.stem().string() + "-" +
                                                                      std::to_string(n) + base.extension().string()));
        if (::link(path_.c_str(), candidate.c_str()) == 0) {
          discard();
          return candidate;
        }
        if (errno != EEXIST) throw Error(ErrorCode::IoError, "cannot publish " + candidate.string());
      }
    }

   private:
    void discard() noexcept {
      if (fd_ >= 0) ::close(std::exchange(fd_, -1));
      if (!path_.empty()) ::unlink(path_.c_str());
      path_.clear();
    }

    std::filesystem::path path_;
    int fd_ = -1;
  };

  void log(const std::string& line) {
    std::lock_guard lock(log_mu_);
    opts_.log(line);
  }

  ServerOptions opts_;
  Socket listener_;
  std::uint16_t port_ = 0;
  std::thread acceptor_;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::condition_variable cv_;
  std::set<int> active_;
  std::mutex log_mu_;
  std::atomic<std::uint64_t> accepted_{0};
  std::atomic<std::uint64_t> rejected_{0};
};

// Blocks serving connections; only returns by exception at startup.
inline void serve(const ServerOptions& opts) {
  Server server(opts);
  server.run();
}

}  // namespace etea::net
