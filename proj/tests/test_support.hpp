#pragma once

#include <fcntl.h>
#include <openssl/evp.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "etea/bytes.hpp"

namespace etea::test {

#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wparentheses"

// Wheeler & Needham's published TEA routines, transcribed from the original
// C source (precedence intact: + binds tighter than ^). Kept deliberately
// separate from the library so it can serve as an oracle.
inline void reference_tea_code(std::uint32_t v[2], const std::uint32_t k[4]) {
  std::uint32_t y = v[0], z = v[1], sum = 0, delta = 0x9e3779b9, n = 32;
  while (n-- > 0) {
    sum += delta;
    y += (z << 4) + k[0] ^ z + sum ^ (z >> 5) + k[1];
    z += (y << 4) + k[2] ^ y + sum ^ (y >> 5) + k[3];
  }
  v[0] = y;
  v[1] = z;
}

inline void reference_tea_decode(std::uint32_t v[2], const std::uint32_t k[4]) {
  std::uint32_t n = 32, sum, y = v[0], z = v[1], delta = 0x9e3779b9;
  sum = delta << 5;
  while (n-- > 0) {
    z -= (y << 4) + k[2] ^ y + sum ^ (y >> 5) + k[3];
    y -= (z << 4) + k[0] ^ z + sum ^ (z >> 5) + k[1];
    sum -= delta;
  }
  v[0] = y;
  v[1] = z;
}

#pragma GCC diagnostic pop

inline Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

inline std::string sha256_hex(ByteView data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("etea-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace etea::test

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <vector>

extern char** environ;

namespace etea::test {

// Child process running the CLI; killed on destruction if still alive.
class Process {
 public:
  Process(const std::string& exe, const std::vector<std::string>& args, const std::filesystem::path& stdout_path = {}) {
    std::vector<std::string> all{exe};
    all.insert(all.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : all) argv.push_back(a.data());
    argv.push_back(nullptr);

    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    const auto out = stdout_path.empty() ? std::string("/dev/null") : stdout_path.string();
    posix_spawn_file_actions_addopen(&fa, STDOUT_FILENO, out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_addopen(&fa, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
    if (posix_spawn(&pid_, exe.c_str(), &fa, nullptr, argv.data(), environ) != 0) pid_ = -1;
    posix_spawn_file_actions_destroy(&fa);
  }
  ~Process() {
    if (pid_ > 0) {
      ::kill(pid_, SIGTERM);
      wait();
    }
  }
  Process(const Process&) = delete;
  Process& operator=(const Process&) = delete;

  // Exit status, or 128 + signal.
  int wait() {
    if (pid_ <= 0) return -1;
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  }

 private:
  pid_t pid_ = -1;
};

inline int run_cli(const std::string& exe, const std::vector<std::string>& args,
                   const std::filesystem::path& stdout_path = {}) {
  return Process(exe, args, stdout_path).wait();
}

}  // namespace etea::test
