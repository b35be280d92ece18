#pragma once

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "etea/bytes.hpp"
#include "etea/error.hpp"

namespace etea {

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string() + ": " + std::strerror(errno));
  Bytes data;
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size > 0) {
    data.resize(static_cast<std::size_t>(size));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(data.data()), size);
  }
  if (!in) throw Error(ErrorCode::IoError, "failed reading " + path.string());
  return data;
}

// Sibling temp file in the same directory so the final rename is atomic.
inline std::filesystem::path temp_sibling(const std::filesystem::path& target) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  auto name = "." + target.filename().string() + ".tmp" + std::to_string(rng() & 0xFFFFFFFF);
  return target.parent_path() / name;
}

// Writes to a temp file and renames over `path`, so a failure never leaves a
// partial output behind.
inline void write_file_atomic(const std::filesystem::path& path, ByteView data) {
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot create " + tmp.string() + ": " + std::strerror(errno));
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
  }
}

}  // namespace etea
