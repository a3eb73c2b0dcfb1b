// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/io/fileio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ttrec/error.hpp"

namespace fs = std::filesystem;

namespace ttrec::io {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  require(!in.bad(), Errc::io, "read failed: " + path);
  return ss.str();
}

void atomic_write_text_file(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path dir = target.parent_path().empty() ? fs::path(".") : target.parent_path();
  std::error_code ec;
  fs::create_directories(dir, ec);  // best effort; open below reports real failures

  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), Errc::io, "cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    require(out.good(), Errc::io, "write failed: " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  require(!ec, Errc::io, "rename failed: " + tmp.string() + " -> " + path + " (" + ec.message() + ")");
}

bool file_exists(const std::string& path) { return fs::exists(fs::path(path)); }

void ensure_directory(const std::string& path) {
  std::error_code ec;
  fs::create_directories(fs::path(path), ec);
  require(!ec || fs::is_directory(path), Errc::io, "cannot create directory: " + path);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace ttrec::io
