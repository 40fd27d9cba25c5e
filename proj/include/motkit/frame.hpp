#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "motkit/errors.hpp"

namespace motkit {

/// 8-bit grayscale image, row-major.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
               fill) {}

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }

  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

namespace detail {
/// Reads one whitespace-delimited header token, skipping '#' comments.
inline std::string next_pgm_token(std::istream& in) {
  std::string token;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      while (in.get(c) && c != '\n') {
      }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(c);
  }
  return token;
}
}  // namespace detail

/// Loads a binary (P5) PGM with maxval <= 255. Anything else is IoError.
inline Frame load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  const std::string magic = detail::next_pgm_token(in);
  if (magic != "P5") {
    throw IoError(path + ": not a binary PGM (magic '" + magic + "')");
  }
  const std::string ws = detail::next_pgm_token(in);
  const std::string hs = detail::next_pgm_token(in);
  const std::string ms = detail::next_pgm_token(in);
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(ws);
    h = std::stoi(hs);
    maxval = std::stoi(ms);
  } catch (const std::exception&) {
    throw IoError(path + ": malformed PGM header");
  }
  if (w <= 0 || h <= 0) throw IoError(path + ": bad PGM dimensions");
  if (maxval <= 0 || maxval > 255) {
    throw IoError(path + ": only 8-bit PGM supported (maxval " + ms + ")");
  }

  Frame frame(w, h);
  in.read(reinterpret_cast<char*>(frame.pixels.data()),
          static_cast<std::streamsize>(frame.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size())) {
    throw IoError(path + ": truncated PGM pixel data");
  }
  return frame;
}

inline void save_pgm(const Frame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw IoError("write failed: " + path);
}

/// All *.pgm files directly inside dir, sorted by filename so frame order is
/// deterministic regardless of directory enumeration order.
inline std::vector<std::string> list_pgm_files(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("not a directory: " + dir);
  }
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

}  // namespace motkit
