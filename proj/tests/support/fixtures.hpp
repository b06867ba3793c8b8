#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "autotune/objective.hpp"
#include "autotune/space.hpp"

namespace autotune::fixture {

// Frozen output of tests/oracles/landscape_optima.py (independent numpy scan).
inline constexpr std::uint64_t kDefaultTotal = 2097152;
inline constexpr std::uint64_t kDefaultValid = 1966080;

struct LandscapeFixture {
  ObjectiveKind kind;
  Configuration config;
  double value;
};

inline constexpr LandscapeFixture kDefaultOptima[] = {
    {ObjectiveKind::synthetic_add, {1, 1, 2, 1, 4, 8}, 1.0},
    {ObjectiveKind::synthetic_harris, {1, 1, 2, 8, 8, 1}, 1.15},
    {ObjectiveKind::synthetic_mandelbrot, {1, 2, 1, 8, 1, 4}, 1.0057903762180664},
};

// Threads [1,4], work groups [1,2]: 512 configurations, all valid.
inline constexpr LandscapeFixture kReducedOptima[] = {
    {ObjectiveKind::synthetic_add, {1, 1, 2, 2, 2, 2}, 1.75},
    {ObjectiveKind::synthetic_harris, {1, 1, 2, 2, 2, 2}, 1.95},
    {ObjectiveKind::synthetic_mandelbrot, {1, 1, 2, 2, 2, 2}, 1.7864796257038107},
};

inline SearchSpace reduced_space() { return SearchSpace::uniform({1, 4}, {1, 2}); }

inline ObjectiveSpec noiseless(ObjectiveKind kind) {
  ObjectiveSpec spec;
  spec.kind = kind;
  spec.noise_sigma = 0.0;
  return spec;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("autotune-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
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

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace autotune::fixture
