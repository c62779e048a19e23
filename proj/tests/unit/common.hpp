#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <unistd.h>

#include "socialbot/engine.hpp"

namespace testing {

inline const std::filesystem::path kFixtures = SOCIALBOT_TEST_FIXTURES;

// One engine over the shipped data, shared by the read-only tests.
inline const socialbot::Engine& shared_engine() {
  static socialbot::Engine engine{socialbot::EngineConfig{}};
  return engine;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() /
           ("socialbot-unit-" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace testing
