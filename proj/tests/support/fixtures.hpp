#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "askdb/onboarding.hpp"
#include "askdb/sqlite.hpp"

namespace askdb::testing {

inline std::string data_dir() { return ASKDB_TEST_DATA_DIR; }
inline std::string fixture(const std::string& name) { return data_dir() + "/fixtures/" + name; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("askdb-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Builds the Sakila slice from its SQL script into a new SQLite file.
inline std::string make_sakila(const TempDir& dir, const std::string& name = "sakila.sqlite") {
  std::string path = dir.file(name);
  sqlite::Database db(path, sqlite::OpenMode::Create);
  db.exec(read_text(fixture("sakila_mini.sql")));
  return path;
}

inline OnboardingConfig load_config(const std::string& name) {
  return OnboardingConfig::from_json(read_text(fixture(name)));
}

}  // namespace askdb::testing
