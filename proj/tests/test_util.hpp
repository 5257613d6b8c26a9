#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

// Shared helpers for the test suite.

namespace testutil {

// Self-cleaning unique temporary directory.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<unsigned> counter{0};
        const auto stamp = std::to_string(::getpid()) + "_" + std::to_string(counter++);
        path = std::filesystem::temp_directory_path() / ("impact_test_" + stamp);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(IMPACT_FIXTURE_DIR) / name;
}

} // namespace testutil
