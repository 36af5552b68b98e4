#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mfl {

/// FNV-1a 64-bit content hash (stable across platforms, no dependency).
std::uint64_t fnv1a64(std::string_view bytes);

/// Provenance record for one experiment run: what ran, how long each stage
/// took, and the exact bytes that were produced.
struct RunManifest {
    std::string artifact_version;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;

    struct Stage {
        std::string name;
        std::string status;  ///< "ok" or "failed: <reason>"
        double seconds = 0.0;
    };
    struct File {
        std::string name;    ///< path relative to the output directory
        std::uint64_t bytes = 0;
        std::uint64_t fnv1a = 0;
    };
    std::vector<Stage> stages;
    std::vector<File> files;

    void add_stage(const std::string& name, const std::string& status, double seconds);
    /// Registers an output file (absolute path hashed, stored relative to dir).
    void add_file(const std::filesystem::path& dir, const std::filesystem::path& path);

    bool ok() const;

    /// JSON serialization (stable key order).
    std::string to_json() const;
    void write(const std::filesystem::path& path) const;

    /// Re-reads every listed file and checks size + hash.
    bool verify_files(const std::filesystem::path& dir) const;
};

} // namespace mfl
