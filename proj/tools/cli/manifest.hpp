#ifndef RPF_CLI_MANIFEST_HPP_
#define RPF_CLI_MANIFEST_HPP_

#include <filesystem>
#include <string>

#include <json.hpp>

namespace rpf::cli {

inline constexpr const char* kManifestName = "manifest.json";

std::string git_describe();

/// Writes `<dir>/manifest.json`: the given invocation plus tool metadata.
/// Creates `dir` when missing.
void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const nlohmann::ordered_json& invocation);

/// Accepts a run directory or a manifest path. Throws ConfigError.
nlohmann::json read_manifest(const std::filesystem::path& dir_or_file);

/// Writes text to a file in binary mode (LF line endings preserved).
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace rpf::cli

#endif  // RPF_CLI_MANIFEST_HPP_
