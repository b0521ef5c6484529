#include "cli/manifest.hpp"

#include <fstream>
#include <sstream>

#include "cli/config.hpp"

#ifndef RPF_GIT_DESCRIBE
#define RPF_GIT_DESCRIBE "unknown"
#endif

namespace rpf::cli {

namespace fs = std::filesystem;

std::string git_describe() { return RPF_GIT_DESCRIBE; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RunAbort("cannot write " + path.string());
  out << text;
  if (!out) throw RunAbort("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const nlohmann::ordered_json& invocation) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RunAbort("cannot create output directory " + dir.string() + ": " + ec.message());
  nlohmann::ordered_json m;
  m["format"] = "rpf-manifest";
  m["version"] = 1;
  m["command"] = command;
  m["git_describe"] = git_describe();
  m["output_dir"] = fs::absolute(dir).lexically_normal().string();
  m["invocation"] = invocation;
  write_text(dir / kManifestName, m.dump(2) + "\n");
}

nlohmann::json read_manifest(const fs::path& dir_or_file) {
  const fs::path path = fs::is_directory(dir_or_file) ? dir_or_file / kManifestName : dir_or_file;
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
  if (!m.is_object() || m.value("format", "") != "rpf-manifest" || !m.contains("command") ||
      !m.contains("invocation")) {
    throw ConfigError("manifest " + path.string() + ": not an rpf manifest");
  }
  return m;
}

}  // namespace rpf::cli
