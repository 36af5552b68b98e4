#include "mfl/manifest.hpp"

#include <fstream>
#include <sstream>

#include "mfl/csv.hpp"
#include "mfl/errors.hpp"

#include "json.hpp"

namespace mfl {

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

void RunManifest::add_stage(const std::string& name, const std::string& status, double seconds) {
    stages.push_back(Stage{name, status, seconds});
}

void RunManifest::add_file(const std::filesystem::path& dir, const std::filesystem::path& path) {
    const std::string content = slurp(path);
    File f;
    f.name = std::filesystem::relative(path, dir).generic_string();
    f.bytes = content.size();
    f.fnv1a = fnv1a64(content);
    files.push_back(std::move(f));
}

bool RunManifest::ok() const {
    for (const auto& s : stages) {
        if (s.status != "ok") return false;
    }
    return true;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["artifact_version"] = artifact_version;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["ok"] = ok();
    j["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : stages) {
        nlohmann::ordered_json js;
        js["name"] = s.name;
        js["status"] = s.status;
        js["seconds"] = s.seconds;
        j["stages"].push_back(js);
    }
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& f : files) {
        nlohmann::ordered_json jf;
        jf["name"] = f.name;
        jf["bytes"] = f.bytes;
        jf["fnv1a"] = f.fnv1a;
        j["files"].push_back(jf);
    }
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) const {
    write_text_atomic(path, to_json());
}

bool RunManifest::verify_files(const std::filesystem::path& dir) const {
    for (const auto& f : files) {
        const std::filesystem::path p = dir / f.name;
        if (!std::filesystem::exists(p)) return false;
        const std::string content = slurp(p);
        if (content.size() != f.bytes || fnv1a64(content) != f.fnv1a) return false;
    }
    return true;
}

} // namespace mfl
