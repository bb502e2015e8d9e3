#include "run_output.hpp"

#include <openssl/sha.h>

#include <cstdio>
#include <fcntl.h>
#include <fstream>
#include <unistd.h>

std::string git_blob_sha1(std::string const& content) {
    std::string const payload = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<unsigned char const*>(payload.data()), payload.size(), digest);
    std::string hex;
    char buf[3];
    for (unsigned char b : digest) {
        std::snprintf(buf, sizeof buf, "%02x", b);
        hex += buf;
    }
    return hex;
}

RunDirectory::RunDirectory(std::filesystem::path dir) : root(std::move(dir)), lock(root / ".lock") {
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec)
        throw jumptime::ValidationError("cannot create output directory " + root.string() + ": " + ec.message());
    int const fd = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw jumptime::ValidationError("output directory " + root.string() + " is locked by another run");
    std::string const pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto const n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

RunDirectory::~RunDirectory() {
    std::error_code ec;
    std::filesystem::remove(lock, ec);
}

void RunDirectory::write(std::string const& name, std::string const& content) {
    std::ofstream out(root / name, std::ios::binary | std::ios::trunc);
    if (!out)
        throw jumptime::Error("cannot write " + (root / name).string());
    out << content;
}

jumptime::json RunManifest::to_json() const {
    jumptime::json files_json = jumptime::json::array();
    jumptime::json schemas = jumptime::json::object();
    for (std::size_t i = 0; i < files.size(); ++i) {
        files_json.push_back({{"name", files[i].first}, {"sha1", i < hashes.size() ? hashes[i] : ""}});
        if (!files[i].second.empty())
            schemas[files[i].first] = files[i].second;
    }
    return {{"config_hash", config_hash},
            {"kind", kind},
            {"tool_version", JUMPTIME_VERSION},
            {"wall_seconds", seconds},
            {"dark_trapped", dark_trapped},
            {"exit_code", exit_code},
            {"error", error},
            {"files", files_json},
            {"schemas", schemas},
            {"convergence", summary}};
}
