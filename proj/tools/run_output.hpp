#pragma once
#include <jumptime/config.hpp>

#include <filesystem>

/// Git blob hash: SHA-1 over "blob <size>\0<content>", hex encoded.
std::string git_blob_sha1(std::string const& content);

/// Output directory owned by one run; a lockfile rejects concurrent runs.
class RunDirectory {
public:
    explicit RunDirectory(std::filesystem::path root);
    ~RunDirectory();
    RunDirectory(RunDirectory const&) = delete;
    RunDirectory& operator=(RunDirectory const&) = delete;

    void write(std::string const& name, std::string const& content);
    std::filesystem::path const& path() const { return root; }

private:
    std::filesystem::path root;
    std::filesystem::path lock;
};

struct RunManifest {
    std::string config_hash;
    std::string kind;
    double seconds = 0;
    long dark_trapped = 0;
    int exit_code = 0;
    std::string error;
    jumptime::json summary = jumptime::json::object();
    std::vector<std::pair<std::string, std::string>> files; ///< name, schema
    std::vector<std::string> hashes;

    jumptime::json to_json() const;
};
