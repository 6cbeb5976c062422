#pragma once

#include <map>
#include <string>
#include <vector>

namespace curvegnn::cli {

/// SHA-1 of "blob <size>\0" + content, as `git hash-object` prints it.
std::string git_blob_sha1(const std::string& content);
std::string file_blob_sha1(const std::string& path);

struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    std::map<std::string, std::string> config;  // effective value of every option
    std::vector<std::string> inputs;            // hashed at write time
    std::vector<std::string> outputs;
};

void write_manifest(const std::string& path, const Manifest& m);

}  // namespace curvegnn::cli
