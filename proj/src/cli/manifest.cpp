#include "curvegnn/cli/manifest.hpp"

#include <openssl/evp.h>

#include "curvegnn/common/csv.hpp"
#include "curvegnn/common/errors.hpp"
#include "json.hpp"

namespace curvegnn::cli {

std::string git_blob_sha1(const std::string& content) {
    std::string data = "blob " + std::to_string(content.size());
    data.push_back('\0');
    data += content;
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
        throw std::runtime_error("SHA-1 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

std::string file_blob_sha1(const std::string& path) { return git_blob_sha1(read_text_file(path)); }

void write_manifest(const std::string& path, const Manifest& m) {
    nlohmann::ordered_json j;
    j["format"] = "curvegnn-manifest";
    j["version"] = 1;
    j["command"] = m.command;
    j["argv"] = m.argv;
    j["config"] = m.config;
    j["inputs"] = nlohmann::json::array();
    for (const auto& in : m.inputs) j["inputs"].push_back({{"path", in}, {"sha1", file_blob_sha1(in)}});
    j["outputs"] = m.outputs;
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace curvegnn::cli
