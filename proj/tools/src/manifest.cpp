#include "manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <json.hpp>

#include "vol32/errors.hpp"
#include "vol32/version.hpp"

namespace vol32::cli {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot hash missing file: " + path);

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 init failed");
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out(2 * len, '0');
    for (unsigned int i = 0; i < len; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0xf];
    }
    return out;
}

void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::ordered_json j;
    j["tool_version"] = VOL32_VERSION;
    j["command"] = m.command;
    j["seed"] = m.seed;
    auto hash_list = [](const std::vector<std::string>& files) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& f : files)
            arr.push_back({{"path", f}, {"sha256", sha256_file(f)}});
        return arr;
    };
    j["inputs"] = hash_list(m.input_files);
    j["outputs"] = hash_list(m.output_files);

    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace vol32::cli
