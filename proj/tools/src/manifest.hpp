#pragma once

#include <string>
#include <vector>

namespace vol32::cli {

/// Reproducibility record written next to every command's output: the
/// command line, SHA-256 of every input and output file, the seed in
/// effect, and the tool version. Deliberately carries no timestamp so
/// that identical runs produce byte-identical manifests.
struct RunManifest {
    std::string command;
    std::vector<std::string> input_files;
    std::vector<std::string> output_files;
    std::uint64_t seed = 0;
};

std::string sha256_file(const std::string& path);

/// Serialize (inputs/outputs get {path, sha256} entries) and write to
/// `path` as JSON with a stable field order.
void write_manifest(const RunManifest& m, const std::string& path);

}  // namespace vol32::cli
