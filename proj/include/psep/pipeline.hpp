#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "psep/config.hpp"
#include "psep/verify.hpp"

// Named end-to-end runs that write an artifact directory with a manifest.
namespace psep::pipeline {

inline constexpr const char* version = "0.1.0";

// Unknown pipeline name or unusable arguments.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Any failure inside a pipeline, prefixed with the pipeline name and stage.
class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunResult {
    std::string pipeline;
    std::filesystem::path dir;
    std::vector<verify::Check> checks;
    bool pass = false;
};

// profiles, limit, ansatz, estimate, continue, verify-all
const std::vector<std::string>& pipeline_names();

// Writes into `out` (created if needed). Throws UsageError for an unknown name and
// PipelineError after leaving .partial files and manifest.json.partial behind.
RunResult run_pipeline(const io::RunConfig& cfg, const std::string& name, const std::filesystem::path& out);

}  // namespace psep::pipeline
