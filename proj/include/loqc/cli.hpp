#pragma once

#include <iosfwd>
#include <string>

#include "loqc/types.hpp"

namespace loqc {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitResourceLimit = 3;
inline constexpr int kExitVerifyFailure = 4;

struct RunConfig {
    std::uint64_t seed = 0;
    long long shots = 0;
    std::uint64_t basis_cap = kDefaultBasisCap;
    std::string format = "table";         // "table" or "machine"
    std::string pipeline = "depth4";      // compile: "naive8" or "depth4"
    std::string force_backend = "auto";   // sample: "auto", "shallow", "fock"
};

int run_compile(const std::string& graph_path, const std::string& out_base, const RunConfig& cfg,
                std::ostream& out, std::ostream& err);
int run_sample(const std::string& circuit_path, const RunConfig& cfg, std::ostream& out,
               std::ostream& err);
// When artifact_base is nonempty, BASE.circuit / BASE.meta replace the
// freshly compiled depth-4 leg, so artifacts on disk can be checked too.
int run_verify(const std::string& graph_path, const RunConfig& cfg, std::ostream& out,
               std::ostream& err, const std::string& artifact_base = "");
int run_analyze(const std::string& circuit_path, const RunConfig& cfg, std::ostream& out,
                std::ostream& err);

}  // namespace loqc
