#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "loqc/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Constant-depth linear-optical compiler and exact simulators"};
    app.require_subcommand(1);

    loqc::RunConfig cfg;
    std::string graph_path, circuit_path, out_base = "artifact";

    app.add_option("--seed", cfg.seed, "Sampling seed");
    app.add_option("--shots", cfg.shots, "Number of samples");
    app.add_option("--cap", cfg.basis_cap, "Fock basis size cap");
    app.add_option("--format", cfg.format, "Report format: table or machine")
        ->check(CLI::IsMember({"table", "machine"}));

    auto* compile = app.add_subcommand("compile", "Compile a graph program to an optical circuit");
    compile->add_option("graph", graph_path, "Graph program file")->required();
    compile->add_option("--pipeline", cfg.pipeline, "naive8 or depth4")
        ->check(CLI::IsMember({"naive8", "depth4"}));
    compile->add_option("-o,--out", out_base, "Output base path (writes .circuit and .meta)");

    auto* sample = app.add_subcommand("sample", "Sample from a circuit's exact output distribution");
    sample->add_option("circuit", circuit_path, "Circuit file")->required();
    sample->add_option("--force-backend", cfg.force_backend, "auto, shallow or fock")
        ->check(CLI::IsMember({"auto", "shallow", "fock"}));

    std::string artifact_base;
    auto* verify = app.add_subcommand("verify", "Check both pipelines against the qubit oracle");
    verify->add_option("graph", graph_path, "Graph program file")->required();
    verify->add_option("--artifact", artifact_base,
                       "Verify BASE.circuit/BASE.meta instead of a fresh depth-4 compile");

    auto* analyze = app.add_subcommand("analyze", "Report depth, sparsity and layer structure");
    analyze->add_option("circuit", circuit_path, "Circuit file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : loqc::kExitInputError;
    }

    if (compile->parsed())
        return loqc::run_compile(graph_path, out_base, cfg, std::cout, std::cerr);
    if (sample->parsed()) return loqc::run_sample(circuit_path, cfg, std::cout, std::cerr);
    if (verify->parsed())
        return loqc::run_verify(graph_path, cfg, std::cout, std::cerr, artifact_base);
    if (analyze->parsed()) return loqc::run_analyze(circuit_path, cfg, std::cout, std::cerr);
    return loqc::kExitInputError;
}
