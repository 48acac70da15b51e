#include "loqc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "loqc/compile.hpp"
#include "loqc/fock.hpp"
#include "loqc/qubit.hpp"
#include "loqc/shallow.hpp"

namespace loqc {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ResourceLimitError& e) {
        err << "error: " << e.what() << "\n";
        return kExitResourceLimit;
    } catch (const ParseError& e) {
        err << "error (line " << e.line << "): " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

struct Report {
    bool machine;
    std::ostream& out;

    void kv(const std::string& key, const std::string& value) {
        if (machine)
            out << key << " " << value << "\n";
        else
            out << "  " << key << ": " << value << "\n";
    }
    void kv(const std::string& key, long long value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, std::uint64_t value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, double value) { kv(key, format_double(value)); }
    void section(const std::string& name) {
        if (machine)
            out << name << "\n";
        else
            out << name << "\n";
    }
};

double tvd(const LogicalDistribution& a, const LogicalDistribution& b) {
    std::map<std::string, double> diff;
    for (const auto& e : a.entries) diff[e.first] += e.second;
    for (const auto& e : b.entries) diff[e.first] -= e.second;
    double d = 0;
    for (const auto& [k, v] : diff) d += std::abs(v);
    return d / 2;
}

}  // namespace

int run_compile(const std::string& graph_path, const std::string& out_base, const RunConfig& cfg,
                std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() {
        GraphProgram g = parse_graph(read_file(graph_path));
        CompiledArtifact a;
        if (cfg.pipeline == "naive8")
            a = compile_naive(g);
        else if (cfg.pipeline == "depth4")
            a = compile_depth4(g);
        else
            throw Error("unknown pipeline '" + cfg.pipeline + "' (naive8 or depth4)");

        write_file(out_base + ".circuit", serialize_circuit(a.circuit));
        write_file(out_base + ".meta", serialize_artifact_metadata(a));

        Report r{cfg.format == "machine", out};
        r.section("compile");
        r.kv("pipeline", a.pipeline);
        r.kv("depth", a.depth);
        r.kv("modes", a.circuit.modes);
        r.kv("photons", a.circuit.input.total_photons());
        r.kv("output-qubits", (long long)a.output_vertices.size());
        r.kv("circuit-file", out_base + ".circuit");
        r.kv("metadata-file", out_base + ".meta");
        return kExitOk;
    });
}

int run_sample(const std::string& circuit_path, const RunConfig& cfg, std::ostream& out,
               std::ostream& err) {
    return guarded(err, [&]() {
        OpticalCircuit c = parse_circuit(read_file(circuit_path));
        require_valid(c);
        int d = depth(c);
        bool multi_photon = false;
        for (int v : c.input.occ)
            if (v > 1) multi_photon = true;
        bool shallow_eligible = d <= 2 && c.postselection.empty() && !multi_photon;

        std::string backend;
        if (cfg.force_backend == "shallow") {
            backend = "shallow";  // ineligible circuits fail loudly below
        } else if (cfg.force_backend == "fock") {
            backend = "fock";
        } else if (cfg.force_backend == "auto") {
            backend = shallow_eligible ? "shallow" : "fock";
        } else {
            throw Error("unknown backend '" + cfg.force_backend + "' (auto, shallow or fock)");
        }

        Report r{cfg.format == "machine", out};
        r.section("sample");
        r.kv("shots", cfg.shots);
        r.kv("seed", (long long)cfg.seed);
        r.kv("depth", d);
        r.kv("backend", backend);

        std::vector<FockState> samples;
        if (backend == "shallow") {
            samples = simulate_depth2_optical(c, cfg.shots, cfg.seed);
        } else {
            Distribution dist = postselected_distribution(c, cfg.basis_cap);
            if (!c.postselection.empty()) r.kv("success-probability", dist.success_probability);
            samples = sample(dist, cfg.shots, cfg.seed);
        }
        for (const auto& s : samples) {
            for (int i = 0; i < s.modes(); ++i) {
                if (i) out << " ";
                out << s.occ[std::size_t(i)];
            }
            out << "\n";
        }
        return kExitOk;
    });
}

int run_verify(const std::string& graph_path, const RunConfig& cfg, std::ostream& out,
               std::ostream& err, const std::string& artifact_base) {
    return guarded(err, [&]() {
        GraphProgram g = parse_graph(read_file(graph_path));
        Report r{cfg.format == "machine", out};
        r.section("verify");

        CompiledArtifact third;
        if (artifact_base.empty()) {
            third = compile_depth4(g);
        } else {
            third.circuit = parse_circuit(read_file(artifact_base + ".circuit"));
            ArtifactMetadata md = parse_artifact_metadata(read_file(artifact_base + ".meta"));
            third.output_vertices = md.output_vertices;
            third.output_rails = md.output_rails;
            third.postselection = md.postselection;
            third.pipeline = md.pipeline;
            third.depth = md.depth;
            third.source_digest = md.source_digest;
            r.kv("artifact", artifact_base);
            r.kv("digest-match",
                 std::string(md.source_digest == fnv1a64(serialize_graph(g)) ? "true" : "false"));
        }

        LogicalDistribution oracle, naive, fast;
        try {
            oracle = logical_distribution(g);
            naive = artifact_logical_distribution(compile_naive(g), cfg.basis_cap);
            fast = artifact_logical_distribution(third, cfg.basis_cap);
        } catch (const ResourceLimitError& e) {
            r.kv("result", std::string("SKIP"));
            r.kv("reason", std::string(e.what()));
            throw;
        }

        r.kv("success-qubit", oracle.success_probability);
        r.kv("success-naive8", naive.success_probability);
        r.kv("success-depth4", fast.success_probability);
        double d1 = tvd(oracle, naive);
        double d2 = tvd(oracle, fast);
        double d3 = tvd(naive, fast);
        r.kv("tvd-qubit-naive8", d1);
        r.kv("tvd-qubit-depth4", d2);
        r.kv("tvd-naive8-depth4", d3);
        double worst = std::max({d1, d2, d3});
        r.kv("max-tvd", worst);
        bool pass = worst < 1e-9;
        r.kv("result", std::string(pass ? "PASS" : "FAIL"));
        if (!pass) {
            // per-outcome diff against the qubit oracle
            std::map<std::string, std::array<double, 3>> rows;
            for (const auto& e : oracle.entries) rows[e.first][0] = e.second;
            for (const auto& e : naive.entries) rows[e.first][1] = e.second;
            for (const auto& e : fast.entries) rows[e.first][2] = e.second;
            for (const auto& [k, v] : rows)
                r.kv("outcome " + (k.empty() ? "-" : k),
                     format_double(v[0]) + " " + format_double(v[1]) + " " + format_double(v[2]));
            return kExitVerifyFailure;
        }
        return kExitOk;
    });
}

int run_analyze(const std::string& circuit_path, const RunConfig& cfg, std::ostream& out,
                std::ostream& err) {
    return guarded(err, [&]() {
        OpticalCircuit c = parse_circuit(read_file(circuit_path));
        require_valid(c);
        int d = depth(c);
        CMat u = interferometer(c);
        int sp = sparsity(u);
        long long bound = 1ll << std::min(d, 62);

        Report r{cfg.format == "machine", out};
        r.section("analyze");
        r.kv("modes", c.modes);
        r.kv("photons", c.input.total_photons());
        r.kv("depth", d);
        r.kv("sparsity", sp);
        r.kv("occupancy-bound", bound);
        r.kv("sparsity-within-bound", std::string(sp <= bound ? "true" : "false"));
        for (std::size_t li = 0; li < c.layers.size(); ++li)
            r.kv("layer " + std::to_string(li),
                 std::to_string(c.layers[li].gates.size()) + " gates " +
                     std::to_string(c.layers[li].phases.size()) + " phases");
        return kExitOk;
    });
}

}  // namespace loqc
