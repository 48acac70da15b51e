#include "loqc/compile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace loqc {

namespace {

// Beam-splitter entries of the controlled-Z block (see tools/solve_knill.py
// for the derivation and the machine check against 2/27):
//   c    = 1/sqrt(3)                 s    = sqrt(2/3)
//   cphi = sqrt((3+sqrt(6))/6)       sphi = sqrt((3-sqrt(6))/6)
// i.e. beam-splitter angles of 54.7356...deg and 17.6322...deg.
struct CzConstants {
    double c, s, cphi, sphi;
};

CzConstants cz_constants() {
    CzConstants k{};
    k.c = 1.0 / std::sqrt(3.0);
    k.s = std::sqrt(2.0 / 3.0);
    k.cphi = std::sqrt((3.0 + std::sqrt(6.0)) / 6.0);
    k.sphi = std::sqrt((3.0 - std::sqrt(6.0)) / 6.0);
    return k;
}

// The generalized block: pi phase shifters on a chosen subset of the two
// ports, in front of the plain block. With flips (fa, fb) the conditional
// port action is, up to a global sign, the phase (-1)^((x xor fa)(y xor fb))
// on port occupations (x, y).
GateBlock cz_block(bool phase_a, bool phase_b) {
    const auto k = cz_constants();
    GateBlock b;
    b.name = "cz";
    b.modes = 4;
    b.input_ports = {0, 3};
    b.output_ports = {0, 3};
    b.ancilla_inputs = {{1, 1}, {2, 1}};
    b.postselect = {{1, 1}, {2, 1}};
    if (phase_a || phase_b) {
        Layer pre;
        if (phase_a) pre.phases.push_back({0, M_PI});
        if (phase_b) pre.phases.push_back({3, M_PI});
        b.layers.push_back(std::move(pre));
    }
    Layer l1, l2;
    l1.gates.push_back({0, 1, mat2(-k.c, k.s, k.s, k.c), "cz"});
    l1.gates.push_back({2, 3, mat2(-k.c, k.s, -k.s, -k.c), "cz"});
    l2.gates.push_back({1, 2, mat2(k.cphi, k.sphi, k.sphi, -k.cphi), "cz"});
    l2.gates.push_back({0, 3, mat2(k.c, -k.s, k.s, k.c), "cz"});
    b.layers.push_back(std::move(l1));
    b.layers.push_back(std::move(l2));
    return b;
}

}  // namespace

GateBlock knill_cz() {
    GateBlock b = cz_block(false, false);
    b.name = "knill-cz";
    return b;
}

GateBlock cz_on_zero_rails() {
    GateBlock b = cz_block(true, true);
    b.name = "cz-zero-rails";
    return b;
}

GateBlock teleport_mode() {
    GateBlock b;
    b.name = "mode-teleport";
    b.modes = 3;
    b.input_ports = {0};
    b.output_ports = {2};
    b.ancilla_inputs = {{1, 1}, {2, 0}};
    b.postselect = {{0, 1}, {1, 0}};
    Layer prep, proj;
    prep.gates.push_back({1, 2, balanced_beam_splitter(), "bs"});
    proj.gates.push_back({0, 1, balanced_beam_splitter(), "bell"});
    b.layers.push_back(std::move(prep));
    b.layers.push_back(std::move(proj));
    return b;
}

OpticalCircuit block_circuit(const GateBlock& b, const std::vector<int>& port_occupations) {
    if (port_occupations.size() != b.input_ports.size())
        throw DimensionError("expected one occupation per input port");
    OpticalCircuit c;
    c.modes = b.modes;
    c.input.occ.assign(std::size_t(b.modes), 0);
    for (std::size_t i = 0; i < b.input_ports.size(); ++i)
        c.input.occ[std::size_t(b.input_ports[i])] = port_occupations[i];
    for (const auto& [m, ph] : b.ancilla_inputs) c.input.occ[std::size_t(m)] = ph;
    c.layers = b.layers;
    for (const auto& [m, ph] : b.postselect) c.postselection.required[m] = ph;
    c.output_modes = b.output_ports;
    return c;
}

TwoModeGate encode_single_qubit(const CMat& u, int qubit, const DualRailMap& map) {
    if (u.rows() != 2 || u.cols() != 2 || !u.is_unitary())
        throw Error("single-qubit gate must be a 2x2 unitary");
    if (qubit < 0 || qubit >= int(map.rails.size()))
        throw DimensionError("qubit index out of range of the rail map");
    auto [z, o] = map.rails[std::size_t(qubit)];
    return {z, o, u, "1q"};
}

namespace {

std::vector<GraphEdge> sorted_edges(const GraphProgram& g) {
    std::vector<GraphEdge> edges = g.edges;
    for (auto& e : edges)
        if (e.u > e.v) std::swap(e.u, e.v);
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return std::tie(a.layer, a.u, a.v) < std::tie(b.layer, b.u, b.v);
    });
    return edges;
}

CMat basis_rotation_for(const VertexPattern& p) {
    return hadamard().mul(rz(-p.angle_q * M_PI / 4.0));
}

// Stamps one block gate layer into a staging layer with a local->global
// mode mapping.
void stamp_gates(Layer& dst, const Layer& src, const std::vector<int>& mode_map) {
    for (const auto& g : src.gates)
        dst.gates.push_back({mode_map[std::size_t(g.mode_a)], mode_map[std::size_t(g.mode_b)],
                             g.u, g.label});
    for (const auto& p : src.phases)
        dst.phases.push_back({mode_map[std::size_t(p.mode)], p.phase});
}

void finish_artifact(CompiledArtifact& a, const GraphProgram& g, std::vector<Layer> staging) {
    for (auto& layer : staging)
        if (!layer.gates.empty() || !layer.phases.empty())
            a.circuit.layers.push_back(std::move(layer));
    a.circuit.postselection = a.postselection;
    std::sort(a.circuit.output_modes.begin(), a.circuit.output_modes.end());
    require_valid(a.circuit);
    a.depth = depth(a.circuit);
    a.source_digest = fnv1a64(serialize_graph(g));
}

}  // namespace

CompiledArtifact compile_naive(const GraphProgram& g) {
    require_valid(g);
    const auto edges = sorted_edges(g);
    const int n = g.vertices;
    const int e_count = int(edges.size());

    CompiledArtifact a;
    a.pipeline = "naive8";
    a.circuit.modes = 2 * n + 2 * e_count;
    a.circuit.input.occ.assign(std::size_t(a.circuit.modes), 0);

    auto zrail = [](int q) { return 2 * q; };
    auto orail = [](int q) { return 2 * q + 1; };
    for (int q = 0; q < n; ++q) a.circuit.input.occ[std::size_t(zrail(q))] = 1;

    std::vector<Layer> staging;
    Layer prep;
    for (int q = 0; q < n; ++q)
        prep.gates.push_back({zrail(q), orail(q), balanced_beam_splitter(), "bs"});
    staging.push_back(std::move(prep));

    const GateBlock block = knill_cz();
    for (int round = 1; round <= 3; ++round) {
        Layer l1, l2;
        bool any = false;
        for (int ei = 0; ei < e_count; ++ei) {
            const auto& e = edges[std::size_t(ei)];
            if (e.layer != round) continue;
            any = true;
            int anc = 2 * n + 2 * ei;
            std::vector<int> mode_map = {orail(e.u), anc, anc + 1, orail(e.v)};
            stamp_gates(l1, block.layers[0], mode_map);
            stamp_gates(l2, block.layers[1], mode_map);
            for (const auto& [m, ph] : block.ancilla_inputs)
                a.circuit.input.occ[std::size_t(mode_map[std::size_t(m)])] = ph;
            for (const auto& [m, ph] : block.postselect)
                a.postselection.required[mode_map[std::size_t(m)]] = ph;
        }
        if (any) {
            staging.push_back(std::move(l1));
            staging.push_back(std::move(l2));
        }
    }

    DualRailMap rails;
    for (int q = 0; q < n; ++q) rails.rails.emplace_back(zrail(q), orail(q));

    Layer basis;
    for (int v = 0; v < n; ++v) {
        if (g.is_output(v)) {
            a.output_vertices.push_back(v);
            a.output_rails.rails.push_back(rails.rails[std::size_t(v)]);
            a.circuit.output_modes.push_back(zrail(v));
            a.circuit.output_modes.push_back(orail(v));
            continue;
        }
        const auto& p = g.pattern[std::size_t(v)];
        basis.gates.push_back(encode_single_qubit(basis_rotation_for(p), v, rails));
        a.postselection.required[zrail(v)] = p.plus ? 1 : 0;
        a.postselection.required[orail(v)] = p.plus ? 0 : 1;
    }
    staging.push_back(std::move(basis));

    finish_artifact(a, g, std::move(staging));
    return a;
}

CompiledArtifact compile_depth4(const GraphProgram& g) {
    require_valid(g);
    const auto edges = sorted_edges(g);
    const int n = g.vertices;
    const int e_count = int(edges.size());

    auto zrail = [](int q) { return 2 * q; };
    auto orail = [](int q) { return 2 * q + 1; };

    // Round-robin carrier assignment per qubit, in edge-layer order:
    // mode_one first, mode_zero second, a teleported copy of mode_one third.
    struct Carrier {
        int mode = -1;
        bool zero_rail = false;
    };
    std::vector<int> slots_used(std::size_t(std::max(n, 0)), 0);
    std::vector<bool> teleported(std::size_t(std::max(n, 0)), false);
    std::vector<std::array<Carrier, 2>> carriers;
    carriers.resize(std::size_t(e_count));
    for (int ei = 0; ei < e_count; ++ei) {
        const auto& e = edges[std::size_t(ei)];
        int side = 0;
        for (int q : {e.u, e.v}) {
            int slot = slots_used[std::size_t(q)]++;
            Carrier c;
            if (slot == 0) {
                c = {orail(q), false};
            } else if (slot == 1) {
                c = {zrail(q), true};
            } else {
                teleported[std::size_t(q)] = true;
                c = {-(q + 1), false};  // teleport target, numbered below
            }
            carriers[std::size_t(ei)][std::size_t(side++)] = c;
        }
    }

    std::vector<int> tele_x(std::size_t(std::max(n, 0)), -1);
    std::vector<int> tele_y(std::size_t(std::max(n, 0)), -1);
    int tele_count = 0;
    for (int q = 0; q < n; ++q)
        if (teleported[std::size_t(q)]) {
            tele_x[std::size_t(q)] = 2 * n + 2 * e_count + 2 * tele_count;
            tele_y[std::size_t(q)] = tele_x[std::size_t(q)] + 1;
            ++tele_count;
        }
    for (auto& pair : carriers)
        for (auto& c : pair)
            if (c.mode < 0) c.mode = tele_y[std::size_t(-c.mode - 1)];

    CompiledArtifact a;
    a.pipeline = "depth4";
    a.circuit.modes = 2 * n + 2 * e_count + 2 * tele_count;
    a.circuit.input.occ.assign(std::size_t(a.circuit.modes), 0);
    for (int q = 0; q < n; ++q) a.circuit.input.occ[std::size_t(zrail(q))] = 1;

    std::vector<Layer> staging(4);

    for (int q = 0; q < n; ++q) {
        staging[0].gates.push_back({zrail(q), orail(q), balanced_beam_splitter(), "bs"});
        if (teleported[std::size_t(q)]) {
            staging[0].gates.push_back(
                {tele_x[std::size_t(q)], tele_y[std::size_t(q)], balanced_beam_splitter(), "bs"});
            a.circuit.input.occ[std::size_t(tele_x[std::size_t(q)])] = 1;
            a.postselection.required[orail(q)] = 1;
            a.postselection.required[tele_x[std::size_t(q)]] = 0;
            staging[3].gates.push_back(
                {orail(q), tele_x[std::size_t(q)], balanced_beam_splitter(), "bell"});
        }
    }

    const GateBlock block = knill_cz();
    for (int ei = 0; ei < e_count; ++ei) {
        const Carrier& cu = carriers[std::size_t(ei)][0];
        const Carrier& cv = carriers[std::size_t(ei)][1];
        int anc = 2 * n + 2 * ei;
        std::vector<int> mode_map = {cu.mode, anc, anc + 1, cv.mode};
        // pi phase on a port exactly when the other carrier is a zero rail
        if (cv.zero_rail) staging[0].phases.push_back({cu.mode, M_PI});
        if (cu.zero_rail) staging[0].phases.push_back({cv.mode, M_PI});
        stamp_gates(staging[1], block.layers[0], mode_map);
        stamp_gates(staging[2], block.layers[1], mode_map);
        for (const auto& [m, ph] : block.ancilla_inputs)
            a.circuit.input.occ[std::size_t(mode_map[std::size_t(m)])] = ph;
        for (const auto& [m, ph] : block.postselect)
            a.postselection.required[mode_map[std::size_t(m)]] = ph;
    }

    // rails after the teleport projections; the basis layer acts on these
    DualRailMap final_rails;
    for (int q = 0; q < n; ++q)
        final_rails.rails.emplace_back(
            zrail(q), teleported[std::size_t(q)] ? tele_y[std::size_t(q)] : orail(q));

    for (int v = 0; v < n; ++v) {
        int one_final = final_rails.rails[std::size_t(v)].second;
        if (g.is_output(v)) {
            a.output_vertices.push_back(v);
            a.output_rails.rails.push_back(final_rails.rails[std::size_t(v)]);
            a.circuit.output_modes.push_back(zrail(v));
            a.circuit.output_modes.push_back(one_final);
            continue;
        }
        const auto& p = g.pattern[std::size_t(v)];
        staging[3].gates.push_back(encode_single_qubit(basis_rotation_for(p), v, final_rails));
        a.postselection.required[zrail(v)] = p.plus ? 1 : 0;
        a.postselection.required[one_final] = p.plus ? 0 : 1;
    }

    finish_artifact(a, g, std::move(staging));
    if (a.depth > 4)
        throw Error("depth-4 pipeline produced depth " + std::to_string(a.depth));
    return a;
}

LogicalDistribution artifact_logical_distribution(const CompiledArtifact& a, std::uint64_t cap) {
    Distribution d = postselected_distribution(a.circuit, cap);

    // remaining modes after postselection, ascending; must equal the output
    // register
    std::vector<int> remaining;
    for (int m = 0; m < a.circuit.modes; ++m)
        if (!a.circuit.postselection.required.count(m)) remaining.push_back(m);
    std::vector<int> outs = a.circuit.output_modes;
    std::sort(outs.begin(), outs.end());
    if (remaining != outs)
        throw Error("artifact postselection does not pin every non-output mode");

    std::map<int, int> pos;
    for (std::size_t i = 0; i < remaining.size(); ++i) pos[remaining[i]] = int(i);

    std::map<std::string, double> probs;
    double invalid = 0.0;
    for (const auto& [state, p] : d.entries) {
        std::string key;
        key.reserve(a.output_rails.rails.size());
        bool ok = true;
        for (const auto& [z, o] : a.output_rails.rails) {
            int nz = state.occ[std::size_t(pos.at(z))];
            int no = state.occ[std::size_t(pos.at(o))];
            if (nz == 1 && no == 0)
                key += '0';
            else if (nz == 0 && no == 1)
                key += '1';
            else {
                ok = false;
                break;
            }
        }
        if (ok)
            probs[key] += p;
        else
            invalid += p;
    }
    if (invalid > kProbTol)
        throw Error("probability mass " + format_double(invalid) +
                    " escaped the dual-rail subspace; compiled blocks are leaking");

    LogicalDistribution out;
    out.success_probability = d.success_probability;
    for (auto& [k, p] : probs) out.entries.emplace_back(k, p);
    return out;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string serialize_artifact_metadata(const CompiledArtifact& a) {
    std::ostringstream os;
    os << "loqc-artifact v1\n";
    os << "pipeline " << a.pipeline << "\n";
    os << "depth " << a.depth << "\n";
    os << "modes " << a.circuit.modes << "\n";
    os << "photons " << a.circuit.input.total_photons() << "\n";
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016llx", (unsigned long long)a.source_digest);
    os << "source-digest " << digest << "\n";
    for (std::size_t i = 0; i < a.output_vertices.size(); ++i)
        os << "qubit " << a.output_vertices[i] << " " << a.output_rails.rails[i].first << " "
           << a.output_rails.rails[i].second << "\n";
    for (const auto& [m, k] : a.postselection.required) os << "postselect " << m << " " << k << "\n";
    os << "end\n";
    return os.str();
}

ArtifactMetadata parse_artifact_metadata(const std::string& text) {
    std::istringstream in(text);
    ArtifactMetadata md;
    std::string line;
    int line_no = 0;
    bool saw_header = false, saw_end = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) {
            if (t[0] == '#') break;
            toks.push_back(t);
        }
        if (toks.empty()) continue;
        const std::string& kw = toks[0];
        auto want = [&](std::size_t k) {
            if (toks.size() != k) throw ParseError("field '" + kw + "' has wrong arity", line_no);
        };
        if (!saw_header) {
            if (toks.size() != 2 || kw != "loqc-artifact" || toks[1] != "v1")
                throw ParseError("expected header 'loqc-artifact v1'", line_no);
            saw_header = true;
        } else if (kw == "pipeline") {
            want(2);
            md.pipeline = toks[1];
        } else if (kw == "depth") {
            want(2);
            md.depth = std::atoi(toks[1].c_str());
        } else if (kw == "modes") {
            want(2);
            md.modes = std::atoi(toks[1].c_str());
        } else if (kw == "photons") {
            want(2);
            md.photons = std::atoi(toks[1].c_str());
        } else if (kw == "source-digest") {
            want(2);
            md.source_digest = std::strtoull(toks[1].c_str(), nullptr, 16);
        } else if (kw == "qubit") {
            want(4);
            md.output_vertices.push_back(std::atoi(toks[1].c_str()));
            md.output_rails.rails.emplace_back(std::atoi(toks[2].c_str()),
                                               std::atoi(toks[3].c_str()));
        } else if (kw == "postselect") {
            want(3);
            md.postselection.required[std::atoi(toks[1].c_str())] = std::atoi(toks[2].c_str());
        } else if (kw == "end") {
            saw_end = true;
            break;
        } else {
            throw ParseError("unknown field '" + kw + "'", line_no);
        }
    }
    if (!saw_end) throw ParseError("missing 'end' (truncated file?)", line_no);
    return md;
}

}  // namespace loqc
