#include "loqc/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "loqc/circuit.hpp"

namespace loqc {

std::vector<Violation> validate(const GraphProgram& g) {
    std::vector<Violation> out;
    auto add = [&](std::string ctx, std::string msg) {
        out.push_back({std::move(ctx), std::move(msg)});
    };

    if (g.vertices < 0) add("", "negative vertex count");
    if (int(g.pattern.size()) != g.vertices)
        add("pattern", "expected " + std::to_string(g.vertices) + " entries, got " +
                           std::to_string(g.pattern.size()));
    for (std::size_t i = 0; i < g.pattern.size(); ++i)
        if (std::abs(g.pattern[i].angle_q) > 2)
            add("pattern", "vertex " + std::to_string(i) + " angle outside {0, +-pi/4, +-pi/2}");

    std::vector<int> degree(std::size_t(std::max(g.vertices, 0)), 0);
    std::map<std::pair<int, int>, int> seen;  // (layer, vertex) -> count
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        std::string ctx = "edge " + std::to_string(i);
        if (e.u < 0 || e.u >= g.vertices || e.v < 0 || e.v >= g.vertices) {
            add(ctx, "vertex out of range");
            continue;
        }
        if (e.u == e.v) add(ctx, "self loop at vertex " + std::to_string(e.u));
        if (e.layer < 1 || e.layer > 3) add(ctx, "layer " + std::to_string(e.layer) + " outside 1..3");
        ++degree[std::size_t(e.u)];
        ++degree[std::size_t(e.v)];
        for (int v : {e.u, e.v})
            if (e.layer >= 1 && e.layer <= 3 && ++seen[{e.layer, v}] > 1)
                add(ctx, "vertex " + std::to_string(v) + " has two layer-" +
                             std::to_string(e.layer) + " edges");
    }
    for (int v = 0; v < g.vertices; ++v)
        if (degree[std::size_t(v)] > 3)
            add("", "vertex " + std::to_string(v) + " has degree " +
                        std::to_string(degree[std::size_t(v)]) + " > 3");

    std::set<int> outs;
    for (int v : g.output_vertices) {
        if (v < 0 || v >= g.vertices) add("outputs", "vertex " + std::to_string(v) + " out of range");
        if (!outs.insert(v).second) add("outputs", "duplicate vertex " + std::to_string(v));
    }
    return out;
}

void require_valid(const GraphProgram& g) {
    auto v = validate(g);
    if (v.empty()) return;
    std::string msg = "invalid graph program:";
    for (const auto& viol : v) msg += "\n  " + viol.str();
    throw ValidationError(msg);
}

GraphProgram brickwork_graph(int rows, int columns) {
    if (rows < 1 || columns < 1) throw Error("brickwork_graph wants rows >= 1 and columns >= 1");
    GraphProgram g;
    g.vertices = rows * columns;
    g.pattern.assign(std::size_t(g.vertices), {});
    auto id = [&](int r, int c) { return r * columns + c; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c + 1 < columns; ++c)
            g.edges.push_back({id(r, c), id(r, c + 1), (c % 2 == 0) ? 1 : 2});
    // rungs: period 4, offset 0 for even row pairs, 2 for odd row pairs
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = (r % 2 == 0) ? 0 : 2; c < columns; c += 4)
            g.edges.push_back({id(r, c), id(r + 1, c), 3});
    for (int r = 0; r < rows; ++r) g.output_vertices.push_back(id(r, columns - 1));
    return g;
}

std::string serialize_graph(const GraphProgram& g) {
    std::string s;
    s += "loqc-graph v1\n";
    s += "vertices " + std::to_string(g.vertices) + "\n";
    for (const auto& e : g.edges)
        s += "edge " + std::to_string(e.u) + " " + std::to_string(e.v) + " " +
             std::to_string(e.layer) + "\n";
    for (std::size_t v = 0; v < g.pattern.size(); ++v)
        s += "pattern " + std::to_string(v) + " " + std::to_string(g.pattern[v].angle_q) + " " +
             (g.pattern[v].plus ? "+" : "-") + "\n";
    s += "outputs";
    for (int v : g.output_vertices) s += " " + std::to_string(v);
    s += "\n";
    s += "end\n";
    return s;
}

namespace {

int parse_int_tok(const std::string& tok, int line) {
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') throw ParseError("bad integer '" + tok + "'", line);
    return int(v);
}

}  // namespace

GraphProgram parse_graph(const std::string& text) {
    std::istringstream in(text);
    GraphProgram g;
    std::string line;
    int line_no = 0;
    bool saw_header = false, saw_vertices = false, saw_outputs = false, saw_end = false;
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
        if (!saw_header) {
            if (toks.size() != 2 || kw != "loqc-graph" || toks[1] != "v1")
                throw ParseError("expected header 'loqc-graph v1'", line_no);
            saw_header = true;
            continue;
        }
        if (kw == "vertices") {
            if (toks.size() != 2) throw ParseError("vertices wants one value", line_no);
            g.vertices = parse_int_tok(toks[1], line_no);
            g.pattern.assign(std::size_t(std::max(g.vertices, 0)), {});
            saw_vertices = true;
        } else if (kw == "edge") {
            if (toks.size() != 4) throw ParseError("edge wants u, v, layer", line_no);
            g.edges.push_back({parse_int_tok(toks[1], line_no), parse_int_tok(toks[2], line_no),
                               parse_int_tok(toks[3], line_no)});
        } else if (kw == "pattern") {
            if (!saw_vertices) throw ParseError("pattern before vertices", line_no);
            if (toks.size() != 4) throw ParseError("pattern wants vertex, angle, outcome", line_no);
            int v = parse_int_tok(toks[1], line_no);
            if (v < 0 || v >= g.vertices) throw ParseError("pattern vertex out of range", line_no);
            VertexPattern p;
            p.angle_q = parse_int_tok(toks[2], line_no);
            if (toks[3] == "+")
                p.plus = true;
            else if (toks[3] == "-")
                p.plus = false;
            else
                throw ParseError("pattern outcome must be + or -", line_no);
            g.pattern[std::size_t(v)] = p;
        } else if (kw == "outputs") {
            for (std::size_t i = 1; i < toks.size(); ++i)
                g.output_vertices.push_back(parse_int_tok(toks[i], line_no));
            saw_outputs = true;
        } else if (kw == "end") {
            saw_end = true;
            break;
        } else {
            throw ParseError("unknown field '" + kw + "'", line_no);
        }
    }
    if (!saw_vertices) throw ParseError("missing 'vertices'", line_no);
    if (!saw_outputs) throw ParseError("missing 'outputs'", line_no);
    if (!saw_end) throw ParseError("missing 'end' (truncated file?)", line_no);
    return g;
}

CMat hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    return mat2(r, r, r, -r);
}

CMat rz(double theta) { return mat2(1.0, 0.0, 0.0, std::polar(1.0, theta)); }

CMat cz_gate() {
    CMat u = CMat::identity(4);
    u.at(3, 3) = -1.0;
    return u;
}

std::vector<cx> graph_state(const GraphProgram& g, int cap) {
    require_valid(g);
    if (g.vertices > cap)
        throw ResourceLimitError("graph has " + std::to_string(g.vertices) +
                                     " vertices, above the statevector cap of " + std::to_string(cap),
                                 std::uint64_t(g.vertices));
    const int n = g.vertices;
    const std::size_t dim = std::size_t(1) << n;
    std::vector<cx> psi(dim, cx(1.0 / std::sqrt(double(dim)), 0.0));
    for (const auto& e : g.edges) {
        std::size_t mu = std::size_t(1) << (n - 1 - e.u);
        std::size_t mv = std::size_t(1) << (n - 1 - e.v);
        for (std::size_t i = 0; i < dim; ++i)
            if ((i & mu) && (i & mv)) psi[i] = -psi[i];
    }
    return psi;
}

namespace {

void apply_1q(std::vector<cx>& psi, int n, int q, const CMat& u) {
    const std::size_t mask = std::size_t(1) << (n - 1 - q);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (i & mask) continue;
        cx a = psi[i], b = psi[i | mask];
        psi[i] = u.at(0, 0) * a + u.at(0, 1) * b;
        psi[i | mask] = u.at(1, 0) * a + u.at(1, 1) * b;
    }
}

void apply_2q(std::vector<cx>& psi, int n, int q1, int q2, const CMat& u) {
    const std::size_t m1 = std::size_t(1) << (n - 1 - q1);
    const std::size_t m2 = std::size_t(1) << (n - 1 - q2);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if ((i & m1) || (i & m2)) continue;
        std::size_t idx[4] = {i, i | m2, i | m1, i | m1 | m2};
        cx v[4];
        for (int k = 0; k < 4; ++k) v[k] = psi[idx[k]];
        for (int r = 0; r < 4; ++r) {
            cx acc{};
            for (int k = 0; k < 4; ++k) acc += u.at(r, k) * v[k];
            psi[idx[std::size_t(r)]] = acc;
        }
    }
}

}  // namespace

std::vector<Violation> validate(const QubitCircuit& c) {
    std::vector<Violation> out;
    auto add = [&](std::string ctx, std::string msg) {
        out.push_back({std::move(ctx), std::move(msg)});
    };
    if (c.qubits < 0) add("", "negative qubit count");
    auto check_1q = [&](const std::vector<CMat>& v, const char* what) {
        if (!v.empty() && int(v.size()) != c.qubits)
            add(what, "expected one 2x2 per qubit");
        for (std::size_t q = 0; q < v.size(); ++q)
            if (v[q].rows() != 2 || v[q].cols() != 2 || !v[q].is_unitary())
                add(what, "qubit " + std::to_string(q) + " gate is not a 2x2 unitary");
    };
    check_1q(c.prep, "prep");
    check_1q(c.basis_rotation, "basis_rotation");
    if (!c.roles.empty() && int(c.roles.size()) != c.qubits) add("roles", "expected one per qubit");
    for (std::size_t li = 0; li < c.layers.size(); ++li) {
        std::string ctx = "layer " + std::to_string(li);
        std::set<int> used;
        for (const auto& g : c.layers[li]) {
            if (g.q1 == g.q2) add(ctx, "gate acts twice on qubit " + std::to_string(g.q1));
            for (int q : {g.q1, g.q2}) {
                if (q < 0 || q >= c.qubits) add(ctx, "qubit " + std::to_string(q) + " out of range");
                if (!used.insert(q).second) add(ctx, "qubit " + std::to_string(q) + " used twice");
            }
            if (g.u.rows() != 4 || g.u.cols() != 4 || !g.u.is_unitary())
                add(ctx, "gate on (" + std::to_string(g.q1) + "," + std::to_string(g.q2) +
                             ") is not a 4x4 unitary");
        }
    }
    return out;
}

void require_valid(const QubitCircuit& c) {
    auto v = validate(c);
    if (v.empty()) return;
    std::string msg = "invalid qubit circuit:";
    for (const auto& viol : v) msg += "\n  " + viol.str();
    throw ValidationError(msg);
}

QubitCircuit flatten_postselect(const GraphProgram& g) {
    require_valid(g);
    QubitCircuit c;
    c.qubits = g.vertices;
    c.prep.assign(std::size_t(g.vertices), hadamard());
    for (int layer = 1; layer <= 3; ++layer) {
        std::vector<TwoQubitGate> round;
        for (const auto& e : g.edges)
            if (e.layer == layer) round.push_back({e.u, e.v, cz_gate()});
        if (!round.empty()) c.layers.push_back(std::move(round));
    }
    c.basis_rotation.assign(std::size_t(g.vertices), CMat::identity(2));
    c.roles.assign(std::size_t(g.vertices), QubitRole::Report);
    for (int v = 0; v < g.vertices; ++v) {
        if (g.is_output(v)) continue;
        double theta = g.pattern[std::size_t(v)].angle_q * M_PI / 4.0;
        c.basis_rotation[std::size_t(v)] = hadamard().mul(rz(-theta));
        c.roles[std::size_t(v)] =
            g.pattern[std::size_t(v)].plus ? QubitRole::PostselectZero : QubitRole::PostselectOne;
    }
    return c;
}

LogicalDistribution simulate(const QubitCircuit& c, int cap) {
    require_valid(c);
    if (c.qubits > cap)
        throw ResourceLimitError("circuit has " + std::to_string(c.qubits) +
                                     " qubits, above the statevector cap of " + std::to_string(cap),
                                 std::uint64_t(c.qubits));
    const int n = c.qubits;
    const std::size_t dim = std::size_t(1) << n;
    std::vector<cx> psi(dim, cx{});
    psi[0] = 1.0;
    for (std::size_t q = 0; q < c.prep.size(); ++q) apply_1q(psi, n, int(q), c.prep[q]);
    for (const auto& layer : c.layers)
        for (const auto& g : layer) apply_2q(psi, n, g.q1, g.q2, g.u);
    for (std::size_t q = 0; q < c.basis_rotation.size(); ++q)
        apply_1q(psi, n, int(q), c.basis_rotation[q]);

    std::vector<int> report;
    for (int q = 0; q < n; ++q)
        if (c.roles.empty() || c.roles[std::size_t(q)] == QubitRole::Report) report.push_back(q);

    std::map<std::string, double> probs;
    double matched = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        double p = std::norm(psi[i]);
        if (p == 0.0) continue;
        bool ok = true;
        for (int q = 0; q < n && ok; ++q) {
            if (c.roles.empty()) break;
            int bit = int((i >> (n - 1 - q)) & 1);
            if (c.roles[std::size_t(q)] == QubitRole::PostselectZero && bit != 0) ok = false;
            if (c.roles[std::size_t(q)] == QubitRole::PostselectOne && bit != 1) ok = false;
        }
        if (!ok) continue;
        matched += p;
        std::string key;
        key.reserve(report.size());
        for (int q : report) key += char('0' + ((i >> (n - 1 - q)) & 1));
        probs[key] += p;
    }
    if (matched < kProbTol)
        throw InfeasiblePostselectionError("postselection success probability " +
                                           format_double(matched) + " is below tolerance");
    LogicalDistribution d;
    d.success_probability = matched;
    for (auto& [k, p] : probs) d.entries.emplace_back(k, p / matched);
    return d;
}

LogicalDistribution logical_distribution(const GraphProgram& g, int cap) {
    return simulate(flatten_postselect(g), cap);
}

}  // namespace loqc
