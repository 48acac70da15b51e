#include "loqc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace loqc {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& tok, int line) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw ParseError("bad number '" + tok + "'", line);
    return v;
}

CMat mat2(cx a, cx b, cx c, cx d) {
    CMat m(2, 2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return m;
}

CMat balanced_beam_splitter() {
    const double r = 1.0 / std::sqrt(2.0);
    return mat2(r, r, r, -r);
}

bool is_identity_gate(const TwoModeGate& g, double tol) {
    return g.u.rows() == 2 && g.u.cols() == 2 &&
           g.u.max_abs_diff(CMat::identity(2)) <= tol;
}

int depth(const OpticalCircuit& c) {
    int d = 0;
    for (const auto& layer : c.layers) {
        bool counts = false;
        for (const auto& g : layer.gates)
            if (!is_identity_gate(g)) counts = true;
        if (counts) ++d;
    }
    return d;
}

CMat interferometer(const OpticalCircuit& c) {
    CMat u = CMat::identity(c.modes);
    for (const auto& layer : c.layers) {
        for (const auto& g : layer.gates) {
            // left-multiply the embedded gate: rewrite rows mode_a, mode_b
            for (int j = 0; j < c.modes; ++j) {
                cx ra = u.at(g.mode_a, j);
                cx rb = u.at(g.mode_b, j);
                u.at(g.mode_a, j) = g.u.at(0, 0) * ra + g.u.at(0, 1) * rb;
                u.at(g.mode_b, j) = g.u.at(1, 0) * ra + g.u.at(1, 1) * rb;
            }
        }
        for (const auto& p : layer.phases) {
            cx f = std::polar(1.0, p.phase);
            for (int j = 0; j < c.modes; ++j) u.at(p.mode, j) *= f;
        }
    }
    return u;
}

int sparsity(const CMat& u, double threshold) {
    if (u.rows() != u.cols()) throw DimensionError("sparsity requires a square matrix");
    int best = 0;
    for (int i = 0; i < u.rows(); ++i) {
        int nr = 0, nc = 0;
        for (int j = 0; j < u.cols(); ++j) {
            if (std::abs(u.at(i, j)) > threshold) ++nr;
            if (std::abs(u.at(j, i)) > threshold) ++nc;
        }
        best = std::max({best, nr, nc});
    }
    return best;
}

std::vector<Violation> validate(const OpticalCircuit& c) {
    std::vector<Violation> out;
    auto add = [&](std::string ctx, std::string msg) {
        out.push_back({std::move(ctx), std::move(msg)});
    };

    if (c.modes < 0) add("", "negative mode count");
    if (c.input.modes() != c.modes)
        add("input", "occupation vector has " + std::to_string(c.input.modes()) +
                         " entries for " + std::to_string(c.modes) + " modes");
    for (int i = 0; i < c.input.modes(); ++i)
        if (c.input.occ[i] < 0) add("input", "negative occupation at mode " + std::to_string(i));

    for (std::size_t li = 0; li < c.layers.size(); ++li) {
        const auto& layer = c.layers[li];
        std::string ctx = "layer " + std::to_string(li);
        std::set<int> used;
        std::set<int> overlap;
        for (const auto& g : layer.gates) {
            if (g.mode_a == g.mode_b) add(ctx, "gate acts twice on mode " + std::to_string(g.mode_a));
            for (int m : {g.mode_a, g.mode_b}) {
                if (m < 0 || m >= c.modes) add(ctx, "gate mode " + std::to_string(m) + " out of range");
                if (!used.insert(m).second) overlap.insert(m);
            }
            if (g.u.rows() != 2 || g.u.cols() != 2) {
                add(ctx, "gate on (" + std::to_string(g.mode_a) + "," + std::to_string(g.mode_b) +
                             ") is not 2x2");
            } else if (!g.u.is_unitary()) {
                add(ctx, "gate on (" + std::to_string(g.mode_a) + "," + std::to_string(g.mode_b) +
                             ") is not unitary");
            }
        }
        if (!overlap.empty()) {
            std::string s = "modes overlap {";
            bool first = true;
            for (int m : overlap) {
                if (!first) s += ',';
                s += std::to_string(m);
                first = false;
            }
            add(ctx, s + "}");
        }
        for (const auto& p : layer.phases) {
            if (p.mode < 0 || p.mode >= c.modes)
                add(ctx, "phase mode " + std::to_string(p.mode) + " out of range");
            if (!(p.phase >= 0.0) || !(p.phase < 2 * M_PI) || !std::isfinite(p.phase))
                add(ctx, "phase value " + format_double(p.phase) + " outside [0, 2pi)");
        }
    }

    for (const auto& [m, k] : c.postselection.required) {
        if (m < 0 || m >= c.modes) add("postselect", "mode " + std::to_string(m) + " out of range");
        if (k < 0) add("postselect", "negative photon count for mode " + std::to_string(m));
    }
    std::set<int> outs;
    for (int m : c.output_modes) {
        if (m < 0 || m >= c.modes) add("outputs", "mode " + std::to_string(m) + " out of range");
        if (!outs.insert(m).second) add("outputs", "duplicate mode " + std::to_string(m));
        if (c.postselection.required.count(m))
            add("outputs", "mode " + std::to_string(m) + " is also postselected");
    }
    return out;
}

void require_valid(const OpticalCircuit& c) {
    auto v = validate(c);
    if (v.empty()) return;
    std::string msg = "invalid circuit:";
    for (const auto& viol : v) msg += "\n  " + viol.str();
    throw ValidationError(msg);
}

OpticalCircuit absorb_phases(const OpticalCircuit& c) {
    OpticalCircuit out = c;
    // (layer, gate index, row or column side) of the chosen host per phase
    for (std::size_t li = 0; li < out.layers.size(); ++li) {
        auto phases = std::move(out.layers[li].phases);
        out.layers[li].phases.clear();
        for (const auto& p : phases) {
            cx f = std::polar(1.0, p.phase);
            TwoModeGate* before = nullptr;  // latest gate on p.mode at layer <= li
            for (std::size_t lj = 0; lj <= li; ++lj)
                for (auto& g : out.layers[lj].gates)
                    if (g.mode_a == p.mode || g.mode_b == p.mode) before = &g;
            if (before) {
                // phase applies after the gate: scale that mode's row
                int r = (before->mode_a == p.mode) ? 0 : 1;
                before->u.at(r, 0) *= f;
                before->u.at(r, 1) *= f;
                continue;
            }
            TwoModeGate* after = nullptr;  // earliest gate on p.mode at layer > li
            for (std::size_t lj = li + 1; lj < out.layers.size() && !after; ++lj)
                for (auto& g : out.layers[lj].gates)
                    if (!after && (g.mode_a == p.mode || g.mode_b == p.mode)) after = &g;
            if (after) {
                // phase applies before the gate: scale that mode's column
                int cidx = (after->mode_a == p.mode) ? 0 : 1;
                after->u.at(0, cidx) *= f;
                after->u.at(1, cidx) *= f;
                continue;
            }
            out.layers[li].phases.push_back(p);  // free phase, zero depth anyway
        }
    }
    return out;
}

namespace {

struct LineReader {
    std::istringstream in;
    int line_no = 0;

    explicit LineReader(const std::string& text) : in(text) {}

    std::optional<std::vector<std::string>> next() {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            std::vector<std::string> toks;
            std::istringstream ls(line);
            std::string t;
            while (ls >> t) {
                if (t[0] == '#') break;
                toks.push_back(t);
            }
            if (!toks.empty()) return toks;
        }
        return std::nullopt;
    }
};

int parse_int(const std::string& tok, int line) {
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') throw ParseError("bad integer '" + tok + "'", line);
    return int(v);
}

void need(bool ok, const std::string& what, int line) {
    if (!ok) throw ParseError(what, line);
}

}  // namespace

std::string serialize_circuit(const OpticalCircuit& c) {
    std::string s;
    s += "loqc-circuit v1\n";
    s += "modes " + std::to_string(c.modes) + "\n";
    s += "input";
    for (int v : c.input.occ) s += " " + std::to_string(v);
    s += "\n";
    s += "layers " + std::to_string(c.layers.size()) + "\n";
    for (std::size_t li = 0; li < c.layers.size(); ++li) {
        for (const auto& g : c.layers[li].gates) {
            s += "gate " + std::to_string(li) + " " + std::to_string(g.mode_a) + " " +
                 std::to_string(g.mode_b);
            for (int r = 0; r < 2; ++r)
                for (int cidx = 0; cidx < 2; ++cidx) {
                    s += " " + format_double(g.u.at(r, cidx).real());
                    s += " " + format_double(g.u.at(r, cidx).imag());
                }
            if (!g.label.empty()) s += " " + g.label;
            s += "\n";
        }
        for (const auto& p : c.layers[li].phases)
            s += "phase " + std::to_string(li) + " " + std::to_string(p.mode) + " " +
                 format_double(p.phase) + "\n";
    }
    for (const auto& [m, k] : c.postselection.required)
        s += "postselect " + std::to_string(m) + " " + std::to_string(k) + "\n";
    s += "outputs";
    for (int m : c.output_modes) s += " " + std::to_string(m);
    s += "\n";
    s += "end\n";
    return s;
}

OpticalCircuit parse_circuit(const std::string& text) {
    LineReader rd(text);
    OpticalCircuit c;

    auto header = rd.next();
    need(header.has_value(), "empty circuit file", rd.line_no);
    need(header->size() == 2 && (*header)[0] == "loqc-circuit" && (*header)[1] == "v1",
         "expected header 'loqc-circuit v1'", rd.line_no);

    bool saw_modes = false, saw_input = false, saw_layers = false, saw_outputs = false,
         saw_end = false;
    while (auto toks_opt = rd.next()) {
        const auto& toks = *toks_opt;
        const std::string& kw = toks[0];
        int ln = rd.line_no;
        if (kw == "modes") {
            need(toks.size() == 2, "modes wants one value", ln);
            c.modes = parse_int(toks[1], ln);
            saw_modes = true;
        } else if (kw == "input") {
            need(saw_modes, "input before modes", ln);
            need(int(toks.size()) == c.modes + 1, "input wants one occupation per mode", ln);
            c.input.occ.clear();
            for (int i = 0; i < c.modes; ++i) c.input.occ.push_back(parse_int(toks[i + 1], ln));
            saw_input = true;
        } else if (kw == "layers") {
            need(toks.size() == 2, "layers wants one value", ln);
            int n = parse_int(toks[1], ln);
            need(n >= 0, "negative layer count", ln);
            c.layers.assign(n, {});
            saw_layers = true;
        } else if (kw == "gate") {
            need(saw_layers, "gate before layers", ln);
            need(toks.size() == 12 || toks.size() == 13, "gate wants layer, two modes, 8 numbers",
                 ln);
            int li = parse_int(toks[1], ln);
            need(li >= 0 && li < int(c.layers.size()), "gate layer out of range", ln);
            TwoModeGate g;
            g.mode_a = parse_int(toks[2], ln);
            g.mode_b = parse_int(toks[3], ln);
            g.u = CMat(2, 2);
            for (int k = 0; k < 4; ++k)
                g.u.at(k / 2, k % 2) =
                    cx(parse_double(toks[4 + 2 * k], ln), parse_double(toks[5 + 2 * k], ln));
            if (toks.size() == 13) g.label = toks[12];
            c.layers[li].gates.push_back(std::move(g));
        } else if (kw == "phase") {
            need(saw_layers, "phase before layers", ln);
            need(toks.size() == 4, "phase wants layer, mode, value", ln);
            int li = parse_int(toks[1], ln);
            need(li >= 0 && li < int(c.layers.size()), "phase layer out of range", ln);
            c.layers[li].phases.push_back({parse_int(toks[2], ln), parse_double(toks[3], ln)});
        } else if (kw == "postselect") {
            need(toks.size() == 3, "postselect wants mode and count", ln);
            c.postselection.required[parse_int(toks[1], ln)] = parse_int(toks[2], ln);
        } else if (kw == "outputs") {
            for (std::size_t i = 1; i < toks.size(); ++i)
                c.output_modes.push_back(parse_int(toks[i], ln));
            saw_outputs = true;
        } else if (kw == "end") {
            saw_end = true;
            break;
        } else {
            throw ParseError("unknown field '" + kw + "'", ln);
        }
    }
    need(saw_modes, "missing 'modes'", rd.line_no);
    need(saw_input, "missing 'input'", rd.line_no);
    need(saw_layers, "missing 'layers'", rd.line_no);
    need(saw_outputs, "missing 'outputs'", rd.line_no);
    need(saw_end, "missing 'end' (truncated file?)", rd.line_no);
    return c;
}

}  // namespace loqc
