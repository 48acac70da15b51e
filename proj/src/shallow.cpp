#include "loqc/shallow.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <set>

#include "loqc/fock.hpp"

namespace loqc {

namespace {

constexpr double kBranchPruneTol = 1e-15;  // conditional outcomes below this are exact zeros

struct SitePair {
    int a = -1;
    int b = -1;  // -1 for a lone site
    int low() const { return b < 0 ? a : std::min(a, b); }
};

// One chain measurement, fully precomputed: rows of `k` are measurement
// outcomes, columns are configurations of the measured sites.
struct MeasureOp {
    SitePair sites;
    CMat k;
    std::vector<std::array<int, 2>> labels;  // outcome values per row
};

struct Engine {
    int dim = 2;  // storage levels per site
    int site_count = 0;
    std::vector<ConditionalState> units;  // initial layer-1 states, cover all sites
    std::vector<MeasureOp> ops;           // cover all sites, index = pair id
    ChainPlan plan;
};

// union-find
struct DSU {
    std::vector<int> p;
    explicit DSU(int n) : p(std::size_t(n)) {
        for (int i = 0; i < n; ++i) p[std::size_t(i)] = i;
    }
    int find(int x) { return p[std::size_t(x)] == x ? x : p[std::size_t(x)] = find(p[std::size_t(x)]); }
    void join(int a, int b) { p[std::size_t(find(a))] = find(b); }
};

ChainPlan build_plan(int site_count, const std::vector<ConditionalState>& units,
                     const std::vector<MeasureOp>& ops, bool reverse) {
    std::vector<int> pair_of(std::size_t(site_count), -1);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        pair_of[std::size_t(ops[i].sites.a)] = int(i);
        if (ops[i].sites.b >= 0) pair_of[std::size_t(ops[i].sites.b)] = int(i);
    }

    // slot tracking mirrors what execution will do
    std::vector<int> slot_of(std::size_t(site_count), -1);
    std::vector<std::vector<int>> members;
    for (const auto& u : units) {
        for (int s : u.sites) slot_of[std::size_t(s)] = int(members.size());
        members.push_back(u.sites);
    }

    ChainPlan plan;
    plan.initial_slots = int(members.size());

    std::set<int> pending;
    for (std::size_t i = 0; i < ops.size(); ++i) pending.insert(int(i));
    std::vector<int> continuation;

    auto take_next = [&]() -> int {
        for (int s : continuation) {
            int pid = pair_of[std::size_t(s)];
            if (pid >= 0 && pending.count(pid)) return pid;
        }
        return reverse ? *pending.rbegin() : *pending.begin();
    };

    DSU dsu(site_count);
    for (const auto& u : units)
        for (std::size_t i = 1; i < u.sites.size(); ++i) dsu.join(u.sites[0], u.sites[i]);
    for (const auto& op : ops)
        if (op.sites.b >= 0) dsu.join(op.sites.a, op.sites.b);

    std::map<int, std::vector<int>> comp_steps;
    while (!pending.empty()) {
        int pid = take_next();
        pending.erase(pid);
        const auto& op = ops[std::size_t(pid)];

        ChainStep step;
        step.site_a = op.sites.a;
        step.site_b = op.sites.b;
        step.op_index = pid;
        step.slot_read_a = slot_of[std::size_t(op.sites.a)];
        if (op.sites.b >= 0 && slot_of[std::size_t(op.sites.b)] != step.slot_read_a)
            step.slot_read_b = slot_of[std::size_t(op.sites.b)];

        std::vector<int> partners;
        for (int slot : {step.slot_read_a, step.slot_read_b}) {
            if (slot < 0) continue;
            for (int s : members[std::size_t(slot)])
                if (s != op.sites.a && s != op.sites.b) partners.push_back(s);
        }
        std::sort(partners.begin(), partners.end());
        if (!partners.empty()) {
            step.slot_written = int(members.size());
            members.push_back(partners);
            for (int s : partners) slot_of[std::size_t(s)] = step.slot_written;
        }
        step.partners = partners;

        continuation = partners;
        if (reverse) std::reverse(continuation.begin(), continuation.end());

        comp_steps[dsu.find(op.sites.a)].push_back(int(plan.steps.size()));
        plan.steps.push_back(std::move(step));
    }
    for (auto& [root, steps] : comp_steps) plan.components.push_back(std::move(steps));
    return plan;
}

// ---- joint-state machinery ----

using StateRef = std::shared_ptr<const ConditionalState>;

// Tensor of the contexts of the measured sites, re-ordered so the measured
// sites come first.
ConditionalState gather_joint(int dim, const SitePair& sites,
                              const std::map<int, StateRef>& slot_of) {
    std::vector<StateRef> ctx;
    ctx.push_back(slot_of.at(sites.a));
    if (sites.b >= 0) {
        StateRef sb = slot_of.at(sites.b);
        if (sb != ctx[0]) ctx.push_back(sb);
    }

    std::vector<int> src_sites;
    for (const auto& s : ctx) src_sites.insert(src_sites.end(), s->sites.begin(), s->sites.end());

    std::vector<int> order;  // measured first, then the rest in source order
    order.push_back(sites.a);
    if (sites.b >= 0) order.push_back(sites.b);
    for (int s : src_sites)
        if (s != sites.a && s != sites.b) order.push_back(s);

    const int k = int(order.size());
    std::vector<std::size_t> src_stride(order.size());
    {
        // stride of each ordered site inside the concatenated source tensor
        std::map<int, std::size_t> stride_of;
        std::size_t block = 1;
        for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
            const auto& s = **it;
            std::size_t local = block;
            for (auto jt = s.sites.rbegin(); jt != s.sites.rend(); ++jt) {
                stride_of[*jt] = local;
                local *= std::size_t(dim);
            }
            block = local;
        }
        for (std::size_t i = 0; i < order.size(); ++i)
            src_stride[i] = stride_of.at(order[std::size_t(i)]);
    }

    std::size_t total = 1;
    for (int i = 0; i < k; ++i) total *= std::size_t(dim);

    ConditionalState joint;
    joint.sites = order;
    joint.amp.assign(total, cx{});
    std::vector<int> digit(std::size_t(k), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t src = 0;
        {
            std::size_t rem = idx;
            for (int i = k - 1; i >= 0; --i) {
                digit[std::size_t(i)] = int(rem % std::size_t(dim));
                rem /= std::size_t(dim);
            }
            for (int i = 0; i < k; ++i) src += src_stride[std::size_t(i)] * std::size_t(digit[std::size_t(i)]);
        }
        cx v = 1.0;
        if (ctx.size() == 1) {
            v = ctx[0]->amp[src];
        } else {
            std::size_t d1 = ctx[1]->amp.size();
            v = ctx[0]->amp[src / d1] * ctx[1]->amp[src % d1];
        }
        joint.amp[idx] = v;
    }
    return joint;
}

struct Outcome {
    double probability = 0.0;
    ConditionalState leftover;  // normalized; empty sites means nothing left
};

std::vector<Outcome> step_outcomes(int dim, const MeasureOp& op,
                                   const std::map<int, StateRef>& slot_of) {
    ConditionalState joint = gather_joint(dim, op.sites, slot_of);
    const int measured = op.sites.b >= 0 ? 2 : 1;
    std::size_t cfgs = 1;
    for (int i = 0; i < measured; ++i) cfgs *= std::size_t(dim);
    const std::size_t rest = joint.amp.size() / cfgs;
    if (std::size_t(op.k.cols()) != cfgs) throw Error("measurement operator shape mismatch");

    std::vector<int> rest_sites(joint.sites.begin() + measured, joint.sites.end());
    std::vector<Outcome> out(std::size_t(op.k.rows()));
    for (int r = 0; r < op.k.rows(); ++r) {
        auto& o = out[std::size_t(r)];
        o.leftover.sites = rest_sites;
        o.leftover.amp.assign(rest, cx{});
        for (std::size_t cfg = 0; cfg < cfgs; ++cfg) {
            cx w = op.k.at(r, int(cfg));
            if (w == cx{}) continue;
            const cx* src = joint.amp.data() + cfg * rest;
            for (std::size_t i = 0; i < rest; ++i) o.leftover.amp[i] += w * src[i];
        }
        double p = 0.0;
        for (const cx& v : o.leftover.amp) p += std::norm(v);
        o.probability = p;
        if (p > 0.0) {
            double inv = 1.0 / std::sqrt(p);
            for (cx& v : o.leftover.amp) v *= inv;
        }
    }
    return out;
}

void apply_step(std::map<int, StateRef>& slot_of, const MeasureOp& op, ConditionalState leftover) {
    slot_of.erase(op.sites.a);
    if (op.sites.b >= 0) slot_of.erase(op.sites.b);
    if (!leftover.sites.empty()) {
        auto shared = std::make_shared<const ConditionalState>(std::move(leftover));
        for (int s : shared->sites) slot_of[s] = shared;
    }
}

std::map<int, StateRef> initial_slots(const Engine& eng) {
    std::map<int, StateRef> slot_of;
    for (const auto& u : eng.units) {
        auto shared = std::make_shared<const ConditionalState>(u);
        for (int s : shared->sites) slot_of[s] = shared;
    }
    return slot_of;
}

// one full pass over the plan, sampling every step
std::vector<int> run_sampled(const Engine& eng, std::mt19937_64& rng) {
    auto slot_of = initial_slots(eng);
    std::vector<int> assignment(std::size_t(eng.site_count), 0);
    for (const auto& step : eng.plan.steps) {
        const auto& op = eng.ops[std::size_t(step.op_index)];
        auto outs = step_outcomes(eng.dim, op, slot_of);
        double u = uniform_from_bits(rng());
        double acc = 0.0;
        std::size_t chosen = outs.size();
        std::size_t best = 0;
        for (std::size_t r = 0; r < outs.size(); ++r) {
            if (outs[r].probability > outs[best].probability) best = r;
            acc += outs[r].probability;
            if (u < acc) {
                chosen = r;
                break;
            }
        }
        if (chosen == outs.size()) chosen = best;  // u landed in rounding slack
        assignment[std::size_t(op.sites.a)] = op.labels[chosen][0];
        if (op.sites.b >= 0) assignment[std::size_t(op.sites.b)] = op.labels[chosen][1];
        apply_step(slot_of, op, std::move(outs[chosen].leftover));
    }
    return assignment;
}

struct WeightedAssignment {
    std::vector<int> values;  // full site assignment (unset sites 0)
    double probability = 1.0;
};

// enumerate one chain component
void enumerate_component(const Engine& eng, const std::vector<int>& step_ids, std::size_t idx,
                         std::map<int, StateRef> slot_of, std::vector<int>& values, double prob,
                         std::vector<WeightedAssignment>& out, std::uint64_t cap) {
    if (idx == step_ids.size()) {
        if (out.size() >= cap)
            throw ResourceLimitError("chain enumeration exceeded the cap of " + std::to_string(cap),
                                     cap);
        out.push_back({values, prob});
        return;
    }
    const auto& step = eng.plan.steps[std::size_t(step_ids[idx])];
    const auto& op = eng.ops[std::size_t(step.op_index)];
    auto outs = step_outcomes(eng.dim, op, slot_of);
    for (std::size_t r = 0; r < outs.size(); ++r) {
        if (outs[r].probability < kBranchPruneTol) continue;
        auto next_slots = slot_of;
        values[std::size_t(op.sites.a)] = op.labels[r][0];
        if (op.sites.b >= 0) values[std::size_t(op.sites.b)] = op.labels[r][1];
        apply_step(next_slots, op, outs[r].leftover);
        enumerate_component(eng, step_ids, idx + 1, std::move(next_slots), values,
                            prob * outs[r].probability, out, cap);
    }
    values[std::size_t(op.sites.a)] = 0;
    if (op.sites.b >= 0) values[std::size_t(op.sites.b)] = 0;
}

std::vector<WeightedAssignment> enumerate_all(const Engine& eng, std::uint64_t cap) {
    std::vector<WeightedAssignment> joint;
    joint.push_back({std::vector<int>(std::size_t(eng.site_count), 0), 1.0});
    auto base_slots = initial_slots(eng);
    for (const auto& comp : eng.plan.components) {
        std::vector<WeightedAssignment> part;
        std::vector<int> values(std::size_t(eng.site_count), 0);
        enumerate_component(eng, comp, 0, base_slots, values, 1.0, part, cap);
        std::vector<WeightedAssignment> merged;
        if (joint.size() * part.size() > cap)
            throw ResourceLimitError("outcome enumeration exceeded the cap of " + std::to_string(cap),
                                     joint.size() * part.size());
        merged.reserve(joint.size() * part.size());
        std::set<int> comp_sites;
        for (int sid : comp) {
            comp_sites.insert(eng.plan.steps[std::size_t(sid)].site_a);
            if (eng.plan.steps[std::size_t(sid)].site_b >= 0)
                comp_sites.insert(eng.plan.steps[std::size_t(sid)].site_b);
        }
        for (const auto& j : joint)
            for (const auto& p : part) {
                WeightedAssignment w = j;
                for (int s : comp_sites) w.values[std::size_t(s)] = p.values[std::size_t(s)];
                w.probability *= p.probability;
                merged.push_back(std::move(w));
            }
        joint = std::move(merged);
    }
    return joint;
}

// ---- engine construction ----

// Indices of layers that actually advance the circuit; throws for depth > 2.
template <typename LayerSeq, typename NonTrivial>
std::vector<int> effective_rounds(const LayerSeq& layers, NonTrivial&& keep) {
    std::vector<int> rounds;
    for (std::size_t i = 0; i < layers.size(); ++i)
        if (keep(layers[i])) rounds.push_back(int(i));
    if (rounds.size() > 2)
        throw UnsupportedDepthError(
            "circuit depth " + std::to_string(rounds.size()) +
                " unsupported by the chain simulator; offending layer index " +
                std::to_string(rounds[2]),
            rounds[2]);
    return rounds;
}

Engine build_qubit_engine(const QubitCircuit& c, bool reverse) {
    require_valid(c);
    auto rounds = effective_rounds(c.layers, [](const std::vector<TwoQubitGate>& l) {
        return !l.empty();
    });
    for (const auto& role : c.roles)
        if (role != QubitRole::Report)
            throw Error("postselected qubit circuits are outside the depth-2 engine");

    Engine eng;
    eng.dim = 2;
    eng.site_count = c.qubits;

    auto prep_of = [&](int q) -> CMat {
        return c.prep.empty() ? CMat::identity(2) : c.prep[std::size_t(q)];
    };
    auto rot_of = [&](int q) -> CMat {
        return c.basis_rotation.empty() ? CMat::identity(2) : c.basis_rotation[std::size_t(q)];
    };

    const std::vector<TwoQubitGate>* prep_round = nullptr;
    const std::vector<TwoQubitGate>* meas_round = nullptr;
    if (rounds.size() == 2) {
        prep_round = &c.layers[std::size_t(rounds[0])];
        meas_round = &c.layers[std::size_t(rounds[1])];
    } else if (rounds.size() == 1) {
        meas_round = &c.layers[std::size_t(rounds[0])];
    }

    std::vector<bool> in_unit(std::size_t(c.qubits), false);
    if (prep_round)
        for (const auto& g : *prep_round) {
            ConditionalState u;
            u.sites = {g.q1, g.q2};
            u.amp.assign(4, cx{});
            CMat p1 = prep_of(g.q1), p2 = prep_of(g.q2);
            for (int i = 0; i < 4; ++i)
                for (int x1 = 0; x1 < 2; ++x1)
                    for (int x2 = 0; x2 < 2; ++x2)
                        u.amp[std::size_t(i)] += g.u.at(i, 2 * x1 + x2) * p1.at(x1, 0) * p2.at(x2, 0);
            eng.units.push_back(std::move(u));
            in_unit[std::size_t(g.q1)] = in_unit[std::size_t(g.q2)] = true;
        }
    for (int q = 0; q < c.qubits; ++q) {
        if (in_unit[std::size_t(q)]) continue;
        ConditionalState u;
        u.sites = {q};
        u.amp = {prep_of(q).at(0, 0), prep_of(q).at(1, 0)};
        eng.units.push_back(std::move(u));
    }

    std::vector<bool> measured_paired(std::size_t(c.qubits), false);
    if (meas_round)
        for (const auto& g : *meas_round) {
            MeasureOp op;
            op.sites = {g.q1, g.q2};
            CMat r1 = rot_of(g.q1), r2 = rot_of(g.q2);
            CMat rr(4, 4);
            for (int i1 = 0; i1 < 2; ++i1)
                for (int i2 = 0; i2 < 2; ++i2)
                    for (int j1 = 0; j1 < 2; ++j1)
                        for (int j2 = 0; j2 < 2; ++j2)
                            rr.at(2 * i1 + i2, 2 * j1 + j2) = r1.at(i1, j1) * r2.at(i2, j2);
            op.k = rr.mul(g.u);
            for (int r = 0; r < 4; ++r) op.labels.push_back({r / 2, r % 2});
            eng.ops.push_back(std::move(op));
            measured_paired[std::size_t(g.q1)] = measured_paired[std::size_t(g.q2)] = true;
        }
    for (int q = 0; q < c.qubits; ++q) {
        if (measured_paired[std::size_t(q)]) continue;
        MeasureOp op;
        op.sites = {q, -1};
        op.k = rot_of(q);
        op.labels = {{0, 0}, {1, 0}};
        eng.ops.push_back(std::move(op));
    }
    std::sort(eng.ops.begin(), eng.ops.end(),
              [](const MeasureOp& x, const MeasureOp& y) { return x.sites.low() < y.sites.low(); });

    eng.plan = build_plan(eng.site_count, eng.units, eng.ops, reverse);
    return eng;
}

Engine build_optical_engine(const OpticalCircuit& c_in, bool reverse) {
    require_valid(c_in);
    OpticalCircuit c = absorb_phases(c_in);
    auto rounds = effective_rounds(c.layers, [](const Layer& l) {
        for (const auto& g : l.gates)
            if (!is_identity_gate(g)) return true;
        return false;
    });
    if (!c_in.postselection.empty())
        throw Error("postselected circuits are outside the depth-2 engine; use the Fock backend");
    for (int v : c_in.input.occ)
        if (v > 1) throw Error("multi-photon input modes are outside the depth-2 engine");

    Engine eng;
    eng.dim = 3;  // a collapsed mode holds at most two photons
    eng.site_count = c.modes;

    const Layer* prep_round = nullptr;
    const Layer* meas_round = nullptr;
    if (rounds.size() == 2) {
        prep_round = &c.layers[std::size_t(rounds[0])];
        meas_round = &c.layers[std::size_t(rounds[1])];
    } else if (rounds.size() == 1) {
        meas_round = &c.layers[std::size_t(rounds[0])];
    }

    std::vector<bool> in_unit(std::size_t(c.modes), false);
    if (prep_round)
        for (const auto& g : prep_round->gates) {
            int na = c.input.occ[std::size_t(g.mode_a)];
            int nb = c.input.occ[std::size_t(g.mode_b)];
            int total = na + nb;
            if (total > 2) throw Error("layer-1 unit with more than two photons");
            ConditionalState u;
            u.sites = {g.mode_a, g.mode_b};
            u.amp.assign(9, cx{});
            CMat sector = two_mode_sector_matrix(g.u, total);
            for (int j = 0; j <= total; ++j) u.amp[std::size_t(3 * j + (total - j))] = sector.at(j, na);
            eng.units.push_back(std::move(u));
            in_unit[std::size_t(g.mode_a)] = in_unit[std::size_t(g.mode_b)] = true;
        }
    for (int m = 0; m < c.modes; ++m) {
        if (in_unit[std::size_t(m)]) continue;
        ConditionalState u;
        u.sites = {m};
        u.amp.assign(3, cx{});
        u.amp[std::size_t(c.input.occ[std::size_t(m)])] = 1.0;
        eng.units.push_back(std::move(u));
    }

    // outcome rows for a measured pair: (j, k) with j + k <= 4, lexicographic
    std::vector<std::array<int, 2>> pair_labels;
    for (int j = 0; j <= 4; ++j)
        for (int k = 0; j + k <= 4; ++k) pair_labels.push_back({j, k});

    std::vector<bool> measured_paired(std::size_t(c.modes), false);
    if (meas_round)
        for (const auto& g : meas_round->gates) {
            MeasureOp op;
            op.sites = {g.mode_a, g.mode_b};
            op.labels = pair_labels;
            op.k = CMat(int(pair_labels.size()), 9);
            std::vector<CMat> sectors;
            for (int n = 0; n <= 4; ++n) sectors.push_back(two_mode_sector_matrix(g.u, n));
            for (std::size_t r = 0; r < pair_labels.size(); ++r) {
                int j = pair_labels[r][0], k = pair_labels[r][1];
                for (int xa = 0; xa <= 2; ++xa)
                    for (int xb = 0; xb <= 2; ++xb)
                        if (xa + xb == j + k) op.k.at(int(r), 3 * xa + xb) = sectors[std::size_t(j + k)].at(j, xa);
            }
            eng.ops.push_back(std::move(op));
            measured_paired[std::size_t(g.mode_a)] = measured_paired[std::size_t(g.mode_b)] = true;
        }
    for (int m = 0; m < c.modes; ++m) {
        if (measured_paired[std::size_t(m)]) continue;
        MeasureOp op;
        op.sites = {m, -1};
        op.k = CMat::identity(3);
        op.labels = {{0, 0}, {1, 0}, {2, 0}};
        eng.ops.push_back(std::move(op));
    }
    std::sort(eng.ops.begin(), eng.ops.end(),
              [](const MeasureOp& x, const MeasureOp& y) { return x.sites.low() < y.sites.low(); });

    eng.plan = build_plan(eng.site_count, eng.units, eng.ops, reverse);
    return eng;
}

}  // namespace

ChainPlan chain_plan(const QubitCircuit& c, bool reverse_tie_break) {
    return build_qubit_engine(c, reverse_tie_break).plan;
}

ChainPlan chain_plan(const OpticalCircuit& c, bool reverse_tie_break) {
    return build_optical_engine(c, reverse_tie_break).plan;
}

std::vector<std::string> simulate_depth2_qubits(const QubitCircuit& c, long long shots,
                                                std::uint64_t seed) {
    Engine eng = build_qubit_engine(c, false);
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    out.reserve(std::size_t(std::max<long long>(shots, 0)));
    for (long long s = 0; s < shots; ++s) {
        auto a = run_sampled(eng, rng);
        std::string key;
        key.reserve(a.size());
        for (int v : a) key += char('0' + v);
        out.push_back(std::move(key));
    }
    return out;
}

std::vector<FockState> simulate_depth2_optical(const OpticalCircuit& c, long long shots,
                                               std::uint64_t seed) {
    Engine eng = build_optical_engine(c, false);
    std::mt19937_64 rng(seed);
    std::vector<FockState> out;
    out.reserve(std::size_t(std::max<long long>(shots, 0)));
    for (long long s = 0; s < shots; ++s) out.emplace_back(run_sampled(eng, rng));
    return out;
}

LogicalDistribution exact_distribution_depth2(const QubitCircuit& c, const ShallowOptions& opt) {
    Engine eng = build_qubit_engine(c, opt.reverse_tie_break);
    auto joint = enumerate_all(eng, opt.enumeration_cap);
    std::map<std::string, double> probs;
    for (const auto& w : joint) {
        std::string key;
        key.reserve(w.values.size());
        for (int v : w.values) key += char('0' + v);
        probs[key] += w.probability;
    }
    LogicalDistribution d;
    for (auto& [k, p] : probs) d.entries.emplace_back(k, p);
    return d;
}

Distribution exact_distribution_depth2(const OpticalCircuit& c, const ShallowOptions& opt) {
    Engine eng = build_optical_engine(c, opt.reverse_tie_break);
    auto joint = enumerate_all(eng, opt.enumeration_cap);
    std::map<FockState, double> probs;
    for (const auto& w : joint) probs[FockState(w.values)] += w.probability;
    Distribution d;
    for (auto& [k, p] : probs) d.entries.emplace_back(k, p);
    return d;
}

std::uint64_t derive_worker_seed(std::uint64_t seed, int worker) {
    // splitmix64 over (seed, worker)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (std::uint64_t(worker) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace loqc
