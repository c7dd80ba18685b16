#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "vatsp/cutscan.hpp"
#include "vatsp/generate.hpp"
#include "vatsp/hardness.hpp"
#include "vatsp/heldkarp.hpp"
#include "vatsp/normalize.hpp"
#include "vatsp/oracle.hpp"
#include "vatsp/pipeline.hpp"
#include "vatsp/rng.hpp"
#include "vatsp/thin.hpp"
#include "vatsp/vortex_dp.hpp"

using namespace vatsp;

namespace {

// Exit codes.
constexpr int kOk = 0, kPropertyFailure = 1, kInputError = 2;

struct PropertyFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::uint64_t seed = 1;
    int guard_oracle = kOracleGuard;
    int guard_cuts = 16;
    std::string out;
    std::string format = "text";
};

ThinOptions thin_options(const RunConfig& cfg) {
    ThinOptions o;
    o.exhaustive_limit = cfg.guard_cuts;
    o.seed = cfg.seed;
    return o;
}

std::vector<std::string> file_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read_content_lines(in);
}

NearlyEmbeddableInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read_instance(in);
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream ls(line);
    std::vector<std::string> t;
    for (std::string s; ls >> s;) t.push_back(s);
    return t;
}

std::int64_t to_i64(const std::string& s) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size()) throw InputError("bad integer: " + s);
        return v;
    } catch (const std::logic_error&) {
        throw InputError("bad integer: " + s);
    }
}

int to_int(const std::string& s) { return static_cast<int>(to_i64(s)); }

std::string join(const std::vector<int>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

std::string join64(const std::vector<std::int64_t>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

Walk parse_walk(const std::vector<std::string>& t) {
    Walk w{{}, true};
    for (std::size_t i = 1; i < t.size(); ++i) w.seq.push_back(to_int(t[i]));
    if (w.seq.empty()) throw InputError("empty walk");
    return w;
}

// Key-value records of an artifact; the first line names its kind.
struct Artifact {
    std::string kind;
    std::vector<std::vector<std::string>> records;

    const std::vector<std::string>* find(const std::string& key) const {
        for (const auto& r : records)
            if (r[0] == key) return &r;
        return nullptr;
    }
    const std::vector<std::string>& need(const std::string& key) const {
        auto r = find(key);
        if (!r || r->size() < 2) throw InputError("artifact lacks a '" + key + "' record");
        return *r;
    }
};

Artifact load_artifact(const std::string& path) {
    auto lines = file_lines(path);
    if (lines.empty()) throw InputError("empty artifact");
    Artifact a;
    a.kind = lines[0];
    for (std::size_t i = 1; i < lines.size(); ++i) a.records.push_back(tokens(lines[i]));
    return a;
}

bool spans(const Walk& w, int n) {
    auto seen = visited_set(w, n);
    return std::count(seen.begin(), seen.end(), 0) == 0;
}

// ---- gen ---------------------------------------------------------------

int cmd_gen(const RunConfig& cfg, const Profile& pr, std::ostream& os) {
    write_instance(os, generate_instance(cfg.seed, pr));
    return kOk;
}

// ---- lp ----------------------------------------------------------------

LpPoint require_lp(const Digraph& g) {
    LpPoint lp = solve_lp(g);
    if (lp.status != LpPoint::Status::Optimal) throw InputError("LP infeasible: graph is not strongly connected");
    return lp;
}

int cmd_lp(const std::string& path, bool cuts_log, std::ostream& os) {
    auto inst = load_instance(path);
    LpPoint lp = require_lp(inst.graph);
    os << "lp\nobjective " << lp.objective << "\nrounds " << lp.rounds << '\n';
    for (int a = 0; a < inst.graph.num_arcs(); ++a)
        os << "x " << inst.graph.arc(a).src << ' ' << inst.graph.arc(a).dst << ' ' << lp.x[a] << '\n';
    if (cuts_log)
        for (const CutSide& c : lp.cuts) {
            std::vector<int> members;
            for (int v = 0; v < inst.num_vertices(); ++v)
                if (c.in[v]) members.push_back(v);
            os << "cut " << join(members) << '\n';
        }
    return kOk;
}

// ---- vortex-walk / oracle ----------------------------------------------

void write_walk(std::ostream& os, const std::string& kind, const Rational& cost, const Walk& w) {
    os << kind << "\ncost " << cost << "\nwalk " << join(w.seq) << '\n';
}

int cmd_vortex_walk(const RunConfig& cfg, const std::string& path, bool oracle, bool diff, std::ostream& os) {
    auto inst = load_instance(path);
    if (diff) {
        auto dp = optimal_vortex_walk_with_apices(inst);
        auto orc = oracle_vortex_walk(inst, cfg.guard_oracle);
        const bool equal = dp.cost == orc.cost;
        os << "vortex-walk-diff\ndp " << dp.cost << "\noracle " << orc.cost << "\nequal " << (equal ? "yes" : "no")
           << '\n';
        return equal ? kOk : kPropertyFailure;
    }
    auto r = oracle ? oracle_vortex_walk(inst, cfg.guard_oracle) : optimal_vortex_walk_with_apices(inst);
    if (!r.feasible) throw PropertyFailure("no closed walk through the vortex");
    write_walk(os, "vortex-walk", r.cost, r.walk);
    os << "apex-subset " << join(r.apex_subset) << '\n';
    return kOk;
}

int cmd_oracle(const RunConfig& cfg, const std::string& path, std::ostream& os) {
    auto inst = load_instance(path);
    auto r = oracle_atsp(inst.graph, cfg.guard_oracle);
    if (!r.feasible) throw PropertyFailure("no spanning closed walk");
    write_walk(os, "oracle", r.cost, r.walk);
    return kOk;
}

// ---- thin --------------------------------------------------------------

struct ThinInput {
    Symmetrization sym;
    LpPoint lp;
    SymZ z;
    Walk w;  // vortex mode only
};

ThinInput thin_input(const NearlyEmbeddableInstance& inst, const std::string& mode) {
    ThinInput in;
    in.sym = symmetrize(inst.graph);
    in.lp = require_lp(inst.graph);
    if (mode == "vortex") {
        auto vw = optimal_vortex_walk_with_apices(inst);
        if (!vw.feasible) throw InputError("no closed walk through the vortex");
        in.w = vw.walk;
        in.z = initial_weights(symmetrize_x(in.sym, augment(inst.graph, in.lp.x, in.w)), inst.num_vertices());
    } else {
        in.z = symmetrize_x(in.sym, in.lp.x);
    }
    return in;
}

int cmd_thin(const RunConfig& cfg, const std::string& path, const std::string& mode, std::ostream& os) {
    auto inst = load_instance(path);
    ThinInput in = thin_input(inst, mode);
    ThinOptions mopt = thin_options(cfg);
    std::vector<int> edges;
    Rational claimed(0);
    ThinMeasure measure;
    std::ostringstream extra;
    if (mode == "vortex") {
        auto r = thin_subgraph_nearly(inst, in.z, in.w, mopt);
        edges = r.t_edges;
        measure = r.t_measure;
        extra << "s-edges " << join(r.s_edges) << "\ns21 " << r.s21.size() << "\ns22 " << r.s22.size() << "\ns23 "
              << r.s23.size() << "\ns23-alpha " << r.s23_measure.alpha << '\n';
    } else {
        ApexOptions aopt;
        aopt.measure = mopt;
        aopt.tree.measure = mopt;
        ThinCertificate cert;
        if (mode == "planar") {
            cert = planar_thin_tree(in.sym.graph, in.z, aopt.tree);
        } else if (mode == "one-apex") {
            if (inst.apices.size() != 1) throw InputError("one-apex mode needs exactly one apex");
            cert = thin_tree_one_apex(in.sym.graph, inst.apices[0], in.z, aopt).cert;
        } else {
            if (inst.apices.empty()) throw InputError("a-apex mode needs apices");
            cert = thin_forest_a_apex(in.sym.graph, inst.apices, in.z, aopt).cert;
        }
        edges = cert.edges;
        claimed = cert.claimed;
        measure = cert.measure;
    }
    std::sort(edges.begin(), edges.end());
    os << "thin\nmode " << mode << "\nclaimed " << claimed << "\nalpha ";
    if (measure.infinite)
        os << "inf";
    else
        os << measure.alpha;
    os << "\nmeasure " << measure.label() << "\ncomponents " << count_components(in.sym.graph, edges) << '\n'
       << extra.str();
    for (int e : edges) os << "e " << e << ' ' << in.sym.graph.edge(e).u << ' ' << in.sym.graph.edge(e).v << '\n';
    if (!measure.infinite && claimed > Rational(0) && claimed < measure.alpha)
        throw PropertyFailure("measured alpha exceeds the claimed bound");
    return kOk;
}

// ---- tour --------------------------------------------------------------

int cmd_tour(const RunConfig& cfg, const std::string& path, bool compare, std::ostream& os) {
    auto inst = load_instance(path);
    TourOptions opt;
    opt.compare_oracle = compare;
    opt.oracle_guard = cfg.guard_oracle;
    opt.measure = thin_options(cfg);
    auto r = approximate_atsp(inst, opt);
    os << "tour\ncost " << r.cost << "\nlp-objective " << r.lp_objective << "\nwalk " << join(r.walk.seq)
       << "\nnormalized " << (r.normalized ? "yes" : "no") << "\nwalks " << r.walks << "\nthin-rounds "
       << r.thin_rounds << "\nalpha " << r.alpha << "\ns " << r.s_cost << "\nbound " << r.bound << '\n';
    for (const auto& c : r.certificates)
        os << "certificate " << c.stage << " claimed " << c.claimed << " alpha " << c.measure.alpha << ' '
           << c.measure.label() << '\n';
    for (const auto& l : r.ledger) os << "ledger " << l.stage << ' ' << l.cost << '\n';
    if (r.optimum) os << "optimum " << *r.optimum << "\nratio " << *r.ratio << '\n';
    return kOk;
}

// ---- normalize / merge-vortices ----------------------------------------

int cmd_normalize(const std::string& path, bool cross, bool grids, std::ostream& os) {
    auto inst = load_instance(path);
    Normalized n = cross ? cross_normalize(inst, grids) : facially_normalize(inst);
    // The certificate rides along as comments so the output still parses as an instance.
    os << "# normalization " << (cross ? "cross" : "facial") << "\n# new-to-old " << join(n.cert.new_to_old)
       << "\n# width " << n.cert.width_before << ' ' << n.cert.width_after
       << (n.cert.width_overflow ? " overflow" : "") << '\n';
    write_instance(os, n.inst);
    return kOk;
}

int cmd_merge(const std::string& path, std::ostream& os) {
    auto inst = load_instance(path);
    auto m = merge_vortices(inst);
    for (const auto& l : m.links) os << "# link " << l[0] << ' ' << l[1] << ' ' << l[2] << ' ' << l[3] << '\n';
    write_instance(os, m.inst);
    return kOk;
}

// ---- verify ------------------------------------------------------------

Rational parse_rational(const std::string& s) {
    try {
        return Rational::parse(s);
    } catch (const std::exception&) {
        throw InputError("bad rational: " + s);
    }
}

int cmd_verify(const RunConfig& cfg, const std::string& inst_path, const std::string& art_path, std::ostream& os) {
    auto inst = load_instance(inst_path);
    std::vector<std::string> failures;
    auto check = [&](bool ok, const std::string& what) {
        os << "check " << what << ' ' << (ok ? "ok" : "FAIL") << '\n';
        if (!ok) failures.push_back(what);
    };
    if (art_path.empty()) {
        auto bad = validate(inst);
        for (const auto& b : bad) os << "violation " << b << '\n';
        check(bad.empty(), "instance-valid");
        return failures.empty() ? kOk : kPropertyFailure;
    }
    Artifact a = load_artifact(art_path);
    const Digraph& g = inst.graph;
    os << "verify " << a.kind << '\n';
    if (a.kind == "lp") {
        std::vector<Rational> x;
        for (const auto& r : a.records)
            if (r[0] == "x") {
                if (r.size() != 4) throw InputError("x record needs src dst value");
                const int i = static_cast<int>(x.size());
                if (i >= g.num_arcs() || g.arc(i).src != to_int(r[1]) || g.arc(i).dst != to_int(r[2]))
                    throw InputError("x records do not follow the arc order");
                x.push_back(parse_rational(r[3]));
            }
        if (static_cast<int>(x.size()) != g.num_arcs()) throw InputError("x records do not cover every arc");
        const Rational obj = parse_rational(a.need("objective")[1]);
        check(std::all_of(x.begin(), x.end(), [](const Rational& v) { return !(v < Rational(0)); }), "nonnegative");
        check(flow_conserved(g, x), "conservation");
        check(lp_objective(g, x) == obj, "objective");
        if (g.num_vertices() <= kMaxExhaustiveVertices)
            check(!(exhaustive_min_out_cut(g, x).value < Rational(1)), "all-cuts");
        check(require_lp(g).objective == obj, "optimal");
    } else if (a.kind == "vortex-walk" || a.kind == "oracle" || a.kind == "tour") {
        Walk w = parse_walk(a.need("walk"));
        const Rational cost = parse_rational(a.need("cost")[1]);
        check(w.seq.front() == w.seq.back(), "closed");
        check(w.seq.size() == 1 || walk_uses_arcs(g, w), "arcs");
        check(w.seq.size() != 1 || cost == Rational(0), "cost");
        if (w.seq.size() > 1) check(walk_arc_cost(g, w) == cost, "cost");
        if (a.kind == "vortex-walk") {
            auto seen = visited_set(w, g.num_vertices());
            bool all = true;
            for (const Vortex& h : inst.vortices)
                for (int v : h.vertices) all = all && seen[v];
            check(all, "covers-vortex");
            check(optimal_vortex_walk_with_apices(inst).cost == cost, "optimal");
        } else if (a.kind == "oracle") {
            check(spans(w, g.num_vertices()), "spanning");
            check(oracle_atsp(g, cfg.guard_oracle).cost == cost, "optimal");
        } else {
            check(spans(w, g.num_vertices()), "spanning");
            const Rational lp = parse_rational(a.need("lp-objective")[1]);
            check(require_lp(g).objective == lp, "lp-objective");
            check(!(cost < lp), "above-lp");
            Rational parts(0);
            for (const auto& r : a.records)
                if (r[0] == "ledger" && r.size() == 3 && (r[1].rfind("walk-", 0) == 0 || r[1] == "stitch"))
                    parts += parse_rational(r[2]);
            check(parts == cost, "ledger-identity");
        }
    } else if (a.kind == "thin") {
        const std::string mode = a.need("mode")[1];
        ThinInput in = thin_input(inst, mode);
        std::vector<int> edges;
        for (const auto& r : a.records)
            if (r[0] == "e") {
                if (r.size() != 4) throw InputError("e record needs id u v");
                const int e = to_int(r[1]);
                if (e < 0 || e >= in.sym.graph.num_edges()) throw InputError("edge id out of range");
                const Edge& ed = in.sym.graph.edge(e);
                if (ed.u != to_int(r[2]) || ed.v != to_int(r[3])) throw InputError("edge endpoints differ");
                edges.push_back(e);
            }
        auto m = measure_thinness(in.sym.graph, in.z, edges, thin_options(cfg));
        const std::string stated = a.need("alpha")[1];
        check(stated == "inf" ? m.infinite : (!m.infinite && m.alpha == parse_rational(stated)), "alpha");
        check(count_components(in.sym.graph, edges) == to_int(a.need("components")[1]), "components");
        const Rational claimed = parse_rational(a.need("claimed")[1]);
        if (claimed > Rational(0)) check(!m.infinite && !(claimed < m.alpha), "within-claim");
        if (mode == "planar" || mode == "one-apex") {
            check(static_cast<int>(edges.size()) == g.num_vertices() - 1 &&
                      count_components(in.sym.graph, edges) == 1,
                  "spanning-tree");
        } else if (mode == "a-apex") {
            check(is_forest(in.sym.graph, edges) &&
                      count_components(in.sym.graph, edges) <= static_cast<int>(inst.apices.size()),
                  "forest");
        } else {
            check(count_components(in.sym.graph, edges) <= static_cast<int>(inst.apices.size()) + 1, "components-bound");
        }
    } else {
        throw InputError("unknown artifact kind: " + a.kind);
    }
    os << "result " << (failures.empty() ? "pass" : "fail") << '\n';
    return failures.empty() ? kOk : kPropertyFailure;
}

// ---- harden ------------------------------------------------------------

const std::vector<std::string> kStages{"biclique", "balancing", "walk", "atsp"};

Ugraph parse_clique_graph(const std::vector<std::string>& lines, std::size_t& pos) {
    if (pos >= lines.size()) throw InputError("missing graph header");
    auto h = tokens(lines[pos++]);
    if (h.size() != 2 || h[0] != "graph") throw InputError("expected 'graph <n>'");
    const int n = to_int(h[1]);
    if (n < 0) throw InputError("negative vertex count");
    Ugraph g(n);
    for (; pos < lines.size(); ++pos) {
        auto t = tokens(lines[pos]);
        if (t[0] != "e") break;
        if (t.size() != 3) throw InputError("edge record needs two endpoints");
        const int u = to_int(t[1]), v = to_int(t[2]);
        if (u < 0 || v < 0 || u >= n || v >= n || u == v) throw InputError("bad edge " + lines[pos]);
        if (g.find_edge(u, v) < 0) g.add_edge(u, v, Rational(1));
    }
    return g;
}

EdgeBalancingInstance parse_balancing(const std::vector<std::string>& lines, std::size_t& pos) {
    if (pos >= lines.size()) throw InputError("missing balancing header");
    auto h = tokens(lines[pos++]);
    if (h.size() != 2 || h[0] != "balancing") throw InputError("expected 'balancing <vertices>'");
    EdgeBalancingInstance eb;
    const int k = to_int(h[1]);
    if (k < 1) throw InputError("balancing needs a vertex");
    eb.d = Digraph(k);
    for (; pos < lines.size(); ++pos) {
        auto t = tokens(lines[pos]);
        if (t[0] != "arc") break;
        if (t.size() < 4 || t[3] != ":") throw InputError("arc record is 'arc u v : x...'");
        const int u = to_int(t[1]), v = to_int(t[2]);
        if (u < 0 || v < 0 || u >= k || v >= k || u == v) throw InputError("bad arc " + lines[pos]);
        eb.d.add_arc(u, v, Rational(1));
        std::vector<std::int64_t> s;
        for (std::size_t i = 4; i < t.size(); ++i) {
            s.push_back(to_i64(t[i]));
            if (s.back() < 1) throw InputError("arc sets hold positive integers");
        }
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        eb.sets.push_back(std::move(s));
    }
    return eb;
}

void write_clique_graph(std::ostream& os, const Ugraph& g) {
    os << "graph " << g.num_vertices() << '\n';
    for (const Edge& e : g.edges()) os << "e " << e.u << ' ' << e.v << '\n';
}

void write_balancing(std::ostream& os, const EdgeBalancingInstance& eb) {
    os << "balancing " << eb.d.num_vertices() << '\n';
    for (int a = 0; a < eb.d.num_arcs(); ++a)
        os << "arc " << eb.d.arc(a).src << ' ' << eb.d.arc(a).dst << " :" << (eb.sets[a].empty() ? "" : " ")
           << join64(eb.sets[a]) << '\n';
}

// The whole chain from a source to a stage.
struct Chain {
    std::string source;  // clique | balancing
    std::string stage;
    int k = 0;
    Ugraph graph;
    std::optional<BicliqueReduction> bi;
    std::optional<BalancingReduction> bal;
    EdgeBalancingInstance eb;  // the balancing instance in use
    std::optional<WalkReduction> walk;
    std::optional<AtspReduction> atsp;
};

int stage_index(const std::string& s) {
    auto it = std::find(kStages.begin(), kStages.end(), s);
    if (it == kStages.end()) throw InputError("unknown stage: " + s);
    return static_cast<int>(it - kStages.begin());
}

void build_chain(Chain& c) {
    const int target = stage_index(c.stage);
    if (c.source == "clique") {
        c.bi = clique_to_biclique(c.graph, c.k);
        if (target >= 1) {
            c.bal = biclique_to_edge_balancing(c.bi->inst, nonaveraging_set(c.k, c.graph.num_vertices()));
            c.eb = c.bal->eb;
        }
    } else if (target < 2) {
        throw InputError("a balancing source starts at the walk stage");
    }
    if (target >= 2) c.walk = edge_balancing_to_walk(c.eb);
    if (target >= 3) c.atsp = walk_to_atsp(c.walk->wi);
}

void write_stage(std::ostream& os, const Chain& c) {
    const int target = stage_index(c.stage);
    if (c.bi && target == 0) {
        const auto& b = c.bi->inst;
        os << "biclique " << b.graph.num_vertices() << " classes " << b.classes.size() << '\n';
        for (const auto& cl : b.classes) os << "class " << join(cl) << '\n';
        for (const Edge& e : b.graph.edges()) os << "be " << e.u << ' ' << e.v << '\n';
        os << "certificate left-class-i-vertex-j = i*" << c.bi->source_vertices << "+j\n";
    }
    if (target == 1) {
        os << "xs " << join64(c.bal->xs) << "\nm " << c.bal->m << "\nb " << c.bal->b << '\n';
        write_balancing(os, c.eb);
    }
    if (target >= 2) {
        const auto& r = *c.walk;
        const Digraph& d = r.wi.d;
        os << "walk-instance " << d.num_vertices() << " arcs " << d.num_arcs() << "\nc-in " << r.c_in << "\nc-out "
           << r.c_out << "\ns-star " << r.s_star << "\npathwidth " << r.pd.width() << '\n';
        std::vector<int> z;
        for (int v = 0; v < d.num_vertices(); ++v)
            if (!r.wi.in_u[v]) z.push_back(v);
        os << "outside-u " << join(z) << '\n';
        for (const auto& gp : r.gadgets) {
            os << "gadget " << gp.arc << " hub " << gp.hub << " first";
            for (const auto& cp : gp.copies) os << ' ' << cp.blocks[0][0];
            os << '\n';
        }
        if (target == 2)
            for (const Arc& a : d.arcs()) os << "wa " << a.src << ' ' << a.dst << '\n';
    }
    if (target == 3) {
        const auto& r = *c.atsp;
        os << "atsp " << r.g.num_vertices() << "\nthreshold " << r.threshold << "\nscale " << r.scale << '\n';
        for (const Arc& a : r.g.arcs()) os << "ta " << a.src << ' ' << a.dst << ' ' << a.cost << '\n';
    }
}

void write_bundle(std::ostream& os, const Chain& c) {
    os << "harden\nsource " << c.source << "\nstage " << c.stage << "\nk " << c.k << '\n';
    if (c.source == "clique")
        write_clique_graph(os, c.graph);
    else
        write_balancing(os, c.eb);
    os << "end-source\n";
    write_stage(os, c);
}

int cmd_harden_build(const std::string& source, const std::string& path, int k, const std::string& stage,
                     std::ostream& os) {
    Chain c;
    c.source = source;
    c.stage = stage;
    c.k = k;
    auto lines = file_lines(path);
    std::size_t pos = 0;
    if (source == "clique") {
        if (k < 1) throw InputError("--k must be positive");
        c.graph = parse_clique_graph(lines, pos);
    } else {
        c.eb = parse_balancing(lines, pos);
    }
    if (pos != lines.size()) throw InputError("trailing content: " + lines[pos]);
    build_chain(c);
    write_bundle(os, c);
    return kOk;
}

int cmd_harden_verify(const RunConfig& cfg, const std::string& path, std::ostream& os) {
    auto lines = file_lines(path);
    Chain c;
    std::size_t pos = 0;
    auto header = [&](const std::string& key) {
        if (pos >= lines.size()) throw InputError("bundle ends early");
        auto t = tokens(lines[pos++]);
        if (t.size() != 2 || t[0] != key) throw InputError("expected '" + key + " <value>'");
        return t[1];
    };
    if (lines.empty() || lines[pos++] != "harden") throw InputError("not a harden bundle");
    c.source = header("source");
    c.stage = header("stage");
    c.k = to_int(header("k"));
    if (c.source == "clique")
        c.graph = parse_clique_graph(lines, pos);
    else if (c.source == "balancing")
        c.eb = parse_balancing(lines, pos);
    else
        throw InputError("unknown source: " + c.source);
    if (pos >= lines.size() || lines[pos] != "end-source") throw InputError("missing end-source");
    build_chain(c);

    std::vector<std::string> failures;
    auto check = [&](bool ok, const std::string& what) {
        os << "check " << what << ' ' << (ok ? "ok" : "FAIL") << '\n';
        if (!ok) failures.push_back(what);
    };
    // The stage block must be exactly what the source rebuilds to.
    std::ostringstream re;
    write_bundle(re, c);
    std::istringstream ris(re.str());
    check(read_content_lines(ris) == lines, "round-trip");

    const int target = stage_index(c.stage);
    std::optional<bool> upstream;
    if (c.source == "clique") {
        auto cl = solve_clique(c.graph, c.k);
        upstream = cl.has_value();
        os << "clique " << (*upstream ? "yes" : "no") << '\n';
        auto picks = solve_biclique(c.bi->inst);
        check(picks.has_value() == *upstream, "biclique-agrees");
        if (picks) check(is_clique(c.graph, clique_from_biclique(*c.bi, *picks), c.k), "biclique-backward");
        if (cl) check(is_biclique_solution(c.bi->inst, biclique_from_clique(*c.bi, *cl)), "biclique-forward");
    }
    std::optional<std::vector<std::int64_t>> chi;
    if (target >= 1 || c.source == "balancing") {
        chi = solve_edge_balancing(c.eb);
        os << "balancing " << (chi ? "yes" : "no") << '\n';
        if (upstream) check(chi.has_value() == *upstream, "balancing-agrees");
        upstream = chi.has_value();
        if (chi && c.bal) {
            auto picks = biclique_from_chi(*c.bal, c.bi->inst, *chi);
            check(is_biclique_solution(c.bi->inst, picks), "balancing-backward");
        }
    }
    std::optional<Walk> walk;
    if (target >= 2) {
        walk = solve_exactly_once_walk(c.walk->wi);
        check(walk.has_value() == *upstream, "walk-agrees");
        if (walk) {
            check(is_exactly_once_walk(c.walk->wi, *walk), "walk-valid");
            check(is_edge_balancing_solution(c.eb, chi_from_walk(*c.walk, c.eb, *walk)), "walk-backward");
        }
        if (chi) check(is_exactly_once_walk(c.walk->wi, walk_from_chi(*c.walk, c.eb, *chi)), "walk-forward");
    }
    if (target >= 3) {
        auto sol = solve_atsp_exact(c.atsp->g);
        const bool below = sol.feasible && sol.cost < Rational(c.atsp->threshold);
        os << "atsp-optimum " << sol.cost << '\n';
        check(below == *upstream, "atsp-agrees");
        if (below) {
            Walk back = walk_from_tour(*c.atsp, c.walk->wi, sol.walk);
            check(is_edge_balancing_solution(c.eb, chi_from_walk(*c.walk, c.eb, back)), "atsp-backward");
        }
    }
    (void)cfg;
    os << "result " << (failures.empty() ? "pass" : "fail") << '\n';
    return failures.empty() ? kOk : kPropertyFailure;
}

// ---- batch-verify ------------------------------------------------------

std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& specs) {
    std::vector<std::uint64_t> seeds;
    for (const auto& s : specs) {
        auto dash = s.find('-');
        if (dash == std::string::npos) {
            seeds.push_back(static_cast<std::uint64_t>(to_i64(s)));
            continue;
        }
        const std::int64_t lo = to_i64(s.substr(0, dash)), hi = to_i64(s.substr(dash + 1));
        if (lo < 0 || hi < lo || hi - lo > 1'000'000) throw InputError("bad seed range " + s);
        for (std::int64_t v = lo; v <= hi; ++v) seeds.push_back(static_cast<std::uint64_t>(v));
    }
    return seeds;
}

NearlyEmbeddableInstance suite_instance(std::uint64_t seed, int n, int a, int p) {
    Profile pr;
    pr.n = n;
    pr.a = a;
    pr.p = p;
    return generate_instance(seed, pr);
}

// One property check per seed; returns a short detail, throws PropertyFailure on a violation.
std::string run_suite_seed(const std::string& suite, std::uint64_t seed, const RunConfig& cfg) {
    std::ostringstream d;
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw PropertyFailure(what);
    };
    if (suite == "lp") {
        auto inst = suite_instance(seed, 7 + static_cast<int>(seed % 3), 0, 1 + static_cast<int>(seed % 2));
        LpPoint lp = require_lp(inst.graph);
        auto opt = oracle_atsp(inst.graph, cfg.guard_oracle);
        require(!(opt.cost < lp.objective), "LP above the optimum");
        require(!(exhaustive_min_out_cut(inst.graph, lp.x).value < Rational(1)), "violated cut");
        d << "lp " << lp.objective << " opt " << opt.cost;
    } else if (suite == "vortex") {
        auto inst = suite_instance(seed, 8 + static_cast<int>(seed % 3), 0, 1 + static_cast<int>(seed % 2));
        auto dp = optimal_vortex_walk(inst);
        auto orc = oracle_vortex_walk(inst, cfg.guard_oracle);
        require(dp.cost == orc.cost, "DP differs from the oracle");
        d << "cost " << dp.cost;
    } else if (suite == "thin") {
        Profile pr;
        pr.n = 10;
        pr.a = 1;
        pr.p = 0;
        auto inst = generate_instance(seed, pr);
        auto sym = symmetrize(inst.graph);
        SymZ z = symmetrize_x(sym, require_lp(inst.graph).x);
        ApexOptions opt;
        opt.measure = thin_options(cfg);
        auto r = thin_tree_one_apex(sym.graph, inst.apices[0], z, opt);
        require(static_cast<int>(r.cert.edges.size()) == inst.num_vertices() - 1 && r.cert.components == 1,
                "not a spanning tree");
        require(r.cert.measure.exhaustive && !r.cert.measure.infinite && !(r.cert.claimed < r.cert.measure.alpha),
                "alpha above the claimed bound");
        d << "alpha " << r.cert.measure.alpha << " claimed " << r.cert.claimed;
    } else if (suite == "tour") {
        auto inst = suite_instance(seed, 8, static_cast<int>(seed % 2), 1 + static_cast<int>(seed % 2));
        TourOptions opt;
        opt.compare_oracle = true;
        opt.oracle_guard = cfg.guard_oracle;
        auto r = approximate_atsp(inst, opt);
        require(r.walk.seq.front() == r.walk.seq.back() && spans(r.walk, inst.num_vertices()), "not a tour");
        require(walk_arc_cost(inst.graph, r.walk) == r.cost, "cost mismatch");
        require(!(r.cost < r.lp_objective), "tour below the LP");
        d << "cost " << r.cost << " lp " << r.lp_objective;
        if (r.ratio) d << " ratio " << *r.ratio;
    } else if (suite == "harden") {
        Rng rng(seed);
        const int n = 1 + static_cast<int>(rng.below(6));
        Ugraph g(n);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng.chance(1, 2)) g.add_edge(u, v, Rational(1));
        auto cl = solve_clique(g, 2);
        auto br = clique_to_biclique(g, 2);
        auto picks = solve_biclique(br.inst);
        require(picks.has_value() == cl.has_value(), "biclique disagrees");
        auto bal = biclique_to_edge_balancing(br.inst, nonaveraging_set(2, n));
        auto chi = solve_edge_balancing(bal.eb);
        require(chi.has_value() == cl.has_value(), "balancing disagrees");
        if (chi)
            require(is_clique(g, clique_from_biclique(br, biclique_from_chi(bal, br.inst, *chi)), 2),
                    "backward map fails");
        d << "n " << n << " clique " << (cl ? "yes" : "no");
    } else {
        throw InputError("unknown suite: " + suite);
    }
    return d.str();
}

int cmd_batch(const RunConfig& cfg, const std::string& suite, const std::vector<std::string>& seed_specs,
              std::ostream& os) {
    const std::vector<std::string> suites{"lp", "vortex", "thin", "tour", "harden"};
    if (std::find(suites.begin(), suites.end(), suite) == suites.end()) throw InputError("unknown suite: " + suite);
    auto seeds = parse_seeds(seed_specs);
    std::vector<std::string> lines(seeds.size());
    std::vector<char> ok(seeds.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        std::ostringstream l;
        l << "seed " << seeds[i] << ' ';
        try {
            std::string detail = run_suite_seed(suite, seeds[i], cfg);
            l << "pass " << detail;
            ok[i] = 1;
        } catch (const std::exception& e) {
            l << "fail " << e.what();
        }
        lines[i] = l.str();
    }
    const auto passed = std::count(ok.begin(), ok.end(), 1);
    os << "batch " << suite << '\n';
    for (const auto& l : lines) os << l << '\n';
    os << "summary suite=" << suite << " seeds=" << seeds.size() << " passed=" << passed
       << " failed=" << seeds.size() - passed << '\n';
    return passed == static_cast<long>(seeds.size()) ? kOk : kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vatsp: ATSP approximation on nearly embeddable digraphs and hardness instance tools"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    app.add_option("--seed", cfg.seed, "Seed for every random choice");
    app.add_option("--guard-oracle", cfg.guard_oracle, "Largest vertex set handed to exact oracles")
        ->check(CLI::PositiveNumber);
    app.add_option("--guard-cuts", cfg.guard_cuts, "Largest graph measured over all cuts")
        ->check(CLI::Range(1, kMaxExhaustiveVertices));
    app.add_option("--out", cfg.out, "Write output here instead of stdout");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text"}));

    std::string inst_path, art_path, mode = "planar", stage = "atsp", suite, harden_file;
    bool flag_a = false, flag_b = false;
    int k = 2;
    Profile pr;
    std::vector<std::string> seed_specs;
    std::function<int(std::ostream&)> action;

    auto gen = app.add_subcommand("gen", "Generate a random instance");
    gen->add_option("--n", pr.n, "Vertices, apices included");
    gen->add_option("--a", pr.a, "Apices");
    gen->add_option("--p", pr.p, "Vortex width");
    gen->add_option("--k", pr.k, "Vortices");
    gen->add_option("--min-cost", pr.min_cost);
    gen->add_option("--max-cost", pr.max_cost);
    gen->add_flag("--unnormalized", flag_a, "Allow several off-face edges per face vertex");
    gen->callback([&] {
        pr.normalized = !flag_a;
        action = [&](std::ostream& os) { return cmd_gen(cfg, pr, os); };
    });

    auto lp = app.add_subcommand("lp", "Solve the Held-Karp relaxation");
    lp->add_option("instance", inst_path)->required();
    lp->add_flag("--cuts-log", flag_a, "List every separating cut");
    lp->callback([&] { action = [&](std::ostream& os) { return cmd_lp(inst_path, flag_a, os); }; });

    auto vw = app.add_subcommand("vortex-walk", "Cheapest closed walk through the vortex");
    vw->add_option("instance", inst_path)->required();
    vw->add_flag("--oracle", flag_a, "Use the exact oracle");
    vw->add_flag("--diff", flag_b, "Run both and compare");
    vw->callback([&] { action = [&](std::ostream& os) { return cmd_vortex_walk(cfg, inst_path, flag_a, flag_b, os); }; });

    auto thin = app.add_subcommand("thin", "Thin subgraph and its certificate");
    thin->add_option("instance", inst_path)->required();
    thin->add_option("--mode", mode)->check(CLI::IsMember({"planar", "one-apex", "a-apex", "vortex"}));
    thin->callback([&] { action = [&](std::ostream& os) { return cmd_thin(cfg, inst_path, mode, os); }; });

    auto tour = app.add_subcommand("tour", "Approximate tour with its ledger");
    tour->add_option("instance", inst_path)->required();
    tour->add_flag("--compare-oracle", flag_a, "Add the exact optimum when within the guard");
    tour->callback([&] { action = [&](std::ostream& os) { return cmd_tour(cfg, inst_path, flag_a, os); }; });

    auto oracle = app.add_subcommand("oracle", "Exact ATSP optimum");
    oracle->add_option("instance", inst_path)->required();
    oracle->callback([&] { action = [&](std::ostream& os) { return cmd_oracle(cfg, inst_path, os); }; });

    auto norm = app.add_subcommand("normalize", "Facial or cross normalization");
    norm->add_option("instance", inst_path)->required();
    norm->add_flag("--cross", flag_a, "Cross normalization instead of facial");
    norm->add_flag("--grids", flag_b, "Expand grids (cross only)");
    norm->callback([&] { action = [&](std::ostream& os) { return cmd_normalize(inst_path, flag_a, flag_b, os); }; });

    auto merge = app.add_subcommand("merge-vortices", "Merge all vortices into one");
    merge->add_option("instance", inst_path)->required();
    merge->callback([&] { action = [&](std::ostream& os) { return cmd_merge(inst_path, os); }; });

    auto verify = app.add_subcommand("verify", "Validate an instance, or check an artifact against it");
    verify->add_option("instance", inst_path)->required();
    verify->add_option("artifact", art_path);
    verify->callback([&] { action = [&](std::ostream& os) { return cmd_verify(cfg, inst_path, art_path, os); }; });

    auto harden = app.add_subcommand("harden", "Hardness reduction chain");
    harden->require_subcommand(1);
    auto hclique = harden->add_subcommand("clique", "Compile a clique instance");
    hclique->add_option("graph", harden_file)->required();
    hclique->add_option("--k", k);
    hclique->add_option("--stage", stage)->check(CLI::IsMember(kStages));
    hclique->callback(
        [&] { action = [&](std::ostream& os) { return cmd_harden_build("clique", harden_file, k, stage, os); }; });
    auto hbal = harden->add_subcommand("balancing", "Compile an edge balancing instance");
    hbal->add_option("instance", harden_file)->required();
    hbal->add_option("--stage", stage)->check(CLI::IsMember({"walk", "atsp"}));
    hbal->callback(
        [&] { action = [&](std::ostream& os) { return cmd_harden_build("balancing", harden_file, 0, stage, os); }; });
    auto hverify = harden->add_subcommand("verify", "Replay every verifier on a bundle");
    hverify->add_option("bundle", harden_file)->required();
    hverify->callback([&] { action = [&](std::ostream& os) { return cmd_harden_verify(cfg, harden_file, os); }; });

    auto batch = app.add_subcommand("batch-verify", "Property checks over many seeds");
    batch->add_option("--suite", suite)->required()->check(CLI::IsMember({"lp", "vortex", "thin", "tour", "harden"}));
    batch->add_option("--seeds", seed_specs, "Seeds or ranges such as 1-50")->delimiter(',');
    batch->callback([&] { action = [&](std::ostream& os) { return cmd_batch(cfg, suite, seed_specs, os); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    std::ostringstream buf;
    int rc = kOk;
    try {
        rc = action(buf);
    } catch (const PropertyFailure& e) {
        std::cerr << "property failure: " << e.what() << '\n';
        rc = kPropertyFailure;
    } catch (const PipelineError& e) {
        std::cerr << "property failure: " << e.what() << '\n';
        rc = kPropertyFailure;
    } catch (const ThinError& e) {
        std::cerr << "property failure: " << e.what() << '\n';
        rc = kPropertyFailure;
    } catch (const std::exception& e) {
        // Parse errors, guards, and rejected inputs.
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    if (cfg.out.empty()) {
        std::cout << buf.str();
    } else {
        std::ofstream f(cfg.out);
        if (!f) {
            std::cerr << "error: cannot write " << cfg.out << '\n';
            return kInputError;
        }
        f << buf.str();
    }
    return rc;
}
