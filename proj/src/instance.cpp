#include "vatsp/instance.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace vatsp {

bool NearlyEmbeddableInstance::is_apex(int v) const {
    return std::find(apices.begin(), apices.end(), v) != apices.end();
}

bool NearlyEmbeddableInstance::planar_edge(int u, int v) const {
    return u < static_cast<int>(rotation.size()) && planar[u] && rot_index(rotation, u, v) >= 0;
}

int NearlyEmbeddableInstance::vortex_of(int v) const {
    for (std::size_t i = 0; i < vortices.size(); ++i) {
        const auto& vs = vortices[i].vertices;
        if (std::find(vs.begin(), vs.end(), v) != vs.end()) return static_cast<int>(i);
    }
    return -1;
}

bool NearlyEmbeddableInstance::on_face(int v) const {
    for (const Vortex& h : vortices)
        if (std::find(h.face.begin(), h.face.end(), v) != h.face.end()) return true;
    return false;
}

NearlyEmbeddableInstance::ArcKind NearlyEmbeddableInstance::arc_kind(int arc) const {
    const Arc& a = graph.arc(arc);
    if (is_apex(a.src) || is_apex(a.dst)) return ArcKind::Apex;
    if (planar_edge(a.src, a.dst)) return ArcKind::Planar;
    return ArcKind::Vortex;
}

int NearlyEmbeddableInstance::width() const {
    int w = 0;
    for (const Vortex& h : vortices)
        for (const Bag& b : h.bags) w = std::max(w, static_cast<int>(b.members.size()) - 1);
    return w;
}

std::vector<std::string> validate(const NearlyEmbeddableInstance& inst) {
    std::vector<std::string> bad;
    auto report = [&](std::string s) { bad.push_back(std::move(s)); };
    const int n = inst.num_vertices();
    if (static_cast<int>(inst.planar.size()) != n || static_cast<int>(inst.rotation.size()) != n) {
        report("rotation table size mismatch");
        return bad;
    }
    for (const Arc& a : inst.graph.arcs())
        if (a.cost < Rational(0)) report("negative arc cost");

    std::set<int> apex_set(inst.apices.begin(), inst.apices.end());
    for (int v : inst.apices) {
        if (v < 0 || v >= n) {
            report("apex id out of range");
            continue;
        }
        if (inst.planar[v]) report("apex " + std::to_string(v) + " is in the planar piece");
        if (inst.vortex_of(v) >= 0) report("apex " + std::to_string(v) + " is in a vortex");
    }

    EmbeddingStats es = embedding_stats(inst.rotation, inst.planar);
    if (!es.symmetric) report("rotation system is not symmetric");
    if (es.symmetric && inst.params.g == 0 && es.genus != 0) report("embedding is not planar");
    if (es.symmetric && es.genus > inst.params.g) report("embedding genus exceeds declared g");

    // Vortex vertex sets are disjoint; interiors lie off the planar piece.
    std::vector<int> owner(n, -1);
    for (std::size_t i = 0; i < inst.vortices.size(); ++i) {
        const Vortex& h = inst.vortices[i];
        for (int v : h.vertices) {
            if (v < 0 || v >= n) {
                report("vortex vertex out of range");
                continue;
            }
            if (owner[v] >= 0) report("vertex " + std::to_string(v) + " in two vortices");
            owner[v] = static_cast<int>(i);
        }
        std::set<int> face_set(h.face.begin(), h.face.end());
        for (int v : h.face) {
            if (v < 0 || v >= n || !inst.planar[v]) report("face vertex " + std::to_string(v) + " is not planar");
            else if (std::find(h.vertices.begin(), h.vertices.end(), v) == h.vertices.end())
                report("face vertex " + std::to_string(v) + " missing from the vortex");
        }
        for (int v : h.vertices)
            if (v >= 0 && v < n && inst.planar[v] && !face_set.count(v))
                report("vortex vertex " + std::to_string(v) + " is planar but not on the face");
    }

    for (int i = 0; i < inst.graph.num_arcs(); ++i) {
        const Arc& a = inst.graph.arc(i);
        if (a.src == a.dst) {
            report("self loop");
            continue;
        }
        switch (inst.arc_kind(i)) {
            case NearlyEmbeddableInstance::ArcKind::Apex:
            case NearlyEmbeddableInstance::ArcKind::Planar:
                break;
            case NearlyEmbeddableInstance::ArcKind::Vortex:
                if (owner[a.src] < 0 || owner[a.src] != owner[a.dst])
                    report("arc " + std::to_string(a.src) + "->" + std::to_string(a.dst) +
                           " is neither planar, apex nor inside one vortex");
                break;
        }
    }

    for (std::size_t i = 0; i < inst.vortices.size(); ++i) {
        const Vortex& h = inst.vortices[i];
        const std::string tag = "vortex " + std::to_string(i) + ": ";
        bool anchored = std::all_of(h.bags.begin(), h.bags.end(), [](const Bag& b) { return b.anchor >= 0; });
        if (inst.params.g == 0) {
            if (!es.symmetric || !is_traced_face(inst.rotation, h.face)) report(tag + "face is not a traced face");
            if (!anchored) report(tag + "unanchored bag in a genus-0 instance");
        }
        if (anchored) {
            if (h.bags.size() != h.face.size()) report(tag + "bag count differs from face length");
            for (std::size_t q = 0; q < std::min(h.bags.size(), h.face.size()); ++q) {
                if (h.bags[q].anchor != h.face[q]) report(tag + "bag anchors do not follow the face");
                const auto& m = h.bags[q].members;
                if (std::find(m.begin(), m.end(), h.face[q]) == m.end())
                    report(tag + "face vertex " + std::to_string(h.face[q]) + " not in its own bag");
            }
        }
        std::set<int> vs(h.vertices.begin(), h.vertices.end());
        std::map<int, std::vector<int>> where;
        for (std::size_t q = 0; q < h.bags.size(); ++q) {
            const auto& m = h.bags[q].members;
            if (static_cast<int>(m.size()) > inst.params.p + 1) report(tag + "width exceeded at bag " + std::to_string(q));
            std::set<int> uniq(m.begin(), m.end());
            if (uniq.size() != m.size()) report(tag + "duplicate bag member");
            for (int v : uniq) {
                if (!vs.count(v)) report(tag + "bag member " + std::to_string(v) + " outside the vortex");
                where[v].push_back(static_cast<int>(q));
            }
        }
        for (int v : h.vertices) {
            auto it = where.find(v);
            if (it == where.end()) {
                report(tag + "vertex " + std::to_string(v) + " in no bag");
                continue;
            }
            const auto& pos = it->second;
            if (pos.back() - pos.front() + 1 != static_cast<int>(pos.size()))
                report(tag + "bags of vertex " + std::to_string(v) + " not contiguous");
        }
        for (int ai = 0; ai < inst.graph.num_arcs(); ++ai) {
            if (inst.arc_kind(ai) != NearlyEmbeddableInstance::ArcKind::Vortex) continue;
            const Arc& a = inst.graph.arc(ai);
            if (owner[a.src] != static_cast<int>(i) || owner[a.dst] != static_cast<int>(i)) continue;
            bool covered = false;
            for (const Bag& b : h.bags) {
                bool hs = std::find(b.members.begin(), b.members.end(), a.src) != b.members.end();
                bool hd = std::find(b.members.begin(), b.members.end(), a.dst) != b.members.end();
                if (hs && hd) {
                    covered = true;
                    break;
                }
            }
            if (!covered) report(tag + "arc not covered: " + std::to_string(a.src) + "->" + std::to_string(a.dst));
        }
    }
    if (inst.params.g == 0)
        for (std::size_t i = 0; i < inst.vortices.size(); ++i)
            for (std::size_t j = i + 1; j < inst.vortices.size(); ++j)
                for (int v : inst.vortices[i].face)
                    if (std::find(inst.vortices[j].face.begin(), inst.vortices[j].face.end(), v) !=
                        inst.vortices[j].face.end())
                        report("vortex faces share vertex " + std::to_string(v));

    if (inst.params.a != static_cast<int>(apex_set.size())) report("declared a differs from the apex count");
    if (inst.params.k != static_cast<int>(inst.vortices.size())) report("declared k differs from the vortex count");
    if (inst.params.p < 0 || inst.params.g < 0) report("negative parameter");
    return bad;
}

void write_instance(std::ostream& os, const NearlyEmbeddableInstance& inst) {
    write_graph(os, inst.graph);
    os << "rotation\n";
    for (int v = 0; v < inst.num_vertices(); ++v) {
        if (!inst.planar[v]) continue;
        os << "r " << v;
        for (int u : inst.rotation[v]) os << ' ' << u;
        os << '\n';
    }
    for (const Vortex& h : inst.vortices) {
        os << "face";
        for (int v : h.face) os << ' ' << v;
        os << "\nvortex";
        for (int v : h.vertices) os << ' ' << v;
        os << "\nbags\n";
        for (const Bag& b : h.bags) {
            os << "bag ";
            if (b.anchor < 0)
                os << '-';
            else
                os << b.anchor;
            for (int v : b.members) os << ' ' << v;
            os << '\n';
        }
    }
    os << "apices";
    for (int v : inst.apices) os << ' ' << v;
    os << "\nparams " << inst.params.a << ' ' << inst.params.g << ' ' << inst.params.k << ' ' << inst.params.p
       << '\n';
}

std::string instance_to_string(const NearlyEmbeddableInstance& inst) {
    std::ostringstream os;
    write_instance(os, inst);
    return os.str();
}

namespace {

int to_int(const std::string& s) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw ParseError("bad integer: " + s);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("bad integer: " + s);
    }
}

}  // namespace

NearlyEmbeddableInstance read_instance(std::istream& is) {
    std::vector<std::string> lines = read_content_lines(is);
    std::size_t pos = 0;
    NearlyEmbeddableInstance inst;
    try {
        inst.graph = parse_graph_lines(lines, pos);
    } catch (const std::exception& e) {
        throw ParseError(std::string("graph section: ") + e.what());
    }
    const int n = inst.graph.num_vertices();
    inst.planar.assign(n, 0);
    inst.rotation.assign(n, {});
    bool have_params = false;
    auto check_id = [&](int v) {
        if (v < 0 || v >= n) throw ParseError("vertex id out of range: " + std::to_string(v));
        return v;
    };
    for (; pos < lines.size(); ++pos) {
        std::istringstream ls(lines[pos]);
        std::string key;
        ls >> key;
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (key == "rotation" || key == "bags") continue;
        if (key == "r") {
            if (tok.empty()) throw ParseError("rotation line without vertex");
            int v = check_id(to_int(tok[0]));
            inst.planar[v] = 1;
            for (std::size_t i = 1; i < tok.size(); ++i) inst.rotation[v].push_back(check_id(to_int(tok[i])));
        } else if (key == "face") {
            inst.vortices.emplace_back();
            for (auto& t : tok) inst.vortices.back().face.push_back(check_id(to_int(t)));
        } else if (key == "vortex") {
            if (inst.vortices.empty()) throw ParseError("vortex line before its face");
            for (auto& t : tok) inst.vortices.back().vertices.push_back(check_id(to_int(t)));
        } else if (key == "bag") {
            if (inst.vortices.empty()) throw ParseError("bag line before its face");
            if (tok.empty()) throw ParseError("bag line without anchor");
            Bag b;
            b.anchor = tok[0] == "-" ? -1 : check_id(to_int(tok[0]));
            for (std::size_t i = 1; i < tok.size(); ++i) b.members.push_back(check_id(to_int(tok[i])));
            inst.vortices.back().bags.push_back(std::move(b));
        } else if (key == "apices") {
            for (auto& t : tok) inst.apices.push_back(check_id(to_int(t)));
        } else if (key == "params") {
            if (tok.size() != 4) throw ParseError("params needs a g k p");
            inst.params = {to_int(tok[0]), to_int(tok[1]), to_int(tok[2]), to_int(tok[3])};
            have_params = true;
        } else {
            throw ParseError("unknown record: " + key);
        }
    }
    if (!have_params) throw ParseError("missing params line");
    return inst;
}

}  // namespace vatsp
