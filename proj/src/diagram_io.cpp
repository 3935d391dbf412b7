// Text format for diagrams.
//
//   components <k>
//   component <id> arcs <a1> <a2> ...     ids 1..k, arcs in traversal order;
//                                         arc ids are 1..A overall
//   basepoint <id> <arc>
//   X <a> <b> <c> <d> over <a|b>          a, b incoming and counter-clockwise
//                                         consecutive; c continues a, d
//                                         continues b
//   outer <face> [<face> ...]             unbounded face of one piece
//   inside <face> <face>                  a piece (given by its outer face)
//                                         sits inside a face of another
//
// A face is named by a dart: +a is the face on the left of arc a, -a the
// face on its right. Text after '#' is ignored.

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

#include "cbn/diagram.hpp"
#include "union_find.hpp"

namespace cbn {

namespace {

struct Line {
    int number;
    std::vector<std::string> tokens;
};

[[noreturn]] void fail(int line, const std::string& msg) {
    throw DiagramError("line " + std::to_string(line) + ": " + msg);
}

int to_int(const Line& l, const std::string& tok) {
    try {
        size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail(l.number, "expected an integer, got '" + tok + "'");
    }
}

std::string dart_token(int d) {
    return (dart_backward(d) ? "-" : "+") + std::to_string(dart_arc(d) + 1);
}

}  // namespace

Diagram parse_diagram(std::string_view text) {
    std::vector<Line> lines;
    {
        std::istringstream in{std::string(text)};
        std::string raw;
        int n = 0;
        while (std::getline(in, raw)) {
            ++n;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
            std::istringstream ls(raw);
            Line l{n, {}};
            for (std::string t; ls >> t;) l.tokens.push_back(t);
            if (!l.tokens.empty()) lines.push_back(std::move(l));
        }
    }

    Diagram d;
    int declared = -1;
    std::vector<const Line*> crossing_lines, outer_lines, inside_lines;
    std::map<int, int> basepoint;

    for (const Line& l : lines) {
        const std::string& kw = l.tokens[0];
        if (kw == "components") {
            if (l.tokens.size() != 2) fail(l.number, "usage: components <k>");
            declared = to_int(l, l.tokens[1]);
            if (declared < 0) fail(l.number, "negative component count");
            d.components.assign(declared, {});
        } else if (kw == "component") {
            if (declared < 0) fail(l.number, "'components' must come first");
            if (l.tokens.size() < 4 || l.tokens[2] != "arcs")
                fail(l.number, "usage: component <id> arcs <a1> ...");
            int id = to_int(l, l.tokens[1]);
            if (id < 1 || id > declared) fail(l.number, "component id out of range");
            if (!d.components[id - 1].empty()) fail(l.number, "component listed twice");
            for (size_t t = 3; t < l.tokens.size(); ++t) {
                int a = to_int(l, l.tokens[t]);
                if (a < 1) fail(l.number, "arc ids start at 1");
                if (a > static_cast<int>(d.arcs.size())) d.arcs.resize(a);
                if (d.arcs[a - 1].component >= 0)
                    fail(l.number, "arc multiplicity: arc " + l.tokens[t] +
                                       " listed twice in components");
                d.arcs[a - 1].component = id - 1;
                d.components[id - 1].push_back(a - 1);
            }
        } else if (kw == "basepoint") {
            if (l.tokens.size() != 3) fail(l.number, "usage: basepoint <component> <arc>");
            basepoint[to_int(l, l.tokens[1])] = to_int(l, l.tokens[2]);
        } else if (kw == "X") {
            crossing_lines.push_back(&l);
        } else if (kw == "outer") {
            outer_lines.push_back(&l);
        } else if (kw == "inside") {
            inside_lines.push_back(&l);
        } else {
            fail(l.number, "unknown keyword '" + kw + "'");
        }
    }
    if (declared < 0) throw DiagramError("missing 'components' header");
    for (int k = 0; k < declared; ++k)
        if (d.components[k].empty())
            throw DiagramError("component " + std::to_string(k + 1) + " has no arcs");

    for (size_t a = 0; a < d.arcs.size(); ++a)
        if (d.arcs[a].component < 0)
            throw DiagramError("arc ids must be 1.." + std::to_string(d.arcs.size()) +
                               "; arc " + std::to_string(a + 1) + " is missing");
    auto lookup = [&](const Line& l, const std::string& tok) {
        int a = to_int(l, tok);
        if (a < 1 || a > static_cast<int>(d.arcs.size())) fail(l.number, "unknown arc " + tok);
        return a - 1;
    };

    std::vector<int> heads(d.arcs.size(), 0), tails(d.arcs.size(), 0);
    for (const Line* lp : crossing_lines) {
        const Line& l = *lp;
        if (l.tokens.size() != 7 || l.tokens[5] != "over" ||
            (l.tokens[6] != "a" && l.tokens[6] != "b"))
            fail(l.number, "usage: X <a> <b> <c> <d> over <a|b>");
        Crossing c;
        int x = d.crossing_count();
        for (int p = 0; p < 4; ++p) {
            int a = lookup(l, l.tokens[1 + p]);
            c.arcs[p] = a;
            Slot s{x, p};
            if (p < 2) {
                if (heads[a]++) fail(l.number, "arc multiplicity: arc " + l.tokens[1 + p] +
                                                   " enters two crossings");
                d.arcs[a].head = s;
            } else {
                if (tails[a]++) fail(l.number, "arc multiplicity: arc " + l.tokens[1 + p] +
                                                   " leaves two crossings");
                d.arcs[a].tail = s;
            }
        }
        c.over_first = l.tokens[6] == "a";
        d.crossings.push_back(c);
    }
    for (size_t a = 0; a < d.arcs.size(); ++a)
        if (heads[a] != tails[a])
            throw DiagramError("arc multiplicity: arc " + std::to_string(a + 1) +
                               " has one free end");

    d.base_arcs.resize(declared);
    for (int k = 0; k < declared; ++k) {
        auto it = basepoint.find(k + 1);
        if (it == basepoint.end()) {
            d.base_arcs[k] = d.components[k].front();
        } else {
            int a = it->second;
            if (a < 1 || a > static_cast<int>(d.arcs.size()))
                throw DiagramError("basepoint on unknown arc " + std::to_string(a));
            d.base_arcs[k] = a - 1;
        }
    }

    validate(d);

    if (d.arcs.empty()) return d;

    auto face_token = [&](const Line& l, const std::string& tok) {
        std::string t = tok;
        bool backward = false;
        if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
            backward = t[0] == '-';
            t = t.substr(1);
        }
        return dart(lookup(l, t), backward);
    };

    FaceStructure fs = trace_faces(d);
    int pieces = 0;
    std::vector<int> piece = connected_pieces(d, &pieces);
    auto face_piece = [&](int f) { return piece[dart_arc(fs.face_darts[f][0])]; };

    std::vector<int> piece_outer(pieces, -1);
    for (const Line* lp : outer_lines) {
        const Line& l = *lp;
        if (l.tokens.size() < 2) fail(l.number, "usage: outer <face> ...");
        int f = fs.dart_face[face_token(l, l.tokens[1])];
        for (size_t t = 2; t < l.tokens.size(); ++t)
            if (fs.dart_face[face_token(l, l.tokens[t])] != f)
                fail(l.number, "outer face walk does not trace a single face");
        int p = face_piece(f);
        if (piece_outer[p] >= 0) fail(l.number, "piece already has an outer face");
        piece_outer[p] = f;
    }
    for (int p = 0; p < pieces; ++p)
        if (piece_outer[p] < 0) {
            int a = static_cast<int>(std::find(piece.begin(), piece.end(), p) - piece.begin());
            throw DiagramError("no outer face given for the piece containing arc " +
                               std::to_string(a + 1));
        }

    const int F = fs.face_count();
    const int INF = F;
    std::vector<int> parent_piece(pieces, -1);
    UnionFind uf(F + 1);
    std::vector<bool> nested(pieces, false);
    for (const Line* lp : inside_lines) {
        const Line& l = *lp;
        if (l.tokens.size() != 3) fail(l.number, "usage: inside <outer face> <face>");
        int f1 = fs.dart_face[face_token(l, l.tokens[1])];
        int f2 = fs.dart_face[face_token(l, l.tokens[2])];
        int p = face_piece(f1), q = face_piece(f2);
        if (piece_outer[p] != f1) fail(l.number, "first face must be an outer face");
        if (p == q) fail(l.number, "a piece cannot sit inside itself");
        if (nested[p]) fail(l.number, "piece already placed");
        nested[p] = true;
        parent_piece[p] = q;
        uf.unite(f1, f2);
    }
    for (int p = 0; p < pieces; ++p) {
        int seen = 0;
        for (int q = p; q >= 0; q = parent_piece[q])
            if (++seen > pieces) throw DiagramError("cyclic 'inside' placement");
        if (!nested[p]) uf.unite(piece_outer[p], INF);
    }

    std::map<int, int> region_id;
    region_id[uf.find(INF)] = 0;
    d.dart_region.assign(2 * d.arc_count(), -1);
    for (int dt = 0; dt < 2 * d.arc_count(); ++dt) {
        int root = uf.find(fs.dart_face[dt]);
        auto [it, fresh] = region_id.emplace(root, static_cast<int>(region_id.size()));
        d.dart_region[dt] = it->second;
    }
    validate(d);
    return d;
}

std::string format_diagram(const Diagram& d) {
    std::ostringstream out;
    out << "components " << d.component_count() << "\n";
    for (int k = 0; k < d.component_count(); ++k) {
        out << "component " << k + 1 << " arcs";
        for (int a : d.components[k]) out << " " << a + 1;
        out << "\n";
    }
    for (int k = 0; k < d.component_count(); ++k)
        out << "basepoint " << k + 1 << " " << d.base_arcs[k] + 1 << "\n";
    for (const Crossing& c : d.crossings) {
        out << "X";
        for (int a : c.arcs) out << " " << a + 1;
        out << " over " << (c.over_first ? "a" : "b") << "\n";
    }
    if (!d.has_embedding() || d.arcs.empty()) return out.str();

    FaceStructure fs = trace_faces(d);
    int pieces = 0;
    std::vector<int> piece = connected_pieces(d, &pieces);
    int regions = *std::max_element(d.dart_region.begin(), d.dart_region.end()) + 1;
    // faces of each region, and faces of each piece
    std::vector<std::vector<int>> region_faces(regions), piece_faces(pieces);
    for (int f = 0; f < fs.face_count(); ++f) {
        int dt = fs.face_darts[f][0];
        region_faces[d.dart_region[dt]].push_back(f);
        piece_faces[piece[dart_arc(dt)]].push_back(f);
    }
    std::vector<int> outer(pieces, -1), container(pieces, -1);
    std::vector<int> region_owner(regions, -1);  // face through which a region was reached
    std::queue<int> todo;
    todo.push(0);
    std::vector<bool> region_done(regions, false);
    region_done[0] = true;
    while (!todo.empty()) {
        int r = todo.front();
        todo.pop();
        for (int f : region_faces[r]) {
            int p = piece[dart_arc(fs.face_darts[f][0])];
            if (outer[p] >= 0) continue;
            outer[p] = f;
            container[p] = region_owner[r];
            for (int g : piece_faces[p]) {
                int rg = d.dart_region[fs.face_darts[g][0]];
                if (g == f || region_done[rg]) continue;
                region_done[rg] = true;
                region_owner[rg] = g;
                todo.push(rg);
            }
        }
    }
    for (int p = 0; p < pieces; ++p)
        out << "outer " << dart_token(fs.face_darts[outer[p]][0]) << "\n";
    for (int p = 0; p < pieces; ++p)
        if (container[p] >= 0)
            out << "inside " << dart_token(fs.face_darts[outer[p]][0]) << " "
                << dart_token(fs.face_darts[container[p]][0]) << "\n";
    return out.str();
}

}  // namespace cbn
