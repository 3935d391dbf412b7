#include "cbn/diagram.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "union_find.hpp"

namespace cbn {

int Diagram::strand_component(int crossing, int strand) const {
    return arcs[crossings[crossing].arcs[strand]].component;
}

int next_dart_in_face(const Diagram& diag, int d) {
    const Arc& a = diag.arcs[dart_arc(d)];
    if (a.is_loop()) return d;
    Slot arrive = dart_backward(d) ? a.tail : a.head;
    Slot leave{arrive.crossing, (arrive.pos + 3) % 4};
    int b = diag.arc_at(leave);
    return dart(b, !(diag.arcs[b].tail == leave));
}

FaceStructure trace_faces(const Diagram& d) {
    FaceStructure fs;
    int darts = 2 * d.arc_count();
    fs.dart_face.assign(darts, -1);
    for (int start = 0; start < darts; ++start) {
        if (fs.dart_face[start] >= 0) continue;
        int f = fs.face_count();
        fs.face_darts.emplace_back();
        int cur = start;
        do {
            if (fs.dart_face[cur] >= 0) throw DiagramError("face tracing revisits a dart");
            fs.dart_face[cur] = f;
            fs.face_darts[f].push_back(cur);
            cur = next_dart_in_face(d, cur);
        } while (cur != start);
    }
    return fs;
}

std::vector<int> connected_pieces(const Diagram& d, int* piece_count) {
    UnionFind uf(d.arc_count());
    for (const Crossing& c : d.crossings)
        for (int k = 1; k < 4; ++k) uf.unite(c.arcs[0], c.arcs[k]);
    std::vector<int> piece(d.arc_count(), -1);
    std::map<int, int> ids;
    for (int a = 0; a < d.arc_count(); ++a) {
        auto [it, fresh] = ids.emplace(uf.find(a), static_cast<int>(ids.size()));
        piece[a] = it->second;
    }
    if (piece_count) *piece_count = static_cast<int>(ids.size());
    return piece;
}

namespace {

std::string arc_name(int a) { return "arc " + std::to_string(a + 1); }
std::string crossing_name(int c) { return "crossing " + std::to_string(c + 1); }

void validate_embedding(const Diagram& d) {
    if (static_cast<int>(d.dart_region.size()) != 2 * d.arc_count())
        throw DiagramError("embedding: region table has wrong size");
    FaceStructure fs = trace_faces(d);
    std::vector<int> face_region(fs.face_count(), -1);
    for (int f = 0; f < fs.face_count(); ++f) {
        for (int dt : fs.face_darts[f]) {
            int r = d.dart_region[dt];
            if (face_region[f] < 0) face_region[f] = r;
            else if (face_region[f] != r)
                throw DiagramError("embedding: face through " + arc_name(dart_arc(dt)) +
                                   " spans two regions");
        }
    }
    int pieces = 0;
    std::vector<int> piece = connected_pieces(d, &pieces);
    std::vector<int> vertices(pieces, 0), edges(pieces, 0), faces(pieces, 0);
    for (int a = 0; a < d.arc_count(); ++a) {
        edges[piece[a]]++;
        if (d.arcs[a].is_loop()) vertices[piece[a]]++;
    }
    for (const Crossing& c : d.crossings) vertices[piece[c.arcs[0]]]++;
    std::map<std::pair<int, int>, int> seen;  // (region, piece) -> face
    bool has_outer = d.arc_count() == 0;
    for (int f = 0; f < fs.face_count(); ++f) {
        int p = piece[dart_arc(fs.face_darts[f][0])];
        faces[p]++;
        if (face_region[f] == 0) has_outer = true;
        auto [it, fresh] = seen.emplace(std::make_pair(face_region[f], p), f);
        if (!fresh)
            throw DiagramError("embedding: two faces of one piece share region " +
                               std::to_string(face_region[f]));
    }
    if (!has_outer) throw DiagramError("embedding: no face is marked unbounded");
    for (int p = 0; p < pieces; ++p) {
        if (vertices[p] - edges[p] + faces[p] != 2)
            throw DiagramError("non-planar rotation system: V - E + F = " +
                               std::to_string(vertices[p] - edges[p] + faces[p]) +
                               " on piece " + std::to_string(p + 1));
    }
}

}  // namespace

void validate(const Diagram& d) {
    const int A = d.arc_count();
    std::vector<int> refs(A, 0);
    for (int c = 0; c < d.crossing_count(); ++c) {
        for (int p = 0; p < 4; ++p) {
            int a = d.crossings[c].arcs[p];
            if (a < 0 || a >= A) throw DiagramError(crossing_name(c) + ": unknown arc");
            refs[a]++;
            const Arc& arc = d.arcs[a];
            Slot s{c, p};
            bool ok = p < 2 ? arc.head == s : arc.tail == s;
            if (!ok)
                throw DiagramError(crossing_name(c) + ": " + arc_name(a) +
                                   " endpoint disagrees with its slot");
        }
    }
    for (int a = 0; a < A; ++a) {
        const Arc& arc = d.arcs[a];
        int expected = arc.is_loop() ? 0 : 2;
        if (arc.is_loop() != !arc.head.valid())
            throw DiagramError(arc_name(a) + ": half-open arc");
        if (refs[a] != expected)
            throw DiagramError("arc multiplicity: " + arc_name(a) + " used " +
                               std::to_string(refs[a]) + " times");
    }
    std::vector<int> owner(A, -1);
    if (static_cast<int>(d.base_arcs.size()) != d.component_count())
        throw DiagramError("one base point per component required");
    for (int k = 0; k < d.component_count(); ++k) {
        const auto& comp = d.components[k];
        if (comp.empty())
            throw DiagramError("component " + std::to_string(k + 1) + " is empty");
        for (size_t i = 0; i < comp.size(); ++i) {
            int a = comp[i];
            if (a < 0 || a >= A) throw DiagramError("component lists an unknown arc");
            if (owner[a] >= 0)
                throw DiagramError(arc_name(a) + " belongs to two components");
            owner[a] = k;
            if (d.arcs[a].component != k)
                throw DiagramError(arc_name(a) + ": component tag mismatch");
            int next = comp[(i + 1) % comp.size()];
            if (d.arcs[a].is_loop()) {
                if (comp.size() != 1)
                    throw DiagramError("inconsistent orientation: loop " + arc_name(a) +
                                       " shares a component");
                continue;
            }
            Slot h = d.arcs[a].head;
            Slot cont{h.crossing, h.pos + 2};
            if (d.arc_at(cont) != next)
                throw DiagramError("inconsistent orientation: " + arc_name(a) +
                                   " is not followed by " + arc_name(next));
        }
        if (std::find(comp.begin(), comp.end(), d.base_arcs[k]) == comp.end())
            throw DiagramError("base point of component " + std::to_string(k + 1) +
                               " is not on it");
    }
    for (int a = 0; a < A; ++a)
        if (owner[a] < 0) throw DiagramError(arc_name(a) + " is on no component");
    if (d.has_embedding()) validate_embedding(d);
}

int crossing_sign(const Diagram& d, int crossing) {
    if (crossing < 0 || crossing >= d.crossing_count())
        throw DiagramError("unknown crossing identifier " + std::to_string(crossing + 1));
    return d.crossings[crossing].over_first ? 1 : -1;
}

int crossing_sign(const Diagram& d, int crossing, const std::vector<bool>& reversed) {
    int s = crossing_sign(d, crossing);
    if (!reversed.empty()) {
        if (reversed[d.strand_component(crossing, 0)]) s = -s;
        if (reversed[d.strand_component(crossing, 1)]) s = -s;
    }
    return s;
}

int negative_crossings(const Diagram& d) { return negative_crossings(d, std::vector<bool>{}); }

int negative_crossings(const Diagram& d, const std::vector<bool>& reversed) {
    int n = 0;
    for (int c = 0; c < d.crossing_count(); ++c) n += crossing_sign(d, c, reversed) < 0;
    return n;
}

int writhe(const Diagram& d) {
    int w = 0;
    for (int c = 0; c < d.crossing_count(); ++c) w += crossing_sign(d, c);
    return w;
}

LinkingData linking_data(const Diagram& d) {
    const int k = d.component_count();
    std::vector<std::vector<int>> twice(k, std::vector<int>(k, 0));
    for (int c = 0; c < d.crossing_count(); ++c) {
        int i = d.strand_component(c, 0), l = d.strand_component(c, 1);
        int s = crossing_sign(d, c);
        if (i == l) {
            twice[i][i] += 2 * s;
        } else {
            twice[i][l] += s;
            twice[l][i] += s;
        }
    }
    LinkingData out;
    out.lk.assign(k, std::vector<int>(k, 0));
    for (int i = 0; i < k; ++i)
        for (int l = 0; l < k; ++l) {
            if (twice[i][l] % 2 != 0)
                throw DiagramError("odd crossing count between two components");
            out.lk[i][l] = twice[i][l] / 2;
        }
    return out;
}

}  // namespace cbn
