// Cabling, component deletion and canonical comparison of diagrams.

#include <algorithm>
#include <map>

#include "cbn/diagram.hpp"
#include "union_find.hpp"

namespace cbn {

namespace {

// Compass positions around a crossing, counter-clockwise. In the frame of
// an original crossing the strand through slots 0/2 runs W -> E and the one
// through slots 1/3 runs S -> N.
enum Compass { W = 0, S = 1, E = 2, N = 3 };

struct End {
    int crossing;
    int compass;
};

struct Path {
    End from{-1, -1};  // along the original orientation
    End to{-1, -1};
    int orig_comp = -1;
    int strand = 0;
    bool reversed = false;
};

// Renumbers regions so that the unbounded one is 0 and the rest follow dart
// order.
void compact_regions(std::vector<int>& dart_region, int infinity) {
    std::map<int, int> id;
    id[infinity] = 0;
    for (int& r : dart_region) {
        auto [it, fresh] = id.emplace(r, static_cast<int>(id.size()));
        r = it->second;
    }
}

}  // namespace

std::pair<Diagram, CableMap> cable(const Diagram& d, std::span<const int> colours) {
    const int k = d.component_count();
    if (static_cast<int>(colours.size()) != k)
        throw DiagramError("colour vector length " + std::to_string(colours.size()) +
                           " does not match " + std::to_string(k) + " components");
    std::vector<int> width(k);
    bool any_zero = false;
    for (int i = 0; i < k; ++i) {
        if (colours[i] < 0) throw DiagramError("negative colour");
        width[i] = std::max(colours[i], 1);
        any_zero |= colours[i] == 0;
    }

    Diagram out;
    CableMap map;
    map.colours.assign(colours.begin(), colours.end());

    // Grid crossings: grid[x][(j-1)*nB + (m-1)].
    std::vector<std::vector<int>> grid(d.crossing_count());
    std::vector<int> rows(d.crossing_count()), cols(d.crossing_count());
    for (int x = 0; x < d.crossing_count(); ++x) {
        int nA = width[d.strand_component(x, 0)], nB = width[d.strand_component(x, 1)];
        rows[x] = nA;
        cols[x] = nB;
        for (int j = 1; j <= nA; ++j)
            for (int m = 1; m <= nB; ++m) {
                grid[x].push_back(static_cast<int>(map.crossing_source.size()));
                map.crossing_source.push_back({x, j, m});
            }
    }
    auto cell = [&](int x, int j, int m) { return grid[x][(j - 1) * cols[x] + (m - 1)]; };
    const int GC = static_cast<int>(map.crossing_source.size());

    // Paths between consecutive grid crossings, per cable component in
    // traversal order along the original orientation.
    std::vector<std::vector<Path>> comp_paths;
    for (int i = 0; i < k; ++i) {
        const auto& arcs = d.components[i];
        auto base = std::find(arcs.begin(), arcs.end(), d.base_arcs[i]);
        std::vector<int> order(base, arcs.end());
        order.insert(order.end(), arcs.begin(), base);
        for (int j = 1; j <= width[i]; ++j) {
            std::vector<Path> paths;
            bool rev = j % 2 == 0;
            if (d.arcs[order[0]].is_loop()) {
                paths.push_back(Path{{-1, -1}, {-1, -1}, i, j, rev});
            }
            for (size_t t = 0; t < order.size() && !d.arcs[order[t]].is_loop(); ++t) {
                const Arc& a = d.arcs[order[t]];
                // exit of copy j from the grid at the tail crossing
                int xt = a.tail.crossing;
                End from = a.tail.pos == 2 ? End{cell(xt, j, cols[xt]), E}
                                           : End{cell(xt, 1, j), N};
                int xh = a.head.crossing;
                End to = a.head.pos == 0 ? End{cell(xh, j, 1), W}
                                         : End{cell(xh, rows[xh], j), S};
                paths.push_back(Path{from, to, i, j, rev});
                // through the grid at the head crossing
                if (a.head.pos == 0) {
                    for (int m = 1; m < cols[xh]; ++m)
                        paths.push_back(Path{{cell(xh, j, m), E}, {cell(xh, j, m + 1), W}, i, j, rev});
                } else {
                    for (int r = rows[xh]; r > 1; --r)
                        paths.push_back(Path{{cell(xh, r, j), N}, {cell(xh, r - 1, j), S}, i, j, rev});
                }
            }
            comp_paths.push_back(std::move(paths));
            map.component_source.push_back({i, j});
        }
    }

    // Arcs, oriented: odd strands follow the original, even strands oppose it.
    std::vector<std::array<int, 4>> at(GC);  // arc at each compass position
    std::vector<std::array<bool, 4>> incoming(GC);
    for (int c = 0; c < static_cast<int>(comp_paths.size()); ++c) {
        auto& paths = comp_paths[c];
        if (paths[0].reversed) std::reverse(paths.begin(), paths.end());
        std::vector<int> comp_arcs;
        for (const Path& p : paths) {
            int a = out.arc_count();
            out.arcs.push_back(Arc{{}, {}, c});
            map.arc_source.push_back({p.orig_comp, p.strand});
            comp_arcs.push_back(a);
            if (p.from.crossing < 0) continue;
            End tail = p.reversed ? p.to : p.from;
            End head = p.reversed ? p.from : p.to;
            at[tail.crossing][tail.compass] = a;
            incoming[tail.crossing][tail.compass] = false;
            at[head.crossing][head.compass] = a;
            incoming[head.crossing][head.compass] = true;
        }
        out.components.push_back(std::move(comp_arcs));
    }

    out.crossings.resize(GC);
    for (int g = 0; g < GC; ++g) {
        int start = -1;
        for (int p = 0; p < 4; ++p)
            if (incoming[g][p] && incoming[g][(p + 1) % 4]) start = p;
        if (start < 0) throw DiagramError("cable: crossing without adjacent inputs");
        Crossing& cr = out.crossings[g];
        for (int s = 0; s < 4; ++s) {
            int compass = (start + s) % 4;
            int a = at[g][compass];
            cr.arcs[s] = a;
            (s < 2 ? out.arcs[a].head : out.arcs[a].tail) = Slot{g, s};
        }
        bool orig_over_first = d.crossings[map.crossing_source[g][0]].over_first;
        cr.over_first = (start % 2 == 0) == orig_over_first;
    }

    // Base arcs: first path of each component is the copy of the original
    // base arc (or last, for reversed strands).
    for (int c = 0; c < static_cast<int>(out.components.size()); ++c) {
        bool rev = comp_paths[c][0].reversed;
        out.base_arcs.push_back(rev ? out.components[c].back() : out.components[c].front());
        if (rev) {
            // rotate so that the base arc leads
            auto& v = out.components[c];
            std::rotate(v.begin(), v.end() - 1, v.end());
        }
    }

    // Embedding: faces next to outermost copies inherit the original region;
    // strips between copies and grid squares are fresh regions.
    if (d.has_embedding()) {
        // copy j of original arc a, as the first path of component-strand j
        // along a; find by walking components.
        std::map<std::pair<int, int>, int> copy_of;  // (orig arc, strand) -> cable arc
        {
            int c = 0;
            for (int i = 0; i < k; ++i) {
                const auto& arcs = d.components[i];
                auto base = std::find(arcs.begin(), arcs.end(), d.base_arcs[i]);
                std::vector<int> order(base, arcs.end());
                order.insert(order.end(), arcs.begin(), base);
                for (int j = 1; j <= width[i]; ++j, ++c) {
                    // recompute the external arcs in original order
                    const auto& ca = out.components[c];
                    bool rev = j % 2 == 0;
                    std::vector<int> forward(ca.begin(), ca.end());
                    if (rev) {
                        std::rotate(forward.begin(), forward.begin() + 1, forward.end());
                        std::reverse(forward.begin(), forward.end());
                    }
                    size_t idx = 0;
                    for (int oa : order) {
                        copy_of[{oa, j}] = forward[idx];
                        if (d.arcs[oa].is_loop()) break;
                        int xh = d.arcs[oa].head.crossing;
                        idx += 1 + (d.arcs[oa].head.pos == 0 ? cols[xh] - 1 : rows[xh] - 1);
                    }
                }
            }
        }
        FaceStructure fs = trace_faces(out);
        const int F = fs.face_count();
        const int base_regions = *std::max_element(d.dart_region.begin(), d.dart_region.end()) + 1;
        UnionFind uf(base_regions + F);  // original regions, then cable faces
        for (int od = 0; od < 2 * d.arc_count(); ++od) {
            int a = dart_arc(od);
            int comp = d.arcs[a].component;
            int j = dart_backward(od) ? width[comp] : 1;
            int ca = copy_of.at({a, j});
            bool cable_rev = j % 2 == 0;
            int cd = dart(ca, dart_backward(od) != cable_rev);
            uf.unite(d.dart_region[od], base_regions + fs.dart_face[cd]);
        }
        // strips between concentric copies of a crossing-free loop
        for (int a = 0; a < d.arc_count(); ++a) {
            if (!d.arcs[a].is_loop()) continue;
            int comp = d.arcs[a].component;
            for (int j = 1; j < width[comp]; ++j) {
                int right_of_j = dart(copy_of.at({a, j}), j % 2 == 1);
                int left_of_next = dart(copy_of.at({a, j + 1}), (j + 1) % 2 == 0);
                uf.unite(base_regions + fs.dart_face[right_of_j],
                         base_regions + fs.dart_face[left_of_next]);
            }
        }
        out.dart_region.resize(2 * out.arc_count());
        for (int cd = 0; cd < 2 * out.arc_count(); ++cd)
            out.dart_region[cd] = uf.find(base_regions + fs.dart_face[cd]);
        compact_regions(out.dart_region, uf.find(0));
    }

    map.strand_component.assign(k, {});
    for (int c = 0; c < static_cast<int>(map.component_source.size()); ++c) {
        auto [i, j] = map.component_source[c];
        map.strand_component[i].push_back(c);
    }

    if (any_zero) {
        std::vector<bool> remove(out.component_count(), false);
        for (int c = 0; c < out.component_count(); ++c)
            remove[c] = colours[map.component_source[c].first] == 0;
        std::vector<int> arc_origin, crossing_origin;
        Diagram trimmed = delete_components(out, remove, &arc_origin, &crossing_origin);
        CableMap m2;
        m2.colours = map.colours;
        for (int c = 0; c < out.component_count(); ++c)
            if (!remove[c]) m2.component_source.push_back(map.component_source[c]);
        for (int x : crossing_origin) m2.crossing_source.push_back(map.crossing_source[x]);
        for (int a : arc_origin) m2.arc_source.push_back(map.arc_source[a]);
        m2.strand_component.assign(k, {});
        for (int c = 0; c < static_cast<int>(m2.component_source.size()); ++c)
            m2.strand_component[m2.component_source[c].first].push_back(c);
        validate(trimmed);
        return {std::move(trimmed), std::move(m2)};
    }
    validate(out);
    return {std::move(out), std::move(map)};
}

namespace {

// Drops components and crossings; surviving strands run straight through
// the removed crossings.
Diagram strip(const Diagram& d, const std::vector<bool>& remove, const std::vector<bool>& drop,
              bool keep_embedding, std::vector<int>* arc_origin, std::vector<int>* crossing_origin,
              std::vector<int>* arc_image) {
    const int k = d.component_count();
    std::vector<int> crossing_new(d.crossing_count(), -1);
    Diagram out;
    std::vector<int> corigin;
    for (int x = 0; x < d.crossing_count(); ++x) {
        if (!drop.empty() && drop[x]) continue;
        if (remove[d.strand_component(x, 0)] || remove[d.strand_component(x, 1)]) continue;
        crossing_new[x] = static_cast<int>(corigin.size());
        corigin.push_back(x);
        out.crossings.push_back(d.crossings[x]);
    }
    std::vector<int> comp_new(k, -1);
    for (int i = 0; i < k; ++i)
        if (!remove[i]) {
            comp_new[i] = static_cast<int>(out.components.size());
            out.components.emplace_back();
        }

    std::vector<int> new_arc_of(d.arc_count(), -1);  // old arc -> new arc
    std::vector<int> aorigin;
    for (int i = 0; i < k; ++i) {
        if (remove[i]) continue;
        const auto& arcs = d.components[i];
        const int L = static_cast<int>(arcs.size());
        // start right after a surviving crossing, if any
        int start = -1;
        for (int t = 0; t < L; ++t) {
            Slot tl = d.arcs[arcs[t]].tail;
            if (tl.valid() && crossing_new[tl.crossing] >= 0) { start = t; break; }
        }
        int ci = comp_new[i];
        if (start < 0) {
            int a = static_cast<int>(aorigin.size());
            aorigin.push_back(d.base_arcs[i]);
            out.arcs.push_back(Arc{{}, {}, ci});
            for (int old : arcs) new_arc_of[old] = a;
            out.components[ci].push_back(a);
            out.base_arcs.push_back(a);
            continue;
        }
        int cur = -1;
        for (int s = 0; s < L; ++s) {
            int old = arcs[(start + s) % L];
            const Arc& oa = d.arcs[old];
            if (crossing_new[oa.tail.crossing] >= 0) {
                cur = static_cast<int>(aorigin.size());
                aorigin.push_back(old);
                out.arcs.push_back(Arc{{crossing_new[oa.tail.crossing], oa.tail.pos}, {}, ci});
                out.components[ci].push_back(cur);
            }
            new_arc_of[old] = cur;
            if (crossing_new[oa.head.crossing] >= 0)
                out.arcs[cur].head = Slot{crossing_new[oa.head.crossing], oa.head.pos};
        }
        int base = new_arc_of[d.base_arcs[i]];
        out.base_arcs.push_back(base);
        auto& v = out.components[ci];
        std::rotate(v.begin(), std::find(v.begin(), v.end(), base), v.end());
    }
    for (Crossing& c : out.crossings)
        for (int& a : c.arcs) a = new_arc_of[a];

    if (d.has_embedding() && keep_embedding) {
        int regions = *std::max_element(d.dart_region.begin(), d.dart_region.end()) + 1;
        UnionFind uf(regions);
        for (int a = 0; a < d.arc_count(); ++a)
            if (remove[d.arcs[a].component])
                uf.unite(d.dart_region[dart(a, false)], d.dart_region[dart(a, true)]);
        out.dart_region.resize(2 * out.arc_count());
        for (int a = 0; a < out.arc_count(); ++a)
            for (bool b : {false, true})
                out.dart_region[dart(a, b)] = uf.find(d.dart_region[dart(aorigin[a], b)]);
        // faces of the new diagram may join several old regions
        FaceStructure fs = trace_faces(out);
        for (const auto& darts : fs.face_darts)
            for (int dt : darts) uf.unite(out.dart_region[darts[0]], out.dart_region[dt]);
        for (int& r : out.dart_region) r = uf.find(r);
        compact_regions(out.dart_region, uf.find(0));
    }
    if (arc_origin) *arc_origin = aorigin;
    if (crossing_origin) *crossing_origin = corigin;
    if (arc_image) *arc_image = new_arc_of;
    return out;
}

}  // namespace

Diagram delete_components(const Diagram& d, const std::vector<bool>& remove,
                          std::vector<int>* arc_origin, std::vector<int>* crossing_origin) {
    return strip(d, remove, {}, true, arc_origin, crossing_origin, nullptr);
}

Diagram remove_crossings(const Diagram& d, const std::vector<bool>& drop,
                         std::vector<int>* arc_origin, std::vector<int>* crossing_origin,
                         std::vector<int>* arc_image) {
    return strip(d, std::vector<bool>(d.component_count(), false), drop, false, arc_origin,
                 crossing_origin, arc_image);
}

namespace {

struct Canonical {
    std::vector<std::array<int, 4>> crossings;
    std::vector<bool> over;
    std::vector<std::vector<int>> components;
    std::vector<int> regions;
    bool operator==(const Canonical&) const = default;
};

Canonical canonical_form(const Diagram& d) {
    Canonical c;
    std::vector<int> arc_id(d.arc_count(), -1), crossing_id(d.crossing_count(), -1);
    std::vector<int> arc_order;
    for (int i = 0; i < d.component_count(); ++i) {
        const auto& v = d.components[i];
        auto base = std::find(v.begin(), v.end(), d.base_arcs[i]);
        std::vector<int> order(base, v.end());
        order.insert(order.end(), v.begin(), base);
        std::vector<int> comp;
        for (int a : order) {
            arc_id[a] = static_cast<int>(arc_order.size());
            arc_order.push_back(a);
            comp.push_back(arc_id[a]);
        }
        c.components.push_back(comp);
    }
    std::vector<int> crossing_order;
    for (int a : arc_order) {
        Slot h = d.arcs[a].head;
        if (h.valid() && crossing_id[h.crossing] < 0) {
            crossing_id[h.crossing] = static_cast<int>(crossing_order.size());
            crossing_order.push_back(h.crossing);
        }
    }
    for (int x : crossing_order) {
        std::array<int, 4> r{};
        for (int p = 0; p < 4; ++p) r[p] = arc_id[d.crossings[x].arcs[p]];
        c.crossings.push_back(r);
        c.over.push_back(d.crossings[x].over_first);
    }
    if (d.has_embedding()) {
        std::map<int, int> rid;
        rid[0] = 0;
        for (int a : arc_order)
            for (bool b : {false, true}) {
                auto [it, fresh] = rid.emplace(d.dart_region[dart(a, b)], static_cast<int>(rid.size()));
                c.regions.push_back(it->second);
            }
    }
    return c;
}

}  // namespace

bool isomorphic(const Diagram& a, const Diagram& b) {
    if (a.crossing_count() != b.crossing_count() || a.arc_count() != b.arc_count() ||
        a.component_count() != b.component_count() || a.has_embedding() != b.has_embedding())
        return false;
    return canonical_form(a) == canonical_form(b);
}

}  // namespace cbn
