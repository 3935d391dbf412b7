#include "cbn/cobordism.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <sstream>

namespace cbn {

namespace {

std::vector<int> identity(int n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

// Regions are renumbered in order of first appearance, keeping 0 unbounded.
void compact_regions(std::vector<int>& reg) {
    std::map<int, int> ids{{0, 0}};
    for (int& r : reg) {
        auto [it, fresh] = ids.emplace(r, static_cast<int>(ids.size()));
        r = it->second;
    }
}

// Returns the id of the merged region.
int merge_region(std::vector<int>& reg, int from, int into) {
    if (from == into) return into;
    if (from == 0) std::swap(from, into);
    for (int& r : reg)
        if (r == from) r = into;
    return into;
}

// Dart reaching crossing c through slot pos, and the one leaving through it.
int arriving_dart(const Diagram& d, int c, int pos) {
    int a = d.crossings[c].arcs[pos];
    return d.arcs[a].head == Slot{c, pos} ? dart(a, false) : dart(a, true);
}

Slot leaving_slot(const Diagram& d, int dt) {
    const Arc& e = d.arcs[dart_arc(dt)];
    return dart_backward(dt) ? e.head : e.tail;
}

// Region in the corner between slots p and q of crossing c.
int corner_region(const Diagram& d, int c, int p, int q) {
    for (auto [s, t] : {std::pair{p, q}, std::pair{q, p}}) {
        int in = arriving_dart(d, c, s);
        if (leaving_slot(d, next_dart_in_face(d, in)) == Slot{c, t}) return d.dart_region[in];
    }
    throw DiagramError("r2: no face in the corner of a crossing");
}

// A bigon face can be removed in the plane only if it is bounded and holds
// nothing else.
bool removable_bigon(const Diagram& d, const std::vector<int>& face) {
    if (face.size() != 2) return false;
    if (!d.has_embedding()) return true;
    int r = d.dart_region[face[0]];
    return r != 0 && std::count(d.dart_region.begin(), d.dart_region.end(), r) == 2;
}

// Removes a crossing-free component made of the single loop `arc`.
Diagram drop_loop(const Diagram& d, int arc, std::vector<int>& image) {
    if (arc < 0 || arc >= d.arc_count() || !d.arcs[arc].is_loop())
        throw DiagramError("death: arc " + std::to_string(arc + 1) + " meets crossings");
    const int comp = d.arcs[arc].component;
    Diagram out;
    out.crossings = d.crossings;
    image.assign(d.arc_count(), -1);
    for (int a = 0; a < d.arc_count(); ++a) {
        if (a == arc) continue;
        image[a] = static_cast<int>(out.arcs.size());
        Arc na = d.arcs[a];
        if (na.component > comp) --na.component;
        out.arcs.push_back(na);
        if (d.has_embedding())
            for (bool back : {false, true}) out.dart_region.push_back(d.dart_region[dart(a, back)]);
    }
    for (Crossing& c : out.crossings)
        for (int& a : c.arcs) a = image[a];
    for (int i = 0; i < d.component_count(); ++i) {
        if (i == comp) continue;
        std::vector<int> arcs;
        for (int a : d.components[i]) arcs.push_back(image[a]);
        out.components.push_back(std::move(arcs));
        out.base_arcs.push_back(image[d.base_arcs[i]]);
    }
    return out;
}

}  // namespace

MovieStep saddle_step(const Diagram& d, int a, int b, Diagram& out) {
    if (a < 0 || b < 0 || a >= d.arc_count() || b >= d.arc_count() || a == b)
        throw DiagramError("saddle: site arcs not present");
    const int ca = d.arcs[a].component, cb = d.arcs[b].component;
    if (ca == cb) throw DiagramError("saddle: both arcs lie on one component");
    MovieStep st;
    st.kind = MovieStep::Kind::Saddle;
    st.arc_a = a;
    st.arc_b = b;
    st.crossing_origin = identity(d.crossing_count());
    const bool la = d.arcs[a].is_loop(), lb = d.arcs[b].is_loop();
    if (la != lb) throw DiagramError("saddle: a loop cannot be fused with an arc between crossings");
    if (la) {
        out = drop_loop(d, b, st.arc_image);
        st.arc_image[b] = st.arc_image[a];
        st.image_a = st.image_b = st.arc_image[a];
        if (d.has_embedding()) {
            // the loops face each other across one region; the far sides join
            const auto& reg = d.dart_region;
            int da = -1, db = -1;
            for (bool ba : {false, true})
                for (bool bb : {false, true})
                    if (da < 0 && reg[dart(a, ba)] == reg[dart(b, bb)]) da = dart(a, ba), db = dart(b, bb);
            if (da < 0) throw DiagramError("saddle: loops do not face each other");
            merge_region(out.dart_region, reg[db ^ 1], reg[da ^ 1]);
            compact_regions(out.dart_region);
            validate(out);
        }
        return st;
    }
    // the band runs through the face shared by a and b
    int da = -1, db = -1;
    if (d.has_embedding()) {
        FaceStructure fs = trace_faces(d);
        for (bool ba : {false, true})
            for (bool bb : {false, true})
                if (da < 0 && fs.dart_face[dart(a, ba)] == fs.dart_face[dart(b, bb)])
                    da = dart(a, ba), db = dart(b, bb);
        if (da < 0) throw DiagramError("saddle: arcs do not share a face");
    }
    out = d;
    const Slot ha = d.arcs[a].head, hb = d.arcs[b].head;
    out.arcs[a].head = hb;
    out.arcs[b].head = ha;
    out.crossings[hb.crossing].arcs[hb.pos] = a;
    out.crossings[ha.crossing].arcs[ha.pos] = b;

    // a, then b's component from its head onwards, then b, then a's component
    auto after = [&](int comp, int arc) {
        const auto& v = d.components[comp];
        auto it = std::find(v.begin(), v.end(), arc);
        std::vector<int> rest(it + 1, v.end());
        rest.insert(rest.end(), v.begin(), it);
        return rest;
    };
    std::vector<int> fused{a};
    for (int x : after(cb, b)) fused.push_back(x);
    fused.push_back(b);
    for (int x : after(ca, a)) fused.push_back(x);

    out.components.clear();
    out.base_arcs.clear();
    for (int i = 0; i < d.component_count(); ++i) {
        if (i == cb) continue;
        out.components.push_back(i == ca ? fused : d.components[i]);
        out.base_arcs.push_back(i == ca ? a : d.base_arcs[i]);
    }
    for (int c = 0; c < out.component_count(); ++c)
        for (int x : out.components[c]) out.arcs[x].component = c;
    if (da >= 0) {
        // far sides of a and b join through the band; the shared face is cut
        // in two unless it had two boundary cycles that the band connects
        auto faces_in = [](const Diagram& g, const FaceStructure& fs, int r) {
            std::vector<int> out;
            for (int f = 0; f < fs.face_count(); ++f)
                if (g.dart_region[fs.face_darts[f][0]] == r) out.push_back(f);
            return out;
        };
        const int strip = d.dart_region[da];
        const std::size_t before = faces_in(d, trace_faces(d), strip).size();
        merge_region(out.dart_region, d.dart_region[db ^ 1], d.dart_region[da ^ 1]);
        const int r = out.dart_region[da];
        FaceStructure fo = trace_faces(out);
        std::vector<int> after = faces_in(out, fo, r);
        if (after.size() > before) {
            if (before != 1 || r == 0) throw DiagramError("saddle: band position is ambiguous");
            int fresh = *std::max_element(out.dart_region.begin(), out.dart_region.end()) + 1;
            for (int dt : fo.face_darts[after[1]]) out.dart_region[dt] = fresh;
        }
        compact_regions(out.dart_region);
    }
    validate(out);
    st.arc_image = identity(d.arc_count());
    st.image_a = a;
    st.image_b = b;
    return st;
}

std::array<int, 2> bigon_at(const Diagram& d, int arc) {
    const Arc& e = d.arcs[arc];
    if (e.is_loop() || e.tail.crossing == e.head.crossing) return {-1, -1};
    FaceStructure fs = trace_faces(d);
    for (bool back : {false, true}) {
        const auto& face = fs.face_darts[fs.dart_face[dart(arc, back)]];
        if (removable_bigon(d, face)) return {e.tail.crossing, e.head.crossing};
    }
    return {-1, -1};
}

MovieStep r2_removal_step(const Diagram& d, int x, int y, Diagram& out, int via_dart) {
    if (x < 0 || y < 0 || x >= d.crossing_count() || y >= d.crossing_count() || x == y)
        throw DiagramError("r2: crossings not present");
    auto joins = [&](int a) {
        const Arc& e = d.arcs[a];
        if (e.is_loop()) return false;
        return (e.tail.crossing == x && e.head.crossing == y) ||
               (e.tail.crossing == y && e.head.crossing == x);
    };
    FaceStructure fs = trace_faces(d);
    std::array<int, 2> bigon{-1, -1};
    int inside = -1;
    for (const auto& face : fs.face_darts) {
        if (!removable_bigon(d, face)) continue;
        int a0 = dart_arc(face[0]), a1 = dart_arc(face[1]);
        if (via_dart >= 0 && face[0] != via_dart && face[1] != via_dart) continue;
        if (a0 != a1 && joins(a0) && joins(a1)) {
            bigon = {a0, a1};
            if (d.has_embedding()) inside = d.dart_region[face[0]];
            break;
        }
    }
    if (bigon[0] < 0) throw DiagramError("r2: crossings do not bound a bigon");

    auto slot_at = [&](int a, int c) {
        const Arc& e = d.arcs[a];
        return e.tail.crossing == c ? e.tail.pos : e.head.pos;
    };
    auto is_over = [&](int c, int pos) { return (pos % 2 == 0) == d.crossings[c].over_first; };
    for (int a : bigon)
        if (is_over(x, slot_at(a, x)) != is_over(y, slot_at(a, y)))
            throw DiagramError("r2: bigon is not a Reidemeister II configuration");
    if (is_over(x, slot_at(bigon[0], x)) == is_over(x, slot_at(bigon[1], x)))
        throw DiagramError("r2: bigon is not a Reidemeister II configuration");

    // smoothing at each crossing that joins the two bigon arcs
    std::array<int, 2> turn{-1, -1};
    for (int k = 0; k < 2; ++k) {
        int c = k == 0 ? x : y;
        int p = slot_at(bigon[0], c), q = slot_at(bigon[1], c);
        for (int s = 0; s < 2; ++s)
            if (smoothing_partner(d.crossings[c], s)[p] == q) turn[k] = s;
        if (turn[k] < 0) throw DiagramError("r2: bigon arcs are not adjacent at a crossing");
    }
    if (turn[0] == turn[1]) throw DiagramError("r2: bigon is not a Reidemeister II configuration");

    MovieStep st;
    st.kind = MovieStep::Kind::R2Removal;
    st.u = turn[0] == 1 ? x : y;
    st.w = turn[0] == 1 ? y : x;
    st.bigon = bigon;
    std::vector<bool> drop(d.crossing_count(), false);
    drop[x] = drop[y] = true;
    out = remove_crossings(d, drop, nullptr, &st.crossing_origin, &st.arc_image);
    if (d.has_embedding()) {
        // the bigon joins the two regions beyond its corners
        std::vector<int> reg = d.dart_region;
        for (int c : {x, y}) {
            int p = slot_at(bigon[0], c), q = slot_at(bigon[1], c);
            inside = merge_region(reg, corner_region(d, c, (p + 2) % 4, (q + 2) % 4), inside);
        }
        out.dart_region.assign(2 * out.arc_count(), -1);
        for (int a = 0; a < d.arc_count(); ++a) {
            if (a == bigon[0] || a == bigon[1] || st.arc_image[a] < 0) continue;
            for (bool back : {false, true}) out.dart_region[dart(st.arc_image[a], back)] = reg[dart(a, back)];
        }
        compact_regions(out.dart_region);
    }
    validate(out);
    return st;
}

MovieStep death_step(const Diagram& d, int loop_arc, Diagram& out) {
    if (loop_arc < 0 || loop_arc >= d.arc_count()) throw DiagramError("death: arc not present");
    MovieStep st;
    st.kind = MovieStep::Kind::Death;
    st.loop = loop_arc;
    st.crossing_origin = identity(d.crossing_count());
    out = drop_loop(d, loop_arc, st.arc_image);
    if (d.has_embedding() && out.arc_count() > 0) {
        merge_region(out.dart_region, d.dart_region[dart(loop_arc, true)], d.dart_region[dart(loop_arc, false)]);
        compact_regions(out.dart_region);
        validate(out);
    }
    return st;
}

MovieStep birth_step(const Diagram& d, Diagram& out) {
    out = d;
    const int a = d.arc_count();
    if (d.has_embedding() || a == 0) {
        // a small counter-clockwise loop in the unbounded region
        int fresh = a ? *std::max_element(d.dart_region.begin(), d.dart_region.end()) + 1 : 1;
        out.dart_region.push_back(fresh);
        out.dart_region.push_back(0);
    }
    out.arcs.push_back(Arc{{}, {}, d.component_count()});
    out.components.push_back({a});
    out.base_arcs.push_back(a);
    MovieStep st;
    st.kind = MovieStep::Kind::Birth;
    st.loop = a;
    st.crossing_origin = identity(d.crossing_count());
    st.arc_image = identity(a + 1);
    st.arc_image[a] = -1;
    return st;
}

MovieStep reverse_step(const MovieStep& s) {
    MovieStep r = s;
    using K = MovieStep::Kind;
    switch (s.kind) {
        case K::Saddle: {
            r.arc_a = s.image_a;
            r.arc_b = s.image_b;
            r.image_a = s.arc_a;
            r.image_b = s.arc_b;
            int n = 0;
            for (int v : s.arc_image) n = std::max(n, v + 1);
            r.arc_image.assign(n, -1);
            for (int a = 0; a < static_cast<int>(s.arc_image.size()); ++a)
                if (s.arc_image[a] >= 0 && a != s.arc_b) r.arc_image[s.arc_image[a]] = a;
            break;
        }
        case K::R2Removal: r.kind = K::R2Insertion; break;
        case K::R2Insertion: r.kind = K::R2Removal; break;
        case K::Death: r.kind = K::Birth; break;
        case K::Birth: r.kind = K::Death; break;
    }
    return r;
}

Movie reverse_movie(const Movie& m) {
    Movie r;
    r.frames.assign(m.frames.rbegin(), m.frames.rend());
    for (auto it = m.steps.rbegin(); it != m.steps.rend(); ++it) r.steps.push_back(reverse_step(*it));
    return r;
}

std::string Movie::describe() const {
    std::ostringstream os;
    using K = MovieStep::Kind;
    os << "start: " << frames.front().crossing_count() << " crossings\n";
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const MovieStep& s = steps[k];
        switch (s.kind) {
            case K::Saddle: os << "saddle arcs " << s.arc_a + 1 << "," << s.arc_b + 1; break;
            case K::R2Removal: os << "r2 removal"; break;
            case K::R2Insertion: os << "r2 insertion"; break;
            case K::Death: os << "death"; break;
            case K::Birth: os << "birth"; break;
        }
        os << " -> " << frames[k + 1].crossing_count() << " crossings\n";
    }
    return os.str();
}

namespace {

inline bool bit(Labels l, int k) { return (l >> k) & 1; }

// Circle of r2 receiving each circle of r, read through the first arc of the
// circle whose image is known and which is not excluded; -1 if none.
std::vector<int> map_circles(const Resolution& r, const Resolution& r2, const std::vector<int>& image,
                             const std::vector<int>& excluded = {}) {
    std::vector<int> out(r.circle_count, -1);
    for (int c = 0; c < r.circle_count; ++c)
        for (int dt : r.circle_darts[c]) {
            int a = dart_arc(dt);
            if (std::find(excluded.begin(), excluded.end(), a) != excluded.end()) continue;
            int b = a < static_cast<int>(image.size()) ? image[a] : -1;
            if (b < 0) continue;
            out[c] = r2.arc_circle[b];
            break;
        }
    return out;
}

Labels push_labels(Labels l, const std::vector<int>& img, int skip = -1) {
    Labels out = 0;
    for (int c = 0; c < static_cast<int>(img.size()); ++c) {
        if (c == skip || !bit(l, c)) continue;
        if (img[c] < 0) throw LinalgError("circle without an image");
        out |= Labels{1} << img[c];
    }
    return out;
}

std::vector<int> invert(const std::vector<int>& img, int size) {
    std::vector<int> inv(size, -1);
    for (int c = 0; c < static_cast<int>(img.size()); ++c)
        if (img[c] >= 0) inv[img[c]] = c;
    for (int v : inv)
        if (v < 0) throw LinalgError("circle correspondence is not a bijection");
    return inv;
}

// State of the smaller frame from a state of the larger one, and back.
State shrink(State s, const std::vector<int>& origin) {
    State out = 0;
    for (int k = 0; k < static_cast<int>(origin.size()); ++k)
        if ((s >> origin[k]) & 1) out |= State{1} << k;
    return out;
}

State expand(State s, const std::vector<int>& origin) {
    State out = 0;
    for (int k = 0; k < static_cast<int>(origin.size()); ++k)
        if ((s >> k) & 1) out |= State{1} << origin[k];
    return out;
}

Chain saddle_map(const MovieStep& st, ResolutionCache& src, ResolutionCache& dst, const Chain& v) {
    std::vector<Term> out;
    for (const Term& t : v.terms()) {
        const Resolution& r = src.get(t.state);
        const Resolution& r2 = dst.get(t.state);
        int ca = r.arc_circle[st.arc_a], cb = r.arc_circle[st.arc_b];
        if (ca != cb) {
            if (r2.circle_count != r.circle_count - 1) throw LinalgError("saddle: merge expected");
            out.push_back({t.state, push_labels(t.labels, map_circles(r, r2, st.arc_image))});
            continue;
        }
        if (r2.circle_count != r.circle_count + 1) throw LinalgError("saddle: split expected");
        int c1 = r2.arc_circle[st.image_a], c2 = r2.arc_circle[st.image_b];
        std::vector<int> img = map_circles(r, r2, st.arc_image);
        Labels base = push_labels(t.labels, img, ca);
        Labels x1 = Labels{1} << c1, x2 = Labels{1} << c2;
        if (bit(t.labels, ca)) {
            out.push_back({t.state, base | x1 | x2});
        } else {
            out.push_back({t.state, base | x1});
            out.push_back({t.state, base | x2});
            out.push_back({t.state, base});
        }
    }
    return Chain(std::move(out));
}

Chain death_map(const MovieStep& st, ResolutionCache& large, ResolutionCache& small, const Chain& v) {
    std::vector<Term> out;
    for (const Term& t : v.terms()) {
        const Resolution& r = large.get(t.state);
        int c = r.arc_circle[st.loop];
        if (!bit(t.labels, c)) continue;  // counit: 1 -> 0, x -> 1
        const Resolution& r2 = small.get(t.state);
        out.push_back({t.state, push_labels(t.labels, map_circles(r, r2, st.arc_image), c)});
    }
    return Chain(std::move(out));
}

Chain birth_map(const MovieStep& st, ResolutionCache& small, ResolutionCache& large, const Chain& v) {
    std::vector<Term> out;
    for (const Term& t : v.terms()) {
        const Resolution& r = large.get(t.state);
        const Resolution& r2 = small.get(t.state);
        std::vector<int> inv = invert(map_circles(r, r2, st.arc_image), r2.circle_count);
        out.push_back({t.state, push_labels(t.labels, inv)});  // the new circle gets 1
    }
    return Chain(std::move(out));
}

struct R2Frame {
    const MovieStep& st;
    ResolutionCache& large;
    ResolutionCache& small;
    std::vector<int> bigon() const { return {st.bigon[0], st.bigon[1]}; }
    State bit_u() const { return State{1} << st.u; }
    State bit_w() const { return State{1} << st.w; }
};

// Terms of the larger frame at the through-strand smoothing, moved to the
// smaller frame.
Chain r2_collapse(const R2Frame& f, const Chain& v) {
    std::vector<Term> out;
    for (const Term& t : v.terms()) {
        State s2 = shrink(t.state, f.st.crossing_origin);
        const Resolution& r = f.large.get(t.state);
        const Resolution& r2 = f.small.get(s2);
        out.push_back({s2, push_labels(t.labels, map_circles(r, r2, f.st.arc_image, f.bigon()))});
    }
    return Chain(std::move(out));
}

// Moves terms to another smoothing of the larger frame that agrees away
// from the bigon. A bigon circle in the source is dropped; one in the
// target is labelled 1.
Chain r2_relabel(const R2Frame& f, const Chain& v, State clear) {
    std::vector<Term> out;
    auto arcs = f.bigon();
    std::vector<int> id(f.large.diagram().arc_count());
    std::iota(id.begin(), id.end(), 0);
    for (const Term& t : v.terms()) {
        State s2 = t.state & ~clear;
        const Resolution& r = f.large.get(t.state);
        const Resolution& r2 = f.large.get(s2);
        int bc = r.arc_circle[arcs[0]];
        int skip = r.circle_darts[bc].size() == 2 && r.arc_circle[arcs[1]] == bc ? bc : -1;
        out.push_back({s2, push_labels(t.labels, map_circles(r, r2, id, arcs), skip)});
    }
    return Chain(std::move(out));
}

Chain r2_forward(const R2Frame& f, const Chain& v) {
    // F(v) = v_S + d_{T0 -> S}(v_O restricted to bigon circle x, moved to T0)
    std::vector<Term> through, crossed;
    const State u = f.bit_u(), w = f.bit_w();
    for (const Term& t : v.terms()) {
        bool bu = t.state & u, bw = t.state & w;
        if (!bu && bw) {
            through.push_back(t);
        } else if (bu && !bw) {
            const Resolution& r = f.large.get(t.state);
            if (bit(t.labels, r.arc_circle[f.st.bigon[0]])) crossed.push_back(t);
        }
    }
    Chain s(std::move(through));
    Chain t0 = r2_relabel(f, Chain(std::move(crossed)), u);
    s += edge_differential(f.large, t0, f.st.w);
    return r2_collapse(f, s);
}

Chain r2_backward(const R2Frame& f, const Chain& v) {
    // G(c) = c + (d_{S -> T1} c moved to O with the bigon circle labelled 1)
    std::vector<Term> lifted;
    for (const Term& t : v.terms()) {
        State s = expand(t.state, f.st.crossing_origin) | f.bit_w();
        const Resolution& r = f.large.get(s);
        const Resolution& r2 = f.small.get(t.state);
        std::vector<int> inv = invert(map_circles(r, r2, f.st.arc_image, f.bigon()), r2.circle_count);
        lifted.push_back({s, push_labels(t.labels, inv)});
    }
    Chain c(std::move(lifted));
    Chain t1 = edge_differential(f.large, c, f.st.u);
    c += r2_relabel(f, t1, f.bit_w());
    return c;
}

}  // namespace

MovieMap::MovieMap(Movie m) : movie_(std::move(m)) {
    if (movie_.frames.size() != movie_.steps.size() + 1) throw DiagramError("movie: frame count mismatch");
    for (const Diagram& d : movie_.frames) caches_.push_back(std::make_unique<ResolutionCache>(d));
}

Chain MovieMap::apply_step(std::size_t k, const Chain& v) const {
    const MovieStep& st = movie_.steps.at(k);
    ResolutionCache& a = *caches_[k];
    ResolutionCache& b = *caches_[k + 1];
    using K = MovieStep::Kind;
    switch (st.kind) {
        case K::Saddle: return saddle_map(st, a, b, v);
        case K::Death: return death_map(st, a, b, v);
        case K::Birth: return birth_map(st, a, b, v);
        case K::R2Removal: return r2_forward(R2Frame{st, a, b}, v);
        case K::R2Insertion: return r2_backward(R2Frame{st, b, a}, v);
    }
    return {};
}

Chain MovieMap::apply(const Chain& v) const {
    Chain c = v;
    for (std::size_t k = 0; k < movie_.steps.size(); ++k) c = apply_step(k, c);
    return c;
}

ComplexMap materialize(const Diagram& src, const Diagram& dst,
                       const std::function<Chain(const Chain&)>& f, int guard) {
    ResolutionCache rs(src), rd(dst);
    CubeIndex is = index_cube(src, rs, guard), id = index_cube(dst, rd, guard);
    ComplexMap out;
    out.lo = is.lo;
    const int X = src.crossing_count();
    for (int k = 0; k <= X; ++k) {
        int deg = k + is.lo;
        bool inside = deg >= id.lo && deg <= id.hi;
        std::size_t rows = inside ? id.dims[deg - id.lo] : 0;
        F2Matrix m(rows, is.dims[k]);
        for (State s = 0; s < (State{1} << X); ++s) {
            if (std::popcount(s) != k) continue;
            for (Labels l = 0; l < (Labels{1} << is.circles[s]); ++l) {
                Chain e({{s, l}});
                std::size_t col = chain_vector(src, is, e, deg).next(0);
                Chain img = f(e);
                if (!inside) {
                    if (!img.empty()) throw LinalgError("materialize: image outside the target cube");
                    continue;
                }
                BitVector v = chain_vector(dst, id, img, deg);
                for (std::size_t r : v.ones()) m.set(r, col);
            }
        }
        out.f.push_back(std::move(m));
    }
    return out;
}

Movie annulus_movie(const Diagram& cabled, const CableMap& cm, int component, int l, bool other_tip) {
    if (component < 0 || component >= static_cast<int>(cm.strand_component.size()))
        throw DiagramError("annulus: no component " + std::to_string(component + 1));
    const auto& strands = cm.strand_component[component];
    if (l < 1 || l >= static_cast<int>(strands.size()) || strands[l - 1] < 0 || strands[l] < 0)
        throw DiagramError("annulus: strands " + std::to_string(l) + " and " + std::to_string(l + 1) +
                           " are not adjacent");
    if (!cabled.has_embedding()) throw DiagramError("annulus: the cable needs an embedding");
    const int a = cabled.base_arcs[strands[l - 1]], b = cabled.base_arcs[strands[l]];
    // side of each base arc facing the other one
    bool side_a = false, side_b = false;
    {
        const auto& reg = cabled.dart_region;
        bool found = false;
        for (bool ba : {false, true})
            for (bool bb : {false, true})
                if (!found && reg[dart(a, ba)] == reg[dart(b, bb)]) side_a = ba, side_b = bb, found = true;
        if (!found) throw DiagramError("annulus: strands " + std::to_string(l) + " and " + std::to_string(l + 1) +
                                       " are not adjacent");
    }
    Movie m;
    m.frames.push_back(cabled);
    auto push = [&](MovieStep st, Diagram next) {
        m.steps.push_back(std::move(st));
        m.frames.push_back(std::move(next));
    };
    Diagram next;
    MovieStep st = saddle_step(m.frames.back(), a, b, next);
    int tip = other_tip ? st.image_b : st.image_a;
    // the turn-back encloses its piece of the strip on this side
    const bool side = other_tip ? side_b : side_a;
    push(std::move(st), std::move(next));
    while (!m.frames.back().arcs[tip].is_loop()) {
        const Diagram& f = m.frames.back();
        const Arc& e = f.arcs[tip];
        st = r2_removal_step(f, e.tail.crossing, e.head.crossing, next, dart(tip, side));
        tip = st.arc_image[tip];
        push(std::move(st), std::move(next));
    }
    st = death_step(m.frames.back(), tip, next);
    push(std::move(st), std::move(next));
    return m;
}

AnnulusMap::AnnulusMap(const Diagram& base, std::span<const int> colours, int component, int l,
                       bool reversed, bool other_tip)
    : reversed_(reversed) {
    if (component < 0 || component >= static_cast<int>(colours.size()))
        throw DiagramError("annulus: no component " + std::to_string(component + 1));
    std::vector<int> lower(colours.begin(), colours.end());
    lower[component] -= 2;
    if (lower[component] < 0) throw DiagramError("annulus: colour below 2");
    std::tie(large_, large_map_) = cable(base, colours);
    std::tie(small_, small_map_) = cable(base, lower);
    map_ = std::make_unique<MovieMap>(annulus_movie(large_, large_map_, component, l, other_tip));
    const Movie& mv = map_->movie();
    const Diagram& fin = mv.frames.back();

    // provenance of the last frame in the large cable
    std::vector<int> corigin(fin.crossing_count());
    {
        std::vector<int> cur(large_.crossing_count());
        std::iota(cur.begin(), cur.end(), 0);
        for (const MovieStep& st : mv.steps) {
            std::vector<int> nxt(st.crossing_origin.size());
            for (std::size_t k = 0; k < nxt.size(); ++k) nxt[k] = cur[st.crossing_origin[k]];
            cur.swap(nxt);
        }
        corigin = cur;
    }
    std::vector<int> arc_src(fin.arc_count(), -1);
    for (int a = 0; a < large_.arc_count(); ++a) {
        int cur = a;
        for (const MovieStep& st : mv.steps)
            if (cur >= 0) cur = st.arc_image[cur];
        if (cur >= 0 && arc_src[cur] < 0) arc_src[cur] = a;
    }

    auto renumber = [&](int comp, int strand) {
        if (comp != component) return strand;
        if (strand == l || strand == l + 1) throw DiagramError("annulus: contracted strand survives");
        return strand > l + 1 ? strand - 2 : strand;
    };
    std::map<std::array<int, 3>, int> small_index;
    for (int x = 0; x < small_.crossing_count(); ++x) small_index[small_map_.crossing_source[x]] = x;
    crossing_to_small.assign(fin.crossing_count(), -1);
    for (int k = 0; k < fin.crossing_count(); ++k) {
        auto src = large_map_.crossing_source[corigin[k]];
        const Crossing& oc = base.crossings[src[0]];
        src[1] = renumber(base.arcs[oc.arcs[0]].component, src[1]);
        src[2] = renumber(base.arcs[oc.arcs[1]].component, src[2]);
        auto it = small_index.find(src);
        if (it == small_index.end() || small_.crossings[it->second].over_first != fin.crossings[k].over_first)
            throw DiagramError("annulus: final frame does not match the cable");
        crossing_to_small[k] = it->second;
    }
    arc_to_small.assign(fin.arc_count(), -1);
    std::vector<bool> hit(small_.arc_count(), false);
    for (int a = 0; a < fin.arc_count(); ++a) {
        const Arc& e = fin.arcs[a];
        int b = -1;
        if (e.is_loop()) {
            if (arc_src[a] < 0) throw DiagramError("annulus: loop without provenance");
            auto [comp, strand] = large_map_.arc_source[arc_src[a]];
            int c = small_map_.strand_component[comp][renumber(comp, strand) - 1];
            b = small_.components[c].front();
            if (!small_.arcs[b].is_loop()) throw DiagramError("annulus: final frame does not match the cable");
        } else {
            Slot t{crossing_to_small[e.tail.crossing], e.tail.pos};
            Slot h{crossing_to_small[e.head.crossing], e.head.pos};
            b = small_.crossings[t.crossing].arcs[t.pos];
            if (!(small_.arcs[b].tail == t) || !(small_.arcs[b].head == h))
                throw DiagramError("annulus: final frame does not match the cable");
        }
        if (hit[b]) throw DiagramError("annulus: final frame does not match the cable");
        hit[b] = true;
        arc_to_small[a] = b;
    }
    if (fin.arc_count() != small_.arc_count() || fin.crossing_count() != small_.crossing_count())
        throw DiagramError("annulus: final frame does not match the cable");

    final_cache_ = std::make_unique<ResolutionCache>(fin);
    small_cache_ = std::make_unique<ResolutionCache>(small_);
    if (reversed_) back_ = std::make_unique<MovieMap>(reverse_movie(mv));
}

Chain AnnulusMap::final_to_small(const Chain& v) const {
    std::vector<Term> out;
    for (const Term& t : v.terms()) {
        State s2 = expand(t.state, crossing_to_small);
        const Resolution& r = final_cache_->get(t.state);
        const Resolution& r2 = small_cache_->get(s2);
        out.push_back({s2, push_labels(t.labels, map_circles(r, r2, arc_to_small))});
    }
    return Chain(std::move(out));
}

Chain AnnulusMap::small_to_final(const Chain& v) const {
    std::vector<Term> out;
    for (const Term& t : v.terms()) {
        State s = shrink(t.state, crossing_to_small);
        const Resolution& r = final_cache_->get(s);
        const Resolution& r2 = small_cache_->get(t.state);
        std::vector<int> inv = invert(map_circles(r, r2, arc_to_small), r2.circle_count);
        out.push_back({s, push_labels(t.labels, inv)});
    }
    return Chain(std::move(out));
}

Chain AnnulusMap::apply(const Chain& v) const {
    if (reversed_) return back_->apply(small_to_final(v));
    return final_to_small(map_->apply(v));
}

F2Matrix induced_on_canonical(const AnnulusMap& m, const BNHomology& src, const BNHomology& dst) {
    F2Matrix out(dst.dimension(), src.dimension());
    for (std::size_t k = 0; k < src.dimension(); ++k) {
        Chain z = canonical_cycle(m.source(), src.classes()[k].theta);
        BitVector col = dst.project(m.apply(z));
        for (std::size_t r : col.ones()) out.set(r, k);
    }
    return out;
}

}  // namespace cbn
