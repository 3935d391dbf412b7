#include "cbn/barnatan.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <queue>
#include <string>

#include "union_find.hpp"

namespace cbn {

int cube_guard() {
    if (const char* env = std::getenv("CBN_CUBE_GUARD")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            throw SizeGuardError(std::string("CBN_CUBE_GUARD is not an integer: ") + env);
        }
    }
    return kDefaultCubeGuard;
}

std::array<int, 4> smoothing_partner(const Crossing& c, int smoothing) {
    int p = c.over_first ? 0 : 1;
    std::array<int, 4> partner{};
    // 0-smoothing joins over slot p with p-1; 1-smoothing joins it with p+1
    int shift = smoothing == 0 ? 3 : 1;
    for (int q : {p, p + 2}) {
        int r = (q + shift) % 4;
        partner[q] = r;
        partner[r] = q;
    }
    return partner;
}

namespace {

// Dart running along the half-edge at slot p towards the crossing.
int arriving_dart(const Diagram& d, int crossing, int p) {
    return dart(d.crossings[crossing].arcs[p], p >= 2);
}

// Dart running away from the crossing along the half-edge at slot p.
int leaving_dart(const Diagram& d, int crossing, int p) {
    return dart(d.crossings[crossing].arcs[p], p < 2);
}

Slot dart_end(const Diagram& d, int dt) {
    const Arc& a = d.arcs[dart_arc(dt)];
    return dart_backward(dt) ? a.tail : a.head;
}

}  // namespace

Resolution resolve(const Diagram& d, State s) {
    const int A = d.arc_count(), X = d.crossing_count();
    std::vector<std::array<int, 4>> partner(X);
    for (int x = 0; x < X; ++x) partner[x] = smoothing_partner(d.crossings[x], (s >> x) & 1);

    Resolution r;
    r.arc_circle.assign(A, -1);
    for (int a = 0; a < A; ++a) {
        if (r.arc_circle[a] >= 0) continue;
        int c = r.circle_count++;
        std::vector<int> darts;
        int start = dart(a, false);
        int cur = start;
        do {
            darts.push_back(cur);
            r.arc_circle[dart_arc(cur)] = c;
            if (d.arcs[dart_arc(cur)].is_loop()) break;
            Slot end = dart_end(d, cur);
            cur = leaving_dart(d, end.crossing, partner[end.crossing][end.pos]);
        } while (cur != start);
        r.circle_darts.push_back(std::move(darts));
    }
    if (!d.has_embedding()) return r;

    const int R = *std::max_element(d.dart_region.begin(), d.dart_region.end()) + 1;
    UnionFind uf(R);
    for (int x = 0; x < X; ++x) {
        int first = -1;
        for (int q = 0; q < 4; ++q) {
            if (partner[x][q] == (q + 1) % 4) continue;
            int reg = d.dart_region[arriving_dart(d, x, (q + 1) % 4)];
            if (first < 0) first = reg;
            else uf.unite(first, reg);
        }
    }
    const int C = r.circle_count;
    std::vector<int> left(C), right(C);
    // adjacency between region roots and circles
    std::vector<std::vector<int>> region_circles(R);
    for (int c = 0; c < C; ++c) {
        int dt = r.circle_darts[c][0];
        left[c] = uf.find(d.dart_region[dt]);
        right[c] = uf.find(d.dart_region[dt ^ 1]);
        if (left[c] == right[c]) throw DiagramError("resolve: circle does not separate the plane");
        region_circles[left[c]].push_back(c);
        region_circles[right[c]].push_back(c);
    }
    r.depth.assign(C, -1);
    r.inner_on_left.assign(C, false);
    std::vector<int> region_depth(R, -1);
    std::queue<int> todo;
    int root = uf.find(0);
    region_depth[root] = 0;
    todo.push(root);
    while (!todo.empty()) {
        int g = todo.front();
        todo.pop();
        for (int c : region_circles[g]) {
            if (r.depth[c] >= 0) continue;
            r.depth[c] = region_depth[g];
            int other = left[c] == g ? right[c] : left[c];
            r.inner_on_left[c] = other == left[c];
            if (region_depth[other] >= 0) throw DiagramError("resolve: circles do not form a tree");
            region_depth[other] = region_depth[g] + 1;
            todo.push(other);
        }
    }
    for (int c = 0; c < C; ++c)
        if (r.depth[c] < 0) throw DiagramError("resolve: circle not reachable from the outer face");
    return r;
}

const Resolution& ResolutionCache::get(State s) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(s);
    if (it != cache_.end()) return *it->second;
    auto res = std::make_unique<Resolution>(resolve(d_, s));
    const Resolution& ref = *res;
    cache_.emplace(s, std::move(res));
    return ref;
}

void Chain::normalize() {
    std::sort(terms_.begin(), terms_.end());
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size();) {
        std::size_t j = i;
        while (j < terms_.size() && terms_[j] == terms_[i]) ++j;
        if ((j - i) % 2) out.push_back(terms_[i]);
        i = j;
    }
    terms_.swap(out);
    dirty_ = false;
}

Chain& Chain::operator+=(const Chain& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    normalize();
    return *this;
}

bool Chain::operator==(const Chain& o) const {
    Chain a = *this, b = o;
    a.normalize();
    b.normalize();
    return a.terms_ == b.terms_;
}

int homological_degree(const Diagram& d, State s) {
    return std::popcount(s) - negative_crossings(d);
}

namespace {

// Images of the circles of `r` in `r2` (all circles away from the edge's
// crossing survive unchanged).
std::vector<int> circle_images(const Resolution& r, const Resolution& r2) {
    std::vector<int> img(r.circle_count);
    for (int c = 0; c < r.circle_count; ++c) img[c] = r2.arc_circle[dart_arc(r.circle_darts[c][0])];
    return img;
}

inline bool bit(Labels l, int k) { return (l >> k) & 1; }

// Edge map along crossing x applied to one term; appends to `out`.
void edge_map(const Diagram& d, const Resolution& r, const Resolution& r2, int x, const Term& t,
              State s2, std::vector<Term>& out) {
    const Crossing& cr = d.crossings[x];
    int a = r.arc_circle[cr.arcs[0]];
    int b = -1;
    for (int q = 1; q < 4; ++q)
        if (r.arc_circle[cr.arcs[q]] != a) b = r.arc_circle[cr.arcs[q]];
    std::vector<int> img = circle_images(r, r2);
    if (b >= 0) {
        // merge: label = a OR b
        Labels l2 = 0;
        for (int c = 0; c < r.circle_count; ++c)
            if (bit(t.labels, c)) l2 |= Labels{1} << img[c];
        out.push_back({s2, l2});
        return;
    }
    // split of circle a into c1, c2
    int c1 = r2.arc_circle[cr.arcs[0]], c2 = -1;
    for (int q = 1; q < 4; ++q)
        if (r2.arc_circle[cr.arcs[q]] != c1) c2 = r2.arc_circle[cr.arcs[q]];
    Labels base = 0;
    for (int c = 0; c < r.circle_count; ++c)
        if (c != a && bit(t.labels, c)) base |= Labels{1} << img[c];
    Labels x1 = Labels{1} << c1, x2 = Labels{1} << c2;
    if (bit(t.labels, a)) {
        out.push_back({s2, base | x1 | x2});
    } else {
        out.push_back({s2, base | x2});
        out.push_back({s2, base | x1});
        out.push_back({s2, base});
    }
}

}  // namespace

Chain differential(ResolutionCache& rc, const Chain& v) {
    const Diagram& d = rc.diagram();
    std::vector<Term> out;
    for (const Term& t : v.terms()) {
        const Resolution& r = rc.get(t.state);
        for (int x = 0; x < d.crossing_count(); ++x) {
            if ((t.state >> x) & 1) continue;
            State s2 = t.state | (State{1} << x);
            edge_map(d, r, rc.get(s2), x, t, s2, out);
        }
    }
    return Chain(std::move(out));
}

Chain edge_differential(ResolutionCache& rc, const Chain& v, int crossing) {
    const Diagram& d = rc.diagram();
    std::vector<Term> out;
    for (const Term& t : v.terms()) {
        if ((t.state >> crossing) & 1) continue;
        State s2 = t.state | (State{1} << crossing);
        edge_map(d, rc.get(t.state), rc.get(s2), crossing, t, s2, out);
    }
    return Chain(std::move(out));
}

State canonical_smoothing(const Diagram& d, const Orientation& theta) {
    State s = 0;
    for (int x = 0; x < d.crossing_count(); ++x)
        if (crossing_sign(d, x, theta) < 0) s |= State{1} << x;
    return s;
}

std::vector<bool> canonical_groups(const Diagram& d, const Orientation& theta,
                                   const Resolution& r) {
    if (!d.has_embedding() && d.arc_count() > 0) throw DiagramError("canonical cycles need an embedding");
    std::vector<bool> group(r.circle_count);
    for (int c = 0; c < r.circle_count; ++c) {
        // traversal direction relative to theta, checked for coherence
        bool along = false;
        for (std::size_t k = 0; k < r.circle_darts[c].size(); ++k) {
            int dt = r.circle_darts[c][k];
            bool rev = theta[d.arcs[dart_arc(dt)].component];
            bool agrees = dart_backward(dt) == rev;
            if (k == 0) along = agrees;
            else if (agrees != along)
                throw DiagramError("canonical smoothing circle is not coherently oriented");
        }
        bool ccw = along ? r.inner_on_left[c] : !r.inner_on_left[c];
        bool even = r.depth[c] % 2 == 0;
        bool group0 = (ccw && even) || (!ccw && !even);
        group[c] = !group0;
    }
    return group;
}

Chain canonical_cycle(const Diagram& d, const Orientation& theta) {
    State s = canonical_smoothing(d, theta);
    Resolution r = resolve(d, s);
    std::vector<bool> group = canonical_groups(d, theta, r);
    Labels fixed = 0;
    std::vector<int> free;
    for (int c = 0; c < r.circle_count; ++c) {
        if (group[c]) fixed |= Labels{1} << c;
        else free.push_back(c);
    }
    if (free.size() > 40) throw SizeGuardError("canonical cycle has too many terms");
    std::vector<Term> terms;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << free.size()); ++m) {
        Labels l = fixed;
        for (std::size_t k = 0; k < free.size(); ++k)
            if ((m >> k) & 1) l |= Labels{1} << free[k];
        terms.push_back({s, l});
    }
    return Chain(std::move(terms));
}

int canonical_degree(const std::vector<int>& E, const LinkingData& lk) {
    std::vector<bool> in(lk.size(), false);
    for (int l : E) in[l] = true;
    int sum = 0;
    for (int l = 0; l < lk.size(); ++l)
        for (int m = 0; m < lk.size(); ++m)
            if (in[l] && !in[m]) sum += lk(l, m);
    return 2 * sum;
}

std::vector<int> reversal_set(const Orientation& theta) {
    std::vector<int> E;
    for (int k = 0; k < static_cast<int>(theta.size()); ++k)
        if (theta[k]) E.push_back(k);
    return E;
}

Orientation orientation_from_mask(int components, std::uint64_t mask) {
    Orientation t(components);
    for (int k = 0; k < components; ++k) t[k] = (mask >> k) & 1;
    return t;
}

BNHomology::BNHomology(const Diagram& d) : d_(d), cache_(d_) {
    const int k = d_.component_count();
    if (k > 30) throw SizeGuardError("too many components for the canonical basis");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        Class c;
        c.theta = orientation_from_mask(k, mask);
        c.state = canonical_smoothing(d_, c.theta);
        c.degree = homological_degree(d_, c.state);
        c.group = canonical_groups(d_, c.theta, cache_.get(c.state));
        classes_.push_back(std::move(c));
    }
}

std::map<int, int> BNHomology::degrees() const {
    std::map<int, int> out;
    for (const Class& c : classes_) out[c.degree]++;
    return out;
}

BitVector BNHomology::project(const Chain& cycle, bool assume_cycle) const {
    if (!assume_cycle && !differential(cache_, cycle).empty())
        throw LinalgError("project: not a cycle");
    BitVector out(classes_.size());
    for (std::size_t k = 0; k < classes_.size(); ++k) {
        const Class& c = classes_[k];
        Labels g1 = 0;
        for (std::size_t i = 0; i < c.group.size(); ++i)
            if (c.group[i]) g1 |= Labels{1} << i;
        auto lo = std::lower_bound(cycle.terms().begin(), cycle.terms().end(), Term{c.state, 0});
        bool coeff = false;
        for (auto it = lo; it != cycle.terms().end() && it->state == c.state; ++it)
            if ((it->labels & ~g1) == 0) coeff = !coeff;
        if (coeff) out.set(k);
    }
    return out;
}

CubeIndex index_cube(const Diagram& d, ResolutionCache& rc, int guard) {
    const int X = d.crossing_count();
    if (X > guard)
        throw SizeGuardError("diagram has " + std::to_string(X) + " crossings; cube guard is " +
                             std::to_string(guard));
    CubeIndex idx;
    const int nm = negative_crossings(d);
    idx.lo = -nm;
    idx.hi = X - nm;
    const State N = State{1} << X;
    idx.circles.resize(N);
    idx.offset.resize(N);
    idx.dims.assign(X + 1, 0);
    for (State s = 0; s < N; ++s) {
        int c = rc.get(s).circle_count;
        if (c > 62) throw SizeGuardError("too many circles in a resolution");
        idx.circles[s] = c;
        int k = std::popcount(s);
        idx.offset[s] = idx.dims[k];
        idx.dims[k] += std::uint64_t{1} << c;
    }
    return idx;
}

namespace {

// Lexicographic position of a labelling: circle 0 is the most significant.
std::uint64_t lex(Labels l, int circles) {
    std::uint64_t out = 0;
    for (int c = 0; c < circles; ++c)
        if (bit(l, c)) out |= std::uint64_t{1} << (circles - 1 - c);
    return out;
}

std::vector<State> states_of_weight(int X, int k) {
    std::vector<State> out;
    for (State s = 0; s < (State{1} << X); ++s)
        if (std::popcount(s) == k) out.push_back(s);
    return out;
}

// Sparse matrix of the differential out of cube layer k.
SparseColumns layer_matrix(const Diagram& d, ResolutionCache& rc, const CubeIndex& idx, int k,
                           CubeBasis basis) {
    const int X = d.crossing_count();
    SparseColumns m;
    m.rows = idx.dims[k + 1];
    m.cols.resize(idx.dims[k]);
    std::vector<Term> out;
    for (State s : states_of_weight(X, k)) {
        const Resolution& r = rc.get(s);
        const int C = idx.circles[s];
        for (Labels l = 0; l < (Labels{1} << C); ++l) {
            auto& col = m.cols[idx.offset[s] + lex(l, C)];
            for (int x = 0; x < X; ++x) {
                if ((s >> x) & 1) continue;
                State s2 = s | (State{1} << x);
                const Resolution& r2 = rc.get(s2);
                out.clear();
                if (basis == CubeBasis::Standard) {
                    edge_map(d, r, r2, x, {s, l}, s2, out);
                } else {
                    // idempotents: merge e_a e_b -> delta_ab e_a, split e_a -> e_a e_a
                    const Crossing& cr = d.crossings[x];
                    int a = r.arc_circle[cr.arcs[0]], b = -1;
                    for (int q = 1; q < 4; ++q)
                        if (r.arc_circle[cr.arcs[q]] != a) b = r.arc_circle[cr.arcs[q]];
                    if (b >= 0 && bit(l, a) != bit(l, b)) continue;
                    std::vector<int> img = circle_images(r, r2);
                    Labels l2 = 0;
                    for (int c = 0; c < r.circle_count; ++c)
                        if (bit(l, c)) l2 |= Labels{1} << img[c];
                    if (b < 0 && bit(l, a)) {
                        for (int q = 0; q < 4; ++q) l2 |= Labels{1} << r2.arc_circle[cr.arcs[q]];
                    }
                    out.push_back({s2, l2});
                }
                for (const Term& t : out)
                    col.push_back(static_cast<std::uint32_t>(idx.offset[s2] + lex(t.labels, idx.circles[s2])));
            }
            std::sort(col.begin(), col.end());
            std::vector<std::uint32_t> reduced;
            for (std::size_t i = 0; i < col.size();) {
                std::size_t j = i;
                while (j < col.size() && col[j] == col[i]) ++j;
                if ((j - i) % 2) reduced.push_back(col[i]);
                i = j;
            }
            col.swap(reduced);
        }
    }
    return m;
}

}  // namespace

std::map<int, std::uint64_t> cube_homology_dims(const Diagram& d, CubeBasis basis, int guard) {
    ResolutionCache rc(d);
    CubeIndex idx = index_cube(d, rc, guard);
    const int X = d.crossing_count();
    for (std::uint64_t dim : idx.dims)
        if (dim > 0xffffffffULL) throw SizeGuardError("cube layer too large for 32-bit indices");
    std::vector<std::uint64_t> rk(X + 1, 0);  // rank of the map out of layer k
    for (int k = 0; k < X; ++k) rk[k] = sparse_rank(layer_matrix(d, rc, idx, k, basis));
    std::map<int, std::uint64_t> out;
    for (int k = 0; k <= X; ++k) {
        std::uint64_t h = idx.dims[k] - rk[k] - (k > 0 ? rk[k - 1] : 0);
        if (h) out[k + idx.lo] = h;
    }
    return out;
}

ChainComplex cube_complex(const Diagram& d, int guard) {
    ResolutionCache rc(d);
    CubeIndex idx = index_cube(d, rc, guard);
    const int X = d.crossing_count();
    ChainComplex c;
    c.lo = idx.lo;
    for (int k = 0; k <= X; ++k) c.dims.push_back(idx.dims[k]);
    for (int k = 0; k < X; ++k) c.d.push_back(layer_matrix(d, rc, idx, k, CubeBasis::Standard).to_dense());
    return c;
}

BitVector chain_vector(const Diagram& d, const CubeIndex& idx, const Chain& v, int deg) {
    int k = deg - idx.lo;
    BitVector out(idx.dims.at(k));
    for (const Term& t : v.terms()) {
        if (std::popcount(t.state) != k) throw LinalgError("chain_vector: term in another degree");
        out.flip(idx.offset[t.state] + lex(t.labels, idx.circles[t.state]));
    }
    (void)d;
    return out;
}

std::uint64_t surviving_colourings(const Diagram& d) {
    // Crossings are checked as soon as their four arcs are coloured; arcs
    // are ordered greedily so that crossings complete early.
    const int A = d.arc_count(), X = d.crossing_count();
    std::vector<std::vector<int>> arc_crossings(A);
    for (int x = 0; x < X; ++x)
        for (int a : d.crossings[x].arcs) arc_crossings[a].push_back(x);
    std::vector<int> order;
    std::vector<bool> placed(A, false);
    std::vector<int> touched(X, 0);
    std::uint64_t loops = 0;
    for (int a = 0; a < A; ++a)
        if (d.arcs[a].is_loop()) {
            placed[a] = true;
            ++loops;
        }
    while (true) {
        int best = -1, score = -1;
        for (int a = 0; a < A; ++a) {
            if (placed[a]) continue;
            int sc = 0;
            for (int x : arc_crossings[a]) sc += 1 + touched[x] * 4;
            if (sc > score) score = sc, best = a;
        }
        if (best < 0) break;
        placed[best] = true;
        order.push_back(best);
        for (int x : arc_crossings[best]) touched[x]++;
    }
    // crossings completed at each step of the order
    std::vector<std::vector<int>> completes(order.size());
    std::vector<int> count(X, 0);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int x : arc_crossings[order[i]])
            if (++count[x] == 4) completes[i].push_back(x);
    // an arc at a crossing may sit in two slots (kinks): dedupe
    for (auto& v : completes) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    std::vector<int> colour(A, -1);
    std::uint64_t found = 0;
    auto ok = [&](int x) {
        const auto& s = d.crossings[x].arcs;
        bool p0 = colour[s[0]] == colour[s[3]] && colour[s[1]] == colour[s[2]];
        bool p1 = colour[s[0]] == colour[s[1]] && colour[s[2]] == colour[s[3]];
        return p0 != p1;
    };
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == order.size()) {
            ++found;
            return;
        }
        for (int c = 0; c < 2; ++c) {
            colour[order[i]] = c;
            bool good = true;
            for (int x : completes[i])
                if (!ok(x)) { good = false; break; }
            if (good) self(self, i + 1);
        }
        colour[order[i]] = -1;
    };
    rec(rec, 0);
    return found << loops;
}

}  // namespace cbn
