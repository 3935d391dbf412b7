#include "cbn/coloured.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "cbn/barnatan.hpp"
#include "cbn/cobordism.hpp"
#include "json.hpp"

namespace cbn {

namespace {

// Dense bases beyond this many strands are refused.
constexpr int kModelStrandLimit = 14;

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k; (k = next++) < n;) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!err) err = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// Strands of a cable in basis order.
struct Strands {
    std::vector<int> comp, pos;  // pos is 1-based within the component
    std::vector<int> offset;     // first bit of each component
    int size() const { return static_cast<int>(comp.size()); }
};

Strands strands_of(const std::vector<int>& cable) {
    Strands s;
    for (int i = 0; i < static_cast<int>(cable.size()); ++i) {
        s.offset.push_back(s.size());
        for (int k = 1; k <= cable[i]; ++k) {
            s.comp.push_back(i);
            s.pos.push_back(k);
        }
    }
    return s;
}

int mask_degree(const LinkingData& lk, const Strands& s, std::uint64_t mask) {
    int deg = 0;
    for (int a = 0; a < s.size(); ++a) {
        if (!((mask >> a) & 1)) continue;
        for (int b = 0; b < s.size(); ++b) {
            if ((mask >> b) & 1) continue;
            int sign = (s.pos[a] + s.pos[b]) % 2 ? -1 : 1;
            deg += sign * lk(s.comp[a], s.comp[b]);
        }
    }
    return 2 * deg;
}

// Drops bits b and b+1, shifting the higher bits down.
std::uint64_t drop_two(std::uint64_t mask, int b) {
    std::uint64_t low = mask & ((std::uint64_t{1} << b) - 1);
    return low | ((mask >> (b + 2)) << b);
}

std::vector<int> resolve_dots(const std::vector<int>& colours, const std::optional<std::vector<int>>& dots) {
    if (!dots) return colours;
    if (dots->size() != colours.size())
        throw std::invalid_argument("dots: expected one entry per component");
    for (std::size_t j = 0; j < colours.size(); ++j)
        if ((*dots)[j] < 0 || (*dots)[j] > colours[j])
            throw std::invalid_argument("dots: need 0 <= m <= n on component " + std::to_string(j + 1));
    return *dots;
}

void check_colours(const std::vector<int>& colours, int components) {
    if (static_cast<int>(colours.size()) != components)
        throw std::invalid_argument("colours: expected " + std::to_string(components) + " entries, got " +
                                    std::to_string(colours.size()));
    for (int c : colours)
        if (c < 0) throw std::invalid_argument("colours: negative colour");
}

// Vertices and the combinatorial edges, without spaces or matrices.
void build_graph(ColouredComplex& c) {
    for (DotRowVector& v : enumerate_dot_row_vectors(c.dots)) {
        ColouredVertex vx;
        vx.rows = std::move(v);
        vx.cable = c.colours;
        for (std::size_t j = 0; j < vx.rows.size(); ++j) vx.cable[j] -= 2 * vx.rows[j].p();
        c.vertices.push_back(std::move(vx));
    }
    std::map<DotRowVector, std::size_t> index;
    for (std::size_t k = 0; k < c.vertices.size(); ++k) index[c.vertices[k].rows] = k;
    for (std::size_t k = 0; k < c.vertices.size(); ++k)
        for (const DotRowEdge& e : dot_row_edges(c.vertices[k].rows)) {
            ColouredEdge ce;
            ce.from = k;
            ce.to = index.at(e.target);
            ce.component = e.component;
            ce.l = e.l;
            c.edges.push_back(std::move(ce));
        }
}

std::vector<int> framing_of(const LinkingData& lk) {
    std::vector<int> f;
    for (int i = 0; i < lk.size(); ++i) f.push_back(lk(i, i));
    return f;
}

}  // namespace

// Dot rows ------------------------------------------------------------------

bool DotRow::paired(int pos) const {
    for (int k : pairs)
        if (pos == k || pos == k + 1) return true;
    return false;
}

std::vector<int> DotRow::singles() const {
    std::vector<int> out;
    for (int k = 1; k <= n; ++k)
        if (!paired(k)) out.push_back(k);
    return out;
}

std::string DotRow::str() const {
    std::string s;
    for (int k = 1; k <= n; ++k) {
        if (std::binary_search(pairs.begin(), pairs.end(), k)) {
            s += "(oo)";
            ++k;
        } else {
            s += "o";
        }
    }
    return s.empty() ? "-" : s;
}

int total_pairs(const DotRowVector& v) {
    int p = 0;
    for (const DotRow& r : v) p += r.p();
    return p;
}

std::vector<DotRow> enumerate_dot_rows(int n) {
    if (n < 0) throw std::invalid_argument("dot rows: negative length");
    std::vector<DotRow> out;
    std::vector<int> cur;
    std::function<void(int)> grow = [&](int from) {
        out.push_back(DotRow{n, cur});
        for (int k = from; k + 1 <= n; ++k) {
            cur.push_back(k);
            grow(k + 2);
            cur.pop_back();
        }
    };
    grow(1);
    std::sort(out.begin(), out.end(), [](const DotRow& a, const DotRow& b) { return a.pairs < b.pairs; });
    return out;
}

std::vector<DotRowVector> enumerate_dot_row_vectors(const std::vector<int>& dots) {
    std::vector<DotRowVector> out{DotRowVector{}};
    for (int m : dots) {
        std::vector<DotRowVector> next;
        for (const DotRowVector& v : out)
            for (const DotRow& r : enumerate_dot_rows(m)) {
                DotRowVector w = v;
                w.push_back(r);
                next.push_back(std::move(w));
            }
        out.swap(next);
    }
    return out;
}

std::vector<DotRowEdge> dot_row_edges(const DotRowVector& v) {
    std::vector<DotRowEdge> out;
    for (int j = 0; j < static_cast<int>(v.size()); ++j) {
        std::vector<int> singles = v[j].singles();
        for (std::size_t s = 0; s + 1 < singles.size(); ++s) {
            if (singles[s + 1] != singles[s] + 1) continue;
            DotRowEdge e;
            e.target = v;
            auto& pairs = e.target[j].pairs;
            pairs.insert(std::upper_bound(pairs.begin(), pairs.end(), singles[s]), singles[s]);
            e.component = j;
            e.l = static_cast<int>(s) + 1;
            e.position = singles[s];
            out.push_back(std::move(e));
        }
    }
    return out;
}

const char* mode_name(ComplexMode m) { return m == ComplexMode::Model ? "model" : "chain"; }

// Complex -------------------------------------------------------------------

int ColouredComplex::max_pairs() const {
    int p = 0;
    for (const auto& v : vertices) p = std::max(p, v.p());
    return p;
}

std::vector<int> ColouredComplex::degrees_at(int i) const {
    std::vector<int> out;
    for (const auto& v : vertices)
        if (v.p() == i) out.insert(out.end(), v.degrees.begin(), v.degrees.end());
    return out;
}

namespace {

// Position of every vertex's block within its degree, and the positions
// kept by a filter on internal degree (-1 when dropped).
struct Layout {
    std::vector<std::size_t> offset;
    std::vector<std::size_t> dim;  // per pair count
};

Layout layout_of(const ColouredComplex& c) {
    Layout L;
    L.offset.resize(c.vertices.size());
    L.dim.assign(c.max_pairs() + 1, 0);
    for (std::size_t k = 0; k < c.vertices.size(); ++k) {
        int p = c.vertices[k].p();
        L.offset[k] = L.dim[p];
        L.dim[p] += c.vertices[k].dim();
    }
    return L;
}

std::vector<long> filter_positions(const std::vector<int>& degrees, std::optional<int> j, std::size_t& kept) {
    std::vector<long> pos(degrees.size(), -1);
    kept = 0;
    for (std::size_t k = 0; k < degrees.size(); ++k)
        if (!j || degrees[k] == *j) pos[k] = static_cast<long>(kept++);
    return pos;
}

F2Matrix assemble(const ColouredComplex& c, int i, std::optional<int> j) {
    int target = c.reversed ? i - 1 : i + 1;
    std::size_t rows = 0, cols = 0;
    std::vector<long> rpos, cpos;
    if (i >= 0 && i <= c.max_pairs()) cpos = filter_positions(c.degrees_at(i), j, cols);
    if (target >= 0 && target <= c.max_pairs()) rpos = filter_positions(c.degrees_at(target), j, rows);
    F2Matrix out(rows, cols);
    if (!rows || !cols) return out;
    Layout L = layout_of(c);
    for (const ColouredEdge& e : c.edges) {
        std::size_t src = c.reversed ? e.to : e.from, dst = c.reversed ? e.from : e.to;
        if (c.vertices[src].p() != i) continue;
        for (std::size_t r = 0; r < e.map.rows(); ++r)
            for (std::size_t col : e.map.row(r).ones()) {
                long rr = rpos[L.offset[dst] + r], cc = cpos[L.offset[src] + col];
                if (rr >= 0 && cc >= 0) out.flip(rr, cc);
            }
    }
    return out;
}

}  // namespace

F2Matrix ColouredComplex::differential(int i) const { return assemble(*this, i, std::nullopt); }
F2Matrix ColouredComplex::differential(int i, int j) const { return assemble(*this, i, j); }

void ColouredComplex::check() const {
    for (const ColouredEdge& e : edges) {
        std::size_t src = reversed ? e.to : e.from, dst = reversed ? e.from : e.to;
        const auto& ds = vertices[src].degrees;
        const auto& dt = vertices[dst].degrees;
        if (e.map.rows() != dt.size() || e.map.cols() != ds.size())
            throw LinalgError("coloured: edge matrix has the wrong shape");
        for (std::size_t r = 0; r < e.map.rows(); ++r)
            for (std::size_t col : e.map.row(r).ones())
                if (dt[r] != ds[col])
                    throw LinalgError("coloured: edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                                      " changes the internal degree");
    }
    for (int i = 0; i <= max_pairs(); ++i) {
        int next = reversed ? i - 1 : i + 1;
        if (!(differential(next) * differential(i)).is_zero())
            throw LinalgError("coloured: d o d != 0 at degree " + std::to_string(i));
    }
}

ColouredComplex build_model_complex(const LinkingData& lk, const std::vector<int>& colours,
                                    const std::optional<std::vector<int>>& dots) {
    check_colours(colours, lk.size());
    ColouredComplex c;
    c.mode = ComplexMode::Model;
    c.colours = colours;
    c.dots = resolve_dots(colours, dots);
    c.lk = lk;
    c.framing = framing_of(lk);
    int strands = std::accumulate(colours.begin(), colours.end(), 0);
    if (strands > kModelStrandLimit)
        throw SizeGuardError("model: " + std::to_string(strands) + " strands exceed the limit of " +
                             std::to_string(kModelStrandLimit));
    build_graph(c);
    for (ColouredVertex& v : c.vertices) {
        Strands s = strands_of(v.cable);
        v.degrees.resize(std::size_t{1} << s.size());
        for (std::uint64_t m = 0; m < v.degrees.size(); ++m) v.degrees[m] = mask_degree(lk, s, m);
    }
    for (ColouredEdge& e : c.edges) {
        const ColouredVertex& src = c.vertices[e.from];
        Strands s = strands_of(src.cable);
        int b = s.offset[e.component] + e.l - 1;
        e.map = F2Matrix(c.vertices[e.to].dim(), src.dim());
        for (std::uint64_t m = 0; m < src.dim(); ++m)
            if (((m >> b) & 1) == ((m >> (b + 1)) & 1)) e.map.set(drop_two(m, b), m);
    }
    return c;
}

ColouredComplex build_chain_complex(const Diagram& d, const std::vector<int>& colours,
                                    const std::optional<std::vector<int>>& dots, bool reversed, int guard) {
    check_colours(colours, d.component_count());
    if (guard < 0) guard = cube_guard();
    ColouredComplex c;
    c.mode = ComplexMode::Chain;
    c.reversed = reversed;
    c.colours = colours;
    c.dots = resolve_dots(colours, dots);
    c.lk = linking_data(d);
    c.framing = framing_of(c.lk);
    build_graph(c);

    // one homology per distinct cable
    std::map<std::vector<int>, std::size_t> cable_index;
    std::vector<std::vector<int>> cables;
    for (const ColouredVertex& v : c.vertices)
        if (cable_index.emplace(v.cable, cables.size()).second) cables.push_back(v.cable);
    for (const auto& n : cables) {
        int x = cable(d, n).first.crossing_count();
        if (x > guard)
            throw SizeGuardError("chain: cable has " + std::to_string(x) + " crossings, guard is " +
                                 std::to_string(guard));
    }
    std::vector<std::unique_ptr<BNHomology>> bn(cables.size());
    parallel_for(cables.size(), [&](std::size_t k) {
        bn[k] = std::make_unique<BNHomology>(cable(d, cables[k]).first);
        const auto& cl = bn[k]->classes();
        for (std::size_t m = 0; m < cl.size(); ++m)
            if (cl[m].theta != orientation_from_mask(static_cast<int>(cl[m].theta.size()), m))
                throw LinalgError("chain: canonical classes out of mask order");
    });
    for (ColouredVertex& v : c.vertices)
        for (const auto& cl : bn[cable_index.at(v.cable)]->classes()) v.degrees.push_back(cl.degree);

    // edges with the same cable and contraction share a matrix
    using Key = std::tuple<std::size_t, int, int>;
    std::map<Key, std::size_t> key_index;
    std::vector<Key> keys;
    for (const ColouredEdge& e : c.edges) {
        Key k{cable_index.at(c.vertices[e.from].cable), e.component, e.l};
        if (key_index.emplace(k, keys.size()).second) keys.push_back(k);
    }
    std::vector<F2Matrix> maps(keys.size());
    parallel_for(keys.size(), [&](std::size_t k) {
        auto [ci, comp, l] = keys[k];
        std::vector<int> small = cables[ci];
        small[comp] -= 2;
        const BNHomology& large_bn = *bn[ci];
        const BNHomology& small_bn = *bn[cable_index.at(small)];
        AnnulusMap am(d, cables[ci], comp, l, reversed);
        maps[k] = reversed ? induced_on_canonical(am, small_bn, large_bn)
                           : induced_on_canonical(am, large_bn, small_bn);
    });
    for (ColouredEdge& e : c.edges)
        e.map = maps[key_index.at(Key{cable_index.at(c.vertices[e.from].cable), e.component, e.l})];
    return c;
}

// Homology ------------------------------------------------------------------

std::size_t HomologyTable::total() const {
    std::size_t t = 0;
    for (const auto& [k, v] : dims) t += v;
    return t;
}

std::size_t HomologyTable::total_at(int i) const {
    std::size_t t = 0;
    for (const auto& [k, v] : dims)
        if (k.first == i) t += v;
    return t;
}

std::string HomologyTable::json() const {
    nlohmann::json j;
    j["mode"] = mode_name(mode);
    j["colours"] = colours;
    j["framing"] = framing;
    j["table"] = nlohmann::json::array();
    for (const auto& [k, v] : dims) j["table"].push_back({{"i", k.first}, {"j", k.second}, {"dim", v}});
    j["generators"] = nlohmann::json::array();
    for (const Generator& g : generators) j["generators"].push_back({{"E", g.E}, {"degree", g.degree}});
    return j.dump();
}

std::string HomologyTable::table() const {
    std::ostringstream os;
    os << "   i     j  dim\n";
    for (const auto& [k, v] : dims) {
        char line[64];
        std::snprintf(line, sizeof line, "%4d  %4d  %3zu\n", k.first, k.second, v);
        os << line;
    }
    os << "total " << total() << "\n";
    return os.str();
}

HomologyTable coloured_homology(const ColouredComplex& c) {
    HomologyTable t;
    t.mode = c.mode;
    t.colours = c.colours;
    t.framing = c.framing;
    for (int i = 0; i <= c.max_pairs(); ++i) {
        std::vector<int> degs = c.degrees_at(i);
        std::map<int, std::size_t> count;
        for (int j : degs) ++count[j];
        for (auto [j, n] : count) {
            int prev = c.reversed ? i + 1 : i - 1;
            std::size_t h = n - rank(c.differential(i, j)) - rank(c.differential(prev, j));
            if (h) t.dims[{i, j}] = h;
        }
    }
    if (!c.reversed && c.dots == c.colours) t.generators = admissible_collections(c.lk, c.colours);
    return t;
}

HomologyTable interpolating_homology(const LinkingData& lk, const std::vector<int>& colours,
                                     const std::vector<int>& dots) {
    return coloured_homology(build_model_complex(lk, colours, dots));
}

std::map<std::pair<int, int>, std::size_t> reversed_homology(const ColouredComplex& reversed) {
    if (!reversed.reversed) throw std::invalid_argument("reversed_homology: complex is not reversed");
    return coloured_homology(reversed).dims;
}

int strand_degree(const LinkingData& lk, const std::vector<int>& colours,
                  const std::vector<std::vector<int>>& E) {
    return mask_degree(lk, strands_of(colours), orientation_mask(colours, E));
}

std::uint64_t orientation_mask(const std::vector<int>& colours, const std::vector<std::vector<int>>& E) {
    if (E.size() != colours.size()) throw std::invalid_argument("E: expected one set per component");
    Strands s = strands_of(colours);
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < E.size(); ++i)
        for (int k : E[i]) {
            if (k < 1 || k > colours[i]) throw std::invalid_argument("E: strand out of range");
            mask |= std::uint64_t{1} << (s.offset[i] + k - 1);
        }
    return mask;
}

// Symmetric part --------------------------------------------------------------

std::vector<OrbitSum> symmetric_basis(const LinkingData& lk, const std::vector<int>& colours) {
    check_colours(colours, lk.size());
    Strands s = strands_of(colours);
    if (s.size() > kModelStrandLimit) throw SizeGuardError("symmetric basis: too many strands");
    const std::uint64_t dim = std::uint64_t{1} << s.size();
    // agreeing counts, mixed radix
    std::vector<int> radix;
    for (int n : colours) radix.push_back(n + 1);
    std::size_t orbits = 1;
    for (int r : radix) orbits *= r;
    std::vector<OrbitSum> out(orbits);
    for (std::size_t o = 0; o < orbits; ++o) {
        out[o].vector = BitVector(dim);
        out[o].degree = 0;
        std::size_t rest = o;
        out[o].agreeing.assign(colours.size(), 0);
        for (std::size_t i = colours.size(); i-- > 0;) {
            out[o].agreeing[i] = static_cast<int>(rest % radix[i]);
            rest /= radix[i];
        }
    }
    std::vector<bool> seen(orbits, false);
    for (std::uint64_t m = 0; m < dim; ++m) {
        std::size_t o = 0;
        for (std::size_t i = 0; i < colours.size(); ++i) {
            int agree = 0;
            for (int k = 1; k <= colours[i]; ++k) {
                bool rev = (m >> (s.offset[i] + k - 1)) & 1;
                agree += (k % 2 == 1) != rev;  // odd strands follow the component
            }
            o = o * radix[i] + agree;
        }
        int deg = mask_degree(lk, s, m);
        if (seen[o] && out[o].degree != deg) throw LinalgError("symmetric basis: degrees differ within an orbit");
        seen[o] = true;
        out[o].degree = deg;
        out[o].vector.set(m);
    }
    return out;
}

BitVector conjugate(const BitVector& v, const std::vector<int>& colours) {
    std::uint64_t all = (std::uint64_t{1} << std::accumulate(colours.begin(), colours.end(), 0)) - 1;
    BitVector out(v.size());
    for (std::size_t m : v.ones()) out.set(m ^ all);
    return out;
}

int lambda(const std::vector<int>& Ei, const std::vector<int>& El, int nl) {
    int sum = 0;
    for (int j : Ei)
        for (int m = 1; m <= nl; ++m)
            if (std::find(El.begin(), El.end(), m) == El.end()) sum += (j + m) % 2 ? -1 : 1;
    return sum;
}

std::vector<Generator> admissible_collections(const LinkingData& lk, const std::vector<int>& colours) {
    check_colours(colours, lk.size());
    std::vector<std::vector<std::vector<int>>> options;
    for (int n : colours) {
        std::vector<std::vector<int>> o{{}};
        for (int p = 1; p <= n / 2; ++p) {
            std::vector<int> e;
            for (int k = 1; k <= p; ++k) e.push_back(2 * k);
            o.push_back(e);
        }
        for (int p = 1; p <= (n + 1) / 2; ++p) {
            std::vector<int> e;
            for (int k = 1; k <= p; ++k) e.push_back(2 * k - 1);
            o.push_back(e);
        }
        options.push_back(std::move(o));
    }
    std::vector<Generator> out{Generator{}};
    for (const auto& o : options) {
        std::vector<Generator> next;
        for (const Generator& g : out)
            for (const auto& e : o) {
                Generator h = g;
                h.E.push_back(e);
                next.push_back(std::move(h));
            }
        out.swap(next);
    }
    const int k = static_cast<int>(colours.size());
    for (Generator& g : out) {
        int deg = 0;
        for (int i = 0; i < k; ++i)
            for (int l = 0; l < k; ++l) deg += lambda(g.E[i], g.E[l], colours[l]) * lk(i, l);
        g.degree = 2 * deg;
    }
    return out;
}

}  // namespace cbn
