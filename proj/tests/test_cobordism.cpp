#include <algorithm>
#include <bit>
#include <random>

#include "cbn/census.hpp"
#include "cbn/cobordism.hpp"
#include "doctest.h"

using namespace cbn;

namespace {

using K = MovieStep::Kind;

Chain random_chain(const Diagram& d, ResolutionCache& rc, std::mt19937& rng, int terms) {
    std::vector<Term> out;
    const int X = d.crossing_count();
    for (int t = 0; t < terms; ++t) {
        State s = X ? rng() & ((State{1} << X) - 1) : 0;
        int c = rc.get(s).circle_count;
        out.push_back({s, rng() & ((Labels{1} << c) - 1)});
    }
    return Chain(std::move(out));
}

// Every step of the movie commutes with the differentials.
void check_chain_maps(const MovieMap& mm, std::mt19937& rng, int trials) {
    const Movie& m = mm.movie();
    for (std::size_t k = 0; k < m.steps.size(); ++k) {
        ResolutionCache a(m.frames[k]), b(m.frames[k + 1]);
        for (int t = 0; t < trials; ++t) {
            Chain v = random_chain(m.frames[k], a, rng, 1 + t % 5);
            CHECK_MESSAGE(mm.apply_step(k, differential(a, v)) == differential(b, mm.apply_step(k, v)),
                          "step " << k);
        }
    }
}

std::vector<K> kinds(const Movie& m) {
    std::vector<K> out;
    for (const auto& s : m.steps) out.push_back(s.kind);
    return out;
}

Movie one_step(const Diagram& d, MovieStep st, const Diagram& next) {
    Movie m;
    m.frames = {d, next};
    m.steps = {std::move(st)};
    return m;
}

// Expected image of each canonical class: contracted strands with equal
// reversal bits go to the remaining orientation, others to zero.
F2Matrix lemma_prediction(const AnnulusMap& m, int component, int l) {
    const CableMap& big = m.large_map();
    const CableMap& small = m.small_map();
    const int K = static_cast<int>(big.component_source.size());
    const int k = static_cast<int>(small.component_source.size());
    F2Matrix out(std::size_t{1} << k, std::size_t{1} << K);
    int ca = big.strand_component[component][l - 1], cb = big.strand_component[component][l];
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << K); ++mask) {
        // reference orientations of l and l+1 are opposite
        if (((mask >> ca) & 1) != ((mask >> cb) & 1)) continue;
        std::uint64_t target = 0;
        for (int c = 0; c < K; ++c) {
            auto [comp, strand] = big.component_source[c];
            if (c == ca || c == cb) continue;
            if (comp == component && strand > l + 1) strand -= 2;
            int sc = small.strand_component[comp][strand - 1];
            if ((mask >> c) & 1) target |= std::uint64_t{1} << sc;
        }
        out.set(target, mask);
    }
    return out;
}

void check_lemma(const Diagram& d, std::vector<int> colours, int component, int l) {
    AnnulusMap m(d, colours, component, l);
    BNHomology src(m.source()), dst(m.target());
    F2Matrix got = induced_on_canonical(m, src, dst), want = lemma_prediction(m, component, l);
    CHECK_MESSAGE(got == want, d.crossing_count() << " crossings, strand " << l << "\n"
                                                  << got.dump() << "\n" << want.dump());
}

// Compares the R2 map with Gaussian elimination done one entry at a time:
// turn-back states against the bigon circle labelled x, then the bigon
// circle labelled 1 against the other turn-back.
void check_against_elimination(const Diagram& d, const MovieStep& st, const Diagram& small) {
    MovieMap fwd(one_step(d, st, small));
    ResolutionCache rc(d);
    CubeIndex idx = index_cube(d, rc);
    ChainComplex cur = cube_complex(d);
    const int X = d.crossing_count();
    // basis terms per cube layer, in complex order
    std::vector<std::vector<Term>> basis(X + 1);
    for (int k = 0; k <= X; ++k) basis[k].resize(idx.dims[k]);
    for (State s = 0; s < (State{1} << X); ++s)
        for (Labels l = 0; l < (Labels{1} << idx.circles[s]); ++l) {
            int k = std::popcount(s);
            basis[k][chain_vector(d, idx, Chain({{s, l}}), k + idx.lo).ones()[0]] = {s, l};
        }
    ComplexMap total;
    total.lo = cur.lo;
    for (int k = 0; k <= X; ++k) total.f.push_back(F2Matrix::identity(idx.dims[k]));

    const State u = State{1} << st.u, w = State{1} << st.w;
    auto bigon_x = [&](const Term& t) {
        return (t.labels >> rc.get(t.state).arc_circle[st.bigon[0]]) & 1;
    };
    auto eliminate = [&](const Term& b, const Term& c) {
        int k = std::popcount(b.state);
        auto col = std::find(basis[k].begin(), basis[k].end(), b) - basis[k].begin();
        auto row = std::find(basis[k + 1].begin(), basis[k + 1].end(), c) - basis[k + 1].begin();
        Elimination e = eliminate_entry(cur, k + cur.lo, row, col);
        for (int t = 0; t <= X; ++t) total.f[t] = e.forward.f[t] * total.f[t];
        cur = e.reduced;
        basis[k].erase(basis[k].begin() + col);
        basis[k + 1].erase(basis[k + 1].begin() + row);
    };
    // turn-back states against bigon circle x, then bigon circle 1 against the other turn-back
    for (int pass = 0; pass < 2; ++pass)
        for (State s = 0; s < (State{1} << X); ++s) {
            bool first = pass == 0 ? !(s & u) && !(s & w) : (s & u) && !(s & w);
            if (!first) continue;
            for (Labels l = 0; l < (Labels{1} << idx.circles[s]); ++l) {
                Term b{s, l};
                if (pass == 1 && bigon_x(b)) continue;
                Chain img = edge_differential(rc, Chain({b}), pass == 0 ? st.u : st.w);
                std::vector<Term> partner;
                for (const Term& t : img.terms())
                    if (pass == 1 || bigon_x(t)) partner.push_back(t);
                REQUIRE(partner.size() == 1);
                eliminate(b, partner[0]);
            }
        }
    // what is left are the through-strand states
    for (int k = 0; k <= X; ++k)
        for (const Term& t : basis[k]) CHECK(((t.state & w) && !(t.state & u)));
    for (int k = 0; k <= X; ++k)
        for (std::size_t j = 0; j < idx.dims[k]; ++j) {
            Term e{};
            for (State s = 0; s < (State{1} << X); ++s)
                for (Labels l = 0; l < (Labels{1} << idx.circles[s]); ++l)
                    if (std::popcount(s) == k &&
                        chain_vector(d, idx, Chain({{s, l}}), k + idx.lo).ones()[0] == j)
                        e = {s, l};
            Chain generic;
            for (std::size_t r : total.f[k].apply(BitVector::unit(idx.dims[k], j)).ones())
                generic += fwd.apply(Chain({basis[k][r]}));
            CHECK(generic == fwd.apply(Chain({e})));
        }
}

}  // namespace

TEST_CASE("saddle merges two loops") {
    Diagram u2 = cable(census_diagram("unknot"), std::vector<int>{2}).first;
    Diagram one;
    MovieStep st = saddle_step(u2, u2.base_arcs[0], u2.base_arcs[1], one);
    CHECK(one.component_count() == 1);
    MovieMap mm(one_step(u2, st, one));
    ResolutionCache rc(u2);
    int c0 = rc.get(0).arc_circle[u2.base_arcs[0]], c1 = 1 - c0;
    auto term = [](Labels l) { return Chain({{0, l}}); };
    CHECK(mm.apply(term(0)) == term(0));                          // 1 (x) 1 -> 1
    CHECK(mm.apply(term(Labels{1} << c0)) == term(1));            // x (x) 1 -> x
    CHECK(mm.apply(term(Labels{1} << c1)) == term(1));
    CHECK(mm.apply(term(3)) == term(1));                          // x (x) x -> x

    MovieMap split(reverse_movie(mm.movie()));
    CHECK(split.apply(term(0)) == Chain({{0, 1}, {0, 2}, {0, 0}}));
    CHECK(split.apply(term(1)) == term(3));
}

TEST_CASE("death and birth") {
    Diagram u = census_diagram("unknot");
    Diagram empty;
    MovieStep st = death_step(u, 0, empty);
    CHECK(empty.component_count() == 0);
    MovieMap death(one_step(u, st, empty));
    CHECK(death.apply(Chain({{0, 1}})) == Chain({{0, 0}}));
    CHECK(death.apply(Chain({{0, 0}})).empty());
    CHECK(death.apply(Chain({{0, 0}, {0, 1}})) == Chain({{0, 0}}));

    Diagram born;
    MovieStep b = birth_step(empty, born);
    MovieMap birth(one_step(empty, b, born));
    CHECK(birth.apply(Chain({{0, 0}})) == Chain({{0, 0}}));
    CHECK(death.apply(birth.apply(Chain({{0, 0}}))).empty());

    CHECK_THROWS_AS(death_step(census_diagram("kink+1"), 0, empty), DiagramError);
}

TEST_CASE("saddle then death evaluates the counit of the product") {
    Diagram u2 = cable(census_diagram("unknot"), std::vector<int>{2}).first;
    Diagram one, empty;
    Movie m;
    m.frames.push_back(u2);
    m.steps.push_back(saddle_step(u2, u2.base_arcs[0], u2.base_arcs[1], one));
    m.frames.push_back(one);
    m.steps.push_back(death_step(one, 0, empty));
    m.frames.push_back(empty);
    MovieMap mm(std::move(m));
    ResolutionCache rc(u2);
    int c0 = rc.get(0).arc_circle[u2.base_arcs[0]];
    Labels x0 = Labels{1} << c0, x1 = Labels{1} << (1 - c0);
    // (1 + x) (x) x multiplies to x + x = 0
    CHECK(mm.apply(Chain({{0, x1}, {0, x0 | x1}})).empty());
    CHECK(mm.apply(Chain({{0, x0 | x1}})) == Chain({{0, 0}}));
    // (1 + x)(1 + x) = 1 + x, counit 1
    CHECK(mm.apply(Chain({{0, 0}, {0, x0}, {0, x1}, {0, x0 | x1}})) == Chain({{0, 0}}));
}

TEST_CASE("saddle errors") {
    Diagram k = census_diagram("kink+1");
    Diagram out;
    CHECK_THROWS_AS(saddle_step(k, 0, 1, out), DiagramError);
    CHECK_THROWS_AS(saddle_step(k, 0, 7, out), DiagramError);
}

TEST_CASE("r2 removal on census diagrams") {
    for (std::string name : {"unknot-r2", "kink+1-r2"}) {
        Diagram d = census_diagram(name);
        // the bigon pair is the first one found at any arc
        std::array<int, 2> xy{-1, -1};
        for (int a = 0; a < d.arc_count() && xy[0] < 0; ++a) {
            auto c = bigon_at(d, a);
            if (c[0] < 0) continue;
            Diagram tmp;
            try {
                r2_removal_step(d, c[0], c[1], tmp);
                xy = c;
            } catch (const DiagramError&) {
            }
        }
        REQUIRE(xy[0] >= 0);
        Diagram small;
        MovieStep st = r2_removal_step(d, xy[0], xy[1], small);
        CHECK(small.crossing_count() == d.crossing_count() - 2);
        CHECK(cube_homology_dims(small, CubeBasis::Standard) == cube_homology_dims(d, CubeBasis::Standard));

        Movie m = one_step(d, st, small);
        MovieMap fwd(m);
        MovieMap back(reverse_movie(m));
        std::mt19937 rng(1);
        check_chain_maps(fwd, rng, 20);
        check_chain_maps(back, rng, 20);

        // canonical classes survive the round trip
        BNHomology hs(d);
        for (std::size_t k = 0; k < hs.dimension(); ++k) {
            Orientation th = hs.classes()[k].theta;
            Chain z = canonical_cycle(d, th);
            Chain fz = fwd.apply(z);
            ResolutionCache rc(small);
            CHECK(differential(rc, fz).empty());
            Chain back_z = back.apply(fz);
            CHECK(hs.project(back_z) == BitVector::unit(hs.dimension(), k));
        }
        // dense maps are chain maps inducing inverse isomorphisms
        ChainComplex cs = cube_complex(d), ct = cube_complex(small);
        ComplexMap F = materialize(d, small, [&](const Chain& v) { return fwd.apply(v); });
        ComplexMap G = materialize(small, d, [&](const Chain& v) { return back.apply(v); });
        CHECK(is_chain_map(F, cs, ct));
        CHECK(is_chain_map(G, ct, cs));
        for (int deg = cs.lo; deg <= cs.hi(); ++deg) {
            if (deg < ct.lo || deg > ct.hi()) continue;
            HomologyData hs_ = homology_at(cs.diff(deg), cs.diff(deg - 1));
            HomologyData ht = homology_at(ct.diff(deg), ct.diff(deg - 1));
            F2Matrix f = induced_map(F.f[deg - F.lo], hs_, ht), g = induced_map(G.f[deg - G.lo], ht, hs_);
            CHECK(f * g == F2Matrix::identity(ht.dimension()));
            CHECK(g * f == F2Matrix::identity(hs_.dimension()));
        }
    }
}

TEST_CASE("r2 maps agree with entry-by-entry elimination") {
    for (std::string name : {"unknot-r2", "kink+1-r2"}) {
        Diagram d = census_diagram(name);
        std::array<int, 2> xy{-1, -1};
        Diagram small;
        MovieStep st;
        for (int a = 0; a < d.arc_count() && xy[0] < 0; ++a) {
            auto c = bigon_at(d, a);
            if (c[0] < 0) continue;
            try {
                st = r2_removal_step(d, c[0], c[1], small);
                xy = c;
            } catch (const DiagramError&) {
            }
        }
        REQUIRE(xy[0] >= 0);
        check_against_elimination(d, st, small);
    }
    for (std::string name : {"hopf+", "kink+1"}) {
        Diagram d = census_diagram(name);
        std::vector<int> n(d.component_count(), 1);
        n[0] = 2;
        auto [c, cm] = cable(d, n);
        Movie m = annulus_movie(c, cm, 0, 1);
        for (std::size_t k = 0; k < m.steps.size(); ++k)
            if (m.steps[k].kind == K::R2Removal) check_against_elimination(m.frames[k], m.steps[k], m.frames[k + 1]);
    }
}

TEST_CASE("annulus movie shapes") {
    auto movie_of = [](const std::string& name, int n) {
        Diagram d = census_diagram(name);
        auto [c, cm] = cable(d, std::vector<int>{n});
        return annulus_movie(c, cm, 0, 1);
    };
    Movie u = movie_of("unknot", 2);
    CHECK(kinds(u) == std::vector<K>{K::Saddle, K::Death});
    CHECK(u.frames.back().component_count() == 0);

    Movie k = movie_of("kink+1", 2);
    CHECK(kinds(k) == std::vector<K>{K::Saddle, K::R2Removal, K::R2Removal, K::Death});
    CHECK(k.frames.front().crossing_count() == 4);
    CHECK(k.frames.back().crossing_count() == 0);

    Movie t = movie_of("trefoil+", 2);
    CHECK(t.frames.front().crossing_count() == 12);
    int r2 = 0;
    for (const auto& s : t.steps) r2 += s.kind == K::R2Removal;
    CHECK(r2 == 6);
    CHECK(t.frames.back().crossing_count() == 0);
    CHECK(t.describe().find("r2 removal -> 10 crossings") != std::string::npos);

    Movie rev = reverse_movie(u);
    CHECK(kinds(rev) == std::vector<K>{K::Birth, K::Saddle});

    auto [c, cm] = cable(census_diagram("unknot"), std::vector<int>{3});
    CHECK_THROWS_AS(annulus_movie(c, cm, 0, 3), DiagramError);
}

TEST_CASE("movie steps are chain maps") {
    std::mt19937 rng(4);
    for (std::string name : {"kink+1", "kink-1", "trefoil+", "hopf+"}) {
        Diagram d = census_diagram(name);
        std::vector<int> n(d.component_count(), 1);
        n[0] = 2;
        auto [c, cm] = cable(d, n);
        MovieMap mm(annulus_movie(c, cm, 0, 1));
        check_chain_maps(mm, rng, 12);
        MovieMap back(reverse_movie(mm.movie()));
        check_chain_maps(back, rng, 12);
    }
}

TEST_CASE("annulus maps follow the orientation rule") {
    check_lemma(census_diagram("unknot"), {2}, 0, 1);
    check_lemma(census_diagram("unknot"), {3}, 0, 1);
    check_lemma(census_diagram("unknot"), {3}, 0, 2);
    check_lemma(census_diagram("kink+1"), {2}, 0, 1);
    check_lemma(census_diagram("kink-1"), {3}, 0, 2);
    check_lemma(census_diagram("kink+2"), {2}, 0, 1);
    check_lemma(census_diagram("hopf+"), {2, 1}, 0, 1);
    check_lemma(census_diagram("hopf-"), {1, 2}, 1, 1);
    check_lemma(census_diagram("hopf+"), {2, 2}, 0, 1);
    check_lemma(census_diagram("hopf-"), {2, 3}, 1, 2);
    check_lemma(census_diagram("trefoil+"), {2}, 0, 1);
    check_lemma(census_diagram("trefoil-"), {3}, 0, 2);
    check_lemma(census_diagram("figure8"), {2}, 0, 1);
    check_lemma(census_diagram("kink+1"), {4}, 0, 2);
}

TEST_CASE("switching the contracted strands") {
    AnnulusMap m(census_diagram("kink+1"), std::vector<int>{3}, 0, 1);
    BNHomology src(m.source()), dst(m.target());
    F2Matrix f = induced_on_canonical(m, src, dst);
    int ca = m.large_map().strand_component[0][0], cb = m.large_map().strand_component[0][1];
    for (std::uint64_t mask = 0; mask < 8; ++mask) {
        std::uint64_t swapped = mask & ~((1ULL << ca) | (1ULL << cb));
        if ((mask >> ca) & 1) swapped |= 1ULL << cb;
        if ((mask >> cb) & 1) swapped |= 1ULL << ca;
        CHECK(f.column(mask) == f.column(swapped));
    }
}

TEST_CASE("sliding either turn-back gives the same map on homology") {
    for (std::string name : {"kink+1", "trefoil-"}) {
        Diagram d = census_diagram(name);
        AnnulusMap a(d, std::vector<int>{2}, 0, 1), b(d, std::vector<int>{2}, 0, 1, false, true);
        CHECK(a.movie().steps.size() == b.movie().steps.size());
        BNHomology src(a.source()), dst(a.target());
        CHECK(induced_on_canonical(a, src, dst) == induced_on_canonical(b, src, dst));
    }
}

TEST_CASE("disjoint contractions commute") {
    Diagram k = census_diagram("kink-1");
    AnnulusMap a(k, std::vector<int>{4}, 0, 1), b(k, std::vector<int>{4}, 0, 3);
    AnnulusMap last(k, std::vector<int>{2}, 0, 1);
    BNHomology h4(a.source()), h2(a.target()), h0(last.target());
    F2Matrix via_a = induced_on_canonical(last, h2, h0) * induced_on_canonical(a, h4, h2);
    F2Matrix via_b = induced_on_canonical(last, h2, h0) * induced_on_canonical(b, h4, h2);
    CHECK(via_a == via_b);
    CHECK(!via_a.is_zero());
}

TEST_CASE("reversed annulus maps are chain maps") {
    std::mt19937 rng(8);
    AnnulusMap r(census_diagram("kink+1"), std::vector<int>{2}, 0, 1, true);
    CHECK(r.source().crossing_count() == 0);
    CHECK(r.target().crossing_count() == 4);
    ResolutionCache a(r.source()), b(r.target());
    for (int t = 0; t < 10; ++t) {
        Chain v = random_chain(r.source(), a, rng, 2);
        CHECK(r.apply(differential(a, v)) == differential(b, r.apply(v)));
    }
    // the image of a cycle is a cycle
    BNHomology src(r.source()), dst(r.target());
    F2Matrix m = induced_on_canonical(r, src, dst);
    CHECK(m.rows() == 4);
}

namespace {

// Matrix of a single movie step on canonical classes of its two frames.
F2Matrix step_on_canonical(const Movie& mv, std::size_t k) {
    Movie one;
    one.frames = {mv.frames[k], mv.frames[k + 1]};
    one.steps = {mv.steps[k]};
    MovieMap f(std::move(one));
    BNHomology a(mv.frames[k]), b(mv.frames[k + 1]);
    F2Matrix m(b.dimension(), a.dimension());
    for (std::size_t i = 0; i < a.dimension(); ++i)
        for (std::size_t r : b.project(f.apply(canonical_cycle(mv.frames[k], a.classes()[i].theta))).ones())
            m.set(r, i);
    return m;
}

}  // namespace

TEST_CASE("r2 removal keeps the unbounded face") {
    // two overlapping circles, the first above at both crossings
    Diagram d = parse_diagram(
        "components 2\ncomponent 1 arcs 1 2\ncomponent 2 arcs 3 4\n"
        "X 1 3 2 4 over a\nX 4 2 3 1 over b\nouter +1\n");
    CHECK(cube_homology_dims(d, CubeBasis::Standard) == std::map<int, std::uint64_t>{{0, 4}});
    Diagram out;
    MovieStep st = r2_removal_step(d, 0, 1, out);
    REQUIRE(out.has_embedding());
    CHECK(out.crossing_count() == 0);
    Movie m;
    m.frames = {d, out};
    m.steps = {st};
    CHECK(step_on_canonical(m, 0) == F2Matrix::identity(4));
}

TEST_CASE("movie steps send canonical classes to canonical classes") {
    struct Case {
        const char* name;
        std::vector<int> colours;
        int component, l;
    };
    for (const Case& c : {Case{"hopf+", {2, 1}, 0, 1}, Case{"hopf-", {2, 2}, 1, 1}, Case{"kink+1", {3}, 0, 2},
                          Case{"trefoil+", {2}, 0, 1}, Case{"figure8", {2}, 0, 1}}) {
        Diagram base = census_diagram(c.name);
        auto [cabled, cm] = cable(base, c.colours);
        Movie mv = annulus_movie(cabled, cm, c.component, c.l);
        for (std::size_t k = 0; k < mv.steps.size(); ++k) {
            REQUIRE((mv.frames[k + 1].has_embedding() || mv.frames[k + 1].arc_count() == 0));
            F2Matrix f = step_on_canonical(mv, k);
            if (mv.steps[k].kind == K::R2Removal) {
                CHECK(f == F2Matrix::identity(f.rows()));
                continue;
            }
            for (std::size_t j = 0; j < f.cols(); ++j) CHECK(f.column(j).count() <= 1);
        }
    }
}
