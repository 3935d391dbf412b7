#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include "cbn/barnatan.hpp"
#include "cbn/census.hpp"
#include "cbn/coloured.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cbn;

namespace {

using Table = std::map<std::pair<int, int>, std::size_t>;

LinkingData knot_lk(int f) { return LinkingData{{{f}}}; }

// Dot rows of n dots by brute force: subsets of {1..n-1} as left ends,
// kept when no two are adjacent.
std::set<std::vector<int>> brute_rows(int n) {
    std::set<std::vector<int>> out;
    int m = std::max(0, n - 1);
    for (unsigned s = 0; s < (1u << m); ++s) {
        if (s & (s >> 1)) continue;
        std::vector<int> pairs;
        for (int k = 0; k < m; ++k)
            if ((s >> k) & 1) pairs.push_back(k + 1);
        out.insert(pairs);
    }
    return out;
}

// Grading multiset for a knot of framing f: k^2 steps for even n, k(k+1) for odd.
Table knot_table(int n, int f) {
    Table t;
    if (n % 2 == 0) {
        t[{0, 0}] += 1;
        for (int k = 1; k <= n / 2; ++k) t[{0, -2 * k * k * f}] += 2;
    } else {
        for (int k = 0; k <= (n - 1) / 2; ++k) t[{0, -2 * k * (k + 1) * f}] += 2;
    }
    return t;
}

Table generator_table(const std::vector<Generator>& gens) {
    Table t;
    for (const Generator& g : gens) t[{0, g.degree}] += 1;
    return t;
}

std::size_t ipow2(int e) { return std::size_t{1} << e; }

}  // namespace

TEST_CASE("dot rows match brute force") {
    CHECK(enumerate_dot_rows(0).size() == 1);
    CHECK(enumerate_dot_rows(1).size() == 1);
    CHECK(enumerate_dot_rows(2).size() == 2);
    CHECK(enumerate_dot_rows(4).size() == 5);
    for (int n = 0; n <= 10; ++n) {
        auto rows = enumerate_dot_rows(n);
        std::set<std::vector<int>> got;
        for (const DotRow& r : rows) got.insert(r.pairs);
        CHECK(got == brute_rows(n));
        CHECK(got.size() == rows.size());
        CHECK(std::is_sorted(rows.begin(), rows.end(),
                             [](const DotRow& a, const DotRow& b) { return a.pairs < b.pairs; }));
    }
    CHECK(enumerate_dot_rows(5)[1].str() == "(oo)ooo");
}

TEST_CASE("dot row edges") {
    DotRowVector empty2{DotRow{2, {}}};
    auto e2 = dot_row_edges(empty2);
    REQUIRE(e2.size() == 1);
    CHECK(e2[0].l == 1);
    CHECK(e2[0].target[0].pairs == std::vector<int>{1});

    auto e4 = dot_row_edges(DotRowVector{DotRow{4, {}}});
    REQUIRE(e4.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(e4[k].l == k + 1);

    CHECK(dot_row_edges(DotRowVector{DotRow{4, {2}}}).empty());

    // pair at (1,2) then singles 3,4,5: the new pair (4,5) contracts strands 2,3
    auto e5 = dot_row_edges(DotRowVector{DotRow{5, {1}}});
    REQUIRE(e5.size() == 2);
    CHECK(e5[1].position == 4);
    CHECK(e5[1].l == 2);

    // edges raise the pair count by one and keep the old pairs
    for (const DotRow& r : enumerate_dot_rows(7))
        for (const DotRowEdge& e : dot_row_edges(DotRowVector{r})) {
            CHECK(e.target[0].p() == r.p() + 1);
            for (int k : r.pairs) CHECK(std::binary_search(e.target[0].pairs.begin(), e.target[0].pairs.end(), k));
            std::vector<int> s = r.singles();
            CHECK(s[e.l - 1] == e.position);
            CHECK(s[e.l] == e.position + 1);
        }
}

TEST_CASE("model complex of small knots") {
    ColouredComplex c1 = build_model_complex(knot_lk(3), {1});
    CHECK(c1.vertices.size() == 1);
    CHECK(c1.vertices[0].dim() == 2);
    CHECK(c1.edges.empty());

    ColouredComplex c2 = build_model_complex(knot_lk(0), {2});
    REQUIRE(c2.vertices.size() == 2);
    CHECK(c2.vertices[0].dim() == 4);
    CHECK(c2.vertices[1].dim() == 1);
    CHECK(rank(c2.differential(0)) == 1);
    // bits 00 and 11 (equal reversal bits) are the oppositely oriented pairs
    F2Matrix d0 = c2.differential(0);
    CHECK(d0.get(0, 0));
    CHECK(d0.get(0, 3));
    CHECK(!d0.get(0, 1));
    CHECK(!d0.get(0, 2));

    for (int n = 1; n <= 8; ++n) {
        ColouredComplex c = build_model_complex(knot_lk(-1), {n});
        c.check();
        for (const auto& v : c.vertices) CHECK(v.dim() == ipow2(n - 2 * v.p()));
    }
    CHECK_THROWS_AS(build_model_complex(knot_lk(0), {3}, std::vector<int>{4}), std::invalid_argument);
    CHECK_THROWS_AS(build_model_complex(knot_lk(0), {2, 2}), std::invalid_argument);
}

TEST_CASE("strand degrees agree with the linking numbers of real cables") {
    for (const char* name : {"kink+1", "kink-2", "hopf+", "hopf-", "trefoil+", "figure8"}) {
        Diagram d = census_diagram(name);
        LinkingData lk = linking_data(d);
        std::vector<std::vector<int>> colourings{std::vector<int>(d.component_count(), 2)};
        if (d.component_count() == 2) colourings.push_back({3, 1});
        else colourings.push_back({3});
        for (const auto& colours : colourings) {
            Diagram cab = cable(d, colours).first;
            LinkingData clk = linking_data(cab);
            ColouredComplex m = build_model_complex(lk, colours);
            const auto& deg = m.vertices[0].degrees;
            for (std::uint64_t mask = 0; mask < deg.size(); ++mask) {
                Orientation th = orientation_from_mask(cab.component_count(), mask);
                CHECK(deg[mask] == canonical_degree(reversal_set(th), clk));
            }
        }
    }
}

TEST_CASE("model and chain complexes agree") {
    struct Case {
        const char* name;
        std::vector<int> colours;
    };
    std::vector<Case> cases{{"unknot", {2}}, {"unknot", {3}}, {"unknot", {4}}, {"kink+1", {2}},
                            {"kink-1", {3}}, {"kink+1", {4}}, {"kink-2", {2}}, {"trefoil+", {2}},
                            {"trefoil-", {2}}, {"figure8", {2}}, {"hopf+", {2, 1}}, {"hopf-", {1, 2}},
                            {"hopf+", {2, 2}}, {"kink+1-r2", {2}}};
    for (const Case& cs : cases) {
        INFO(cs.name);
        Diagram d = census_diagram(cs.name);
        ColouredComplex chain = build_chain_complex(d, cs.colours, std::nullopt, false, 40);
        ColouredComplex model = build_model_complex(linking_data(d), cs.colours);
        chain.check();
        REQUIRE(chain.vertices.size() == model.vertices.size());
        REQUIRE(chain.edges.size() == model.edges.size());
        for (std::size_t k = 0; k < chain.vertices.size(); ++k)
            CHECK(chain.vertices[k].degrees == model.vertices[k].degrees);
        for (std::size_t e = 0; e < chain.edges.size(); ++e) CHECK(chain.edges[e].map == model.edges[e].map);
        CHECK(coloured_homology(chain).dims == coloured_homology(model).dims);
    }
}

TEST_CASE("colour one gives Bar-Natan homology") {
    for (const char* name : {"trefoil+", "hopf-", "figure8"}) {
        Diagram d = census_diagram(name);
        std::vector<int> ones(d.component_count(), 1);
        HomologyTable t = coloured_homology(build_chain_complex(d, ones));
        Table expect;
        for (auto [deg, n] : cube_homology_dims(d, CubeBasis::Standard)) expect[{0, deg}] = n;
        CHECK(t.dims == expect);
    }
}

TEST_CASE("knots: n+1 generators in the predicted degrees") {
    for (int f = -3; f <= 3; ++f)
        for (int n = 1; n <= 10; ++n) {
            INFO("f=" << f << " n=" << n);
            HomologyTable t = coloured_homology(build_model_complex(knot_lk(f), {n}));
            CHECK(t.total() == std::size_t(n + 1));
            CHECK(t.total_at(0) == t.total());
            CHECK(t.dims == knot_table(n, f));
            CHECK(generator_table(t.generators) == t.dims);
        }
    CHECK(coloured_homology(build_model_complex(knot_lk(1), {2})).dims == Table{{{0, 0}, 1}, {{0, -2}, 2}});
    CHECK(coloured_homology(build_model_complex(knot_lk(1), {3})).dims == Table{{{0, 0}, 2}, {{0, -4}, 2}});
}

TEST_CASE("links: product of n_j + 1 generators") {
    for (int lk12 : {-1, 1, 2})
        for (int f1 : {-1, 0, 1})
            for (int f2 : {0, 1}) {
                LinkingData lk{{{f1, lk12}, {lk12, f2}}};
                for (int a = 1; a <= 4; ++a)
                    for (int b = 0; b <= 3; ++b) {
                        INFO(lk12 << " " << f1 << " " << f2 << " colours " << a << "," << b);
                        HomologyTable t = coloured_homology(build_model_complex(lk, {a, b}));
                        CHECK(t.total() == std::size_t((a + 1) * (b + 1)));
                        CHECK(t.total_at(0) == t.total());
                        CHECK(generator_table(t.generators) == t.dims);
                    }
            }
}

TEST_CASE("interpolating complexes") {
    for (int n = 0; n <= 8; ++n)
        for (int m = 0; m <= n; ++m) {
            INFO("n=" << n << " m=" << m);
            HomologyTable t = interpolating_homology(knot_lk(1), {n}, {m});
            CHECK(t.total_at(0) == ipow2(n - m) * std::size_t(m + 1));
            CHECK(t.total() == t.total_at(0));
            if (m >= 1 && m < n && n >= 2) {
                // alternating sum along the long exact sequence
                long a = static_cast<long>(interpolating_homology(knot_lk(1), {n}, {m + 1}).total_at(0));
                long b = static_cast<long>(t.total_at(0));
                long c = static_cast<long>(interpolating_homology(knot_lk(1), {n - 2}, {m - 1}).total_at(0));
                CHECK(a - b + c == 0);
            }
        }
    HomologyTable link = interpolating_homology(LinkingData{{{0, 1}, {1, 2}}}, {3, 2}, {2, 1});
    CHECK(link.total_at(0) == ipow2(1) * 3 * ipow2(1) * 2);
    CHECK(link.total() == link.total_at(0));
}

TEST_CASE("kernel of d0 is spanned by orbit sums") {
    for (int n = 1; n <= 7; ++n) {
        ColouredComplex c = build_model_complex(knot_lk(2), {n});
        auto orbits = symmetric_basis(c.lk, {n});
        CHECK(orbits.size() == std::size_t(n + 1));
        F2Matrix d0 = c.differential(0);
        std::vector<BitVector> vs;
        for (const OrbitSum& o : orbits) {
            CHECK(!d0.apply(o.vector).any());
            vs.push_back(o.vector);
            for (std::size_t m : o.vector.ones()) CHECK(c.vertices[0].degrees[m] == o.degree);
        }
        std::size_t dim = c.vertices[0].dim();
        CHECK(rank(F2Matrix::from_columns(dim, vs)) == vs.size());
        CHECK(dim - rank(d0) == vs.size());
    }
    auto two = symmetric_basis(knot_lk(1), {2});
    REQUIRE(two.size() == 3);
    CHECK(two[0].agreeing == std::vector<int>{0});
    CHECK(two[2].agreeing == std::vector<int>{2});
}

TEST_CASE("conjugation on orbit sums") {
    for (int n = 1; n <= 8; ++n) {
        auto orbits = symmetric_basis(knot_lk(1), {n});
        for (const OrbitSum& o : orbits) {
            BitVector c = conjugate(o.vector, {n});
            auto match = std::find_if(orbits.begin(), orbits.end(), [&](const OrbitSum& x) { return x.vector == c; });
            REQUIRE(match != orbits.end());
            CHECK(match->degree == o.degree);
            CHECK(match->agreeing[0] == n - o.agreeing[0]);
            if (n % 2 == 0 && o.degree == 0) CHECK(c == o.vector);
        }
    }
}

TEST_CASE("admissible collections") {
    auto g = admissible_collections(knot_lk(1), {2});
    REQUIRE(g.size() == 3);
    CHECK(g[0].E == std::vector<std::vector<int>>{{}});
    CHECK(g[1].E == std::vector<std::vector<int>>{{2}});
    CHECK(g[2].E == std::vector<std::vector<int>>{{1}});
    CHECK(g[0].degree == 0);
    CHECK(g[1].degree == -2);
    CHECK(g[2].degree == -2);
    CHECK(lambda({2}, {}, 1) == -1);

    for (int a = 0; a <= 5; ++a)
        for (int b = 0; b <= 4; ++b)
            CHECK(admissible_collections(LinkingData{{{1, 1}, {1, 0}}}, {a, b}).size() == std::size_t((a + 1) * (b + 1)));

    // Hopf link with zero framings and colours (1, 1)
    LinkingData hopf{{{0, 1}, {1, 0}}};
    std::map<std::vector<std::vector<int>>, int> deg;
    for (const Generator& x : admissible_collections(hopf, {1, 1})) deg[x.E] = x.degree;
    CHECK(deg[{{}, {}}] == 0);
    CHECK(deg[{{1}, {}}] == 2);
    CHECK(deg[{{}, {1}}] == 2);
    CHECK(deg[{{1}, {1}}] == 0);
    Diagram h = census_diagram("hopf+");
    REQUIRE(linking_data(h) == hopf);
    Table bn;
    for (auto [j, n] : cube_homology_dims(h, CubeBasis::Standard)) bn[{0, j}] = n;
    CHECK(generator_table(admissible_collections(hopf, {1, 1})) == bn);

    // each generator is the orbit sum through its orientation, and lies in ker d0
    LinkingData lk{{{1, -1}, {-1, 2}}};
    std::vector<int> colours{3, 2};
    ColouredComplex c = build_model_complex(lk, colours);
    auto orbits = symmetric_basis(lk, colours);
    for (const Generator& x : admissible_collections(lk, colours)) {
        std::uint64_t m = orientation_mask(colours, x.E);
        CHECK(strand_degree(lk, colours, x.E) == x.degree);
        auto o = std::find_if(orbits.begin(), orbits.end(), [&](const OrbitSum& s) { return s.vector.get(m); });
        REQUIRE(o != orbits.end());
        CHECK(o->degree == x.degree);
        CHECK(!c.differential(0).apply(o->vector).any());
    }
}

TEST_CASE("reversed complexes") {
    for (const char* name : {"unknot", "kink+1", "kink-1", "hopf+"}) {
        Diagram d = census_diagram(name);
        std::vector<std::vector<int>> colourings;
        if (d.component_count() == 1) colourings = {{2}, {3}};
        else colourings = {{2, 1}, {2, 2}};
        for (const auto& colours : colourings) {
            INFO(name << " " << colours[0]);
            ColouredComplex fwd = build_chain_complex(d, colours, std::nullopt, false, 40);
            ColouredComplex rev = build_chain_complex(d, colours, std::nullopt, true, 40);
            rev.check();
            CHECK(reversed_homology(rev) == coloured_homology(fwd).dims);
            for (int i = 1; i <= fwd.max_pairs(); ++i) CHECK(rank(rev.differential(i)) == rank(fwd.differential(i - 1)));
        }
    }
    CHECK_THROWS_AS(reversed_homology(build_model_complex(knot_lk(0), {2})), std::invalid_argument);
}

TEST_CASE("model complex reads only the linking data") {
    Diagram a = census_diagram("kink+1"), b = census_diagram("kink+1-r2");
    CHECK(a.crossing_count() != b.crossing_count());
    REQUIRE(linking_data(a) == linking_data(b));
    for (int n = 1; n <= 6; ++n) {
        ColouredComplex x = build_model_complex(linking_data(a), {n});
        ColouredComplex y = build_model_complex(linking_data(b), {n});
        for (int i = 0; i <= x.max_pairs(); ++i) CHECK(x.differential(i) == y.differential(i));
        CHECK(coloured_homology(x).dims == coloured_homology(y).dims);
    }
}

TEST_CASE("json output") {
    HomologyTable t = coloured_homology(build_model_complex(knot_lk(3), {2}));
    auto j = nlohmann::json::parse(t.json());
    CHECK(j["mode"] == "model");
    CHECK(j["colours"] == nlohmann::json::array({2}));
    CHECK(j["framing"] == nlohmann::json::array({3}));
    CHECK(j["table"].size() == 2);
    CHECK(j["generators"].size() == 3);
    CHECK(j["generators"][1]["E"] == nlohmann::json::parse("[[2]]"));
    CHECK(j["generators"][1]["degree"] == -6);
}
