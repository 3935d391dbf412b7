#include <string>

#include "cbn/census.hpp"
#include "cbn/diagram.hpp"
#include "doctest.h"

using namespace cbn;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_diagram(text);
    } catch (const DiagramError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("kink document parses to one crossing") {
    Diagram d = parse_diagram(
        "components 1\n"
        "component 1 arcs 1 2\n"
        "X 2 1 1 2 over a   # positive kink\n"
        "outer +1 -2\n");
    CHECK(d.crossing_count() == 1);
    CHECK(d.component_count() == 1);
    CHECK(crossing_sign(d, 0) == 1);
    CHECK(linking_data(d).lk == std::vector<std::vector<int>>{{1}});
    CHECK(trace_faces(d).face_count() == 3);
}

TEST_CASE("trefoil signs and writhe") {
    Diagram r = census_diagram("trefoil+");
    Diagram l = census_diagram("trefoil-");
    CHECK(writhe(r) == 3);
    for (int c = 0; c < 3; ++c) {
        CHECK(crossing_sign(r, c) == 1);
        CHECK(crossing_sign(l, c) == -1);
    }
    CHECK(linking_data(r).lk == std::vector<std::vector<int>>{{3}});
    CHECK_THROWS_AS(crossing_sign(r, 3), DiagramError);
}

TEST_CASE("hopf linking matrix") {
    CHECK(linking_data(census_diagram("hopf+")).lk == std::vector<std::vector<int>>{{0, 1}, {1, 0}});
    CHECK(linking_data(census_diagram("hopf-")).lk == std::vector<std::vector<int>>{{0, -1}, {-1, 0}});
}

TEST_CASE("reversing a component flips its crossings with others") {
    Diagram h = census_diagram("hopf+");
    std::vector<bool> rev{false, true};
    CHECK(crossing_sign(h, 0, rev) == -1);
    CHECK(negative_crossings(h, rev) == 2);
    Diagram t = census_diagram("trefoil+");
    CHECK(negative_crossings(t, std::vector<bool>{true}) == 0);
}

TEST_CASE("parse errors carry locations") {
    std::string triple = error_of(
        "components 1\n"
        "component 1 arcs 1 2\n"
        "X 2 1 1 2 over a\n"
        "X 1 2 2 1 over a\n"
        "outer +1\n");
    CHECK(contains(triple, "arc multiplicity"));
    CHECK(contains(triple, "line 4"));

    CHECK(contains(error_of("components 1\ncomponent 1 arcs 1\nfoo\n"), "line 3"));
    CHECK(contains(error_of("components 1\ncomponent 1 arcs 1 2\nX 2 1 1 2 over c\nouter +1\n"),
                   "usage"));

    // second Hopf crossing in the wrong rotation gives a torus embedding
    std::string torus = error_of(
        "components 2\n"
        "component 1 arcs 1 2\n"
        "component 2 arcs 3 4\n"
        "X 1 3 2 4 over a\n"
        "X 2 4 1 3 over a\n"
        "outer +1\n");
    CHECK(contains(torus, "non-planar"));

    std::string orient = error_of(
        "components 1\n"
        "component 1 arcs 2 1\n"
        "X 4 1 5 2 over a\n"
        "X 6 3 1 4 over a\n"
        "X 2 5 3 6 over a\n"
        "outer +1\n");
    CHECK(!orient.empty());

    std::string order = error_of(
        "components 1\n"
        "component 1 arcs 1 3 2 4 5 6\n"
        "X 4 1 5 2 over a\n"
        "X 6 3 1 4 over a\n"
        "X 2 5 3 6 over a\n"
        "outer +1\n");
    CHECK(contains(order, "inconsistent orientation"));
    CHECK(contains(error_of("components 1\ncomponent 1 arcs 1\n"), "no outer face"));
}

TEST_CASE("census listing") {
    std::string listing = census_listing();
    CHECK(contains(listing, "trefoil+ k=1 w=3"));
    CHECK(contains(listing, "hopf+ k=2 lk=1"));
    CHECK(census_names().size() >= 8);
    CHECK_THROWS_AS(census_diagram("nope"), DiagramError);
    CHECK(writhe(census_diagram("figure8")) == 0);
    CHECK(census_diagram("figure8").crossing_count() == 4);
}

TEST_CASE("format and parse round trip") {
    for (const std::string& name : census_names()) {
        Diagram d = census_diagram(name);
        CHECK_MESSAGE(isomorphic(parse_diagram(format_diagram(d)), d), name);
    }
    Diagram c = cable(census_diagram("hopf+"), std::vector<int>{2, 3}).first;
    CHECK(isomorphic(parse_diagram(format_diagram(c)), c));
    Diagram u = cable(census_diagram("unknot"), std::vector<int>{3}).first;
    CHECK(u.component_count() == 3);
    CHECK(isomorphic(parse_diagram(format_diagram(u)), u));
}

TEST_CASE("cable crossing counts") {
    CHECK(cable(census_diagram("trefoil+"), std::vector<int>{2}).first.crossing_count() == 12);
    CHECK(cable(census_diagram("figure8"), std::vector<int>{3}).first.crossing_count() == 36);
    CHECK(cable(census_diagram("hopf+"), std::vector<int>{2, 3}).first.crossing_count() == 12);
    CHECK_THROWS_AS(cable(census_diagram("hopf+"), std::vector<int>{2}), DiagramError);
}

TEST_CASE("cable with colour one is the identity") {
    for (const std::string& name : census_names()) {
        Diagram d = census_diagram(name);
        std::vector<int> ones(d.component_count(), 1);
        CHECK_MESSAGE(isomorphic(cable(d, ones).first, d), name);
    }
}

TEST_CASE("cabling twice") {
    for (std::string name : {"trefoil+", "hopf-", "kink-2", "unknot"}) {
        Diagram d = census_diagram(name);
        std::vector<int> n(d.component_count(), 2);
        Diagram c = cable(d, n).first;
        std::vector<int> ones(c.component_count(), 1);
        CHECK_MESSAGE(isomorphic(cable(c, ones).first, c), name);
    }
}

TEST_CASE("colour zero deletes the component") {
    Diagram h = census_diagram("hopf+");
    auto [a, ma] = cable(h, std::vector<int>{2, 0});
    CHECK(a.crossing_count() == 0);
    CHECK(a.component_count() == 2);
    CHECK(ma.strand_component[1].empty());
    auto [b, mb] = cable(h, std::vector<int>{0, 1});
    CHECK(b.crossing_count() == 0);
    CHECK(b.component_count() == 1);
    CHECK(mb.component_source[0] == std::pair<int, int>{1, 1});
    auto [t, mt] = cable(census_diagram("trefoil+"), std::vector<int>{0});
    CHECK(t.component_count() == 0);
}

TEST_CASE("strand linking numbers of cables") {
    auto [k2, m] = cable(census_diagram("kink+1"), std::vector<int>{2});
    CHECK(linking_data(k2)(0, 1) == -1);

    for (const std::string& name : census_names()) {
        Diagram d = census_diagram(name);
        LinkingData L = linking_data(d);
        std::vector<int> n(d.component_count());
        for (int i = 0; i < d.component_count(); ++i) n[i] = 2 + (i % 2);
        auto [c, cm] = cable(d, n);
        LinkingData Lc = linking_data(c);
        for (int p = 0; p < c.component_count(); ++p)
            for (int q = 0; q < c.component_count(); ++q) {
                auto [i, j] = cm.component_source[p];
                auto [l, mm] = cm.component_source[q];
                int expected = p == q ? L(i, i) : ((j + mm) % 2 ? -1 : 1) * L(i, l);
                CHECK_MESSAGE(Lc(p, q) == expected, name << " " << p << " " << q);
            }
        // strand 1 keeps the orientation: its base arc is a copy of the base arc
        for (int i = 0; i < d.component_count(); ++i) {
            int s1 = cm.strand_component[i][0];
            CHECK(cm.arc_source[c.base_arcs[s1]] == std::pair<int, int>{i, 1});
        }
    }
}
