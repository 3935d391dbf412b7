#include "cbn/census.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace cbn {

namespace {

struct Entry {
    const char* name;
    const char* text;
};

const Entry kEntries[] = {
    {"unknot",
     "components 1\n"
     "component 1 arcs 1\n"
     "outer -1\n"},
    {"kink+1",
     "components 1\n"
     "component 1 arcs 1 2\n"
     "X 2 1 1 2 over a\n"
     "outer +1 -2\n"},
    {"kink-1",
     "components 1\n"
     "component 1 arcs 1 2\n"
     "X 2 1 1 2 over b\n"
     "outer +1 -2\n"},
    {"kink+2",
     "components 1\n"
     "component 1 arcs 1 2 3 4\n"
     "X 4 1 1 2 over a\n"
     "X 2 3 3 4 over a\n"
     "outer +1 -4 +3 -2\n"},
    {"kink-2",
     "components 1\n"
     "component 1 arcs 1 2 3 4\n"
     "X 4 1 1 2 over b\n"
     "X 2 3 3 4 over b\n"
     "outer +1 -4 +3 -2\n"},
    {"hopf+",
     "components 2\n"
     "component 1 arcs 1 2\n"
     "component 2 arcs 3 4\n"
     "X 1 3 2 4 over a\n"
     "X 4 2 3 1 over a\n"
     "outer +1\n"},
    {"hopf-",
     "components 2\n"
     "component 1 arcs 1 2\n"
     "component 2 arcs 3 4\n"
     "X 1 3 2 4 over b\n"
     "X 4 2 3 1 over b\n"
     "outer +1\n"},
    {"trefoil+",
     "components 1\n"
     "component 1 arcs 1 2 3 4 5 6\n"
     "X 4 1 5 2 over a\n"
     "X 6 3 1 4 over a\n"
     "X 2 5 3 6 over a\n"
     "outer +2 +6 +4\n"},
    {"trefoil-",
     "components 1\n"
     "component 1 arcs 1 2 3 4 5 6\n"
     "X 4 1 5 2 over b\n"
     "X 6 3 1 4 over b\n"
     "X 2 5 3 6 over b\n"
     "outer +2 +6 +4\n"},
    {"figure8", nullptr},
    {"unknot-r2",
     "components 1\n"
     "component 1 arcs 1 2 3 4\n"
     "X 1 4 2 1 over a\n"
     "X 3 2 4 3 over b\n"
     "outer -1 +2 -3 +4\n"},
    {"kink+1-r2",
     "components 1\n"
     "component 1 arcs 1 2 3 4 5 6\n"
     "X 3 6 4 1 over a\n"
     "X 5 4 6 5 over b\n"
     "X 2 1 3 2 over a\n"
     "outer -1 +4 -5 +6 -3\n"},
};

const Entry* find_entry(std::string_view name) {
    for (const Entry& e : kEntries)
        if (name == e.name) return &e;
    return nullptr;
}

}  // namespace

void embed_with_outer_face(Diagram& d, int outer_dart) {
    int pieces = 0;
    connected_pieces(d, &pieces);
    if (pieces != 1) throw DiagramError("embed_with_outer_face: diagram is split");
    FaceStructure fs = trace_faces(d);
    int outer = fs.dart_face[outer_dart];
    d.dart_region.assign(2 * d.arc_count(), 0);
    for (int dt = 0; dt < 2 * d.arc_count(); ++dt) {
        int f = fs.dart_face[dt];
        d.dart_region[dt] = f == outer ? 0 : (f < outer ? f + 1 : f);
    }
    validate(d);
}

Diagram knot_from_pd(const std::vector<std::array<int, 4>>& pd) {
    const int A = 2 * static_cast<int>(pd.size());
    auto succ = [A](int a) { return a % A + 1; };
    std::ostringstream text;
    text << "components 1\ncomponent 1 arcs";
    for (int a = 1; a <= A; ++a) text << " " << a;
    text << "\n";
    for (const auto& x : pd) {
        // under strand x[0] -> x[2]; over strand between x[1] and x[3]
        if (succ(x[0]) != x[2]) throw DiagramError("PD record does not start with an incoming under arc");
        if (succ(x[1]) == x[3])
            text << "X " << x[0] << " " << x[1] << " " << x[2] << " " << x[3] << " over b\n";
        else if (succ(x[3]) == x[1])
            text << "X " << x[3] << " " << x[0] << " " << x[1] << " " << x[2] << " over a\n";
        else
            throw DiagramError("PD over strand is not consecutive");
    }
    // parse without an embedding, then pick the largest face
    std::string body = text.str();
    Diagram d = parse_diagram(body + "outer +1\n");
    FaceStructure fs = trace_faces(d);
    int best = 0;
    for (int f = 1; f < fs.face_count(); ++f)
        if (fs.face_darts[f].size() > fs.face_darts[best].size()) best = f;
    embed_with_outer_face(d, fs.face_darts[best][0]);
    return d;
}

std::vector<std::string> census_names() {
    std::vector<std::string> out;
    for (const Entry& e : kEntries) out.emplace_back(e.name);
    return out;
}

Diagram census_diagram(std::string_view name) {
    const Entry* e = find_entry(name);
    if (!e) throw DiagramError("unknown census diagram '" + std::string(name) + "'");
    if (std::string_view(e->name) == "figure8")
        return knot_from_pd({{4, 2, 5, 1}, {8, 6, 1, 5}, {6, 3, 7, 4}, {2, 7, 3, 8}});
    return parse_diagram(e->text);
}

std::string census_listing() {
    std::ostringstream out;
    for (const std::string& name : census_names()) {
        Diagram d = census_diagram(name);
        LinkingData lk = linking_data(d);
        out << name << " k=" << d.component_count();
        if (d.component_count() == 1) {
            out << " w=" << writhe(d);
        } else {
            for (int i = 0; i < d.component_count(); ++i)
                for (int l = i + 1; l < d.component_count(); ++l)
                    out << (d.component_count() == 2 ? " lk=" : " lk" + std::to_string(i + 1) +
                                                                   std::to_string(l + 1) + "=")
                        << lk(i, l);
            out << " framing=";
            for (int i = 0; i < d.component_count(); ++i) out << (i ? "," : "") << lk(i, i);
        }
        out << " crossings=" << d.crossing_count() << "\n";
    }
    return out.str();
}

}  // namespace cbn
