// Oriented link diagrams carried combinatorially: crossings with a
// counter-clockwise rotation of half-edges, directed arcs, components and
// a planar embedding given by face regions.

#ifndef CBN_DIAGRAM_HPP
#define CBN_DIAGRAM_HPP

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cbn {

class DiagramError : public std::runtime_error {
public:
    explicit DiagramError(const std::string& what) : std::runtime_error(what) {}
};

// A position on a crossing. `crossing == -1` marks the missing endpoint of
// a crossing-free loop.
struct Slot {
    int crossing = -1;
    int pos = -1;

    bool valid() const { return crossing >= 0; }
    friend bool operator==(const Slot&, const Slot&) = default;
};

// Half-edges are stored counter-clockwise. Slots 0 and 1 are the incoming
// half-edges (1 follows 0 counter-clockwise), slot 2 continues slot 0 and
// slot 3 continues slot 1.
struct Crossing {
    std::array<int, 4> arcs{};
    bool over_first = true;  // the over strand runs through slots 0 and 2
};

struct Arc {
    Slot tail;
    Slot head;
    int component = -1;

    bool is_loop() const { return !tail.valid(); }
};

// Darts: 2*arc is the arc traversed along its orientation, 2*arc+1 against
// it. Every dart has a face on its left.
inline int dart(int arc, bool backward) { return 2 * arc + (backward ? 1 : 0); }
inline int dart_arc(int d) { return d / 2; }
inline bool dart_backward(int d) { return d & 1; }

struct Diagram {
    std::vector<Crossing> crossings;
    std::vector<Arc> arcs;
    // Arcs of each component in traversal order.
    std::vector<std::vector<int>> components;
    // One marked arc per component; strands of a cable are numbered there.
    std::vector<int> base_arcs;
    // Region of the plane on the left of each dart; region 0 is the
    // unbounded one. Empty when the diagram carries no embedding (movie
    // intermediates after a saddle).
    std::vector<int> dart_region;

    int crossing_count() const { return static_cast<int>(crossings.size()); }
    int arc_count() const { return static_cast<int>(arcs.size()); }
    int component_count() const { return static_cast<int>(components.size()); }
    bool has_embedding() const { return !dart_region.empty(); }

    Slot slot_of(int crossing, int pos) const { return {crossing, pos}; }
    int arc_at(Slot s) const { return crossings[s.crossing].arcs[s.pos]; }
    // Component of the strand entering at slot 0 or 1.
    int strand_component(int crossing, int strand) const;
};

// Faces traced from the rotation system.
struct FaceStructure {
    std::vector<int> dart_face;              // face of each dart
    std::vector<std::vector<int>> face_darts;  // boundary darts of each face
    int face_count() const { return static_cast<int>(face_darts.size()); }
};

FaceStructure trace_faces(const Diagram& d);

// Connected pieces of the projection, as a component index per arc.
std::vector<int> connected_pieces(const Diagram& d, int* piece_count = nullptr);

// Checks every structural invariant; throws DiagramError with a location.
// Embedding checks run only when the diagram has one.
void validate(const Diagram& d);

// Dart following `d` around its left face.
int next_dart_in_face(const Diagram& diag, int d);

// Sign of a crossing; `reversed` optionally flags components whose
// orientation is flipped.
int crossing_sign(const Diagram& d, int crossing);
int crossing_sign(const Diagram& d, int crossing, const std::vector<bool>& reversed);
int negative_crossings(const Diagram& d);
int negative_crossings(const Diagram& d, const std::vector<bool>& reversed);
int writhe(const Diagram& d);

// lk(i,l) for i != l; self-writhe (blackboard framing) on the diagonal.
struct LinkingData {
    std::vector<std::vector<int>> lk;

    int size() const { return static_cast<int>(lk.size()); }
    int operator()(int i, int l) const { return lk[i][l]; }
    friend bool operator==(const LinkingData&, const LinkingData&) = default;
};

LinkingData linking_data(const Diagram& d);

// Provenance of a cabled diagram. Strand numbers are 1-based as in the
// cross-section picture: strand 1 is leftmost with the original orientation
// pointing up.
struct CableMap {
    std::vector<int> colours;
    // cable component -> (original component, strand)
    std::vector<std::pair<int, int>> component_source;
    // cable crossing -> (original crossing, strand through slots 0/2 of the
    // original, strand through slots 1/3 of the original)
    std::vector<std::array<int, 3>> crossing_source;
    // cable arc -> (original component, strand)
    std::vector<std::pair<int, int>> arc_source;
    // [original component][strand - 1] -> cable component, or -1 when the
    // component has colour 0.
    std::vector<std::vector<int>> strand_component;
};

std::pair<Diagram, CableMap> cable(const Diagram& d, std::span<const int> colours);

// Removes whole components, merging the arcs they crossed.
Diagram delete_components(const Diagram& d, const std::vector<bool>& remove,
                          std::vector<int>* arc_origin = nullptr,
                          std::vector<int>* crossing_origin = nullptr);

// Removes crossings, letting both strands run straight through them. The
// result carries no embedding. `arc_image` maps every old arc to the new
// arc containing it.
Diagram remove_crossings(const Diagram& d, const std::vector<bool>& drop,
                         std::vector<int>* arc_origin = nullptr,
                         std::vector<int>* crossing_origin = nullptr,
                         std::vector<int>* arc_image = nullptr);

// Line-oriented text format (see README).
Diagram parse_diagram(std::string_view text);
std::string format_diagram(const Diagram& d);

// Reorders crossings and arcs canonically and compares; used to test
// that two constructions yield the same diagram.
bool isomorphic(const Diagram& a, const Diagram& b);

}  // namespace cbn

#endif
