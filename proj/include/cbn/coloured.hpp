// The coloured complex over the graph of dot-rows, in two modes: chain
// (vertex spaces are Bar-Natan homology of cables, edge maps induced by
// annulus movies) and model (orientation bases with the contraction rule).

#ifndef CBN_COLOURED_HPP
#define CBN_COLOURED_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbn/diagram.hpp"
#include "cbn/f2linalg.hpp"

namespace cbn {

// Dots 1..n; each pair (k, k+1) is stored by its left position k.
struct DotRow {
    int n = 0;
    std::vector<int> pairs;  // sorted

    int p() const { return static_cast<int>(pairs.size()); }
    bool paired(int pos) const;
    // Positions of unpaired dots, left to right.
    std::vector<int> singles() const;
    std::string str() const;  // e.g. "o(oo)o"
    auto operator<=>(const DotRow&) const = default;
};

using DotRowVector = std::vector<DotRow>;

int total_pairs(const DotRowVector& v);

// All rows of n dots, ordered lexicographically by pair list.
std::vector<DotRow> enumerate_dot_rows(int n);
std::vector<DotRowVector> enumerate_dot_row_vectors(const std::vector<int>& dots);

struct DotRowEdge {
    DotRowVector target;
    int component = 0;  // 0-based
    int l = 0;          // strands l, l+1 of that component's cable contract
    int position = 0;   // left dot of the new pair
};

std::vector<DotRowEdge> dot_row_edges(const DotRowVector& v);

// Complex ---------------------------------------------------------------

enum class ComplexMode { Model, Chain };
const char* mode_name(ComplexMode m);

struct ColouredVertex {
    DotRowVector rows;
    std::vector<int> cable;     // colours of the cable at this vertex
    std::vector<int> degrees;   // internal degree per basis element
    int p() const { return total_pairs(rows); }
    std::size_t dim() const { return degrees.size(); }
};

struct ColouredEdge {
    std::size_t from = 0, to = 0;  // vertex indices, pair count rises by one
    int component = 0, l = 0;
    F2Matrix map;                  // dim(to) x dim(from); reversed: dim(from) x dim(to)
};

// Basis at a vertex: bit b of the index is the reversal of cable strand b,
// strands numbered component by component (components of colour 0 skipped).
struct ColouredComplex {
    ComplexMode mode = ComplexMode::Model;
    bool reversed = false;  // edges run from `to` back to `from`
    std::vector<int> colours, dots, framing;
    LinkingData lk;
    std::vector<ColouredVertex> vertices;
    std::vector<ColouredEdge> edges;

    int max_pairs() const;
    // Differential in degree i (pair count); reversed complexes lower it.
    F2Matrix differential(int i) const;
    // Same, restricted to basis elements of internal degree j.
    F2Matrix differential(int i, int j) const;
    std::vector<int> degrees_at(int i) const;
    // Throws LinalgError unless d o d = 0 and every edge keeps internal degrees.
    void check() const;
};

ColouredComplex build_model_complex(const LinkingData& lk, const std::vector<int>& colours,
                                    const std::optional<std::vector<int>>& dots = std::nullopt);

// Vertex spaces and edge matrices computed from the cables of `d`. Throws
// SizeGuardError when a cable exceeds `guard` crossings.
ColouredComplex build_chain_complex(const Diagram& d, const std::vector<int>& colours,
                                    const std::optional<std::vector<int>>& dots = std::nullopt,
                                    bool reversed = false, int guard = -1);

// Homology ----------------------------------------------------------------

struct Generator {
    std::vector<std::vector<int>> E;  // reversed strands per component, 1-based
    int degree = 0;
};

struct HomologyTable {
    ComplexMode mode = ComplexMode::Model;
    std::vector<int> colours, framing;
    std::map<std::pair<int, int>, std::size_t> dims;  // (i, j) -> dim
    std::vector<Generator> generators;

    std::size_t total() const;
    std::size_t total_at(int i) const;
    std::string json() const;
    std::string table() const;
};

HomologyTable coloured_homology(const ColouredComplex& c);
HomologyTable interpolating_homology(const LinkingData& lk, const std::vector<int>& colours,
                                     const std::vector<int>& dots);
std::map<std::pair<int, int>, std::size_t> reversed_homology(const ColouredComplex& reversed);

// Degree of the canonical class reversing the strands in E, from the
// linking matrix alone.
int strand_degree(const LinkingData& lk, const std::vector<int>& colours,
                  const std::vector<std::vector<int>>& E);

// Symmetric part -----------------------------------------------------------

struct OrbitSum {
    std::vector<int> agreeing;  // per component, strands agreeing with it
    BitVector vector;           // over the orientation basis
    int degree = 0;
};

// Orbit sums of the symmetric group of the colours, in order of `agreeing`.
std::vector<OrbitSum> symmetric_basis(const LinkingData& lk, const std::vector<int>& colours);
// Reverses every strand.
BitVector conjugate(const BitVector& v, const std::vector<int>& colours);
std::uint64_t orientation_mask(const std::vector<int>& colours, const std::vector<std::vector<int>>& E);

std::vector<Generator> admissible_collections(const LinkingData& lk, const std::vector<int>& colours);
// lambda_{i,l} for the collection E
int lambda(const std::vector<int>& Ei, const std::vector<int>& El, int nl);

}  // namespace cbn

#endif
