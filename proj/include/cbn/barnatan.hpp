// Bar-Natan cube of resolutions over F2 with V = F2{1, x}:
//   m(1,1) = 1, m(1,x) = m(x,1) = x, m(x,x) = x
//   D(1) = 1(x)x + x(x)1 + 1(x)1, D(x) = x(x)x, e(1) = 0, e(x) = 1, i(1) = 1.

#ifndef CBN_BARNATAN_HPP
#define CBN_BARNATAN_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "cbn/diagram.hpp"
#include "cbn/f2linalg.hpp"

namespace cbn {

class SizeGuardError : public std::runtime_error {
public:
    explicit SizeGuardError(const std::string& what) : std::runtime_error(what) {}
};

constexpr int kDefaultCubeGuard = 26;
// Guard from CBN_CUBE_GUARD when set, else the default.
int cube_guard();

using State = std::uint64_t;   // bit c: smoothing of crossing c
using Labels = std::uint64_t;  // bit k: circle k labelled x (else 1)

// Pairs of slots joined by a smoothing, as (p, partner[p]).
std::array<int, 4> smoothing_partner(const Crossing& c, int smoothing);

struct Resolution {
    int circle_count = 0;
    std::vector<int> arc_circle;   // circle of every arc
    // Per circle: the darts met when traversing it starting along its
    // lowest arc in that arc's direction.
    std::vector<std::vector<int>> circle_darts;
    // Filled only when the diagram has an embedding.
    std::vector<int> depth;
    std::vector<bool> inner_on_left;  // bounded side left of the traversal
};

Resolution resolve(const Diagram& d, State s);

// Caches resolutions by state; safe to share across threads.
class ResolutionCache {
public:
    explicit ResolutionCache(const Diagram& d) : d_(d) {}
    const Resolution& get(State s);
    const Diagram& diagram() const { return d_; }

private:
    const Diagram& d_;
    std::mutex mu_;
    std::unordered_map<State, std::unique_ptr<Resolution>> cache_;
};

struct Term {
    State state = 0;
    Labels labels = 0;
    auto operator<=>(const Term&) const = default;
};

// F2 combination of enhanced states, kept sorted and reduced mod 2.
class Chain {
public:
    Chain() = default;
    explicit Chain(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    void add(const Term& t) { terms_.push_back(t); dirty_ = true; }
    Chain& operator+=(const Chain& o);
    void normalize();
    bool operator==(const Chain& o) const;

private:
    std::vector<Term> terms_;
    bool dirty_ = false;
};

int homological_degree(const Diagram& d, State s);

// d(v): sum over crossings smoothed 0 in a term of the merge/split map.
Chain differential(ResolutionCache& rc, const Chain& v);

// The part of d(v) along one crossing (terms smoothed 0 there).
Chain edge_differential(ResolutionCache& rc, const Chain& v, int crossing);

// Canonical cycles --------------------------------------------------------

// `reversed[k]` flips component k of the diagram.
using Orientation = std::vector<bool>;

State canonical_smoothing(const Diagram& d, const Orientation& theta);
// Per circle of the canonical resolution: true for Group 1 (label x),
// false for Group 0 (label 1 + x).
std::vector<bool> canonical_groups(const Diagram& d, const Orientation& theta,
                                   const Resolution& r);
Chain canonical_cycle(const Diagram& d, const Orientation& theta);
int canonical_degree(const std::vector<int>& E, const LinkingData& lk);
std::vector<int> reversal_set(const Orientation& theta);  // 0-based components
Orientation orientation_from_mask(int components, std::uint64_t mask);

// Homology -----------------------------------------------------------------

// Basis of canonical classes, one per orientation, ordered by the bit mask
// of reversed components. Projection reads the coefficient of each class in
// the idempotent basis e0 = 1 + x, e1 = x at the canonical state.
class BNHomology {
public:
    struct Class {
        Orientation theta;
        State state = 0;
        int degree = 0;
        std::vector<bool> group;  // per circle of the canonical resolution
    };

    explicit BNHomology(const Diagram& d);

    std::size_t dimension() const { return classes_.size(); }
    const std::vector<Class>& classes() const { return classes_; }
    std::map<int, int> degrees() const;
    // Coordinates of the class of a cycle. The cycle property is checked
    // unless `assume_cycle`.
    BitVector project(const Chain& cycle, bool assume_cycle = false) const;

private:
    Diagram d_;
    mutable ResolutionCache cache_;
    std::vector<Class> classes_;
};

// Full cube -----------------------------------------------------------------

enum class CubeBasis { Standard, Idempotent };

// Enumerated basis of the cube, grouped by homological degree.
struct CubeIndex {
    int lo = 0, hi = 0;  // homological degree range
    std::vector<int> circles;               // per state
    std::vector<std::uint64_t> offset;      // per state, within its degree
    std::vector<std::uint64_t> dims;        // per degree
};

CubeIndex index_cube(const Diagram& d, ResolutionCache& rc, int guard = cube_guard());

// Per-degree homology dimensions computed by sparse ranks of the full cube
// differential in the chosen basis.
std::map<int, std::uint64_t> cube_homology_dims(const Diagram& d, CubeBasis basis,
                                                int guard = cube_guard());

// Dense complex of the full cube in the standard basis (small diagrams).
ChainComplex cube_complex(const Diagram& d, int guard = cube_guard());
// Coordinates of a chain in the basis of cube_complex at degree `deg`.
BitVector chain_vector(const Diagram& d, const CubeIndex& idx, const Chain& v, int deg);

// Number of arc colourings for which the idempotent summand is
// one-dimensional: the structured count of the homology dimension, usable
// beyond the cube guard.
std::uint64_t surviving_colourings(const Diagram& d);

}  // namespace cbn

#endif
