// Chain maps of elementary cobordisms (saddle, birth, death) and of
// Reidemeister II moves, composed into the annulus movie that contracts two
// adjacent cable strands.

#ifndef CBN_COBORDISM_HPP
#define CBN_COBORDISM_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cbn/barnatan.hpp"
#include "cbn/diagram.hpp"
#include "cbn/f2linalg.hpp"

namespace cbn {

struct MovieStep {
    enum class Kind { Saddle, R2Removal, R2Insertion, Death, Birth };
    Kind kind = Kind::Saddle;

    // Saddle: fused arcs in the source frame and their images in the target
    // (image_b == image_a when two crossing-free loops merge into one).
    int arc_a = -1, arc_b = -1, image_a = -1, image_b = -1;

    // R2: crossings of the bigon in the larger frame. `u` is the crossing
    // whose turn-back smoothing is 1, `w` the one whose turn-back is 0.
    int u = -1, w = -1;
    std::array<int, 2> bigon{-1, -1};

    // Death and birth: the loop arc in the larger frame.
    int loop = -1;

    // Larger frame -> smaller frame (saddle: source -> target). Arcs not
    // represented map to -1.
    std::vector<int> arc_image;
    // Smaller frame crossing -> larger frame crossing.
    std::vector<int> crossing_origin;
};

struct Movie {
    // steps[k] runs from frames[k] to frames[k + 1]
    std::vector<Diagram> frames;
    std::vector<MovieStep> steps;

    std::string describe() const;
};

// Elementary moves -------------------------------------------------------------

// Fuses the antiparallel arcs a and b: a keeps its tail and takes b's head,
// b keeps its tail and takes a's head.
MovieStep saddle_step(const Diagram& d, int a, int b, Diagram& out);
// A bigon face with both crossings, left of `via_dart` if given; throws
// unless it is a Reidemeister II configuration.
MovieStep r2_removal_step(const Diagram& d, int x, int y, Diagram& out, int via_dart = -1);
// Bigon crossings on either side of `arc`, or {-1, -1}.
std::array<int, 2> bigon_at(const Diagram& d, int arc);
MovieStep death_step(const Diagram& d, int loop_arc, Diagram& out);
// Adds a crossing-free unknotted component.
MovieStep birth_step(const Diagram& d, Diagram& out);

// The step run backwards: saddles stay saddles, R2 removals become
// insertions, deaths become births.
MovieStep reverse_step(const MovieStep& s);
Movie reverse_movie(const Movie& m);

// Chain-level maps ---------------------------------------------------------

class MovieMap {
public:
    explicit MovieMap(Movie m);
    MovieMap(const MovieMap&) = delete;
    MovieMap& operator=(const MovieMap&) = delete;

    const Movie& movie() const { return movie_; }
    Chain apply(const Chain& v) const;
    Chain apply_step(std::size_t k, const Chain& v) const;

private:
    Movie movie_;
    std::vector<std::unique_ptr<ResolutionCache>> caches_;
};

// Dense matrices of a chain-level map between the full cubes of `src` and
// `dst` (small diagrams only).
ComplexMap materialize(const Diagram& src, const Diagram& dst,
                       const std::function<Chain(const Chain&)>& f, int guard = cube_guard());

// Annulus cobordism ----------------------------------------------------------

// Saddle at the base points of strands l and l+1 of `component`, R2 removals
// sliding the turn-back along the doubled strand, death of the final loop.
// The turn-back on strand l's tail side slides unless `other_tip`.
Movie annulus_movie(const Diagram& cabled, const CableMap& cm, int component, int l,
                    bool other_tip = false);

// The annulus map between fresh cables of `base`: from colours n to colours
// n with n[component] lowered by 2, or the reverse direction.
class AnnulusMap {
public:
    AnnulusMap(const Diagram& base, std::span<const int> colours, int component, int l,
               bool reversed = false, bool other_tip = false);
    AnnulusMap(const AnnulusMap&) = delete;
    AnnulusMap& operator=(const AnnulusMap&) = delete;

    const Diagram& source() const { return reversed_ ? small_ : large_; }
    const Diagram& target() const { return reversed_ ? large_ : small_; }
    const CableMap& large_map() const { return large_map_; }
    const CableMap& small_map() const { return small_map_; }
    const Movie& movie() const { return map_->movie(); }

    Chain apply(const Chain& v) const;

private:
    Chain final_to_small(const Chain& v) const;
    Chain small_to_final(const Chain& v) const;

    bool reversed_;
    Diagram large_, small_;
    CableMap large_map_, small_map_;
    std::unique_ptr<MovieMap> map_;  // always the forward movie, run either way
    std::unique_ptr<MovieMap> back_;
    // last frame of the forward movie -> small cable
    std::vector<int> crossing_to_small, arc_to_small;
    std::unique_ptr<ResolutionCache> final_cache_, small_cache_;
};

// Matrix of the induced map on canonical bases, column k the image of class k.
F2Matrix induced_on_canonical(const AnnulusMap& m, const BNHomology& src, const BNHomology& dst);

}  // namespace cbn

#endif
