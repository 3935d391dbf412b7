// Built-in diagrams.

#ifndef CBN_CENSUS_HPP
#define CBN_CENSUS_HPP

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "cbn/diagram.hpp"

namespace cbn {

std::vector<std::string> census_names();

// Throws DiagramError for an unknown name.
Diagram census_diagram(std::string_view name);

// One line per entry: name, component count, writhe or linking numbers.
std::string census_listing();

// Knot from a PD code with arcs numbered consecutively along the
// orientation; each record lists the incoming under arc first and then the
// others counter-clockwise. The face with the most sides becomes unbounded.
Diagram knot_from_pd(const std::vector<std::array<int, 4>>& pd);

// Makes the face left of `outer_dart` unbounded; single-piece diagrams only.
void embed_with_outer_face(Diagram& d, int outer_dart);

}  // namespace cbn

#endif
