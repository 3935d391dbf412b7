// Text and JSON emission of Bar-Natan homology.

#ifndef CBN_REPORT_HPP
#define CBN_REPORT_HPP

#include <string>

#include "cbn/diagram.hpp"

namespace cbn {

// {"degrees": {"<i>": dim}, "total": N, "canonical_classes": [{"E": [...], "degree": i}]}
// with E the reversed components, 1-based.
std::string bn_json(const Diagram& d);
std::string bn_table(const Diagram& d);

}  // namespace cbn

#endif
