#include "cbn/report.hpp"

#include <sstream>

#include "cbn/barnatan.hpp"
#include "json.hpp"

namespace cbn {

std::string bn_json(const Diagram& d) {
    BNHomology h(d);
    nlohmann::json j;
    j["degrees"] = nlohmann::json::object();
    for (auto [deg, n] : h.degrees()) j["degrees"][std::to_string(deg)] = n;
    j["total"] = h.dimension();
    j["canonical_classes"] = nlohmann::json::array();
    for (const auto& c : h.classes()) {
        std::vector<int> E;
        for (int k : reversal_set(c.theta)) E.push_back(k + 1);
        j["canonical_classes"].push_back({{"E", E}, {"degree", c.degree}});
    }
    return j.dump();
}

std::string bn_table(const Diagram& d) {
    BNHomology h(d);
    std::ostringstream os;
    os << "   i  dim\n";
    for (auto [deg, n] : h.degrees()) {
        os.width(4);
        os << deg << "  ";
        os.width(3);
        os << n << "\n";
    }
    os << "total " << h.dimension() << "\n";
    return os.str();
}

}  // namespace cbn
