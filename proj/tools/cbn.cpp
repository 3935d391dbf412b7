#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cbn/barnatan.hpp"
#include "cbn/census.hpp"
#include "cbn/coloured.hpp"
#include "cbn/report.hpp"
#include "cbn/verify.hpp"
#include "json.hpp"

using namespace cbn;

namespace {

enum Exit { kOk = 0, kFailed = 1, kInput = 2, kGuard = 3 };

struct Source {
    std::string census, file;
    std::vector<int> colours;
};

void add_source(CLI::App* app, Source& s) {
    auto* c = app->add_option("--census", s.census, "built-in diagram name");
    auto* f = app->add_option("--file", s.file, "diagram file");
    c->excludes(f);
    app->add_option("--colours", s.colours, "colour per component, e.g. 2,1")->delimiter(',');
}

Diagram load(const Source& s) {
    if (!s.census.empty()) return census_diagram(s.census);
    if (s.file.empty()) throw std::invalid_argument("give --census or --file");
    std::ifstream in(s.file);
    if (!in) throw std::invalid_argument("cannot read " + s.file);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_diagram(buf.str());
}

std::vector<int> colours_for(const Source& s, const Diagram& d) {
    if (s.colours.empty()) return std::vector<int>(d.component_count(), 1);
    if (static_cast<int>(s.colours.size()) != d.component_count())
        throw std::invalid_argument("--colours: diagram has " + std::to_string(d.component_count()) +
                                    " components, got " + std::to_string(s.colours.size()) + " colours");
    return s.colours;
}

int cmd_compute(const Source& src, const std::string& mode, const std::string& format, int guard) {
    Diagram d = load(src);
    std::vector<int> colours = colours_for(src, d);
    std::vector<HomologyTable> tables;
    if (mode == "model" || mode == "both") tables.push_back(coloured_homology(build_model_complex(linking_data(d), colours)));
    if (mode == "chain" || mode == "both") {
        ColouredComplex c = build_chain_complex(d, colours, std::nullopt, false, guard);
        c.check();
        tables.push_back(coloured_homology(c));
    }
    bool agree = tables.size() < 2 || tables[0].dims == tables[1].dims;
    if (format == "json") {
        if (tables.size() == 1) {
            std::cout << tables[0].json() << "\n";
        } else {
            nlohmann::json j;
            j["model"] = nlohmann::json::parse(tables[0].json());
            j["chain"] = nlohmann::json::parse(tables[1].json());
            j["agree"] = agree;
            std::cout << j.dump() << "\n";
        }
    } else {
        for (const HomologyTable& t : tables) {
            std::cout << mode_name(t.mode) << " colours";
            for (int c : t.colours) std::cout << " " << c;
            std::cout << "\n" << t.table();
        }
        if (tables.size() == 2) std::cout << (agree ? "model and chain agree\n" : "model and chain DISAGREE\n");
    }
    return agree ? kOk : kFailed;
}

int cmd_bn(const Source& src, const std::string& format) {
    Diagram d = load(src);
    Diagram cab = cable(d, colours_for(src, d)).first;
    std::cout << (format == "json" ? bn_json(cab) + "\n" : bn_table(cab));
    return kOk;
}

int cmd_verify(std::vector<std::string> suites, const VerifyOptions& opt) {
    if (suites.size() == 1 && suites[0] == "all") suites = suite_names();
    bool failed = false, guarded = false;
    for (const std::string& s : suites) {
        SuiteReport r = run_suite(s, opt);
        std::cout << r.str();
        failed = failed || r.count(Outcome::Fail);
        // nothing ran because of the guard
        guarded = guarded || (!r.count(Outcome::Pass) && r.count(Outcome::Skipped));
    }
    return failed ? kFailed : guarded ? kGuard : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coloured Bar-Natan homology over F2"};
    app.require_subcommand(1);
    int guard = -1;
    app.add_option("--guard", guard, "crossing limit for cube and chain computations (default CBN_CUBE_GUARD or 26)");

    Source csrc;
    std::string mode = "model", format = "table";
    auto* compute = app.add_subcommand("compute", "coloured homology table");
    add_source(compute, csrc);
    compute->add_option("--mode", mode)->check(CLI::IsMember({"model", "chain", "both"}));
    compute->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));

    Source bsrc;
    std::string bformat = "table";
    auto* bn = app.add_subcommand("bn", "Bar-Natan homology of a diagram or of its cable");
    add_source(bn, bsrc);
    bn->add_option("--format", bformat)->check(CLI::IsMember({"table", "json"}));

    std::vector<std::string> suites;
    std::string vcensus;
    std::vector<int> vcolours;
    int max_colour = -1;
    auto* verify = app.add_subcommand("verify", "run verification suites");
    std::vector<std::string> choices = suite_names();
    choices.push_back("all");
    verify->add_option("--suite", suites, "suite name, repeatable, or all")->required()->check(CLI::IsMember(choices));
    verify->add_option("--census", vcensus, "restrict to one built-in diagram");
    verify->add_option("--colours", vcolours, "restrict to one colouring")->delimiter(',');
    verify->add_option("--max-colour", max_colour, "largest colour tried");

    app.add_subcommand("census", "list built-in diagrams");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kInput;
    }

    try {
        if (*compute) return cmd_compute(csrc, mode, format, guard);
        if (*bn) return cmd_bn(bsrc, bformat);
        if (*verify) {
            VerifyOptions opt;
            if (!vcensus.empty()) opt.census = vcensus;
            if (!vcolours.empty()) opt.colours = vcolours;
            opt.max_colour = max_colour;
            opt.guard = guard;
            return cmd_verify(suites, opt);
        }
        std::cout << census_listing();
        return kOk;
    } catch (const SizeGuardError& e) {
        std::cerr << "guard: " << e.what() << "\n";
        return kGuard;
    } catch (const DiagramError& e) {
        std::cerr << "input: " << e.what() << "\n";
        return kInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
}
