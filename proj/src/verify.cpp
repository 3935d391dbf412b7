#include "cbn/verify.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cbn/barnatan.hpp"
#include "cbn/census.hpp"
#include "cbn/cobordism.hpp"
#include "cbn/coloured.hpp"

namespace cbn {

namespace {

// Cables up to this many crossings get the full cube; larger ones within
// the guard use the idempotent colouring count.
constexpr int kCubeRoute = 18;

using Table = std::map<std::pair<int, int>, std::size_t>;

struct Verdict {
    bool ok = true;
    std::string detail;
};

class Runner {
public:
    explicit Runner(std::string suite) { rep_.suite = std::move(suite); }

    void run(std::string instance, const std::function<Verdict()>& f) {
        InstanceResult r;
        r.instance = std::move(instance);
        try {
            Verdict v = f();
            r.outcome = v.ok ? Outcome::Pass : Outcome::Fail;
            r.detail = std::move(v.detail);
        } catch (const SizeGuardError& e) {
            r.outcome = Outcome::Skipped;
            r.detail = std::string("skipped (guard): ") + e.what();
        } catch (const std::exception& e) {
            r.outcome = Outcome::Fail;
            r.detail = std::string("error: ") + e.what();
        }
        rep_.results.push_back(std::move(r));
    }

    SuiteReport take() { return std::move(rep_); }

private:
    SuiteReport rep_;
};

std::string show(const std::vector<int>& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
    return s + "]";
}

std::string show(const Table& t) {
    std::string s = "{";
    bool first = true;
    for (const auto& [k, v] : t) {
        s += (first ? "" : ", ") + std::string("(") + std::to_string(k.first) + "," + std::to_string(k.second) +
             "):" + std::to_string(v);
        first = false;
    }
    return s + "}";
}

int guard_of(const VerifyOptions& opt) { return opt.guard < 0 ? cube_guard() : opt.guard; }
int max_colour(const VerifyOptions& opt, int fallback) { return opt.max_colour < 0 ? fallback : opt.max_colour; }

std::vector<std::string> pick(const VerifyOptions& opt, std::vector<std::string> defaults) {
    if (!opt.census) return defaults;
    census_diagram(*opt.census);  // throws for unknown names
    return {*opt.census};
}

std::vector<std::string> census_with(int components) {
    std::vector<std::string> out;
    for (const std::string& n : census_names())
        if (census_diagram(n).component_count() == components) out.push_back(n);
    return out;
}

// Uniform entries lo..hi for every component, or the requested colouring.
std::vector<std::vector<int>> colourings(const VerifyOptions& opt, int components, int lo, int hi) {
    if (opt.colours) {
        if (static_cast<int>(opt.colours->size()) != components)
            throw std::invalid_argument("colours: expected " + std::to_string(components) + " entries");
        return {*opt.colours};
    }
    std::vector<std::vector<int>> out{{}};
    for (int c = 0; c < components; ++c) {
        std::vector<std::vector<int>> next;
        for (const auto& v : out)
            for (int n = lo; n <= hi; ++n) {
                auto w = v;
                w.push_back(n);
                next.push_back(std::move(w));
            }
        out.swap(next);
    }
    return out;
}

std::uint64_t pow2(int e) { return std::uint64_t{1} << e; }

Table knot_prediction(int n, int f) {
    Table t;
    if (n % 2 == 0) {
        t[{0, 0}] += 1;
        for (int k = 1; k <= n / 2; ++k) t[{0, -2 * k * k * f}] += 2;
    } else {
        for (int k = 0; k <= (n - 1) / 2; ++k) t[{0, -2 * k * (k + 1) * f}] += 2;
    }
    return t;
}

Table generator_table(const std::vector<Generator>& gens) {
    Table t;
    for (const Generator& g : gens) t[{0, g.degree}] += 1;
    return t;
}

LinkingData knot_lk(int f) { return LinkingData{{{f}}}; }

// ker d0 equals the span of orbit sums.
Verdict check_orbit_kernel(const ColouredComplex& c) {
    auto orbits = symmetric_basis(c.lk, c.colours);
    F2Matrix d0 = c.differential(0);
    std::vector<BitVector> vs;
    for (const OrbitSum& o : orbits) {
        if (d0.apply(o.vector).any()) return {false, "an orbit sum is not in ker d0"};
        vs.push_back(o.vector);
    }
    std::size_t dim = c.vertices.empty() ? 0 : c.degrees_at(0).size();
    std::size_t span = vs.empty() ? 0 : rank(F2Matrix::from_columns(dim, vs));
    std::size_t ker = dim - rank(d0);
    if (span != vs.size() || ker != span)
        return {false, "dim ker d0 = " + std::to_string(ker) + ", orbit span = " + std::to_string(span)};
    return {true, std::to_string(orbits.size()) + " orbit sums span ker d0"};
}

// Suites -----------------------------------------------------------------------

SuiteReport suite_bn_totals(const VerifyOptions& opt) {
    Runner r("thm2.1");
    const int guard = guard_of(opt);
    for (const std::string& name : pick(opt, census_names())) {
        Diagram d = census_diagram(name);
        for (const auto& col : colourings(opt, d.component_count(), 1, max_colour(opt, 4))) {
            Diagram cab = cable(d, col).first;
            r.run(name + " " + show(col), [&]() -> Verdict {
                const int X = cab.crossing_count();
                if (X > guard)
                    throw SizeGuardError(std::to_string(X) + " crossings, guard " + std::to_string(guard));
                std::uint64_t expect = pow2(cab.component_count()), total = 0;
                std::string route;
                if (X <= kCubeRoute) {
                    for (auto [k, v] : cube_homology_dims(cab, CubeBasis::Idempotent, guard)) total += v;
                    route = "cube";
                    if (X <= 12) {
                        std::uint64_t std_total = 0;
                        for (auto [k, v] : cube_homology_dims(cab, CubeBasis::Standard, guard)) std_total += v;
                        if (std_total != total) return {false, "standard and idempotent bases disagree"};
                        route = "cube, both bases";
                    }
                } else {
                    total = surviving_colourings(cab);
                    route = "idempotent count";
                }
                return {total == expect, std::to_string(X) + " crossings, total " + std::to_string(total) +
                                             ", expected " + std::to_string(expect) + " (" + route + ")"};
            });
        }
    }
    return r.take();
}

SuiteReport suite_canonical(const VerifyOptions& opt) {
    Runner r("canonical");
    const int guard = guard_of(opt);
    for (const std::string& name : pick(opt, census_names())) {
        Diagram d = census_diagram(name);
        for (const auto& col : colourings(opt, d.component_count(), 1, max_colour(opt, 4))) {
            Diagram cab = cable(d, col).first;
            r.run(name + " " + show(col), [&]() -> Verdict {
                const int X = cab.crossing_count();
                if (X > guard)
                    throw SizeGuardError(std::to_string(X) + " crossings, guard " + std::to_string(guard));
                ResolutionCache rc(cab);
                LinkingData lk = linking_data(cab);
                const int k = cab.component_count();
                for (std::uint64_t m = 0; m < pow2(k); ++m) {
                    Orientation th = orientation_from_mask(k, m);
                    if (!differential(rc, canonical_cycle(cab, th)).empty())
                        return {false, "d(s) != 0 for mask " + std::to_string(m)};
                    int got = homological_degree(cab, canonical_smoothing(cab, th));
                    int want = canonical_degree(reversal_set(th), lk);
                    if (got != want)
                        return {false, "mask " + std::to_string(m) + ": degree " + std::to_string(got) +
                                           ", formula " + std::to_string(want)};
                }
                return {true, std::to_string(pow2(k)) + " orientations"};
            });
        }
    }
    return r.take();
}

SuiteReport suite_annulus(const VerifyOptions& opt) {
    Runner r("lem3.1");
    const int guard = guard_of(opt);
    for (const std::string& name : pick(opt, {"kink+1", "kink-1", "trefoil+", "trefoil-", "figure8"})) {
        Diagram d = census_diagram(name);
        const int mc = max_colour(opt, 2);
        for (const auto& col : colourings(opt, d.component_count(), 2, std::max(2, mc))) {
            std::vector<int> offset;
            int strands = 0;
            for (int n : col) {
                offset.push_back(strands);
                strands += n;
            }
            for (int comp = 0; comp < static_cast<int>(col.size()); ++comp)
                for (int l = 1; l < col[comp]; ++l)
                    r.run(name + " " + show(col) + " component " + std::to_string(comp + 1) + " l=" + std::to_string(l),
                          [&]() -> Verdict {
                              const int X = cable(d, col).first.crossing_count();
                              if (X > guard)
                                  throw SizeGuardError(std::to_string(X) + " crossings, guard " + std::to_string(guard));
                              AnnulusMap am(d, col, comp, l);
                              BNHomology src(am.source()), dst(am.target());
                              F2Matrix M = induced_on_canonical(am, src, dst);
                              const int b = offset[comp] + l - 1;
                              for (std::uint64_t m = 0; m < src.dimension(); ++m) {
                                  BitVector want(dst.dimension());
                                  if (((m >> b) & 1) == ((m >> (b + 1)) & 1)) {
                                      std::uint64_t low = m & (pow2(b) - 1);
                                      want.set(low | ((m >> (b + 2)) << b));
                                  }
                                  if (M.column(m) != want)
                                      return {false, "class " + std::to_string(m) + " maps to " + M.column(m).str()};
                                  std::uint64_t swapped = m;
                                  if (((m >> b) & 1) != ((m >> (b + 1)) & 1)) swapped ^= pow2(b) | pow2(b + 1);
                                  if (M.column(m) != M.column(swapped))
                                      return {false, "switching the strands changes the image of class " +
                                                         std::to_string(m)};
                              }
                              return {true, std::to_string(src.dimension()) + " canonical classes checked"};
                          });
        }
    }
    return r.take();
}

SuiteReport suite_model_chain(const VerifyOptions& opt) {
    Runner r("model-chain");
    const int guard = guard_of(opt);
    std::vector<std::pair<std::string, std::vector<int>>> cases;
    if (opt.census) {
        Diagram d = census_diagram(*opt.census);
        int hi = max_colour(opt, d.component_count() == 1 ? 4 : 2);
        for (const auto& col : colourings(opt, d.component_count(), 1, hi)) cases.push_back({*opt.census, col});
    } else {
        for (const char* name : {"unknot", "kink+1", "kink-1", "kink+2", "kink-2"})
            for (int n = 1; n <= max_colour(opt, 4); ++n) cases.push_back({name, {n}});
        cases.push_back({"trefoil+", {2}});
        cases.push_back({"trefoil-", {2}});
    }
    for (const auto& [name, col] : cases)
        r.run(name + " " + show(col), [&, name = name, col = col]() -> Verdict {
            Diagram d = census_diagram(name);
            ColouredComplex chain = build_chain_complex(d, col, std::nullopt, false, guard);
            chain.check();
            ColouredComplex model = build_model_complex(linking_data(d), col);
            Table a = coloured_homology(chain).dims, b = coloured_homology(model).dims;
            if (a != b) return {false, "chain " + show(a) + ", model " + show(b)};
            std::size_t same = 0;
            for (std::size_t e = 0; e < chain.edges.size(); ++e) same += chain.edges[e].map == model.edges[e].map;
            return {true, show(a) + ", " + std::to_string(same) + "/" + std::to_string(chain.edges.size()) +
                              " edge matrices identical"};
        });
    return r.take();
}

SuiteReport suite_knots(const VerifyOptions& opt, const std::string& id, bool totals) {
    Runner r(id);
    for (const std::string& name : pick(opt, census_with(1))) {
        Diagram d = census_diagram(name);
        if (d.component_count() != 1) throw std::invalid_argument(id + ": " + name + " is not a knot");
        LinkingData lk = linking_data(d);
        for (const auto& col : colourings(opt, 1, 1, max_colour(opt, 10)))
            r.run(name + " n=" + std::to_string(col[0]), [&]() -> Verdict {
                ColouredComplex c = build_model_complex(lk, col);
                c.check();
                Verdict v = check_orbit_kernel(c);
                if (!totals || !v.ok) return v;
                HomologyTable t = coloured_homology(c);
                std::size_t n = col[0];
                if (t.total() != n + 1 || t.total_at(0) != t.total())
                    return {false, "table " + show(t.dims)};
                return {true, "total " + std::to_string(t.total()) + " in i=0; " + v.detail};
            });
    }
    return r.take();
}

SuiteReport suite_grading(const VerifyOptions& opt) {
    Runner r("thm3.8");
    std::vector<std::pair<std::string, int>> framings;
    if (opt.census) {
        Diagram d = census_diagram(*opt.census);
        if (d.component_count() != 1) throw std::invalid_argument("thm3.8: " + *opt.census + " is not a knot");
        framings.push_back({*opt.census, linking_data(d)(0, 0)});
    } else {
        for (int f = -3; f <= 3; ++f) framings.push_back({"f=" + std::to_string(f), f});
    }
    for (const auto& [label, f] : framings)
        for (const auto& col : colourings(opt, 1, 1, max_colour(opt, 10)))
            r.run(label + " n=" + std::to_string(col[0]), [&, f = f]() -> Verdict {
                Table got = coloured_homology(build_model_complex(knot_lk(f), col)).dims;
                Table want = knot_prediction(col[0], f);
                return {got == want, show(got) + (got == want ? "" : ", predicted " + show(want))};
            });
    return r.take();
}

std::vector<std::pair<std::string, int>> knot_framings(const VerifyOptions& opt) {
    std::vector<std::pair<std::string, int>> out;
    if (opt.census) {
        Diagram d = census_diagram(*opt.census);
        if (d.component_count() != 1) throw std::invalid_argument(*opt.census + " is not a knot");
        out.push_back({*opt.census, linking_data(d)(0, 0)});
    } else {
        for (int f = -2; f <= 2; ++f) out.push_back({"f=" + std::to_string(f), f});
    }
    return out;
}

SuiteReport suite_interpolating_knots(const VerifyOptions& opt, const std::string& id) {
    Runner r(id);
    const bool vanishing = id != "lem3.4";
    for (const auto& [label, f] : knot_framings(opt))
        for (const auto& col : colourings(opt, 1, 0, max_colour(opt, 8))) {
            const int n = col[0];
            for (int m = 0; m <= n; ++m)
                r.run(label + " n=" + std::to_string(n) + " m=" + std::to_string(m), [&, f = f]() -> Verdict {
                    LinkingData lk = knot_lk(f);
                    HomologyTable t = interpolating_homology(lk, {n}, {m});
                    if (!vanishing) {
                        std::size_t want = pow2(n - m) * (m + 1);
                        return {t.total_at(0) == want,
                                "dim H0 = " + std::to_string(t.total_at(0)) + ", expected " + std::to_string(want)};
                    }
                    if (t.total() != t.total_at(0)) return {false, "higher homology " + show(t.dims)};
                    if (m >= 1 && m < n && n >= 2) {
                        long a = static_cast<long>(interpolating_homology(lk, {n}, {m + 1}).total_at(0));
                        long b = static_cast<long>(t.total_at(0));
                        long c = static_cast<long>(interpolating_homology(lk, {n - 2}, {m - 1}).total_at(0));
                        if (a - b + c != 0) return {false, "exact sequence dimensions do not cancel"};
                        return {true, "H^i = 0 for i >= 1; exact sequence balances"};
                    }
                    return {true, "H^i = 0 for i >= 1"};
                });
        }
    return r.take();
}

SuiteReport suite_interpolating_links(const VerifyOptions& opt) {
    Runner r("lem4.1");
    for (const std::string& name : pick(opt, census_with(2))) {
        Diagram d = census_diagram(name);
        LinkingData lk = linking_data(d);
        const int k = d.component_count();
        for (const auto& col : colourings(opt, k, 1, max_colour(opt, 4)))
            r.run(name + " " + show(col), [&]() -> Verdict {
                std::size_t count = 0;
                std::vector<int> m(k, 0);
                while (true) {
                    HomologyTable t = interpolating_homology(lk, col, m);
                    std::size_t want = 1;
                    for (int j = 0; j < k; ++j) want *= pow2(col[j] - m[j]) * (m[j] + 1);
                    if (t.total_at(0) != want)
                        return {false, "m=" + show(m) + ": dim H0 = " + std::to_string(t.total_at(0)) + ", expected " +
                                           std::to_string(want)};
                    if (t.total() != want) return {false, "m=" + show(m) + ": higher homology " + show(t.dims)};
                    ++count;
                    int j = 0;
                    while (j < k && ++m[j] > col[j]) m[j++] = 0;
                    if (j == k) break;
                }
                return {true, std::to_string(count) + " dot vectors m"};
            });
    }
    return r.take();
}

// Hopf links of both signs with framings from {-1, 0, 1}, or the chosen
// diagram with its own framing.
std::vector<std::pair<std::string, LinkingData>> link_data(const VerifyOptions& opt) {
    std::vector<std::pair<std::string, LinkingData>> out;
    if (opt.census) {
        out.push_back({*opt.census, linking_data(census_diagram(*opt.census))});
        return out;
    }
    for (const char* name : {"hopf+", "hopf-"}) {
        LinkingData base = linking_data(census_diagram(name));
        for (int f1 = -1; f1 <= 1; ++f1)
            for (int f2 = -1; f2 <= 1; ++f2) {
                LinkingData lk = base;
                lk.lk[0][0] = f1;
                lk.lk[1][1] = f2;
                out.push_back({std::string(name) + " f=(" + std::to_string(f1) + "," + std::to_string(f2) + ")", lk});
            }
    }
    return out;
}

SuiteReport suite_links(const VerifyOptions& opt, const std::string& id) {
    Runner r(id);
    const bool gradings = id == "thm4.5";
    for (const auto& [label, lk] : link_data(opt))
        for (const auto& col : colourings(opt, lk.size(), 1, max_colour(opt, 4)))
            r.run(label + " " + show(col), [&, lk = lk]() -> Verdict {
                HomologyTable t = coloured_homology(build_model_complex(lk, col));
                if (gradings) {
                    Table want = generator_table(admissible_collections(lk, col));
                    return {t.dims == want, show(t.dims) + (t.dims == want ? "" : ", admissible " + show(want))};
                }
                std::size_t want = 1;
                for (int n : col) want *= n + 1;
                bool ok = t.total() == want && t.total_at(0) == want;
                return {ok, "total " + std::to_string(t.total()) + ", expected " + std::to_string(want) + " in i=0"};
            });
    if (gradings && !opt.census)
        for (const char* name : {"hopf+", "hopf-"})
            r.run(std::string(name) + " [1,1] against cube homology degrees", [&]() -> Verdict {
                Diagram d = census_diagram(name);
                Table bn;
                for (auto [j, n] : cube_homology_dims(d, CubeBasis::Standard)) bn[{0, j}] = n;
                Table want = generator_table(admissible_collections(linking_data(d), {1, 1}));
                return {bn == want, show(bn)};
            });
    return r.take();
}

SuiteReport suite_reversed(const VerifyOptions& opt) {
    Runner r("thm5.2");
    const int guard = guard_of(opt);
    for (const std::string& name : pick(opt, {"unknot", "kink+1"})) {
        Diagram d = census_diagram(name);
        for (const auto& col : colourings(opt, d.component_count(), 1, max_colour(opt, 3)))
            r.run(name + " " + show(col), [&]() -> Verdict {
                ColouredComplex fwd = build_chain_complex(d, col, std::nullopt, false, guard);
                ColouredComplex rev = build_chain_complex(d, col, std::nullopt, true, guard);
                fwd.check();
                rev.check();
                Table a = coloured_homology(fwd).dims, b = reversed_homology(rev);
                if (a != b) return {false, "forward " + show(a) + ", reversed " + show(b)};
                for (int i = 1; i <= fwd.max_pairs(); ++i)
                    if (rank(rev.differential(i)) != rank(fwd.differential(i - 1)))
                        return {false, "rank of the reversed differential differs at i=" + std::to_string(i)};
                return {true, show(a) + "; ranks match"};
            });
    }
    return r.take();
}

SuiteReport suite_invariance(const VerifyOptions& opt) {
    Runner r("invariance");
    std::vector<std::pair<std::string, std::string>> pairs{{"kink+1", "kink+1-r2"}, {"unknot", "unknot-r2"}};
    if (opt.census)
        std::erase_if(pairs, [&](const auto& p) { return p.first != *opt.census && p.second != *opt.census; });
    for (const auto& [a, b] : pairs)
        for (const auto& col : colourings(opt, 1, 1, max_colour(opt, 6)))
            r.run(a + " vs " + b + " n=" + std::to_string(col[0]), [&, a = a, b = b]() -> Verdict {
                Diagram x = census_diagram(a), y = census_diagram(b);
                if (isomorphic(x, y)) return {false, "the diagrams coincide"};
                ColouredComplex cx = build_model_complex(linking_data(x), col);
                ColouredComplex cy = build_model_complex(linking_data(y), col);
                Table tx = coloured_homology(cx).dims, ty = coloured_homology(cy).dims;
                if (tx != ty) return {false, show(tx) + " vs " + show(ty)};
                for (int i = 0; i <= cx.max_pairs(); ++i)
                    if (cx.differential(i) != cy.differential(i)) return {false, "differentials differ"};
                return {true, std::to_string(x.crossing_count()) + " vs " + std::to_string(y.crossing_count()) +
                                  " crossings, " + show(tx)};
            });
    return r.take();
}

}  // namespace

std::size_t SuiteReport::count(Outcome o) const {
    return std::count_if(results.begin(), results.end(), [&](const InstanceResult& r) { return r.outcome == o; });
}

bool SuiteReport::passed() const { return count(Outcome::Fail) == 0 && count(Outcome::Pass) > 0; }

std::string SuiteReport::summary() const {
    std::ostringstream os;
    os << suite << ": " << (passed() ? "PASS" : "FAIL") << " (" << count(Outcome::Pass) << " passed, "
       << count(Outcome::Fail) << " failed, " << count(Outcome::Skipped) << " skipped (guard))";
    return os.str();
}

std::string SuiteReport::str() const {
    std::ostringstream os;
    for (const InstanceResult& r : results) {
        const char* tag = r.outcome == Outcome::Pass ? "pass" : r.outcome == Outcome::Fail ? "FAIL" : "skipped (guard)";
        os << "  " << r.instance << ": " << tag;
        if (!r.detail.empty() && r.outcome != Outcome::Skipped) os << " - " << r.detail;
        if (r.outcome == Outcome::Skipped) os << " - " << r.detail.substr(r.detail.find(':') + 2);
        os << "\n";
    }
    os << summary() << "\n";
    return os.str();
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"thm2.1",  "canonical", "lem3.1", "prop3.3",     "lem3.4",
                                                "prop3.5-3.6", "thm3.7", "thm3.8", "lem4.1",     "thm4.4",
                                                "thm4.5",  "thm5.2",    "model-chain", "invariance"};
    return names;
}

SuiteReport run_suite(std::string_view name, const VerifyOptions& opt) {
    std::string id(name);
    if (id == "thm2.1") return suite_bn_totals(opt);
    if (id == "canonical") return suite_canonical(opt);
    if (id == "lem3.1") return suite_annulus(opt);
    if (id == "prop3.3") return suite_knots(opt, id, false);
    if (id == "thm3.7") return suite_knots(opt, id, true);
    if (id == "thm3.8") return suite_grading(opt);
    if (id == "lem3.4" || id == "prop3.5-3.6") return suite_interpolating_knots(opt, id);
    if (id == "lem4.1") return suite_interpolating_links(opt);
    if (id == "thm4.4" || id == "thm4.5") return suite_links(opt, id);
    if (id == "thm5.2") return suite_reversed(opt);
    if (id == "model-chain") return suite_model_chain(opt);
    if (id == "invariance") return suite_invariance(opt);
    throw std::invalid_argument("unknown suite '" + id + "'");
}

}  // namespace cbn
