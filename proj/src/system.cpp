#include "carter/system.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "carter/linalg.hpp"

using ordered_json = nlohmann::ordered_json;

namespace carter {

std::vector<std::string> Chart::symbols() const {
    std::vector<std::string> out = coords;
    out.insert(out.end(), momenta.begin(), momenta.end());
    return out;
}

bool Chart::is_identity() const {
    if (to_cartesian.size() != coords.size()) return false;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (to_cartesian[i].kind() != ExprKind::Symbol ||
            to_cartesian[i].name() != coords[i])
            return false;
    }
    return true;
}

Environment Chart::coord_env(const std::vector<double>& q, const Environment& params) const {
    Environment env = params;
    for (std::size_t i = 0; i < coords.size(); ++i) env[coords[i]] = q[i];
    return env;
}

Environment Chart::state_env(const PhaseState& s, const Environment& params) const {
    Environment env = coord_env(s.q, params);
    for (std::size_t i = 0; i < momenta.size(); ++i) env[momenta[i]] = s.p[i];
    return env;
}

bool Chart::admissible(const std::vector<double>& q, const Environment& params,
                       double margin) const {
    Environment env = coord_env(q, params);
    for (const Expr& c : domain) {
        double v;
        try {
            v = evaluate(c, env);
        } catch (const EvalError&) {
            return false;
        }
        if (!(v > margin)) return false;
    }
    return true;
}

const Chart& SystemDefinition::chart(const std::string& cname) const {
    for (const Chart& c : charts)
        if (c.name == cname) return c;
    throw ModelError("unknown chart '" + cname + "' in system '" + name + "'");
}

const Presentation* SystemDefinition::presentation_in(const std::string& chart_name) const {
    for (const Presentation& p : presentations)
        if (p.chart == chart_name) return &p;
    return nullptr;
}

const Chart* SystemDefinition::reference_chart() const {
    for (const Chart& c : charts)
        if (c.is_identity()) return &c;
    return nullptr;
}

// ---------------------------------------------------------------------------

std::vector<SeparabilityViolation> validate_separability(const SeparableStructure& s,
                                                         const Chart& chart,
                                                         const Environment& params) {
    std::vector<SeparabilityViolation> out;
    auto allowed_everywhere = [&](const std::string& sym) {
        if (params.count(sym)) return true;
        return s.folds.count(sym) > 0;
    };
    for (std::size_t i = 0; i < s.pairs.size(); ++i) {
        const SeparablePair& pair = s.pairs[i];
        std::set<std::string> block_coords, block_momenta;
        for (int idx : pair.block) {
            block_coords.insert(chart.coords[static_cast<std::size_t>(idx)]);
            block_momenta.insert(chart.momenta[static_cast<std::size_t>(idx)]);
        }
        for (const std::string& sym : free_vars(pair.potential)) {
            if (!block_coords.count(sym) && !allowed_everywhere(sym))
                out.push_back({static_cast<int>(i), sym, "U"});
        }
        for (const std::string& sym : free_vars(pair.hamiltonian)) {
            if (!block_coords.count(sym) && !block_momenta.count(sym) &&
                !allowed_everywhere(sym))
                out.push_back({static_cast<int>(i), sym, "H"});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// loading

namespace {

Expr parse_field(const std::string& text, const std::string& where) {
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw ModelError(where + ": syntax error at offset " + std::to_string(e.offset()) +
                         ": " + e.what() + " in \"" + text + "\"");
    }
}

const ordered_json& require(const ordered_json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ModelError(where + ": missing field '" + key + "'");
    return *it;
}

void check_blocks(const SeparableStructure& s, int dim, const std::string& where) {
    if (s.pairs.size() < 1) throw ModelError(where + ": empty pair list");
    std::vector<int> seen(static_cast<std::size_t>(dim), 0);
    for (const auto& pair : s.pairs) {
        if (pair.block.empty()) throw ModelError(where + ": pair with empty block");
        for (int idx : pair.block) {
            if (idx < 0 || idx >= dim)
                throw ModelError(where + ": block index out of range");
            seen[static_cast<std::size_t>(idx)]++;
        }
    }
    for (int c : seen)
        if (c != 1) throw ModelError(where + ": blocks do not partition the coordinates");
    if (s.kind == SplitKind::Full) {
        for (const auto& pair : s.pairs)
            if (pair.block.size() != 1)
                throw ModelError(where + ": full split requires singleton blocks");
    } else {
        if (s.pairs.size() != 2)
            throw ModelError(where + ": partial split requires exactly two pairs");
        if (s.pairs[0].block.size() != 1)
            throw ModelError(where + ": partial split's first block must own one coordinate");
    }
}

std::vector<SeparablePair> parse_pairs(const ordered_json& jp, const std::string& where) {
    std::vector<SeparablePair> pairs;
    for (const auto& p : jp) {
        SeparablePair sp;
        sp.potential = parse_field(require(p, "U", where).get<std::string>(), where + ".U");
        sp.hamiltonian = parse_field(require(p, "H", where).get<std::string>(), where + ".H");
        for (const auto& b : require(p, "block", where)) sp.block.push_back(b.get<int>());
        pairs.push_back(std::move(sp));
    }
    return pairs;
}

} // namespace

SystemDefinition load_system_text(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("invalid JSON: ") + e.what());
    }

    SystemDefinition sys;
    sys.name = require(j, "name", "system").get<std::string>();
    for (const auto& [key, val] : require(j, "parameters", sys.name).items())
        sys.parameters[key] = val.get<double>();

    for (const auto& jc : require(j, "charts", sys.name)) {
        Chart c;
        c.name = require(jc, "name", "chart").get<std::string>();
        std::string where = sys.name + ".charts." + c.name;
        for (const auto& s : require(jc, "coords", where)) c.coords.push_back(s.get<std::string>());
        for (const auto& s : require(jc, "momenta", where)) c.momenta.push_back(s.get<std::string>());
        if (c.coords.empty() || c.coords.size() != c.momenta.size())
            throw ModelError(where + ": coords/momenta must be non-empty and equal length");
        if (c.dim() > kMaxDim)
            throw ModelError(where + ": dimension exceeds " + std::to_string(kMaxDim));
        for (const auto& s : require(jc, "to_cartesian", where))
            c.to_cartesian.push_back(parse_field(s.get<std::string>(), where + ".to_cartesian"));
        if (c.to_cartesian.size() != c.coords.size())
            throw ModelError(where + ": to_cartesian must list one expression per coordinate");
        if (jc.contains("domain"))
            for (const auto& s : jc["domain"])
                c.domain.push_back(parse_field(s.get<std::string>(), where + ".domain"));
        if (jc.contains("sample_ranges"))
            for (const auto& [key, val] : jc["sample_ranges"].items())
                c.sample_ranges[key] = {val[0].get<double>(), val[1].get<double>()};

        std::set<std::string> coord_set(c.coords.begin(), c.coords.end());
        for (const Expr& m : c.to_cartesian)
            for (const std::string& sym : free_vars(m))
                if (!coord_set.count(sym))
                    throw ModelError(where + ": forward map uses non-coordinate symbol '" +
                                     sym + "'");
        sys.charts.push_back(std::move(c));
    }
    if (sys.charts.empty()) throw ModelError(sys.name + ": no charts");

    for (const auto& jp : require(j, "presentations", sys.name)) {
        Presentation pres;
        pres.chart = require(jp, "chart", "presentation").get<std::string>();
        const Chart& chart = sys.chart(pres.chart);
        std::string where = sys.name + ".presentations." + pres.chart;
        pres.hamiltonian =
            parse_field(require(jp, "hamiltonian", where).get<std::string>(), where);

        if (jp.contains("separable") && !jp["separable"].is_null()) {
            const auto& js = jp["separable"];
            SeparableStructure s;
            std::string kind = require(js, "kind", where).get<std::string>();
            if (kind == "full") s.kind = SplitKind::Full;
            else if (kind == "partial") s.kind = SplitKind::Partial;
            else throw ModelError(where + ": kind must be \"full\" or \"partial\"");
            s.pairs = parse_pairs(require(js, "pairs", where), where);
            if (js.contains("folds"))
                for (const auto& [key, val] : js["folds"].items())
                    s.folds[key] = parse_field(val.get<std::string>(), where + ".folds");
            if (js.contains("convention_scale"))
                s.convention_scale = js["convention_scale"].get<double>();
            if (js.contains("nested"))
                s.nested = parse_pairs(js["nested"], where + ".nested");
            check_blocks(s, chart.dim(), where);
            auto violations = validate_separability(s, chart, sys.parameters);
            if (!violations.empty()) {
                const auto& v = violations.front();
                throw ModelError(where + ": pair " + std::to_string(v.pair_index) + " " +
                                 v.which + " depends on foreign symbol '" + v.symbol + "'");
            }
            pres.separable = std::move(s);
        }

        std::set<std::string> allowed;
        for (const auto& sym : chart.symbols()) allowed.insert(sym);
        for (const auto& [key, _] : sys.parameters) allowed.insert(key);
        if (pres.separable)
            for (const auto& [key, _] : pres.separable->folds) allowed.insert(key);
        for (const std::string& sym : free_vars(pres.hamiltonian))
            if (!allowed.count(sym))
                throw ModelError(where + ": hamiltonian uses unknown symbol '" + sym + "'");
        sys.presentations.push_back(std::move(pres));
    }
    if (sys.presentations.empty()) throw ModelError(sys.name + ": presentations list is empty");

    if (j.contains("declared_constants")) {
        for (const auto& jd : j["declared_constants"]) {
            DeclaredConstant d;
            d.name = require(jd, "name", "declared_constants").get<std::string>();
            d.chart = require(jd, "chart", d.name).get<std::string>();
            const Chart& chart = sys.chart(d.chart);
            d.expr = parse_field(require(jd, "expr", d.name).get<std::string>(),
                                 sys.name + ".declared_constants." + d.name);
            std::set<std::string> allowed;
            for (const auto& sym : chart.symbols()) allowed.insert(sym);
            for (const auto& [key, _] : sys.parameters) allowed.insert(key);
            for (const std::string& sym : free_vars(d.expr))
                if (!allowed.count(sym))
                    throw ModelError(d.name + ": uses unknown symbol '" + sym + "'");
            sys.declared_constants.push_back(std::move(d));
        }
    }

    // numeric spot checks: nonvanishing sum of potentials, invertible Jacobians
    for (const Presentation& pres : sys.presentations) {
        if (!pres.separable) continue;
        const Chart& chart = sys.chart(pres.chart);
        if (chart.sample_ranges.empty()) continue;
        StateSampler sampler(chart, sys.parameters, 12345);
        for (int i = 0; i < 16; ++i) {
            PhaseState s = sampler.next();
            Environment env = chart.state_env(s, sys.parameters);
            for (const auto& [key, fold] : pres.separable->folds) env[key] = 1.0;
            double usum = 0.0;
            for (const auto& pair : pres.separable->pairs)
                usum += evaluate(pair.potential, env);
            if (std::fabs(usum) < 1e-12)
                throw ModelError(sys.name + "." + pres.chart +
                                 ": sum of separable potentials vanishes on the domain");
        }
    }
    for (const Chart& chart : sys.charts) {
        if (chart.sample_ranges.empty() || chart.is_identity()) continue;
        StateSampler sampler(chart, sys.parameters, 54321);
        for (int i = 0; i < 8; ++i) {
            PhaseState s = sampler.next();
            Environment env = chart.coord_env(s.q, sys.parameters);
            Matrix jac(chart.dim(), chart.dim());
            for (int r = 0; r < chart.dim(); ++r)
                for (int c = 0; c < chart.dim(); ++c)
                    jac(r, c) = partial(chart.to_cartesian[static_cast<std::size_t>(r)],
                                        chart.coords[static_cast<std::size_t>(c)], env);
            if (std::fabs(determinant(jac)) <= 1e-10)
                throw ModelError(sys.name + "." + chart.name +
                                 ": forward-map Jacobian is singular on the sampled domain");
        }
    }

    return sys;
}

SystemDefinition load_system(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_system_text(buf.str());
}

std::string system_to_json(const SystemDefinition& sys) {
    ordered_json j;
    j["name"] = sys.name;
    j["parameters"] = ordered_json::object();
    for (const auto& [key, val] : sys.parameters) j["parameters"][key] = val;
    j["charts"] = ordered_json::array();
    for (const Chart& c : sys.charts) {
        ordered_json jc;
        jc["name"] = c.name;
        jc["coords"] = c.coords;
        jc["momenta"] = c.momenta;
        jc["to_cartesian"] = ordered_json::array();
        for (const Expr& e : c.to_cartesian) jc["to_cartesian"].push_back(print(e));
        jc["domain"] = ordered_json::array();
        for (const Expr& e : c.domain) jc["domain"].push_back(print(e));
        jc["sample_ranges"] = ordered_json::object();
        for (const auto& [key, rng] : c.sample_ranges)
            jc["sample_ranges"][key] = {rng[0], rng[1]};
        j["charts"].push_back(std::move(jc));
    }
    j["presentations"] = ordered_json::array();
    for (const Presentation& p : sys.presentations) {
        ordered_json jp;
        jp["chart"] = p.chart;
        jp["hamiltonian"] = print(p.hamiltonian);
        if (p.separable) {
            ordered_json js;
            js["kind"] = p.separable->kind == SplitKind::Full ? "full" : "partial";
            js["pairs"] = ordered_json::array();
            for (const auto& pair : p.separable->pairs) {
                ordered_json jq;
                jq["U"] = print(pair.potential);
                jq["H"] = print(pair.hamiltonian);
                jq["block"] = pair.block;
                js["pairs"].push_back(std::move(jq));
            }
            if (!p.separable->folds.empty()) {
                js["folds"] = ordered_json::object();
                for (const auto& [key, val] : p.separable->folds)
                    js["folds"][key] = print(val);
            }
            if (p.separable->convention_scale != 1.0)
                js["convention_scale"] = p.separable->convention_scale;
            if (p.separable->nested) {
                js["nested"] = ordered_json::array();
                for (const auto& pair : *p.separable->nested) {
                    ordered_json jq;
                    jq["U"] = print(pair.potential);
                    jq["H"] = print(pair.hamiltonian);
                    jq["block"] = pair.block;
                    js["nested"].push_back(std::move(jq));
                }
            }
            jp["separable"] = std::move(js);
        }
        j["presentations"].push_back(std::move(jp));
    }
    j["declared_constants"] = ordered_json::array();
    for (const DeclaredConstant& d : sys.declared_constants) {
        ordered_json jd;
        jd["name"] = d.name;
        jd["chart"] = d.chart;
        jd["expr"] = print(d.expr);
        j["declared_constants"].push_back(std::move(jd));
    }
    return j.dump(2);
}

// ---------------------------------------------------------------------------

StateSampler::StateSampler(const Chart& chart, const Environment& params, std::uint64_t seed)
    : chart_(chart), params_(params), rng_(seed) {}

PhaseState StateSampler::next() {
    for (int attempt = 0; attempt < 100000; ++attempt) {
        PhaseState s;
        s.chart = chart_.name;
        s.q.resize(chart_.coords.size());
        s.p.resize(chart_.momenta.size());
        for (std::size_t i = 0; i < chart_.coords.size(); ++i) {
            auto it = chart_.sample_ranges.find(chart_.coords[i]);
            if (it == chart_.sample_ranges.end())
                throw SamplerStarvation("chart '" + chart_.name +
                                        "' declares no sample range for coordinate '" +
                                        chart_.coords[i] + "'");
            std::uniform_real_distribution<double> dist(it->second[0], it->second[1]);
            s.q[i] = dist(rng_);
        }
        for (std::size_t i = 0; i < chart_.momenta.size(); ++i) {
            auto it = chart_.sample_ranges.find(chart_.momenta[i]);
            double lo = -2.0, hi = 2.0;
            if (it != chart_.sample_ranges.end()) {
                lo = it->second[0];
                hi = it->second[1];
            }
            std::uniform_real_distribution<double> dist(lo, hi);
            s.p[i] = dist(rng_);
        }
        if (chart_.admissible(s.q, params_)) return s;
    }
    throw SamplerStarvation("no admissible state found in chart '" + chart_.name + "'");
}

std::vector<PhaseState> StateSampler::take(int n) {
    std::vector<PhaseState> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(next());
    return out;
}

// ---------------------------------------------------------------------------

std::string VerificationReport::to_json() const {
    ordered_json j;
    j["system"] = system;
    ordered_json stages;
    ordered_json sep;
    sep["ok"] = separability_ok;
    sep["violations"] = separability_violations;
    sep["assembly_residual"] = assembly_residual;
    stages["separability"] = std::move(sep);
    stages["constants"] = ordered_json::array();
    for (const auto& c : constants) {
        ordered_json jc;
        jc["name"] = c.name;
        jc["expr"] = c.expr;
        jc["max_bracket"] = c.max_bracket;
        jc["pass"] = c.pass;
        stages["constants"].push_back(std::move(jc));
    }
    stages["chart_equivalence"] = ordered_json::array();
    for (const auto& p : chart_equivalence) {
        ordered_json jp;
        jp["pair"] = p.pair;
        jp["residual"] = p.residual;
        jp["pass"] = p.pass;
        stages["chart_equivalence"].push_back(std::move(jp));
    }
    ordered_json jr;
    jr["modal"] = rank.modal;
    jr["per_sample_offmodal"] = rank.per_sample_offmodal;
    jr["expected"] = rank.expected;
    jr["pass"] = rank.pass;
    stages["rank"] = std::move(jr);
    if (orbit) {
        ordered_json jo;
        jo["method"] = orbit->method;
        jo["dt"] = orbit->dt;
        jo["steps"] = orbit->steps;
        jo["max_rel_drift"] = orbit->max_rel_drift;
        jo["pass"] = orbit->pass;
        stages["orbit"] = std::move(jo);
    }
    j["stages"] = std::move(stages);
    j["pass"] = pass;
    j["seed"] = seed;
    return j.dump(2);
}

} // namespace carter
