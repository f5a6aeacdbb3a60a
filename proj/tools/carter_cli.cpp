#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "carter/catalog.hpp"
#include "carter/orbit.hpp"
#include "carter/theorem.hpp"

namespace {

using namespace carter;

struct SourceOpts {
    std::string catalog_name;
    std::string file;
};

void add_source_flags(CLI::App* cmd, SourceOpts& src) {
    auto* a = cmd->add_option("--catalog", src.catalog_name, "built-in system name");
    auto* b = cmd->add_option("--file", src.file, "system definition JSON file");
    a->excludes(b);
}

SystemDefinition load_source(const SourceOpts& src) {
    if (!src.catalog_name.empty()) return catalog_entry(src.catalog_name).system;
    if (!src.file.empty()) return load_system(src.file);
    throw ModelError("one of --catalog or --file is required");
}

Environment parse_params(const std::vector<std::string>& kvs) {
    Environment out;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ModelError("--param expects sym=value, got '" + kv + "'");
        out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    return out;
}

/// "dt=1e-3,steps=100000,method=implicit_midpoint"
void apply_orbit_flags(const std::string& text, OrbitSpec& spec) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ModelError("--orbit expects key=value pairs, got '" + item + "'");
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "dt") spec.dt = std::stod(val);
        else if (key == "steps") spec.steps = std::stoi(val);
        else if (key == "method") spec.method = val;
        else throw ModelError("unknown --orbit key '" + key + "'");
    }
}

std::vector<double> parse_state(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ModelError("cannot write '" + out_path + "'");
    f << content;
}

void apply_param_overrides(SystemDefinition& sys, const Environment& overrides) {
    for (const auto& [key, val] : overrides) {
        if (!sys.parameters.count(key))
            throw ModelError("system '" + sys.name + "' has no parameter '" + key + "'");
        sys.parameters[key] = val;
    }
}

int cmd_validate(const SourceOpts& src, const Environment& params) {
    SystemDefinition sys = load_source(src);
    apply_param_overrides(sys, params);
    bool ok = true;
    for (const Presentation& pres : sys.presentations) {
        if (!pres.separable) continue;
        const Chart& chart = sys.chart(pres.chart);
        auto violations = validate_separability(*pres.separable, chart, sys.parameters);
        for (const auto& v : violations) {
            ok = false;
            std::cout << sys.name << "." << pres.chart << ": pair " << v.pair_index
                      << " " << v.which << " depends on foreign symbol '" << v.symbol
                      << "'\n";
        }
    }
    std::cout << (ok ? "ok: all separable presentations valid\n"
                     : "validation failed\n");
    return ok ? 0 : 1;
}

int cmd_constants(const SourceOpts& src, const Environment& params) {
    SystemDefinition sys = load_source(src);
    apply_param_overrides(sys, params);
    for (const Presentation& pres : sys.presentations) {
        if (!pres.separable) continue;
        const Chart& chart = sys.chart(pres.chart);
        const SeparableStructure& s = *pres.separable;
        std::cout << sys.name << " [" << pres.chart << "]\n";
        if (s.pairs.size() < 2 && !s.nested) {
            std::cout << "  no nontrivial constants (n-1 = 0)\n";
            continue;
        }
        auto cs = s.nested ? nested_constants(s, *s.nested, chart) : carter_constants(s);
        for (std::size_t i = 0; i < cs.size(); ++i) {
            std::cout << "  kappa_" << i + 1 << "\n"
                      << "    quotient: " << print(cs[i].quotient_form) << "\n"
                      << "    product:  " << print(cs[i].product_form) << "\n";
        }
    }
    return 0;
}

int cmd_verify(const SourceOpts& src, const Environment& params, Tolerances tol,
               std::uint64_t seed, const std::string& orbit_flags,
               const std::string& out_path) {
    VerificationReport rep;
    if (!src.catalog_name.empty()) {
        std::optional<OrbitSpec> orbit = catalog_entry(src.catalog_name).orbit;
        if (!orbit_flags.empty()) {
            if (!orbit) orbit.emplace();
            apply_orbit_flags(orbit_flags, *orbit);
        }
        rep = run_entry(src.catalog_name, tol, seed, params, orbit);
    } else {
        SystemDefinition sys = load_source(src);
        apply_param_overrides(sys, params);
        rep = run_system(sys, tol, seed, std::nullopt, nullptr);
    }
    write_output(out_path, rep.to_json() + "\n");
    return rep.pass ? 0 : 1;
}

int cmd_orbit(const SourceOpts& src, const Environment& params,
              const std::string& orbit_flags, const std::string& chart_name,
              const std::string& q0_text, const std::string& p0_text,
              const std::string& out_path) {
    SystemDefinition sys = load_source(src);
    apply_param_overrides(sys, params);

    OrbitSpec spec;
    bool have_spec = false;
    if (!src.catalog_name.empty()) {
        const auto& entry = catalog_entry(src.catalog_name);
        if (entry.orbit) {
            spec = *entry.orbit;
            have_spec = true;
        }
    }
    if (!chart_name.empty()) spec.chart = chart_name;
    if (!q0_text.empty()) spec.q0 = parse_state(q0_text);
    if (!p0_text.empty()) spec.p0 = parse_state(p0_text);
    if (!orbit_flags.empty()) apply_orbit_flags(orbit_flags, spec);
    if (!have_spec && (spec.chart.empty() || spec.q0.empty() || spec.p0.empty()))
        throw ModelError("--chart, --q0 and --p0 are required for file systems");

    const Presentation* pres = sys.presentation_in(spec.chart);
    if (!pres) throw ModelError("no presentation in chart '" + spec.chart + "'");
    const Chart& chart = sys.chart(spec.chart);

    std::vector<std::pair<std::string, Expr>> invariants{{"H", pres->hamiltonian}};
    if (pres->separable && pres->separable->pairs.size() >= 2) {
        const SeparableStructure& s = *pres->separable;
        auto cs = s.nested ? nested_constants(s, *s.nested, chart) : carter_constants(s);
        for (std::size_t i = 0; i < cs.size(); ++i)
            invariants.emplace_back("kappa_" + std::to_string(i + 1),
                                    cs[i].quotient_form);
    }
    for (const DeclaredConstant& d : sys.declared_constants)
        if (d.chart == spec.chart) invariants.emplace_back(d.name, d.expr);

    PhaseState s0{spec.chart, spec.q0, spec.p0};
    Trajectory traj = integrate(pres->hamiltonian, s0, chart, sys.parameters, spec.dt,
                                spec.steps, spec.method, invariants);
    write_output(out_path, trajectory_csv(traj, chart));
    if (traj.status != OrbitStatus::Ok) {
        std::cerr << "aborted at step " << traj.abort_step << ": "
                  << orbit_status_name(traj.status) << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"construct and verify quotient-form constants of motion"};
    app.require_subcommand(1);

    SourceOpts src;
    std::vector<std::string> param_kvs;
    std::string orbit_flags, out_path, format = "json";
    std::string chart_name, q0_text, p0_text, export_name;
    std::uint64_t seed = 42;
    Tolerances tol;
    double tol_override = -1.0;
    int samples = -1;

    auto add_common = [&](CLI::App* cmd) {
        add_source_flags(cmd, src);
        cmd->add_option("--param", param_kvs, "parameter override sym=value");
    };

    auto* validate = app.add_subcommand("validate", "check separability invariants");
    add_common(validate);

    auto* constants = app.add_subcommand("constants", "print derived constants");
    add_common(constants);

    auto* verify = app.add_subcommand("verify", "run the full verification pipeline");
    add_common(verify);
    verify->add_option("--samples", samples, "Monte-Carlo sample count");
    verify->add_option("--tol", tol_override, "conservation tolerance");
    verify->add_option("--seed", seed, "random seed");
    verify->add_option("--orbit", orbit_flags, "dt=..,steps=..,method=..");
    verify->add_option("--out", out_path, "report path (default stdout)");
    verify->add_option("--format", format, "json");

    auto* orbit = app.add_subcommand("orbit", "integrate one orbit to CSV");
    add_common(orbit);
    orbit->add_option("--chart", chart_name, "chart to integrate in");
    orbit->add_option("--q0", q0_text, "initial coordinates, comma separated");
    orbit->add_option("--p0", p0_text, "initial momenta, comma separated");
    orbit->add_option("--orbit", orbit_flags, "dt=..,steps=..,method=..");
    orbit->add_option("--out", out_path, "CSV path (default stdout)");
    orbit->add_option("--format", format, "csv");

    auto* cat = app.add_subcommand("catalog", "list or export built-in systems");
    auto* cat_list = cat->add_subcommand("list", "print entry names");
    auto* cat_export = cat->add_subcommand("export", "write an entry's JSON");
    cat_export->add_option("name", export_name, "entry name")->required();
    cat_export->add_option("--out", out_path, "path (default stdout)");
    cat->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        Environment params = parse_params(param_kvs);
        if (samples > 0) tol.samples = samples;
        if (tol_override > 0.0) tol.bracket = tol_override;

        if (*validate) return cmd_validate(src, params);
        if (*constants) return cmd_constants(src, params);
        if (*verify) return cmd_verify(src, params, tol, seed, orbit_flags, out_path);
        if (*orbit) return cmd_orbit(src, params, orbit_flags, chart_name, q0_text,
                                     p0_text, out_path);
        if (*cat_list) {
            for (const auto& name : carter::list_catalog()) std::cout << name << "\n";
            return 0;
        }
        if (*cat_export) {
            write_output(out_path,
                         system_to_json(catalog_entry(export_name).system) + "\n");
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
