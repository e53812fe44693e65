// Command-line front end: analyze | periods | decompose | integrate.
// JSON in, JSON out; exit codes: 0 ok, 2 input error, 3 numeric failure,
// 4 cross-check failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "curvint/pipeline.hpp"

using namespace curvint;

namespace {

struct CommonArgs {
    std::string curve_file;
    std::string cycles = "auto";
    std::string form_file;
    std::string gamma;
    int precision = 15;
    std::uint64_t seed = 1;
    bool check = false;
    std::string cache_dir;
    std::string output;
};

void emit(const json& j, const std::string& output) {
    std::string text = j.dump(2);
    text.push_back('\n');
    if (output.empty()) {
        std::cout << text;
        return;
    }
    // atomic write: temp file then rename
    std::string tmp = output + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << text;
    }
    std::filesystem::rename(tmp, output);
}

json load_cycles_arg(const std::string& arg) {
    if (arg == "auto") return json("auto");
    return read_json_file(arg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"algebraic integrals on plane curves"};
    app.require_subcommand(1);
    CommonArgs a;

    auto add_common = [&](CLI::App* cmd, bool needs_cycles, bool needs_form, bool needs_gamma) {
        cmd->add_option("--curve", a.curve_file, "curve JSON file")->required();
        if (needs_cycles) cmd->add_option("--cycles", a.cycles, "cycles JSON file or 'auto'");
        if (needs_form) cmd->add_option("--form", a.form_file, "1-form JSON file")->required();
        if (needs_gamma)
            cmd->add_option("--gamma", a.gamma,
                            "integer combination 'A1+2*B1-C0' or arc:(re,im,sheet)->(re,im,sheet)")
                ->required();
        cmd->add_option("--precision", a.precision, "target precision in decimal digits");
        cmd->add_option("--seed", a.seed, "seed for reproducible sampling");
        cmd->add_flag("--check", a.check, "cross-check against direct quadrature");
        cmd->add_option("--cache", a.cache_dir, "directory for the period cache");
        cmd->add_option("--output", a.output, "write the JSON report to a file atomically");
    };

    auto* analyze = app.add_subcommand("analyze", "discriminants, polygon, punctures, genus");
    add_common(analyze, false, false, false);
    auto* periods = app.add_subcommand("periods", "K, tau, S and diagnostics");
    add_common(periods, true, false, false);
    auto* decompose = app.add_subcommand("decompose", "canonical decomposition of a 1-form");
    add_common(decompose, true, true, false);
    auto* integrate = app.add_subcommand("integrate", "complete or incomplete integral");
    add_common(integrate, true, true, true);

    CLI11_PARSE(app, argc, argv);

    try {
        CurveSpec spec = parse_curve(read_json_file(a.curve_file));
        if (app.got_subcommand(analyze)) {
            emit(cmd_analyze(spec).out, a.output);
            return 0;
        }
        json cycles_json = load_cycles_arg(a.cycles);
        std::string curve_fp = fingerprint(curve_to_json(spec));
        std::string cycles_fp = fingerprint(cycles_json);
        // the expensive block: cached by (curve, cycles, precision)
        std::string cpath;
        if (!a.cache_dir.empty()) {
            std::filesystem::create_directories(a.cache_dir);
            cpath = cache_path(a.cache_dir, curve_fp, cycles_fp, a.precision);
        }
        bool cache_hit = !cpath.empty() && std::filesystem::exists(cpath);
        PeriodsBundle bundle(spec, cycles_json, a.precision, a.seed, cache_hit);
        json pj;
        if (cache_hit) {
            pj = read_json_file(cpath);
            // the transcendental blocks come from the cache; the geometry was
            // rebuilt above
            bundle.pd.K = mat_from_json(pj.at("K"));
            bundle.pd.Khat = mat_from_json(pj.at("Khat"));
            bundle.pd.L = mat_from_json(pj.at("L"));
            bundle.pd.tau = mat_from_json(pj.at("tau"));
            bundle.pd.S = mat_from_json(pj.at("S"));
            auto& o = pj.at("origin");
            bundle.pd.origin = {cplx(o.at("x").at(0), o.at("x").at(1)),
                                cplx(o.at("y").at(0), o.at("y").at(1)), 0.0};
        } else {
            pj = cmd_periods(bundle, a.precision, a.check && app.got_subcommand(periods));
            if (!cpath.empty()) {
                std::ofstream out(cpath + ".tmp", std::ios::binary);
                out << pj.dump(2);
                out.close();
                std::filesystem::rename(cpath + ".tmp", cpath);
            }
        }
        if (app.got_subcommand(periods)) {
            emit(pj, a.output);
            return 0;
        }
        RationalForm form = parse_form(read_json_file(a.form_file), spec.parameters);
        if (app.got_subcommand(decompose)) {
            emit(cmd_decompose(bundle, form, a.seed, a.check, true), a.output);
            return 0;
        }
        GammaParsed gamma = parse_gamma(a.gamma, bundle.pd.genus);
        emit(cmd_integrate(bundle, form, gamma, a.seed, a.check), a.output);
        return 0;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const check_failure& e) {
        std::cerr << "cross-check failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
