#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "udw/errors.hpp"
#include "udw/oracle.hpp"
#include "udw/sweep.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumeric = 2 };

std::ostream* open_out(const std::string& path, std::ofstream& f) {
    if (path.empty() || path == "-") return &std::cout;
    f.open(path);
    if (!f) throw udw::ConfigError("cannot write " + path, 0, "out");
    return &f;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entangled Unruh-DeWitt detector pairs in Minkowski and shockwave spacetimes"};
    app.require_subcommand(1);
    app.fallthrough();
    double tol = 0.0;
    int workers = 1;
    std::string out;
    app.add_option("--tol", tol, "relative quadrature tolerance (default: library defaults)")
        ->check(CLI::PositiveNumber);
    app.add_option("--workers", workers, "parallel sweep workers")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "output file ('-' for stdout)");

    auto* eval = app.add_subcommand("eval", "evaluate one scenario file");
    std::string eval_cfg;
    bool json = false;
    eval->add_option("config", eval_cfg)->required();
    eval->add_flag("--json", json, "machine-readable report");

    auto* sweep = app.add_subcommand("sweep", "run a sweep config and write CSV");
    std::string sweep_cfg;
    sweep->add_option("config", sweep_cfg)->required();

    auto* pre = app.add_subcommand("preset", "regenerate a figure dataset");
    std::string preset_name;
    pre->add_option("name", preset_name)->required()->check(CLI::IsMember(udw::preset_names()));

    auto* orc = app.add_subcommand("oracle", "brute-force reference values");
    auto* regen = orc->add_subcommand("regenerate", "write the golden-value table");
    orc->require_subcommand(1);
    int grid = 4001;
    regen->add_option("--grid", grid, "grid points per dimension (odd)");

    CLI11_PARSE(app, argc, argv);

    udw::SweepOptions so;
    so.workers = workers;
    if (tol > 0.0) {
        so.elements.k_tol = tol;
        so.elements.generic.rel_tol = tol;
    }

    try {
        std::ofstream f;
        if (*eval) {
            const udw::Scenario s = udw::scenario_from_config(udw::parse_config_file(eval_cfg));
            const udw::ConcurrenceReport r = udw::evaluate(s, so.elements);
            std::ostream& os = *open_out(out, f);
            if (json)
                udw::write_report_json(os, s, r);
            else
                udw::write_report_text(os, s, r);
        } else if (*sweep) {
            const udw::SweepSpec spec = udw::sweep_from_config(udw::parse_config_file(sweep_cfg));
            udw::run_sweep(spec, *open_out(out.empty() ? spec.output_path : out, f), so);
        } else if (*pre) {
            const udw::SweepSpec spec = udw::preset(preset_name);
            udw::run_sweep(spec, *open_out(out.empty() ? spec.output_path : out, f), so);
        } else if (*regen) {
            udw::oracle::OracleConfig oc;
            oc.grid_points_per_dim = grid;
            udw::oracle::write_golden(*open_out(out, f), udw::oracle::golden_corpus(oc));
        }
    } catch (const udw::ConfigError& e) {
        std::cerr << "config error";
        if (!e.field.empty()) std::cerr << " [" << e.field << "]";
        std::cerr << ": " << e.what() << "\n";
        return kConfig;
    } catch (const udw::RegimeError& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return kConfig;
    } catch (const udw::DegenerateSeparationError& e) {
        std::cerr << "invalid geometry: " << e.what() << "\n";
        return kConfig;
    } catch (const udw::MismatchError& e) {
        std::cerr << "invalid detectors: " << e.what() << "\n";
        return kConfig;
    } catch (const udw::Error& e) {
        std::cerr << udw::status_of(e) << ": " << e.what() << "\n";
        return kNumeric;
    }
    return kOk;
}
