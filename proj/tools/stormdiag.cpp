#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>

#include "stormdiag/balance.hpp"
#include "stormdiag/dataset.hpp"
#include "stormdiag/derive.hpp"
#include "stormdiag/error.hpp"
#include "stormdiag/report.hpp"
#include "stormdiag/synth.hpp"
#include "stormdiag/track.hpp"

using namespace stormdiag;
namespace fs = std::filesystem;

namespace {

std::vector<double> split_numbers(const std::string& text, std::size_t expected, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(what + ": '" + item + "' is not a number");
        }
    }
    if (out.size() != expected) throw Error(what + " needs " + std::to_string(expected) + " comma-separated values");
    return out;
}

Level parse_level(const std::string& text) {
    if (text == "sfc") return Level::surface();
    return Level::pressure(split_numbers(text, 1, "--level")[0]);
}

nlohmann::json read_json_arg(const std::string& arg) {
    try {
        if (fs::exists(arg)) {
            std::ifstream in(arg);
            return nlohmann::json::parse(in);
        }
        return nlohmann::json::parse(arg);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("cannot parse JSON '" + arg + "': " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Storm-centric diagnostics for gridded model output"};
    app.require_subcommand(1);
    int exit_code = 0;

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic fgrid dataset");
    std::string synth_case, synth_params = "{}", synth_out;
    synth_cmd->add_option("--case", synth_case, "gaussian-low, harmonic or noisy")
        ->required()
        ->check(CLI::IsMember({"gaussian-low", "harmonic", "noisy"}));
    synth_cmd->add_option("--params", synth_params, "JSON text or file");
    synth_cmd->add_option("--out", synth_out, "Output dataset directory")->required();
    synth_cmd->callback([&] {
        const auto params = read_json_arg(synth_params);
        const PhysicalConstants pc;
        write_fields(synth_out, synth::synth_case(synth_case, params, pc), pc,
                     params.value("source_label", "synthetic-" + synth_case), false);
    });

    // derive
    auto* derive_cmd = app.add_subcommand("derive", "Add derived fields (ws10, ws, vo, thw, r_derived) to a dataset");
    std::string derive_ds, derive_level, derive_time, derive_out;
    derive_cmd->add_option("--dataset", derive_ds)->required();
    derive_cmd->add_option("--level", derive_level, "Pressure in hPa or 'sfc'")->required();
    derive_cmd->add_option("--time", derive_time, "Valid time; all times at the level when omitted");
    derive_cmd->add_option("--out", derive_out, "Output directory (default: the dataset itself)");
    derive_cmd->callback([&] {
        const Dataset ds = load_dataset(derive_ds);
        const Level level = parse_level(derive_level);
        const PhysicalConstants pc;
        std::set<TimePoint> times;
        if (!derive_time.empty()) {
            times.insert(parse_time(derive_time));
        } else {
            for (const auto& [key, f] : ds.fields())
                if (key.level == level) times.insert(key.valid_time);
        }
        std::vector<Field> out;
        for (TimePoint t : times)
            for (Field& f : derive::derive_available(ds, level, t, pc)) out.push_back(std::move(f));
        if (out.empty()) throw Error("nothing derivable at level " + level.label());
        write_fields(derive_out.empty() ? fs::path(derive_ds) : fs::path(derive_out), out, pc, ds.label(), true);
        std::cout << "wrote " << out.size() << " derived fields\n";
    });

    // track
    auto* track_cmd = app.add_subcommand("track", "Track the MSLP minimum of a cyclone");
    std::string track_ds, track_fg, track_t0, track_t1, track_out;
    track::TrackOptions topt;
    double window_h = 24.0;
    track_cmd->add_option("--dataset", track_ds)->required();
    track_cmd->add_option("--first-guess", track_fg, "W,E,S,N box at t0")->required();
    track_cmd->add_option("--t0", track_t0)->required();
    track_cmd->add_option("--t1", track_t1)->required();
    track_cmd->add_option("--out", track_out, "Track JSON file")->required();
    track_cmd->add_option("--search-radius-km", topt.search_radius_km, "Per 6 h of step")->capture_default_str();
    track_cmd->add_option("--speed-gate", topt.speed_gate_m_s, "m/s")->capture_default_str();
    track_cmd->add_option("--window-h", window_h, "Intensification window")->capture_default_str();
    track_cmd->callback([&] {
        const Dataset ds = load_dataset(track_ds);
        const auto b = split_numbers(track_fg, 4, "--first-guess");
        track::Track t = track::track_cyclone(ds, RegionBox{b[0], b[1], b[2], b[3]}, parse_time(track_t0),
                                              parse_time(track_t1), topt);
        try {
            t.intensification = track::intensification(t, window_h);
        } catch (const Error& e) {
            std::cerr << "note: " << e.what() << "\n";
        }
        track::write_track(track_out, t);
        if (t.terminated_early) std::cerr << "track terminated early: " << t.termination_reason << "\n";
    });

    // balance
    auto* bal_cmd = app.add_subcommand("balance", "Geostrophic and gradient-wind balance fields");
    std::string bal_ds, bal_time, bal_c = "0,0", bal_out;
    double bal_level = 850.0;
    balance::BalanceOptions bopt;
    bool bal_smoothed = false;
    bal_cmd->add_option("--dataset", bal_ds)->required();
    bal_cmd->add_option("--time", bal_time)->required();
    bal_cmd->add_option("--level", bal_level)->capture_default_str();
    bal_cmd->add_option("--cyclone-velocity", bal_c, "cx,cy in m/s")->capture_default_str();
    bal_cmd->add_option("--truncation", bopt.lmax, "Triangular truncation; 0 disables")->capture_default_str();
    bal_cmd->add_option("--vg-min", bopt.vg_min)->capture_default_str();
    bal_cmd->add_flag("--smoothed", bal_smoothed, "Truncate u, v and z before computing V and Vg");
    bal_cmd->add_option("--out", bal_out)->required();
    bal_cmd->callback([&] {
        const Dataset ds = load_dataset(bal_ds);
        const auto c = split_numbers(bal_c, 2, "--cyclone-velocity");
        const auto b = balance::balance_bundle(ds, parse_time(bal_time), bal_level, CycloneVelocity{c[0], c[1]},
                                               bal_smoothed, bopt);
        balance::write_bundle(bal_out, b, ds.label());
    });

    // report
    auto* rep_cmd = app.add_subcommand("report", "Peak tables, intercomparison and contour exports");
    std::string rep_config, rep_out;
    rep_cmd->add_option("--config", rep_config)->required()->check(CLI::ExistingFile);
    rep_cmd->add_option("--out", rep_out)->required();
    rep_cmd->callback([&] {
        const auto config = read_json_arg(rep_config);
        const auto outcome = report::run_report(config, rep_out, fs::path(rep_config).parent_path());
        for (const auto& name : outcome.written) std::cout << "wrote " << name << "\n";
        for (const auto& s : outcome.failed_sources) std::cerr << "source failed: " << s << "\n";
        if (!outcome.failed_sources.empty()) exit_code = 2;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
