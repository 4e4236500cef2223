// Command-line driver: ingest, analyze, simulate, collapse, report.

#include "aftershock/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace aftershock;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

fs::path default_output_dir() {
    if (const char* env = std::getenv("AFTERSHOCK_OUTPUT_DIR"); env && *env) return env;
    return "aftershock-out";
}

void add_column_options(CLI::App* app, ColumnMap& cols) {
    app->add_option("--date-col", cols.date, "Date (or full timestamp) column")->capture_default_str();
    app->add_option("--time-col", cols.time, "Time column; empty when the date column has the time")
        ->capture_default_str();
    app->add_option("--price-col", cols.price, "Price column")->capture_default_str();
    app->add_option("--date-format", cols.date_format)->capture_default_str();
    app->add_option("--time-format", cols.time_format)->capture_default_str();
    app->add_option("--delimiter", cols.delimiter)->capture_default_str();
}

void add_output_option(CLI::App* app, fs::path& dir) {
    app->add_option("-o,--output-dir", dir, "Output directory (env AFTERSHOCK_OUTPUT_DIR)")
        ->capture_default_str();
}

struct IngestArgs {
    std::string input;
    ColumnMap columns;
    std::optional<std::string> crash;
    fs::path output_dir = default_output_dir();
};

int run_ingest(const IngestArgs& a) {
    auto in = open_input(a.input);
    auto series = in_stage("ingest", [&] { return compact_gaps(load_records(in, a.columns)); });
    if (a.crash) {
        const auto crash = parse_instant(*a.crash);
        if (!crash) throw std::invalid_argument("cannot parse crash instant '" + *a.crash + "'");
        series = in_stage("align", [&] { return align_origin(std::move(series), *crash); });
    }
    std::error_code ec;
    fs::create_directories(a.output_dir, ec);
    write_file(a.output_dir / "series.csv",
               to_text([&](std::ostream& os) { write_series_csv(os, series); }));
    std::cout << "records " << series.size() << "\nfirst " << format_timestamp(series.wall_clock.front())
              << "\nlast " << format_timestamp(series.wall_clock.back()) << '\n';
    if (series.origin_wall_clock) {
        std::cout << "origin " << format_timestamp(*series.origin_wall_clock)
                  << (series.origin_snapped() ? " (snapped)" : "") << '\n';
    }
    std::cout << "wrote " << (a.output_dir / "series.csv").string() << '\n';
    return kOk;
}

struct SimulateArgs {
    OmoriGenSpec omori;
    ParetoGenSpec pareto;
    double rate = 0.1;
    double horizon = 1e4;
    std::uint64_t seed = 1;
    fs::path output_dir = default_output_dir();
};

int run_simulate(const std::string& kind, SimulateArgs& a) {
    std::error_code ec;
    fs::create_directories(a.output_dir, ec);
    const auto path = a.output_dir / (kind == "pareto" ? "waits.csv" : "events.csv");
    std::size_t n = 0;
    if (kind == "omori") {
        const auto g = gen_omori(a.omori);
        n = g.events.size();
        write_file(path, to_text([&](std::ostream& os) { write_events_csv(os, g.events); }));
        if (g.collapsed_ties) std::cout << "collapsed ties " << g.collapsed_ties << '\n';
    } else if (kind == "pareto") {
        const auto w = gen_pareto_waits(a.pareto);
        n = w.taus.size();
        write_file(path, to_text([&](std::ostream& os) { write_waits_csv(os, w); }));
    } else {
        const auto ev = gen_stationary(a.rate, a.horizon, a.seed);
        n = ev.size();
        write_file(path, to_text([&](std::ostream& os) { write_events_csv(os, ev); }));
    }
    std::cout << "wrote " << n << " rows to " << path.string() << '\n';
    return kOk;
}

struct CollapseArgs {
    std::string events;
    std::vector<std::size_t> n_w{0, 10, 20, 30, 40, 50};
    std::size_t n_max = 60;
    std::size_t reference = 0;
    std::string label = "events";
    bool svg = false;
    fs::path output_dir = default_output_dir();
};

int run_collapse(const CollapseArgs& a) {
    auto in = open_input(a.events);
    const auto events = in_stage("read events", [&] { return read_events_csv(in); });
    const auto curves = in_stage("correlation", [&] { return aging_curves(events, a.n_w, a.n_max); });
    auto result = in_stage("collapse", [&] { return collapse(curves, a.reference, a.n_max); });
    try {
        result.law = fit_f(result.scale_factors);
    } catch (const DataError& e) {
        std::cerr << "note: f(n_w) law not fitted: " << e.what() << '\n';
    }

    std::map<std::string, std::string> files;
    std::map<std::string, Table> tables;
    Table aging{{"n_w", "n", "C"}, {}}, collapsed{{"n_w", "n_over_f", "C"}, {}}, sf{{"n_w", "f"}, {}};
    for (const auto& c : curves) {
        const double f = result.scale_factors.at(c.n_w);
        for (const auto& pt : c.points) {
            aging.rows.push_back({static_cast<double>(c.n_w), static_cast<double>(pt.n), pt.C});
            collapsed.rows.push_back({static_cast<double>(c.n_w), static_cast<double>(pt.n) / f, pt.C});
        }
    }
    for (const auto& [n_w, f] : result.scale_factors) sf.rows.push_back({static_cast<double>(n_w), f});
    tables["aging_" + a.label + ".csv"] = std::move(aging);
    tables["collapsed_" + a.label + ".csv"] = std::move(collapsed);
    tables["scale_factors_" + a.label + ".csv"] = std::move(sf);
    for (const auto& [name, t] : tables) files[name] = to_text([&](std::ostream& os) { write_table(os, t); });
    if (a.svg) {
        for (auto& [name, svg] : render_charts(a.label, tables)) files[name] = std::move(svg);
    }

    CorrelationSection section{a.n_w, a.n_max, curves, result};
    Json j = to_json(section);
    j["schema_version"] = kReportSchemaVersion;
    j["events"] = events.size();
    files["collapse_" + a.label + ".json"] = j.dump(2) + "\n";

    std::error_code ec;
    fs::create_directories(a.output_dir, ec);
    for (const auto& [name, content] : files) write_file(a.output_dir / name, content);
    std::cout << "collapse residual " << format_number(result.collapse_residual) << '\n';
    if (result.law) {
        std::cout << "f(n_w) = " << format_number(result.law->a) << " n_w^" << format_number(result.law->gamma)
                  << " + 1\n";
    }
    return kOk;
}

struct ReportArgs {
    fs::path from;
    fs::path output_dir;
};

// Re-renders charts from the CSV intermediates of an analyze run. Reads the
// run's report.json for the labels; writes only into the output directory.
int run_report(const ReportArgs& a) {
    auto in = open_input(a.from / "report.json");
    Json report;
    try {
        report = Json::parse(in);
    } catch (const Json::exception& e) {
        throw DataError(std::string("report.json: ") + e.what());
    }
    if (!report.contains("analyses")) throw DataError("report.json: no analyses");
    const fs::path out_dir = a.output_dir.empty() ? a.from / "charts" : a.output_dir;
    if (fs::exists(out_dir) && fs::equivalent(out_dir, a.from)) {
        throw std::invalid_argument("report output directory must differ from the input directory");
    }

    std::map<std::string, std::string> files;
    for (const auto& analysis : report["analyses"]) {
        const auto label = analysis.at("label").get<std::string>();
        std::map<std::string, Table> tables;
        for (const char* stem : {"omori", "waiting", "aging", "collapsed", "scale_factors"}) {
            const auto name = std::string(stem) + "_" + label + ".csv";
            if (!fs::exists(a.from / name)) continue;
            auto csv = open_input(a.from / name);
            tables[name] = in_stage(name, [&] { return read_table(csv); });
        }
        for (auto& [name, svg] : render_charts(label, tables)) files[name] = std::move(svg);
    }
    if (fs::exists(a.from / "returns.csv")) {
        auto csv = open_input(a.from / "returns.csv");
        const auto t = in_stage("returns.csv", [&] { return read_table(csv); });
        files["returns.svg"] = render_returns_chart(t);
    }
    Json manifest = Json::array();
    for (const auto& [name, content] : files) manifest.push_back(name);
    files["charts.json"] = Json{{"schema_version", kReportSchemaVersion}, {"charts", manifest}}.dump(2) + "\n";

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
    for (const auto& [name, content] : files) write_file(out_dir / name, content);
    std::cout << "wrote " << files.size() << " files to " << out_dir.string() << '\n';
    return kOk;
}

void print_summary(const Json& report) {
    if (report.contains("sigma")) std::cout << "sigma " << report["sigma"]["sigma"] << '\n';
    for (const auto& a : report["analyses"]) {
        std::cout << a["label"].get<std::string>() << ": events " << a["events"];
        if (a.contains("omori")) std::cout << ", p " << a["omori"]["p"];
        if (a.contains("waiting") && a["waiting"].contains("lsq")) std::cout << ", mu " << a["waiting"]["lsq"]["mu"];
        if (a.contains("markov")) std::cout << ", markov " << a["markov"]["verdict"].get<std::string>();
        std::cout << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aftershock statistics of price time series"};
    app.require_subcommand(1);
    // CLI11 reads config files only at the root; subcommand options live in
    // [ingest], [analyze], ... sections and may follow the subcommand name.
    app.set_config("--config", "", "INI file with [subcommand] sections");
    app.fallthrough();

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Validate and compact a minute-bar CSV");
    ingest_cmd->add_option("-i,--input", ingest.input, "Minute-bar CSV")->required();
    add_column_options(ingest_cmd, ingest.columns);
    ingest_cmd->add_option("--crash", ingest.crash, "Crash instant, YYYY-MM-DD HH:MM");
    add_output_option(ingest_cmd, ingest.output_dir);

    RunConfig cfg;
    cfg.output_dir = default_output_dir();
    auto* analyze = app.add_subcommand("analyze", "Full pipeline; synthetic catalog when no input is given");
    analyze->add_option("-i,--input", cfg.input, "Minute-bar CSV");
    add_column_options(analyze, cfg.columns);
    analyze->add_option("--crash", cfg.crash, "Crash instant, YYYY-MM-DD HH:MM");
    analyze->add_option("--window-days", cfg.window_days)->capture_default_str();
    analyze->add_option("--window-minutes", cfg.window_minutes, "Overrides --window-days");
    analyze->add_option("--thresholds", cfg.threshold_multiples, "Threshold multiples of sigma")
        ->capture_default_str();
    analyze->add_option("--omori-grid-step", cfg.omori_grid_step)->capture_default_str();
    analyze->add_option("--omori-horizon", cfg.omori_horizon);
    analyze->add_flag("--omori-c-search,!--no-omori-c-search", cfg.omori_c_search);
    analyze->add_option("--waiting-bin", cfg.waiting_bin)->capture_default_str();
    analyze->add_option("--waiting-fit-min", cfg.waiting_fit_min);
    analyze->add_option("--waiting-fit-max", cfg.waiting_fit_max);
    analyze->add_option("--n-w", cfg.n_w_list)->capture_default_str();
    analyze->add_option("--n-max", cfg.n_max)->capture_default_str();
    analyze->add_option("--collapse-reference", cfg.collapse_reference)->capture_default_str();
    analyze->add_option("--bootstrap", cfg.bootstrap_resamples, "Resamples; 0 disables")->capture_default_str();
    analyze->add_option("--seed", cfg.seed)->capture_default_str();
    analyze->add_option("--synth-p", cfg.synth.p)->capture_default_str();
    analyze->add_option("--synth-A", cfg.synth.A)->capture_default_str();
    analyze->add_option("--synth-c", cfg.synth.c)->capture_default_str();
    analyze->add_option("--synth-horizon", cfg.synth.horizon)->capture_default_str();
    analyze->add_option("--synth-seed", cfg.synth.seed)->capture_default_str();
    analyze->add_flag("--synth-round,!--no-synth-round", cfg.synth.round_to_minute);
    analyze->add_flag("--svg", cfg.svg, "Also write SVG charts");
    add_output_option(analyze, cfg.output_dir);

    SimulateArgs sim;
    std::string sim_kind = "omori";
    auto* simulate = app.add_subcommand("simulate", "Synthetic catalogs");
    simulate->add_option("kind", sim_kind, "omori | pareto | stationary")
        ->check(CLI::IsMember({"omori", "pareto", "stationary"}))
        ->capture_default_str();
    simulate->add_option("--p", sim.omori.p)->capture_default_str();
    simulate->add_option("--A", sim.omori.A)->capture_default_str();
    simulate->add_option("--c", sim.omori.c)->capture_default_str();
    simulate->add_option("--horizon", sim.horizon)->capture_default_str();
    simulate->add_flag("--round", sim.omori.round_to_minute, "Round Omori times to whole minutes");
    simulate->add_option("--mu", sim.pareto.mu)->capture_default_str();
    simulate->add_option("--tau-min", sim.pareto.tau_min)->capture_default_str();
    simulate->add_option("--count", sim.pareto.count)->capture_default_str();
    simulate->add_option("--rate", sim.rate, "Stationary events per minute")->capture_default_str();
    simulate->add_option("--seed", sim.seed)->capture_default_str();
    add_output_option(simulate, sim.output_dir);

    CollapseArgs col;
    auto* collapse_cmd = app.add_subcommand("collapse", "Aging curves and data collapse for an event file");
    collapse_cmd->add_option("-e,--events", col.events, "Event-time CSV")->required();
    collapse_cmd->add_option("--n-w", col.n_w)->capture_default_str();
    collapse_cmd->add_option("--n-max", col.n_max)->capture_default_str();
    collapse_cmd->add_option("--reference", col.reference)->capture_default_str();
    collapse_cmd->add_option("--label", col.label)->capture_default_str();
    collapse_cmd->add_flag("--svg", col.svg);
    add_output_option(collapse_cmd, col.output_dir);

    ReportArgs rep;
    auto* report_cmd = app.add_subcommand("report", "Re-render charts from an analyze output directory");
    report_cmd->add_option("--from", rep.from, "Directory written by analyze")->required();
    report_cmd->add_option("-o,--output-dir", rep.output_dir, "Default: <from>/charts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kOk : kUsage;
    }

    try {
        if (*ingest_cmd) return run_ingest(ingest);
        if (*analyze) {
            const auto out = run_pipeline(cfg);
            print_summary(out.report);
            std::cout << "wrote " << out.files.size() << " files to " << cfg.output_dir.string() << '\n';
            return kOk;
        }
        if (*simulate) {
            sim.omori.horizon = sim.horizon;
            sim.omori.seed = sim.pareto.seed = sim.seed;
            return run_simulate(sim_kind, sim);
        }
        if (*collapse_cmd) return run_collapse(col);
        if (*report_cmd) return run_report(rep);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
