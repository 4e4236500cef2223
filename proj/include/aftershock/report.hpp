#pragma once

#include "aftershock/correlation.hpp"
#include "aftershock/diagnostics.hpp"
#include "aftershock/ingest.hpp"
#include "aftershock/omori.hpp"
#include "aftershock/rng.hpp"
#include "aftershock/stats.hpp"
#include "aftershock/synth.hpp"
#include "aftershock/waiting.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace aftershock {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

struct InputSummary {
    std::string path;
    std::size_t records = 0;
    std::string first;
    std::string last;
    std::string crash_requested;
    std::string crash_origin;
    bool origin_snapped = false;
    std::size_t pre_crash_records = 0;
};

struct SigmaSection {
    WindowStats stats;
    double window_days = 0.0;
    double minutes_per_day = 0.0;
    bool clamped = false;
};

struct SyntheticSection {
    OmoriGenSpec spec;
    std::size_t events = 0;
    std::size_t collapsed_ties = 0;
};

struct BootstrapSummary {
    Interval p;
    Interval mu;
    Interval sum;
    std::size_t resamples = 0;
    std::size_t p_failures = 0;
    std::size_t mu_failures = 0;
};

struct CorrelationSection {
    std::vector<std::size_t> n_w;
    std::size_t n_max = 0;
    std::vector<CorrelationCurve> curves;
    CollapseResult collapse;
};

/// Everything computed for one event catalog (one threshold or one
/// synthetic run).
struct Analysis {
    std::string label;
    Threshold threshold;
    std::size_t events = 0;
    std::optional<OmoriFit> omori;
    std::optional<OmoriMle> omori_mle;
    std::optional<WaitingFit> waiting_lsq;
    std::optional<WaitingFit> waiting_mle;
    std::optional<BootstrapSummary> bootstrap;
    std::optional<MarkovCheck> markov;
    std::optional<CorrelationSection> correlation;
    std::vector<std::string> files;
};

struct ReportInputs {
    Json config;
    std::optional<InputSummary> input;
    std::optional<SigmaSection> sigma;
    std::optional<SyntheticSection> synthetic;
    std::vector<Analysis> analyses;
    std::vector<std::string> notes;
    std::vector<std::string> manifest;
};

inline Json to_json(const Interval& i) { return Json::array({i.lo, i.hi}); }

inline Json to_json(const OmoriFit& f, const Threshold& th) {
    Json j;
    j["p"] = f.p;
    j["A"] = f.A;
    j["c"] = f.c;
    j["rss"] = f.rss;
    j["grid_step"] = f.grid_step;
    j["horizon"] = f.horizon;
    j["threshold"] = th.value;
    j["grid_points"] = f.grid_points;
    j["events"] = f.events;
    return j;
}

inline Json to_json(const OmoriMle& f) {
    return Json{{"p", f.p}, {"A", f.A}, {"c", f.c}, {"log_likelihood", f.log_likelihood},
                {"horizon", f.horizon}, {"events", f.events}};
}

inline Json to_json(const WaitingFit& f) {
    return Json{{"mu", f.mu},
                {"method", std::string(to_string(f.method))},
                {"fit_range", Json::array({f.fit_range.lo, f.fit_range.hi})},
                {"stderr", f.stderr_mu},
                {"points", f.points}};
}

inline Json to_json(const MarkovCheck& m) {
    return Json{{"p", m.p},
                {"mu", m.mu},
                {"sum", m.sum},
                {"ci", to_json(m.ci)},
                {"applicable", m.applicable},
                {"verdict", std::string(to_string(m.verdict))}};
}

inline Json to_json(const CorrelationSection& c) {
    Json j;
    j["n_w"] = c.n_w;
    j["n_max"] = c.n_max;
    j["reference_n_w"] = c.collapse.reference_n_w;
    Json m_used = Json::object();
    for (const auto& curve : c.curves) {
        if (!curve.points.empty()) m_used[std::to_string(curve.n_w)] = curve.points.back().M;
    }
    j["min_samples_per_point"] = m_used;
    Json f = Json::object(), before = Json::object(), after = Json::object();
    for (const auto& [n_w, v] : c.collapse.scale_factors) f[std::to_string(n_w)] = v;
    for (const auto& [n_w, v] : c.collapse.residual_before) before[std::to_string(n_w)] = v;
    for (const auto& [n_w, v] : c.collapse.residual_after) after[std::to_string(n_w)] = v;
    j["scale_factors"] = f;
    j["residual_before"] = before;
    j["residual_after"] = after;
    j["collapse_residual"] = c.collapse.collapse_residual;
    if (c.collapse.law) {
        j["law"] = Json{{"a", c.collapse.law->a},
                        {"gamma", c.collapse.law->gamma},
                        {"points", c.collapse.law->points}};
    }
    return j;
}

/// Assembles the JSON report. Optional sections that were not computed are
/// omitted; schema_version is always present.
inline Json build_report(const ReportInputs& in) {
    Json r;
    r["schema_version"] = kReportSchemaVersion;
    r["tool"] = "aftershock";
    r["rng_algorithm"] = kRngAlgorithm;
    r["config"] = in.config;
    if (in.input) {
        const auto& s = *in.input;
        r["input"] = Json{{"path", s.path},
                          {"records", s.records},
                          {"first", s.first},
                          {"last", s.last},
                          {"crash_requested", s.crash_requested},
                          {"crash_origin", s.crash_origin},
                          {"origin_snapped", s.origin_snapped},
                          {"pre_crash_records", s.pre_crash_records}};
    }
    if (in.sigma) {
        const auto& s = *in.sigma;
        r["sigma"] = Json{{"sigma", s.stats.sigma},
                          {"mean", s.stats.mean},
                          {"variance", s.stats.variance},
                          {"t0", s.stats.t0},
                          {"length_minutes", s.stats.length},
                          {"window_days", s.window_days},
                          {"minutes_per_day", s.minutes_per_day},
                          {"clamped_to_data", s.clamped}};
    }
    if (in.synthetic) {
        const auto& s = *in.synthetic;
        r["synthetic"] = Json{{"generator", "omori_poisson"},
                              {"p", s.spec.p},
                              {"A", s.spec.A},
                              {"c", s.spec.c},
                              {"horizon", s.spec.horizon},
                              {"seed", s.spec.seed},
                              {"round_to_minute", s.spec.round_to_minute},
                              {"events", s.events},
                              {"collapsed_ties", s.collapsed_ties}};
    }
    Json analyses = Json::array();
    for (const auto& a : in.analyses) {
        Json j;
        j["label"] = a.label;
        j["threshold"] = Json{{"value", a.threshold.value}};
        if (a.threshold.sigma_multiple) j["threshold"]["sigma_multiple"] = *a.threshold.sigma_multiple;
        j["events"] = a.events;
        if (a.omori) j["omori"] = to_json(*a.omori, a.threshold);
        if (a.omori_mle) j["omori_mle"] = to_json(*a.omori_mle);
        if (a.waiting_lsq || a.waiting_mle) {
            Json w;
            if (a.waiting_lsq) w["lsq"] = to_json(*a.waiting_lsq);
            if (a.waiting_mle) w["mle"] = to_json(*a.waiting_mle);
            j["waiting"] = w;
        }
        if (a.bootstrap) {
            const auto& b = *a.bootstrap;
            j["bootstrap"] = Json{{"resamples", b.resamples},
                                  {"p_ci", to_json(b.p)},
                                  {"mu_ci", to_json(b.mu)},
                                  {"sum_ci", to_json(b.sum)},
                                  {"p_failures", b.p_failures},
                                  {"mu_failures", b.mu_failures}};
        }
        if (a.markov) j["markov"] = to_json(*a.markov);
        if (a.correlation) j["correlation"] = to_json(*a.correlation);
        if (!a.files.empty()) j["files"] = a.files;
        analyses.push_back(j);
    }
    r["analyses"] = analyses;
    if (!in.notes.empty()) r["notes"] = in.notes;
    r["manifest"] = in.manifest;
    return r;
}

/// Stable text form: two-space indent, trailing newline.
inline std::string serialize_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace aftershock
