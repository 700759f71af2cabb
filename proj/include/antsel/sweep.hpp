#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "antsel/feedback.hpp"
#include "antsel/montecarlo.hpp"
#include "antsel/performance.hpp"
#include "antsel/scheme.hpp"

namespace antsel {

// Whether grid values are symbol or information-bit SNR. The bit axis maps
// through E_s = E_b * R_s * (bits per symbol or rate), so gap readings are
// invariant to the choice.
enum class SnrAxis { EsN0, EbN0 };

// inclusive dB grid, "start:step:stop"
struct SnrGrid {
    double start_db = 0.0;
    double step_db = 2.0;
    double stop_db = 30.0;
    std::vector<double> points() const;
};

SnrGrid parse_snr_grid(const std::string& text);

// One sweep request: a curve per (n_t, n_r) variant and p_e value, evaluated
// over the grid. Built by parse_config / figure_preset / CLI flags.
struct RunDescription {
    Scheme scheme = Scheme::TasStbc;
    std::vector<int> nt{2};
    int ns = 0; // 0: derive from code
    std::vector<int> nr{1};
    Rational m = Rational(1);
    std::string code;              // "g2" | "g3"
    Rational code_rate = Rational(0); // 0: derive from code
    bool is_outage = false;
    bool metric_set = false;
    ModulationSpec mod;
    double rate = 2.0;
    std::vector<double> pe{0.0};
    SnrGrid grid;
    SnrAxis axis = SnrAxis::EsN0;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 1;
    FeedbackDrawMode feedback_mode = FeedbackDrawMode::PaperModel;
    ReceiveMode receive_mode = ReceiveMode::ModelFaithful;
    CodewordMapping mapping = CodewordMapping::NaturalBinary;
    std::vector<int> permutation;
    bool with_mc = false;
    bool with_asymptote = false;
    std::string out_path;

    SchemeConfig config(int nt_value, int nr_value) const;
    MixingMode mixing() const;        // analytic mixing matching feedback_mode
    std::string metric_name() const;  // modulation name, or "rate=R"
    double es_lin(double snr_db) const;
};

// Apply one key=value option (the config-file and flag vocabulary coincide).
// Returns a diagnostic message, or empty on success.
std::string apply_option(RunDescription& run, const std::string& key,
                         const std::string& value);

// Structural validation; returns every violation found.
std::vector<std::string> validate_run(const RunDescription& run);

// Flat key=value text: one pair per line or comma-separated, '#' comments; a
// comma-separated token without '=' continues the previous value (list
// values). Throws ConfigError carrying all problems at once.
RunDescription parse_config(const std::string& text);

// "fig2" .. "fig7" parameter bundles; unstated axis ranges default to
// 0:2:30 dB and fig2's transmit-antenna set defaults to {4, 5}.
RunDescription figure_preset(const std::string& name);

struct SweepRow {
    std::string scheme; // "tas" | "joint"
    int nt = 0;
    int ns = 0;
    int nr = 0;
    double m = 1.0;
    std::string code;   // "g2" | "g3"
    std::string metric; // modulation name or "rate=R"
    double pe = 0.0;
    double snr_db = 0.0;
    double analytic = 0.0;
    std::optional<double> mc_mean;
    std::optional<double> mc_stderr;
    std::optional<double> asymptotic;

    bool operator==(const SweepRow&) const = default;
};

// Evaluate the request: one row per (variant, p_e, grid point), ordered by
// (n_t, n_r, p_e, snr) as listed. workers <= 0 uses the hardware count.
std::vector<SweepRow> run_sweep(const RunDescription& run, int workers = 0);

// CSV with the fixed header
//   scheme,nt,ns,nr,m,code,metric,pe,snr_db,analytic,mc_mean,mc_stderr,asymptotic
// doubles printed with %.17g so parsing an emitted file reproduces the rows
// exactly; absent optionals are empty fields.
std::string to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> from_csv(const std::string& text);

// dB position where the curve (ascending snr_db, decreasing metric) crosses
// `level`, interpolating log-linearly in the metric; NaN when out of range.
double crossing_db(const std::vector<double>& snr_db,
                   const std::vector<double>& metric, double level);

// Agreement report: per-curve max |analytic - mc|/mc and 3-sigma outlier
// count, measured high-SNR slope next to the diversity floor, and a dB-gap
// table at gap_level between each p_e > 0 curve and the matching ideal
// curve (taken from the rows, or computed at p_e = 0 when absent; axis says
// how snr_db maps to symbol SNR for that synthesis).
std::string compare_report(const std::vector<SweepRow>& rows,
                           double gap_level = 1e-5,
                           SnrAxis axis = SnrAxis::EsN0);

} // namespace antsel
