#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "antsel/acceptance.hpp"
#include "antsel/errors.hpp"
#include "antsel/sweep.hpp"

namespace {

using namespace antsel;

// Flags funnel through the same key=value vocabulary as the config file so
// the two surfaces cannot drift apart. Order of application: config file
// first, then flags in command-line order.
struct SweepArgs {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> kv;
    int workers = 0;
};

void add_sweep_flags(CLI::App* cmd, SweepArgs& args, bool with_config) {
    if (with_config)
        cmd->add_option("--config", args.config_path,
                        "key=value config file (flags override it)");
    cmd->add_option("--workers", args.workers,
                    "Monte Carlo worker threads (0: hardware count)");
    auto key = [cmd, &args](const std::string& flag, const std::string& k,
                            const std::string& help) {
        cmd->add_option_function<std::string>(
               flag,
               [&args, k](const std::string& v) { args.kv.emplace_back(k, v); },
               help)
            ->take_last();
    };
    key("--scheme", "scheme", "joint | tas");
    key("--nt", "nt", "transmit antennas, single value or comma list");
    key("--ns", "ns", "selected transmit antennas (0: derive from code)");
    key("--nr", "nr", "receive antennas, single value or comma list");
    key("--m", "m", "Nakagami fading figure, integer or p/q");
    key("--code", "code", "g2 | g3");
    key("--code-rate", "code-rate", "STBC symbol rate (default from code)");
    key("--mod", "mod",
        "bpsk|cbfsk|ncbfsk|dbpsk|qpsk|mpsk:M|mpam:M|mqam:M (or e.g. 16qam)");
    key("--rate", "rate", "outage target rate in bit/s/Hz");
    key("--snr", "snr", "dB grid start:step:stop, both ends inclusive");
    key("--snr-axis", "snr-axis", "es | eb");
    key("--trials", "trials", "Monte Carlo trials per point");
    key("--seed", "seed", "Monte Carlo seed");
    key("--feedback-mode", "feedback-mode", "paper | bit-exact");
    key("--receive-mode", "receive-mode", "model | physical");
    key("--mapping", "mapping", "natural | perm=i,j,...");
    key("--out", "out", "output CSV path (default: stdout)");
    cmd->add_option_function<std::vector<std::string>>(
           "--pe",
           [&args](const std::vector<std::string>& vs) {
               std::string joined;
               for (const std::string& v : vs) {
                   if (!joined.empty()) joined += ',';
                   joined += v;
               }
               args.kv.emplace_back("pe", joined);
           },
           "feedback bit error probability, repeatable or comma list")
        ->take_all();
}

RunDescription build_run(const SweepArgs& args, const RunDescription* base) {
    RunDescription run;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in)
            throw ConfigError("cannot open config file: " + args.config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        run = parse_config(ss.str());
    } else if (base) {
        run = *base;
    }
    std::vector<std::string> issues;
    for (const auto& [k, v] : args.kv) {
        std::string err = apply_option(run, k, v);
        if (!err.empty()) issues.push_back(err);
    }
    for (std::string& s : validate_run(run)) issues.push_back(std::move(s));
    if (!issues.empty()) throw ConfigError(issues);
    return run;
}

int emit(const RunDescription& run, int workers) {
    std::vector<SweepRow> rows = run_sweep(run, workers);
    std::string csv = to_csv(rows);
    if (run.out_path.empty()) {
        std::fputs(csv.c_str(), stdout);
        return 0;
    }
    std::ofstream out(run.out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + run.out_path);
    out << csv;
    std::fprintf(stderr, "%zu rows -> %s\n", rows.size(),
                 run.out_path.c_str());
    return 0;
}

int run_check(const std::vector<int>& which, int workers) {
    std::vector<CriterionResult> results =
        run_acceptance(which, stderr, workers);
    bool ok = true;
    for (const CriterionResult& r : results) {
        std::printf("criterion %d: %s  %s  (%.1fs / %.0fs)\n", r.id,
                    r.pass ? "PASS" : "FAIL", r.detail.c_str(), r.seconds,
                    r.budget_seconds);
        ok = ok && r.pass;
    }
    return ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"antenna-selection STBC performance toolkit"};
    app.require_subcommand(1);

    SweepArgs an, si, as, fi;
    std::string fig_name, compare_path;
    double gap_level = 1e-5;
    std::string gap_axis = "es";
    bool fig_mc = false, fig_asy = false;
    std::vector<int> criteria;
    int check_workers = 0;

    CLI::App* analyze =
        app.add_subcommand("analyze", "analytic sweep to CSV");
    add_sweep_flags(analyze, an, true);

    CLI::App* simulate =
        app.add_subcommand("simulate", "sweep with Monte Carlo columns");
    add_sweep_flags(simulate, si, true);

    CLI::App* asymptote =
        app.add_subcommand("asymptote", "sweep with high-SNR asymptote column");
    add_sweep_flags(asymptote, as, true);

    CLI::App* figure =
        app.add_subcommand("figure", "run a fig2..fig7 preset bundle");
    figure->add_option("name", fig_name, "fig2 | fig3 | ... | fig7")
        ->required();
    add_sweep_flags(figure, fi, false);
    figure->add_flag("--simulate", fig_mc, "add Monte Carlo columns");
    figure->add_flag("--asymptote", fig_asy, "add asymptote column");

    CLI::App* compare =
        app.add_subcommand("compare", "agreement and dB-gap report for a CSV");
    compare->add_option("csv", compare_path, "CSV produced by a sweep")
        ->required();
    compare->add_option("--gap-level", gap_level,
                        "metric level for the dB-gap table");
    compare->add_option("--snr-axis", gap_axis,
                        "es | eb: how snr_db maps to symbol SNR");

    CLI::App* check =
        app.add_subcommand("check", "run the verification suite");
    check->add_option("--criterion", criteria,
                      "check number 1..9, repeatable (default: all)");
    check->add_option("--workers", check_workers,
                      "Monte Carlo worker threads (0: hardware count)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*analyze) {
            RunDescription run = build_run(an, nullptr);
            run.with_mc = false;
            run.with_asymptote = false;
            return emit(run, an.workers);
        }
        if (*simulate) {
            RunDescription run = build_run(si, nullptr);
            run.with_mc = true;
            return emit(run, si.workers);
        }
        if (*asymptote) {
            RunDescription run = build_run(as, nullptr);
            run.with_asymptote = true;
            return emit(run, as.workers);
        }
        if (*figure) {
            RunDescription preset = figure_preset(fig_name);
            RunDescription run = build_run(fi, &preset);
            if (fig_mc) run.with_mc = true;
            if (fig_asy) run.with_asymptote = true;
            return emit(run, fi.workers);
        }
        if (*compare) {
            std::ifstream in(compare_path, std::ios::binary);
            if (!in)
                throw ConfigError("cannot open CSV file: " + compare_path);
            std::stringstream ss;
            ss << in.rdbuf();
            SnrAxis axis = gap_axis == "eb" ? SnrAxis::EbN0 : SnrAxis::EsN0;
            if (gap_axis != "es" && gap_axis != "eb")
                throw ConfigError("snr-axis must be es or eb, got " + gap_axis);
            std::fputs(compare_report(from_csv(ss.str()), gap_level, axis)
                           .c_str(),
                       stdout);
            return 0;
        }
        if (*check) return run_check(criteria, check_workers);
    } catch (const ConfigError& e) {
        for (const std::string& issue : e.issues())
            std::fprintf(stderr, "config error: %s\n", issue.c_str());
        return 1;
    } catch (const PartialResultError& e) {
        std::fprintf(stderr,
                     "evaluation interrupted: %s (%llu trials completed)\n",
                     e.what(),
                     static_cast<unsigned long long>(e.completed_trials()));
        return 2;
    } catch (const EvalError& e) {
        std::fprintf(stderr, "evaluation error: %s\n", e.what());
        return 2;
    }
    return 0;
}
