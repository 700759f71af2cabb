#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "antsel/errors.hpp"
#include "antsel/montecarlo.hpp"
#include "antsel/performance.hpp"
#include "antsel/sweep.hpp"

using namespace antsel;

namespace {

SchemeConfig make_cfg(Scheme s, int nt, int ns, int nr, Rational m) {
    SchemeConfig cfg;
    cfg.scheme = s;
    cfg.n_t = nt;
    cfg.n_s = ns;
    cfg.n_r = nr;
    cfg.m = m;
    cfg.code_rate = ns == 3 ? rat(1, 2) : Rational(1);
    return cfg;
}

Tasc tasc_of(std::initializer_list<int> ranks) {
    Tasc t;
    t.ranks = ranks;
    return t;
}

TrialPlan make_plan(const SchemeConfig& cfg, const char* mod, double pe,
                    double gbar, std::uint64_t trials) {
    TrialPlan plan;
    plan.cfg = cfg;
    plan.fm = build_feedback_model(
        pe, build_codebook(cfg, CodewordMapping::NaturalBinary));
    plan.modulation = parse_modulation(mod);
    plan.gbar = gbar;
    plan.trials = trials;
    plan.seed = 11;
    return plan;
}

} // namespace

TEST_CASE("channel sampling moments") {
    SchemeConfig cfg = make_cfg(Scheme::TasStbc, 3, 2, 2, Rational(2));
    cfg.omega = 1.6;
    RngStream rng(5, 0);
    std::vector<double> gains;
    double sum = 0.0, sq = 0.0;
    const int trials = 200000;
    const int cells = 6;
    for (int i = 0; i < trials; ++i) {
        sample_channel_powers(cfg, rng, gains);
        REQUIRE(gains.size() == 6);
        for (double g : gains) {
            sum += g;
            sq += g * g;
        }
    }
    double n = (double)trials * cells;
    double mean = sum / n;
    double var = sq / n - mean * mean;
    // Gamma(m, omega/m): mean omega, variance omega^2/m
    double se_mean = std::sqrt(var / n);
    CHECK(std::abs(mean - 1.6) < 4.0 * se_mean);
    double target_var = 1.6 * 1.6 / 2.0;
    CHECK(std::abs(var - target_var) < 0.02 * target_var);
}

TEST_CASE("exponential gains for unit fading figure") {
    SchemeConfig cfg = make_cfg(Scheme::JointTrasStbc, 2, 1, 1, Rational(1));
    RngStream rng(17, 0);
    std::vector<double> gains, all;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        sample_channel_powers(cfg, rng, gains);
        all.insert(all.end(), gains.begin(), gains.end());
    }
    std::sort(all.begin(), all.end());
    // Kolmogorov-Smirnov against Exp(1)
    double dmax = 0.0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        double f = 1.0 - std::exp(-all[i]);
        double lo = (double)i / all.size(), hi = (double)(i + 1) / all.size();
        dmax = std::max({dmax, std::abs(f - lo), std::abs(f - hi)});
    }
    // alpha = 0.01 threshold for n = 2e5
    CHECK(dmax < 1.63 / std::sqrt((double)all.size()));
}

TEST_CASE("selection on fixed gains") {
    // rows are receive antennas; joint selection re-ranks each row
    SchemeConfig cfg = make_cfg(Scheme::JointTrasStbc, 2, 1, 2, Rational(1));
    std::vector<double> snr{1.0, 3.0, 2.0, 1.0};
    CHECK(run_selection(snr, cfg, tasc_of({1}), ReceiveMode::ModelFaithful) ==
          doctest::Approx(3.0));
    CHECK(run_selection(snr, cfg, tasc_of({2}), ReceiveMode::ModelFaithful) ==
          doctest::Approx(1.0));
    // committed mode scores the branch that wins under the best pattern,
    // which re-ranking would not pick for the wrong pattern here
    std::vector<double> split{5.0, 1.0, 4.0, 3.0};
    CHECK(run_selection(split, cfg, tasc_of({2}), ReceiveMode::ModelFaithful) ==
          doctest::Approx(3.0));
    CHECK(run_selection(split, cfg, tasc_of({2}), ReceiveMode::Physical) ==
          doctest::Approx(1.0));
    CHECK(run_selection(split, cfg, tasc_of({1}), ReceiveMode::Physical) ==
          doctest::Approx(5.0));

    // no selection freedom when every antenna transmits
    SchemeConfig tas = make_cfg(Scheme::TasStbc, 2, 2, 2, Rational(1));
    CHECK(run_selection(snr, tas, tasc_of({1, 2}), ReceiveMode::ModelFaithful) ==
          doctest::Approx(7.0));
    SchemeConfig jall = make_cfg(Scheme::JointTrasStbc, 2, 2, 2, Rational(1));
    CHECK(run_selection(snr, jall, tasc_of({1, 2}), ReceiveMode::ModelFaithful) ==
          doctest::Approx(4.0));
}

TEST_CASE("feedback draw frequencies") {
    SchemeConfig cfg = make_cfg(Scheme::TasStbc, 3, 2, 1, Rational(1));
    FeedbackModel fm = build_feedback_model(
        0.1, build_codebook(cfg, CodewordMapping::NaturalBinary));

    FeedbackModel ideal = build_feedback_model(0.0, fm.codebook);
    RngStream rng0(3, 0);
    for (int i = 0; i < 200; ++i)
        CHECK(draw_feedback(ideal, rng0, FeedbackDrawMode::PaperModel) == 0);

    const int n = 200000;
    for (auto mode : {FeedbackDrawMode::PaperModel, FeedbackDrawMode::BitExact}) {
        std::vector<int> count(3, 0);
        RngStream rng(29, 1);
        for (int i = 0; i < n; ++i) ++count[draw_feedback(fm, rng, mode)];
        // this codebook is symmetric, so both wrong patterns share p_ef
        double pcf = 0.81 + 0.19 / 9.0;
        std::vector<double> want{pcf, (1.0 - pcf) / 2.0, (1.0 - pcf) / 2.0};
        for (int k = 0; k < 3; ++k) {
            double se = std::sqrt(want[k] * (1.0 - want[k]) / n);
            CHECK(std::abs((double)count[k] / n - want[k]) < 4.0 * se);
        }
    }
}

TEST_CASE("error estimate matches the analytic curve") {
    // zero-SNR ceiling
    SchemeConfig two = make_cfg(Scheme::JointTrasStbc, 2, 1, 1, Rational(1));
    TrialPlan tiny = make_plan(two, "bpsk", 0.0, 1e-9, 2000);
    CHECK(estimate_error_rate(tiny, 1).mean == doctest::Approx(0.5).epsilon(1e-6));

    // ideal feedback, single branch
    TrialPlan p0 = make_plan(two, "bpsk", 0.0, 4.0, 400000);
    Estimate e0 = estimate_error_rate(p0, 2);
    double a0 = error_rate(two, tasc_of({1}), parse_modulation("bpsk"), 4.0);
    CHECK(std::abs(e0.mean - a0) < 3.0 * e0.std_error);
    CHECK(e0.mean >= 0.0);
    CHECK(e0.mean <= 1.0);
    CHECK(e0.trials == 400000);

    // noisy feedback, receive selection, mid SNR
    SchemeConfig cfg = make_cfg(Scheme::TasStbc, 3, 2, 3, Rational(1));
    TrialPlan p1 = make_plan(cfg, "qpsk", 0.01, 6.0, 400000);
    Estimate e1 = estimate_error_rate(p1, 2);
    Codebook cb = build_codebook(cfg, CodewordMapping::NaturalBinary);
    double a1 = averaged_error_rate(cfg, parse_modulation("qpsk"),
                                    build_feedback_model(0.01, cb), 6.0);
    CHECK(std::abs(e1.mean - a1) < 3.0 * e1.std_error);

    // committed receive mode has no smoothed shortcut and still agrees for
    // a single receive branch, where both modes coincide
    TrialPlan p2 = make_plan(two, "bpsk", 0.2, 4.0, 400000);
    p2.receive_mode = ReceiveMode::Physical;
    Estimate e2 = estimate_error_rate(p2, 2);
    double a2 = averaged_error_rate(
        two, parse_modulation("bpsk"),
        build_feedback_model(0.2, build_codebook(two, CodewordMapping::NaturalBinary)),
        4.0);
    CHECK(std::abs(e2.mean - a2) < 4.0 * e2.std_error);
}

TEST_CASE("outage estimate matches the analytic curve") {
    SchemeConfig cfg = make_cfg(Scheme::JointTrasStbc, 4, 3, 2, Rational(2));
    Codebook cb = build_codebook(cfg, CodewordMapping::NaturalBinary);
    FeedbackModel fm = build_feedback_model(0.05, cb);
    for (double gbar : {2.0, 4.0, 8.0}) {
        TrialPlan plan = make_plan(cfg, "bpsk", 0.05, gbar, 200000);
        Estimate e = estimate_outage(plan, 2.0, 2);
        double a = averaged_outage(cfg, 2.0, fm, gbar);
        CHECK(std::abs(e.mean - a) < 3.5 * std::max(e.std_error, 1e-9));
    }
    // rate to zero and snr to infinity both drive outage to zero
    TrialPlan plan = make_plan(cfg, "bpsk", 0.05, 5.0, 20000);
    CHECK(estimate_outage(plan, 1e-12, 1).mean == doctest::Approx(0.0));
    TrialPlan rich = make_plan(cfg, "bpsk", 0.05, 1e9, 20000);
    CHECK(estimate_outage(rich, 2.0, 1).mean < 1e-12);
}

TEST_CASE("estimates are deterministic in the plan") {
    SchemeConfig cfg = make_cfg(Scheme::TasStbc, 3, 2, 2, Rational(1));
    TrialPlan plan = make_plan(cfg, "qpsk", 0.1, 3.0, 60000);
    Estimate a = estimate_error_rate(plan, 1);
    Estimate b = estimate_error_rate(plan, 3);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    plan.seed = 12;
    Estimate c = estimate_error_rate(plan, 2);
    CHECK(a.mean != c.mean);

    plan.receive_mode = ReceiveMode::Physical;
    Estimate pa = estimate_error_rate(plan, 1);
    Estimate pb = estimate_error_rate(plan, 4);
    CHECK(pa.mean == pb.mean);
}

TEST_CASE("wall clock guard reports completed work") {
    SchemeConfig cfg = make_cfg(Scheme::TasStbc, 5, 2, 3, Rational(1));
    TrialPlan plan = make_plan(cfg, "qpsk", 0.1, 3.0, 4000000000ull);
    plan.max_seconds = 0.02;
    try {
        estimate_error_rate(plan, 1);
        FAIL("expected the wall-clock guard to fire");
    } catch (const PartialResultError& e) {
        CHECK(e.completed_trials() > 0);
        CHECK(e.completed_trials() < plan.trials);
    }
}

TEST_CASE("grid parsing") {
    SnrGrid g = parse_snr_grid("0:2:30");
    std::vector<double> pts = g.points();
    REQUIRE(pts.size() == 16);
    CHECK(pts.front() == 0.0);
    CHECK(pts.back() == 30.0);
    CHECK_THROWS_AS((void)parse_snr_grid("abc"), ConfigError);
    CHECK_THROWS_AS((void)parse_snr_grid("1:2"), ConfigError);
    // a zero step parses but fails structural validation
    CHECK_THROWS_AS((void)parse_config("scheme=tas, nt=3, code=g2, mod=bpsk, "
                                       "nr=1, snr=5:0:10"),
                    ConfigError);
}

TEST_CASE("config text parsing") {
    RunDescription run = parse_config(
        "scheme=tas, nt=3, ns=2, nr=3, m=1, code=g2, mod=qpsk, pe=0.01, "
        "snr=0:2:30");
    CHECK(run.scheme == Scheme::TasStbc);
    CHECK(run.nt == std::vector<int>{3});
    CHECK(run.nr == std::vector<int>{3});
    CHECK(run.mod.kind == ModulationKind::Qpsk);
    CHECK(run.pe == std::vector<double>{0.01});
    CHECK(run.grid.points().size() == 16);

    CHECK_THROWS_AS((void)parse_config("scheme=joint, m=1.5, code=g2, mod=bpsk"),
                    ConfigError);
    CHECK_THROWS_AS(
        (void)parse_config("scheme=tas, m=1/2, nr=3, code=g2, mod=bpsk"),
        ConfigError);
    CHECK_THROWS_AS((void)parse_config("volume=11"), ConfigError);

    // every reported problem arrives in one throw
    try {
        (void)parse_config("scheme=joint, m=1.5, code=g9, mod=warble");
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(e.issues().size() >= 2);
    }
}

TEST_CASE("figure presets") {
    RunDescription f3 = figure_preset("fig3");
    CHECK(f3.scheme == Scheme::TasStbc);
    CHECK(f3.code == "g2");
    CHECK(f3.mod.kind == ModulationKind::Qpsk);
    CHECK(f3.nr == std::vector<int>{3});
    CHECK(f3.nt == std::vector<int>{3, 4});
    CHECK(f3.pe == std::vector<double>{0.0, 0.01, 0.2, 0.5});
    CHECK(to_double(f3.m) == 1.0);

    RunDescription f2 = figure_preset("fig2");
    CHECK(f2.scheme == Scheme::JointTrasStbc);
    CHECK(f2.is_outage);
    CHECK(f2.rate == 2.0);
    CHECK(f2.nr == std::vector<int>{1, 2});
    CHECK(f2.pe == std::vector<double>{0.05, 0.2});
    CHECK(to_double(f2.m) == 2.0);

    RunDescription f6 = figure_preset("fig6");
    CHECK(f6.mod.kind == ModulationKind::Cbfsk);
    CHECK(f6.nt == std::vector<int>{4, 5});
    CHECK(f6.nr == std::vector<int>{2});
    CHECK(to_double(f6.m) == 2.0);

    RunDescription f7 = figure_preset("fig7");
    CHECK(f7.scheme == Scheme::JointTrasStbc);
    CHECK(f7.code == "g2");
    CHECK(f7.nt == std::vector<int>{3});
    CHECK(f7.nr == std::vector<int>{1, 2, 3});
    CHECK(f7.pe == std::vector<double>{0.01, 0.1});

    for (const char* name : {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"})
        CHECK(validate_run(figure_preset(name)).empty());
    CHECK_THROWS_AS((void)figure_preset("fig9"), ConfigError);
}

TEST_CASE("sweep rows and csv round trip") {
    RunDescription run = parse_config(
        "scheme=tas, nt=3, ns=2, nr=2, m=1, code=g2, mod=qpsk, pe=0,0.1, "
        "snr=0:4:12, trials=20000, seed=9");
    run.with_mc = true;
    run.with_asymptote = true;
    std::vector<SweepRow> rows = run_sweep(run, 2);
    REQUIRE(rows.size() == 8);

    // ordered by (pe, snr); analytic column decreasing along each curve
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        if (rows[i].pe != rows[i + 1].pe) continue;
        CHECK(rows[i].snr_db < rows[i + 1].snr_db);
        CHECK(rows[i].analytic >= rows[i + 1].analytic);
    }
    for (const SweepRow& r : rows) {
        REQUIRE(r.mc_mean.has_value());
        REQUIRE(r.mc_stderr.has_value());
        REQUIRE(r.asymptotic.has_value());
        CHECK(r.analytic >= 0.0);
        CHECK(r.analytic <= 1.0);
    }

    std::string csv = to_csv(rows);
    std::vector<SweepRow> back = from_csv(csv);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i] == rows[i]);

    // identical bytes on a repeated run with the same seed
    CHECK(to_csv(run_sweep(run, 1)) == csv);
}

TEST_CASE("analytic-only rows skip optional columns") {
    RunDescription run = parse_config(
        "scheme=joint, nt=4, ns=3, nr=2, m=2, code=g3, rate=2, pe=0.05, "
        "snr=0:10:20");
    std::vector<SweepRow> rows = run_sweep(run, 1);
    REQUIRE(rows.size() == 3);
    for (const SweepRow& r : rows) {
        CHECK(!r.mc_mean.has_value());
        CHECK(!r.mc_stderr.has_value());
        CHECK(!r.asymptotic.has_value());
        CHECK(r.metric == "rate=2");
    }
    std::vector<SweepRow> back = from_csv(to_csv(rows));
    REQUIRE(back.size() == 3);
    CHECK(back == rows);
}

TEST_CASE("crossing interpolation") {
    std::vector<double> x{0.0, 2.0, 4.0};
    std::vector<double> y{1e-2, 1e-4, 1e-8};
    // log-linear inside a segment: 1e-3 sits halfway between 1e-2 and 1e-4
    CHECK(crossing_db(x, y, 1e-3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(crossing_db(x, y, 1e-6) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(crossing_db(x, y, 1e-4) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::isnan(crossing_db(x, y, 1e-9)));
    CHECK(std::isnan(crossing_db(x, y, 0.5)));
}

TEST_CASE("comparison report on synthetic perfect rows") {
    RunDescription run = parse_config(
        "scheme=tas, nt=3, ns=2, nr=2, m=1, code=g2, mod=qpsk, pe=0,0.1, "
        "snr=0:2:20");
    std::vector<SweepRow> rows = run_sweep(run, 1);
    for (SweepRow& r : rows) {
        r.mc_mean = r.analytic;
        r.mc_stderr = 1e-6;
    }
    std::string rep = compare_report(rows, 1e-3);
    CHECK(rep.find("max |analytic-mc|/mc = 0") != std::string::npos);
    CHECK(rep.find("0 of 11 points outside 3 sigma") != std::string::npos);
    CHECK(rep.find("db gaps vs ideal feedback") != std::string::npos);
    // the pe = 0.1 curve crosses 1e-3 to the right of the ideal curve
    std::size_t gap_at = rep.find("pe=0.1: ");
    gap_at = rep.find("pe=0.1: ", rep.find("db gaps"));
    REQUIRE(gap_at != std::string::npos);
    double gap = std::stod(rep.substr(gap_at + 8));
    CHECK(gap > 0.0);
    CHECK(gap < 6.0);

    std::vector<SweepRow> bare = run_sweep(
        parse_config("scheme=tas, nt=3, ns=2, nr=2, m=1, code=g2, mod=qpsk, "
                     "pe=0.1, snr=0:5:10"),
        1);
    CHECK_THROWS_AS((void)compare_report(bare, 1e-3), ConfigError);
}

TEST_CASE("option application diagnostics") {
    RunDescription run;
    CHECK(apply_option(run, "scheme", "joint").empty());
    CHECK(apply_option(run, "nt", "3,4").empty());
    CHECK(run.nt == std::vector<int>{3, 4});
    CHECK(!apply_option(run, "scheme", "sideways").empty());
    CHECK(!apply_option(run, "turbo", "on").empty());
    CHECK(apply_option(run, "snr-axis", "eb").empty());
    CHECK(run.axis == SnrAxis::EbN0);
    // out-of-range probabilities are a structural validation failure
    CHECK(apply_option(run, "pe", "1.7").empty());
    CHECK(apply_option(run, "code", "g2").empty());
    CHECK(apply_option(run, "mod", "bpsk").empty());
    bool flagged = false;
    for (const std::string& s : validate_run(run))
        flagged = flagged || s.find("pe=1.7") != std::string::npos;
    CHECK(flagged);
}
