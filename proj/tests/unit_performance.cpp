#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "antsel/errors.hpp"
#include "antsel/feedback.hpp"
#include "antsel/performance.hpp"
#include "antsel/snr_model.hpp"
#include "antsel/specfun.hpp"

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

Tasc best_of(int ns) {
    Tasc t;
    for (int i = 1; i <= ns; ++i) t.ranks.push_back(i);
    return t;
}

// composite Simpson of f over [0, hi]
template <typename F>
double simpson(F f, double hi, int n) {
    double h = hi / n, acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f(i * h);
    }
    return acc * h / 3.0;
}

} // namespace

TEST_CASE("modulation descriptors") {
    ModulationSpec bpsk = parse_modulation("bpsk");
    CHECK(bpsk.bits_per_symbol() == 1);
    CHECK(bpsk.cep(0.0) == doctest::Approx(0.5));
    for (double g : {0.3, 1.0, 4.0})
        CHECK(bpsk.cep(g) ==
              doctest::Approx(gaussian_q(std::sqrt(2.0 * g))).epsilon(1e-14));

    CHECK(parse_modulation("cbfsk").cep(2.0) ==
          doctest::Approx(gaussian_q(std::sqrt(2.0))).epsilon(1e-14));
    CHECK(parse_modulation("ncbfsk").cep(2.0) ==
          doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(parse_modulation("dbpsk").cep(2.0) ==
          doctest::Approx(0.5 * std::exp(-2.0)).epsilon(1e-14));

    ModulationSpec qpsk = parse_modulation("qpsk");
    CHECK(qpsk.bits_per_symbol() == 2);
    CHECK(!qpsk.approximate);
    double q = gaussian_q(std::sqrt(3.0));
    CHECK(qpsk.cep(3.0) == doctest::Approx(2.0 * q - q * q).epsilon(1e-14));

    ModulationSpec psk8 = parse_modulation("8psk");
    CHECK(psk8.approximate);
    CHECK(psk8.bits_per_symbol() == 3);
    double s = std::sin(M_PI / 8.0);
    CHECK(psk8.cep(2.0) ==
          doctest::Approx(2.0 * gaussian_q(std::sqrt(4.0 * s * s)))
              .epsilon(1e-14));

    ModulationSpec qam16 = parse_modulation("16qam");
    CHECK(qam16.bits_per_symbol() == 4);
    double qq = gaussian_q(std::sqrt(3.0 / 15.0 * 5.0));
    CHECK(qam16.cep(5.0) ==
          doctest::Approx(3.0 * qq - 2.25 * qq * qq).epsilon(1e-13));
    CHECK(parse_modulation("mqam:16").kind == ModulationKind::Mqam);
    CHECK(parse_modulation("4pam").cep(3.0) ==
          doctest::Approx(1.5 * gaussian_q(std::sqrt(6.0 * 3.0 / 15.0)))
              .epsilon(1e-13));
    CHECK(parse_modulation("4psk").kind == ModulationKind::Qpsk);

    CHECK_THROWS_AS((void)parse_modulation("tribit"), ConfigError);
    CHECK_THROWS_AS((void)parse_modulation("8qam"), ConfigError);
    CHECK_THROWS_AS((void)parse_modulation("2psk"), ConfigError);
}

TEST_CASE("unified error integral anchors") {
    // max of two unit exponentials, (theta, eps, phi) = (1, 0, 1):
    // integral of e^-x (1 - e^-x)^2 equals 1/3
    SchemeConfig two = make_cfg(Scheme::JointTrasStbc, 2, 1, 1, Rational(1));
    Tasc best = tasc_of({1});
    CHECK(unified_j(two, best, 1.0, 0.0, 1.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(unified_j(two, best, 0.0, 0.0, 1.0, 1.0) == 0.0);
    CHECK(unified_j_hat(two, best, 0.0, 1.0, 1.0) == 0.0);

    // quadrature oracle on a config with selection and receive branches
    SchemeConfig cfg = make_cfg(Scheme::JointTrasStbc, 3, 2, 2, Rational(1));
    Tasc t12 = tasc_of({1, 2});
    for (double gbar : {0.8, 2.5}) {
        double theta = 0.7, eps = 0.5, phi = 1.3;
        double direct = simpson(
            [&](double x) {
                return x <= 0.0 ? 0.0
                                : theta * std::pow(x, eps) * std::exp(-phi * x) *
                                      output_cdf(cfg, t12, x, gbar);
            },
            60.0, 20000);
        CHECK(unified_j(cfg, t12, theta, eps, phi, gbar) ==
              doctest::Approx(direct).epsilon(1e-7));
    }
}

TEST_CASE("confluent error integral against quadrature") {
    SchemeConfig two = make_cfg(Scheme::JointTrasStbc, 2, 1, 1, Rational(1));
    Tasc best = tasc_of({1});
    double phi = 1.0;
    double direct = simpson(
        [&](double x) {
            return std::exp(-phi * x) * kummer_1f1(1.0, 1.5, 0.5 * phi * x) *
                   std::pow(1.0 - std::exp(-x), 2.0);
        },
        70.0, 20000);
    CHECK(unified_j_hat(two, best, 1.0, phi, 1.0) ==
          doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("closed hypergeometric path agrees with the pole path") {
    for (auto [sc, nt, ns, nr, m] :
         {std::tuple{Scheme::TasStbc, 3, 2, 2, Rational(1)},
          std::tuple{Scheme::JointTrasStbc, 3, 2, 2, Rational(1)},
          std::tuple{Scheme::JointTrasStbc, 4, 3, 1, Rational(2)}}) {
        SchemeConfig cfg = make_cfg(sc, nt, ns, nr, m);
        Tasc best = best_of(ns);
        for (double gbar : {1.0, 6.3}) {
            double a = unified_j(cfg, best, 0.5, 0.0, 0.7, gbar);
            double b = unified_j_closed(cfg, best, 0.5, 0.0, 0.7, gbar);
            CHECK(a == doctest::Approx(b).epsilon(1e-8));
            double ah = unified_j_hat(cfg, best, 0.5, 0.9, gbar);
            double bh = unified_j_hat_closed(cfg, best, 0.5, 0.9, gbar);
            CHECK(ah == doctest::Approx(bh).epsilon(1e-8));
        }
    }
}

TEST_CASE("selection mgf") {
    SchemeConfig two = make_cfg(Scheme::JointTrasStbc, 2, 1, 1, Rational(1));
    Tasc best = tasc_of({1});
    // max of two unit exponentials: M(1) = 2/2 - 2/3 = 1/3
    CHECK(mgf(two, best, 1.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(mgf(two, best, 1e-9, 1.0) == doctest::Approx(1.0).epsilon(1e-6));

    SchemeConfig cfg = make_cfg(Scheme::TasStbc, 4, 2, 2, Rational(1));
    Tasc t13 = tasc_of({1, 3});
    for (double s : {0.4, 1.7}) {
        double direct = simpson(
            [&](double x) {
                return std::exp(-s * x) * output_pdf(cfg, t13, x, 1.4);
            },
            90.0, 30000);
        CHECK(mgf(cfg, t13, s, 1.4) == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("average error rate identities") {
    // dbpsk average is half the mgf at 1
    for (auto [sc, nt, ns, nr, m] :
         {std::tuple{Scheme::TasStbc, 3, 2, 3, Rational(1)},
          std::tuple{Scheme::JointTrasStbc, 4, 3, 2, Rational(2)}}) {
        SchemeConfig cfg = make_cfg(sc, nt, ns, nr, m);
        Tasc best = best_of(ns);
        ModulationSpec dbpsk = parse_modulation("dbpsk");
        for (double gbar : {1.0, 8.0})
            CHECK(error_rate(cfg, best, dbpsk, gbar) ==
                  doctest::Approx(0.5 * mgf(cfg, best, 1.0, gbar))
                      .epsilon(1e-11));
    }

    // two-branch Rayleigh sum: textbook BPSK combining case by quadrature
    SchemeConfig sum2 = make_cfg(Scheme::JointTrasStbc, 2, 2, 1, Rational(1));
    Tasc both = tasc_of({1, 2});
    ModulationSpec bpsk = parse_modulation("bpsk");
    for (double gbar : {1.0, 4.0}) {
        double direct = simpson(
            [&](double x) {
                double z = 2.0 * x / gbar;
                double pdf = 4.0 / gbar * (x / gbar) * std::exp(-z);
                return pdf * gaussian_q(std::sqrt(2.0 * x));
            },
            40.0 * gbar + 40.0, 30000);
        // the sqrt kink of Q at zero limits composite-Simpson accuracy here
        CHECK(error_rate(sum2, both, bpsk, gbar) ==
              doctest::Approx(direct).epsilon(1e-5));
    }

    // every kind is consistent with quadrature of its cep on one config
    SchemeConfig cfg = make_cfg(Scheme::JointTrasStbc, 3, 2, 2, Rational(1));
    Tasc best = best_of(2);
    for (const char* name :
         {"bpsk", "cbfsk", "ncbfsk", "dbpsk", "qpsk", "8psk", "4pam", "16qam"}) {
        ModulationSpec mod = parse_modulation(name);
        double gbar = 2.0;
        double direct = simpson(
            [&](double x) {
                return output_pdf(cfg, best, x, gbar) * mod.cep(x);
            },
            120.0, 30000);
        CHECK(error_rate(cfg, best, mod, gbar) ==
              doctest::Approx(direct).epsilon(1e-7));
    }
}

TEST_CASE("outage probability") {
    SchemeConfig cfg = make_cfg(Scheme::JointTrasStbc, 4, 3, 2, Rational(2));
    Tasc best = best_of(3);
    // outage at rate R is the output CDF at 2^R - 1
    for (double gbar : {1.0, 5.0})
        CHECK(outage(cfg, best, 2.0, gbar) ==
              doctest::Approx(output_cdf(cfg, best, 3.0, gbar)).epsilon(1e-12));
    CHECK(outage(cfg, best, 1e-9, 2.0) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(outage(cfg, best, 2.0, 1e9) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("feedback-averaged metrics") {
    SchemeConfig cfg = make_cfg(Scheme::TasStbc, 3, 2, 3, Rational(1));
    Codebook cb = build_codebook(cfg, CodewordMapping::NaturalBinary);
    ModulationSpec qpsk = parse_modulation("qpsk");

    FeedbackModel ideal = build_feedback_model(0.0, cb);
    CHECK(averaged_error_rate(cfg, qpsk, ideal, 3.0) ==
          doctest::Approx(error_rate(cfg, best_of(2), qpsk, 3.0))
              .epsilon(1e-13));

    // hand mixing against per-pattern values
    FeedbackModel fm = build_feedback_model(0.1, cb);
    std::vector<double> per;
    for (const Tasc& t : cb.tasc_order)
        per.push_back(error_rate(cfg, t, qpsk, 3.0));
    CHECK(averaged_error_rate(cfg, qpsk, fm, 3.0) ==
          doctest::Approx(mix_metric(per, fm)).epsilon(1e-13));

    std::vector<double> po;
    for (const Tasc& t : cb.tasc_order) po.push_back(outage(cfg, t, 2.0, 3.0));
    CHECK(averaged_outage(cfg, 2.0, fm, 3.0) ==
          doctest::Approx(mix_metric(po, fm)).epsilon(1e-13));
}

TEST_CASE("diversity order bookkeeping") {
    SchemeConfig cfg = make_cfg(Scheme::JointTrasStbc, 4, 3, 2, Rational(2));
    CHECK(asymptotic_params(cfg, best_of(3)).ado == doctest::Approx(16.0));
    CHECK(asymptotic_params(cfg, tasc_of({2, 3, 4})).ado == doctest::Approx(12.0));
    for (const Tasc& t : enumerate_tascs(4, 3)) {
        double ado = asymptotic_params(cfg, t).ado;
        CHECK(ado >= 12.0 - 1e-12);
        CHECK(ado <= 16.0 + 1e-12);
    }

    // density 2x near zero for the max of two unit exponentials
    SchemeConfig two = make_cfg(Scheme::JointTrasStbc, 2, 1, 1, Rational(1));
    AsymptoticParams ap = asymptotic_params(two, tasc_of({1}));
    CHECK(ap.a == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ap.t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ap.ado == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("asymptote tracks the exact curve at high snr") {
    SchemeConfig two = make_cfg(Scheme::JointTrasStbc, 2, 1, 1, Rational(1));
    Tasc best = tasc_of({1});
    ModulationSpec bpsk = parse_modulation("bpsk");

    // power law: doubling gbar divides the estimate by 2^ado
    double lo = modulation_asymptote(two, best, bpsk, 50.0);
    double hi = modulation_asymptote(two, best, bpsk, 100.0);
    CHECK(lo / hi == doctest::Approx(4.0).epsilon(1e-12));

    double gbar = 1.0;
    double exact = error_rate(two, best, bpsk, gbar);
    while (exact > 1e-8) {
        gbar *= 2.0;
        exact = error_rate(two, best, bpsk, gbar);
    }
    double ratio = exact / modulation_asymptote(two, best, bpsk, gbar);
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);

    SchemeConfig ocfg = make_cfg(Scheme::JointTrasStbc, 4, 3, 2, Rational(2));
    Tasc obest = best_of(3);
    double o_lo = outage_asymptote(ocfg, obest, 2.0, 3000.0);
    double o_hi = outage_asymptote(ocfg, obest, 2.0, 6000.0);
    CHECK(o_lo / o_hi == doctest::Approx(std::pow(2.0, 16.0)).epsilon(1e-10));
}
