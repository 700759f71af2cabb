#include "antsel/acceptance.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "antsel/feedback.hpp"
#include "antsel/montecarlo.hpp"
#include "antsel/performance.hpp"
#include "antsel/scheme.hpp"
#include "antsel/snr_model.hpp"
#include "antsel/sweep.hpp"

namespace antsel {
namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    std::va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void progress(std::FILE* log, const char* f, ...) {
    if (!log) return;
    char buf[512];
    std::va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    std::fprintf(log, "%s\n", buf);
    std::fflush(log);
}

SchemeConfig make_cfg(Scheme s, int nt, int ns, int nr, Rational m,
                      Rational cr) {
    SchemeConfig c;
    c.scheme = s;
    c.n_t = nt;
    c.n_s = ns;
    c.n_r = nr;
    c.m = m;
    c.code_rate = cr;
    return c;
}

Tasc first_pattern(int ns) {
    Tasc t;
    for (int i = 1; i <= ns; ++i) t.ranks.push_back(i);
    return t;
}

template <class F>
double simpson_half(const F& f, double a, double fa, double b, double fb,
                    double fm, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double flm = f(0.5 * (a + m));
    const double frm = f(0.5 * (m + b));
    const double h = b - a;
    const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_half(f, a, fa, m, fm, flm, 0.5 * tol, depth - 1) +
           simpson_half(f, m, fm, b, fb, frm, 0.5 * tol, depth - 1);
}

// adaptive Simpson with absolute tolerance; the fixed pre-split keeps a
// narrow integrand from hiding between the first probe points
template <class F>
double integrate(const F& f, double a, double b, double tol, int panels = 16) {
    if (!(b > a)) return 0.0;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double pa = a + k * h, pb = a + (k + 1) * h;
        total += simpson_half(f, pa, f(pa), pb, f(pb), f(0.5 * (pa + pb)),
                              tol / panels, 36);
    }
    return total;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k)
        g[k] = lo * std::pow(hi / lo, double(k) / (n - 1));
    return g;
}

// db value where the (monotone decreasing) metric crosses the level;
// requires f(lo) > level > f(hi)
double crossing_bisect_db(const std::function<double(double)>& f, double level,
                          double lo, double hi) {
    for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double db_lin(double db) { return std::pow(10.0, db / 10.0); }

// ---- check 1: analytic feedback distribution vs exhaustive bit flips ----

CriterionResult check_feedback_enumeration(std::FILE* log) {
    CriterionResult r;
    r.id = 1;
    const double pes[] = {0.0001, 0.005, 0.01, 0.05, 0.1, 0.2, 0.5};
    double worst = 0.0;
    std::string where = "-";
    int cases = 0;
    for (int nt = 1; nt <= 6; ++nt) {
        for (int ns = 1; ns <= nt; ++ns) {
            const SchemeConfig cfg =
                make_cfg(Scheme::TasStbc, nt, ns, 1, Rational(1), Rational(1));
            const Codebook cb = build_codebook(cfg, CodewordMapping::NaturalBinary);
            for (double pe : pes) {
                ++cases;
                std::vector<double> pw(cb.eta + 1);
                for (int w = 0; w <= cb.eta; ++w)
                    pw[w] = std::pow(pe, w) * std::pow(1.0 - pe, cb.eta - w);
                // every sent codeword against every flip mask; improper words
                // spread uniformly over the patterns
                std::vector<long double> dist(cb.k, 0.0L);
                for (int s = 0; s < cb.k; ++s) {
                    for (std::uint32_t e = 0; e < std::uint32_t(cb.l); ++e) {
                        const long double pr = pw[std::popcount(e)] / cb.k;
                        int idx = -1;
                        if (cb.proper(cb.codewords[s] ^ e, &idx))
                            dist[(idx - s + cb.k) % cb.k] += pr;
                        else
                            for (int o = 0; o < cb.k; ++o) dist[o] += pr / cb.k;
                    }
                }
                const std::vector<double> tm = bit_exact_transition_matrix(pe, cb);
                double dev =
                    std::abs(double(dist[0]) - prob_correct_feedback(pe, cb));
                for (int o = 0; o < cb.k; ++o)
                    dev = std::max(dev, std::abs(double(dist[o]) - tm[o]));
                if (dev > worst) {
                    worst = dev;
                    where = fmt("nt=%d ns=%d pe=%g", nt, ns, pe);
                }
            }
        }
    }
    r.pass = worst <= 1e-12;
    r.detail = fmt("%d cases, worst |dev| %.2e at %s (tol 1e-12)", cases, worst,
                   where.c_str());
    progress(log, "  [1] %s", r.detail.c_str());
    return r;
}

// ---- check 2: selected-pair MGF vs nested order-statistics quadrature ----

CriterionResult check_selection_mgf_oracle(std::FILE* log) {
    CriterionResult r;
    r.id = 2;
    const double gbar = 1.7;
    const double svals[] = {0.1, 0.5, 1.0, 2.0, 5.0};
    const struct {
        Rational m;
        int nr;
    } mcases[] = {{Rational(1), 1},
                  {Rational(2), 1},
                  {Rational(3), 1},
                  {rat(1, 2), 2}};
    const double fact[8] = {1, 1, 2, 6, 24, 120, 720, 5040};
    double worst = 0.0;
    std::string where = "-";
    int cases = 0;
    for (int nt = 2; nt <= 4; ++nt) {
        for (const auto& mc : mcases) {
            const SchemeConfig cfg =
                make_cfg(Scheme::TasStbc, nt, 2, mc.nr, mc.m, Rational(1));
            double v_hi = 8.0 * gbar;
            while (element_snr_cdf(cfg, v_hi, gbar) < 1.0 - 5e-15 && v_hi < 1e6)
                v_hi *= 1.25;
            for (int i = 1; i < nt; ++i) {
                for (int j = i + 1; j <= nt; ++j) {
                    Tasc tasc;
                    tasc.ranks = {i, j};
                    const double comb =
                        fact[nt] / (fact[i - 1] * fact[j - i - 1] * fact[nt - j]);
                    for (double s : svals) {
                        ++cases;
                        const double href = mgf(cfg, tasc, s, gbar);
                        const double tol = 2e-7 * href;
                        // e^-su and the element tail cap the support
                        const double span =
                            80.0 / (s + to_double(mc.m) / gbar);
                        // joint density of the ranked pair (descending ranks
                        // i < j, values u >= v), total integrated with the
                        // inner variable conditioned on the outer
                        auto mass = [&](double v) {
                            const double fv = element_snr_cdf(cfg, v, gbar);
                            const double inner = integrate(
                                [&](double u) {
                                    const double fu =
                                        element_snr_cdf(cfg, u, gbar);
                                    return std::exp(-s * u) *
                                           std::pow(1.0 - fu, i - 1) *
                                           element_snr_pdf(cfg, u, gbar) *
                                           std::pow(fu - fv, j - i - 1);
                                },
                                v, std::min(v_hi, v + span), 0.5 * tol / comb,
                                6);
                            return std::exp(-s * v) *
                                   element_snr_pdf(cfg, v, gbar) *
                                   std::pow(fv, nt - j) * inner;
                        };
                        const double oracle =
                            comb * integrate(mass, 0.0, std::min(v_hi, span),
                                             0.5 * tol / comb, 12);
                        const double dev = std::abs(oracle - href) / href;
                        if (dev > worst) {
                            worst = dev;
                            where = fmt("nt=%d m=%s nr=%d ranks=(%d,%d) s=%g",
                                        nt, to_string(mc.m).c_str(), mc.nr, i,
                                        j, s);
                        }
                    }
                }
            }
        }
    }
    r.pass = worst <= 1e-6;
    r.detail = fmt("%d transforms, worst rel dev %.2e at %s (tol 1e-6)", cases,
                   worst, where.c_str());
    progress(log, "  [2] %s", r.detail.c_str());
    return r;
}

// ---- check 3: sampled selection output vs analytic distribution ----

CriterionResult check_selection_distribution(std::FILE* log, int workers) {
    (void)workers;
    CriterionResult r;
    r.id = 3;
    struct Pair {
        SchemeConfig cfg;
        std::vector<int> ranks;
    };
    const std::vector<Pair> pairs = {
        {make_cfg(Scheme::TasStbc, 3, 2, 3, Rational(1), Rational(1)), {1, 2}},
        {make_cfg(Scheme::TasStbc, 3, 2, 3, Rational(1), Rational(1)), {2, 3}},
        {make_cfg(Scheme::TasStbc, 4, 2, 2, rat(1, 2), Rational(1)), {1, 2}},
        {make_cfg(Scheme::TasStbc, 5, 3, 1, Rational(2), rat(1, 2)), {2, 4, 5}},
        {make_cfg(Scheme::JointTrasStbc, 3, 2, 2, Rational(1), Rational(1)),
         {1, 2}},
        {make_cfg(Scheme::JointTrasStbc, 3, 2, 2, Rational(1), Rational(1)),
         {2, 3}},
        {make_cfg(Scheme::JointTrasStbc, 4, 3, 2, Rational(2), rat(1, 2)),
         {1, 2, 3}},
        {make_cfg(Scheme::JointTrasStbc, 4, 2, 3, Rational(1), Rational(1)),
         {1, 3}},
    };
    const std::size_t n = 1000000;
    const double gbar = 2.0;
    const double ks_crit = 1.6276 / std::sqrt(double(n));
    double worst_ks = 0.0, worst_pdf = 0.0;
    std::string where = "-";
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const SchemeConfig& cfg = pairs[p].cfg;
        Tasc tasc;
        tasc.ranks = pairs[p].ranks;
        std::vector<double> xs(n);
        std::vector<double> gains;
        for (std::size_t t = 0; t < n; ++t) {
            RngStream rng(901 + p, t);
            sample_channel_powers(cfg, rng, gains);
            for (double& g : gains) g *= gbar; // omega = 1
            xs[t] = run_selection(gains, cfg, tasc, ReceiveMode::ModelFaithful);
        }
        std::sort(xs.begin(), xs.end());
        double d = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double F = output_cdf(cfg, tasc, xs[t], gbar);
            d = std::max(d, std::max(F - double(t) / n, double(t + 1) / n - F));
        }
        const auto bm = branch_model(cfg, tasc);
        double x_hi = 8.0 * gbar;
        while (branch_cdf(*bm, x_hi, gbar) < 1.0 - 1e-12 && x_hi < 1e7)
            x_hi *= 1.25;
        const double unit = integrate(
            [&](double x) { return branch_pdf(*bm, x, gbar); }, 0.0, x_hi,
            1e-12);
        const double pdf_dev = std::abs(unit - 1.0);
        progress(log, "  [3] pair %zu: KS D=%.2e (crit %.2e), pdf dev %.1e",
                 p + 1, d, ks_crit, pdf_dev);
        if (d > worst_ks) {
            worst_ks = d;
            where = fmt("pair %zu", p + 1);
        }
        worst_pdf = std::max(worst_pdf, pdf_dev);
    }
    r.pass = worst_ks < ks_crit && worst_pdf <= 1e-9;
    r.detail = fmt("8 pairs x 1e6 draws, worst KS D %.2e at %s (crit %.2e), "
                   "worst pdf unit dev %.1e (tol 1e-9)",
                   worst_ks, where.c_str(), ks_crit, worst_pdf);
    return r;
}

// ---- check 4: error-rate integrals, three independent evaluations ----

struct JProbe {
    double theta = 0.0, eps = 0.0, phi = 0.0;
};

struct ModProbe {
    const char* name;
    std::vector<JProbe> js;
    // theta_hat, phi_hat pairs for the squared-Q cross term
    std::vector<std::pair<double, double>> jhats;
};

JProbe one_term(double l1, double l2, double l3) {
    return {l3 * std::pow(l2, l1) / (2.0 * std::tgamma(l1)), l1 - 1.0, l2};
}

ModProbe quad_kind(const char* name, double l4, double l5, double l6) {
    ModProbe mp{name, {}, {}};
    mp.js.push_back({std::sqrt(l4 / (8.0 * M_PI)) * (l5 - l6), -0.5, l4 / 2.0});
    mp.jhats.emplace_back(l4 * l6 / (2.0 * M_PI), l4);
    return mp;
}

std::vector<ModProbe> modulation_probes() {
    std::vector<ModProbe> mods;
    mods.push_back({"bpsk", {one_term(0.5, 1.0, 1.0)}, {}});
    mods.push_back({"cbfsk", {one_term(0.5, 0.5, 1.0)}, {}});
    mods.push_back({"ncbfsk", {one_term(1.0, 0.5, 1.0)}, {}});
    mods.push_back({"dbpsk", {one_term(1.0, 1.0, 1.0)}, {}});
    const double s8 = std::sin(M_PI / 8.0);
    mods.push_back({"8psk", {one_term(0.5, s8 * s8, 2.0)}, {}});
    const double m_pam = 4.0;
    mods.push_back({"4pam",
                    {{std::sqrt(3.0 * (m_pam - 1.0) /
                                (M_PI * m_pam * m_pam * (m_pam + 1.0))),
                      -0.5, 3.0 / (m_pam * m_pam - 1.0)}},
                    {}});
    mods.push_back(quad_kind("qpsk", 1.0, 2.0, 1.0));
    const double m_qam = 16.0;
    mods.push_back(quad_kind("16qam", 3.0 / (m_qam - 1.0),
                             4.0 - 4.0 / std::sqrt(m_qam),
                             (2.0 - 2.0 / std::sqrt(m_qam)) *
                                 (2.0 - 2.0 / std::sqrt(m_qam))));
    return mods;
}

double j_quadrature(const SchemeConfig& cfg, const Tasc& tasc, const JProbe& jp,
                    double gbar, double hint) {
    if (jp.eps == 0.0) {
        const double x_hi = 60.0 / jp.phi;
        return jp.theta *
               integrate(
                   [&](double x) {
                       return std::exp(-jp.phi * x) *
                              output_cdf(cfg, tasc, x, gbar);
                   },
                   0.0, x_hi, 1e-9 * hint / jp.theta);
    }
    // eps = -1/2: x = v^2 removes the endpoint singularity
    const double v_hi = std::sqrt(60.0 / jp.phi);
    return 2.0 * jp.theta *
           integrate(
               [&](double v) {
                   return std::exp(-jp.phi * v * v) *
                          output_cdf(cfg, tasc, v * v, gbar);
               },
               0.0, v_hi, 0.5e-9 * hint / jp.theta);
}

double jhat_quadrature(const SchemeConfig& cfg, const Tasc& tasc, double theta,
                       double phi, double gbar, double hint) {
    // 1F1(1; 3/2; z) = e^z sqrt(pi / (4 z)) erf(sqrt(z)), z = phi x / 2
    const double pref = theta * std::sqrt(2.0 * M_PI / phi);
    const double v_hi = std::sqrt(120.0 / phi);
    return pref * integrate(
                      [&](double v) {
                          return std::exp(-0.5 * phi * v * v) *
                                 std::erf(v * std::sqrt(0.5 * phi)) *
                                 output_cdf(cfg, tasc, v * v, gbar);
                      },
                      0.0, v_hi, 1e-9 * hint / pref);
}

CriterionResult check_dual_path_integrals(std::FILE* log) {
    CriterionResult r;
    r.id = 4;
    struct Case {
        SchemeConfig cfg;
        double g_lo, g_hi;
    };
    const std::vector<Case> cases = {
        {make_cfg(Scheme::TasStbc, 3, 2, 3, Rational(1), Rational(1)), 0.1, 2.0},
        {make_cfg(Scheme::TasStbc, 4, 2, 2, rat(1, 2), Rational(1)), 0.1, 12.0},
        {make_cfg(Scheme::TasStbc, 5, 3, 1, Rational(2), rat(1, 2)), 0.1, 2.0},
        {make_cfg(Scheme::JointTrasStbc, 3, 2, 2, Rational(1), Rational(1)),
         0.1, 12.0},
        {make_cfg(Scheme::JointTrasStbc, 4, 2, 3, Rational(1), Rational(1)),
         0.1, 2.0},
        {make_cfg(Scheme::JointTrasStbc, 4, 3, 2, Rational(1), rat(1, 2)), 0.1,
         4.0},
    };
    const std::vector<ModProbe> mods = modulation_probes();
    double worst_dual = 0.0, worst_quad = 0.0;
    std::string where_dual = "-", where_quad = "-";
    int points = 0;
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const SchemeConfig& cfg = cases[ci].cfg;
        const Tasc c1 = first_pattern(cfg.n_s);
        for (double gbar : geometric_grid(cases[ci].g_lo, cases[ci].g_hi, 10)) {
            for (const ModProbe& mp : mods) {
                auto note = [&](double dual, double quad) {
                    ++points;
                    if (dual > worst_dual) {
                        worst_dual = dual;
                        where_dual = fmt("case %zu %s gbar=%.3g", ci + 1,
                                         mp.name, gbar);
                    }
                    if (quad > worst_quad) {
                        worst_quad = quad;
                        where_quad = fmt("case %zu %s gbar=%.3g", ci + 1,
                                         mp.name, gbar);
                    }
                };
                for (const JProbe& jp : mp.js) {
                    const double jb =
                        unified_j(cfg, c1, jp.theta, jp.eps, jp.phi, gbar);
                    const double ja = unified_j_closed(cfg, c1, jp.theta,
                                                       jp.eps, jp.phi, gbar);
                    const double jq =
                        j_quadrature(cfg, c1, jp, gbar, std::abs(jb));
                    note(std::abs(ja - jb) / std::abs(jb),
                         std::max(std::abs(ja - jq), std::abs(jb - jq)) /
                             std::abs(jq));
                }
                for (const auto& [th, ph] : mp.jhats) {
                    const double jb = unified_j_hat(cfg, c1, th, ph, gbar);
                    const double ja =
                        unified_j_hat_closed(cfg, c1, th, ph, gbar);
                    const double jq =
                        jhat_quadrature(cfg, c1, th, ph, gbar, std::abs(jb));
                    note(std::abs(ja - jb) / std::abs(jb),
                         std::max(std::abs(ja - jq), std::abs(jb - jq)) /
                             std::abs(jq));
                }
            }
        }
        progress(log, "  [4] case %zu done (worst dual %.1e, quad %.1e)",
                 ci + 1, worst_dual, worst_quad);
    }
    r.pass = worst_dual <= 1e-8 && worst_quad <= 1e-6;
    r.detail = fmt("%d integrals, dual-path %.2e at %s (tol 1e-8), "
                   "vs quadrature %.2e at %s (tol 1e-6)",
                   points, worst_dual, where_dual.c_str(), worst_quad,
                   where_quad.c_str());
    return r;
}

// ---- check 5: feedback-error dB penalties at reference error rates ----

CriterionResult check_reference_gaps(std::FILE* log) {
    CriterionResult r;
    r.id = 5;
    struct Curve {
        const char* label;
        SchemeConfig cfg;
        const char* mod;
        std::vector<std::pair<double, double>> gaps; // pe -> expected dB gap
    };
    // Expected penalties transcribed from printed performance curves. The
    // pe=0.5 rows agree with exact evaluation at the stated 1e-5 read level;
    // most pe<0.5 rows imply a different read level (every bpsk row sits near
    // 1e-6, several rows near 1e-4, and the two 16qam rows contradict each
    // other), so no evaluation can satisfy the whole table and this check is
    // expected to report honest failures for the inconsistent rows.
    const std::vector<Curve> curves = {
        {"tas g2 3x3",
         make_cfg(Scheme::TasStbc, 3, 2, 3, Rational(1), Rational(1)),
         "qpsk",
         {{0.01, 0.14}, {0.2, 1.4}, {0.5, 2.4}}},
        {"tas g2 4x3",
         make_cfg(Scheme::TasStbc, 4, 2, 3, Rational(1), Rational(1)),
         "qpsk",
         {{0.01, 0.36}, {0.2, 2.2}, {0.5, 3.5}}},
        {"tas g3 4x2",
         make_cfg(Scheme::TasStbc, 4, 3, 2, rat(1, 2), rat(1, 2)),
         "16qam",
         {{0.01, 0.45}, {0.2, 3.25}, {0.5, 3.9}}},
        {"tas g3 5x2",
         make_cfg(Scheme::TasStbc, 5, 3, 2, rat(1, 2), rat(1, 2)),
         "16qam",
         {{0.01, 0.8}, {0.2, 4.3}, {0.5, 6.1}}},
        {"joint g2 3x3",
         make_cfg(Scheme::JointTrasStbc, 3, 2, 3, Rational(1), Rational(1)),
         "qpsk",
         {{0.01, 0.4}, {0.2, 2.75}, {0.5, 4.0}}},
        {"joint g2 4x3",
         make_cfg(Scheme::JointTrasStbc, 4, 2, 3, Rational(1), Rational(1)),
         "qpsk",
         {{0.01, 1.3}, {0.2, 4.5}, {0.5, 6.0}}},
        {"joint g3 4x2",
         make_cfg(Scheme::JointTrasStbc, 4, 3, 2, Rational(2), rat(1, 2)),
         "cbfsk",
         {{0.01, 0.3}, {0.2, 1.1}, {0.5, 1.65}}},
        {"joint g3 5x2",
         make_cfg(Scheme::JointTrasStbc, 5, 3, 2, Rational(2), rat(1, 2)),
         "cbfsk",
         {{0.01, 0.25}, {0.2, 1.75}, {0.5, 2.6}}},
        {"joint g2 3x1",
         make_cfg(Scheme::JointTrasStbc, 3, 2, 1, Rational(1), Rational(1)),
         "bpsk",
         {{0.01, 1.6}, {0.1, 5.7}}},
        {"joint g2 3x2",
         make_cfg(Scheme::JointTrasStbc, 3, 2, 2, Rational(1), Rational(1)),
         "bpsk",
         {{0.01, 1.2}, {0.1, 3.7}}},
        {"joint g2 3x3",
         make_cfg(Scheme::JointTrasStbc, 3, 2, 3, Rational(1), Rational(1)),
         "bpsk",
         {{0.01, 1.1}, {0.1, 3.1}}},
    };
    const double level = 1e-5;
    double worst = 0.0;
    std::string where = "-";
    int gaps = 0, within = 0;
    for (const Curve& cv : curves) {
        const SchemeConfig& cfg = cv.cfg;
        const Tasc c1 = first_pattern(cfg.n_s);
        const ModulationSpec mod = parse_modulation(cv.mod);
        const Codebook cb = build_codebook(cfg, CodewordMapping::NaturalBinary);
        auto cross = [&](const std::function<double(double)>& f) {
            double hi = 40.0;
            while (f(hi) >= level && hi < 90.0) hi += 10.0;
            return crossing_bisect_db(f, level, -10.0, hi);
        };
        const double base = cross(
            [&](double db) { return error_rate(cfg, c1, mod, db_lin(db)); });
        for (const auto& [pe, expect] : cv.gaps) {
            ++gaps;
            const FeedbackModel fm = build_feedback_model(pe, cb);
            const double at = cross([&](double db) {
                return averaged_error_rate(cfg, mod, fm, db_lin(db));
            });
            const double dev = std::abs(at - base - expect);
            if (dev <= 0.15) ++within;
            progress(log, "  [5] %s %s pe=%g: gap %.3f dB (expect %.2f)",
                     cv.label, cv.mod, pe, at - base, expect);
            if (dev > worst) {
                worst = dev;
                where = fmt("%s pe=%g", cv.label, pe);
            }
        }
    }
    r.pass = worst <= 0.15;
    r.detail = fmt("%d/%d gaps within 0.15 dB, worst |dev| %.3f dB at %s",
                   within, gaps, worst, where.c_str());
    return r;
}

// ---- check 6: analytic curves vs semi-analytic simulation, all presets ----

CriterionResult check_simulation_agreement(std::FILE* log, int workers) {
    CriterionResult r;
    r.id = 6;
    const char* names[] = {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
    double worst_rel = 0.0, worst_frac = 1.0;
    std::string where = "-";
    int total = 0;
    bool pass = true;
    for (const char* name : names) {
        RunDescription run = figure_preset(name);
        run.with_mc = false;
        run.with_asymptote = false;
        const std::vector<SweepRow> rows = run_sweep(run, workers);
        int pts = 0, in3 = 0;
        double rel_max = 0.0;
        for (const SweepRow& row : rows) {
            if (row.analytic < 1e-4) continue;
            ++pts;
            const SchemeConfig cfg = run.config(row.nt, row.nr);
            const Codebook cb =
                build_codebook(cfg, run.mapping, run.permutation);
            TrialPlan plan;
            plan.cfg = cfg;
            plan.fm = build_feedback_model(row.pe, cb, run.mixing());
            plan.modulation = run.mod;
            plan.gbar = cfg.branch_gbar(run.es_lin(row.snr_db));
            plan.trials = run.trials;
            plan.seed = run.seed;
            plan.feedback_mode = run.feedback_mode;
            plan.receive_mode = run.receive_mode;
            const Estimate est = run.is_outage
                                     ? estimate_outage(plan, run.rate, workers)
                                     : estimate_error_rate(plan, workers);
            const double dev = std::abs(est.mean - row.analytic);
            if (dev <= 3.0 * est.std_error) ++in3;
            const double rel = dev / row.analytic;
            if (rel > rel_max) rel_max = rel;
            if (rel > worst_rel) {
                worst_rel = rel;
                where = fmt("%s nt=%d nr=%d pe=%g %+gdB", name, row.nt, row.nr,
                            row.pe, row.snr_db);
            }
        }
        const double frac = pts ? double(in3) / pts : 0.0;
        worst_frac = std::min(worst_frac, frac);
        pass = pass && pts > 0 && frac >= 0.95 && rel_max <= 0.02;
        total += pts;
        progress(log, "  [6] %s: %d points, %.1f%% within 3 sigma, max rel %.4f",
                 name, pts, 100.0 * frac, rel_max);
    }
    r.pass = pass;
    r.detail = fmt("%d points over 6 presets, worst rel dev %.4f at %s "
                   "(tol 0.02), min 3-sigma coverage %.1f%% (need 95%%)",
                   total, worst_rel, where.c_str(), 100.0 * worst_frac);
    return r;
}

// ---- check 7: tail slope of the analytic curves vs diversity order ----

CriterionResult check_asymptotic_slopes(std::FILE* log) {
    CriterionResult r;
    r.id = 7;
    const std::vector<SchemeConfig> cfgs = {
        make_cfg(Scheme::TasStbc, 3, 2, 1, Rational(1), Rational(1)),
        make_cfg(Scheme::TasStbc, 4, 2, 2, rat(1, 2), Rational(1)),
        make_cfg(Scheme::TasStbc, 4, 3, 1, Rational(1), rat(1, 2)),
        make_cfg(Scheme::JointTrasStbc, 3, 2, 2, Rational(1), Rational(1)),
        make_cfg(Scheme::JointTrasStbc, 4, 2, 1, Rational(1), Rational(1)),
        make_cfg(Scheme::JointTrasStbc, 5, 3, 1, Rational(1), rat(1, 2)),
    };
    const double rate = 2.0;
    double worst = 0.0;
    std::string where = "-";
    auto slope_between = [&](const std::function<double(double)>& f) {
        const double d1 = crossing_bisect_db(f, 1e-8, -10.0, 130.0);
        const double d2 = crossing_bisect_db(f, 1e-10, -10.0, 130.0);
        return 20.0 / (d2 - d1); // two decades of metric per (d2 - d1) dB
    };
    for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
        const SchemeConfig& cfg = cfgs[ci];
        const Tasc c1 = first_pattern(cfg.n_s);
        const AsymptoticParams ap = asymptotic_params(cfg, c1);
        const double m = to_double(cfg.m);
        const double pure_expect = m * cfg.n_r * (cfg.n_t - ap.n_min + 1);
        const double pure = slope_between([&](double db) {
            return outage(cfg, c1, rate, db_lin(db));
        });
        const Codebook cb = build_codebook(cfg, CodewordMapping::NaturalBinary);
        const FeedbackModel fm = build_feedback_model(0.1, cb);
        const double avg_expect = m * cfg.n_r * cfg.n_s;
        const double avg = slope_between([&](double db) {
            return averaged_outage(cfg, rate, fm, db_lin(db));
        });
        const double dev = std::max(std::abs(pure / pure_expect - 1.0),
                                    std::abs(avg / avg_expect - 1.0));
        progress(log,
                 "  [7] case %zu: pure %.4f (expect %g), averaged %.4f "
                 "(expect %g)",
                 ci + 1, pure, pure_expect, avg, avg_expect);
        if (dev > worst) {
            worst = dev;
            where = fmt("case %zu", ci + 1);
        }
    }
    r.pass = worst <= 0.05;
    r.detail = fmt("12 slopes over 6 configs, worst rel dev %.4f at %s "
                   "(tol 0.05)",
                   worst, where.c_str());
    return r;
}

// ---- check 8: averaged curves sit between the ideal and unselected ----

CriterionResult check_feedback_bounds(std::FILE* log) {
    CriterionResult r;
    r.id = 8;
    // the upper bound is attained exactly at pe = 0.5 (the end pattern is
    // then uniform, and a uniformly random antenna subset is distributed
    // like the unselected array), so the slack must absorb the difference
    // between the two evaluation paths at equality
    const double slack = 1.0 + 1e-6;
    // below this the error-rate evaluation is cancellation noise for the
    // largest presets, so orderings there are meaningless
    const double floor_v = 1e-7;
    int points = 0, violations = 0;
    std::string where = "-";
    for (const char* name : {"fig3", "fig4"}) {
        const RunDescription run = figure_preset(name);
        for (int nt : run.nt) {
            for (int nr : run.nr) {
                const SchemeConfig cfg = run.config(nt, nr);
                const Tasc c1 = first_pattern(cfg.n_s);
                SchemeConfig all = cfg; // pure space-time coding: no selection
                all.n_t = cfg.n_s;
                const Codebook cb =
                    build_codebook(cfg, CodewordMapping::NaturalBinary);
                for (double pe : run.pe) {
                    if (!(pe > 0.0)) continue;
                    const FeedbackModel fm = build_feedback_model(pe, cb);
                    for (double db : run.grid.points()) {
                        const double g = cfg.branch_gbar(run.es_lin(db));
                        const double stbc = error_rate(all, c1, run.mod, g);
                        if (stbc < floor_v) continue;
                        const double ideal = error_rate(cfg, c1, run.mod, g);
                        const double avg =
                            averaged_error_rate(cfg, run.mod, fm, g);
                        ++points;
                        if (!(ideal <= avg * slack && avg <= stbc * slack)) {
                            ++violations;
                            where = fmt("%s nt=%d pe=%g %+gdB", name, nt, pe, db);
                        }
                    }
                }
            }
        }
        progress(log, "  [8] %s bounds: %d points checked", name, points);
    }
    for (const char* name : {"fig2", "fig5", "fig6", "fig7"}) {
        const RunDescription run = figure_preset(name);
        std::vector<double> pes = run.pe;
        std::sort(pes.begin(), pes.end());
        for (int nt : run.nt) {
            for (int nr : run.nr) {
                const SchemeConfig cfg = run.config(nt, nr);
                const Codebook cb =
                    build_codebook(cfg, CodewordMapping::NaturalBinary);
                for (double db : run.grid.points()) {
                    const double g = cfg.branch_gbar(run.es_lin(db));
                    double prev = -1.0;
                    for (double pe : pes) {
                        const FeedbackModel fm = build_feedback_model(pe, cb);
                        const double v =
                            run.is_outage
                                ? averaged_outage(cfg, run.rate, fm, g)
                                : averaged_error_rate(cfg, run.mod, fm, g);
                        if (std::max(v, prev) < floor_v) {
                            prev = v;
                            continue;
                        }
                        ++points;
                        if (v * slack < prev) {
                            ++violations;
                            where = fmt("%s nt=%d nr=%d pe=%g %+gdB", name, nt,
                                        nr, pe, db);
                        }
                        prev = v;
                    }
                }
            }
        }
        progress(log, "  [8] %s monotone in pe: %d points cumulative", name,
                 points);
    }
    r.pass = violations == 0 && points > 300;
    r.detail = fmt("%d ordering checks above metric 1e-7, %d violations%s%s",
                   points, violations, violations ? ", last at " : "",
                   violations ? where.c_str() : "");
    return r;
}

// ---- check 9: simulation output is worker-count invariant ----

CriterionResult check_deterministic_replay(std::FILE* log) {
    CriterionResult r;
    r.id = 9;
    RunDescription run = figure_preset("fig3");
    run.nt = {3};
    run.pe = {0.0, 0.2};
    run.grid = parse_snr_grid("0:6:30");
    run.trials = 200000;
    run.with_mc = true;
    const std::string csv_a = to_csv(run_sweep(run, 7));
    const std::string csv_b = to_csv(run_sweep(run, 2));
    r.pass = csv_a == csv_b && !csv_a.empty();
    r.detail = fmt("two runs (7 vs 2 workers), %zu-byte csv %s", csv_a.size(),
                   r.pass ? "byte-identical" : "DIFFERS");
    progress(log, "  [9] %s", r.detail.c_str());
    return r;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const std::vector<int>& which,
                                            std::FILE* log, int workers) {
    // wall-clock budgets, seconds
    static const double budgets[10] = {0,   5,  60, 120, 180,
                                       300, 900, 120, 60,  60};
    std::vector<int> ids = which;
    if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<CriterionResult> out;
    for (int id : ids) {
        progress(log, "criterion %d ...", id);
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            switch (id) {
            case 1: r = check_feedback_enumeration(log); break;
            case 2: r = check_selection_mgf_oracle(log); break;
            case 3: r = check_selection_distribution(log, workers); break;
            case 4: r = check_dual_path_integrals(log); break;
            case 5: r = check_reference_gaps(log); break;
            case 6: r = check_simulation_agreement(log, workers); break;
            case 7: r = check_asymptotic_slopes(log); break;
            case 8: r = check_feedback_bounds(log); break;
            case 9: r = check_deterministic_replay(log); break;
            default:
                r.id = id;
                r.pass = false;
                r.detail = "unknown criterion";
            }
        } catch (const std::exception& e) {
            r.id = id;
            r.pass = false;
            r.detail = fmt("error: %s", e.what());
        }
        r.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        r.budget_seconds = (id >= 1 && id <= 9) ? budgets[id] : 0.0;
        if (r.budget_seconds > 0.0 && r.seconds > r.budget_seconds) {
            r.pass = false;
            r.detail += fmt(" [over budget: %.1fs > %.0fs]", r.seconds,
                            r.budget_seconds);
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace antsel
