#include "antsel/performance.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "antsel/errors.hpp"
#include "antsel/snr_model.hpp"
#include "antsel/specfun.hpp"

namespace antsel {

namespace {

struct KahanAcc {
    long double sum = 0.0L;
    long double carry = 0.0L;
    void add(long double v) {
        long double y = v - carry;
        long double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

long double branch_beta(const SchemeConfig& cfg, double gbar) {
    if (!(gbar > 0.0)) throw std::domain_error("gbar must be positive");
    return to_long_double(cfg.m) / gbar;
}

// Confluent representation of the branch CDF: each density term
// w y^p e^(-r y) integrates to (w/(p+1)) y^(p+1) e^(-r y) 1F1(1; p+2; r y).
struct ConfluentTerm {
    long double w;
    int power;        // p + 1
    long double rate; // r
    int c;            // p + 2
};

std::vector<ConfluentTerm> confluent_cdf(const BranchModel& bm) {
    std::vector<ConfluentTerm> out;
    out.reserve(bm.density.size());
    for (const MixTerm& t : bm.density.terms()) {
        ConfluentTerm ct;
        ct.w = to_long_double(t.weight) / (t.power + 1);
        ct.power = t.power + 1;
        ct.rate = to_long_double(t.rate);
        ct.c = t.power + 2;
        out.push_back(ct);
    }
    return out;
}

// Walk multisets of size n over v term indices (nondecreasing tuples),
// calling fn(indices, multiplicity-count n!/prod(mult_i!)).
template <typename Fn>
void for_each_multiset(int v, int n, Fn&& fn) {
    std::vector<int> idx(n, 0);
    while (true) {
        double count = 1.0;
        {
            int run = 1;
            double numer = 1.0;
            for (int i = 1; i <= n; ++i) {
                numer *= i;
                if (i < n && idx[i] == idx[i - 1]) {
                    ++run;
                } else {
                    for (int j = 2; j <= run; ++j) numer /= j;
                    run = 1;
                }
            }
            count = numer;
        }
        fn(idx, count);
        int k = n - 1;
        while (k >= 0 && idx[k] == v - 1) --k;
        if (k < 0) break;
        int next = idx[k] + 1;
        for (int j = k; j < n; ++j) idx[j] = next;
    }
}

double closed_form_integral(const SchemeConfig& cfg, const Tasc& tasc,
                            double theta, double eps, double phi, double gbar,
                            bool with_half_kernel) {
    if (!(phi > 0.0)) throw std::domain_error("phi must be positive");
    if (!(eps > -1.0)) throw std::domain_error("eps must exceed -1");
    if (theta == 0.0) return 0.0;
    auto bm = branch_model(cfg, tasc);
    std::vector<ConfluentTerm> terms = confluent_cdf(*bm);
    const int n = cfg.branches();
    const int v = static_cast<int>(terms.size());
    const long double beta = branch_beta(cfg, gbar);
    const long double lnbeta = logl(beta);

    KahanAcc acc;
    std::vector<double> bs, cs, xs;
    for_each_multiset(v, n, [&](const std::vector<int>& idx, double count) {
        long double lnmag = logl((long double)count);
        int sign = 1;
        long double a = 1.0L + (long double)eps;
        long double rate_sum = 0.0L;
        int psum = 0;
        for (int i : idx) {
            const ConfluentTerm& t = terms[i];
            lnmag += logl(fabsl(t.w));
            if (t.w < 0) sign = -sign;
            a += t.power;
            psum += t.power;
            rate_sum += t.rate;
        }
        long double s = phi + beta * rate_sum;
        lnmag += psum * lnbeta + lgammal(a) - a * logl(s);

        bs.assign(idx.size(), 1.0);
        cs.clear();
        xs.clear();
        for (int i : idx) {
            cs.push_back(static_cast<double>(terms[i].c));
            xs.push_back(static_cast<double>(beta * terms[i].rate / s));
        }
        if (with_half_kernel) {
            bs.push_back(1.0);
            cs.push_back(1.5);
            xs.push_back(static_cast<double>((phi / 2) / s));
        }
        double hyper;
        if (xs.size() == 1)
            hyper = gauss_2f1(1.0, static_cast<double>(a), cs[0], xs[0]);
        else if (xs.size() == 2)
            hyper = appell_f2(static_cast<double>(a), 1.0, 1.0, cs[0], cs[1],
                              xs[0], xs[1]);
        else
            hyper = lauricella_fa(static_cast<double>(a), bs, cs, xs);
        acc.add(sign * expl(lnmag + logl((long double)hyper)));
    });
    return static_cast<double>(theta * acc.sum);
}

} // namespace

double unified_j(const SchemeConfig& cfg, const Tasc& tasc, double theta,
                 double eps, double phi, double gbar) {
    if (!(phi > 0.0)) throw std::domain_error("phi must be positive");
    if (!(eps > -1.0)) throw std::domain_error("eps must exceed -1");
    if (theta == 0.0) return 0.0;
    auto om = output_model(cfg, tasc);
    const long double beta = branch_beta(cfg, gbar);
    const long double lnbeta = logl(beta);
    KahanAcc acc;
    acc.add(expl(lgammal(1.0L + eps) - (1.0L + eps) * logl((long double)phi)));
    for (const MixTerm& t : om->cdf.terms()) {
        long double w = to_long_double(t.weight);
        long double alpha = to_long_double(t.rate);
        long double a = t.power + 1.0L + eps;
        long double lnmag = logl(fabsl(w)) + t.power * lnbeta + lgammal(a) -
                            a * logl(phi + alpha * beta);
        acc.add((w < 0 ? -1.0L : 1.0L) * expl(lnmag));
    }
    return static_cast<double>(theta * acc.sum);
}

double unified_j_hat(const SchemeConfig& cfg, const Tasc& tasc, double theta,
                     double phi, double gbar) {
    if (!(phi > 0.0)) throw std::domain_error("phi must be positive");
    if (theta == 0.0) return 0.0;
    auto om = output_model(cfg, tasc);
    const long double beta = branch_beta(cfg, gbar);
    const long double lnbeta = logl(beta);
    KahanAcc acc;
    acc.add((M_PIl / 2.0L) / phi); // 2F1(1,1;3/2;1/2) = pi/2 on the unit mass
    for (const MixTerm& t : om->cdf.terms()) {
        long double w = to_long_double(t.weight);
        long double alpha = to_long_double(t.rate);
        long double denom = phi + alpha * beta;
        long double lnmag = logl(fabsl(w)) + t.power * lnbeta +
                            lgammal(t.power + 1.0L) - (t.power + 1) * logl(denom);
        double h = gauss_2f1(1.0, t.power + 1.0, 1.5,
                             static_cast<double>((phi / 2) / denom));
        acc.add((w < 0 ? -1.0L : 1.0L) * expl(lnmag + logl((long double)h)));
    }
    return static_cast<double>(theta * acc.sum);
}

double unified_j_closed(const SchemeConfig& cfg, const Tasc& tasc, double theta,
                        double eps, double phi, double gbar) {
    return closed_form_integral(cfg, tasc, theta, eps, phi, gbar, false);
}

double unified_j_hat_closed(const SchemeConfig& cfg, const Tasc& tasc,
                            double theta, double phi, double gbar) {
    return closed_form_integral(cfg, tasc, theta, 0.0, phi, gbar, true);
}

double mgf(const SchemeConfig& cfg, const Tasc& tasc, double s, double gbar) {
    if (!(s > 0.0)) throw std::domain_error("mgf argument must be positive");
    return unified_j(cfg, tasc, s, 0.0, s, gbar);
}

double error_rate(const SchemeConfig& cfg, const Tasc& tasc,
                  const ModulationSpec& mod, double gbar) {
    const double mm = mod.constellation;
    switch (mod.kind) {
        case ModulationKind::Bpsk:
        case ModulationKind::Cbfsk:
        case ModulationKind::Ncbfsk:
        case ModulationKind::Dbpsk:
        case ModulationKind::Mpsk: {
            double l1, l2, l3;
            switch (mod.kind) {
                case ModulationKind::Bpsk: l1 = 0.5; l2 = 1.0; l3 = 1.0; break;
                case ModulationKind::Cbfsk: l1 = 0.5; l2 = 0.5; l3 = 1.0; break;
                case ModulationKind::Ncbfsk: l1 = 1.0; l2 = 0.5; l3 = 1.0; break;
                case ModulationKind::Dbpsk: l1 = 1.0; l2 = 1.0; l3 = 1.0; break;
                default: {
                    double s = std::sin(M_PI / mm);
                    l1 = 0.5; l2 = s * s; l3 = 2.0; break;
                }
            }
            double theta = l3 * std::pow(l2, l1) / (2.0 * std::exp(ln_gamma(l1)));
            return unified_j(cfg, tasc, theta, l1 - 1.0, l2, gbar);
        }
        case ModulationKind::Mpam: {
            double theta = std::sqrt(3.0 * (mm - 1.0) / (M_PI * mm * mm * (mm + 1.0)));
            return unified_j(cfg, tasc, theta, -0.5, 3.0 / (mm * mm - 1.0), gbar);
        }
        case ModulationKind::Qpsk:
        case ModulationKind::Mqam: {
            double l4, l5, l6;
            if (mod.kind == ModulationKind::Qpsk) {
                l4 = 1.0; l5 = 2.0; l6 = 1.0;
            } else {
                double root = std::sqrt(mm);
                l4 = 3.0 / (mm - 1.0);
                l5 = 4.0 - 4.0 / root;
                l6 = (2.0 - 2.0 / root) * (2.0 - 2.0 / root);
            }
            double direct = unified_j(cfg, tasc, std::sqrt(l4 / (8.0 * M_PI)) * (l5 - l6),
                                      -0.5, l4 / 2.0, gbar);
            double cross = unified_j_hat(cfg, tasc, l4 * l6 / (2.0 * M_PI), l4, gbar);
            return direct + cross;
        }
    }
    throw std::logic_error("unhandled modulation kind");
}

double outage(const SchemeConfig& cfg, const Tasc& tasc, double rate,
              double gbar) {
    if (!(rate > 0.0)) throw std::domain_error("rate must be positive");
    return output_cdf(cfg, tasc, std::exp2(rate) - 1.0, gbar);
}

double averaged_error_rate(const SchemeConfig& cfg, const ModulationSpec& mod,
                           const FeedbackModel& fm, double gbar) {
    std::vector<double> per;
    per.reserve(fm.codebook.tasc_order.size());
    for (const Tasc& t : fm.codebook.tasc_order)
        per.push_back(error_rate(cfg, t, mod, gbar));
    return mix_metric(per, fm);
}

double averaged_outage(const SchemeConfig& cfg, double rate,
                       const FeedbackModel& fm, double gbar) {
    std::vector<double> per;
    per.reserve(fm.codebook.tasc_order.size());
    for (const Tasc& t : fm.codebook.tasc_order)
        per.push_back(outage(cfg, t, rate, gbar));
    return mix_metric(per, fm);
}

AsymptoticParams asymptotic_params(const SchemeConfig& cfg, const Tasc& tasc) {
    auto issues = cfg.validate();
    if (!issues.empty()) throw ConfigError(issues);
    const int mg = cfg.mg();
    const int n = cfg.branches();
    AsymptoticParams ap;
    ap.n_min = tasc.n_min();
    // the best selected rank dominates near zero: it falls below x only
    // when that rank and everything beneath it do, n_t - n_min + 1 elements
    const int j = cfg.n_t - ap.n_min + 1;
    double m = to_double(cfg.m);
    double ln_a = ln_gamma(cfg.n_t + 1.0) - ln_gamma(j + 1.0) -
                  ln_gamma(cfg.n_t - j + 1.0) + std::log((double)j) +
                  mg * j * std::log(m) - ln_gamma(mg) -
                  (j - 1) * ln_gamma(mg + 1.0);
    ap.a_min = std::exp(ln_a);
    ap.b_min = ap.a_min / (mg * j);
    double q = static_cast<double>(mg) * j;
    ap.t = q * n - 1.0;
    ap.ado = q * n;
    ap.a = std::pow(ap.b_min, n) * q * n;
    return ap;
}

double asymptotic_error(const SchemeConfig& cfg, const Tasc& tasc, double k_mod,
                        double gbar) {
    if (!(k_mod > 0.0)) throw std::domain_error("modulation coefficient must be positive");
    AsymptoticParams ap = asymptotic_params(cfg, tasc);
    double ln = ap.t * std::log(2.0) + std::log(ap.a) + ln_gamma(ap.t + 1.5) -
                0.5 * std::log(M_PI) - std::log(ap.t + 1.0) -
                (ap.t + 1.0) * std::log(k_mod * gbar);
    return std::exp(ln);
}

double modulation_asymptote(const SchemeConfig& cfg, const Tasc& tasc,
                            const ModulationSpec& mod, double gbar) {
    const double mm = mod.constellation;
    AsymptoticParams ap = asymptotic_params(cfg, tasc);
    auto exponential_form = [&](double coeff, double rate) {
        // int coeff e^(-rate x) a x^t / gbar^(t+1) dx
        double ln = std::log(coeff) + std::log(ap.a) + ln_gamma(ap.t + 1.0) -
                    (ap.t + 1.0) * std::log(rate * gbar);
        return std::exp(ln);
    };
    switch (mod.kind) {
        case ModulationKind::Bpsk:
            return asymptotic_error(cfg, tasc, 2.0, gbar);
        case ModulationKind::Cbfsk:
            return asymptotic_error(cfg, tasc, 1.0, gbar);
        case ModulationKind::Ncbfsk:
            return exponential_form(0.5, 0.5);
        case ModulationKind::Dbpsk:
            return exponential_form(0.5, 1.0);
        case ModulationKind::Mpsk: {
            double s = std::sin(M_PI / mm);
            return 2.0 * asymptotic_error(cfg, tasc, 2.0 * s * s, gbar);
        }
        case ModulationKind::Qpsk:
            return 2.0 * asymptotic_error(cfg, tasc, 1.0, gbar);
        case ModulationKind::Mpam:
            return (2.0 * (mm - 1.0) / mm) *
                   asymptotic_error(cfg, tasc, 6.0 / (mm * mm - 1.0), gbar);
        case ModulationKind::Mqam: {
            double root = std::sqrt(mm);
            return (4.0 - 4.0 / root) *
                   asymptotic_error(cfg, tasc, 3.0 / (mm - 1.0), gbar);
        }
    }
    throw std::logic_error("unhandled modulation kind");
}

double outage_asymptote(const SchemeConfig& cfg, const Tasc& tasc, double rate,
                        double gbar) {
    if (!(rate > 0.0)) throw std::domain_error("rate must be positive");
    AsymptoticParams ap = asymptotic_params(cfg, tasc);
    double thr = std::exp2(rate) - 1.0;
    double ln = std::log(ap.a) - std::log(ap.t + 1.0) +
                (ap.t + 1.0) * std::log(thr / gbar);
    return std::exp(ln);
}

} // namespace antsel
