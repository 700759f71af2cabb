#include "antsel/snr_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

#include "antsel/errors.hpp"
#include "antsel/specfun.hpp"

namespace antsel {

namespace {

constexpr std::uint64_t kTermBudget = 10000000;

double scale_factor(const SchemeConfig& cfg, double gbar) {
    if (!(gbar > 0.0)) throw std::domain_error("gbar must be positive");
    return to_double(cfg.m) / gbar;
}

} // namespace

double element_snr_cdf(const SchemeConfig& cfg, double x, double gbar) {
    if (x <= 0.0) return 0.0;
    return reg_lower_gamma(cfg.mg(), x * scale_factor(cfg, gbar));
}

double element_snr_cdf_finite(const SchemeConfig& cfg, double x, double gbar) {
    if (x <= 0.0) return 0.0;
    int mg = cfg.mg();
    long double z = (long double)x * scale_factor(cfg, gbar);
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < mg; ++k) {
        term *= z / k;
        sum += term;
    }
    return static_cast<double>(1.0L - expl(-z) * sum);
}

double element_snr_pdf(const SchemeConfig& cfg, double x, double gbar) {
    if (x <= 0.0) return 0.0;
    int mg = cfg.mg();
    double beta = scale_factor(cfg, gbar);
    long double z = (long double)x * beta;
    long double lnf = (mg - 1) * logl(z) - z - lgammal((long double)mg);
    return static_cast<double>(beta * expl(lnf));
}

std::vector<ExpansionTerm> enumerate_expansion(const SchemeConfig& cfg,
                                               const Tasc& tasc) {
    auto issues = cfg.validate();
    if (!issues.empty()) throw ConfigError(issues);
    const int ns = cfg.n_s;
    const int mg = cfg.mg();
    if ((int)tasc.ranks.size() != ns)
        throw ConfigError("tasc size does not match n_s");
    for (int i = 0; i < ns; ++i) {
        int lo = i ? tasc.ranks[i - 1] + 1 : 1;
        if (tasc.ranks[i] < lo || tasc.ranks[i] > cfg.n_t)
            throw ConfigError("tasc ranks must be strictly increasing in [1, n_t]");
    }

    std::vector<int> gap(ns); // unselected ranks between consecutive selections
    for (int k = 0; k < ns; ++k)
        gap[k] = tasc.ranks[k] - (k ? tasc.ranks[k - 1] : 0) - 1;
    const int tail = cfg.n_t - tasc.ranks[ns - 1];

    Rational base(factorial(cfg.n_t));
    for (int k = 0; k < ns; ++k) base /= Rational(factorial(gap[k]));
    base /= Rational(factorial(tail));
    Rational gshape(factorial(mg - 1));
    for (int k = 0; k < ns; ++k) base /= gshape;

    std::vector<ExpansionTerm> out;
    std::vector<int> p(ns, 0);
    while (true) {
        Rational cp = base;
        for (int k = 0; k < ns; ++k) {
            cp *= Rational(binomial(gap[k], p[k]));
            if ((gap[k] - p[k]) % 2 != 0) cp = -cp;
        }
        // total CDF power attached to position k after regrouping
        std::vector<int> d(ns);
        for (int k = 0; k < ns; ++k)
            d[k] = gap[k] - p[k] + (k + 1 < ns ? p[k + 1] : tail);

        std::vector<int> t(ns, 0);
        while (true) {
            Rational ct = cp;
            for (int k = 0; k < ns; ++k) {
                ct *= Rational(binomial(d[k], t[k]));
                if (t[k] % 2 != 0) ct = -ct;
            }
            std::vector<int> rmax(ns);
            for (int k = 0; k < ns; ++k) rmax[k] = t[k] * (mg - 1);
            std::vector<int> r(ns, 0);
            while (true) {
                Rational cr = ct;
                for (int k = 0; k < ns; ++k)
                    cr *= multinomial_coeffs(t[k], mg).beta[r[k]];
                ExpansionTerm term;
                term.coeff = cr;
                term.p = p;
                term.t = t;
                term.r = r;
                term.mu.resize(ns);
                for (int k = 0; k < ns; ++k) term.mu[k] = mg + r[k];
                out.push_back(std::move(term));
                if (out.size() > kTermBudget)
                    throw ConfigError("expansion term count exceeds 10^7 for " +
                                      cfg.key());
                int k = ns - 1;
                while (k >= 0 && r[k] == rmax[k]) r[k--] = 0;
                if (k < 0) break;
                ++r[k];
            }
            int k = ns - 1;
            while (k >= 0 && t[k] == d[k]) t[k--] = 0;
            if (k < 0) break;
            ++t[k];
        }
        int k = ns - 1;
        while (k >= 0 && p[k] == gap[k]) p[k--] = 0;
        if (k < 0) break;
        ++p[k];
    }
    return out;
}

std::vector<RatePole> merge_poles(std::vector<RatePole> poles) {
    std::sort(poles.begin(), poles.end(), [](const RatePole& a, const RatePole& b) {
        return a.location < b.location;
    });
    std::vector<RatePole> out;
    for (RatePole& p : poles) {
        if (p.multiplicity <= 0)
            throw std::logic_error("merge_poles: non-positive multiplicity");
        if (!out.empty() && out.back().location == p.location)
            out.back().multiplicity += p.multiplicity;
        else
            out.push_back(std::move(p));
    }
    return out;
}

std::vector<LaplaceTerm> laplace_form(const ExpansionTerm& term) {
    const int ns = static_cast<int>(term.mu.size());
    // prefix sums T_k = sum_{j<=k} (1 + t_j); pole k sits at T_k / k
    std::vector<Rational> pole_at(ns);
    {
        int acc = 0;
        for (int k = 0; k < ns; ++k) {
            acc += 1 + term.t[k];
            pole_at[k] = rat(acc, k + 1);
        }
    }
    std::vector<LaplaceTerm> out;
    std::vector<int> l(std::max(ns - 1, 0), 0);
    while (true) {
        // exponent of (s + pole_k): w_k = l_{k-1} + mu_k - l_k, last has +l
        Rational coeff = term.coeff;
        std::vector<RatePole> poles(ns);
        int prev = 0;
        bool valid = true;
        for (int k = 0; k < ns; ++k) {
            int w;
            if (k + 1 < ns) {
                if (l[k] > prev + term.mu[k] - 1) {
                    valid = false;
                    break;
                }
                w = prev + term.mu[k] - l[k];
                coeff *= Rational(factorial(prev + term.mu[k] - 1)) /
                         Rational(factorial(l[k]));
                prev = l[k];
            } else {
                w = prev + term.mu[k];
                coeff *= Rational(factorial(prev + term.mu[k] - 1));
            }
            // the k-th partial sum is (k+1)(s + T_k/(k+1)); fold the (k+1)^-w in
            if (k > 0) {
                Rational kpow(1);
                for (int j = 0; j < w; ++j) kpow *= (k + 1);
                coeff /= kpow;
            }
            poles[k] = RatePole{pole_at[k], w};
        }
        if (valid) out.push_back(LaplaceTerm{std::move(coeff), merge_poles(poles)});
        // odometer over l with data-dependent bounds
        int k = ns - 2;
        while (k >= 0) {
            int bound = (k == 0 ? term.mu[0] : 0) - 1;
            if (k > 0) {
                // recompute bound l_k <= l_{k-1} + mu_k - 1
                bound = l[k - 1] + term.mu[k] - 1;
            }
            if (l[k] < bound) {
                ++l[k];
                for (int j = k + 1; j < ns - 1; ++j) l[j] = 0;
                break;
            }
            l[k--] = 0;
        }
        if (k < 0) break;
    }
    return out;
}

std::vector<std::vector<Rational>> partial_fraction_residues(
    const std::vector<RatePole>& poles) {
    for (std::size_t i = 0; i + 1 < poles.size(); ++i)
        for (std::size_t j = i + 1; j < poles.size(); ++j)
            if (poles[i].location == poles[j].location)
                throw std::logic_error(
                    "partial_fraction_residues: duplicate pole locations");
    std::vector<std::vector<Rational>> res(poles.size());
    for (std::size_t d = 0; d < poles.size(); ++d) {
        const int u = poles[d].multiplicity;
        // cofactor G(s) = prod_{e != d} (s + a_e)^-u_e expanded at s = -a_d
        // via the log-derivative recurrence; everything stays rational.
        std::vector<Rational> logd(u); // logd[j-1] = (log G)^(j) (-a_d)
        for (int j = 1; j < u; ++j) {
            Rational s(0);
            for (std::size_t e = 0; e < poles.size(); ++e) {
                if (e == d) continue;
                Rational delta = poles[e].location - poles[d].location;
                Rational dp(1);
                for (int q = 0; q < j; ++q) dp *= delta;
                s += Rational(poles[e].multiplicity) / dp;
            }
            Rational fac(factorial(j - 1));
            logd[j - 1] = (j % 2 == 0 ? fac : -fac) * s;
        }
        std::vector<Rational> deriv(u); // deriv[n] = G^(n) (-a_d)
        deriv[0] = Rational(1);
        for (std::size_t e = 0; e < poles.size(); ++e) {
            if (e == d) continue;
            Rational delta = poles[e].location - poles[d].location;
            Rational dp(1);
            for (int q = 0; q < poles[e].multiplicity; ++q) dp *= delta;
            deriv[0] /= dp;
        }
        for (int n = 1; n < u; ++n) {
            Rational s(0);
            for (int i = 0; i < n; ++i)
                s += Rational(binomial(n - 1, i)) * deriv[i] * logd[n - 1 - i];
            deriv[n] = s;
        }
        res[d].resize(u);
        for (int q = 1; q <= u; ++q)
            res[d][q - 1] = deriv[u - q] / Rational(factorial(u - q));
    }
    return res;
}

namespace {

struct RationalPoleKeyLess {
    bool operator()(const std::vector<std::pair<Rational, int>>& a,
                    const std::vector<std::pair<Rational, int>>& b) const {
        return a < b;
    }
};

using MixAccumulator = std::map<std::pair<Rational, int>, Rational>;

std::vector<MixTerm> to_terms(MixAccumulator&& acc) {
    std::vector<MixTerm> out;
    out.reserve(acc.size());
    for (auto& [key, w] : acc) {
        if (sgn(w) == 0) continue;
        out.push_back(MixTerm{std::move(w), key.second, key.first});
    }
    return out;
}

std::shared_ptr<const BranchModel> build_branch_model(const SchemeConfig& cfg,
                                                      const Tasc& tasc) {
    auto terms = enumerate_expansion(cfg, tasc);

    // partial-fraction tables keyed by the merged pole multiset; many
    // expansion terms land on the same poles
    std::map<std::vector<std::pair<Rational, int>>, std::vector<std::vector<Rational>>,
             RationalPoleKeyLess>
        pf_cache;

    MixAccumulator density_acc;
    std::uint64_t ops = 0;
    for (const ExpansionTerm& term : terms) {
        for (const LaplaceTerm& lt : laplace_form(term)) {
            if (++ops > kTermBudget)
                throw ConfigError("expansion term count exceeds 10^7 for " + cfg.key());
            std::vector<std::pair<Rational, int>> key;
            key.reserve(lt.poles.size());
            for (const RatePole& p : lt.poles) key.emplace_back(p.location, p.multiplicity);
            auto it = pf_cache.find(key);
            if (it == pf_cache.end())
                it = pf_cache.emplace(key, partial_fraction_residues(lt.poles)).first;
            const auto& res = *it;
            for (std::size_t d = 0; d < lt.poles.size(); ++d) {
                for (int q = 1; q <= lt.poles[d].multiplicity; ++q) {
                    const Rational& rq = res.second[d][q - 1];
                    if (sgn(rq) == 0) continue;
                    // inverse transform of (s+a)^-q is y^(q-1) e^(-a y)/(q-1)!
                    Rational w = lt.coeff * rq / Rational(factorial(q - 1));
                    density_acc[{lt.poles[d].location, q - 1}] += w;
                }
            }
        }
    }

    auto model = std::make_shared<BranchModel>();
    model->cfg = cfg;
    model->tasc = tasc;
    std::vector<MixTerm> density_terms = to_terms(std::move(density_acc));

    // CDF complement terms and the exact total-mass identity
    MixAccumulator cdf_acc;
    Rational mass(0);
    for (const MixTerm& t : density_terms) {
        Rational rp(1);
        for (int q = 0; q <= t.power; ++q) rp *= t.rate;
        Rational head = t.weight * Rational(factorial(t.power)) / rp; // w p! / r^(p+1)
        mass += head;
        Rational rj(1); // r^j
        for (int j = 0; j <= t.power; ++j) {
            Rational fj(factorial(t.power) / factorial(j));
            cdf_acc[{t.rate, j}] += -t.weight * fj * rj / rp;
            rj *= t.rate;
        }
    }
    if (mass != 1)
        throw std::logic_error("branch density mass is " + mass.get_str() +
                               ", expected 1 (" + cfg.key() + " tasc " +
                               to_string(tasc) + ")");

    model->density = GammaMixture(MixtureKind::Density, std::move(density_terms));
    model->cdf = GammaMixture(MixtureKind::CdfComplement, to_terms(std::move(cdf_acc)));
    return model;
}

std::shared_ptr<const OutputModel> build_output_model(const SchemeConfig& cfg,
                                                      const Tasc& tasc) {
    auto bm = branch_model(cfg, tasc);
    auto om = std::make_shared<OutputModel>();
    om->branch = bm;
    const int n = cfg.branches();
    om->n_branches = n;

    const std::vector<MixTerm>& T = bm->cdf.terms();
    // [1 + T]^n expanded by powers of T
    MixAccumulator cdf_acc;
    MixAccumulator pdf_acc;
    std::vector<MixTerm> tpow; // T^j, starts at j=1
    for (int j = 1; j <= n; ++j) {
        tpow = (j == 1) ? T : multiply_terms(tpow, T);
        Rational cnj(binomial(n, j));
        for (const MixTerm& t : tpow) cdf_acc[{t.rate, t.power}] += cnj * t.weight;
    }
    // N f (1 + T)^(n-1)
    for (const MixTerm& f : bm->density.terms())
        pdf_acc[{f.rate, f.power}] += Rational(n) * f.weight;
    tpow.clear();
    for (int j = 1; j <= n - 1; ++j) {
        tpow = (j == 1) ? T : multiply_terms(tpow, T);
        Rational c(binomial(n - 1, j) * n);
        std::vector<MixTerm> cross = multiply_terms(bm->density.terms(), tpow);
        for (const MixTerm& t : cross) pdf_acc[{t.rate, t.power}] += c * t.weight;
    }
    om->cdf = GammaMixture(MixtureKind::CdfComplement, to_terms(std::move(cdf_acc)));
    om->pdf = GammaMixture(MixtureKind::Density, to_terms(std::move(pdf_acc)));
    return om;
}

std::shared_mutex g_model_mutex;
std::map<std::string, std::shared_ptr<const BranchModel>> g_branch_cache;
std::map<std::string, std::shared_ptr<const OutputModel>> g_output_cache;

std::string model_key(const SchemeConfig& cfg, const Tasc& tasc) {
    return cfg.key() + "|" + to_string(tasc);
}

} // namespace

std::shared_ptr<const BranchModel> branch_model(const SchemeConfig& cfg,
                                                const Tasc& tasc) {
    std::string key = model_key(cfg, tasc);
    {
        std::shared_lock lock(g_model_mutex);
        auto it = g_branch_cache.find(key);
        if (it != g_branch_cache.end()) return it->second;
    }
    auto built = build_branch_model(cfg, tasc);
    std::unique_lock lock(g_model_mutex);
    auto [it, inserted] = g_branch_cache.emplace(key, std::move(built));
    return it->second;
}

std::shared_ptr<const OutputModel> output_model(const SchemeConfig& cfg,
                                                const Tasc& tasc) {
    std::string key = model_key(cfg, tasc);
    {
        std::shared_lock lock(g_model_mutex);
        auto it = g_output_cache.find(key);
        if (it != g_output_cache.end()) return it->second;
    }
    auto built = build_output_model(cfg, tasc);
    std::unique_lock lock(g_model_mutex);
    auto [it, inserted] = g_output_cache.emplace(key, std::move(built));
    return it->second;
}

double branch_pdf(const BranchModel& bm, double x, double gbar) {
    if (x <= 0.0) return 0.0;
    double beta = scale_factor(bm.cfg, gbar);
    long double v = bm.density.value((long double)x * beta) * beta;
    return static_cast<double>(v);
}

double branch_cdf(const BranchModel& bm, double x, double gbar) {
    if (x <= 0.0) return 0.0;
    double beta = scale_factor(bm.cfg, gbar);
    long double v = bm.cdf.value((long double)x * beta);
    if (v < 0.0L) v = 0.0L;
    if (v > 1.0L) v = 1.0L;
    return static_cast<double>(v);
}

double output_cdf(const SchemeConfig& cfg, const Tasc& tasc, double x, double gbar) {
    auto bm = branch_model(cfg, tasc);
    double f = branch_cdf(*bm, x, gbar);
    return std::pow(f, cfg.branches());
}

double output_pdf(const SchemeConfig& cfg, const Tasc& tasc, double x, double gbar) {
    auto bm = branch_model(cfg, tasc);
    int n = cfg.branches();
    double f = branch_cdf(*bm, x, gbar);
    return n * branch_pdf(*bm, x, gbar) * std::pow(f, n - 1);
}

} // namespace antsel
