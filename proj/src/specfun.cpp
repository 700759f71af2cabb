#include "antsel/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "antsel/errors.hpp"

namespace antsel {

namespace {

constexpr int kSeriesCap = 200000;

[[noreturn]] void eval_fail(const char* fn, const std::string& detail) {
    throw EvalError(std::string(fn) + ": " + detail);
}

std::string fmt_args(std::initializer_list<double> args) {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (double a : args) {
        os << (first ? "(" : ", ") << a;
        first = false;
    }
    os << ")";
    return os.str();
}

long double reg_lower_gamma_ld(long double s, long double x) {
    if (x <= 0.0L) return 0.0L;
    long double lg = lgammal(s);
    if (x < s + 1.0L) {
        // P(s,x) = x^s e^-x / Gamma(s+1) * sum_n x^n / ((s+1)...(s+n))
        long double term = 1.0L, sum = 1.0L;
        for (int n = 1; n < kSeriesCap; ++n) {
            term *= x / (s + n);
            sum += term;
            if (term < sum * 1e-20L) {
                long double lnp = s * logl(x) - x - lg - logl(s) + logl(sum);
                return expl(lnp);
            }
        }
        eval_fail("reg_lower_gamma", "series did not converge" +
                                         fmt_args({(double)s, (double)x}));
    }
    // Lentz continued fraction for Q(s,x)
    const long double tiny = 1e-300L;
    long double b = x + 1.0L - s, c = 1.0L / tiny, d = 1.0L / b, h = d;
    for (int i = 1; i < kSeriesCap; ++i) {
        long double an = -1.0L * i * (i - s);
        b += 2.0L;
        d = an * d + b;
        if (fabsl(d) < tiny) d = tiny;
        c = b + an / c;
        if (fabsl(c) < tiny) c = tiny;
        d = 1.0L / d;
        long double delta = d * c;
        h *= delta;
        if (fabsl(delta - 1.0L) < 1e-20L) {
            long double q = expl(s * logl(x) - x - lg) * h;
            return 1.0L - q;
        }
    }
    eval_fail("reg_lower_gamma",
              "continued fraction did not converge" + fmt_args({(double)s, (double)x}));
}

} // namespace

double ln_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("ln_gamma: requires x > 0");
    return std::lgamma(x);
}

double reg_lower_gamma(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("reg_lower_gamma: requires s > 0");
    if (x < 0.0) throw std::domain_error("reg_lower_gamma: requires x >= 0");
    return static_cast<double>(reg_lower_gamma_ld(s, x));
}

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

// 1F1 series; with a, b, x > 0 every term is positive and there is no
// cancellation, which is the case the evaluators below arrange for.
long double kummer_series_pos(long double a, long double b, long double x) {
    long double term = 1.0L, sum = 1.0L;
    for (int k = 0; k < kSeriesCap; ++k) {
        term *= (a + k) * x / ((b + k) * (k + 1));
        sum += term;
        if (fabsl(term) < fabsl(sum) * 1e-20L + 1e-4000L) return sum;
    }
    eval_fail("kummer_1f1", "series did not converge" +
                                fmt_args({(double)a, (double)b, (double)x}));
}

bool near_nonpositive_int(double v) {
    return v <= 0.0 && std::abs(v - std::round(v)) < 1e-12;
}

} // namespace

double kummer_1f1(double a, double b, double x) {
    if (near_nonpositive_int(b))
        throw std::domain_error("kummer_1f1: b must not be a non-positive integer");
    if (x == 0.0 || a == 0.0) return 1.0;
    if (x < 0.0) {
        // Kummer transform keeps the summed series positive.
        if (b - a > 0.0)
            return static_cast<double>(
                expl((long double)x) * kummer_series_pos(b - a, b, -(long double)x));
        // fall through to the alternating series for unusual parameter sets
        long double term = 1.0L, sum = 1.0L;
        for (int k = 0; k < kSeriesCap; ++k) {
            term *= (a + k) * (long double)x / ((b + k) * (k + 1));
            sum += term;
            if (fabsl(term) < fabsl(sum) * 1e-20L + 1e-30L)
                return static_cast<double>(sum);
        }
        eval_fail("kummer_1f1", "series did not converge" + fmt_args({a, b, x}));
    }
    if (a == 1.0 && b > 1.0) return static_cast<double>(expl(kummer_1f1_one_ln(b, x)));
    if (a > 0.0)
        return static_cast<double>(kummer_series_pos(a, b, x));
    // negative a: finite-ish alternating series, cap guarded
    long double term = 1.0L, sum = 1.0L;
    for (int k = 0; k < kSeriesCap; ++k) {
        term *= (a + k) * (long double)x / ((b + k) * (k + 1));
        sum += term;
        if (fabsl(term) < fabsl(sum) * 1e-20L + 1e-30L) return static_cast<double>(sum);
    }
    eval_fail("kummer_1f1", "series did not converge" + fmt_args({a, b, x}));
}

long double kummer_1f1_one_ln(double b, double x) {
    if (!(b > 1.0)) throw std::domain_error("kummer_1f1_one_ln: requires b > 1");
    if (x < 0.0) throw std::domain_error("kummer_1f1_one_ln: requires x >= 0");
    if (x == 0.0) return 0.0L;
    if (x < b || x < 30.0) return logl(kummer_series_pos(1.0L, b, x));
    long double p = reg_lower_gamma_ld(b - 1.0L, x);
    return lgammal((long double)b) + (long double)x + (1.0L - b) * logl((long double)x) +
           logl(p);
}

namespace {

long double gauss_2f1_series(long double a, long double b, long double c,
                             long double x) {
    long double term = 1.0L, sum = 1.0L;
    for (int k = 0; k < 1000000; ++k) {
        term *= (a + k) * (b + k) * x / ((c + k) * (k + 1));
        sum += term;
        if (fabsl(term) < fabsl(sum) * 1e-18L + 1e-40L) return sum;
    }
    eval_fail("gauss_2f1", "series did not converge" +
                               fmt_args({(double)a, (double)b, (double)c, (double)x}));
}

} // namespace

double gauss_2f1(double a, double b, double c, double x) {
    if (near_nonpositive_int(c))
        throw std::domain_error("gauss_2f1: c must not be a non-positive integer");
    if (!(std::abs(x) < 1.0)) throw std::domain_error("gauss_2f1: requires |x| < 1");
    if (x == 0.0) return 1.0;
    if (x < 0.0) {
        // Pfaff transformation maps to argument in (0, 1).
        long double z = (long double)x / ((long double)x - 1.0L);
        long double v = powl(1.0L - (long double)x, -(long double)a) *
                        gauss_2f1_series(a, c - b, c, z);
        return static_cast<double>(v);
    }
    if (c - a - b < 0.0 && x > 0.5) {
        // Euler transformation: improves the tail when the raw series decays
        // slower than k^-1.
        long double v = powl(1.0L - (long double)x, (long double)(c - a - b)) *
                        gauss_2f1_series(c - a, c - b, c, x);
        return static_cast<double>(v);
    }
    return static_cast<double>(gauss_2f1_series(a, b, c, x));
}

namespace {

QuadratureRule make_gauss_laguerre(int n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.log_weights.resize(n);
    long double z = 0.0L;
    for (int i = 0; i < n; ++i) {
        if (i == 0)
            z = 3.0L / (1.0L + 2.4L * n);
        else if (i == 1)
            z += 15.0L / (1.0L + 2.5L * n);
        else {
            long double ai = i - 1;
            z += ((1.0L + 2.55L * ai) / (1.9L * ai)) * (z - rule.nodes[i - 2]);
        }
        long double p1 = 0.0L, p2 = 0.0L;
        for (int iter = 0; iter < 200; ++iter) {
            p1 = 1.0L;
            p2 = 0.0L;
            for (int j = 0; j < n; ++j) {
                long double p3 = p2;
                p2 = p1;
                p1 = ((2.0L * j + 1.0L - z) * p2 - j * p3) / (j + 1);
            }
            long double pp = n * (p1 - p2) / z; // d/dx L_n at z
            long double dz = p1 / pp;
            z -= dz;
            if (fabsl(dz) <= 1e-16L * fabsl(z) + 1e-30L) break;
        }
        // L_{n+1}(z) for the weight, one more recurrence step
        long double lp1 = 1.0L, lp2 = 0.0L;
        for (int j = 0; j <= n; ++j) {
            long double lp3 = lp2;
            lp2 = lp1;
            lp1 = ((2.0L * j + 1.0L - z) * lp2 - j * lp3) / (j + 1);
        }
        long double lw = logl(z) - 2.0L * logl((long double)(n + 1)) -
                         2.0L * logl(fabsl(lp1));
        rule.nodes[i] = static_cast<double>(z);
        rule.weights[i] = static_cast<double>(expl(lw));
        rule.log_weights[i] = lw;
    }
    return rule;
}

QuadratureRule make_gauss_legendre(int n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        long double z = cosl(M_PIl * (i + 0.75L) / (n + 0.5L));
        long double pp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            long double p1 = 1.0L, p2 = 0.0L;
            for (int j = 0; j < n; ++j) {
                long double p3 = p2;
                p2 = p1;
                p1 = ((2.0L * j + 1.0L) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0L);
            long double dz = p1 / pp;
            z -= dz;
            if (fabsl(dz) <= 1e-17L * fabsl(z) + 1e-30L) break;
        }
        double w = static_cast<double>(2.0L / ((1.0L - z * z) * pp * pp));
        rule.nodes[i] = static_cast<double>(-z);
        rule.nodes[n - 1 - i] = static_cast<double>(z);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

std::map<int, QuadratureRule> g_rules;
std::map<int, QuadratureRule> g_legendre_rules;
std::mutex g_rules_mutex;

} // namespace

const QuadratureRule& gauss_laguerre_rule(int n) {
    if (n < 1 || n > 512)
        throw std::domain_error("gauss_laguerre_rule: order must be in [1, 512]");
    std::lock_guard<std::mutex> lock(g_rules_mutex);
    auto it = g_rules.find(n);
    if (it == g_rules.end()) it = g_rules.emplace(n, make_gauss_laguerre(n)).first;
    return it->second;
}

const QuadratureRule& gauss_legendre_rule(int n) {
    if (n < 1 || n > 512)
        throw std::domain_error("gauss_legendre_rule: order must be in [1, 512]");
    std::lock_guard<std::mutex> lock(g_rules_mutex);
    auto it = g_legendre_rules.find(n);
    if (it == g_legendre_rules.end())
        it = g_legendre_rules.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

namespace {

// ln 1F1(b; c; z) for c > 0, b > 0, any real z; result finite for the
// argument ranges the Lauricella integrand produces.
long double kummer_ln_general(double b, double c, long double z) {
    if (z == 0.0L) return 0.0L;
    if (z < 0.0L) return z + kummer_ln_general(c - b, c, -z);
    if (b == 1.0 && c > 1.0) return kummer_1f1_one_ln(c, (double)z);
    return logl(kummer_series_pos((long double)b, (long double)c, z));
}

// Composite Gauss-Legendre over geometrically growing panels.  Handles the
// two-scale integrands (sharp head near t = 0 plus a slow e^-(1-sum|x|)t
// tail) that defeat any single Laguerre weight, and keeps the evaluation
// error smooth in the x_i so that alternating sums over many evaluations
// cancel errors instead of amplifying them.
long double lauricella_panels(double a, std::span<const double> b,
                              std::span<const double> c, std::span<const double> x,
                              int nodes_per_panel) {
    const QuadratureRule& rule = gauss_legendre_rule(nodes_per_panel);
    const std::size_t n = x.size();
    long double sigma = 1.0L;
    for (std::size_t j = 0; j < n; ++j) sigma -= fabsl((long double)x[j]);
    const long double lga = lgammal((long double)a);
    auto ln_f = [&](long double t) {
        long double lt = (a - 1.0L) * logl(t) - t - lga;
        for (std::size_t j = 0; j < n; ++j)
            lt += kummer_ln_general(b[j], c[j], (long double)x[j] * t);
        return lt;
    };
    std::vector<long double> ln_terms;
    ln_terms.reserve(64 * rule.nodes.size());
    long double global_max = -1e4932L;
    // cap panel width so each spans a bounded number of decay e-folds
    const long double width_cap = 32.0L / sigma;
    // the integrand peaks near (a - 1)/sigma; never stop before passing it
    const long double t_peak = ((long double)a + 2.0L) / sigma;
    long double lo = 0.0L, width = 1.0L;
    const int kMaxPanels = 20000;
    for (int panel = 0;; ++panel) {
        if (panel == kMaxPanels)
            eval_fail("lauricella_fa",
                      "panel sweep did not terminate" + fmt_args({a, (double)sigma}));
        long double hi = lo + width;
        long double panel_max = -1e4932L;
        if (panel == 0) {
            // head panel via t = v^2: removes the t^(a-1) kink at the origin
            // for the integer and half-integer a used here
            long double vh = sqrtl(hi);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                long double v = 0.5L * vh * (1.0L + (long double)rule.nodes[i]);
                long double t = v * v;
                long double lt = logl(0.5L * vh * (long double)rule.weights[i] * 2.0L * v) +
                                 ln_f(t);
                ln_terms.push_back(lt);
                panel_max = std::max(panel_max, lt);
            }
        } else {
            long double mid = 0.5L * (lo + hi), half = 0.5L * width;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                long double t = mid + half * (long double)rule.nodes[i];
                long double lt = logl(half * (long double)rule.weights[i]) + ln_f(t);
                ln_terms.push_back(lt);
                panel_max = std::max(panel_max, lt);
            }
        }
        global_max = std::max(global_max, panel_max);
        lo = hi;
        width = std::min(width * 2.0L, width_cap);
        if (hi > t_peak && panel_max < global_max - 55.0L) break;
    }
    long double sum = 0.0L;
    for (long double lt : ln_terms) sum += expl(lt - global_max);
    return expl(global_max) * sum;
}

} // namespace

double lauricella_fa(double a, std::span<const double> b, std::span<const double> c,
                     std::span<const double> x) {
    if (b.size() != c.size() || b.size() != x.size() || x.empty())
        throw std::domain_error("lauricella_fa: b, c, x must have equal nonzero length");
    if (!(a > 0.0)) throw std::domain_error("lauricella_fa: requires a > 0");
    double ax = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(c[i] > 0.0)) throw std::domain_error("lauricella_fa: requires c_i > 0");
        if (!(b[i] > 0.0)) throw std::domain_error("lauricella_fa: requires b_i > 0");
        ax += std::abs(x[i]);
    }
    if (!(ax < 1.0))
        throw std::domain_error("lauricella_fa: requires sum |x_i| < 1");

    long double p40 = lauricella_panels(a, b, c, x, 40);
    long double p56 = lauricella_panels(a, b, c, x, 56);
    long double scale = std::max({fabsl(p40), fabsl(p56), 1e-300L});
    if (fabsl(p40 - p56) <= 1e-11L * scale) return static_cast<double>(p56);
    std::ostringstream os;
    os.precision(17);
    os << "lauricella_fa: quadrature resolutions disagree (a=" << a
       << ", n=" << x.size() << ", sum|x|=" << ax << ", values=" << (double)p40
       << "/" << (double)p56 << ")";
    throw EvalError(os.str());
}

double appell_f2(double a, double b1, double b2, double c1, double c2, double x,
                 double y) {
    if (!(std::abs(x) + std::abs(y) < 1.0))
        throw std::domain_error("appell_f2: requires |x| + |y| < 1");
    const double b[2] = {b1, b2};
    const double c[2] = {c1, c2};
    const double xs[2] = {x, y};
    return lauricella_fa(a, b, c, xs);
}

namespace {

std::map<std::pair<int, int>, MultinomialTable> g_multinomial;
std::mutex g_multinomial_mutex;

MultinomialTable make_multinomial(int t, int mg) {
    MultinomialTable tab;
    tab.t = t;
    tab.mg = mg;
    std::vector<Rational> base(mg);
    for (int k = 0; k < mg; ++k) base[k] = Rational(1) / Rational(factorial(k));
    std::vector<Rational> acc{Rational(1)};
    for (int rep = 0; rep < t; ++rep) {
        std::vector<Rational> next(acc.size() + mg - 1, Rational(0));
        for (std::size_t i = 0; i < acc.size(); ++i)
            for (int k = 0; k < mg; ++k) next[i + k] += acc[i] * base[k];
        acc = std::move(next);
    }
    tab.beta = std::move(acc);
    return tab;
}

} // namespace

const MultinomialTable& multinomial_coeffs(int t, int mg) {
    if (t < 0 || mg < 1)
        throw std::domain_error("multinomial_coeffs: requires t >= 0 and mg >= 1");
    std::lock_guard<std::mutex> lock(g_multinomial_mutex);
    auto key = std::make_pair(t, mg);
    auto it = g_multinomial.find(key);
    if (it == g_multinomial.end())
        it = g_multinomial.emplace(key, make_multinomial(t, mg)).first;
    return it->second;
}

} // namespace antsel
