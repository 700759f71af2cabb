#include "antsel/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "antsel/errors.hpp"
#include "antsel/performance.hpp"
#include "antsel/specfun.hpp"

namespace antsel {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t counter) {
    // decorrelate the (seed, counter) pair into one stream key
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = counter ^ 0xd1b54a32d192ed03ull;
    std::uint64_t b = splitmix64(s);
    state_ = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * next_unit() - 1.0;
        v = 2.0 * next_unit() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double RngStream::next_gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::domain_error("gamma parameters must be positive");
    if (shape < 1.0) {
        // boost the shape, then scale back by a power of a uniform
        double u;
        do {
            u = next_unit();
        } while (u == 0.0);
        return next_gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = next_normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = next_unit();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v * scale;
    }
}

void sample_channel_powers(const SchemeConfig& cfg, RngStream& rng,
                           std::vector<double>& out) {
    const double m = to_double(cfg.m);
    const double scale = cfg.omega / m;
    out.resize(static_cast<std::size_t>(cfg.n_r) * cfg.n_t);
    for (double& v : out) v = rng.next_gamma(m, scale);
}

namespace {

// sum of the pattern's ranks within one row of n values (descending ranks)
double ranked_sum(const double* row, int n, const Tasc& tasc,
                  std::vector<double>& scratch) {
    scratch.assign(row, row + n);
    std::sort(scratch.begin(), scratch.end(), std::greater<>());
    double s = 0.0;
    for (int r : tasc.ranks) s += scratch[r - 1];
    return s;
}

} // namespace

double run_selection(const std::vector<double>& snr, const SchemeConfig& cfg,
                     const Tasc& end_tasc, ReceiveMode mode) {
    const int nr = cfg.n_r, nt = cfg.n_t;
    if ((int)snr.size() != nr * nt)
        throw std::invalid_argument("snr matrix size mismatch");
    std::vector<double> scratch;
    if (cfg.scheme == Scheme::TasStbc) {
        // maximum-ratio combining across receive antennas per transmit antenna
        std::vector<double> mrc(nt, 0.0);
        for (int r = 0; r < nr; ++r)
            for (int t = 0; t < nt; ++t) mrc[t] += snr[r * nt + t];
        return ranked_sum(mrc.data(), nt, end_tasc, scratch);
    }
    if (mode == ReceiveMode::ModelFaithful) {
        double best = 0.0;
        for (int r = 0; r < nr; ++r)
            best = std::max(best, ranked_sum(&snr[r * nt], nt, end_tasc, scratch));
        return best;
    }
    // Physical: the receive branch is committed to the best-pattern winner
    Tasc top;
    top.ranks.resize(cfg.n_s);
    for (int i = 0; i < cfg.n_s; ++i) top.ranks[i] = i + 1;
    int winner = 0;
    double best = -1.0;
    for (int r = 0; r < nr; ++r) {
        double s = ranked_sum(&snr[r * nt], nt, top, scratch);
        if (s > best) {
            best = s;
            winner = r;
        }
    }
    return ranked_sum(&snr[winner * nt], nt, end_tasc, scratch);
}

int draw_feedback(const FeedbackModel& fm, RngStream& rng,
                  FeedbackDrawMode mode) {
    const Codebook& cb = fm.codebook;
    const int k = cb.k;
    if (k == 1) return 0;
    if (mode == FeedbackDrawMode::PaperModel) {
        if (rng.next_unit() < fm.p_cf) return 0;
        int wrong = static_cast<int>(rng.next_unit() * (k - 1));
        return 1 + std::min(wrong, k - 2);
    }
    int sent = std::min(static_cast<int>(rng.next_unit() * k), k - 1);
    std::uint32_t word = cb.codewords[sent];
    for (int b = 0; b < cb.eta; ++b)
        if (rng.next_unit() < fm.p_e) word ^= (1u << b);
    int decoded;
    if (!cb.proper(word, &decoded))
        decoded = std::min(static_cast<int>(rng.next_unit() * k), k - 1);
    return ((decoded - sent) % k + k) % k;
}

namespace {

struct ChunkSums {
    long double sum = 0.0L;
    long double sumsq = 0.0L;
    std::uint64_t count = 0;
};

constexpr std::uint64_t kChunk = 4096;

template <typename TrialValue>
Estimate run_plan(const TrialPlan& plan, int workers, TrialValue&& value_of) {
    if (plan.trials < 1) throw ConfigError("trial count must be at least 1");
    auto issues = plan.cfg.validate();
    if (!issues.empty()) throw ConfigError(issues);
    if (workers <= 0) {
        unsigned hc = std::thread::hardware_concurrency();
        workers = hc ? static_cast<int>(hc) : 1;
    }
    const std::uint64_t chunks = (plan.trials + kChunk - 1) / kChunk;
    workers = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), chunks));

    std::vector<ChunkSums> partial(chunks);
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> out_of_time{false};
    const auto start = std::chrono::steady_clock::now();
    const double omega = plan.cfg.omega;
    const double snr_scale = plan.gbar / omega;

    auto worker = [&]() {
        std::vector<double> gains, snr;
        while (true) {
            std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            if (plan.max_seconds > 0.0) {
                std::chrono::duration<double> elapsed =
                    std::chrono::steady_clock::now() - start;
                if (elapsed.count() > plan.max_seconds) {
                    out_of_time.store(true);
                    return;
                }
            }
            ChunkSums& cs = partial[c];
            const std::uint64_t lo = c * kChunk;
            const std::uint64_t hi = std::min(lo + kChunk, plan.trials);
            long double carry = 0.0L, carry2 = 0.0L;
            for (std::uint64_t i = lo; i < hi; ++i) {
                RngStream rng(plan.seed, i);
                sample_channel_powers(plan.cfg, rng, gains);
                snr.resize(gains.size());
                for (std::size_t j = 0; j < gains.size(); ++j)
                    snr[j] = gains[j] * snr_scale;
                long double v = value_of(snr, rng);
                long double y = v - carry;
                long double t = cs.sum + y;
                carry = (t - cs.sum) - y;
                cs.sum = t;
                long double y2 = v * v - carry2;
                long double t2 = cs.sumsq + y2;
                carry2 = (t2 - cs.sumsq) - y2;
                cs.sumsq = t2;
            }
            cs.count = hi - lo;
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers > 0 ? workers - 1 : 0);
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    long double sum = 0.0L, sumsq = 0.0L, carry = 0.0L, carry2 = 0.0L;
    std::uint64_t done = 0;
    for (const ChunkSums& cs : partial) {
        long double y = cs.sum - carry;
        long double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        long double y2 = cs.sumsq - carry2;
        long double t2 = sumsq + y2;
        carry2 = (t2 - sumsq) - y2;
        sumsq = t2;
        done += cs.count;
    }
    if (out_of_time.load())
        throw PartialResultError("trial budget exceeded the wall-clock guard",
                                 done);

    Estimate est;
    est.trials = done;
    est.mean = static_cast<double>(sum / done);
    if (done > 1) {
        long double var = (sumsq - sum * sum / done) / (done - 1);
        if (var < 0.0L) var = 0.0L;
        est.std_error = static_cast<double>(sqrtl(var / done));
    }
    return est;
}

// Per-pattern conditional outage factors for one branch. The total of the
// n iid Gamma elements is independent of their proportions, so the total
// integrates out exactly: each ranked-pattern sum is share * total, leaving
// the Gamma(total_shape) CDF at thr / (share * scale). Multiplies fv[s] by
// the factor for pattern s; the conditional value varies only through the
// share, which keeps its relative spread bounded even deep in the tail.
void branch_outage_factors(const double* elems, int n, const Codebook& cb,
                           double thr, double total_shape, double scale,
                           std::vector<double>& sorted,
                           std::vector<long double>& fv) {
    sorted.assign(elems, elems + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double total = 0.0;
    for (int i = n - 1; i >= 0; --i) total += sorted[i];
    if (!(total > 0.0)) return; // degenerate draw: every factor is 1
    for (int s = 0; s < cb.k; ++s) {
        double sel = 0.0;
        for (int r : cb.tasc_order[s].ranks) sel += sorted[r - 1];
        if (!(sel > 0.0)) continue; // share -> 0 limit: factor 1
        fv[s] *= (long double)reg_lower_gamma(total_shape,
                                              thr / (sel / total * scale));
    }
}

// end-pattern distribution realized by draw_feedback for the given mode
std::vector<double> end_pattern_weights(const FeedbackModel& fm,
                                        FeedbackDrawMode mode) {
    const int k = fm.codebook.k;
    if (k == 1 || mode == FeedbackDrawMode::BitExact)
        return k == 1 ? std::vector<double>{1.0}
                      : bit_exact_transition_matrix(fm.p_e, fm.codebook);
    std::vector<double> wts(k, fm.p_ef / (k - 1));
    wts[0] = fm.p_cf;
    return wts;
}

} // namespace

namespace {

// log-log cubic interpolant of the expected conditional error of a
// Gamma(total_shape) branch against the pattern share of the branch total;
// nodes extend one step past both ends so every query has four neighbours
struct ShareMetric {
    double lo = 0.0;
    double step = 0.0;
    std::vector<double> ln_v;

    double operator()(double share) const {
        const double x = std::log(share);
        double t = (x - lo) / step;
        if (t < 1.0) t = 1.0; // below the grid the metric is flat
        const std::size_t j = std::min(static_cast<std::size_t>(t),
                                       ln_v.size() - 3);
        const double u = t - static_cast<double>(j);
        const double y0 = ln_v[j - 1], y1 = ln_v[j];
        const double y2 = ln_v[j + 1], y3 = ln_v[j + 2];
        const double a = 0.5 * (-y0 + 3.0 * y1 - 3.0 * y2 + y3);
        const double b = y0 - 2.5 * y1 + 2.0 * y2 - 0.5 * y3;
        const double c = 0.5 * (y2 - y0);
        return std::exp(((a * u + b) * u + c) * u + y1);
    }
};

// every supported conditional error probability is exactly
//   c1 Q(sqrt(2 b x)) + c2 Q^2(sqrt(2 b x)) + c3 e^(-phi x)
// with a single argument scale b
struct CepForm {
    double b = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double phi = 0.0;
    double c3 = 0.0;
};

CepForm cep_form(const ModulationSpec& mod) {
    const double mm = mod.constellation;
    switch (mod.kind) {
        case ModulationKind::Bpsk: return {1.0, 1.0, 0.0, 0.0, 0.0};
        case ModulationKind::Cbfsk: return {0.5, 1.0, 0.0, 0.0, 0.0};
        case ModulationKind::Ncbfsk: return {0.0, 0.0, 0.0, 0.5, 0.5};
        case ModulationKind::Dbpsk: return {0.0, 0.0, 0.0, 1.0, 0.5};
        case ModulationKind::Mpsk: {
            const double s = std::sin(M_PI / mm);
            return {s * s, 2.0, 0.0, 0.0, 0.0};
        }
        case ModulationKind::Qpsk: return {0.5, 2.0, -1.0, 0.0, 0.0};
        case ModulationKind::Mpam:
            return {3.0 / (mm * mm - 1.0), 2.0 * (mm - 1.0) / mm, 0.0, 0.0,
                    0.0};
        case ModulationKind::Mqam: {
            const double root = std::sqrt(mm);
            const double l6 = (2.0 - 2.0 / root) * (2.0 - 2.0 / root);
            return {1.5 / (mm - 1.0), 4.0 - 4.0 / root, -l6, 0.0, 0.0};
        }
    }
    throw std::logic_error("unhandled modulation kind");
}

// E[cep(x)] for x ~ Gamma(shape, theta): the Q and Q^2 averages reduce to
// finite-interval integrals of the gamma MGF (Craig forms), exact and well
// conditioned at any scale; the exponential term is the MGF itself
double gamma_avg_cep(const CepForm& f, double shape, double theta) {
    double v = 0.0;
    if (f.c3 != 0.0) v += f.c3 * std::pow(1.0 + f.phi * theta, -shape);
    if (f.c1 != 0.0 || f.c2 != 0.0) {
        const QuadratureRule& gl = gauss_legendre_rule(128);
        const double bt = f.b * theta;
        auto seg = [&](double hi) {
            double s = 0.0;
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
                const double t = 0.5 * hi * (gl.nodes[i] + 1.0);
                const double sn = std::sin(t);
                s += gl.weights[i] * std::pow(1.0 + bt / (sn * sn), -shape);
            }
            return s * 0.5 * hi / M_PI;
        };
        if (f.c1 != 0.0) v += f.c1 * seg(0.5 * M_PI);
        if (f.c2 != 0.0) v += f.c2 * seg(0.25 * M_PI);
    }
    return v;
}

// exact expectation over the branch total: a pattern with share u of a
// Gamma(total_shape, gbar/m) total has SNR distributed
// Gamma(total_shape, u * gbar / m)
ShareMetric build_share_metric(const SchemeConfig& cfg,
                               const ModulationSpec& mod, double gbar) {
    const double m = to_double(cfg.m);
    const double shape = m * cfg.g() * cfg.n_t;
    const double scale = gbar / m;
    const CepForm form = cep_form(mod);
    const int n = 512;
    ShareMetric sm;
    sm.step = (0.0 - std::log(1e-6)) / (n - 1);
    sm.lo = std::log(1e-6) - sm.step;
    sm.ln_v.resize(n + 2);
    for (int j = 0; j < n + 2; ++j) {
        const double share = std::exp(sm.lo + j * sm.step);
        const double v = gamma_avg_cep(form, shape, share * scale);
        if (!(v > 0.0) || !std::isfinite(v))
            throw EvalError("conditional error interpolant node is not a "
                            "positive finite value");
        sm.ln_v[j] = std::log(v);
    }
    return sm;
}

} // namespace

Estimate estimate_error_rate(const TrialPlan& plan, int workers) {
    const ModulationSpec& mod = plan.modulation;
    const SchemeConfig& cfg = plan.cfg;
    if (plan.receive_mode == ReceiveMode::Physical) {
        // sample-path estimator: draw an end pattern, score the conditional
        // error at the realized output SNR
        const ReceiveMode mode = plan.receive_mode;
        return run_plan(plan, workers,
                        [&](const std::vector<double>& snr, RngStream& rng) {
                            int slot =
                                draw_feedback(plan.fm, rng, plan.feedback_mode);
                            const Tasc& tasc = plan.fm.codebook.tasc_order[slot];
                            return (long double)mod.cep(
                                run_selection(snr, cfg, tasc, mode));
                        });
    }
    const Codebook& cb = plan.fm.codebook;
    const int k = cb.k;
    const std::vector<double> wts =
        end_pattern_weights(plan.fm, plan.feedback_mode);
    const int nr = cfg.n_r, nt = cfg.n_t;
    const bool tas = cfg.scheme == Scheme::TasStbc;
    if (tas || nr == 1) {
        // single receive branch: mix the end patterns exactly and integrate
        // the branch total out of each conditional, as in estimate_outage;
        // only the element proportions stay random
        const ShareMetric sm = build_share_metric(cfg, mod, plan.gbar);
        return run_plan(
            plan, workers, [&](const std::vector<double>& snr, RngStream&) {
                thread_local std::vector<double> mrc, sorted;
                const double* elems = snr.data();
                if (tas && nr > 1) {
                    mrc.assign(nt, 0.0);
                    for (int r = 0; r < nr; ++r)
                        for (int t = 0; t < nt; ++t) mrc[t] += snr[r * nt + t];
                    elems = mrc.data();
                }
                sorted.assign(elems, elems + nt);
                std::sort(sorted.begin(), sorted.end(), std::greater<>());
                double total = 0.0;
                for (int i = nt - 1; i >= 0; --i) total += sorted[i];
                long double v = 0.0L;
                for (int s = 0; s < k; ++s) {
                    double sel = 0.0;
                    for (int r : cb.tasc_order[s].ranks) sel += sorted[r - 1];
                    const double share = total > 0.0 ? sel / total : 1.0;
                    v += (long double)wts[s] *
                         (share > 0.0 ? sm(share) : sm(1e-300));
                }
                return v;
            });
    }
    // receive selection couples the branches through the max, so only the
    // end-pattern mixing integrates out exactly
    return run_plan(
        plan, workers, [&](const std::vector<double>& snr, RngStream&) {
            thread_local std::vector<double> sorted;
            sorted.resize(static_cast<std::size_t>(nr) * nt);
            for (int r = 0; r < nr; ++r) {
                double* row = &sorted[static_cast<std::size_t>(r) * nt];
                std::copy(&snr[static_cast<std::size_t>(r) * nt],
                          &snr[static_cast<std::size_t>(r) * nt] + nt, row);
                std::sort(row, row + nt, std::greater<>());
            }
            long double v = 0.0L;
            for (int s = 0; s < k; ++s) {
                double best = 0.0;
                for (int r = 0; r < nr; ++r) {
                    const double* row =
                        &sorted[static_cast<std::size_t>(r) * nt];
                    double sel = 0.0;
                    for (int rank : cb.tasc_order[s].ranks) sel += row[rank - 1];
                    if (sel > best) best = sel;
                }
                v += (long double)wts[s] * mod.cep(best);
            }
            return v;
        });
}

Estimate estimate_outage(const TrialPlan& plan, double rate, int workers) {
    if (!(rate > 0.0)) throw std::domain_error("rate must be positive");
    const double thr = std::exp2(rate) - 1.0;
    const SchemeConfig& cfg = plan.cfg;
    if (plan.receive_mode == ReceiveMode::Physical) {
        const ReceiveMode mode = plan.receive_mode;
        return run_plan(plan, workers,
                        [&](const std::vector<double>& snr, RngStream& rng) {
                            int slot =
                                draw_feedback(plan.fm, rng, plan.feedback_mode);
                            const Tasc& tasc = plan.fm.codebook.tasc_order[slot];
                            double g = run_selection(snr, cfg, tasc, mode);
                            return g <= thr ? (long double)1.0L
                                            : (long double)0.0L;
                        });
    }
    // smoothed estimator: per branch, integrate the branch total out of each
    // per-pattern conditional outage, then mix the per-pattern products over
    // the exact end-pattern distribution; only the element proportions stay
    // random, so the estimator keeps its variance bounded deep in the tail
    const Codebook& cb = plan.fm.codebook;
    const int k = cb.k;
    const std::vector<double> wts = end_pattern_weights(plan.fm, plan.feedback_mode);
    const double m = to_double(cfg.m);
    const double total_shape = m * cfg.g() * cfg.n_t;
    const double scale = plan.gbar / m;
    const int nr = cfg.n_r, nt = cfg.n_t;
    const bool tas = cfg.scheme == Scheme::TasStbc;
    return run_plan(
        plan, workers, [&](const std::vector<double>& snr, RngStream&) {
            thread_local std::vector<double> mrc, sorted;
            thread_local std::vector<long double> fv;
            fv.assign(k, 1.0L);
            if (tas) {
                mrc.assign(nt, 0.0);
                for (int r = 0; r < nr; ++r)
                    for (int t = 0; t < nt; ++t) mrc[t] += snr[r * nt + t];
                branch_outage_factors(mrc.data(), nt, cb, thr, total_shape,
                                      scale, sorted, fv);
            } else {
                for (int r = 0; r < nr; ++r)
                    branch_outage_factors(&snr[r * nt], nt, cb, thr,
                                          total_shape, scale, sorted, fv);
            }
            long double v = 0.0L;
            for (int s = 0; s < k; ++s) v += (long double)wts[s] * fv[s];
            return v;
        });
}

} // namespace antsel
