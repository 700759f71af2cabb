#include "antsel/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "antsel/errors.hpp"

namespace antsel {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower((unsigned char)c));
    return s;
}

bool parse_double(const std::string& s, double* out) {
    std::string t = trim(s);
    if (t.empty()) return false;
    const char* b = t.data();
    const char* e = b + t.size();
    auto res = std::from_chars(b, e, *out);
    return res.ec == std::errc() && res.ptr == e;
}

bool parse_int(const std::string& s, int* out) {
    std::string t = trim(s);
    if (t.empty()) return false;
    const char* b = t.data();
    const char* e = b + t.size();
    auto res = std::from_chars(b, e, *out);
    return res.ec == std::errc() && res.ptr == e;
}

bool parse_u64(const std::string& s, std::uint64_t* out) {
    std::string t = trim(s);
    if (t.empty()) return false;
    const char* b = t.data();
    const char* e = b + t.size();
    auto res = std::from_chars(b, e, *out);
    if (res.ec == std::errc() && res.ptr == e) return true;
    // allow scientific notation ("1e6") when it names an exact integer
    double d;
    if (!parse_double(t, &d) || d < 0.0 || d > 1.8e19 || d != std::floor(d))
        return false;
    *out = static_cast<std::uint64_t>(d);
    return true;
}

// "1/2", "2", or a decimal with a modest number of digits
bool parse_rational(const std::string& s, Rational* out) {
    std::string t = trim(s);
    if (t.empty()) return false;
    std::size_t slash = t.find('/');
    if (slash != std::string::npos) {
        long num, den;
        std::string a = trim(t.substr(0, slash)), b = trim(t.substr(slash + 1));
        char* end = nullptr;
        num = std::strtol(a.c_str(), &end, 10);
        if (end != a.c_str() + a.size() || a.empty()) return false;
        den = std::strtol(b.c_str(), &end, 10);
        if (end != b.c_str() + b.size() || b.empty() || den == 0) return false;
        *out = rat(num, den);
        return true;
    }
    std::size_t dot = t.find('.');
    if (dot == std::string::npos) {
        long v;
        char* end = nullptr;
        v = std::strtol(t.c_str(), &end, 10);
        if (end != t.c_str() + t.size()) return false;
        *out = rat(v);
        return true;
    }
    std::string digits = t.substr(0, dot) + t.substr(dot + 1);
    std::size_t frac = t.size() - dot - 1;
    if (digits.empty() || frac > 9) return false;
    char* end = nullptr;
    long v = std::strtol(digits.c_str(), &end, 10);
    if (end != digits.c_str() + digits.size()) return false;
    long den = 1;
    for (std::size_t i = 0; i < frac; ++i) den *= 10;
    *out = rat(v, den);
    return true;
}

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int derived_ns(const RunDescription& run) {
    if (run.ns != 0) return run.ns;
    if (run.code == "g2") return 2;
    if (run.code == "g3") return 3;
    return 0;
}

Rational derived_code_rate(const RunDescription& run) {
    if (run.code_rate != 0) return run.code_rate;
    if (run.code == "g3" || (run.code.empty() && derived_ns(run) == 3))
        return rat(1, 2);
    return rat(1);
}

// small-denominator rational reconstruction for CSV m values
Rational rational_from_double(double v) {
    for (long den : {1L, 2L, 3L, 4L, 5L, 6L, 8L, 10L, 12L, 16L}) {
        double scaled = v * (double)den;
        if (std::abs(scaled - std::round(scaled)) < 1e-9)
            return rat((long)std::llround(scaled), den);
    }
    throw ConfigError("fading parameter " + fmt_double(v) +
                      " is not a small rational");
}

} // namespace

std::vector<double> SnrGrid::points() const {
    std::vector<double> out;
    if (!(step_db > 0.0)) return out;
    // half-step slack keeps the inclusive endpoint stable against rounding
    for (int k = 0; start_db + k * step_db <= stop_db + step_db * 0.5; ++k)
        out.push_back(start_db + k * step_db);
    return out;
}

SnrGrid parse_snr_grid(const std::string& text) {
    std::vector<std::string> parts = split(trim(text), ':');
    SnrGrid g;
    if (parts.size() != 3 || !parse_double(parts[0], &g.start_db) ||
        !parse_double(parts[1], &g.step_db) ||
        !parse_double(parts[2], &g.stop_db))
        throw ConfigError("snr grid must be start:step:stop, got '" + text + "'");
    return g;
}

SchemeConfig RunDescription::config(int nt_value, int nr_value) const {
    SchemeConfig cfg;
    cfg.scheme = scheme;
    cfg.n_t = nt_value;
    cfg.n_r = nr_value;
    cfg.n_s = derived_ns(*this);
    cfg.m = m;
    cfg.code_rate = derived_code_rate(*this);
    return cfg;
}

MixingMode RunDescription::mixing() const {
    return feedback_mode == FeedbackDrawMode::BitExact ? MixingMode::BitExact
                                                       : MixingMode::Paper;
}

std::string RunDescription::metric_name() const {
    return is_outage ? "rate=" + fmt_double(rate) : mod.name();
}

double RunDescription::es_lin(double snr_db) const {
    double lin = std::pow(10.0, snr_db / 10.0);
    if (axis == SnrAxis::EsN0) return lin;
    double bits = is_outage ? rate : (double)mod.bits_per_symbol();
    return lin * to_double(derived_code_rate(*this)) * bits;
}

std::string apply_option(RunDescription& run, const std::string& rawkey,
                         const std::string& rawvalue) {
    const std::string key = lower(trim(rawkey));
    const std::string value = trim(rawvalue);
    auto bad = [&](const std::string& what) {
        return "key '" + key + "': " + what + " (got '" + value + "')";
    };
    if (key == "scheme") {
        std::string v = lower(value);
        if (v == "tas") run.scheme = Scheme::TasStbc;
        else if (v == "joint") run.scheme = Scheme::JointTrasStbc;
        else return bad("expected tas or joint");
    } else if (key == "nt" || key == "nr") {
        std::vector<int> vals;
        for (const std::string& tok : split(value, ',')) {
            int v;
            if (!parse_int(tok, &v)) return bad("expected integer list");
            vals.push_back(v);
        }
        if (vals.empty()) return bad("empty list");
        (key == "nt" ? run.nt : run.nr) = std::move(vals);
    } else if (key == "ns") {
        if (!parse_int(value, &run.ns)) return bad("expected integer");
    } else if (key == "m") {
        if (!parse_rational(value, &run.m)) return bad("expected rational");
    } else if (key == "code") {
        std::string v = lower(value);
        if (v != "g2" && v != "g3") return bad("expected g2 or g3");
        run.code = v;
    } else if (key == "code-rate" || key == "code_rate") {
        if (!parse_rational(value, &run.code_rate) || run.code_rate <= 0)
            return bad("expected positive rational");
    } else if (key == "mod") {
        try {
            run.mod = parse_modulation(value);
        } catch (const ConfigError& e) {
            return e.what();
        }
        run.is_outage = false;
        run.metric_set = true;
    } else if (key == "rate") {
        if (!parse_double(value, &run.rate) || !(run.rate > 0.0))
            return bad("expected positive rate");
        run.is_outage = true;
        run.metric_set = true;
    } else if (key == "pe") {
        std::vector<double> vals;
        for (const std::string& tok : split(value, ',')) {
            double v;
            if (!parse_double(tok, &v)) return bad("expected probability list");
            vals.push_back(v);
        }
        if (vals.empty()) return bad("empty list");
        run.pe = std::move(vals);
    } else if (key == "snr") {
        try {
            run.grid = parse_snr_grid(value);
        } catch (const ConfigError& e) {
            return e.what();
        }
    } else if (key == "snr-axis" || key == "snr_axis") {
        std::string v = lower(value);
        if (v == "es") run.axis = SnrAxis::EsN0;
        else if (v == "eb") run.axis = SnrAxis::EbN0;
        else return bad("expected es or eb");
    } else if (key == "trials") {
        if (!parse_u64(value, &run.trials) || run.trials == 0)
            return bad("expected positive trial count");
    } else if (key == "seed") {
        if (!parse_u64(value, &run.seed)) return bad("expected integer seed");
    } else if (key == "feedback-mode" || key == "feedback_mode") {
        std::string v = lower(value);
        if (v == "paper") run.feedback_mode = FeedbackDrawMode::PaperModel;
        else if (v == "bit-exact" || v == "bitexact")
            run.feedback_mode = FeedbackDrawMode::BitExact;
        else return bad("expected paper or bit-exact");
    } else if (key == "receive-mode" || key == "receive_mode") {
        std::string v = lower(value);
        if (v == "model") run.receive_mode = ReceiveMode::ModelFaithful;
        else if (v == "physical") run.receive_mode = ReceiveMode::Physical;
        else return bad("expected model or physical");
    } else if (key == "mapping") {
        std::string v = lower(value);
        if (v == "natural") {
            run.mapping = CodewordMapping::NaturalBinary;
            run.permutation.clear();
        } else if (v.rfind("perm=", 0) == 0) {
            std::vector<int> perm;
            for (const std::string& tok : split(v.substr(5), ',')) {
                int p;
                if (!parse_int(tok, &p)) return bad("expected perm=i,j,...");
                perm.push_back(p);
            }
            run.mapping = CodewordMapping::ExplicitPermutation;
            run.permutation = std::move(perm);
        } else {
            return bad("expected natural or perm=i,j,...");
        }
    } else if (key == "out") {
        run.out_path = value;
    } else {
        return "unknown key '" + key + "'";
    }
    return "";
}

std::vector<std::string> validate_run(const RunDescription& run) {
    std::vector<std::string> issues;
    if (!run.metric_set)
        issues.push_back("no metric chosen: set mod=... or rate=...");
    if (!run.code.empty()) {
        int want = run.code == "g2" ? 2 : 3;
        if (run.ns != 0 && run.ns != want)
            issues.push_back("ns=" + std::to_string(run.ns) +
                             " conflicts with code=" + run.code);
    }
    if (derived_ns(run) == 0)
        issues.push_back("space-time block size unknown: set code=g2|g3 or ns=...");
    if (run.nt.empty()) issues.push_back("empty transmit-antenna list");
    if (run.nr.empty()) issues.push_back("empty receive-antenna list");
    if (run.pe.empty()) issues.push_back("empty feedback error list");
    for (double pe : run.pe)
        if (!(pe >= 0.0 && pe <= 1.0))
            issues.push_back("pe=" + fmt_double(pe) + " outside [0, 1]");
    if (!(run.grid.step_db > 0.0))
        issues.push_back("snr grid step must be positive");
    else if (run.grid.points().empty())
        issues.push_back("snr grid is empty");
    if (run.mapping == CodewordMapping::NaturalBinary && !run.permutation.empty())
        issues.push_back("mapping=natural takes no permutation");
    if (run.mapping == CodewordMapping::ExplicitPermutation &&
        run.permutation.empty())
        issues.push_back("explicit mapping needs perm=...");
    if (derived_ns(run) != 0) {
        for (int ntv : run.nt)
            for (int nrv : run.nr) {
                std::vector<std::string> sub = run.config(ntv, nrv).validate();
                std::string ctx = "nt=" + std::to_string(ntv) +
                                  ",nr=" + std::to_string(nrv) + ": ";
                for (std::string& s : sub) {
                    std::string msg = ctx + s;
                    if (std::find(issues.begin(), issues.end(), msg) ==
                        issues.end())
                        issues.push_back(msg);
                }
            }
    }
    return issues;
}

RunDescription parse_config(const std::string& text) {
    RunDescription run;
    std::vector<std::string> issues;
    // gather key=value pairs; a comma token without '=' continues the
    // previous value, so list values survive the pair separator
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const std::string& rawline : split(text, '\n')) {
        std::string line = rawline.substr(0, rawline.find('#'));
        for (const std::string& tok : split(line, ',')) {
            std::string t = trim(tok);
            if (t.empty()) continue;
            std::size_t eq = t.find('=');
            // "perm=..." values carry their own '=': only a token whose text
            // before '=' looks like a key starts a new pair
            if (eq != std::string::npos) {
                pairs.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
            } else if (!pairs.empty()) {
                pairs.back().second += "," + t;
            } else {
                issues.push_back("dangling value '" + t + "'");
            }
        }
    }
    for (const auto& [key, value] : pairs) {
        std::string err = apply_option(run, key, value);
        if (!err.empty()) issues.push_back(err);
    }
    for (const std::string& v : validate_run(run)) issues.push_back(v);
    if (!issues.empty()) throw ConfigError(issues);
    return run;
}

RunDescription figure_preset(const std::string& name) {
    RunDescription run;
    std::string n = lower(trim(name));
    auto set = [&](std::initializer_list<std::pair<const char*, const char*>> kv) {
        for (const auto& [k, v] : kv) {
            std::string err = apply_option(run, k, v);
            if (!err.empty()) throw ConfigError("preset " + n + ": " + err);
        }
    };
    if (n == "fig2")
        set({{"scheme", "joint"}, {"code", "g3"}, {"nt", "4,5"}, {"nr", "1,2"},
             {"m", "2"}, {"rate", "2"}, {"pe", "0.05,0.2"}});
    else if (n == "fig3")
        set({{"scheme", "tas"}, {"code", "g2"}, {"nt", "3,4"}, {"nr", "3"},
             {"m", "1"}, {"mod", "qpsk"}, {"pe", "0,0.01,0.2,0.5"}});
    else if (n == "fig4")
        set({{"scheme", "tas"}, {"code", "g3"}, {"nt", "4,5"}, {"nr", "2"},
             {"m", "0.5"}, {"mod", "16qam"}, {"pe", "0,0.01,0.2,0.5"}});
    else if (n == "fig5")
        set({{"scheme", "joint"}, {"code", "g2"}, {"nt", "3,4"}, {"nr", "3"},
             {"m", "1"}, {"mod", "qpsk"}, {"pe", "0,0.01,0.2,0.5"}});
    else if (n == "fig6")
        set({{"scheme", "joint"}, {"code", "g3"}, {"nt", "4,5"}, {"nr", "2"},
             {"m", "2"}, {"mod", "cbfsk"}, {"pe", "0,0.01,0.2,0.5"},
             {"snr-axis", "eb"}});
    else if (n == "fig7")
        set({{"scheme", "joint"}, {"code", "g2"}, {"nt", "3"}, {"nr", "1,2,3"},
             {"m", "1"}, {"mod", "bpsk"}, {"pe", "0.01,0.1"},
             {"snr-axis", "eb"}});
    else
        throw ConfigError("unknown preset '" + name + "' (fig2..fig7)");
    return run;
}

std::vector<SweepRow> run_sweep(const RunDescription& run, int workers) {
    std::vector<std::string> issues = validate_run(run);
    if (!issues.empty()) throw ConfigError(issues);
    if (workers <= 0) workers = (int)std::thread::hardware_concurrency();
    if (workers <= 0) workers = 1;

    struct Curve {
        SchemeConfig cfg;
        FeedbackModel fm;
        double pe;
    };
    std::vector<Curve> curves;
    for (int ntv : run.nt)
        for (int nrv : run.nr) {
            SchemeConfig cfg = run.config(ntv, nrv);
            Codebook cb = build_codebook(cfg, run.mapping, run.permutation);
            for (double pe : run.pe)
                curves.push_back({cfg, build_feedback_model(pe, cb, run.mixing()),
                                  pe});
        }
    const std::vector<double> grid = run.grid.points();
    const std::string metric = run.metric_name();
    std::vector<SweepRow> rows(curves.size() * grid.size());

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::vector<std::string> errors;
    auto work = [&] {
        for (std::size_t idx = next.fetch_add(1); idx < rows.size();
             idx = next.fetch_add(1)) {
            const Curve& cv = curves[idx / grid.size()];
            const double snr_db = grid[idx % grid.size()];
            SweepRow& row = rows[idx];
            row.scheme = cv.cfg.scheme == Scheme::TasStbc ? "tas" : "joint";
            row.nt = cv.cfg.n_t;
            row.ns = cv.cfg.n_s;
            row.nr = cv.cfg.n_r;
            row.m = to_double(cv.cfg.m);
            row.code = cv.cfg.n_s == 2 ? "g2" : "g3";
            row.metric = metric;
            row.pe = cv.pe;
            row.snr_db = snr_db;
            try {
                double gbar = cv.cfg.branch_gbar(run.es_lin(snr_db));
                row.analytic =
                    run.is_outage
                        ? averaged_outage(cv.cfg, run.rate, cv.fm, gbar)
                        : averaged_error_rate(cv.cfg, run.mod, cv.fm, gbar);
                // the alternating closed forms bottom out around 1e-14;
                // below that the sign is noise, and the column is a
                // probability, so floor it
                if (row.analytic < 0.0) row.analytic = 0.0;
                if (run.with_asymptote) {
                    std::vector<double> per(cv.fm.codebook.k);
                    for (int k = 0; k < cv.fm.codebook.k; ++k) {
                        const Tasc& tasc = cv.fm.codebook.tasc_order[k];
                        per[k] = run.is_outage
                                     ? outage_asymptote(cv.cfg, tasc, run.rate,
                                                        gbar)
                                     : modulation_asymptote(cv.cfg, tasc,
                                                            run.mod, gbar);
                    }
                    row.asymptotic = mix_metric(per, cv.fm);
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                errors.push_back("nt=" + std::to_string(row.nt) + " nr=" +
                                 std::to_string(row.nr) + " pe=" +
                                 fmt_double(row.pe) + " snr_db=" +
                                 fmt_double(snr_db) + ": " + e.what());
            }
        }
    };
    {
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
        for (std::thread& t : pool) t.join();
    }
    if (!errors.empty()) {
        std::sort(errors.begin(), errors.end());
        std::string joined;
        for (const std::string& e : errors) {
            if (!joined.empty()) joined += "; ";
            joined += e;
        }
        throw EvalError(joined);
    }

    if (run.with_mc) {
        // rows sequential, trials parallel inside the estimator
        for (std::size_t idx = 0; idx < rows.size(); ++idx) {
            const Curve& cv = curves[idx / grid.size()];
            SweepRow& row = rows[idx];
            TrialPlan plan;
            plan.cfg = cv.cfg;
            plan.fm = cv.fm;
            plan.modulation = run.mod;
            plan.gbar = cv.cfg.branch_gbar(run.es_lin(row.snr_db));
            plan.trials = run.trials;
            plan.seed = run.seed;
            plan.feedback_mode = run.feedback_mode;
            plan.receive_mode = run.receive_mode;
            Estimate est = run.is_outage
                               ? estimate_outage(plan, run.rate, workers)
                               : estimate_error_rate(plan, workers);
            row.mc_mean = est.mean;
            row.mc_stderr = est.std_error;
        }
    }
    return rows;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "scheme,nt,ns,nr,m,code,metric,pe,snr_db,analytic,mc_mean,mc_stderr,"
        "asymptotic\n";
    for (const SweepRow& r : rows) {
        out += r.scheme + ',' + std::to_string(r.nt) + ',' +
               std::to_string(r.ns) + ',' + std::to_string(r.nr) + ',' +
               fmt_double(r.m) + ',' + r.code + ',' + r.metric + ',' +
               fmt_double(r.pe) + ',' + fmt_double(r.snr_db) + ',' +
               fmt_double(r.analytic) + ',';
        if (r.mc_mean) out += fmt_double(*r.mc_mean);
        out += ',';
        if (r.mc_stderr) out += fmt_double(*r.mc_stderr);
        out += ',';
        if (r.asymptotic) out += fmt_double(*r.asymptotic);
        out += '\n';
    }
    return out;
}

std::vector<SweepRow> from_csv(const std::string& text) {
    std::vector<std::string> lines = split(text, '\n');
    if (lines.empty())
        throw ConfigError("empty CSV");
    const std::string header =
        "scheme,nt,ns,nr,m,code,metric,pe,snr_db,analytic,mc_mean,mc_stderr,"
        "asymptotic";
    if (trim(lines[0]) != header)
        throw ConfigError("unexpected CSV header '" + trim(lines[0]) + "'");
    std::vector<SweepRow> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        std::string line = lines[li];
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> f = split(line, ',');
        if (f.size() != 13)
            throw ConfigError("line " + std::to_string(li + 1) + ": expected 13 fields, got " +
                              std::to_string(f.size()));
        SweepRow r;
        r.scheme = trim(f[0]);
        bool ok = parse_int(f[1], &r.nt) && parse_int(f[2], &r.ns) &&
                  parse_int(f[3], &r.nr) && parse_double(f[4], &r.m);
        r.code = trim(f[5]);
        r.metric = trim(f[6]);
        ok = ok && parse_double(f[7], &r.pe) && parse_double(f[8], &r.snr_db) &&
             parse_double(f[9], &r.analytic);
        auto opt = [&](const std::string& s, std::optional<double>* out) {
            std::string t = trim(s);
            if (t.empty()) return true;
            double v;
            if (!parse_double(t, &v)) return false;
            *out = v;
            return true;
        };
        ok = ok && opt(f[10], &r.mc_mean) && opt(f[11], &r.mc_stderr) &&
             opt(f[12], &r.asymptotic);
        if (!ok)
            throw ConfigError("line " + std::to_string(li + 1) +
                              ": malformed numeric field");
        rows.push_back(std::move(r));
    }
    return rows;
}

double crossing_db(const std::vector<double>& snr_db,
                   const std::vector<double>& metric, double level) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (snr_db.size() != metric.size() || snr_db.size() < 2 || !(level > 0.0))
        return nan;
    for (std::size_t i = 0; i + 1 < metric.size(); ++i) {
        double a = metric[i], b = metric[i + 1];
        if (!(a > 0.0) || !(b > 0.0)) continue;
        if (a < level || b > level) continue;
        if (a == b) return snr_db[i];
        double frac = (std::log(a) - std::log(level)) / (std::log(a) - std::log(b));
        return snr_db[i] + (snr_db[i + 1] - snr_db[i]) * frac;
    }
    return nan;
}

namespace {

struct CurveRef {
    std::string label;
    double pe = 0.0;
    std::vector<const SweepRow*> rows; // grid order as given
};

// group rows into curves keyed by everything but pe and snr, keeping
// first-appearance order
std::vector<std::vector<CurveRef>> group_curves(const std::vector<SweepRow>& rows) {
    std::vector<std::vector<CurveRef>> groups;
    std::map<std::string, std::size_t> group_index;
    for (const SweepRow& r : rows) {
        std::string key = r.scheme + " nt=" + std::to_string(r.nt) +
                          " nr=" + std::to_string(r.nr) + " m=" + fmt_double(r.m) +
                          " " + r.code + " " + r.metric;
        auto [it, fresh] = group_index.try_emplace(key, groups.size());
        if (fresh) groups.emplace_back();
        std::vector<CurveRef>& g = groups[it->second];
        auto cit = std::find_if(g.begin(), g.end(),
                                [&](const CurveRef& c) { return c.pe == r.pe; });
        if (cit == g.end()) {
            g.push_back({key, r.pe, {}});
            cit = g.end() - 1;
        }
        cit->rows.push_back(&r);
    }
    return groups;
}

// ideal (error-free feedback) analytic curve for a row group, used when the
// rows carry no pe=0 baseline
std::vector<double> ideal_curve(const CurveRef& curve, SnrAxis axis) {
    const SweepRow& first = *curve.rows.front();
    SchemeConfig cfg;
    cfg.scheme = first.scheme == "tas" ? Scheme::TasStbc : Scheme::JointTrasStbc;
    cfg.n_t = first.nt;
    cfg.n_s = first.ns;
    cfg.n_r = first.nr;
    cfg.m = rational_from_double(first.m);
    cfg.code_rate = first.code == "g3" ? rat(1, 2) : rat(1);
    Tasc best;
    for (int i = 1; i <= cfg.n_s; ++i) best.ranks.push_back(i);
    bool is_outage = first.metric.rfind("rate=", 0) == 0;
    double rate = 0.0;
    ModulationSpec mod;
    if (is_outage) {
        if (!parse_double(first.metric.substr(5), &rate))
            throw ConfigError("bad metric field '" + first.metric + "'");
    } else {
        mod = parse_modulation(first.metric);
    }
    double bits = is_outage ? rate : (double)mod.bits_per_symbol();
    std::vector<double> vals;
    vals.reserve(curve.rows.size());
    for (const SweepRow* r : curve.rows) {
        double lin = std::pow(10.0, r->snr_db / 10.0);
        if (axis == SnrAxis::EbN0) lin *= to_double(cfg.code_rate) * bits;
        double gbar = cfg.branch_gbar(lin);
        vals.push_back(is_outage ? outage(cfg, best, rate, gbar)
                                 : error_rate(cfg, best, mod, gbar));
    }
    return vals;
}

} // namespace

std::string compare_report(const std::vector<SweepRow>& rows, double gap_level,
                           SnrAxis axis) {
    if (rows.empty()) throw ConfigError("no rows to compare");
    bool any_mc = std::any_of(rows.begin(), rows.end(),
                              [](const SweepRow& r) { return r.mc_mean.has_value(); });
    if (!any_mc)
        throw ConfigError("rows carry no simulation columns (mc_mean empty)");
    std::vector<std::vector<CurveRef>> groups = group_curves(rows);

    std::string out = "simulation agreement\n";
    for (const auto& group : groups)
        for (const CurveRef& c : group) {
            int n = 0, outside = 0;
            double maxrel = 0.0;
            for (const SweepRow* r : c.rows) {
                if (!r->mc_mean) continue;
                ++n;
                double mc = *r->mc_mean;
                if (mc > 0.0)
                    maxrel = std::max(maxrel, std::abs(r->analytic - mc) / mc);
                double sig = r->mc_stderr.value_or(0.0);
                if (std::abs(r->analytic - mc) > 3.0 * sig) ++outside;
            }
            if (n == 0) continue;
            out += "  " + c.label + " pe=" + fmt_double(c.pe) +
                   ": max |analytic-mc|/mc = " + fmt_double(maxrel) + ", " +
                   std::to_string(outside) + " of " + std::to_string(n) +
                   " points outside 3 sigma\n";
        }

    out += "high-snr slope (decades per 10 dB)\n";
    for (const auto& group : groups)
        for (const CurveRef& c : group) {
            std::vector<const SweepRow*> pos;
            for (const SweepRow* r : c.rows)
                if (r->analytic > 0.0) pos.push_back(r);
            if (pos.size() < 2) continue;
            const SweepRow* lo = pos[pos.size() - 2];
            const SweepRow* hi = pos.back();
            if (lo->snr_db >= hi->snr_db) continue;
            double slope = (std::log10(lo->analytic) - std::log10(hi->analytic)) /
                           ((hi->snr_db - lo->snr_db) / 10.0);
            const SweepRow& f = *c.rows.front();
            double floor_ado = f.m * f.nr * f.ns;
            double ideal_ado = f.m * f.nr * f.nt;
            out += "  " + c.label + " pe=" + fmt_double(c.pe) + ": measured " +
                   fmt_double(slope) + " (error-feedback floor " +
                   fmt_double(floor_ado) + ", ideal " + fmt_double(ideal_ado) +
                   ")\n";
        }

    out += "db gaps vs ideal feedback at metric " + fmt_double(gap_level) + "\n";
    for (const auto& group : groups) {
        const CurveRef* base = nullptr;
        for (const CurveRef& c : group)
            if (c.pe == 0.0) base = &c;
        std::vector<double> base_x, base_y;
        for (const SweepRow* r : (base ? base->rows : group.front().rows)) {
            base_x.push_back(r->snr_db);
            base_y.push_back(base ? r->analytic : 0.0);
        }
        if (!base) base_y = ideal_curve(group.front(), axis);
        double base_cross = crossing_db(base_x, base_y, gap_level);
        for (const CurveRef& c : group) {
            if (c.pe == 0.0) continue;
            std::vector<double> x, y;
            for (const SweepRow* r : c.rows) {
                x.push_back(r->snr_db);
                y.push_back(r->analytic);
            }
            double cross = crossing_db(x, y, gap_level);
            out += "  " + c.label + " pe=" + fmt_double(c.pe) + ": ";
            if (std::isnan(base_cross) || std::isnan(cross))
                out += "level not reached on the grid\n";
            else
                out += fmt_double(cross - base_cross) + " dB\n";
        }
    }
    return out;
}

} // namespace antsel
