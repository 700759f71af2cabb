#include "antsel/feedback.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "antsel/errors.hpp"

namespace antsel {

bool Codebook::proper(std::uint32_t word, int* index) const {
    for (int i = 0; i < k; ++i) {
        if (codewords[i] == word) {
            if (index) *index = i;
            return true;
        }
    }
    return false;
}

Codebook build_codebook(const SchemeConfig& cfg, CodewordMapping mapping,
                        const std::vector<int>& permutation) {
    auto issues = cfg.validate();
    if (!issues.empty()) throw ConfigError(issues);

    Codebook cb;
    cb.tasc_order = enumerate_tascs(cfg.n_t, cfg.n_s);
    cb.k = static_cast<int>(cb.tasc_order.size());
    cb.eta = 0;
    while ((1 << cb.eta) < cb.k) ++cb.eta;
    cb.l = 1 << cb.eta;

    std::vector<std::uint32_t> assigned(cb.k);
    if (mapping == CodewordMapping::NaturalBinary) {
        if (!permutation.empty())
            throw ConfigError("natural mapping takes no permutation");
        for (int i = 0; i < cb.k; ++i) assigned[i] = static_cast<std::uint32_t>(i);
    } else {
        std::vector<std::string> errs;
        if ((int)permutation.size() != cb.k)
            errs.push_back("permutation length " + std::to_string(permutation.size()) +
                           ", expected " + std::to_string(cb.k));
        std::vector<bool> seen(cb.l, false);
        for (int v : permutation) {
            if (v < 0 || v >= cb.l)
                errs.push_back("permutation value " + std::to_string(v) +
                               " outside [0, " + std::to_string(cb.l - 1) + "]");
            else if (seen[v])
                errs.push_back("permutation value " + std::to_string(v) + " repeated");
            else
                seen[v] = true;
        }
        if (!errs.empty()) throw ConfigError(errs);
        for (int i = 0; i < cb.k; ++i) assigned[i] = static_cast<std::uint32_t>(permutation[i]);
    }

    cb.codewords = assigned;
    std::vector<bool> used(cb.l, false);
    for (std::uint32_t w : assigned) used[w] = true;
    for (int w = 0; w < cb.l; ++w)
        if (!used[w]) cb.codewords.push_back(static_cast<std::uint32_t>(w));

    cb.hamming.assign(cb.k, std::vector<int>(cb.l));
    for (int i = 0; i < cb.k; ++i)
        for (int j = 0; j < cb.l; ++j)
            cb.hamming[i][j] = std::popcount(cb.codewords[i] ^ cb.codewords[j]);
    return cb;
}

double prob_correct_feedback(double p_e, const Codebook& cb) {
    if (p_e < 0.0 || p_e > 1.0)
        throw std::domain_error("crossover probability outside [0, 1]");
    double p_cf = std::pow(1.0 - p_e, cb.eta);
    if (cb.l > cb.k) {
        double sum = 0.0;
        for (int i = 0; i < cb.k; ++i)
            for (int j = cb.k; j < cb.l; ++j) {
                int d = cb.hamming[i][j];
                sum += std::pow(p_e, d) * std::pow(1.0 - p_e, cb.eta - d);
            }
        p_cf += sum / (static_cast<double>(cb.k) * cb.k);
    }
    return p_cf;
}

std::vector<double> bit_exact_transition_matrix(double p_e, const Codebook& cb) {
    if (p_e < 0.0 || p_e > 1.0)
        throw std::domain_error("crossover probability outside [0, 1]");
    std::vector<double> slot(cb.k, 0.0);
    for (int i = 0; i < cb.k; ++i) {
        for (std::uint32_t e = 0; e < static_cast<std::uint32_t>(cb.l); ++e) {
            int d = std::popcount(e);
            double pr = std::pow(p_e, d) * std::pow(1.0 - p_e, cb.eta - d);
            std::uint32_t w = cb.codewords[i] ^ e;
            int j;
            if (cb.proper(w, &j)) {
                slot[((j - i) % cb.k + cb.k) % cb.k] += pr;
            } else {
                // arbitrary pick: every pattern gets an equal share
                for (int j2 = 0; j2 < cb.k; ++j2)
                    slot[((j2 - i) % cb.k + cb.k) % cb.k] += pr / cb.k;
            }
        }
    }
    for (double& s : slot) s /= cb.k;
    return slot;
}

FeedbackModel build_feedback_model(double p_e, Codebook cb, MixingMode mixing) {
    FeedbackModel fm;
    fm.p_e = p_e;
    fm.mixing = mixing;
    fm.codebook = std::move(cb);
    const int k = fm.codebook.k;
    if (mixing == MixingMode::Paper) {
        fm.p_cf = prob_correct_feedback(p_e, fm.codebook);
        fm.wrong_weights.assign(std::max(k - 1, 0), k > 1 ? 1.0 / (k - 1) : 0.0);
    } else {
        std::vector<double> slot = bit_exact_transition_matrix(p_e, fm.codebook);
        fm.p_cf = slot[0];
        fm.wrong_weights.resize(std::max(k - 1, 0));
        double wrong = 1.0 - slot[0];
        for (int s = 1; s < k; ++s)
            fm.wrong_weights[s - 1] = wrong > 0.0 ? slot[s] / wrong : 1.0 / (k - 1);
    }
    fm.p_ef = 1.0 - fm.p_cf;
    return fm;
}

double mix_metric(const std::vector<double>& per_tasc_values,
                  const FeedbackModel& fm) {
    const int k = fm.codebook.k;
    if ((int)per_tasc_values.size() != k)
        throw std::invalid_argument("per-pattern value list has size " +
                                    std::to_string(per_tasc_values.size()) +
                                    ", expected " + std::to_string(k));
    double acc = fm.p_cf * per_tasc_values[0];
    for (int s = 1; s < k; ++s)
        acc += fm.p_ef * fm.wrong_weights[s - 1] * per_tasc_values[s];
    return acc;
}

} // namespace antsel
