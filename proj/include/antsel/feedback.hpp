#pragma once

#include <cstdint>
#include <vector>

#include "antsel/scheme.hpp"

namespace antsel {

enum class CodewordMapping {
    NaturalBinary,       // rank-pattern k (lexicographic) gets the bits of k-1
    ExplicitPermutation, // caller supplies the codeword value per pattern
};

// Feedback codebook over the K = C(n_t, n_s) selection patterns. eta bits
// cover L = 2^eta words; the L - K words left unassigned are improper and
// force a uniform arbitrary pick at the transmitter when received.
struct Codebook {
    int k = 0;
    int eta = 0;
    int l = 0;
    std::vector<std::uint32_t> codewords; // L values; first K belong to patterns
    std::vector<Tasc> tasc_order;         // K patterns, first is (1..n_s)
    std::vector<std::vector<int>> hamming; // K x L bit distances

    bool proper(std::uint32_t word, int* index) const;
};

Codebook build_codebook(const SchemeConfig& cfg, CodewordMapping mapping,
                        const std::vector<int>& permutation = {});

// P(transmitter ends on the requested pattern): (1-pe)^eta direct decodes
// plus the 1/K share of every improper decode, averaged over sent words.
double prob_correct_feedback(double p_e, const Codebook& cb);

// Full BSC process enumerated exactly: entry 0 is the correct-pattern
// probability, entry s > 0 the average probability of landing on the pattern
// a cyclic offset s away from the sent one.
std::vector<double> bit_exact_transition_matrix(double p_e, const Codebook& cb);

enum class MixingMode {
    Paper,    // wrong patterns weighted uniformly 1/(K-1)
    BitExact, // wrong patterns weighted by the enumerated BSC process
};

struct FeedbackModel {
    double p_e = 0.0;
    Codebook codebook;
    MixingMode mixing = MixingMode::Paper;
    double p_cf = 1.0;
    double p_ef = 0.0;
    std::vector<double> wrong_weights; // K-1 entries, sum to 1 (conditional)
};

FeedbackModel build_feedback_model(double p_e, Codebook cb,
                                   MixingMode mixing = MixingMode::Paper);

// p_cf * v[0] + p_ef * sum_k wrong_weights[k] * v[k+1]
double mix_metric(const std::vector<double>& per_tasc_values,
                  const FeedbackModel& fm);

} // namespace antsel
