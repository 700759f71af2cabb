#pragma once

#include <cstdint>
#include <vector>

#include "antsel/feedback.hpp"
#include "antsel/performance.hpp"
#include "antsel/scheme.hpp"

namespace antsel {

// Counter-based per-trial random stream: the sequence is a pure function of
// (seed, counter), so estimates never depend on worker scheduling.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t counter);

    std::uint64_t next_u64();
    double next_unit();   // [0, 1)
    double next_normal(); // standard normal, polar method
    // Gamma(shape, scale); shape may be below 1.
    double next_gamma(double shape, double scale);

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum class FeedbackDrawMode {
    PaperModel, // correct with p_CF, otherwise uniform over wrong patterns
    BitExact,   // flip the actual codeword bits, arbitrary pick on improper
};

enum class ReceiveMode {
    ModelFaithful, // every receive branch re-ranks its own elements
    Physical,      // receive branch committed to the best-pattern winner
};

struct TrialPlan {
    SchemeConfig cfg;
    FeedbackModel fm;
    ModulationSpec modulation;
    double gbar = 1.0;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    FeedbackDrawMode feedback_mode = FeedbackDrawMode::PaperModel;
    ReceiveMode receive_mode = ReceiveMode::ModelFaithful;
    double max_seconds = 0.0; // 0 disables the wall-clock guard
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

// n_r x n_t power gains (row-major), i.i.d. Gamma(m, omega/m).
void sample_channel_powers(const SchemeConfig& cfg, RngStream& rng,
                           std::vector<double>& out);

// Output SNR for the pattern actually in use. `snr` is the n_r x n_t
// per-element SNR matrix (row-major).
double run_selection(const std::vector<double>& snr, const SchemeConfig& cfg,
                     const Tasc& end_tasc, ReceiveMode mode);

// Index into fm.codebook.tasc_order of the pattern the transmitter ends on.
int draw_feedback(const FeedbackModel& fm, RngStream& rng,
                  FeedbackDrawMode mode);

// Semi-analytic estimates: per-trial conditional error probability (or the
// outage indicator) averaged over sampled channels. Deterministic for a
// given plan, any worker count. workers = 0 picks the hardware count.
Estimate estimate_error_rate(const TrialPlan& plan, int workers = 0);
Estimate estimate_outage(const TrialPlan& plan, double rate, int workers = 0);

} // namespace antsel
