#pragma once

#include <string>
#include <vector>

#include "antsel/feedback.hpp"
#include "antsel/scheme.hpp"

namespace antsel {

enum class ModulationKind { Bpsk, Cbfsk, Ncbfsk, Dbpsk, Mpsk, Qpsk, Mpam, Mqam };

// Modulation descriptor: closed-form error-rate parameters plus the matching
// conditional error probability used by the simulator. Metric is SER for
// M-ary kinds and BER for binary kinds.
struct ModulationSpec {
    ModulationKind kind = ModulationKind::Bpsk;
    int constellation = 2;     // M
    bool approximate = false;  // identity is approximate (M-PSK, M >= 8)

    int bits_per_symbol() const;
    double cep(double gamma) const; // error probability given instantaneous SNR
    std::string name() const;
};

ModulationSpec make_modulation(ModulationKind kind, int constellation = 0);
// "bpsk", "qpsk", "16qam", "8psk", "4pam", ... (case-insensitive)
ModulationSpec parse_modulation(const std::string& text);

// theta * int_0^inf x^eps e^(-phi x) [F(x)]^N dx, with [F]^N the output CDF
// at per-branch average SNR gbar. Term-wise exponential-polynomial form.
double unified_j(const SchemeConfig& cfg, const Tasc& tasc, double theta,
                 double eps, double phi, double gbar);

// theta * int_0^inf e^(-phi x) 1F1(1; 3/2; phi x / 2) [F(x)]^N dx.
double unified_j_hat(const SchemeConfig& cfg, const Tasc& tasc, double theta,
                     double phi, double gbar);

// Same integrals through the hypergeometric closed forms (Gauss / Appell /
// Lauricella), driven off the confluent representation of the branch CDF.
// Slower; kept as an independent evaluation path.
double unified_j_closed(const SchemeConfig& cfg, const Tasc& tasc, double theta,
                        double eps, double phi, double gbar);
double unified_j_hat_closed(const SchemeConfig& cfg, const Tasc& tasc,
                            double theta, double phi, double gbar);

// MGF of the output SNR at s > 0 (equals unified_j(s, 0, s)).
double mgf(const SchemeConfig& cfg, const Tasc& tasc, double s, double gbar);

// Average error rate of the modulation over the output SNR distribution.
double error_rate(const SchemeConfig& cfg, const Tasc& tasc,
                  const ModulationSpec& mod, double gbar);

// P(log2(1 + SNR) < rate) = output CDF at 2^rate - 1.
double outage(const SchemeConfig& cfg, const Tasc& tasc, double rate,
              double gbar);

// Feedback-averaged metrics: mix the per-pattern values with the model
// weights (correct pattern first).
double averaged_error_rate(const SchemeConfig& cfg, const ModulationSpec& mod,
                           const FeedbackModel& fm, double gbar);
double averaged_outage(const SchemeConfig& cfg, double rate,
                       const FeedbackModel& fm, double gbar);

// Leading-order behaviour of the output density near zero:
// pdf(x) ≈ a (x/gbar)^t / gbar, diversity order ado = t + 1.
struct AsymptoticParams {
    double a = 0.0;
    double t = 0.0;
    double ado = 0.0;
    int n_min = 1;      // best selected rank
    double a_min = 0.0; // density coefficient of that order statistic
    double b_min = 0.0; // its CDF coefficient a_min / (exponent)
};

AsymptoticParams asymptotic_params(const SchemeConfig& cfg, const Tasc& tasc);

// High-SNR error estimate for conditional error probability Q(sqrt(k_mod x)).
double asymptotic_error(const SchemeConfig& cfg, const Tasc& tasc, double k_mod,
                        double gbar);

// Kind-aware leading-term asymptote (maps each modulation onto its dominant
// Q or exponential form).
double modulation_asymptote(const SchemeConfig& cfg, const Tasc& tasc,
                            const ModulationSpec& mod, double gbar);

// Leading-order outage: (a / (t+1)) ((2^rate - 1)/gbar)^(t+1).
double outage_asymptote(const SchemeConfig& cfg, const Tasc& tasc, double rate,
                        double gbar);

} // namespace antsel
