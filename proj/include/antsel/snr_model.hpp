#pragma once

#include <memory>
#include <vector>

#include "antsel/mixture.hpp"
#include "antsel/scheme.hpp"

namespace antsel {

// CDF of one unified branch element (transmit antenna after receive
// processing): regularized lower incomplete gamma P(mg, x m / gbar).
double element_snr_cdf(const SchemeConfig& cfg, double x, double gbar);
// Same CDF through the finite sum 1 - e^-z sum_{k<mg} z^k/k!, z = x m / gbar.
double element_snr_cdf_finite(const SchemeConfig& cfg, double x, double gbar);
double element_snr_pdf(const SchemeConfig& cfg, double x, double gbar);

// One term of the ordered-selection joint density expansion:
// coeff * prod_k y_k^(mu_k - 1) e^(-(1 + t_k) y_k) over y_1 >= ... >= y_ns >= 0.
struct ExpansionTerm {
    Rational coeff;     // binomial/multinomial coefficient product, incl. 1/Gamma(mg)^ns
    std::vector<int> p; // CDF-difference binomial indices
    std::vector<int> t; // CDF-power binomial indices
    std::vector<int> r; // multinomial polynomial degrees
    std::vector<int> mu; // mg + r_k
};

// Expand the joint order-statistics density of the selected ranks.
// Exact; term count is guarded against combinatorial blowup.
std::vector<ExpansionTerm> enumerate_expansion(const SchemeConfig& cfg, const Tasc& tasc);

struct RatePole {
    Rational location; // in units of m / gbar
    int multiplicity = 1;
};

// coeff * prod_d (s + poles[d].location)^(-poles[d].multiplicity)
struct LaplaceTerm {
    Rational coeff;
    std::vector<RatePole> poles;
};

// Laplace transform of the branch sum restricted to one expansion term:
// iterated incomplete-gamma reduction of the nested integral. Poles land at
// (sum_{j<=k} (1 + t_j)) / k with exact rational locations.
std::vector<LaplaceTerm> laplace_form(const ExpansionTerm& term);

// Sort by location and combine equal locations (exact comparison).
std::vector<RatePole> merge_poles(std::vector<RatePole> poles);

// Partial fractions of prod_d (s + a_d)^(-u_d) for distinct a_d:
// result[d][q-1] is the coefficient of (s + a_d)^(-q), q = 1..u_d.
std::vector<std::vector<Rational>> partial_fraction_residues(
    const std::vector<RatePole>& poles);

// Per-branch SNR distribution in canonical units (y = x m / gbar).
struct BranchModel {
    SchemeConfig cfg;
    Tasc tasc;
    GammaMixture density; // Density
    GammaMixture cdf;     // CdfComplement
};

// Output (post receive-combining) distribution: branch CDF raised to the
// branch count, with expanded mixtures for the integral transforms.
struct OutputModel {
    std::shared_ptr<const BranchModel> branch;
    int n_branches = 1;
    GammaMixture cdf; // CdfComplement of [F_branch]^N
    GammaMixture pdf; // Density: N f F^(N-1)
};

// Build (or fetch from the process-wide cache) the canonical models.
// Models are built once per (cfg, tasc) and rescaled per SNR point.
std::shared_ptr<const BranchModel> branch_model(const SchemeConfig& cfg,
                                                const Tasc& tasc);
std::shared_ptr<const OutputModel> output_model(const SchemeConfig& cfg,
                                                const Tasc& tasc);

double branch_pdf(const BranchModel& bm, double x, double gbar);
double branch_cdf(const BranchModel& bm, double x, double gbar);

// [F_branch(x)]^N and N f F^(N-1), evaluated through the branch model
// (better conditioned than the expanded mixtures).
double output_cdf(const SchemeConfig& cfg, const Tasc& tasc, double x, double gbar);
double output_pdf(const SchemeConfig& cfg, const Tasc& tasc, double x, double gbar);

} // namespace antsel
