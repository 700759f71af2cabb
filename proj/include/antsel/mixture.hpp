#pragma once

#include <vector>

#include "antsel/rational.hpp"

namespace antsel {

// One exponential-polynomial term: weight * y^power * e^(-rate * y),
// in canonical units y = x * m / gbar (so rates are dimensionless rationals).
struct MixTerm {
    Rational weight;
    int power = 0;
    Rational rate;
};

enum class MixtureKind {
    Density,       // f(y) = sum of terms
    CdfComplement, // F(y) = 1 + sum of terms (every term has rate > 0)
};

// Finite gamma-type mixture. Weights alternate in sign, so terms are kept
// exact until evaluation and summed with extended precision; nothing is pruned.
class GammaMixture {
public:
    GammaMixture() = default;
    GammaMixture(MixtureKind kind, std::vector<MixTerm> terms);

    MixtureKind kind() const { return kind_; }
    const std::vector<MixTerm>& terms() const { return terms_; }

    // Value at canonical y; includes the constant 1 for CdfComplement.
    long double value(long double y) const;

    // Largest |weight| after float conversion (conditioning diagnostic).
    long double max_abs_weight() const { return max_abs_weight_; }

    std::size_t size() const { return terms_.size(); }

private:
    MixtureKind kind_ = MixtureKind::Density;
    std::vector<MixTerm> terms_;
    // baked float views of the exact terms
    std::vector<long double> w_;
    std::vector<long double> r_;
    std::vector<int> p_;
    long double max_abs_weight_ = 0.0L;
};

// Collapse a term list by exact (rate, power) key, dropping exact zeros.
std::vector<MixTerm> collapse_terms(std::vector<MixTerm> terms);

// Pointwise product of two term lists (constants excluded), collapsed.
std::vector<MixTerm> multiply_terms(const std::vector<MixTerm>& a,
                                    const std::vector<MixTerm>& b);

} // namespace antsel
