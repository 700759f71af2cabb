#include "antsel/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace antsel {

GammaMixture::GammaMixture(MixtureKind kind, std::vector<MixTerm> terms)
    : kind_(kind), terms_(std::move(terms)) {
    std::sort(terms_.begin(), terms_.end(), [](const MixTerm& a, const MixTerm& b) {
        if (a.rate != b.rate) return a.rate < b.rate;
        return a.power < b.power;
    });
    w_.reserve(terms_.size());
    r_.reserve(terms_.size());
    p_.reserve(terms_.size());
    for (const MixTerm& t : terms_) {
        if (sgn(t.rate) <= 0)
            throw std::logic_error("GammaMixture: term rates must be positive");
        if (t.power < 0) throw std::logic_error("GammaMixture: negative power");
        w_.push_back(to_long_double(t.weight));
        r_.push_back(to_long_double(t.rate));
        p_.push_back(t.power);
        max_abs_weight_ = std::max(max_abs_weight_, fabsl(w_.back()));
    }
}

long double GammaMixture::value(long double y) const {
    // Kahan summation: weights alternate in sign and cancellation grows
    // toward y -> 0, so compensation is not optional here.
    long double sum = kind_ == MixtureKind::CdfComplement ? 1.0L : 0.0L;
    long double comp = 0.0L;
    for (std::size_t i = 0; i < w_.size(); ++i) {
        long double term = w_[i] * expl(-r_[i] * y);
        for (int k = 0; k < p_[i]; ++k) term *= y;
        long double t = sum + (term - comp);
        comp = (t - sum) - (term - comp);
        sum = t;
    }
    return sum;
}

std::vector<MixTerm> collapse_terms(std::vector<MixTerm> terms) {
    std::map<std::pair<Rational, int>, Rational> acc;
    for (MixTerm& t : terms) acc[{t.rate, t.power}] += t.weight;
    std::vector<MixTerm> out;
    out.reserve(acc.size());
    for (auto& [key, w] : acc) {
        if (sgn(w) == 0) continue;
        out.push_back(MixTerm{std::move(w), key.second, key.first});
    }
    return out;
}

std::vector<MixTerm> multiply_terms(const std::vector<MixTerm>& a,
                                    const std::vector<MixTerm>& b) {
    std::vector<MixTerm> prod;
    prod.reserve(a.size() * b.size());
    for (const MixTerm& ta : a)
        for (const MixTerm& tb : b)
            prod.push_back(
                MixTerm{ta.weight * tb.weight, ta.power + tb.power, ta.rate + tb.rate});
    return collapse_terms(std::move(prod));
}

} // namespace antsel
