#pragma once

#include <string>
#include <vector>

#include "antsel/rational.hpp"

namespace antsel {

// TasStbc: transmit antenna selection, receive MRC folded into each element
//          (element shape m*n_R, a single output branch).
// JointTrasStbc: transmit + receive antenna selection, one output branch per
//          receive antenna (element shape m, best of n_R branches).
enum class Scheme { TasStbc, JointTrasStbc };

struct SchemeConfig {
    Scheme scheme = Scheme::TasStbc;
    int n_t = 2; // transmit antennas
    int n_r = 1; // receive antennas
    int n_s = 2; // selected transmit antennas (STBC slots: G2 -> 2, G3 -> 3)
    Rational m = Rational(1);         // Nakagami fading figure
    double omega = 1.0;               // mean channel power gain
    Rational code_rate = Rational(1); // STBC symbol rate R_s

    int g() const { return scheme == Scheme::TasStbc ? n_r : 1; }
    int branches() const { return scheme == Scheme::TasStbc ? 1 : n_r; }
    // element gamma shape m*g; the closed-form machinery requires it integral
    int mg() const;

    // Average per-element SNR for a total symbol SNR E_s/N0 (linear).
    double branch_gbar(double es_over_n0) const {
        return es_over_n0 * omega / (n_s * to_double(code_rate));
    }

    std::vector<std::string> validate() const; // empty when well formed
    std::string key() const;                   // stable cache/identity key
};

// Transmit antenna selection candidate: ascending order-statistic ranks.
struct Tasc {
    std::vector<int> ranks; // 1-based, strictly increasing, size n_s
    int n_min() const { return ranks.front(); }
    bool operator==(const Tasc& o) const { return ranks == o.ranks; }
};

// All C(n_t, n_s) candidates in lexicographic order; the first is (1..n_s).
std::vector<Tasc> enumerate_tascs(int n_t, int n_s);

std::string to_string(const Tasc& t);

} // namespace antsel
