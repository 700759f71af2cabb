#include "antsel/scheme.hpp"

#include <sstream>

#include "antsel/errors.hpp"

namespace antsel {

int SchemeConfig::mg() const {
    Rational v = m * g();
    if (v.get_den() != 1)
        throw ConfigError("element shape m*g = " + v.get_str() + " is not an integer");
    return static_cast<int>(v.get_num().get_si());
}

std::vector<std::string> SchemeConfig::validate() const {
    std::vector<std::string> issues;
    if (n_t < 1 || n_t > 6)
        issues.push_back("n_t must be in [1, 6], got " + std::to_string(n_t));
    if (n_r < 1) issues.push_back("n_r must be >= 1, got " + std::to_string(n_r));
    if (n_s < 1) issues.push_back("n_s must be >= 1, got " + std::to_string(n_s));
    if (n_s > n_t)
        issues.push_back("n_s = " + std::to_string(n_s) + " exceeds n_t = " +
                         std::to_string(n_t));
    if (sgn(m) <= 0) {
        issues.push_back("m must be positive, got " + m.get_str());
        return issues;
    }
    if (scheme == Scheme::JointTrasStbc) {
        if (m.get_den() != 1)
            issues.push_back("joint TRAS/STBC requires integer m, got " + m.get_str());
    } else {
        if (m < Rational(1, 2))
            issues.push_back("TAS/STBC requires m >= 1/2, got " + m.get_str());
        Rational mr = m * n_r;
        if (mr.get_den() != 1)
            issues.push_back("TAS/STBC requires m*n_r integral, got " + mr.get_str());
    }
    Rational shape = m * g();
    if (shape.get_den() != 1) {
        issues.push_back("element shape m*g = " + shape.get_str() +
                         " must be a positive integer");
    } else if (shape > 6) {
        issues.push_back("element shape m*g = " + shape.get_str() +
                         " exceeds the supported limit of 6");
    }
    if (!(omega > 0.0)) issues.push_back("omega must be positive");
    if (sgn(code_rate) <= 0 || code_rate > 1)
        issues.push_back("code_rate must be in (0, 1], got " + code_rate.get_str());
    return issues;
}

std::string SchemeConfig::key() const {
    std::ostringstream os;
    os << (scheme == Scheme::TasStbc ? "tas" : "joint") << ":nt=" << n_t
       << ":ns=" << n_s << ":nr=" << n_r << ":m=" << m.get_str();
    return os.str();
}

std::vector<Tasc> enumerate_tascs(int n_t, int n_s) {
    if (n_s < 1 || n_s > n_t)
        throw ConfigError("enumerate_tascs: requires 1 <= n_s <= n_t");
    std::vector<Tasc> out;
    std::vector<int> cur(n_s);
    for (int i = 0; i < n_s; ++i) cur[i] = i + 1;
    while (true) {
        out.push_back(Tasc{cur});
        int i = n_s - 1;
        while (i >= 0 && cur[i] == n_t - (n_s - 1 - i)) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < n_s; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

std::string to_string(const Tasc& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.ranks.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t.ranks[i]);
    }
    return s + ")";
}

} // namespace antsel
