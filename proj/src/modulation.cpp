#include "antsel/performance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "antsel/errors.hpp"
#include "antsel/specfun.hpp"

namespace antsel {

namespace {

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int int_sqrt(int v) {
    int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v))));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

} // namespace

int ModulationSpec::bits_per_symbol() const {
    int b = 0, v = constellation;
    while (v > 1) {
        v >>= 1;
        ++b;
    }
    return b;
}

double ModulationSpec::cep(double gamma) const {
    if (gamma < 0.0) gamma = 0.0;
    const double mm = constellation;
    switch (kind) {
        case ModulationKind::Bpsk:
            return gaussian_q(std::sqrt(2.0 * gamma));
        case ModulationKind::Cbfsk:
            return gaussian_q(std::sqrt(gamma));
        case ModulationKind::Ncbfsk:
            return 0.5 * std::exp(-0.5 * gamma);
        case ModulationKind::Dbpsk:
            return 0.5 * std::exp(-gamma);
        case ModulationKind::Mpsk: {
            double s2 = std::sin(M_PI / mm);
            return 2.0 * gaussian_q(std::sqrt(2.0 * gamma * s2 * s2));
        }
        case ModulationKind::Qpsk: {
            double q = gaussian_q(std::sqrt(gamma));
            return 2.0 * q - q * q;
        }
        case ModulationKind::Mpam:
            return (2.0 * (mm - 1.0) / mm) *
                   gaussian_q(std::sqrt(6.0 * gamma / (mm * mm - 1.0)));
        case ModulationKind::Mqam: {
            double l4 = 3.0 / (mm - 1.0);
            double root = std::sqrt(mm);
            double l5 = 4.0 - 4.0 / root;
            double l6 = (2.0 - 2.0 / root) * (2.0 - 2.0 / root);
            double q = gaussian_q(std::sqrt(l4 * gamma));
            return l5 * q - l6 * q * q;
        }
    }
    throw std::logic_error("unhandled modulation kind");
}

std::string ModulationSpec::name() const {
    switch (kind) {
        case ModulationKind::Bpsk: return "bpsk";
        case ModulationKind::Cbfsk: return "cbfsk";
        case ModulationKind::Ncbfsk: return "ncbfsk";
        case ModulationKind::Dbpsk: return "dbpsk";
        case ModulationKind::Qpsk: return "qpsk";
        case ModulationKind::Mpsk: return std::to_string(constellation) + "psk";
        case ModulationKind::Mpam: return std::to_string(constellation) + "pam";
        case ModulationKind::Mqam: return std::to_string(constellation) + "qam";
    }
    return "?";
}

ModulationSpec make_modulation(ModulationKind kind, int constellation) {
    ModulationSpec mod;
    mod.kind = kind;
    switch (kind) {
        case ModulationKind::Bpsk:
        case ModulationKind::Cbfsk:
        case ModulationKind::Ncbfsk:
        case ModulationKind::Dbpsk:
            if (constellation != 0 && constellation != 2)
                throw ConfigError("binary modulation takes no constellation size");
            mod.constellation = 2;
            break;
        case ModulationKind::Qpsk:
            if (constellation != 0 && constellation != 4)
                throw ConfigError("qpsk fixes the constellation at 4");
            mod.constellation = 4;
            break;
        case ModulationKind::Mpsk:
            if (constellation < 4)
                throw ConfigError("phase constellations need M >= 4");
            if (!power_of_two(constellation))
                throw ConfigError("constellation size must be a power of two");
            mod.constellation = constellation;
            mod.approximate = constellation >= 8;
            break;
        case ModulationKind::Mpam:
            if (constellation < 2 || !power_of_two(constellation))
                throw ConfigError("amplitude constellations need a power-of-two M >= 2");
            mod.constellation = constellation;
            break;
        case ModulationKind::Mqam: {
            if (constellation < 4 || !power_of_two(constellation))
                throw ConfigError("square constellations need a power-of-two M >= 4");
            int r = int_sqrt(constellation);
            if (r * r != constellation)
                throw ConfigError("constellation size must be a perfect square");
            mod.constellation = constellation;
            break;
        }
    }
    return mod;
}

ModulationSpec parse_modulation(const std::string& text) {
    std::string s;
    for (char c : text) s.push_back(static_cast<char>(std::tolower((unsigned char)c)));
    if (s == "bpsk") return make_modulation(ModulationKind::Bpsk);
    if (s == "cbfsk") return make_modulation(ModulationKind::Cbfsk);
    if (s == "ncbfsk") return make_modulation(ModulationKind::Ncbfsk);
    if (s == "dbpsk") return make_modulation(ModulationKind::Dbpsk);
    if (s == "qpsk") return make_modulation(ModulationKind::Qpsk);
    // "mqam:16" spelling next to "16qam"
    for (const char* kindname : {"mpsk", "mpam", "mqam"}) {
        std::string prefix = std::string(kindname) + ":";
        if (s.rfind(prefix, 0) == 0)
            s = s.substr(prefix.size()) + std::string(kindname).substr(1);
    }
    std::size_t i = 0;
    while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
    if (i > 0 && i < s.size()) {
        int mm = std::stoi(s.substr(0, i));
        std::string suffix = s.substr(i);
        if (suffix == "psk")
            return mm == 4 ? make_modulation(ModulationKind::Qpsk)
                           : make_modulation(ModulationKind::Mpsk, mm);
        if (suffix == "pam") return make_modulation(ModulationKind::Mpam, mm);
        if (suffix == "qam") return make_modulation(ModulationKind::Mqam, mm);
    }
    throw ConfigError("unrecognized modulation '" + text + "'");
}

} // namespace antsel
