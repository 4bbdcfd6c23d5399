#include "qpt/constants.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qpt/errors.hpp"

namespace qpt {

void PhysicalConstants::validate() const {
    if (!(gm_jupiter > 0) || !(gm_europa > 0) || !(gm_ganymede > 0))
        throw ConfigError("constants: all GM values must be positive");
    if (!(period_europa > 0) || !(period_ganymede > 0))
        throw ConfigError("constants: orbital periods must be positive");
    if (gm_jupiter < 100.0 * gm_europa || gm_jupiter < 100.0 * gm_ganymede)
        throw ConfigError("constants: gm_jupiter must dominate the moon GMs");
    if (!(r12_km > 0)) throw ConfigError("constants: r12_km must be positive");
}

PhysicalConstants load_constants(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open constants file: " + path);
    PhysicalConstants pc;
    std::map<std::string, double*> keys = {
        {"gm_jupiter", &pc.gm_jupiter},   {"gm_europa", &pc.gm_europa},
        {"gm_ganymede", &pc.gm_ganymede}, {"period_europa", &pc.period_europa},
        {"period_ganymede", &pc.period_ganymede}, {"r12_km", &pc.r12_km},
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
        if (trimmed.empty()) continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("constants file line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trimmed.substr(0, eq);
        std::string val = trimmed.substr(eq + 1);
        auto it = keys.find(key);
        if (it == keys.end())
            throw ConfigError("constants file: unknown key '" + key + "'");
        try {
            *it->second = std::stod(val);
        } catch (const std::exception&) {
            throw ConfigError("constants file: bad value for '" + key + "'");
        }
    }
    pc.validate();
    return pc;
}

std::string constants_text(const PhysicalConstants& pc) {
    std::ostringstream out;
    out.precision(17);
    out << "# Jupiter-Europa-Ganymede system constants (SI)\n"
        << "# GM assignment follows the bodies' physical masses: Europa is the\n"
        << "# lighter moon. r12_km is used only for km reporting of distances.\n"
        << "gm_jupiter = " << pc.gm_jupiter << "\n"
        << "gm_europa = " << pc.gm_europa << "\n"
        << "gm_ganymede = " << pc.gm_ganymede << "\n"
        << "period_europa = " << pc.period_europa << "\n"
        << "period_ganymede = " << pc.period_ganymede << "\n"
        << "r12_km = " << pc.r12_km << "\n";
    return out.str();
}

}  // namespace qpt
