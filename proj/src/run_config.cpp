#include "spinbath/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace spinbath {

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys{
        {"donor", "Bi", "built-in donor name: P, As, Sb, Bi"},
        {"donor_file", "", "donor parameter file (key = value, M rad/s units); overrides donor"},
        {"transition", "11,10", "u,l as level indices 1..d, or sign:m labels such as +:4,-:3"},
        {"field_mT", "344.6", "static field, mT"},
        {"field_min_mT", "", "sweep/search lower field, mT"},
        {"field_max_mT", "", "sweep/search upper field, mT"},
        {"field_points", "21", "number of sweep fields"},
        {"field_direction", "1,0,0", "field direction in crystal axes (normalised)"},
        {"sequence", "cpmg", "fid or cpmg (cpmg with pulses = 1 is the Hahn echo)"},
        {"pulses", "1", "number of pi pulses for cpmg"},
        {"cce_order", "2", "maximum cluster size"},
        {"include_cce1", "false", "multiply single-spin terms into the product"},
        {"ising_only", "true", "drop the hyperfine flip-flop S+I- + S-I+ terms"},
        {"residual_dipolar", "false", "add the dipolar hyperfine term beyond r0"},
        {"box_half_side_angstrom", "80", "bath cube half side, angstrom"},
        {"pair_cutoff_angstrom", "4.5020", "pair and growth separation cutoff, angstrom"},
        {"abundance", "0.0467", "29Si fraction"},
        {"seed", "1", "base RNG seed"},
        {"realisations", "1", "number of bath realisations"},
        {"average", "all", "initial bath state averaging: all, sample:n, or state"},
        {"convolve_mT", "0", "Gaussian field-convolution standard deviation, mT"},
        {"convolve_points", "13", "fields in the convolution grid over +-3 widths"},
        {"t_max_us", "1500", "last time point (total evolution time), microseconds"},
        {"time_points", "128", "number of time points"},
        {"smoothing_window", "1", "odd moving-average width before the 1/e search"},
        {"cbar_ms", "0.42", "T2 formula prefactor C, ms"},
        {"hahn_factor", "true", "apply the Hahn/FID factor 2 in the T2 formula column"},
        {"radius_angstrom", "100", "lattice-stats sphere radius, angstrom"},
        {"endor_box_angstrom", "30", "half side of the box of couplings used for ENDOR, angstrom"},
        {"endor_min_MHz", "0", "ENDOR grid start, MHz"},
        {"endor_max_MHz", "15", "ENDOR grid end, MHz"},
        {"endor_points", "3001", "ENDOR grid size"},
        {"endor_fwhm_MHz", "0.12", "ENDOR Gaussian FWHM, MHz"},
        {"out", "out", "output path prefix"},
        {"format", "csv", "csv or json"},
        {"workers", "1", "worker threads for cluster evaluation"},
    };
    return keys;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool known(const std::string& key) {
    const auto& keys = config_keys();
    return std::any_of(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == key; });
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!known(key)) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

RunConfig RunConfig::from_map(const std::map<std::string, std::string>& overrides) {
    RunConfig c;
    for (const auto& k : config_keys()) c.values[k.name] = k.default_value;
    for (const auto& [k, v] : overrides) {
        if (!known(k)) throw ConfigError("unknown key '" + k + "'");
        c.values[k] = v;
    }
    return c;
}

const std::string& RunConfig::str(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw ConfigError("missing key '" + key + "'");
    return it->second;
}

double RunConfig::number(const std::string& key) const {
    const std::string& s = str(key);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno != 0) throw ConfigError("key '" + key + "': not a number: '" + s + "'");
    return v;
}

long RunConfig::integer(const std::string& key) const {
    const std::string& s = str(key);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno != 0) throw ConfigError("key '" + key + "': not an integer: '" + s + "'");
    return v;
}

std::uint64_t RunConfig::seed() const {
    const std::string& s = str("seed");
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno != 0 || s.front() == '-') throw ConfigError("seed must be a non-negative integer");
    return v;
}

bool RunConfig::flag(const std::string& key) const {
    const std::string& s = str(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("key '" + key + "': expected true or false");
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0') throw ConfigError("key '" + key + "': bad list entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace spinbath
