#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace spinbath;

namespace {

std::string key_table() {
    std::ostringstream os;
    os << "\nCommands: decay, t2-sweep, endor, lattice-stats, owp\n\nConfig keys (file or --set key=value):\n";
    for (const auto& k : config_keys())
        os << "  " << k.name << std::string(k.name.size() < 26 ? 26 - k.name.size() : 1, ' ') << k.help
           << (k.default_value.empty() ? "" : " [" + k.default_value + "]") << '\n';
    os << "\nExit codes: 0 success, 2 config error, 3 only numerically divergent results.\n";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Donor spin-bath decoherence batch tool"};
    app.footer(key_table());
    app.set_version_flag("--version", cli::tool_version);

    std::string command;
    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
    app.add_option("command", command, "decay | t2-sweep | endor | lattice-stats | owp")->required();
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--set", sets, "override any key: key=value");

    const std::vector<std::pair<std::string, std::string>> mapped{
        {"--donor", "donor"},
        {"--transition", "transition"},
        {"--field-mT", "field_mT"},
        {"--sequence", "sequence"},
        {"--pulses", "pulses"},
        {"--cce-order", "cce_order"},
        {"--box-angstrom", "box_half_side_angstrom"},
        {"--pair-cutoff-angstrom", "pair_cutoff_angstrom"},
        {"--abundance", "abundance"},
        {"--seed", "seed"},
        {"--realisations", "realisations"},
        {"--average", "average"},
        {"--convolve-mT", "convolve_mT"},
        {"--out", "out"},
        {"--format", "format"},
        {"--workers", "workers"},
    };
    for (const auto& [flag, key] : mapped) {
        std::string help = key;
        for (const auto& k : config_keys())
            if (k.name == key) help = k.help + " (key " + key + ")";
        app.add_option_function<std::string>(flag, [&flags, key = key](const std::string& v) { flags[key] = v; }, help);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::exit_config;
    }

    try {
        std::map<std::string, std::string> values;
        if (!config_path.empty()) values = load_config_file(config_path);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
            values[s.substr(0, eq)] = s.substr(eq + 1);
        }
        for (const auto& [k, v] : flags) values[k] = v;
        const RunConfig cfg = RunConfig::from_map(values);
        return cli::run_command(command, cfg, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_failure;
    }
}
