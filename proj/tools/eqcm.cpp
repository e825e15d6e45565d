// Command-line front end: eqcm <subcommand> [--config FILE] [--key value ...]
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "eqcm/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Correlations and transitions of the extended compass chain in a transverse field"};
    app.set_version_flag("--version", std::string(eqcm::kToolVersion));
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(0, 1);

    std::string config_path;
    std::map<std::string, std::string> values;
    std::map<CLI::App*, eqcm::Command> subcommands;

    auto add_keys = [&](CLI::App* target) {
        target->add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);
        for (const auto& key : eqcm::config_keys()) {
            if (key.name == "command") continue;
            target->add_option_function<std::string>(
                "--" + key.name, [&values, name = key.name](const std::string& v) { values[name] = v; }, key.help);
        }
    };
    // Without a subcommand the config file must name one (command = ...).
    add_keys(&app);
    for (eqcm::Command cmd : eqcm::kCommands) {
        auto* sub = app.add_subcommand(std::string(eqcm::to_string(cmd)));
        sub->set_help_flag("--help", "Print this help message and exit");
        subcommands[sub] = cmd;
        add_keys(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : eqcm::kExitConfig;
    }

    std::optional<eqcm::Command> command;
    for (const auto& [sub, cmd] : subcommands)
        if (sub->parsed()) command = cmd;

    eqcm::RunConfig cfg;
    try {
        const std::string text = config_path.empty() ? std::string() : eqcm::read_text_file(config_path);
        std::vector<std::pair<std::string, std::string>> flags(values.begin(), values.end());
        cfg = eqcm::parse_config(text, flags, command);
    } catch (const eqcm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return eqcm::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return eqcm::kExitConfig;
    }
    return eqcm::run(cfg, std::cout, std::cerr);
}
