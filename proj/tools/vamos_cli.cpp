#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vamos/config.hpp"
#include "vamos/sweeps.hpp"

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::string seed;
    int threads = 1;
};

vamos::Settings load_settings(const Options& o) {
    vamos::Settings s;
    if (!o.config_path.empty()) s.load_file(o.config_path);
    s.apply_overrides(o.overrides);
    if (!o.seed.empty()) s.apply({{"seed", o.seed}}, "--seed");
    s.get_u64("seed");
    return s;
}

void write_output(const Options& o, const std::string& name, const std::string& text) {
    std::filesystem::create_directories(o.out_dir);
    const auto path = std::filesystem::path(o.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    std::cerr << "wrote " << path.string() << "\n";
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("-c,--config", o.config_path, "key = value config file");
    cmd->add_option("--set", o.overrides, "override key=value (repeatable)");
    cmd->add_option("-o,--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "master seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OSC/VAMOS downlink simulation toolkit"};
    app.require_subcommand(1);
    Options o;
    app.add_option("-j,--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);

    auto* gen = app.add_subcommand("gen-tables", "generate mapping tables for the configured receivers");
    auto* link = app.add_subcommand("link-sweep", "FER versus SINR by full link simulation");
    auto* chanest = app.add_subcommand("chanest-sweep", "channel-estimation MSE versus SNR");
    auto* net = app.add_subcommand("net-sweep", "network Monte-Carlo versus load");
    auto* cap = app.add_subcommand("capacity-report", "capacity gains against a reference strategy");
    for (auto* cmd : {gen, link, chanest, net, cap}) add_common(cmd, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const vamos::Settings s = load_settings(o);
        if (gen->parsed()) {
            for (const auto& r : s.get_strings("receivers")) {
                const auto rx = vamos::receiver_from_string(r);
                vamos::save_tables(vamos::generate_tables(s, rx, o.threads, &std::cerr), s, rx);
            }
        } else if (link->parsed()) {
            write_output(o, "link_sweep.csv", vamos::run_link_sweep(s, o.threads));
        } else if (chanest->parsed()) {
            write_output(o, "chanest_sweep.csv", vamos::run_chanest_sweep(s, o.threads));
        } else if (net->parsed()) {
            write_output(o, "net_sweep.csv", vamos::run_network_sweep(s, o.threads, &std::cerr));
        } else if (cap->parsed()) {
            write_output(o, "capacity_report.csv", vamos::run_capacity_report(s, o.threads, &std::cerr));
        }
    } catch (const vamos::MissingTableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const vamos::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const vamos::InvalidInput& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
