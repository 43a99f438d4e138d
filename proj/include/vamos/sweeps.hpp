#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vamos/config.hpp"
#include "vamos/equalize.hpp"
#include "vamos/grid_table.hpp"
#include "vamos/linkmap.hpp"
#include "vamos/netsim.hpp"

namespace vamos {

// ---------------------------------------------------------------------------
// Link-level sweeps
// ---------------------------------------------------------------------------

enum class Scenario { mts1, mts2 };

Scenario scenario_from_string(const std::string& name);
const char* to_string(Scenario s);

/// Impairments relative to user o's mean power for a target SINR, where
/// SINR is the power of both OSC users over co-channel interferer 1.
InterferenceLedger scenario_ledger(Scenario s, double sinr_db, double scpir_db);

struct LinkSweepConfig {
    std::vector<ReceiverKind> receivers = {ReceiverKind::joint_mlse, ReceiverKind::mic,
                                           ReceiverKind::sic, ReceiverKind::vmic};
    Scenario scenario = Scenario::mts1;
    std::vector<double> sinr_db = linspace_step(-4.0, 12.0, 2.0);
    double scpir_db = 0.0;
    int groups = 250;
    int channel_order = 2;
    double snr_db = 40.0;
    int n_bursts = 8;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct LinkSweepRow {
    ReceiverKind receiver = ReceiverKind::mic;
    double sinr_db = 0.0;
    LinkFrameStats stats;
};

/// Receivers at the same SINR see the same random draws.
std::vector<LinkSweepRow> link_sweep(const LinkSweepConfig& cfg);

// ---------------------------------------------------------------------------
// Channel-estimation sweeps
// ---------------------------------------------------------------------------

struct ChanestSweepConfig {
    std::vector<double> snr_db = linspace_step(0.0, 30.0, 5.0);
    int channels = 5000;
    int order = 5;
    double scpir_db = 0.0;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct ChanestRow {
    double snr_db = 0.0;
    double mse_joint = 0.0;    // sum over taps of E|h_hat - h|^2
    double mse_known_b = 0.0;  // LS with the true b
    double b_mean = 0.0;       // mean joint-ML estimate of b
};

/// SNR counts the power of both users: (1 + b^2) / sigma_n^2.
std::vector<ChanestRow> chanest_sweep(const ChanestSweepConfig& cfg);

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

struct TableSet {
    GridTable stage1_pair;
    GridTable stage1_single;
    GridTable stage2;
    GridTable rra;
    GridTable rra_single;

    NetworkTables network(const RraConfig& cfg) const;
};

Stage1Config stage1_config(const Settings& s, ReceiverKind receiver, bool paired, int threads);
Stage2Config stage2_config(const Settings& s, int threads);
RraTableConfig rra_table_config(const Settings& s, int threads);
NetworkConfig network_config(const Settings& s);

TableSet generate_tables(const Settings& s, ReceiverKind receiver, int threads,
                         std::ostream* log = nullptr);

/// Loads the receiver's tables from `tables_dir`. Missing or stale tables
/// are generated and saved when `auto_generate` is set, otherwise
/// MissingTableError is thrown.
TableSet obtain_tables(const Settings& s, ReceiverKind receiver, int threads,
                       std::ostream* log = nullptr);

void save_tables(const TableSet& t, const Settings& s, ReceiverKind receiver);

// ---------------------------------------------------------------------------
// CSV front-ends
// ---------------------------------------------------------------------------

std::string csv_header_comment(const std::string& command, const Settings& s);

std::string run_link_sweep(const Settings& s, int threads);
std::string run_chanest_sweep(const Settings& s, int threads);
std::string run_network_sweep(const Settings& s, int threads, std::ostream* log = nullptr);
std::string run_capacity_report(const Settings& s, int threads, std::ostream* log = nullptr);

}  // namespace vamos
