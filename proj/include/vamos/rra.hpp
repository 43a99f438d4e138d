#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vamos/grid_table.hpp"
#include "vamos/matching.hpp"

namespace vamos {

/// Share of the pair power carried by a user with the given SCPIR:
/// 10^(x/10) / (1 + 10^(x/10)).
double power_share(double scpir_db);

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// ---------------------------------------------------------------------------
// RRA mapping tables
// ---------------------------------------------------------------------------

struct RraTableConfig {
    double p_int_db = 10.0;
    int n_bursts = 4;
    std::vector<double> scpir_grid = linspace_step(-12.0, 12.0, 1.0);
    std::vector<double> snr_grid = linspace_step(-10.0, 40.0, 1.0);
    int frames_per_point = 400;
    /// Channel order whose tap energy gives the per-burst fading gain.
    int fading_order = 5;
    std::uint64_t seed = 3;
    int threads = 1;
};

/// FER(SCPIR, SNR) with every interference axis at P_int (type `rra`), or
/// FER(SNR) from a single-user raw-BER table (type `single`, 1-D).
GridTable build_rra_table(const GridTable& stage1, const GridTable& stage2, const RraTableConfig& cfg);

/// Smallest SNR meeting `fer_thr`, linearly interpolated between the
/// bracketing SNR nodes of the (interpolated) SCPIR row. Returns the first
/// node if it already passes and +inf if no node does. For 1-D tables
/// `scpir_db` is ignored.
double min_snr_for_fer(const GridTable& table, double scpir_db, double fer_thr);

// ---------------------------------------------------------------------------
// Power allocation
// ---------------------------------------------------------------------------

struct RraConfig {
    double fer_thr = 0.01;
    std::vector<double> scpir_grid = linspace_step(-12.0, 12.0, 1.0);
    double scpir_max_db = 12.0;
    double p_max = dbm_to_watt(30.0);
    double noise_power = dbm_to_watt(-119.65 + 8.0);
    double sigma_a2 = 1.0;
    int dp_limit = 12;

    void validate() const;
};

/// Required SNR of one user at every grid SCPIR, precomputed from a table.
struct SnrProfile {
    std::vector<double> scpir_db;
    std::vector<double> snr_db;  // +inf where the target is unreachable
};

SnrProfile snr_profile(const GridTable& rra, const RraConfig& cfg);

/// Required single-user SNR from a 1-D single-user table.
double single_required_snr(const GridTable& single, const RraConfig& cfg);

struct PairPower {
    double power = 0.0;       // min(P, P_max)
    double scpir_o_db = 0.0;  // SCPIR of user o; user p gets the negative
    bool feasible = true;     // FER target met within P_max
};

/// Pair power over the SCPIR grid: max over both users of the required power
/// divided by its share, minimised over the grid (ties: SCPIR closest to 0,
/// then the smaller value), then capped at P_max.
PairPower required_pair_power(const SnrProfile& prof, double g_o, double g_p, const RraConfig& cfg);
PairPower required_pair_power(const GridTable& rra, double g_o, double g_p, const RraConfig& cfg);

/// Pair power at a fixed SCPIR (random SCPIR = 0 variant).
PairPower pair_power_at(const SnrProfile& prof, double g_o, double g_p, double scpir_o_db,
                        const RraConfig& cfg);

struct PowerScpirMatrices {
    RMatrix P;  // symmetric
    RMatrix S;  // antisymmetric, S(o, p) = SCPIR of o
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> feasible;
};

PowerScpirMatrices build_matrices(const std::vector<double>& gains, const SnrProfile& prof,
                                  const RraConfig& cfg);

enum class Strategy { no_vamos, pure_vamos, poob, random_scpir0, random_scpiropt };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

/// Number of OSC pairs for N users and K logical channels.
int osc_channel_count(Strategy s, int n_users, int k_channels);

struct PairAssignment {
    int o = 0;
    int p = 0;
    double P_o = 0.0;
    double P_p = 0.0;
    double scpir_o_db = 0.0;
    bool feasible = true;
};

struct SingleAssignment {
    int i = 0;
    double P = 0.0;
    bool feasible = true;
};

struct PairingSolution {
    std::vector<PairAssignment> pairs;
    std::vector<SingleAssignment> singles;
    std::vector<int> blocked;
    double sum_power = 0.0;
};

struct AllocationTables {
    SnrProfile pair;
    double single_snr_db = 0.0;
};

AllocationTables make_allocation_tables(const GridTable& rra, const GridTable& single,
                                        const RraConfig& cfg);

/// Users are given by their large-scale gains to the serving BS.
/// `powers = false` only decides who is served, paired or blocked.
PairingSolution allocate(const std::vector<double>& gains, int k_channels, Strategy strategy,
                         const AllocationTables& tables, const RraConfig& cfg, Rng& rng,
                         bool powers = true);

}  // namespace vamos
