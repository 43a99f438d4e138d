#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vamos/grid_table.hpp"
#include "vamos/rra.hpp"

namespace vamos {

struct NetworkConfig {
    double cell_radius_m = 500.0;
    int sectors = 1;
    int reuse = 12;
    int clusters = 9;
    double pathloss_exponent = 3.76;
    double gain_1m_db = -8.06;
    double shadow_sigma_db = 8.0;
    int K = 8;  // physical channels; 2K half-rate logical channels
    double P_max_dbm = 30.0;
    double noise_dbm = -119.65 + 8.0;
    double SCPIR_max_db = 12.0;
    int N_bursts = 4;
    double P_int_db = 10.0;
    double dtx_silence_prob = 0.4;
    double adjacent_attenuation_db = 18.0;
    double fer_thr = 0.01;
    int dp_limit = 12;

    int logical_channels() const { return 2 * K; }
    int cells() const { return reuse * clusters; }
    void validate() const;
};

/// Hexagonal reuse-12 layout of 3 x 3 clusters wrapped on a torus.
struct CellLayout {
    double radius = 500.0;
    int n_groups = 12;
    std::vector<std::array<double, 2>> centers;  // metres
    std::vector<int> group;                      // frequency group per cell
    std::vector<std::vector<int>> co_channel;    // same group, excluding the cell
    std::vector<std::vector<int>> adjacent;      // groups g - 1 and g + 1
    std::array<double, 2> torus_a{};             // torus period vectors
    std::array<double, 2> torus_b{};

    int size() const { return static_cast<int>(centers.size()); }
    /// Shortest distance on the torus.
    double distance(const std::array<double, 2>& p, int cell) const;
    /// Cell whose hexagon contains p.
    int serving_cell(const std::array<double, 2>& p) const;
    /// Uniform point over the whole torus.
    std::array<double, 2> random_point(Rng& rng) const;
};

CellLayout build_layout(const NetworkConfig& cfg);

/// 10^((gain_1m_db - 10 n log10(d) + shadow_db) / 10), d clamped at 1 m.
double path_gain(double distance_m, double shadow_db, const NetworkConfig& cfg = {});

/// Positions, serving cells and large-scale gains of all users of a drop.
/// `gains[u]` lists the gain to the serving cell, then to its co-channel
/// cells, then to its adjacent-group cells, in layout order.
struct UserDrop {
    std::vector<std::array<double, 2>> position;
    std::vector<int> cell;
    std::vector<std::vector<double>> gains;
};

/// `gain_cells`, when given, limits gain computation to users of flagged cells.
UserDrop drop_users(const CellLayout& layout, const NetworkConfig& cfg, int n_total, Rng& rng,
                    bool with_gains = true, const std::vector<std::uint8_t>* gain_cells = nullptr);

/// Tables one receiver needs in the network.
struct NetworkTables {
    const GridTable* stage1_pair = nullptr;
    const GridTable* stage1_single = nullptr;
    const GridTable* stage2 = nullptr;
    AllocationTables alloc;
};

/// In hot-spot mode only the hot cell is reported, and only it and the
/// cells interfering with it are allocated.
struct DropOptions {
    bool dtx = false;
    bool hot_spot = false;
    int hot_cell = 0;
    /// Only decide who is served; no powers, interference or FER.
    bool blocking_only = false;
};

struct DropResult {
    std::vector<double> fer;    // NaN for blocked or silent users
    std::vector<double> power;  // W; 0 for blocked users
    std::vector<std::uint8_t> blocked;
    std::vector<std::uint8_t> active;    // served and not silenced by DTX
    std::vector<std::uint8_t> reported;  // counted in the aggregates
    std::vector<int> cell;
    std::vector<double> cell_power;  // sum of allocated powers per cell, W
    /// Aggregates over reported users.
    std::uint64_t users = 0;
    std::uint64_t blocked_users = 0;
    std::uint64_t active_users = 0;
    double fer_sum = 0.0;
    double power_sum = 0.0;
    /// Sum over active reported users and bursts of received co-channel power (W).
    double co_power_sum = 0.0;
    std::uint64_t co_power_bursts = 0;

    double mean_fer() const;
    double mean_power() const;
    double blocked_ratio() const;
};

RraConfig rra_config(const NetworkConfig& cfg);

DropResult simulate_drop(const CellLayout& layout, const NetworkConfig& cfg, int n_total,
                         Strategy strategy, const NetworkTables& tables, const DropOptions& options,
                         std::uint64_t seed);

struct Interval {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct LoadSummary {
    double n_user = 0.0;  // mean users per cell
    int drops = 0;
    Interval fer;
    Interval power_dbm;
    Interval blocked;
    double co_power = 0.0;  // mean received co-channel power per burst, W
};

/// Pooled means with percentile bootstrap 95% intervals over drops.
LoadSummary aggregate(const std::vector<DropResult>& results, double n_user, int bootstrap = 200,
                      std::uint64_t seed = 11);

struct CapacityResult {
    double n_osc = 0.0;
    double n_ref = 0.0;
    double gain_percent = 0.0;
    bool zero_capacity = false;  // a summary never met the caps
};

/// Largest load meeting FER < fer_cap and blocked < block_cap, linearly
/// interpolated between load points; nullopt when the first point fails.
std::optional<double> max_users(const std::vector<LoadSummary>& summary, double fer_cap = 0.01,
                                double block_cap = 0.10);

CapacityResult capacity_gain(const std::vector<LoadSummary>& osc, const std::vector<LoadSummary>& ref,
                             double fer_cap = 0.01, double block_cap = 0.10);

struct NetworkSweepConfig {
    NetworkConfig net;
    Strategy strategy = Strategy::no_vamos;
    DropOptions options;
    std::vector<double> loads;  // mean users per cell
    int drops = 100;
    std::uint64_t seed = 5;
    int threads = 1;
};

std::vector<LoadSummary> network_sweep(const CellLayout& layout, const NetworkTables& tables,
                                       const NetworkSweepConfig& cfg);

}  // namespace vamos
