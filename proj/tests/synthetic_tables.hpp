#pragma once

#include <cmath>

#include "vamos/linkmap.hpp"
#include "vamos/netsim.hpp"
#include "vamos/rra.hpp"

namespace vamos::testing {

inline double db(double x) { return std::pow(10.0, x / 10.0); }

// Hand-made raw BER surface: BPSK at the SINR left to user o.
inline GridTable synthetic_stage1(bool paired) {
    Stage1Grids g;
    if (!paired) g.scpir_db = {0.0};
    GridTable t(paired ? TableType::stage1 : TableType::single, g.axes(), "mic");
    for (std::size_t f = 0; f < t.size(); ++f) {
        const auto idx = t.unflatten(f);
        const double d = g.desired_db[idx[0]];
        const double i = db(g.co_gmsk_db[idx[1]]) + db(g.co_osc_db[idx[2]]) + db(g.adjacent_db[idx[3]]);
        const double s = g.scpir_db[idx[4]];
        const double sinr = db(d) * (paired ? power_share(s) : 1.0) / (1.0 + i);
        t.values()[f] = 0.5 * std::erfc(std::sqrt(sinr));
    }
    return t;
}

inline GridTable small_stage2(int threads = 4) {
    Stage2Config c;
    c.mean_grid = linspace_step(0.0, 0.5, 0.05);
    c.var_grid = linspace_step(0.0, 0.05, 0.01);
    c.frames_per_point = 200;
    c.threads = threads;
    return generate_stage2_table(c);
}

inline RraTableConfig small_rra_config(int threads = 4) {
    RraTableConfig tc;
    tc.scpir_grid = {-12.0, -6.0, 0.0, 6.0, 12.0};
    tc.snr_grid = linspace_step(-10.0, 40.0, 5.0);
    tc.frames_per_point = 200;
    tc.threads = threads;
    return tc;
}

/// Synthetic mapping tables wired up for network drops.
struct SyntheticNetworkTables {
    GridTable stage1_pair = synthetic_stage1(true);
    GridTable stage1_single = synthetic_stage1(false);
    GridTable stage2 = small_stage2();
    GridTable rra = build_rra_table(stage1_pair, stage2, small_rra_config());
    GridTable single = build_rra_table(stage1_single, stage2, small_rra_config());

    NetworkTables view(const NetworkConfig& cfg) const {
        NetworkTables t;
        t.stage1_pair = &stage1_pair;
        t.stage1_single = &stage1_single;
        t.stage2 = &stage2;
        t.alloc = make_allocation_tables(rra, single, rra_config(cfg));
        return t;
    }
};

}  // namespace vamos::testing
