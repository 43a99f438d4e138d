#include "vamos/rra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vamos/baseband.hpp"
#include "vamos/linkmap.hpp"
#include "vamos/parallel.hpp"

namespace vamos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Grid SCPIR preference: closer to 0 first, then the smaller value.
bool preferred(double a, double b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a < b;
}

double required_power(double snr_db, double gain, const RraConfig& cfg) {
    if (!std::isfinite(snr_db)) return kInf;
    return db_to_linear(snr_db) * cfg.noise_power / (gain * cfg.sigma_a2);
}

std::size_t grid_index(const SnrProfile& prof, double scpir_db) {
    for (std::size_t i = 0; i < prof.scpir_db.size(); ++i) {
        if (prof.scpir_db[i] == scpir_db) return i;
    }
    throw InvalidInput("SCPIR grid must be symmetric around 0 dB; missing " + format_double(scpir_db));
}

}  // namespace

double power_share(double scpir_db) {
    const double x = std::pow(10.0, scpir_db / 10.0);
    return x / (1.0 + x);
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

GridTable build_rra_table(const GridTable& stage1, const GridTable& stage2, const RraTableConfig& cfg) {
    const bool single = stage1.type() == TableType::single;
    if (stage1.dims() != 5) throw InvalidInput("build_rra_table: stage-1 table must be 5-D");
    if (cfg.n_bursts < 1 || cfg.frames_per_point < 1) throw InvalidInput("build_rra_table: bad frame shape");
    std::vector<Axis> axes;
    if (!single) axes.push_back({"scpir_db", cfg.scpir_grid});
    axes.push_back({"snr_db", cfg.snr_grid});
    GridTable table(single ? TableType::single : TableType::rra, axes, stage1.receiver(), stage2.label());
    table.validate(0.0, 0.0);
    table.meta()["p_int_db"] = format_double(cfg.p_int_db);
    table.meta()["n_bursts"] = std::to_string(cfg.n_bursts);
    table.meta()["frames_per_point"] = std::to_string(cfg.frames_per_point);
    table.meta()["seed"] = std::to_string(cfg.seed);

    const std::size_t n_snr = cfg.snr_grid.size();
    auto& v = table.values();
    parallel_for(v.size(), cfg.threads, [&](std::size_t flat) {
        const double scpir = single ? 0.0 : cfg.scpir_grid[flat / n_snr];
        const double snr = cfg.snr_grid[flat % n_snr];
        Rng rng(derive_seed(cfg.seed, flat));
        std::vector<double> bers(static_cast<std::size_t>(cfg.n_bursts));
        double sum = 0.0;
        for (int f = 0; f < cfg.frames_per_point; ++f) {
            for (auto& ber : bers) {
                const double fade = generate_cir(cfg.fading_order, rng).energy();
                Stage1Point p{snr + linear_to_db(fade), cfg.p_int_db, cfg.p_int_db, cfg.p_int_db,
                              single ? 0.0 : scpir};
                ber = lookup_raw_ber(stage1, p);
            }
            sum += frame_fer(stage2, bers);
        }
        v[flat] = sum / cfg.frames_per_point;
    });
    isotonic_along(table, table.dims() - 1, false);
    return table;
}

double min_snr_for_fer(const GridTable& table, double scpir_db, double fer_thr) {
    if (!(fer_thr > 0.0 && fer_thr < 1.0)) throw InvalidInput("min_snr_for_fer: fer_thr must lie in (0, 1)");
    const std::size_t d = table.dims() - 1;
    const auto& snr = table.axis(d).points;
    std::vector<double> row(snr.size());
    for (std::size_t i = 0; i < snr.size(); ++i) {
        if (d == 0) {
            row[i] = table.values()[i];
        } else {
            const double x[2] = {scpir_db, snr[i]};
            row[i] = table.interpolate(x);
        }
    }
    if (row[0] <= fer_thr) return snr[0];
    for (std::size_t i = 1; i < row.size(); ++i) {
        if (row[i] <= fer_thr) {
            const double f0 = row[i - 1];
            const double f1 = row[i];
            return snr[i - 1] + (fer_thr - f0) * (snr[i] - snr[i - 1]) / (f1 - f0);
        }
    }
    return kInf;
}

// ---------------------------------------------------------------------------
// Allocation
// ---------------------------------------------------------------------------

void RraConfig::validate() const {
    if (!(fer_thr > 0.0 && fer_thr < 1.0)) throw InvalidInput("RRA: fer_thr must lie in (0, 1)");
    if (!(p_max > 0.0) || !(noise_power > 0.0) || !(sigma_a2 > 0.0)) {
        throw InvalidInput("RRA: p_max, noise_power and sigma_a2 must be positive");
    }
    if (scpir_grid.empty()) throw InvalidInput("RRA: empty SCPIR grid");
    for (double s : scpir_grid) {
        if (std::abs(s) > scpir_max_db) {
            throw InvalidInput("RRA: SCPIR grid value " + format_double(s) + " exceeds SCPIR_max");
        }
        if (std::find(scpir_grid.begin(), scpir_grid.end(), -s) == scpir_grid.end()) {
            throw InvalidInput("RRA: SCPIR grid must be symmetric around 0 dB");
        }
    }
}

SnrProfile snr_profile(const GridTable& rra, const RraConfig& cfg) {
    cfg.validate();
    if (rra.dims() != 2) throw InvalidInput("snr_profile: RRA table must be 2-D");
    SnrProfile prof;
    prof.scpir_db = cfg.scpir_grid;
    for (double s : cfg.scpir_grid) prof.snr_db.push_back(min_snr_for_fer(rra, s, cfg.fer_thr));
    return prof;
}

double single_required_snr(const GridTable& single, const RraConfig& cfg) {
    if (single.dims() != 1) throw InvalidInput("single_required_snr: single-user table must be 1-D");
    return min_snr_for_fer(single, 0.0, cfg.fer_thr);
}

PairPower pair_power_at(const SnrProfile& prof, double g_o, double g_p, double scpir_o_db,
                        const RraConfig& cfg) {
    const std::size_t io = grid_index(prof, scpir_o_db);
    const std::size_t ip = grid_index(prof, -scpir_o_db);
    const double po = required_power(prof.snr_db[io], g_o, cfg) / power_share(scpir_o_db);
    const double pp = required_power(prof.snr_db[ip], g_p, cfg) / power_share(-scpir_o_db);
    const double p = std::max(po, pp);
    return {std::min(p, cfg.p_max), scpir_o_db, p <= cfg.p_max};
}

PairPower required_pair_power(const SnrProfile& prof, double g_o, double g_p, const RraConfig& cfg) {
    if (!(g_o > 0.0 && g_p > 0.0)) throw InvalidInput("required_pair_power: gains must be positive");
    double best_p = kInf;
    double best_s = 0.0;
    bool have = false;
    for (std::size_t i = 0; i < prof.scpir_db.size(); ++i) {
        const double s = prof.scpir_db[i];
        const double po = required_power(prof.snr_db[i], g_o, cfg) / power_share(s);
        const double pp = required_power(prof.snr_db[grid_index(prof, -s)], g_p, cfg) / power_share(-s);
        const double p = std::max(po, pp);
        if (!have || p < best_p || (p == best_p && preferred(s, best_s))) {
            best_p = p;
            best_s = s;
            have = true;
        }
    }
    if (!std::isfinite(best_p)) {
        // Unreachable everywhere: the preferred SCPIR at full power.
        best_s = prof.scpir_db.front();
        for (double s : prof.scpir_db) {
            if (preferred(s, best_s)) best_s = s;
        }
    }
    return {std::min(best_p, cfg.p_max), best_s, best_p <= cfg.p_max};
}

PairPower required_pair_power(const GridTable& rra, double g_o, double g_p, const RraConfig& cfg) {
    return required_pair_power(snr_profile(rra, cfg), g_o, g_p, cfg);
}

PowerScpirMatrices build_matrices(const std::vector<double>& gains, const SnrProfile& prof,
                                  const RraConfig& cfg) {
    const auto n = static_cast<Eigen::Index>(gains.size());
    if (n < 2 || n % 2 != 0) throw InvalidInput("build_matrices: need an even number of users >= 2");
    PowerScpirMatrices m;
    m.P = RMatrix::Zero(n, n);
    m.S = RMatrix::Zero(n, n);
    m.feasible.setConstant(n, n, true);
    for (Eigen::Index o = 0; o < n; ++o) {
        for (Eigen::Index p = o + 1; p < n; ++p) {
            const auto pp = required_pair_power(prof, gains[o], gains[p], cfg);
            m.P(o, p) = m.P(p, o) = pp.power;
            m.S(o, p) = pp.scpir_o_db;
            m.S(p, o) = -pp.scpir_o_db;
            m.feasible(o, p) = m.feasible(p, o) = pp.feasible;
        }
    }
    return m;
}

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::no_vamos: return "no_vamos";
        case Strategy::pure_vamos: return "pure_vamos";
        case Strategy::poob: return "poob";
        case Strategy::random_scpir0: return "random_scpir0";
        case Strategy::random_scpiropt: return "random_scpiropt";
    }
    return "?";
}

Strategy strategy_from_string(const std::string& name) {
    for (auto s : {Strategy::no_vamos, Strategy::pure_vamos, Strategy::poob, Strategy::random_scpir0,
                   Strategy::random_scpiropt}) {
        if (name == to_string(s)) return s;
    }
    throw InvalidInput("unknown strategy '" + name + "'");
}

int osc_channel_count(Strategy s, int n_users, int k_channels) {
    if (k_channels < 1) throw InvalidInput("allocate: K must be >= 1");
    switch (s) {
        case Strategy::no_vamos: return 0;
        case Strategy::poob:
            if (n_users <= k_channels) return 0;
            if (n_users < 2 * k_channels) return n_users - k_channels;
            return k_channels;
        case Strategy::pure_vamos:
        case Strategy::random_scpir0:
        case Strategy::random_scpiropt: return std::min(k_channels, n_users / 2);
    }
    return 0;
}

AllocationTables make_allocation_tables(const GridTable& rra, const GridTable& single,
                                        const RraConfig& cfg) {
    return {snr_profile(rra, cfg), single_required_snr(single, cfg)};
}

PairingSolution allocate(const std::vector<double>& gains, int k_channels, Strategy strategy,
                         const AllocationTables& tables, const RraConfig& cfg, Rng& rng, bool powers) {
    const int n = static_cast<int>(gains.size());
    const int k_bar = osc_channel_count(strategy, n, k_channels);
    const int n_paired = 2 * k_bar;
    const int n_single = std::min(n - n_paired, k_channels - k_bar);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    PairingSolution sol;
    std::vector<int> paired(order.begin(), order.begin() + n_paired);
    for (int i = n_paired; i < n_paired + n_single; ++i) {
        SingleAssignment s;
        s.i = order[static_cast<std::size_t>(i)];
        if (powers) {
            const double p = required_power(tables.single_snr_db, gains[s.i], cfg);
            s.P = std::min(p, cfg.p_max);
            s.feasible = p <= cfg.p_max;
        }
        sol.singles.push_back(s);
        sol.sum_power += s.P;
    }
    for (int i = n_paired + n_single; i < n; ++i) sol.blocked.push_back(order[static_cast<std::size_t>(i)]);
    std::sort(sol.blocked.begin(), sol.blocked.end());
    if (n_paired == 0) return sol;

    std::vector<std::pair<int, int>> pairs;
    const bool random_pairs = strategy == Strategy::random_scpir0 || strategy == Strategy::random_scpiropt;
    if (random_pairs || !powers) {
        for (int i = 0; i < n_paired; i += 2) pairs.emplace_back(i, i + 1);
    }
    PowerScpirMatrices m;
    if (powers && !random_pairs) {
        std::vector<double> g;
        for (int u : paired) g.push_back(gains[u]);
        m = build_matrices(g, tables.pair, cfg);
        pairs = min_weight_perfect_matching(m.P, cfg.dp_limit).pairs;
    }
    for (auto [a, b] : pairs) {
        PairAssignment pa;
        pa.o = paired[static_cast<std::size_t>(a)];
        pa.p = paired[static_cast<std::size_t>(b)];
        if (powers) {
            PairPower pp;
            if (strategy == Strategy::random_scpir0) {
                pp = pair_power_at(tables.pair, gains[pa.o], gains[pa.p], 0.0, cfg);
            } else if (strategy == Strategy::random_scpiropt) {
                pp = required_pair_power(tables.pair, gains[pa.o], gains[pa.p], cfg);
            } else {
                pp = {m.P(a, b), m.S(a, b), static_cast<bool>(m.feasible(a, b))};
            }
            pa.scpir_o_db = pp.scpir_o_db;
            pa.P_o = pp.power * power_share(pp.scpir_o_db);
            pa.P_p = pp.power * power_share(-pp.scpir_o_db);
            pa.feasible = pp.feasible;
            sol.sum_power += pa.P_o + pa.P_p;
        }
        sol.pairs.push_back(pa);
    }
    return sol;
}

}  // namespace vamos
