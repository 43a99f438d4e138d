#include "vamos/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "vamos/linkmap.hpp"
#include "vamos/parallel.hpp"

namespace vamos {

namespace {

const double kSqrt3 = std::sqrt(3.0);
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Axial hex coordinates. Cluster lattice of reuse 12 is spanned by
// U = (2, 2) and V = (-2, 4); the torus by 3U and 3V.
using Axial = std::array<int, 2>;
constexpr Axial kClusterU{2, 2};
constexpr Axial kClusterV{-2, 4};
constexpr int kTorusMult = 3;

int floor_div(int a, int b) {
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

/// Representative of (q, r) modulo the lattice spanned by u and v.
Axial reduce(Axial x, Axial u, Axial v) {
    const int det = u[0] * v[1] - u[1] * v[0];
    const int a = floor_div(x[0] * v[1] - x[1] * v[0], det);
    const int b = floor_div(u[0] * x[1] - u[1] * x[0], det);
    return {x[0] - a * u[0] - b * v[0], x[1] - a * u[1] - b * v[1]};
}

Axial torus_u() { return {kTorusMult * kClusterU[0], kTorusMult * kClusterU[1]}; }
Axial torus_v() { return {kTorusMult * kClusterV[0], kTorusMult * kClusterV[1]}; }

std::array<double, 2> to_cartesian(Axial a, double radius) {
    return {kSqrt3 * radius * (a[0] + 0.5 * a[1]), 1.5 * radius * a[1]};
}

Axial hex_round(double qf, double rf) {
    const double sf = -qf - rf;
    double q = std::round(qf);
    double r = std::round(rf);
    const double s = std::round(sf);
    const double dq = std::abs(q - qf);
    const double dr = std::abs(r - rf);
    const double ds = std::abs(s - sf);
    if (dq > dr && dq > ds) {
        q = -r - s;
    } else if (dr > ds) {
        r = -q - s;
    }
    return {static_cast<int>(q), static_cast<int>(r)};
}

double fading_gain(int order, Rng& rng) {
    // Energy of order+1 taps CN(0, 1/(order+1)).
    std::gamma_distribution<double> g(order + 1.0, 1.0 / (order + 1.0));
    return g(rng);
}

double to_axis_db(double ratio) { return ratio > 0.0 ? linear_to_db(ratio) : -200.0; }

// Per-cell lookup from axial representative to cell index.
struct AxialIndex {
    int q_min = 0, r_min = 0, width = 0;
    std::vector<int> cells;
    int at(Axial a) const {
        return cells[static_cast<std::size_t>((a[1] - r_min) * width + (a[0] - q_min))];
    }
};

std::vector<Axial> torus_cells();

const std::vector<Axial>& cell_reps() {
    static const std::vector<Axial> reps = torus_cells();
    return reps;
}

const AxialIndex& axial_index() {
    static const AxialIndex idx = [] {
        const auto& reps = cell_reps();
        AxialIndex out;
        int q_max = reps[0][0], r_max = reps[0][1];
        out.q_min = q_max;
        out.r_min = r_max;
        for (const auto& a : reps) {
            out.q_min = std::min(out.q_min, a[0]);
            out.r_min = std::min(out.r_min, a[1]);
            q_max = std::max(q_max, a[0]);
            r_max = std::max(r_max, a[1]);
        }
        out.width = q_max - out.q_min + 1;
        out.cells.assign(static_cast<std::size_t>(out.width * (r_max - out.r_min + 1)), -1);
        for (std::size_t i = 0; i < reps.size(); ++i) {
            out.cells[static_cast<std::size_t>((reps[i][1] - out.r_min) * out.width +
                                               (reps[i][0] - out.q_min))] = static_cast<int>(i);
        }
        return out;
    }();
    return idx;
}

std::vector<Axial> torus_cells() {
    std::map<Axial, int> seen;
    for (int q = -30; q <= 30; ++q) {
        for (int r = -30; r <= 30; ++r) seen.emplace(reduce({q, r}, torus_u(), torus_v()), 0);
    }
    std::vector<Axial> out;
    for (const auto& kv : seen) out.push_back(kv.first);
    return out;
}

}  // namespace

void NetworkConfig::validate() const {
    if (!(cell_radius_m > 0.0) || !(pathloss_exponent > 0.0) || !(shadow_sigma_db >= 0.0)) {
        throw InvalidInput("network: cell_radius_m and pathloss_exponent must be positive");
    }
    if (sectors != 1) throw InvalidInput("network: only sectors = 1 is supported");
    if (reuse != 12 || clusters != 9) {
        throw InvalidInput("network: the layout supports reuse = 12 with clusters = 9 only");
    }
    if (K < 1 || N_bursts < 1) throw InvalidInput("network: K and N_bursts must be >= 1");
    if (!(SCPIR_max_db >= 0.0)) throw InvalidInput("network: SCPIR_max_db must be >= 0");
    if (!(dtx_silence_prob >= 0.0 && dtx_silence_prob <= 1.0)) {
        throw InvalidInput("network: dtx_silence_prob must lie in [0, 1]");
    }
    if (!(fer_thr > 0.0 && fer_thr < 1.0)) throw InvalidInput("network: fer_thr must lie in (0, 1)");
}

// ---------------------------------------------------------------------------
// Layout
// ---------------------------------------------------------------------------

double CellLayout::distance(const std::array<double, 2>& p, int cell) const {
    const auto& c = centers[static_cast<std::size_t>(cell)];
    const double dx = p[0] - c[0];
    const double dy = p[1] - c[1];
    const double det = torus_a[0] * torus_b[1] - torus_a[1] * torus_b[0];
    double alpha = (dx * torus_b[1] - dy * torus_b[0]) / det;
    double beta = (torus_a[0] * dy - torus_a[1] * dx) / det;
    alpha -= std::round(alpha);
    beta -= std::round(beta);
    double best = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            const double x = (alpha + i) * torus_a[0] + (beta + j) * torus_b[0];
            const double y = (alpha + i) * torus_a[1] + (beta + j) * torus_b[1];
            best = std::min(best, x * x + y * y);
        }
    }
    return std::sqrt(best);
}

int CellLayout::serving_cell(const std::array<double, 2>& p) const {
    const double qf = (kSqrt3 / 3.0 * p[0] - p[1] / 3.0) / radius;
    const double rf = (2.0 / 3.0 * p[1]) / radius;
    const Axial a = reduce(hex_round(qf, rf), torus_u(), torus_v());
    return axial_index().at(a);
}

std::array<double, 2> CellLayout::random_point(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double a = u(rng);
    const double b = u(rng);
    return {a * torus_a[0] + b * torus_b[0], a * torus_a[1] + b * torus_b[1]};
}

CellLayout build_layout(const NetworkConfig& cfg) {
    cfg.validate();
    CellLayout layout;
    layout.radius = cfg.cell_radius_m;
    layout.n_groups = cfg.reuse;
    layout.torus_a = to_cartesian(torus_u(), cfg.cell_radius_m);
    layout.torus_b = to_cartesian(torus_v(), cfg.cell_radius_m);

    const auto& reps = cell_reps();
    std::map<Axial, int> group_ids;
    for (const auto& a : reps) group_ids.emplace(reduce(a, kClusterU, kClusterV), 0);
    int next = 0;
    for (auto& kv : group_ids) kv.second = next++;

    for (const auto& a : reps) {
        layout.centers.push_back(to_cartesian(a, cfg.cell_radius_m));
        layout.group.push_back(group_ids.at(reduce(a, kClusterU, kClusterV)));
    }
    const int n = layout.size();
    layout.co_channel.resize(static_cast<std::size_t>(n));
    layout.adjacent.resize(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        const int g = layout.group[static_cast<std::size_t>(c)];
        const int g_lo = (g + layout.n_groups - 1) % layout.n_groups;
        const int g_hi = (g + 1) % layout.n_groups;
        for (int o = 0; o < n; ++o) {
            const int go = layout.group[static_cast<std::size_t>(o)];
            if (o != c && go == g) layout.co_channel[static_cast<std::size_t>(c)].push_back(o);
            if (go == g_lo || go == g_hi) layout.adjacent[static_cast<std::size_t>(c)].push_back(o);
        }
    }
    return layout;
}

double path_gain(double distance_m, double shadow_db, const NetworkConfig& cfg) {
    const double d = std::max(distance_m, 1.0);
    return db_to_linear(cfg.gain_1m_db - 10.0 * cfg.pathloss_exponent * std::log10(d) + shadow_db);
}

UserDrop drop_users(const CellLayout& layout, const NetworkConfig& cfg, int n_total, Rng& rng,
                    bool with_gains, const std::vector<std::uint8_t>* gain_cells) {
    if (n_total < 0) throw InvalidInput("drop_users: negative user count");
    UserDrop drop;
    drop.position.reserve(static_cast<std::size_t>(n_total));
    drop.cell.reserve(static_cast<std::size_t>(n_total));
    std::normal_distribution<double> shadow(0.0, cfg.shadow_sigma_db);
    for (int u = 0; u < n_total; ++u) {
        const auto p = layout.random_point(rng);
        drop.position.push_back(p);
        drop.cell.push_back(layout.serving_cell(p));
    }
    if (!with_gains) return drop;
    drop.gains.resize(static_cast<std::size_t>(n_total));
    for (int u = 0; u < n_total; ++u) {
        const int c = drop.cell[static_cast<std::size_t>(u)];
        if (gain_cells && !(*gain_cells)[static_cast<std::size_t>(c)]) continue;
        const auto& p = drop.position[static_cast<std::size_t>(u)];
        auto& g = drop.gains[static_cast<std::size_t>(u)];
        g.push_back(path_gain(layout.distance(p, c), shadow(rng), cfg));
        for (int o : layout.co_channel[static_cast<std::size_t>(c)]) {
            g.push_back(path_gain(layout.distance(p, o), shadow(rng), cfg));
        }
        for (int o : layout.adjacent[static_cast<std::size_t>(c)]) {
            g.push_back(path_gain(layout.distance(p, o), shadow(rng), cfg));
        }
    }
    return drop;
}

// ---------------------------------------------------------------------------
// Drops
// ---------------------------------------------------------------------------

double DropResult::mean_fer() const { return active_users ? fer_sum / active_users : kNaN; }
double DropResult::mean_power() const { return active_users ? power_sum / active_users : kNaN; }
double DropResult::blocked_ratio() const {
    return users ? static_cast<double>(blocked_users) / static_cast<double>(users) : 0.0;
}

RraConfig rra_config(const NetworkConfig& cfg) {
    RraConfig r;
    r.fer_thr = cfg.fer_thr;
    r.scpir_grid = linspace_step(-cfg.SCPIR_max_db, cfg.SCPIR_max_db, 1.0);
    r.scpir_max_db = cfg.SCPIR_max_db;
    r.p_max = dbm_to_watt(cfg.P_max_dbm);
    r.noise_power = dbm_to_watt(cfg.noise_dbm);
    r.dp_limit = cfg.dp_limit;
    return r;
}

namespace {

// One logical channel of a cell: a single user, a pair or nothing.
struct Slot {
    int o = -1;
    int p = -1;
};

struct Emission {
    double power = 0.0;
    bool osc = false;
};

}  // namespace

DropResult simulate_drop(const CellLayout& layout, const NetworkConfig& cfg, int n_total,
                         Strategy strategy, const NetworkTables& tables, const DropOptions& options,
                         std::uint64_t seed) {
    const bool full = !options.blocking_only;
    if (full && (!tables.stage1_pair || !tables.stage1_single || !tables.stage2)) {
        throw InvalidInput("simulate_drop: mapping tables missing");
    }
    const RraConfig rcfg = rra_config(cfg);
    Rng rng_pos(derive_seed(seed, 0));
    Rng rng_alloc(derive_seed(seed, 1));
    Rng rng_dtx(derive_seed(seed, 2));
    Rng rng_burst(derive_seed(seed, 3));

    const int n_cells = layout.size();
    std::vector<std::uint8_t> relevant(static_cast<std::size_t>(n_cells), !options.hot_spot);
    if (options.hot_spot) {
        if (options.hot_cell < 0 || options.hot_cell >= n_cells) throw InvalidInput("simulate_drop: bad hot cell");
        relevant[static_cast<std::size_t>(options.hot_cell)] = 1;
        for (int c : layout.co_channel[static_cast<std::size_t>(options.hot_cell)]) relevant[static_cast<std::size_t>(c)] = 1;
        for (int c : layout.adjacent[static_cast<std::size_t>(options.hot_cell)]) relevant[static_cast<std::size_t>(c)] = 1;
    }
    const UserDrop drop = drop_users(layout, cfg, n_total, rng_pos, full, &relevant);
    const auto n_users = static_cast<std::size_t>(n_total);
    const int k_logical = cfg.logical_channels();

    DropResult res;
    res.fer.assign(n_users, kNaN);
    res.power.assign(n_users, 0.0);
    res.blocked.assign(n_users, 0);
    res.active.assign(n_users, 0);
    res.reported.assign(n_users, 0);
    res.cell = drop.cell;
    res.cell_power.assign(static_cast<std::size_t>(n_cells), 0.0);

    std::vector<std::vector<int>> members(static_cast<std::size_t>(n_cells));
    for (std::size_t u = 0; u < n_users; ++u) members[static_cast<std::size_t>(drop.cell[u])].push_back(static_cast<int>(u));

    std::vector<int> partner(n_users, -1);
    std::vector<double> scpir(n_users, 0.0);
    std::vector<std::vector<Slot>> slots(static_cast<std::size_t>(n_cells));
    for (int c = 0; c < n_cells; ++c) {
        if (!relevant[static_cast<std::size_t>(c)]) continue;
        const auto& m = members[static_cast<std::size_t>(c)];
        const Strategy s = options.hot_spot && c != options.hot_cell ? Strategy::no_vamos : strategy;
        std::vector<double> g(m.size(), 1.0);
        if (full) {
            for (std::size_t i = 0; i < m.size(); ++i) g[i] = drop.gains[static_cast<std::size_t>(m[i])][0];
        }
        const auto sol = allocate(g, k_logical, s, tables.alloc, rcfg, rng_alloc, full);
        auto& cell_slots = slots[static_cast<std::size_t>(c)];
        cell_slots.assign(static_cast<std::size_t>(k_logical), Slot{});
        std::size_t next = 0;
        for (const auto& pa : sol.pairs) {
            const auto o = static_cast<std::size_t>(m[static_cast<std::size_t>(pa.o)]);
            const auto p = static_cast<std::size_t>(m[static_cast<std::size_t>(pa.p)]);
            res.power[o] = pa.P_o;
            res.power[p] = pa.P_p;
            partner[o] = static_cast<int>(p);
            partner[p] = static_cast<int>(o);
            scpir[o] = pa.scpir_o_db;
            scpir[p] = -pa.scpir_o_db;
            cell_slots[next++] = {static_cast<int>(o), static_cast<int>(p)};
        }
        for (const auto& sa : sol.singles) {
            const auto i = static_cast<std::size_t>(m[static_cast<std::size_t>(sa.i)]);
            res.power[i] = sa.P;
            cell_slots[next++] = {static_cast<int>(i), -1};
        }
        for (int b : sol.blocked) res.blocked[static_cast<std::size_t>(m[static_cast<std::size_t>(b)])] = 1;
        res.cell_power[static_cast<std::size_t>(c)] = sol.sum_power;
        std::shuffle(cell_slots.begin(), cell_slots.end(), rng_alloc);
    }

    std::bernoulli_distribution silent(options.dtx ? cfg.dtx_silence_prob : 0.0);
    for (std::size_t u = 0; u < n_users; ++u) {
        const bool quiet = silent(rng_dtx);
        res.active[u] = !res.blocked[u] && !quiet;
        res.reported[u] = !options.hot_spot || drop.cell[u] == options.hot_cell;
    }
    for (std::size_t u = 0; u < n_users; ++u) {
        if (!res.reported[u]) continue;
        ++res.users;
        if (res.blocked[u]) ++res.blocked_users;
    }
    if (!full) return res;

    auto emission = [&](const Slot& s) {
        Emission e;
        const bool a_o = s.o >= 0 && res.active[static_cast<std::size_t>(s.o)];
        const bool a_p = s.p >= 0 && res.active[static_cast<std::size_t>(s.p)];
        if (a_o) e.power += res.power[static_cast<std::size_t>(s.o)];
        if (a_p) e.power += res.power[static_cast<std::size_t>(s.p)];
        e.osc = a_o && a_p;
        return e;
    };

    const double noise = rcfg.noise_power;
    const double adj_att = db_to_linear(-cfg.adjacent_attenuation_db);
    constexpr int kFadingOrder = 5;
    std::uniform_int_distribution<int> pick_slot(0, k_logical - 1);
    std::vector<double> bers(static_cast<std::size_t>(cfg.N_bursts));
    for (std::size_t u = 0; u < n_users; ++u) {
        if (!res.reported[u] || !res.active[u]) continue;
        const int c = drop.cell[u];
        const auto& g = drop.gains[u];
        const auto& co = layout.co_channel[static_cast<std::size_t>(c)];
        const auto& adj = layout.adjacent[static_cast<std::size_t>(c)];
        const bool paired = partner[u] >= 0 && res.active[static_cast<std::size_t>(partner[u])];
        const GridTable& stage1 = paired ? *tables.stage1_pair : *tables.stage1_single;
        for (int b = 0; b < cfg.N_bursts; ++b) {
            double gmsk = 0.0, osc = 0.0, adjacent = 0.0;
            for (std::size_t j = 0; j < co.size(); ++j) {
                const Slot& s = slots[static_cast<std::size_t>(co[j])][static_cast<std::size_t>(pick_slot(rng_burst))];
                const Emission e = emission(s);
                if (e.power <= 0.0) continue;
                const double rx = e.power * g[1 + j] * fading_gain(kFadingOrder, rng_burst);
                (e.osc ? osc : gmsk) += rx;
            }
            for (std::size_t j = 0; j < adj.size(); ++j) {
                const Slot& s = slots[static_cast<std::size_t>(adj[j])][static_cast<std::size_t>(pick_slot(rng_burst))];
                const Emission e = emission(s);
                if (e.power <= 0.0) continue;
                adjacent += e.power * adj_att * g[1 + co.size() + j] * fading_gain(kFadingOrder, rng_burst);
            }
            const double desired = res.power[u] * g[0] * fading_gain(kFadingOrder, rng_burst);
            const Stage1Point pt{to_axis_db(desired / noise), to_axis_db(gmsk / noise),
                                 to_axis_db(osc / noise), to_axis_db(adjacent / noise),
                                 paired ? scpir[u] : 0.0};
            bers[static_cast<std::size_t>(b)] = lookup_raw_ber(stage1, pt);
            res.co_power_sum += gmsk + osc;
            ++res.co_power_bursts;
        }
        res.fer[u] = frame_fer(*tables.stage2, bers);
        ++res.active_users;
        res.fer_sum += res.fer[u];
        res.power_sum += res.power[u];
    }
    return res;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

namespace {

struct Pooled {
    double fer = kNaN;
    double power_dbm = kNaN;
    double blocked = 0.0;
};

Pooled pool(const std::vector<DropResult>& results, const std::vector<std::size_t>& idx) {
    double fer = 0.0, power = 0.0;
    std::uint64_t active = 0, users = 0, blocked = 0;
    for (std::size_t i : idx) {
        const auto& r = results[i];
        fer += r.fer_sum;
        power += r.power_sum;
        active += r.active_users;
        users += r.users;
        blocked += r.blocked_users;
    }
    Pooled p;
    if (active) {
        p.fer = fer / static_cast<double>(active);
        p.power_dbm = watt_to_dbm(power / static_cast<double>(active));
    }
    if (users) p.blocked = static_cast<double>(blocked) / static_cast<double>(users);
    return p;
}

Interval percentile_interval(double mean, std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty()) return {mean, mean, mean};
    std::sort(v.begin(), v.end());
    const auto at = [&](double q) {
        return v[static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)))];
    };
    return {mean, at(0.025), at(0.975)};
}

}  // namespace

LoadSummary aggregate(const std::vector<DropResult>& results, double n_user, int bootstrap,
                      std::uint64_t seed) {
    if (results.empty()) throw InvalidInput("aggregate: no drops");
    std::vector<std::size_t> all(results.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const Pooled mean = pool(results, all);

    LoadSummary s;
    s.n_user = n_user;
    s.drops = static_cast<int>(results.size());
    double co = 0.0;
    std::uint64_t co_n = 0;
    for (const auto& r : results) {
        co += r.co_power_sum;
        co_n += r.co_power_bursts;
    }
    s.co_power = co_n ? co / static_cast<double>(co_n) : 0.0;

    std::vector<double> fer, power, blocked;
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, results.size() - 1);
    std::vector<std::size_t> idx(results.size());
    for (int b = 0; b < bootstrap && results.size() > 1; ++b) {
        for (auto& i : idx) i = pick(rng);
        const Pooled p = pool(results, idx);
        fer.push_back(p.fer);
        power.push_back(p.power_dbm);
        blocked.push_back(p.blocked);
    }
    s.fer = percentile_interval(mean.fer, fer);
    s.power_dbm = percentile_interval(mean.power_dbm, power);
    s.blocked = percentile_interval(mean.blocked, blocked);
    return s;
}

std::optional<double> max_users(const std::vector<LoadSummary>& summary, double fer_cap,
                                double block_cap) {
    if (summary.empty()) throw InvalidInput("max_users: empty summary");
    std::vector<LoadSummary> s = summary;
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.n_user < b.n_user; });
    auto fer_of = [](const LoadSummary& x) { return std::isnan(x.fer.mean) ? 0.0 : x.fer.mean; };
    auto ok = [&](const LoadSummary& x) { return fer_of(x) < fer_cap && x.blocked.mean < block_cap; };
    if (!ok(s[0])) return std::nullopt;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (ok(s[i])) continue;
        const auto& a = s[i - 1];
        const auto& b = s[i];
        auto crossing = [&](double ya, double yb, double cap) {
            return a.n_user + (cap - ya) * (b.n_user - a.n_user) / (yb - ya);
        };
        double n = b.n_user;
        if (fer_of(b) >= fer_cap) n = std::min(n, crossing(fer_of(a), fer_of(b), fer_cap));
        if (b.blocked.mean >= block_cap) n = std::min(n, crossing(a.blocked.mean, b.blocked.mean, block_cap));
        return n;
    }
    return s.back().n_user;
}

CapacityResult capacity_gain(const std::vector<LoadSummary>& osc, const std::vector<LoadSummary>& ref,
                             double fer_cap, double block_cap) {
    CapacityResult out;
    const auto n_osc = max_users(osc, fer_cap, block_cap);
    const auto n_ref = max_users(ref, fer_cap, block_cap);
    out.n_osc = n_osc.value_or(0.0);
    out.n_ref = n_ref.value_or(0.0);
    if (!n_osc || !n_ref) {
        out.zero_capacity = true;
        out.gain_percent = kNaN;
        return out;
    }
    out.gain_percent = (out.n_osc / out.n_ref - 1.0) * 100.0;
    return out;
}

std::vector<LoadSummary> network_sweep(const CellLayout& layout, const NetworkTables& tables,
                                       const NetworkSweepConfig& cfg) {
    cfg.net.validate();
    if (cfg.drops < 1) throw InvalidInput("network sweep: drops must be >= 1");
    const std::size_t n_loads = cfg.loads.size();
    const auto drops = static_cast<std::size_t>(cfg.drops);
    std::vector<DropResult> results(n_loads * drops);
    parallel_for(results.size(), cfg.threads, [&](std::size_t flat) {
        const std::size_t li = flat / drops;
        const int n_total = static_cast<int>(std::lround(cfg.loads[li] * layout.size()));
        DropResult r = simulate_drop(layout, cfg.net, n_total, cfg.strategy, tables, cfg.options,
                                     derive_seed(cfg.seed, li, flat % drops));
        // Only the aggregates are kept.
        r.fer = {};
        r.power = {};
        r.blocked = {};
        r.active = {};
        r.reported = {};
        r.cell = {};
        r.cell_power = {};
        results[flat] = std::move(r);
    });
    std::vector<LoadSummary> out;
    for (std::size_t li = 0; li < n_loads; ++li) {
        std::vector<DropResult> part(std::make_move_iterator(results.begin() + li * drops),
                                     std::make_move_iterator(results.begin() + (li + 1) * drops));
        out.push_back(aggregate(part, cfg.loads[li], 200, derive_seed(cfg.seed, li, 0xb007)));
    }
    return out;
}

}  // namespace vamos
