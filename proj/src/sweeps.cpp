#include "vamos/sweeps.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "vamos/chanest.hpp"
#include "vamos/parallel.hpp"
#include "vamos/rra.hpp"

namespace vamos {

// ---------------------------------------------------------------------------
// Link-level sweeps
// ---------------------------------------------------------------------------

Scenario scenario_from_string(const std::string& name) {
    if (name == "MTS-1" || name == "mts1") return Scenario::mts1;
    if (name == "MTS-2" || name == "mts2") return Scenario::mts2;
    throw InvalidInput("unknown scenario '" + name + "' (expected MTS-1 or MTS-2)");
}

const char* to_string(Scenario s) { return s == Scenario::mts1 ? "MTS-1" : "MTS-2"; }

InterferenceLedger scenario_ledger(Scenario s, double sinr_db, double scpir_db) {
    const double b = scpir_db_to_amplitude(scpir_db);
    const double co1 = (1.0 + b * b) * db_to_linear(-sinr_db);
    InterferenceLedger ledger;
    Interferer c1;
    c1.kind = InterferenceKind::co_gmsk;
    c1.power = co1;
    ledger.push_back(c1);
    if (s == Scenario::mts2) {
        Interferer c2;
        c2.kind = InterferenceKind::co_gmsk;
        c2.power = co1 * db_to_linear(-10.0);
        Interferer adj;
        adj.kind = InterferenceKind::adjacent;
        adj.power = co1 * db_to_linear(3.0);
        Interferer awgn;
        awgn.kind = InterferenceKind::awgn;
        awgn.power = co1 * db_to_linear(-17.0);
        ledger.push_back(c2);
        ledger.push_back(adj);
        ledger.push_back(awgn);
    }
    return ledger;
}

std::vector<LinkSweepRow> link_sweep(const LinkSweepConfig& cfg) {
    if (cfg.receivers.empty() || cfg.sinr_db.empty()) throw InvalidInput("link sweep: empty grid");
    if (cfg.groups < 1) throw InvalidInput("link sweep: groups must be >= 1");
    const std::size_t n_rx = cfg.receivers.size();
    std::vector<LinkSweepRow> rows(n_rx * cfg.sinr_db.size());
    parallel_for(rows.size(), cfg.threads, [&](std::size_t flat) {
        const std::size_t si = flat / n_rx;
        LinkRunConfig run;
        run.receiver = cfg.receivers[flat % n_rx];
        run.codec.n_bursts = cfg.n_bursts;
        run.channel_order = cfg.channel_order;
        run.scpir_db = cfg.scpir_db;
        run.snr_db = cfg.snr_db;
        run.ledger = scenario_ledger(cfg.scenario, cfg.sinr_db[si], cfg.scpir_db);
        rows[flat] = {run.receiver, cfg.sinr_db[si], run_link_frames(run, cfg.groups, derive_seed(cfg.seed, si))};
        rows[flat].stats.burst_bers = {};
        rows[flat].stats.frame_error_flags = {};
        rows[flat].stats.frame_burst_bers = {};
    });
    return rows;
}

// ---------------------------------------------------------------------------
// Channel-estimation sweeps
// ---------------------------------------------------------------------------

std::vector<ChanestRow> chanest_sweep(const ChanestSweepConfig& cfg) {
    if (cfg.channels < 1) throw InvalidInput("chanest sweep: channels must be >= 1");
    const BurstContext ctx;
    const double b = scpir_db_to_amplitude(cfg.scpir_db);
    EstimationInput base;
    base.A_o = toeplitz_from_training<cplx>(ctx.tsc_o, cfg.order);
    base.A_p = toeplitz_paired(ctx.tsc_p, cfg.order);
    const CMatrix a_true = base.A_o + b * base.A_p;

    const auto n_ch = static_cast<std::size_t>(cfg.channels);
    std::vector<ChanestRow> rows;
    for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
        const double sigma_n2 = (1.0 + b * b) * db_to_linear(-cfg.snr_db[si]);
        std::vector<double> err_joint(n_ch), err_known(n_ch), b_hat(n_ch);
        parallel_for(n_ch, cfg.threads, [&](std::size_t k) {
            Rng rng(derive_seed(cfg.seed, si, k));
            const Cir cir = generate_cir(cfg.order, rng);
            EstimationInput in = base;
            in.r_window = a_true * cir.taps;
            std::normal_distribution<double> n(0.0, std::sqrt(sigma_n2 / 2.0));
            for (Eigen::Index i = 0; i < in.r_window.size(); ++i) in.r_window[i] += cplx(n(rng), n(rng));
            const auto est = joint_ml_estimate(in);
            err_joint[k] = (est.h_hat - cir.taps).squaredNorm();
            err_known[k] = (ls_channel_given_b(in, b) - cir.taps).squaredNorm();
            b_hat[k] = est.b_hat;
        });
        ChanestRow row;
        row.snr_db = cfg.snr_db[si];
        for (std::size_t k = 0; k < n_ch; ++k) {
            row.mse_joint += err_joint[k];
            row.mse_known_b += err_known[k];
            row.b_mean += b_hat[k];
        }
        row.mse_joint /= static_cast<double>(n_ch);
        row.mse_known_b /= static_cast<double>(n_ch);
        row.b_mean /= static_cast<double>(n_ch);
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

NetworkTables TableSet::network(const RraConfig& cfg) const {
    NetworkTables t;
    t.stage1_pair = &stage1_pair;
    t.stage1_single = &stage1_single;
    t.stage2 = &stage2;
    t.alloc = make_allocation_tables(rra, rra_single, cfg);
    return t;
}

Stage1Config stage1_config(const Settings& s, ReceiverKind receiver, bool paired, int threads) {
    Stage1Config c;
    c.receiver = receiver;
    c.grids.desired_db = s.get_doubles("stage1.desired_db");
    c.grids.co_gmsk_db = s.get_doubles("stage1.co_gmsk_db");
    c.grids.co_osc_db = s.get_doubles("stage1.co_osc_db");
    c.grids.adjacent_db = s.get_doubles("stage1.adjacent_db");
    c.grids.scpir_db = s.get_doubles("stage1.scpir_db");
    c.bursts_per_point = s.get_int("stage1.bursts_per_point");
    c.channel_order = s.get_int("stage1.channel_order");
    c.paired = paired;
    c.seed = derive_seed(s.get_u64("seed"), 1, static_cast<std::uint64_t>(receiver), paired);
    c.threads = threads;
    return c;
}

Stage2Config stage2_config(const Settings& s, int threads) {
    Stage2Config c;
    c.codec.n_bursts = s.get_int("N_bursts");
    c.mean_grid = s.get_doubles("stage2.mean");
    c.var_grid = s.get_doubles("stage2.var");
    c.frames_per_point = s.get_int("stage2.frames_per_point");
    c.seed = derive_seed(s.get_u64("seed"), 2);
    c.threads = threads;
    return c;
}

NetworkConfig network_config(const Settings& s) {
    NetworkConfig n;
    n.cell_radius_m = s.get_double("cell_radius_m");
    n.sectors = s.get_int("sectors");
    n.reuse = s.get_int("reuse");
    n.clusters = s.get_int("clusters");
    n.pathloss_exponent = s.get_double("pathloss_exponent");
    n.gain_1m_db = s.get_double("gain_1m_db");
    n.shadow_sigma_db = s.get_double("shadow_sigma_db");
    n.K = s.get_int("K");
    n.P_max_dbm = s.get_double("P_max_dbm");
    n.noise_dbm = s.get_double("noise_dbm");
    n.SCPIR_max_db = s.get_double("SCPIR_max_db");
    n.N_bursts = s.get_int("N_bursts");
    n.P_int_db = s.get_double("P_int_db");
    n.dtx_silence_prob = s.get_double("dtx_silence_prob");
    n.adjacent_attenuation_db = s.get_double("adjacent_attenuation_db");
    n.fer_thr = s.get_double("fer_thr");
    n.dp_limit = s.get_int("dp_limit");
    n.validate();
    return n;
}

RraTableConfig rra_table_config(const Settings& s, int threads) {
    const NetworkConfig n = network_config(s);
    RraTableConfig c;
    c.p_int_db = n.P_int_db;
    c.n_bursts = n.N_bursts;
    c.scpir_grid = linspace_step(-n.SCPIR_max_db, n.SCPIR_max_db, 1.0);
    c.snr_grid = s.get_doubles("rra.snr_db");
    c.frames_per_point = s.get_int("rra.frames_per_point");
    c.seed = derive_seed(s.get_u64("seed"), 3);
    c.threads = threads;
    return c;
}

namespace {

const std::vector<std::string> kTableKeys = {
    "seed", "stage1.bursts_per_point", "stage1.channel_order", "stage1.desired_db", "stage1.co_gmsk_db",
    "stage1.co_osc_db", "stage1.adjacent_db", "stage1.scpir_db", "stage2.frames_per_point", "stage2.mean",
    "stage2.var", "rra.frames_per_point", "rra.snr_db", "N_bursts", "P_int_db", "SCPIR_max_db"};

std::string generation_hash(const Settings& s, ReceiverKind receiver) {
    std::string text = std::string("receiver=") + to_string(receiver) + "\n";
    for (const auto& k : kTableKeys) text += k + "=" + s.get(k) + "\n";
    return hex64(fnv1a64(text));
}

std::filesystem::path table_path(const Settings& s, ReceiverKind receiver, const std::string& kind) {
    return std::filesystem::path(s.get("tables_dir")) / (kind + "_" + to_string(receiver) + ".tbl");
}

const std::vector<std::string> kTableKinds = {"stage1", "single", "stage2", "rra", "rra_single"};

GridTable* table_slot(TableSet& t, const std::string& kind) {
    if (kind == "stage1") return &t.stage1_pair;
    if (kind == "single") return &t.stage1_single;
    if (kind == "stage2") return &t.stage2;
    if (kind == "rra") return &t.rra;
    return &t.rra_single;
}

const GridTable& table_ref(const TableSet& t, const std::string& kind) {
    return *table_slot(const_cast<TableSet&>(t), kind);
}

}  // namespace

TableSet generate_tables(const Settings& s, ReceiverKind receiver, int threads, std::ostream* log) {
    TableSet t;
    auto note = [&](const std::string& what) {
        if (log) *log << "generating " << what << " table for " << to_string(receiver) << "\n";
    };
    note("stage-1");
    t.stage1_pair = generate_stage1_table(stage1_config(s, receiver, true, threads));
    note("single-user stage-1");
    t.stage1_single = generate_stage1_table(stage1_config(s, receiver, false, threads));
    note("stage-2");
    t.stage2 = generate_stage2_table(stage2_config(s, threads));
    const RraTableConfig rc = rra_table_config(s, threads);
    note("RRA");
    t.rra = build_rra_table(t.stage1_pair, t.stage2, rc);
    t.rra_single = build_rra_table(t.stage1_single, t.stage2, rc);
    const std::string h = generation_hash(s, receiver);
    for (const auto& kind : kTableKinds) table_slot(t, kind)->meta()["generation"] = h;
    return t;
}

void save_tables(const TableSet& t, const Settings& s, ReceiverKind receiver) {
    std::filesystem::create_directories(s.get("tables_dir"));
    for (const auto& kind : kTableKinds) table_ref(t, kind).save(table_path(s, receiver, kind).string());
}

TableSet obtain_tables(const Settings& s, ReceiverKind receiver, int threads, std::ostream* log) {
    const std::string h = generation_hash(s, receiver);
    TableSet t;
    std::string problem;
    for (const auto& kind : kTableKinds) {
        const auto path = table_path(s, receiver, kind);
        if (!std::filesystem::exists(path)) {
            problem = "missing table " + path.string();
            break;
        }
        *table_slot(t, kind) = GridTable::load(path.string());
        const auto& meta = table_slot(t, kind)->meta();
        const auto it = meta.find("generation");
        if (it == meta.end() || it->second != h) {
            problem = "table " + path.string() + " was generated with different settings";
            break;
        }
    }
    if (problem.empty()) return t;
    if (!s.get_bool("auto_generate")) {
        throw MissingTableError(problem + "; run gen-tables or set auto_generate=true");
    }
    if (log) *log << "warning: " << problem << "; generating tables\n";
    t = generate_tables(s, receiver, threads, log);
    save_tables(t, s, receiver);
    return t;
}

// ---------------------------------------------------------------------------
// CSV front-ends
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) { return format_double(v); }

std::vector<ReceiverKind> receivers_of(const Settings& s) {
    std::vector<ReceiverKind> out;
    for (const auto& r : s.get_strings("receivers")) out.push_back(receiver_from_string(r));
    return out;
}

struct CaseSpec {
    std::string name;
    Strategy strategy = Strategy::poob;
    bool dtx = false;
    bool hot_spot = false;
};

CaseSpec parse_case(const std::string& text) {
    CaseSpec c;
    c.name = text;
    std::istringstream in(text);
    std::string part;
    bool first = true;
    while (std::getline(in, part, '+')) {
        if (first) {
            c.strategy = strategy_from_string(part);
            first = false;
        } else if (part == "dtx") {
            c.dtx = true;
        } else if (part == "hot_spot") {
            c.hot_spot = true;
        } else {
            throw ConfigError("capacity case '" + text + "': unknown modifier '" + part + "'");
        }
    }
    return c;
}

NetworkSweepConfig sweep_config(const Settings& s, int threads) {
    NetworkSweepConfig c;
    c.net = network_config(s);
    c.strategy = strategy_from_string(s.get("strategy"));
    c.options.dtx = s.get_bool("dtx");
    c.options.hot_spot = s.get_bool("hot_spot");
    c.loads = s.get_doubles("loads");
    c.drops = s.get_int("drops");
    c.seed = derive_seed(s.get_u64("seed"), 5);
    c.threads = threads;
    return c;
}

void write_summary_row(std::ostringstream& out, const std::string& lead, const LoadSummary& r) {
    out << lead << ',' << fmt(r.n_user) << ',' << r.drops << ',' << fmt(r.fer.mean) << ','
        << fmt(r.fer.lo) << ',' << fmt(r.fer.hi) << ',' << fmt(r.power_dbm.mean) << ','
        << fmt(r.power_dbm.lo) << ',' << fmt(r.power_dbm.hi) << ',' << fmt(r.blocked.mean) << ','
        << fmt(r.blocked.lo) << ',' << fmt(r.blocked.hi) << '\n';
}

}  // namespace

std::string csv_header_comment(const std::string& command, const Settings& s) {
    return "# vamos " + command + " config_hash=" + hex64(s.hash()) + " seed=" + s.get("seed") + "\n";
}

std::string run_link_sweep(const Settings& s, int threads) {
    LinkSweepConfig c;
    c.receivers = receivers_of(s);
    c.scenario = scenario_from_string(s.get("link.scenario"));
    c.sinr_db = s.get_doubles("link.sinr_db");
    c.scpir_db = s.get_double("link.scpir_db");
    c.groups = s.get_int("link.groups");
    c.channel_order = s.get_int("link.channel_order");
    c.snr_db = s.get_double("link.snr_db");
    c.n_bursts = s.get_int("link.n_bursts");
    c.seed = derive_seed(s.get_u64("seed"), 4);
    c.threads = threads;
    const auto rows = link_sweep(c);

    std::ostringstream out;
    out << csv_header_comment("link-sweep", s);
    out << "scenario,receiver,scpir_db,sinr_db,frames,frame_errors,fer,bits,bit_errors,ber\n";
    for (const auto& r : rows) {
        const auto& st = r.stats;
        out << to_string(c.scenario) << ',' << to_string(r.receiver) << ',' << fmt(c.scpir_db) << ','
            << fmt(r.sinr_db) << ',' << st.frames << ',' << st.frame_errors << ','
            << fmt(static_cast<double>(st.frame_errors) / static_cast<double>(st.frames)) << ','
            << st.bits << ',' << st.bit_errors << ','
            << fmt(static_cast<double>(st.bit_errors) / static_cast<double>(st.bits)) << '\n';
    }
    return out.str();
}

std::string run_chanest_sweep(const Settings& s, int threads) {
    ChanestSweepConfig c;
    c.snr_db = s.get_doubles("chanest.snr_db");
    c.channels = s.get_int("chanest.channels");
    c.order = s.get_int("chanest.order");
    c.scpir_db = s.get_double("chanest.scpir_db");
    c.seed = derive_seed(s.get_u64("seed"), 6);
    c.threads = threads;
    std::ostringstream out;
    out << csv_header_comment("chanest-sweep", s);
    out << "snr_db,estimator,sum_mse,mean_b_hat\n";
    for (const auto& r : chanest_sweep(c)) {
        out << fmt(r.snr_db) << ",joint_ml," << fmt(r.mse_joint) << ',' << fmt(r.b_mean) << '\n';
        out << fmt(r.snr_db) << ",known_b_ls," << fmt(r.mse_known_b) << ','
            << fmt(scpir_db_to_amplitude(c.scpir_db)) << '\n';
    }
    return out.str();
}

std::string run_network_sweep(const Settings& s, int threads, std::ostream* log) {
    const ReceiverKind rx = receiver_from_string(s.get("receiver"));
    const NetworkSweepConfig c = sweep_config(s, threads);
    const CellLayout layout = build_layout(c.net);
    const TableSet tables = obtain_tables(s, rx, threads, log);
    const auto rows = network_sweep(layout, tables.network(rra_config(c.net)), c);

    std::ostringstream out;
    out << csv_header_comment("net-sweep", s);
    out << "strategy,receiver,dtx,hot_spot,n_user,drops,fer,fer_lo,fer_hi,power_dbm,power_dbm_lo,"
           "power_dbm_hi,blocked,blocked_lo,blocked_hi\n";
    const std::string lead = std::string(to_string(c.strategy)) + ',' + to_string(rx) + ',' +
                             (c.options.dtx ? "1" : "0") + ',' + (c.options.hot_spot ? "1" : "0");
    for (const auto& r : rows) write_summary_row(out, lead, r);
    return out.str();
}

std::string run_capacity_report(const Settings& s, int threads, std::ostream* log) {
    const ReceiverKind rx = receiver_from_string(s.get("receiver"));
    NetworkSweepConfig base = sweep_config(s, threads);
    const CellLayout layout = build_layout(base.net);
    const TableSet tables = obtain_tables(s, rx, threads, log);
    const NetworkTables nt = tables.network(rra_config(base.net));
    const double fer_cap = base.net.fer_thr;
    const Strategy ref_strategy = strategy_from_string(s.get("capacity.reference"));

    std::map<bool, std::vector<LoadSummary>> reference;  // keyed by DTX
    auto ref_for = [&](bool dtx) -> const std::vector<LoadSummary>& {
        auto it = reference.find(dtx);
        if (it != reference.end()) return it->second;
        NetworkSweepConfig c = base;
        c.strategy = ref_strategy;
        c.options = {};
        c.options.dtx = dtx;
        return reference[dtx] = network_sweep(layout, nt, c);
    };

    std::ostringstream out;
    out << csv_header_comment("capacity-report", s);
    out << "case,receiver,reference,n_ref,n_case,gain_percent\n";
    for (const auto& text : s.get_strings("capacity.cases")) {
        const CaseSpec cs = parse_case(text);
        NetworkSweepConfig c = base;
        c.strategy = cs.strategy;
        c.options = {};
        c.options.dtx = cs.dtx;
        c.options.hot_spot = cs.hot_spot;
        const auto summary = network_sweep(layout, nt, c);
        const auto gain = capacity_gain(summary, ref_for(cs.dtx), fer_cap, 0.10);
        out << cs.name << ',' << to_string(rx) << ',' << to_string(ref_strategy) << ','
            << fmt(gain.n_ref) << ',' << fmt(gain.n_osc) << ','
            << (gain.zero_capacity ? std::string("zero-capacity") : fmt(gain.gain_percent)) << '\n';
    }
    return out.str();
}

}  // namespace vamos
