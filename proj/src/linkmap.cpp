#include "vamos/linkmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vamos/parallel.hpp"
#include "vamos/trellis.hpp"

namespace vamos {

namespace {

int count_errors(const Symbols& a, const Symbols& b) {
    int e = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) e += (a[i] != b[i]);
    return e;
}

Bits random_bits(int n, Rng& rng) {
    Bits out(static_cast<std::size_t>(n));
    for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 1u);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Stage 1
// ---------------------------------------------------------------------------

std::vector<Axis> Stage1Grids::axes() const {
    return {{"desired_db", desired_db},
            {"co_gmsk_db", co_gmsk_db},
            {"co_osc_db", co_osc_db},
            {"adjacent_db", adjacent_db},
            {"scpir_db", scpir_db}};
}

double simulate_raw_ber(const Stage1Config& cfg, const Stage1Point& point, std::uint64_t seed) {
    if (cfg.bursts_per_point < 1) throw InvalidInput("stage-1: bursts_per_point must be >= 1");
    Rng rng(seed);
    const BurstContext ctx;
    const auto& layout = ctx.layout;
    ReceiverConfig rx = cfg.rx;
    rx.order = cfg.channel_order;

    const double b = cfg.paired ? scpir_db_to_amplitude(point.scpir_db) : 0.0;
    const PairLink link{b, 1.0, b * b, 1.0, db_to_linear(-point.desired_db)};
    InterferenceLedger ledger;
    auto add = [&](InterferenceKind kind, double db) {
        Interferer e;
        e.kind = kind;
        e.power = db_to_linear(db - point.desired_db);
        e.exact_power = true;
        ledger.push_back(e);
    };
    add(InterferenceKind::co_gmsk, point.co_gmsk_db);
    add(InterferenceKind::co_osc, point.co_osc_db);
    add(InterferenceKind::adjacent, point.adjacent_db);

    long errors = 0;
    for (int i = 0; i < cfg.bursts_per_point; ++i) {
        const Symbols a_o = random_burst(layout, ctx.tsc_o, rng);
        const Symbols a_p = random_burst(layout, ctx.tsc_p, rng);
        const Cir cir = normalized(generate_cir(cfg.channel_order, rng));
        const CVector r = synthesize_burst(a_o, a_p, link, cir, ledger, rng, layout.guard_value);
        const auto out = receive_burst(cfg.receiver, r, ctx, rx, cfg.paired);
        errors += count_errors(out.bits_o, extract_payload(layout, a_o));
    }
    return static_cast<double>(errors) /
           (static_cast<double>(cfg.bursts_per_point) * layout.payload_length());
}

GridTable generate_stage1_table(const Stage1Config& cfg) {
    Stage1Grids grids = cfg.grids;
    if (!cfg.paired) grids.scpir_db = {0.0};
    GridTable table(cfg.paired ? TableType::stage1 : TableType::single, grids.axes(),
                    to_string(cfg.receiver), "raw_ber");
    table.validate(0.0, 0.0);
    table.meta()["bursts_per_point"] = std::to_string(cfg.bursts_per_point);
    table.meta()["channel_order"] = std::to_string(cfg.channel_order);
    table.meta()["seed"] = std::to_string(cfg.seed);

    auto& values = table.values();
    parallel_for(values.size(), cfg.threads, [&](std::size_t flat) {
        const auto idx = table.unflatten(flat);
        Stage1Point p;
        p.desired_db = grids.desired_db[idx[ax_desired]];
        p.co_gmsk_db = grids.co_gmsk_db[idx[ax_co_gmsk]];
        p.co_osc_db = grids.co_osc_db[idx[ax_co_osc]];
        p.adjacent_db = grids.adjacent_db[idx[ax_adjacent]];
        p.scpir_db = grids.scpir_db[idx[ax_scpir]];
        values[flat] = simulate_raw_ber(cfg, p, derive_seed(cfg.seed, flat));
    });
    isotonic_along(table, ax_desired, false);
    return table;
}

double lookup_raw_ber(const GridTable& table, const Stage1Point& point) {
    const double x[5] = {point.desired_db, point.co_gmsk_db, point.co_osc_db, point.adjacent_db,
                         point.scpir_db};
    if (table.dims() != 5) throw InvalidInput("lookup_raw_ber: table is not five-dimensional");
    return std::clamp(table.interpolate(x), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Stage 2
// ---------------------------------------------------------------------------

bool stage2_feasible(double mean, double var) {
    return mean >= 0.0 && mean <= 1.0 && var >= 0.0 && var <= mean * (1.0 - mean) + 1e-15;
}

TwoPoint two_point_distribution(double mean, double var) {
    if (!stage2_feasible(mean, var)) {
        throw InvalidInput("two_point_distribution: variance " + format_double(var) +
                           " exceeds mean(1 - mean) for mean " + format_double(mean));
    }
    const double sd = std::sqrt(var);
    if (var == 0.0) return {mean, mean, 0.0};
    if (mean - sd >= 0.0 && mean + sd <= 1.0) return {mean - sd, mean + sd, 0.5};
    if (mean - sd < 0.0) {
        // Lower value pinned at zero.
        const double hi = std::min(1.0, (var + mean * mean) / mean);
        return {0.0, hi, mean / hi};
    }
    // Upper value pinned at one (mirror image of the case above).
    const double m = 1.0 - mean;
    const double hi = std::min(1.0, (var + m * m) / m);
    return {1.0 - hi, 1.0, 1.0 - m / hi};
}

double simulate_frame_fer(const CodecConfig& codec, const TwoPoint& dist, int frames, Rng& rng) {
    if (frames < 1) throw InvalidInput("simulate_frame_fer: frames must be >= 1");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int n = codec.n_bursts;
    std::vector<double> p(static_cast<std::size_t>(n));
    int errors = 0;
    for (int f = 0; f < frames; ++f) {
        const Bits info = random_bits(codec.info_bits, rng);
        Bits coded = conv_encode(info, codec);
        // Stratified: floor or ceil of p_hi * n bursts take the high value.
        const int k = static_cast<int>(std::floor(dist.p_hi * n + uni(rng)));
        for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i < k ? dist.hi : dist.lo;
        std::shuffle(p.begin(), p.end(), rng);
        for (std::size_t i = 0; i < coded.size(); ++i) {
            const double pb = p[static_cast<std::size_t>(interleave_position(static_cast<int>(i), codec.n_bursts).burst)];
            if (pb > 0.0 && uni(rng) < pb) coded[i] ^= 1u;
        }
        errors += conv_decode(coded, codec) != info;
    }
    return static_cast<double>(errors) / frames;
}

GridTable generate_stage2_table(const Stage2Config& cfg) {
    cfg.codec.validate();
    GridTable table(TableType::stage2, {{"mean_ber", cfg.mean_grid}, {"var_ber", cfg.var_grid}}, "",
                    cfg.codec.label);
    table.validate(0.0, 0.0);
    table.meta()["n_bursts"] = std::to_string(cfg.codec.n_bursts);
    table.meta()["info_bits"] = std::to_string(cfg.codec.info_bits);
    table.meta()["frames_per_point"] = std::to_string(cfg.frames_per_point);
    table.meta()["seed"] = std::to_string(cfg.seed);

    const std::size_t n_mean = cfg.mean_grid.size();
    const std::size_t n_var = cfg.var_grid.size();
    auto& v = table.values();
    constexpr double unreachable = -1.0;
    parallel_for(v.size(), cfg.threads, [&](std::size_t flat) {
        const double mean = cfg.mean_grid[flat / n_var];
        const double var = cfg.var_grid[flat % n_var];
        if (!stage2_feasible(mean, var)) {
            v[flat] = unreachable;
            return;
        }
        Rng rng(derive_seed(cfg.seed, flat));
        v[flat] = simulate_frame_fer(cfg.codec, two_point_distribution(mean, var),
                                     cfg.frames_per_point, rng);
    });
    // Unreachable cells take the value of the nearest feasible variance.
    for (std::size_t i = 0; i < n_mean; ++i) {
        double last = 0.0;
        for (std::size_t j = 0; j < n_var; ++j) {
            double& cell = v[i * n_var + j];
            if (cell == unreachable) {
                cell = last;
            } else {
                last = cell;
            }
        }
    }
    isotonic_along(table, 0, true);
    return table;
}

double frame_fer(const GridTable& stage2, const std::vector<double>& burst_bers) {
    if (burst_bers.empty()) throw InvalidInput("frame_fer: no bursts");
    if (stage2.dims() != 2) throw InvalidInput("frame_fer: table is not two-dimensional");
    double mean = 0.0;
    for (double b : burst_bers) {
        if (!(b >= 0.0 && b <= 1.0)) throw InvalidInput("frame_fer: burst BER outside [0, 1]");
        mean += b;
    }
    mean /= static_cast<double>(burst_bers.size());
    double var = 0.0;
    for (double b : burst_bers) var += (b - mean) * (b - mean);
    var /= static_cast<double>(burst_bers.size());
    const double x[2] = {mean, var};
    return std::clamp(stage2.interpolate(x), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Link-level frames
// ---------------------------------------------------------------------------

int frames_per_group(const CodecConfig& codec, const BurstLayout& layout) {
    const int n = layout.payload_length() / codec.bits_per_burst();
    if (n < 1) throw InvalidInput("codec needs more coded bits per burst than the payload holds");
    return n;
}

LinkFrameStats run_link_frames(const LinkRunConfig& cfg, int groups, std::uint64_t seed) {
    cfg.codec.validate();
    Rng rng(seed);
    const auto& ctx = cfg.ctx;
    const auto& layout = ctx.layout;
    const int n_bursts = cfg.codec.n_bursts;
    const int bpb = cfg.codec.bits_per_burst();
    const int fpg = frames_per_group(cfg.codec, layout);
    const int n_coded = cfg.codec.coded_bits();
    ReceiverConfig rx = cfg.rx;
    rx.order = cfg.channel_order;

    const double b = cfg.paired ? scpir_db_to_amplitude(cfg.scpir_db) : 0.0;
    const PairLink link{b, 1.0, b * b, 1.0, db_to_linear(-cfg.snr_db)};
    std::uniform_int_distribution<int> coin(0, 1);

    LinkFrameStats st;
    std::vector<Bits> info(static_cast<std::size_t>(fpg));
    std::vector<Bits> coded(static_cast<std::size_t>(fpg));
    std::vector<Bits> received(static_cast<std::size_t>(fpg));
    std::vector<double> group_bers(static_cast<std::size_t>(n_bursts));
    for (int g = 0; g < groups; ++g) {
        for (int f = 0; f < fpg; ++f) {
            info[f] = random_bits(cfg.codec.info_bits, rng);
            coded[f] = conv_encode(info[f], cfg.codec);
            received[f].assign(static_cast<std::size_t>(n_coded), 0);
        }
        for (int k = 0; k < n_bursts; ++k) {
            Symbols payload(layout.payload_length());
            for (Eigen::Index i = 0; i < payload.size(); ++i) payload[i] = coin(rng) ? -1.0 : 1.0;
            for (int f = 0; f < fpg; ++f) {
                for (int s = 0; s < bpb; ++s) {
                    const int i = s * n_bursts + k;
                    if (i < n_coded) payload[f * bpb + s] = code_to_symbol(coded[f][i]);
                }
            }
            const Symbols a_o = assemble_burst(layout, ctx.tsc_o, payload);
            const Symbols a_p = random_burst(layout, ctx.tsc_p, rng);
            const Cir cir = generate_cir(cfg.channel_order, rng);
            const CVector r = synthesize_burst(a_o, a_p, link, cir, cfg.ledger, rng, layout.guard_value);
            const auto out = receive_burst(cfg.receiver, r, ctx, rx, cfg.paired);
            const int errs = count_errors(out.bits_o, payload);
            st.bit_errors += static_cast<std::uint64_t>(errs);
            st.bits += static_cast<std::uint64_t>(payload.size());
            group_bers[k] = static_cast<double>(errs) / static_cast<double>(payload.size());
            st.burst_bers.push_back(group_bers[k]);
            for (int f = 0; f < fpg; ++f) {
                for (int s = 0; s < bpb; ++s) {
                    const int i = s * n_bursts + k;
                    if (i < n_coded) {
                        received[f][i] = static_cast<std::uint8_t>(symbol_to_code(out.bits_o[f * bpb + s]));
                    }
                }
            }
        }
        for (int f = 0; f < fpg; ++f) {
            const bool err = conv_decode(received[f], cfg.codec) != info[f];
            st.frame_errors += err;
            ++st.frames;
            st.frame_error_flags.push_back(err);
            st.frame_burst_bers.push_back(group_bers);
        }
    }
    return st;
}

}  // namespace vamos
