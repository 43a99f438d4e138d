#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "burst_helpers.hpp"
#include "vamos/chanest.hpp"
#include "vamos/matching.hpp"
#include "vamos/netsim.hpp"
#include "vamos/sweeps.hpp"

using namespace vamos;
using namespace vamos::testing;
namespace fs = std::filesystem;

namespace {

int g_threads = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

// ---------------------------------------------------------------------------
// 1. Blocking anchors
// ---------------------------------------------------------------------------

Outcome blocking_anchors() {
    const NetworkConfig net;
    const CellLayout layout = build_layout(net);
    auto crossing = [&](Strategy s, std::vector<double> loads) {
        NetworkSweepConfig c;
        c.net = net;
        c.strategy = s;
        c.options.blocking_only = true;
        c.loads = std::move(loads);
        c.drops = 5000;
        c.seed = 101;
        c.threads = g_threads;
        return max_users(network_sweep(layout, {}, c), 1.0, 0.10).value_or(0.0);
    };
    const double n_ref = crossing(Strategy::no_vamos, linspace_step(13.0, 19.0, 1.0));
    const double n_pure = crossing(Strategy::pure_vamos, linspace_step(30.0, 38.0, 1.0));
    const double n_poob = crossing(Strategy::poob, linspace_step(30.0, 38.0, 1.0));
    Outcome o;
    o.pass = std::abs(n_ref - 16.0) <= 1.5 && std::abs(n_pure - 33.7) <= 2.5 && std::abs(n_poob - 33.7) <= 2.5;
    o.detail = "10% blocking at N_user " + fmt(n_ref) + " (no_vamos), " + fmt(n_pure) + " (pure_vamos), " +
               fmt(n_poob) + " (poob); 5000 drops per load";
    return o;
}

// ---------------------------------------------------------------------------
// 2. Capacity-gain methodology
// ---------------------------------------------------------------------------

Outcome capacity_methodology() {
    Settings s;
    s.apply({{"receiver", "mic"},
             {"tables_dir", "acceptance_tables"},
             {"auto_generate", "true"},
             {"stage1.bursts_per_point", "20"},
             {"loads", "8:40:4"},
             {"drops", "40"}},
            "acceptance");
    NetworkSweepConfig base;
    base.net = network_config(s);
    base.loads = s.get_doubles("loads");
    base.drops = s.get_int("drops");
    base.seed = 202;
    base.threads = g_threads;
    const CellLayout layout = build_layout(base.net);
    const TableSet tables = obtain_tables(s, ReceiverKind::mic, g_threads, &std::cerr);
    const NetworkTables nt = tables.network(rra_config(base.net));

    auto sweep = [&](Strategy st, bool hot) {
        NetworkSweepConfig c = base;
        c.strategy = st;
        c.options.hot_spot = hot;
        return network_sweep(layout, nt, c);
    };
    const auto ref = sweep(Strategy::no_vamos, false);
    const auto poob = sweep(Strategy::poob, false);
    const auto hot = sweep(Strategy::poob, true);

    const CapacityResult self = capacity_gain(ref, ref);
    const CapacityResult all = capacity_gain(poob, ref);
    const CapacityResult spot = capacity_gain(hot, ref);
    const bool identity = !self.zero_capacity && self.gain_percent == 0.0;
    const bool ordered = !spot.zero_capacity && (all.zero_capacity || spot.gain_percent > all.gain_percent);
    Outcome o;
    o.pass = identity && ordered;
    auto gain = [](const CapacityResult& r) {
        return r.zero_capacity ? std::string("zero-capacity") : fmt(r.gain_percent) + "%";
    };
    o.detail = "self gain " + gain(self) + "; MIC hot spot " + gain(spot) + " (N " + fmt(spot.n_osc) +
               ") vs POOB all cells " + gain(all) + " (N " + fmt(all.n_osc) + "), reference N " + fmt(self.n_ref);
    return o;
}

// ---------------------------------------------------------------------------
// 3. Channel estimation
// ---------------------------------------------------------------------------

Outcome channel_estimation() {
    ChanestSweepConfig c;
    c.snr_db = linspace_step(5.0, 30.0, 5.0);
    c.channels = 5000;
    c.order = 5;
    c.seed = 303;
    c.threads = g_threads;
    Outcome o{true, "joint-ML vs known-b MSE gap (dB):"};
    for (const auto& r : chanest_sweep(c)) {
        const double gap = 10.0 * std::log10(r.mse_joint / r.mse_known_b);
        o.pass = o.pass && std::abs(gap) < 0.5;
        o.detail += " " + fmt(r.snr_db) + ":" + fmt(gap, 3);
    }
    return o;
}

// ---------------------------------------------------------------------------
// 4. MIC orthogonality
// ---------------------------------------------------------------------------

double two_proportion_p(std::uint64_t e1, std::uint64_t n1, std::uint64_t e2, std::uint64_t n2) {
    const double p1 = static_cast<double>(e1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(e2) / static_cast<double>(n2);
    const double p = static_cast<double>(e1 + e2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(p * (1.0 - p) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    if (se == 0.0) return 1.0;
    return std::erfc(std::abs(p1 - p2) / se / std::sqrt(2.0));
}

Outcome mic_orthogonality() {
    const BurstContext ctx;
    Rng rng(404);
    MicConfig cfg;
    cfg.q_f = 0;
    cfg.q_b = 0;
    cfg.memory = 0;
    double worst_leak = 0.0;
    for (int t = 0; t < 200; ++t) {
        const double b = std::pow(10.0, std::uniform_real_distribution<double>(-0.6, 0.6)(rng));
        const Cir cir = make_cir(CVector::Constant(1, std::polar(1.0, 0.1 * t)));
        const Symbols a_o = random_burst(ctx.layout, ctx.tsc_o, rng);
        const Symbols a_p = random_burst(ctx.layout, ctx.tsc_p, rng);
        PairLink link{b, 1.0, b * b, 1.0, 0.0};
        const CVector r = synthesize_burst(a_o, a_p, link, cir, {}, rng);
        const MicFilters f = mic_adapt(r, ctx.tsc_o, ctx.layout, cfg);
        const CVector user_p = convolve_burst(cir.taps, cplx(0.0, b) * a_p.cast<cplx>(), cplx(0.0, b));
        worst_leak = std::max(worst_leak, mic_filter_output(user_p, f.f, f.c).squaredNorm() / user_p.squaredNorm());
    }

    // MIC at SNR against real BPSK with noise variance 1 / (2 SNR).
    Outcome o{worst_leak < 1e-12, "max leakage ratio " + fmt(worst_leak, 3) + ";"};
    for (double snr_db : {4.0, 10.0}) {
        const double snr = std::pow(10.0, snr_db / 10.0);
        const cplx h0 = std::polar(1.0, 0.7);
        const MicFilters ideal = mic_filters_for_single_tap(h0);
        std::uint64_t errors = 0, bits = 0;
        while (bits < 1000000) {
            const Symbols a_o = random_burst(ctx.layout, ctx.tsc_o, rng);
            const Symbols a_p = random_burst(ctx.layout, ctx.tsc_p, rng);
            PairLink link{1.0, 1.0, 1.0, 1.0, 1.0 / snr};
            const CVector r = synthesize_burst(a_o, a_p, link, make_cir(CVector::Constant(1, h0)), {}, rng);
            const auto out = mic_equalize(r, ideal, ctx.tsc_o, ctx.layout, 0);
            errors += static_cast<std::uint64_t>(count_errors(out.bits_o, extract_payload(ctx.layout, a_o)));
            bits += static_cast<std::uint64_t>(ctx.layout.payload_length());
        }
        std::normal_distribution<double> w(0.0, std::sqrt(1.0 / (2.0 * snr)));
        std::uint64_t ref_errors = 0;
        for (std::uint64_t i = 0; i < bits; ++i) {
            const double a = (rng() & 1u) ? 1.0 : -1.0;
            ref_errors += (a + w(rng) > 0.0) != (a > 0.0);
        }
        const double p = two_proportion_p(errors, bits, ref_errors, bits);
        o.pass = o.pass && p > 0.01;
        o.detail += " SNR " + fmt(snr_db) + " dB: MIC BER " + fmt(static_cast<double>(errors) / bits) +
                    " vs BPSK " + fmt(static_cast<double>(ref_errors) / bits) + " (p " + fmt(p, 3) + ")";
    }
    return o;
}

// ---------------------------------------------------------------------------
// 5. Receiver ordering
// ---------------------------------------------------------------------------

Outcome receiver_ordering() {
    LinkSweepConfig c;
    c.scenario = Scenario::mts1;
    c.scpir_db = 0.0;
    c.sinr_db = {-1.0, 1.0};
    c.groups = 2500;
    c.seed = 505;
    c.threads = g_threads;
    std::map<double, std::map<ReceiverKind, double>> fer;
    std::uint64_t min_frames = ~std::uint64_t{0};
    for (const auto& r : link_sweep(c)) {
        fer[r.sinr_db][r.receiver] = static_cast<double>(r.stats.frame_errors) / static_cast<double>(r.stats.frames);
        min_frames = std::min(min_frames, r.stats.frames);
    }
    Outcome o{min_frames >= 10000, "MTS-1, " + std::to_string(min_frames) + " frames per point, FER V-MIC/SIC/MIC/joint MLSE:"};
    for (auto& [sinr, f] : fer) {
        const double v = f[ReceiverKind::vmic], s = f[ReceiverKind::sic], m = f[ReceiverKind::mic],
                     j = f[ReceiverKind::joint_mlse];
        o.pass = o.pass && v < s && s <= 1.05 * m && m < j;
        o.detail += " SINR " + fmt(sinr) + " dB " + fmt(v) + "/" + fmt(s) + "/" + fmt(m) + "/" + fmt(j) + ";";
    }
    return o;
}

// ---------------------------------------------------------------------------
// 6. Matching exactness
// ---------------------------------------------------------------------------

double brute_force_weight(const RMatrix& w, std::vector<int> free) {
    if (free.empty()) return 0.0;
    const int i = free.front();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < free.size(); ++k) {
        std::vector<int> rest;
        for (std::size_t m = 1; m < free.size(); ++m)
            if (m != k) rest.push_back(free[m]);
        best = std::min(best, w(i, free[k]) + brute_force_weight(w, rest));
    }
    return best;
}

Outcome matching_exactness() {
    Rng rng(606);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    int mismatches = 0, instances = 0;
    for (int n : {4, 6, 8}) {
        for (int t = 0; t < 100; ++t) {
            RMatrix w = RMatrix::Zero(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng);
            std::vector<int> all(static_cast<std::size_t>(n));
            std::iota(all.begin(), all.end(), 0);
            const double ref = brute_force_weight(w, all);
            const Matching m = min_weight_perfect_matching(w);
            mismatches += std::abs(m.weight - ref) > 1e-9 * ref || std::abs(matching_weight(w, m.pairs) - ref) > 1e-9 * ref;
            ++instances;
        }
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches in " + std::to_string(instances) + " instances"};
}

// ---------------------------------------------------------------------------
// 7. Blind vs joint estimation of b
// ---------------------------------------------------------------------------

Outcome estimator_agreement() {
    const BurstContext ctx;
    const int order = 3;
    EstimationInput base;
    base.A_o = toeplitz_from_training<cplx>(ctx.tsc_o, order);
    base.A_p = toeplitz_paired(ctx.tsc_p, order);
    const BlindEstConfig cfg = BlindEstConfig::for_order(order);
    Outcome o{true, "|b_blind - b_joint| / b_joint:"};
    for (double snr_db : {15.0, 20.0, 25.0, 30.0}) {
        std::vector<double> rel;
        const int trials = 1000;
        for (int t = 0; t < trials; ++t) {
            Rng rng(derive_seed(707, static_cast<std::uint64_t>(snr_db), static_cast<std::uint64_t>(t)));
            const double b = std::pow(10.0, std::uniform_real_distribution<double>(-0.3, 0.3)(rng));
            const Cir cir = generate_cir(order, rng);
            EstimationInput in = base;
            in.r_window = (base.A_o + b * base.A_p) * cir.taps;
            in.sigma_w2 = (1.0 + b * b) * std::pow(10.0, -snr_db / 10.0);
            std::normal_distribution<double> n(0.0, std::sqrt(in.sigma_w2 / 2.0));
            for (auto& v : in.r_window) v += cplx(n(rng), n(rng));
            const double bj = joint_ml_estimate(in).b_hat;
            rel.push_back(std::abs(blind_b_estimate(in, cfg) - bj) / bj);
        }
        std::sort(rel.begin(), rel.end());
        const double mean = std::accumulate(rel.begin(), rel.end(), 0.0) / trials;
        const double p95 = rel[static_cast<std::size_t>(0.95 * trials)];
        o.pass = o.pass && mean < 0.05 && p95 < 0.05;
        o.detail += " " + fmt(snr_db) + " dB mean " + fmt(mean, 3) + ", p95 " + fmt(p95, 3) + ", max " + fmt(rel.back(), 3) + ";";
    }
    return o;
}

// ---------------------------------------------------------------------------
// 8. CLI determinism
// ---------------------------------------------------------------------------

const char* kCliConfig = R"(receivers = mic
stage1.bursts_per_point = 4
stage1.desired_db = -4:36:8
stage1.co_gmsk_db = -10,10,30
stage1.co_osc_db = -10,10,30
stage1.adjacent_db = -10,30
stage1.scpir_db = -12,0,12
stage2.frames_per_point = 60
stage2.mean = 0:0.5:0.05
stage2.var = 0:0.05:0.01
rra.frames_per_point = 40
rra.snr_db = -10:40:5
loads = 8,20,32
drops = 4
link.sinr_db = 0,6
link.groups = 6
chanest.snr_db = 10,20
chanest.channels = 100
capacity.cases = poob,poob+hot_spot,pure_vamos+dtx
auto_generate = true
)";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli_determinism() {
    const fs::path dir = fs::temp_directory_path() / "vamos_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "run.cfg") << kCliConfig << "tables_dir = " << (dir / "tbl").string() << "\n";
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"chanest-sweep", "chanest_sweep.csv"},
        {"link-sweep", "link_sweep.csv"},
        {"net-sweep", "net_sweep.csv"},
        {"capacity-report", "capacity_report.csv"}};
    int identical = 0, failures = 0;
    for (const auto& [cmd, file] : commands) {
        std::string first;
        bool same = true;
        for (int j : {1, 2, 4}) {
            const fs::path out = dir / (cmd + std::to_string(j));
            const std::string line = std::string("\"") + VAMOS_CLI_PATH + "\" -j " + std::to_string(j) + " " + cmd +
                                     " -c \"" + (dir / "run.cfg").string() + "\" --seed 808 -o \"" + out.string() +
                                     "\" 2>/dev/null";
            const int status = std::system(line.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                ++failures;
                same = false;
                continue;
            }
            const std::string text = slurp(out / file);
            if (first.empty()) {
                first = text;
            } else if (text != first) {
                same = false;
            }
        }
        identical += same && !first.empty();
    }
    fs::remove_all(dir);
    return {identical == static_cast<int>(commands.size()) && failures == 0,
            std::to_string(identical) + "/" + std::to_string(commands.size()) +
                " subcommands byte-identical across -j 1, 2, 4; " + std::to_string(failures) + " failed runs"};
}

// ---------------------------------------------------------------------------
// 9. Noiseless exactness
// ---------------------------------------------------------------------------

template <typename Metric>
int enumeration_disagreements(const BurstContext& ctx, const EqualizerOutput& out, Metric&& path_metric) {
    double best = std::numeric_limits<double>::infinity();
    Symbols best_o, best_p;
    for_each_joint_payload(ctx, [&](const Symbols& ao, const Symbols& ap) {
        const double m = path_metric(ao, ap);
        if (m < best) {
            best = m;
            best_o = ao;
            best_p = ap;
        }
    });
    return count_errors(out.burst_o, best_o) + count_errors(*out.burst_p, best_p) +
           (std::abs(out.metric - best) > 1e-9 * std::max(1.0, best));
}

Outcome noiseless_exactness() {
    const BurstContext ctx;
    Rng rng(909);
    int errors = 0, bursts = 0;
    for (auto kind : {ReceiverKind::joint_mlse, ReceiverKind::mic, ReceiverKind::sic, ReceiverKind::vmic}) {
        for (int q = 0; q <= 3; ++q) {
            const ReceiverConfig rc = exact_config(q);
            for (double b : {0.25, 0.5, 1.0, 2.0, 4.0}) {
                for (int t = 0; t < 50; ++t) {
                    const Burst x = make_burst(ctx, q, b, 0.0, rng);
                    const auto out = receive_burst(kind, x.r, ctx, rc);
                    errors += count_errors(out.bits_o, extract_payload(ctx.layout, x.a_o));
                    if (out.bits_p) errors += count_errors(*out.bits_p, extract_payload(ctx.layout, x.a_p));
                    ++bursts;
                }
            }
        }
    }

    // Ten-symbol payloads (five per half) against exhaustive search.
    const BurstContext tiny = tiny_context(5);
    int disagreements = 0, searches = 0;
    for (int t = 0; t < 4; ++t) {
        const double b = t % 2 ? 0.7 : 1.4;
        const Burst x = make_burst(tiny, 1, b, 0.5, rng);
        const auto j = joint_mlse(x.r, x.cir.taps, b, tiny, {1, true});
        disagreements += enumeration_disagreements(tiny, j, [&](const Symbols& ao, const Symbols& ap) {
            return joint_mlse_path_metric(x.r, x.cir.taps, b, ao, ap, 1.0);
        });
        VmicConfig vc;
        vc.q_f = 2;
        vc.q_b = 2;
        const VmicFilters f = vmic_adapt(x.r, tiny, vc);
        const auto v = vmic_equalize(x.r, f, tiny, {vc.q_b, true});
        disagreements += enumeration_disagreements(tiny, v, [&](const Symbols& ao, const Symbols& ap) {
            return vmic_path_metric(x.r, f, ao, ap, 1.0);
        });
        searches += 2;
    }
    return {errors == 0 && disagreements == 0,
            std::to_string(errors) + " symbol errors over " + std::to_string(bursts) + " noiseless bursts; " +
                std::to_string(disagreements) + " disagreements in " + std::to_string(searches) +
                " exhaustive searches (10-symbol payloads)"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    app.add_option("-j,--threads", g_threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--only", only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"blocking anchors", blocking_anchors},
        {"capacity-gain methodology", capacity_methodology},
        {"channel estimation", channel_estimation},
        {"MIC orthogonality", mic_orthogonality},
        {"receiver ordering", receiver_ordering},
        {"matching exactness", matching_exactness},
        {"estimator agreement", estimator_agreement},
        {"determinism", cli_determinism},
        {"noiseless exactness", noiseless_exactness},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first
                  << "): " << o.detail << " [" << fmt(secs, 3) << " s]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
