#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "vamos/linkmap.hpp"

using namespace vamos;

namespace {

Bits random_info(int n, Rng& rng) {
    Bits b(static_cast<std::size_t>(n));
    for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
    return b;
}

// Shift-register encoder: output g at time t is the parity of the taps of
// generator g over u[t], u[t-1], ..., u[t-4] (most significant bit first).
Bits reference_encode(const Bits& info) {
    const unsigned gens[3] = {025, 033, 037};
    Bits u = info;
    u.insert(u.end(), 4, 0);
    Bits out;
    for (std::size_t t = 0; t < u.size(); ++t) {
        for (unsigned g : gens) {
            unsigned acc = 0;
            for (int k = 0; k < 5; ++k) {
                if ((g >> (4 - k)) & 1u) acc ^= (t >= static_cast<std::size_t>(k)) ? u[t - k] : 0u;
            }
            out.push_back(static_cast<std::uint8_t>(acc));
        }
    }
    return out;
}

// Closed-form isotonic regression: max over left ends of min over right ends
// of block means.
std::vector<double> isotonic_oracle(const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -1e300;
        for (std::size_t j = 0; j <= i; ++j) {
            double lo = 1e300;
            for (std::size_t k = i; k < n; ++k) {
                const double m = std::accumulate(y.begin() + static_cast<long>(j), y.begin() + static_cast<long>(k) + 1, 0.0) /
                                 static_cast<double>(k - j + 1);
                lo = std::min(lo, m);
            }
            best = std::max(best, lo);
        }
        out[i] = best;
    }
    return out;
}

GridTable random_table(Rng& rng) {
    std::vector<Axis> axes = {{"a", {0.0, 1.0, 2.5}}, {"b", {-3.0, 0.0}}, {"c", {1.0, 2.0, 4.0, 8.0}}};
    GridTable t(TableType::stage1, axes, "mic", "test");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : t.values()) v = u(rng);
    t.meta()["k"] = "v";
    return t;
}

}  // namespace

TEST_CASE("codec geometry") {
    const CodecConfig c;
    CHECK(c.coded_bits() == 228);
    CHECK(c.bits_per_burst() == 29);
    CHECK(interleave_position(0, 8).burst == 0);
    CHECK(interleave_position(13, 8).burst == 5);
    CHECK(interleave_position(13, 8).slot == 1);
    CHECK(frames_per_group(c, BurstLayout{}) == 4);
    CodecConfig bad;
    bad.info_bits = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("encoder matches the shift-register definition") {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const Bits info = random_info(72, rng);
        CHECK(conv_encode(info) == reference_encode(info));
    }
    CHECK_THROWS_AS(conv_encode(Bits(10, 0)), InvalidInput);
}

TEST_CASE("decoder corrects sparse errors") {
    Rng rng(2);
    const CodecConfig c;
    for (int t = 0; t < 200; ++t) {
        const Bits info = random_info(72, rng);
        Bits coded = conv_encode(info);
        CHECK(conv_decode(coded) == info);
        // Free distance 12: any 5 errors are correctable; spread them out.
        for (int e = 0; e < 5; ++e) coded[static_cast<std::size_t>((t + 45 * e) % 228)] ^= 1u;
        CHECK(conv_decode(coded) == info);
    }
}

TEST_CASE("decoder returns the closest codeword") {
    // With heavy noise the decision must be at least as close to the
    // received word as the transmitted codeword.
    Rng rng(3);
    std::bernoulli_distribution flip(0.12);
    for (int t = 0; t < 200; ++t) {
        const Bits info = random_info(72, rng);
        const Bits sent = conv_encode(info);
        Bits rx = sent;
        for (auto& b : rx) b ^= static_cast<std::uint8_t>(flip(rng));
        const Bits dec = conv_decode(rx);
        const Bits re = conv_encode(dec);
        int d_dec = 0, d_sent = 0;
        for (std::size_t i = 0; i < rx.size(); ++i) {
            d_dec += re[i] != rx[i];
            d_sent += sent[i] != rx[i];
        }
        CHECK(d_dec <= d_sent);
    }
}

TEST_CASE("interleaver round trip") {
    Rng rng(4);
    const CodecConfig c;
    const Bits coded = conv_encode(random_info(72, rng));
    const auto bursts = interleave(coded, c);
    REQUIRE(bursts.size() == 8);
    for (std::size_t i = 0; i < coded.size(); ++i) {
        const auto pos = interleave_position(static_cast<int>(i), 8);
        CHECK(bursts[static_cast<std::size_t>(pos.burst)][static_cast<std::size_t>(pos.slot)] == coded[i]);
    }
    CHECK(deinterleave(bursts, c) == coded);
}

TEST_CASE("grid axes") {
    const auto g = linspace_step(-4.0, 36.0, 4.0);
    CHECK(g.size() == 11);
    CHECK(g.back() == 36.0);
    CHECK(linspace_step(0.0, 0.5, 0.01).size() == 51);
    CHECK_THROWS_AS(linspace_step(1.0, 0.0, 0.1), InvalidInput);
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("interpolation") {
    Rng rng(5);
    const GridTable t = random_table(rng);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        const auto idx = t.unflatten(flat);
        CHECK(t.flat_index(idx) == flat);
        std::vector<double> p;
        for (std::size_t d = 0; d < t.dims(); ++d) p.push_back(t.axis(d).points[idx[d]]);
        CHECK(t.interpolate(p) == t.values()[flat]);
    }
    // Midpoint along one axis.
    CHECK(t.interpolate({0.5, 0.0, 2.0}) ==
          doctest::Approx(0.5 * (t.at({0, 1, 1}) + t.at({1, 1, 1}))).epsilon(1e-14));

    std::uniform_real_distribution<double> ua(0.0, 2.5), ub(-3.0, 0.0), uc(1.0, 8.0);
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> p = {ua(rng), ub(rng), uc(rng)};
        double lo = 1e300, hi = -1e300;
        std::vector<std::size_t> base(3);
        for (std::size_t d = 0; d < 3; ++d) {
            const auto& pts = t.axis(d).points;
            base[d] = static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), p[d]) - pts.begin());
            base[d] = std::clamp<std::size_t>(base[d], 1, pts.size() - 1) - 1;
        }
        for (int corner = 0; corner < 8; ++corner) {
            std::vector<std::size_t> idx = base;
            for (std::size_t d = 0; d < 3; ++d) idx[d] += (corner >> d) & 1;
            lo = std::min(lo, t.at(idx));
            hi = std::max(hi, t.at(idx));
        }
        const double v = t.interpolate(p);
        CHECK(v >= lo - 1e-15);
        CHECK(v <= hi + 1e-15);
    }
    // Clamping outside the axes.
    CHECK(t.interpolate({-10.0, -30.0, 0.0}) == t.at({0, 0, 0}));
    CHECK(t.interpolate({10.0, 30.0, 100.0}) == t.at({2, 1, 3}));
}

TEST_CASE("table serialisation") {
    Rng rng(6);
    const GridTable t = random_table(rng);
    std::stringstream ss;
    t.write(ss);
    const GridTable back = GridTable::read(ss);
    CHECK(back == t);
    CHECK(back.values() == t.values());

    const char* path = "vamos_table_test.tbl";
    t.save(path);
    CHECK(GridTable::load(path) == t);
    std::remove(path);

    std::stringstream garbage("not a table");
    CHECK_THROWS(GridTable::read(garbage));

    GridTable bad = t;
    bad.values()[0] = 2.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);

    std::ostringstream csv;
    t.write_csv(csv);
    const std::string text = csv.str();
    // Comment line, header, one row per cell.
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(t.size()) + 2);
    CHECK(text.rfind("# ", 0) == 0);
}

TEST_CASE("pool adjacent violators") {
    Rng rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> y(static_cast<std::size_t>(1 + t % 12));
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.2 * static_cast<double>(i) + g(rng);
        const auto fit = isotonic_increasing(y);
        const auto ref = isotonic_oracle(y);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(fit[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        const auto dec = isotonic_decreasing(y);
        CHECK(std::is_sorted(dec.rbegin(), dec.rend()));
    }
    const std::vector<double> mono = {0.1, 0.2, 0.2, 0.9};
    CHECK(isotonic_increasing(mono) == mono);
}

TEST_CASE("two-point burst BER distribution") {
    for (double mean : {0.0, 0.01, 0.1, 0.3, 0.5, 0.9}) {
        for (double var : {0.0, 0.0001, 0.005, 0.02, 0.05}) {
            if (!stage2_feasible(mean, var)) {
                CHECK_THROWS_AS(two_point_distribution(mean, var), InvalidInput);
                continue;
            }
            const TwoPoint d = two_point_distribution(mean, var);
            const double m = d.lo + d.p_hi * (d.hi - d.lo);
            const double v = d.p_hi * (1.0 - d.p_hi) * (d.hi - d.lo) * (d.hi - d.lo);
            CHECK(d.lo >= 0.0);
            CHECK(d.hi <= 1.0);
            CHECK(m == doctest::Approx(mean).epsilon(1e-12));
            if (d.lo > 0.0 && d.hi < 1.0) CHECK(v == doctest::Approx(var).epsilon(1e-12));
        }
    }
}

TEST_CASE("stage-2 table") {
    Stage2Config cfg;
    cfg.frames_per_point = 300;
    cfg.mean_grid = linspace_step(0.0, 0.5, 0.05);
    cfg.var_grid = linspace_step(0.0, 0.05, 0.01);
    const GridTable t = generate_stage2_table(cfg);
    t.validate();
    CHECK(t.at({0, 0}) == 0.0);
    CHECK(t.at({10, 0}) >= 0.99);
    for (std::size_t i = 1; i < cfg.mean_grid.size(); ++i) CHECK(t.at({i, 0}) >= t.at({i - 1, 0}));

    CHECK(frame_fer(t, std::vector<double>(8, 0.0)) == 0.0);
    CHECK(frame_fer(t, std::vector<double>(8, 0.5)) >= 0.99);
    const double a = frame_fer(t, {0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1});
    const double b = frame_fer(t, {0.0, 0.2, 0.0, 0.2, 0.0, 0.2, 0.0, 0.2});
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    CHECK_THROWS_AS(frame_fer(t, {}), InvalidInput);

    cfg.threads = 3;
    CHECK(generate_stage2_table(cfg) == t);
}

TEST_CASE("stage-1 raw BER corners") {
    Stage1Config cfg;
    cfg.bursts_per_point = 30;
    Stage1Point clean;
    clean.desired_db = 36.0;
    CHECK(simulate_raw_ber(cfg, clean, 1) < 1e-3);

    Stage1Point bad;
    bad.desired_db = -4.0;
    bad.co_gmsk_db = 30.0;
    bad.co_osc_db = 30.0;
    bad.adjacent_db = 30.0;
    const double ber = simulate_raw_ber(cfg, bad, 2);
    CHECK(ber >= 0.3);
    CHECK(ber <= 0.5 + 0.05);

    cfg.paired = false;
    CHECK(simulate_raw_ber(cfg, clean, 1) < 1e-3);
}

TEST_CASE("stage-1 table generation") {
    Stage1Config cfg;
    cfg.bursts_per_point = 4;
    cfg.grids.desired_db = {0.0, 12.0, 24.0};
    cfg.grids.co_gmsk_db = {-10.0, 20.0};
    cfg.grids.co_osc_db = {-10.0};
    cfg.grids.adjacent_db = {-10.0};
    cfg.grids.scpir_db = {-6.0, 6.0};
    const GridTable t = generate_stage1_table(cfg);
    CHECK(t.type() == TableType::stage1);
    CHECK(t.dims() == 5);
    CHECK(t.size() == 12);
    t.validate();
    for (std::size_t g = 0; g < 2; ++g) {
        for (std::size_t s = 0; s < 2; ++s) {
            CHECK(t.at({1, g, 0, 0, s}) <= t.at({0, g, 0, 0, s}));
            CHECK(t.at({2, g, 0, 0, s}) <= t.at({1, g, 0, 0, s}));
        }
    }
    cfg.threads = 2;
    std::stringstream a, b;
    t.write(a);
    generate_stage1_table(cfg).write(b);
    CHECK(a.str() == b.str());

    Stage1Point p;
    p.desired_db = 6.0;
    p.co_gmsk_db = 20.0;
    p.scpir_db = 6.0;
    CHECK(lookup_raw_ber(t, p) == doctest::Approx(0.5 * (t.at({0, 1, 0, 0, 1}) + t.at({1, 1, 0, 0, 1}))));

    cfg.paired = false;
    const GridTable single = generate_stage1_table(cfg);
    CHECK(single.type() == TableType::single);
    CHECK(single.axis(ax_scpir).size() == 1);
}

TEST_CASE("link frames") {
    LinkRunConfig cfg;
    cfg.snr_db = 40.0;
    const LinkFrameStats st = run_link_frames(cfg, 5, 9);
    CHECK(st.frames == 20);
    CHECK(st.bits == 5u * 8u * 116u);
    CHECK(st.burst_bers.size() == 40);
    CHECK(st.frame_burst_bers.size() == 20);
    CHECK(st.frame_errors == 0);

    const LinkFrameStats again = run_link_frames(cfg, 5, 9);
    CHECK(again.burst_bers == st.burst_bers);
}

TEST_CASE("mapped FER tracks simulated FER") {
    Stage2Config s2;
    s2.frames_per_point = 400;
    const GridTable stage2 = generate_stage2_table(s2);

    LinkRunConfig cfg;
    cfg.receiver = ReceiverKind::mic;
    cfg.snr_db = 40.0;
    Interferer co;
    co.kind = InterferenceKind::co_gmsk;
    co.power = std::pow(10.0, -0.6);
    cfg.ledger = {co};
    const LinkFrameStats st = run_link_frames(cfg, 50, 10);
    REQUIRE(st.frames == 200);
    double mapped = 0.0;
    for (const auto& bers : st.frame_burst_bers) mapped += frame_fer(stage2, bers);
    mapped /= static_cast<double>(st.frames);
    const double simulated = static_cast<double>(st.frame_errors) / static_cast<double>(st.frames);
    MESSAGE("mapped FER " << mapped << " simulated " << simulated);
    CHECK(simulated > 0.0);
    CHECK(std::abs(mapped - simulated) < 0.05);
}
