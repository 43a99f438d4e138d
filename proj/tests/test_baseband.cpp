#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "vamos/baseband.hpp"

using namespace vamos;

namespace {

Symbols constant_symbols(int n, double v) { return Symbols::Constant(n, v); }

// Direct convolution with the guard value outside the burst.
CVector brute_convolve(const CVector& h, const CVector& x, cplx guard) {
    const int q = static_cast<int>(h.size()) - 1;
    const int n = static_cast<int>(x.size());
    CVector r(n + q);
    for (int k = 0; k < n + q; ++k) {
        cplx acc = 0.0;
        for (int t = 0; t <= q; ++t) {
            const int idx = k - t;
            acc += h[t] * ((idx >= 0 && idx < n) ? x[idx] : guard);
        }
        r[k] = acc;
    }
    return r;
}

}  // namespace

TEST_CASE("scpir and amplitude conversions") {
    CHECK(scpir_db_to_amplitude(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(scpir_db_to_amplitude(-12.0) == doctest::Approx(3.9810717055).epsilon(1e-10));
    CHECK(scpir_db_to_amplitude(12.0) == doctest::Approx(0.2511886432).epsilon(1e-9));
    CHECK(amplitude_to_scpir_db(0.25118864315095796) == doctest::Approx(12.0).epsilon(1e-12));
    for (double s = -30.0; s <= 30.0; s += 0.37) {
        CHECK(std::abs(amplitude_to_scpir_db(scpir_db_to_amplitude(s)) - s) < 1e-10);
    }
}

TEST_CASE("average snr") {
    CHECK(average_snr_db(1.0, 1.0, 1.0, 1.0) == doctest::Approx(0.0));
    CHECK(std::abs(average_snr_db(0.5, 2.0, 1.0, 1.0)) < 1e-12);
    // 1000 mW
    CHECK(average_snr_db(1e-8, 1.0, 1.0, 1e-9) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("cir generation") {
    Rng rng(7);
    const Cir c0 = generate_cir(0, rng);
    CHECK(c0.taps.size() == 1);

    const int draws = 5000;
    RVector power = RVector::Zero(6);
    for (int i = 0; i < draws; ++i) power += generate_cir(5, rng).taps.cwiseAbs2();
    power /= draws;
    for (int t = 0; t < 6; ++t) CHECK(std::abs(power[t] - 1.0 / 6.0) < 0.05 / 6.0);

    Rng a(99), b(99);
    CHECK(generate_cir(3, a).taps == generate_cir(3, b).taps);

    const Cir n = normalized(generate_cir(4, rng));
    CHECK(n.energy() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n.normalized);
}

TEST_CASE("toeplitz training matrices") {
    TrainingSequence t3{Symbols(3), 0};
    t3.symbols << 1, -1, 1;
    const RMatrix a0 = toeplitz_from_training(t3, 0);
    RMatrix e0(3, 1);
    e0 << 1, -1, 1;
    CHECK(a0 == e0);

    TrainingSequence t4{Symbols(4), 0};
    t4.symbols << 1, 1, -1, 1;
    const RMatrix a1 = toeplitz_from_training(t4, 1);
    RMatrix e1(3, 2);
    e1 << 1, 1, -1, 1, 1, -1;
    CHECK(a1 == e1);

    CHECK_THROWS_AS(toeplitz_from_training(t3, 3), InvalidInput);

    // A h equals the convolution restricted to the ISI-free window.
    Rng rng(3);
    const TrainingSequence tsc = default_training_sequence(0);
    for (int q = 0; q <= 5; ++q) {
        const CVector h = generate_cir(q, rng).taps;
        const CVector direct = brute_convolve(h, tsc.symbols.cast<cplx>(), 0.0);
        const CVector ah = toeplitz_from_training<cplx>(tsc, q) * h;
        CHECK((ah - direct.segment(q, tsc.length() - q)).cwiseAbs().maxCoeff() < 1e-12);
        const CMatrix ap = toeplitz_paired(tsc, q);
        CHECK((ap - cplx(0, 1) * toeplitz_from_training<cplx>(tsc, q)).norm() < 1e-15);
    }
}

TEST_CASE("training sequences and burst layout") {
    const TrainingSequence t0 = default_training_sequence(0);
    const TrainingSequence t1 = default_training_sequence(1);
    CHECK(t0.length() == 26);
    CHECK(t1.length() == 26);
    CHECK(t0.symbols != t1.symbols);
    CHECK(t0.symbols.cwiseAbs().minCoeff() == 1.0);

    const BurstLayout L;
    CHECK(L.length() == 158);
    Rng rng(1);
    const Symbols burst = random_burst(L, t0, rng);
    CHECK(burst.segment(L.training_offset(), 26) == t0.symbols);
    CHECK(burst.head(L.guard) == constant_symbols(L.guard, 1.0));
    const Symbols payload = extract_payload(L, burst);
    CHECK(payload.size() == 116);
    CHECK(assemble_burst(L, t0, payload) == burst);
    for (int i = 0; i < L.payload_length(); ++i) CHECK(L.is_payload(L.payload_index(i)));
    CHECK_FALSE(L.is_payload(L.training_offset()));
}

TEST_CASE("training sequence file loading") {
    const char* path = "vamos_tsc_test.txt";
    {
        std::ofstream f(path);
        f << "# two sequences\n0110\n\n+1 -1 -1 +1  # comment\n";
    }
    const auto seqs = load_training_sequences(path);
    std::remove(path);
    REQUIRE(seqs.size() == 2);
    Symbols e(4);
    e << 1, -1, -1, 1;
    CHECK(seqs[0].symbols == e);
    CHECK(seqs[1].symbols == e);
}

TEST_CASE("synthesis on ideal channels") {
    Rng rng(5);
    const int n = 40;
    Symbols a_o(n), a_p(n);
    for (int i = 0; i < n; ++i) {
        a_o[i] = (rng() & 1) ? 1.0 : -1.0;
        a_p[i] = (rng() & 1) ? 1.0 : -1.0;
    }
    const Cir ident = make_cir(CVector::Constant(1, 1.0));

    PairLink single;
    single.b = 0.0;
    single.P_p = 0.0;
    const CVector r0 = synthesize_burst(a_o, a_p, single, ident, {}, rng);
    CHECK((r0 - a_o.cast<cplx>()).cwiseAbs().maxCoeff() == 0.0);

    for (double b : {1.0, 0.3, 2.5}) {
        PairLink link{b, 1.0, b * b, 1.0, 0.0};
        const CVector r = synthesize_burst(a_o, a_p, link, ident, {}, rng);
        CHECK((r.real() - a_o).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((r.imag() / b - a_p).cwiseAbs().maxCoeff() < 1e-14);
    }

    CVector taps(2);
    taps << 1.0, 0.5;
    PairLink half{0.5, 1.0, 0.25, 1.0, 0.0};
    const CVector r = synthesize_burst(constant_symbols(n, 1.0), constant_symbols(n, 1.0), half,
                                       make_cir(taps), {}, rng);
    CHECK(r.size() == n + 1);
    for (int k = 1; k < n; ++k) CHECK(std::abs(r[k] - 1.5 * cplx(1.0, 0.5)) < 1e-15);

    // Guard symbols extend the burst on both sides.
    CVector x = CVector::Constant(5, cplx(-1.0, 0.0));
    CHECK((convolve_burst(taps, x, 1.0) - brute_convolve(taps, x, 1.0)).norm() < 1e-15);
}

TEST_CASE("noise variance and purity") {
    const int n = 100000;
    const Symbols zeros = Symbols::Zero(n);
    const Cir ident = make_cir(CVector::Constant(1, 1.0));
    const PairLink link = PairLink::from_powers(2.0, 2.0, 0.5);
    CHECK(link.noise_variance() == doctest::Approx(0.25));
    Rng rng(17);
    const CVector r = synthesize_burst(zeros, zeros, link, ident, {}, rng, 0.0);
    const double var = r.squaredNorm() / static_cast<double>(r.size());
    CHECK(std::abs(var / 0.25 - 1.0) < 0.03);

    Rng a(4), b(4);
    const Symbols s = constant_symbols(64, -1.0);
    InterferenceLedger ledger(2);
    ledger[0].kind = InterferenceKind::co_gmsk;
    ledger[0].power = 0.3;
    ledger[1].power = 0.1;
    const Cir cir = make_cir(CVector::Constant(3, cplx(0.5, 0.1)));
    CHECK(synthesize_burst(s, s, link, cir, ledger, a) == synthesize_burst(s, s, link, cir, ledger, b));
}

TEST_CASE("interferer power") {
    const int n = 20000;
    const Symbols zeros = Symbols::Zero(n);
    const Cir ident = make_cir(CVector::Constant(1, 1.0));
    PairLink quiet{0.0, 1.0, 0.0, 1.0, 0.0};
    Rng rng(23);
    for (auto kind : {InterferenceKind::co_gmsk, InterferenceKind::co_osc, InterferenceKind::adjacent,
                      InterferenceKind::awgn}) {
        InterferenceLedger ledger(1);
        ledger[0].kind = kind;
        ledger[0].power = 0.4;
        ledger[0].exact_power = kind == InterferenceKind::co_gmsk || kind == InterferenceKind::co_osc;
        const CVector r = synthesize_burst(zeros, zeros, quiet, ident, ledger, rng, 0.0);
        const double p = r.squaredNorm() / static_cast<double>(n);
        CHECK(std::abs(p / 0.4 - 1.0) < 0.05);
    }
    InterferenceLedger two(2);
    two[0].power = 0.1;
    two[1].power = 0.2;
    CHECK(total_power(two) == doctest::Approx(0.3));
}
