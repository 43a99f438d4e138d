#include "vamos/baseband.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace vamos {

namespace {

// Chosen by tools/find_training_sequences.py (pool seed 2012); '0' -> +1.
constexpr const char* kDefaultTsc[2] = {
    "11011001111110001001010110",
    "10001110000010010100010011",
};

Symbols parse_bit_string(const std::string& bits) {
    Symbols s(static_cast<Eigen::Index>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1') {
            throw InvalidInput("training sequence: unexpected character '" +
                               std::string(1, bits[i]) + "'");
        }
        s[static_cast<Eigen::Index>(i)] = bits[i] == '0' ? 1.0 : -1.0;
    }
    return s;
}

void add_complex_noise(CVector& r, double variance, Rng& rng) {
    if (variance <= 0.0) return;
    std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
    for (auto& x : r) x += cplx(gauss(rng), gauss(rng));
}

Symbols random_symbols(Eigen::Index n, Rng& rng) {
    std::bernoulli_distribution bit(0.5);
    Symbols s(n);
    for (auto& x : s) x = bit(rng) ? -1.0 : 1.0;
    return s;
}

}  // namespace

double scpir_db_to_amplitude(double scpir_db) {
    if (!std::isfinite(scpir_db)) throw InvalidInput("scpir_db_to_amplitude: non-finite SCPIR");
    return std::pow(10.0, -scpir_db / 20.0);
}

double amplitude_to_scpir_db(double b) {
    if (!(b > 0.0)) throw InvalidInput("amplitude_to_scpir_db: b must be positive");
    return -20.0 * std::log10(b);
}

double average_snr_db(double gain, double power, double sigma_a2, double sigma_n2) {
    if (!(gain > 0.0 && power > 0.0 && sigma_a2 > 0.0 && sigma_n2 > 0.0)) {
        throw InvalidInput("average_snr_db: all inputs must be positive");
    }
    return 10.0 * std::log10(gain * power * sigma_a2 / sigma_n2);
}

Cir generate_cir(int order, Rng& rng) {
    if (order < 0) throw InvalidInput("generate_cir: negative channel order");
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 / (order + 1)));
    Cir cir;
    cir.order = order;
    cir.taps.resize(order + 1);
    for (auto& t : cir.taps) {
        const double re = gauss(rng);
        t = cplx(re, gauss(rng));
    }
    return cir;
}

Cir normalized(Cir cir) {
    const double e = cir.energy();
    if (e > 0.0) cir.taps /= std::sqrt(e);
    cir.normalized = true;
    return cir;
}

Cir make_cir(CVector taps, double path_gain) {
    Cir cir;
    cir.order = static_cast<int>(taps.size()) - 1;
    cir.taps = std::move(taps);
    cir.path_gain = path_gain;
    return cir;
}

TrainingSequence default_training_sequence(int id) {
    if (id < 0 || id > 1) throw InvalidInput("default_training_sequence: id must be 0 or 1");
    return {parse_bit_string(kDefaultTsc[id]), id};
}

std::vector<TrainingSequence> load_training_sequences(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open training sequence file '" + path + "'");
    std::vector<TrainingSequence> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::vector<std::string> parts;
        for (std::string t; tokens >> t;) parts.push_back(t);
        if (parts.empty()) continue;
        TrainingSequence tsc;
        tsc.id = static_cast<int>(out.size());
        if (parts.size() == 1 && parts[0].find_first_not_of("01") == std::string::npos) {
            tsc.symbols = parse_bit_string(parts[0]);
        } else {
            tsc.symbols.resize(static_cast<Eigen::Index>(parts.size()));
            for (std::size_t i = 0; i < parts.size(); ++i) {
                const double v = std::stod(parts[i]);
                if (v != 1.0 && v != -1.0) {
                    throw InvalidInput("training sequence entries must be +1 or -1, got '" +
                                       parts[i] + "'");
                }
                tsc.symbols[static_cast<Eigen::Index>(i)] = v;
            }
        }
        out.push_back(std::move(tsc));
    }
    return out;
}

bool BurstLayout::is_payload(int n) const {
    const int t0 = training_offset();
    return (n >= guard && n < t0) || (n >= t0 + training_length && n < length() - guard);
}

Symbols assemble_burst(const BurstLayout& layout, const TrainingSequence& tsc,
                       const Symbols& payload) {
    if (tsc.length() != layout.training_length) {
        throw InvalidInput("assemble_burst: training length does not match layout");
    }
    if (payload.size() != layout.payload_length()) {
        throw InvalidInput("assemble_burst: payload length does not match layout");
    }
    Symbols s = Symbols::Constant(layout.length(), layout.guard_value);
    s.segment(layout.guard, layout.payload_half) = payload.head(layout.payload_half);
    s.segment(layout.training_offset(), layout.training_length) = tsc.symbols;
    s.segment(layout.training_offset() + layout.training_length, layout.payload_half) =
        payload.tail(layout.payload_half);
    return s;
}

Symbols random_burst(const BurstLayout& layout, const TrainingSequence& tsc, Rng& rng) {
    return assemble_burst(layout, tsc, random_symbols(layout.payload_length(), rng));
}

Symbols extract_payload(const BurstLayout& layout, const Symbols& burst) {
    Symbols p(layout.payload_length());
    for (int i = 0; i < p.size(); ++i) p[i] = burst[layout.payload_index(i)];
    return p;
}

PairLink PairLink::from_powers(double P_o, double P_p, double sigma_n2, double sigma_a2) {
    if (P_o < 0.0 || P_p < 0.0 || sigma_n2 < 0.0) throw InvalidInput("PairLink: negative power");
    PairLink l;
    l.P_o = P_o;
    l.P_p = P_p;
    l.sigma_n2 = sigma_n2;
    l.sigma_a2 = sigma_a2;
    l.b = P_o > 0.0 ? std::sqrt(P_p / P_o) : 0.0;
    return l;
}

PairLink PairLink::from_scpir(double scpir_db, double sigma_n2, double P_o) {
    const double b = scpir_db_to_amplitude(scpir_db);
    return from_powers(P_o, P_o * b * b, sigma_n2);
}

const char* to_string(InterferenceKind kind) {
    switch (kind) {
        case InterferenceKind::co_gmsk: return "co_gmsk";
        case InterferenceKind::co_osc: return "co_osc";
        case InterferenceKind::adjacent: return "adjacent";
        case InterferenceKind::awgn: return "awgn";
    }
    return "?";
}

double total_power(const InterferenceLedger& ledger) {
    double p = 0.0;
    for (const auto& e : ledger) p += e.power;
    return p;
}

CVector convolve_burst(const CVector& taps, const CVector& x, cplx guard) {
    const Eigen::Index q = taps.size() - 1;
    const Eigen::Index len = x.size();
    CVector r(len + q);
    for (Eigen::Index k = 0; k < len + q; ++k) {
        cplx acc = 0.0;
        for (Eigen::Index kappa = 0; kappa <= q; ++kappa) {
            const Eigen::Index n = k - kappa;
            acc += taps[kappa] * ((n >= 0 && n < len) ? x[n] : guard);
        }
        r[k] = acc;
    }
    return r;
}

CVector synthesize_burst(const Symbols& a_o, const Symbols& a_p, const PairLink& link,
                         const Cir& cir, const InterferenceLedger& interference, Rng& rng,
                         double guard_value) {
    if (a_o.size() != a_p.size()) {
        throw InvalidInput("synthesize_burst: a_o has " + std::to_string(a_o.size()) +
                           " symbols but a_p has " + std::to_string(a_p.size()));
    }
    const Eigen::Index len = a_o.size();
    const cplx j(0.0, 1.0);
    const CVector x = a_o.cast<cplx>() + j * link.b * a_p.cast<cplx>();
    const cplx guard = cplx(guard_value, link.b * guard_value);
    CVector r = convolve_burst(cir.composite(), x, guard);
    const Eigen::Index n_out = r.size();

    add_complex_noise(r, link.noise_variance(), rng);

    for (const auto& e : interference) {
        if (e.power < 0.0) throw InvalidInput("synthesize_burst: negative interferer power");
        if (e.power == 0.0) continue;
        switch (e.kind) {
            case InterferenceKind::awgn:
            case InterferenceKind::adjacent:
                add_complex_noise(r, e.power, rng);
                break;
            case InterferenceKind::co_gmsk:
            case InterferenceKind::co_osc: {
                const bool osc = e.kind == InterferenceKind::co_osc;
                const Cir icir = e.cir ? *e.cir : generate_cir(cir.order, rng);
                const Symbols s_i = e.symbols ? *e.symbols : random_symbols(len, rng);
                CVector xi = s_i.cast<cplx>();
                cplx iguard = guard_value;
                if (osc) {
                    const Symbols s_q = e.symbols_q ? *e.symbols_q : random_symbols(len, rng);
                    xi += j * s_q.cast<cplx>();
                    iguard = cplx(guard_value, guard_value);
                }
                CVector ri = convolve_burst(icir.composite(), xi, iguard);
                double scale = e.power / (osc ? 2.0 : 1.0);
                if (e.exact_power) {
                    const double inst = ri.squaredNorm() / static_cast<double>(ri.size());
                    if (inst > 0.0) scale = e.power / inst;
                }
                const Eigen::Index n = std::min(n_out, ri.size());
                r.head(n) += std::sqrt(scale) * ri.head(n);
                break;
            }
        }
    }
    return r;
}

CMatrix toeplitz_paired(const TrainingSequence& tsc, int order) {
    return cplx(0.0, 1.0) * toeplitz_from_training<cplx>(tsc, order);
}

}  // namespace vamos
