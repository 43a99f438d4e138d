#include "vamos/codec.hpp"

#include <array>
#include <bit>
#include <limits>

#include "vamos/types.hpp"

namespace vamos {

namespace {

constexpr std::array<unsigned, CodecConfig::kRate> kGenerators = {025, 033, 037};
constexpr int kMemory = CodecConfig::kConstraint - 1;
constexpr unsigned kStates = 1u << kMemory;

/// Output triple for input `u` entering a register holding `state` (newest
/// past bit in the most significant state bit).
std::array<std::uint8_t, 3> branch_output(unsigned state, unsigned u) {
    const unsigned reg = (u << kMemory) | state;
    std::array<std::uint8_t, 3> out{};
    for (int g = 0; g < CodecConfig::kRate; ++g) {
        out[g] = static_cast<std::uint8_t>(std::popcount(reg & kGenerators[g]) & 1);
    }
    return out;
}

unsigned next_state(unsigned state, unsigned u) { return ((u << kMemory) | state) >> 1; }

}  // namespace

void CodecConfig::validate() const {
    if (info_bits < 1) throw InvalidInput("codec: info_bits must be positive");
    if (n_bursts < 1) throw InvalidInput("codec: n_bursts must be positive");
}

Bits conv_encode(const Bits& info, const CodecConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(info.size()) != cfg.info_bits) {
        throw InvalidInput("conv_encode: expected " + std::to_string(cfg.info_bits) + " bits, got " +
                           std::to_string(info.size()));
    }
    Bits out;
    out.reserve(static_cast<std::size_t>(cfg.coded_bits()));
    unsigned state = 0;
    for (int i = 0; i < cfg.info_bits + kMemory; ++i) {
        const unsigned u = i < cfg.info_bits ? (info[static_cast<std::size_t>(i)] & 1u) : 0u;
        for (auto bit : branch_output(state, u)) out.push_back(bit);
        state = next_state(state, u);
    }
    return out;
}

Bits conv_decode(const Bits& coded, const CodecConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(coded.size()) != cfg.coded_bits()) {
        throw InvalidInput("conv_decode: expected " + std::to_string(cfg.coded_bits()) +
                           " coded bits, got " + std::to_string(coded.size()));
    }
    // Packed output triple for (state, input).
    static const auto table = [] {
        std::array<std::array<unsigned, 2>, kStates> t{};
        for (unsigned st = 0; st < kStates; ++st) {
            for (unsigned u = 0; u < 2; ++u) {
                const auto out = branch_output(st, u);
                t[st][u] = out[0] | (out[1] << 1) | (out[2] << 2);
            }
        }
        return t;
    }();

    constexpr std::array<int, 8> weight = {0, 1, 1, 2, 1, 2, 2, 3};
    const int steps = cfg.info_bits + kMemory;
    constexpr int inf = std::numeric_limits<int>::max() / 2;
    std::array<int, kStates> metric{};
    metric.fill(inf);
    metric[0] = 0;
    // Survivor of state ns came from ((ns << 1) & mask) | d with input ns >> (kMemory - 1).
    std::vector<std::uint8_t> decision(static_cast<std::size_t>(steps) * kStates, 0);

    for (int n = 0; n < steps; ++n) {
        const std::uint8_t* rx = &coded[static_cast<std::size_t>(n) * CodecConfig::kRate];
        const unsigned r = (rx[0] & 1u) | ((rx[1] & 1u) << 1) | ((rx[2] & 1u) << 2);
        const bool tail = n >= cfg.info_bits;
        std::array<int, kStates> next{};
        std::uint8_t* dec = &decision[static_cast<std::size_t>(n) * kStates];
        for (unsigned ns = 0; ns < kStates; ++ns) {
            const unsigned u = ns >> (kMemory - 1);
            if (tail && u) {
                next[ns] = inf;
                continue;
            }
            const unsigned s0 = (ns << 1) & (kStates - 1);
            const unsigned s1 = s0 | 1u;
            const int m0 = metric[s0] + weight[table[s0][u] ^ r];
            const int m1 = metric[s1] + weight[table[s1][u] ^ r];
            if (m1 < m0) {
                next[ns] = std::min(m1, inf);
                dec[ns] = 1;
            } else {
                next[ns] = std::min(m0, inf);
            }
        }
        metric = next;
    }
    Bits info(static_cast<std::size_t>(cfg.info_bits));
    unsigned st = 0;  // terminated in the zero state
    for (int n = steps - 1; n >= 0; --n) {
        if (n < cfg.info_bits) info[static_cast<std::size_t>(n)] = static_cast<std::uint8_t>(st >> (kMemory - 1));
        st = ((st << 1) & (kStates - 1)) | decision[static_cast<std::size_t>(n) * kStates + st];
    }
    return info;
}

std::vector<Bits> interleave(const Bits& coded, const CodecConfig& cfg) {
    cfg.validate();
    std::vector<Bits> bursts(static_cast<std::size_t>(cfg.n_bursts));
    for (std::size_t i = 0; i < coded.size(); ++i) {
        const auto pos = interleave_position(static_cast<int>(i), cfg.n_bursts);
        auto& b = bursts[static_cast<std::size_t>(pos.burst)];
        if (static_cast<int>(b.size()) <= pos.slot) b.resize(static_cast<std::size_t>(pos.slot) + 1);
        b[static_cast<std::size_t>(pos.slot)] = coded[i];
    }
    return bursts;
}

Bits deinterleave(const std::vector<Bits>& bursts, const CodecConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(bursts.size()) != cfg.n_bursts) {
        throw InvalidInput("deinterleave: expected " + std::to_string(cfg.n_bursts) + " bursts");
    }
    Bits coded(static_cast<std::size_t>(cfg.coded_bits()));
    for (std::size_t i = 0; i < coded.size(); ++i) {
        const auto pos = interleave_position(static_cast<int>(i), cfg.n_bursts);
        const auto& b = bursts[static_cast<std::size_t>(pos.burst)];
        if (static_cast<int>(b.size()) <= pos.slot) throw InvalidInput("deinterleave: burst too short");
        coded[i] = b[static_cast<std::size_t>(pos.slot)];
    }
    return coded;
}

}  // namespace vamos
