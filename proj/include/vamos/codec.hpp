#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vamos {

using Bits = std::vector<std::uint8_t>;

/// Rate-1/3, constraint-length-5 convolutional code (generators 25, 33, 37
/// octal) with zero tail, interleaved diagonally over `n_bursts` bursts.
struct CodecConfig {
    int info_bits = 72;
    int n_bursts = 8;
    std::string label = "cc_r13_k5";

    static constexpr int kConstraint = 5;
    static constexpr int kRate = 3;

    int coded_bits() const { return (info_bits + kConstraint - 1) * kRate; }
    /// Coded bits carried by one burst (the last burst may carry fewer).
    int bits_per_burst() const { return (coded_bits() + n_bursts - 1) / n_bursts; }
    void validate() const;
};

Bits conv_encode(const Bits& info, const CodecConfig& cfg = {});

/// Hard-decision Viterbi decoding of a terminated codeword.
Bits conv_decode(const Bits& coded, const CodecConfig& cfg = {});

/// Coded bit i travels in burst i mod n_bursts at slot i / n_bursts.
struct InterleavePos {
    int burst = 0;
    int slot = 0;
};

inline InterleavePos interleave_position(int i, int n_bursts) {
    return {i % n_bursts, i / n_bursts};
}

/// Scatters coded bits into per-burst slot vectors.
std::vector<Bits> interleave(const Bits& coded, const CodecConfig& cfg);
Bits deinterleave(const std::vector<Bits>& bursts, const CodecConfig& cfg);

}  // namespace vamos
