#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "vamos/types.hpp"

namespace vamos {

/// Symbol codes: bit value 0 is +1, 1 is -1. Joint (two-user) symbols use
/// bit 0 for user o and bit 1 for user p, so the all-(+1) guard is code 0.
inline double code_to_symbol(std::uint64_t bit) { return bit ? -1.0 : 1.0; }
inline std::uint64_t symbol_to_code(double s) { return s < 0.0 ? 1u : 0u; }

/// Symbol at `lag` (0 = current) for user `user` from a survivor register.
template <int Bits>
inline double reg_symbol(std::uint64_t reg, int lag, int user = 0) {
    return code_to_symbol((reg >> (lag * Bits + user)) & 1u);
}

struct TrellisResult {
    std::vector<std::uint8_t> codes;  // one decided code per step
    double metric = 0.0;
};

/// Viterbi search with per-survivor processing. The trellis state is the
/// last `memory` symbols; every survivor additionally carries a register of
/// its full recent history (newest symbol in the low bits) so branch metrics
/// may depend on symbols older than the state. With memory equal to the
/// model length this is exact MLSE; shorter memories give RSSE/DFE.
///
/// `metric(n, reg)` returns the branch metric at step n for the hypothesis
/// in `reg`; `pinned(n)` returns the known code at step n or -1. Survivors
/// start from register `init_reg`. Equal metrics keep the lowest-index
/// predecessor.
template <int Bits, typename MetricFn, typename PinnedFn>
TrellisResult viterbi_psp(int memory, int steps, MetricFn&& metric, PinnedFn&& pinned,
                          std::uint64_t init_reg = 0) {
    static_assert(Bits == 1 || Bits == 2);
    constexpr int alphabet = 1 << Bits;
    if (memory < 0 || memory * Bits > 20) throw InvalidInput("viterbi_psp: unsupported memory");
    const std::size_t n_states = std::size_t{1} << (Bits * memory);
    const std::uint64_t mask = n_states - 1;
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<double> cur(n_states, inf), next(n_states);
    std::vector<std::uint64_t> reg_cur(n_states, 0), reg_next(n_states, 0);
    cur[init_reg & mask] = 0.0;
    reg_cur[init_reg & mask] = init_reg;

    const std::size_t total = static_cast<std::size_t>(std::max(steps, 0)) * n_states;
    std::vector<std::uint32_t> pred(total, 0);
    std::vector<std::uint8_t> sym(total, 0);

    for (int n = 0; n < steps; ++n) {
        std::fill(next.begin(), next.end(), inf);
        const int pin = pinned(n);
        const int x_lo = pin >= 0 ? pin : 0;
        const int x_hi = pin >= 0 ? pin : alphabet - 1;
        const std::size_t base = static_cast<std::size_t>(n) * n_states;
        for (std::size_t s = 0; s < n_states; ++s) {
            if (cur[s] == inf) continue;
            for (int x = x_lo; x <= x_hi; ++x) {
                const std::uint64_t reg = (reg_cur[s] << Bits) | static_cast<std::uint64_t>(x);
                const std::size_t ns = reg & mask;
                const double m = cur[s] + metric(n, reg);
                if (m < next[ns]) {
                    next[ns] = m;
                    reg_next[ns] = reg;
                    pred[base + ns] = static_cast<std::uint32_t>(s);
                    sym[base + ns] = static_cast<std::uint8_t>(x);
                }
            }
        }
        cur.swap(next);
        reg_cur.swap(reg_next);
    }

    TrellisResult out;
    std::size_t best = 0;
    for (std::size_t s = 1; s < n_states; ++s) {
        if (cur[s] < cur[best]) best = s;
    }
    out.metric = cur[best];
    out.codes.resize(static_cast<std::size_t>(std::max(steps, 0)));
    for (int n = steps - 1; n >= 0; --n) {
        const std::size_t idx = static_cast<std::size_t>(n) * n_states + best;
        out.codes[static_cast<std::size_t>(n)] = sym[idx];
        best = pred[idx];
    }
    return out;
}

}  // namespace vamos
