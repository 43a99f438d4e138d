#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vamos/types.hpp"

namespace vamos {

// ---------------------------------------------------------------------------
// SCPIR / SNR algebra
// ---------------------------------------------------------------------------

/// Amplitude ratio b = sqrt(P_p / P_o) for a given SCPIR of user o.
double scpir_db_to_amplitude(double scpir_db);
double amplitude_to_scpir_db(double b);

/// 10 log10(G P sigma_a^2 / sigma_n^2).
double average_snr_db(double gain, double power, double sigma_a2, double sigma_n2);

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

/// Symbol-spaced channel impulse response of one link. `taps` is the
/// small-scale part; the composite channel is sqrt(path_gain) * taps.
struct Cir {
    CVector taps;
    int order = 0;
    double path_gain = 1.0;
    bool normalized = false;

    double energy() const { return taps.squaredNorm(); }
    CVector composite() const { return std::sqrt(path_gain) * taps; }
};

/// I.i.d. CN(0, 1/(q_h+1)) taps.
Cir generate_cir(int order, Rng& rng);

/// Scales the taps to unit energy and sets the `normalized` flag.
Cir normalized(Cir cir);

/// Single-tap identity-style channel used by tests and ideal-channel runs.
Cir make_cir(CVector taps, double path_gain = 1.0);

// ---------------------------------------------------------------------------
// Training sequences and burst layout
// ---------------------------------------------------------------------------

struct TrainingSequence {
    Symbols symbols;
    int id = 0;

    int length() const { return static_cast<int>(symbols.size()); }
};

/// The two shipped length-26 sequences: id 0 is the desired-user sequence,
/// id 1 the paired-user sequence. See tools/find_training_sequences.py.
TrainingSequence default_training_sequence(int id);

/// Reads one sequence per non-empty line, either as 0/1 characters
/// (0 -> +1) or whitespace separated +1/-1 tokens. '#' starts a comment.
std::vector<TrainingSequence> load_training_sequences(const std::string& path);

/// guard | payload | training | payload | guard. Guard symbols are known
/// (value `guard_value`) and also stand in for every symbol outside the burst.
struct BurstLayout {
    int guard = 8;
    int payload_half = 58;
    int training_length = 26;
    double guard_value = 1.0;

    int length() const { return 2 * guard + 2 * payload_half + training_length; }
    int training_offset() const { return guard + payload_half; }
    int payload_length() const { return 2 * payload_half; }
    /// Burst index of the i-th payload symbol.
    int payload_index(int i) const {
        return i < payload_half ? guard + i : guard + training_length + i;
    }
    bool is_payload(int n) const;
};

/// Assembles a full burst symbol vector from payload bits and training.
Symbols assemble_burst(const BurstLayout& layout, const TrainingSequence& tsc,
                       const Symbols& payload);

/// Draws uniform ±1 payload and assembles the burst.
Symbols random_burst(const BurstLayout& layout, const TrainingSequence& tsc, Rng& rng);

Symbols extract_payload(const BurstLayout& layout, const Symbols& burst);

// ---------------------------------------------------------------------------
// Signal model
// ---------------------------------------------------------------------------

/// Power bookkeeping of one OSC pair.
struct PairLink {
    double b = 1.0;
    double P_o = 1.0;
    double P_p = 1.0;
    double sigma_a2 = 1.0;
    double sigma_n2 = 0.0;

    static PairLink from_powers(double P_o, double P_p, double sigma_n2, double sigma_a2 = 1.0);
    static PairLink from_scpir(double scpir_db, double sigma_n2, double P_o = 1.0);
    /// Variance of the normalised noise n_o: sigma_n^2 / P_o.
    double noise_variance() const { return P_o > 0.0 ? sigma_n2 / P_o : 0.0; }
};

enum class InterferenceKind { co_gmsk, co_osc, adjacent, awgn };

const char* to_string(InterferenceKind kind);

/// One impairment acting on the normalised received signal. `power` is the
/// mean received power relative to the normalised desired signal.
/// Co-channel entries may carry their own symbols and channel; missing ones
/// are drawn from the generator at synthesis time.
struct Interferer {
    InterferenceKind kind = InterferenceKind::awgn;
    double power = 0.0;
    std::optional<Symbols> symbols;
    std::optional<Symbols> symbols_q;  // second OSC sub-channel
    std::optional<Cir> cir;
    /// Scale the interferer so its instantaneous (not mean) power equals
    /// `power`; used when tables are indexed by per-burst powers.
    bool exact_power = false;
};

using InterferenceLedger = std::vector<Interferer>;

double total_power(const InterferenceLedger& ledger);

/// r[k] = sum_kappa h[kappa] (x[k-kappa]) for k = 0 .. L+q_h-1 where x is
/// the complex symbol stream and symbols outside [0, L) take `guard`.
CVector convolve_burst(const CVector& taps, const CVector& x, cplx guard);

/// Normalised OSC received burst (desired user o, paired user p on the
/// quadrature branch) plus noise and the ledger's interference.
CVector synthesize_burst(const Symbols& a_o, const Symbols& a_p, const PairLink& link,
                         const Cir& cir, const InterferenceLedger& interference, Rng& rng,
                         double guard_value = 1.0);

/// Received record of one burst.
struct BurstFrame {
    Symbols a_o;
    Symbols a_p;
    CVector r;
    Cir cir;
    PairLink link;
    InterferenceLedger ledger;
};

// ---------------------------------------------------------------------------
// Convolution matrices
// ---------------------------------------------------------------------------

/// (N_tr - q_h) x (q_h + 1) Toeplitz matrix with [m, n] = tsc[q_h + m - n],
/// so A h is the ISI-free part of the convolution over the training window.
template <typename Scalar = double>
Matrix<Scalar> toeplitz_from_training(const TrainingSequence& tsc, int order) {
    const int n_tr = tsc.length();
    if (order < 0 || n_tr <= order) {
        throw InvalidInput("toeplitz_from_training: training length " + std::to_string(n_tr) +
                           " must exceed channel order " + std::to_string(order));
    }
    Matrix<Scalar> a(n_tr - order, order + 1);
    for (int m = 0; m < a.rows(); ++m) {
        for (int n = 0; n <= order; ++n) a(m, n) = Scalar(tsc.symbols[order + m - n]);
    }
    return a;
}

/// Paired-user variant with the quadrature factor j absorbed.
CMatrix toeplitz_paired(const TrainingSequence& tsc, int order);

}  // namespace vamos
