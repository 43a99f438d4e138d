#pragma once

#include <array>
#include <optional>
#include <string>

#include "vamos/baseband.hpp"
#include "vamos/chanest.hpp"

namespace vamos {

/// Framing the receiver knows: layout and both users' training sequences.
struct BurstContext {
    BurstLayout layout;
    TrainingSequence tsc_o = default_training_sequence(0);
    TrainingSequence tsc_p = default_training_sequence(1);
};

/// Trellis shape. `memory` symbols form the state (4^memory joint states,
/// 2^memory single-user states); model taps beyond it are handled by
/// per-survivor decision feedback.
struct TrellisConfig {
    int memory = 2;
    bool joint = true;

    std::size_t states() const { return std::size_t{1} << ((joint ? 2 : 1) * memory); }
};

/// Hard decisions of one burst. `bits_*` hold the payload only; `burst_*`
/// hold the full burst with known symbols filled in.
struct EqualizerOutput {
    Symbols bits_o;
    std::optional<Symbols> bits_p;
    Symbols burst_o;
    std::optional<Symbols> burst_p;
    double metric = 0.0;
};

/// Coefficient of the projection of x onto c: Re{x c*} / |c|^2.
double project_onto(cplx x, cplx c);

// ---------------------------------------------------------------------------
// Joint MLSE
// ---------------------------------------------------------------------------

/// Viterbi over the joint alphabet {±1 ± j b} with the squared-distance
/// branch metric; training and guard symbols are pinned.
EqualizerOutput joint_mlse(const CVector& r, const CVector& h_hat, double b_hat,
                           const BurstContext& ctx, const TrellisConfig& cfg);

/// Sum of joint-MLSE branch metrics of a given pair of full bursts.
double joint_mlse_path_metric(const CVector& r, const CVector& h_hat, double b_hat,
                              const Symbols& a_o, const Symbols& a_p, double guard_value);

/// Single-user MLSE (conventional GMSK equaliser, b = 0).
EqualizerOutput single_user_mlse(const CVector& r, const CVector& h_hat,
                                 const BurstContext& ctx, int memory);

// ---------------------------------------------------------------------------
// MIC
// ---------------------------------------------------------------------------

struct MicConfig {
    int q_f = 4;
    int q_b = 4;
    int k0_min = 0;
    int k0_max = -1;  // -1: q_f
    cplx c = 1.0;
    int memory = 2;
    /// Decision-directed refits over the whole burst after the first pass.
    int refine_passes = 2;
};

/// Prefilter f, strictly causal real feedback filter b_fb (b_fb[0] = 0) and
/// decision delay k0 of one MIC branch.
struct MicFilters {
    CVector f;
    RVector b_fb;
    int k0 = 0;
    cplx c = 1.0;
    double residual = 0.0;  // training-window squared error
    bool regularized = false;
};

/// Least-squares adaptation on the training window of `tsc` (the target
/// user's sequence); k0 swept over [k0_min, k0_max].
MicFilters mic_adapt(const CVector& r, const TrainingSequence& tsc, const BurstLayout& layout,
                     const MicConfig& cfg);

/// Refit over the whole burst using decided (or known) symbols of the
/// target user in `burst`.
MicFilters mic_adapt_decided(const CVector& r, const Symbols& burst, const BurstLayout& layout,
                             const MicConfig& cfg);

/// y[k] = P_c{ sum_kappa f[kappa] r[k - kappa] } with r[k < 0] = 0.
RVector mic_filter_output(const CVector& r, const CVector& f, cplx c);

/// Real-valued trellis over y[n + k0] = a[n] + sum b_fb[kappa] a[n - kappa].
/// `tsc` pins the training symbols of the target user.
EqualizerOutput mic_equalize(const CVector& r, const MicFilters& filters,
                             const TrainingSequence& tsc, const BurstLayout& layout,
                             int memory);

/// Training adaptation, equalisation and `cfg.refine_passes` decision-directed
/// refits for the user whose training is `tsc`.
EqualizerOutput mic_receive(const CVector& r, const TrainingSequence& tsc,
                            const BurstLayout& layout, const MicConfig& cfg);

/// Ideal MIC for a single-tap channel h0: f = conj(h0) / |h0|^2, no
/// feedback; removes the quadrature user exactly.
MicFilters mic_filters_for_single_tap(cplx h0);

// ---------------------------------------------------------------------------
// SIC
// ---------------------------------------------------------------------------

struct SicResult {
    EqualizerOutput out;
    bool cancelled = false;
    CVector r_cancelled;  // empty when the threshold branch skipped SIC
};

/// MIC with successive cancellation of user p when b_hat >= b0.
SicResult sic_receive(const CVector& r, const CVector& h_hat, double b_hat, double b0,
                      const BurstContext& ctx, const MicConfig& mic_cfg);

// ---------------------------------------------------------------------------
// V-MIC
// ---------------------------------------------------------------------------

struct VmicConfig {
    int q_f = 4;
    int q_b = 4;
    int k0_min = 0;
    int k0_max = -1;  // -1: q_f
    cplx c = 1.0;
    int memory = 2;
    int refine_passes = 1;
};

/// Two prefilter/projection branches and the 2x2 feedback model
/// B = [[1 + B_oo, B_op], [B_po, 1 + B_pp]]; B[i][j] holds taps 0..q_b with
/// the diagonal tap 0 fixed to zero.
struct VmicFilters {
    CVector f_o;
    CVector f_p;
    std::array<std::array<RVector, 2>, 2> B;
    int k0 = 0;
    cplx c = 1.0;
    double residual_o = 0.0;
    double residual_p = 0.0;
    bool regularized = false;
};

VmicFilters vmic_adapt(const CVector& r, const BurstContext& ctx, const VmicConfig& cfg);

VmicFilters vmic_adapt_decided(const CVector& r, const Symbols& burst_o, const Symbols& burst_p,
                               const BurstLayout& layout, const VmicConfig& cfg);

/// Joint two-user sequence estimation on u = B * a + e.
EqualizerOutput vmic_equalize(const CVector& r, const VmicFilters& filters,
                              const BurstContext& ctx, const TrellisConfig& cfg);

/// vmic_adapt + vmic_equalize with `cfg.refine_passes` decision-directed refits.
EqualizerOutput vmic_receive(const CVector& r, const BurstContext& ctx, const VmicConfig& cfg);

/// Sum over trellis steps of the per-branch squared errors for given bursts.
double vmic_path_metric(const CVector& r, const VmicFilters& filters, const Symbols& a_o,
                        const Symbols& a_p, double guard_value);

// ---------------------------------------------------------------------------
// Receiver front-end
// ---------------------------------------------------------------------------

enum class ReceiverKind { joint_mlse, mic, sic, vmic, ceq };

const char* to_string(ReceiverKind kind);
ReceiverKind receiver_from_string(const std::string& name);

struct ReceiverConfig {
    int order = 2;  // channel order assumed by estimation-based receivers
    int mlse_memory = 2;
    double b0 = 1.0;
    JointMlConfig estimation;
    MicConfig mic;
    VmicConfig vmic;
};

/// Full receive chain for one burst: estimation/adaptation then detection.
/// Bursts without a paired user (`paired == false`) are received by the
/// single-user fallback of each receiver (MIC for mic/sic/vmic, the
/// conventional equaliser for joint_mlse/ceq).
EqualizerOutput receive_burst(ReceiverKind kind, const CVector& r, const BurstContext& ctx,
                              const ReceiverConfig& cfg, bool paired = true);

}  // namespace vamos
