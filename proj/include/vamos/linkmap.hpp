#pragma once

#include <cstdint>
#include <vector>

#include "vamos/codec.hpp"
#include "vamos/equalize.hpp"
#include "vamos/grid_table.hpp"

namespace vamos {

// ---------------------------------------------------------------------------
// Stage 1: per-burst raw BER
// ---------------------------------------------------------------------------

/// Coordinates of one burst in the raw-BER table. Powers are in dB over
/// the thermal noise; `desired_db` is user o's instantaneous received power
/// including small-scale fading.
struct Stage1Point {
    double desired_db = 0.0;
    double co_gmsk_db = -10.0;
    double co_osc_db = -10.0;
    double adjacent_db = -10.0;
    double scpir_db = 0.0;
};

enum Stage1Axis : std::size_t { ax_desired = 0, ax_co_gmsk, ax_co_osc, ax_adjacent, ax_scpir };

struct Stage1Grids {
    std::vector<double> desired_db = linspace_step(-4.0, 36.0, 4.0);
    std::vector<double> co_gmsk_db = {-10.0, 0.0, 10.0, 20.0, 30.0};
    std::vector<double> co_osc_db = {-10.0, 0.0, 10.0, 20.0, 30.0};
    std::vector<double> adjacent_db = {-10.0, 10.0, 30.0};
    std::vector<double> scpir_db = {-12.0, -6.0, 0.0, 6.0, 12.0};

    std::vector<Axis> axes() const;
};

struct Stage1Config {
    ReceiverKind receiver = ReceiverKind::mic;
    Stage1Grids grids;
    int bursts_per_point = 40;
    int channel_order = 2;
    ReceiverConfig rx;
    /// false: single-user GMSK bursts (b = 0); the SCPIR axis collapses to {0}.
    bool paired = true;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Monte-Carlo raw BER of user o for one grid point.
double simulate_raw_ber(const Stage1Config& cfg, const Stage1Point& point, std::uint64_t seed);

/// Table type `stage1` (paired) or `single`; raw BER non-increasing along
/// the desired-power axis after isotonic smoothing.
GridTable generate_stage1_table(const Stage1Config& cfg);

double lookup_raw_ber(const GridTable& table, const Stage1Point& point);

// ---------------------------------------------------------------------------
// Stage 2: frame FER from burst BER statistics
// ---------------------------------------------------------------------------

struct Stage2Config {
    CodecConfig codec;
    std::vector<double> mean_grid = linspace_step(0.0, 0.5, 0.01);
    std::vector<double> var_grid = linspace_step(0.0, 0.05, 0.005);
    int frames_per_point = 1000;
    std::uint64_t seed = 2;
    int threads = 1;
};

/// Two-point per-burst BER distribution with the requested mean and
/// variance: value `lo` or `hi`, the latter with probability `p_hi`.
struct TwoPoint {
    double lo = 0.0;
    double hi = 0.0;
    double p_hi = 0.0;
};

bool stage2_feasible(double mean, double var);
TwoPoint two_point_distribution(double mean, double var);

/// Frame error frequency of the stand-in codec with per-burst bit error
/// probabilities drawn from `dist`. Each frame holds floor or ceil of
/// `p_hi * n_bursts` high bursts, so the within-frame spread matches `dist`.
double simulate_frame_fer(const CodecConfig& codec, const TwoPoint& dist, int frames, Rng& rng);

GridTable generate_stage2_table(const Stage2Config& cfg);

/// FER from the mean and population variance of the per-burst raw BERs.
double frame_fer(const GridTable& stage2, const std::vector<double>& burst_bers);

// ---------------------------------------------------------------------------
// Link-level frames
// ---------------------------------------------------------------------------

/// Coded frames carried by one group of `n_bursts` bursts.
int frames_per_group(const CodecConfig& codec, const BurstLayout& layout);

struct LinkFrameStats {
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    /// Raw BER of every burst, in generation order.
    std::vector<double> burst_bers;
    /// Per frame: error flag and the raw BERs of the coded bits it saw.
    std::vector<std::uint8_t> frame_error_flags;
    std::vector<std::vector<double>> frame_burst_bers;
};

struct LinkRunConfig {
    ReceiverKind receiver = ReceiverKind::mic;
    ReceiverConfig rx;
    CodecConfig codec;
    BurstContext ctx;
    int channel_order = 2;
    double scpir_db = 0.0;
    bool paired = true;
    double snr_db = 40.0;  // desired user o over thermal noise
    /// Impairments with mean powers relative to user o's mean power.
    InterferenceLedger ledger;
};

/// Encodes, interleaves, transmits through independently faded bursts and
/// decodes `groups` burst groups.
LinkFrameStats run_link_frames(const LinkRunConfig& cfg, int groups, std::uint64_t seed);

}  // namespace vamos
