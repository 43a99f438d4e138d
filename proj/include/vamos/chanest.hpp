#pragma once

#include "vamos/baseband.hpp"

namespace vamos {

/// Training-window observation for joint estimation of (h, b).
struct EstimationInput {
    CVector r_window;  // length M = N_tr - q_h
    CMatrix A_o;       // M x (q_h+1)
    CMatrix A_p;       // M x (q_h+1), includes the factor j
    double sigma_w2 = 0.0;

    Eigen::Index rows() const { return r_window.size(); }
    int order() const { return static_cast<int>(A_o.cols()) - 1; }
    void validate() const;
};

/// Cuts the ISI-free training window out of a received burst and pairs it
/// with both convolution matrices.
EstimationInput make_estimation_input(const CVector& r, const BurstLayout& layout,
                                      const TrainingSequence& tsc_o,
                                      const TrainingSequence& tsc_p, int order,
                                      double sigma_w2 = 0.0);

struct ChannelEstimate {
    CVector h_hat;
    double b_hat = 0.0;
    int iterations_used = 0;
    bool converged = false;
};

struct BlindEstConfig {
    CMatrix phi_hh;
    double b_lo = 0.0;
    double b_hi = 3.9810717055349722;  // 10^(12/20)
    double tolerance = 1e-4;
    /// Coarse scan points used to bracket the golden-section search.
    int bracket_points = 16;

    /// Phi_hh = I / (q_h + 1) with the default search interval.
    static BlindEstConfig for_order(int order);
};

/// Counts of complex multiply-accumulates spent in the estimators' dominant
/// matrix products and factorisations.
struct OpCounter {
    std::uint64_t multiplies = 0;
    std::uint64_t iterations = 0;
};

/// LS channel for a known b via column-pivoting QR of (A_o + b A_p).
CVector ls_channel_given_b(const EstimationInput& in, double b, OpCounter* ops = nullptr);

/// Closed-form estimate of b for a known channel, clamped at zero.
double ls_b_given_channel(const EstimationInput& in, const CVector& h, OpCounter* ops = nullptr);

/// Raw (unclamped, complex) value of the b expression; the imaginary part
/// is a rounding residue.
cplx ls_b_given_channel_raw(const EstimationInput& in, const CVector& h);

struct JointMlConfig {
    double b_init = 1.0;
    int max_iter = 50;
    double tol = 1e-4;
};

/// Alternates the two conditional estimates starting from b_init.
ChannelEstimate joint_ml_estimate(const EstimationInput& in, const JointMlConfig& cfg = {},
                                  OpCounter* ops = nullptr);

/// r^H Phi^{-1} r + ln det Phi for Phi = (A_o + b A_p) Phi_hh (.)^H + sigma_w^2 I.
double blind_objective(const EstimationInput& in, const CMatrix& phi_hh, double b,
                       OpCounter* ops = nullptr);

/// ML estimate of b from channel statistics only (golden-section search).
double blind_b_estimate(const EstimationInput& in, const BlindEstConfig& cfg,
                        OpCounter* ops = nullptr);

/// Mean squared LS residual; fallback when sigma_w^2 is not supplied.
double residual_variance(const EstimationInput& in, const CVector& h, double b);

}  // namespace vamos
