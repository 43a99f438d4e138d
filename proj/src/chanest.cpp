#include "vamos/chanest.hpp"

#include <cmath>
#include <limits>

namespace vamos {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949;

void count(OpCounter* ops, std::uint64_t n) {
    if (ops) ops->multiplies += n;
}

bool is_hermitian_psd(const CMatrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) return false;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -1e-12 * scale;
}

}  // namespace

void EstimationInput::validate() const {
    if (A_o.rows() != r_window.size() || A_p.rows() != r_window.size() ||
        A_o.cols() != A_p.cols()) {
        throw InvalidInput("EstimationInput: window of " + std::to_string(r_window.size()) +
                           " samples does not match convolution matrices " +
                           std::to_string(A_o.rows()) + "x" + std::to_string(A_o.cols()));
    }
}

EstimationInput make_estimation_input(const CVector& r, const BurstLayout& layout,
                                      const TrainingSequence& tsc_o,
                                      const TrainingSequence& tsc_p, int order,
                                      double sigma_w2) {
    EstimationInput in;
    in.A_o = toeplitz_from_training<cplx>(tsc_o, order);
    in.A_p = toeplitz_paired(tsc_p, order);
    in.r_window = r.segment(layout.training_offset() + order, in.A_o.rows());
    in.sigma_w2 = sigma_w2;
    return in;
}

BlindEstConfig BlindEstConfig::for_order(int order) {
    BlindEstConfig cfg;
    cfg.phi_hh = CMatrix::Identity(order + 1, order + 1) / static_cast<double>(order + 1);
    return cfg;
}

CVector ls_channel_given_b(const EstimationInput& in, double b, OpCounter* ops) {
    in.validate();
    const CMatrix a = in.A_o + b * in.A_p;
    Eigen::ColPivHouseholderQR<CMatrix> qr(a);
    if (qr.rank() < a.cols()) {
        throw SingularError("ls_channel_given_b: composite training matrix has rank " +
                            std::to_string(qr.rank()) + " < " + std::to_string(a.cols()) +
                            " channel taps");
    }
    count(ops, static_cast<std::uint64_t>(a.cols() * a.cols() * a.rows()));
    return qr.solve(in.r_window);
}

cplx ls_b_given_channel_raw(const EstimationInput& in, const CVector& h) {
    in.validate();
    const CVector aph = in.A_p * h;
    const double energy = aph.squaredNorm();
    if (!(energy > 0.0)) {
        throw SingularError("ls_b_given_channel: channel has zero energy through A_p");
    }
    const CVector resid = in.r_window - in.A_o * h;
    const cplx num = aph.dot(resid) + resid.dot(aph);  // dot() conjugates the left operand
    return 0.5 * num / energy;
}

double ls_b_given_channel(const EstimationInput& in, const CVector& h, OpCounter* ops) {
    const cplx raw = ls_b_given_channel_raw(in, h);
    count(ops, static_cast<std::uint64_t>(2 * in.A_o.rows() * in.A_o.cols()));
    return std::max(0.0, raw.real());
}

ChannelEstimate joint_ml_estimate(const EstimationInput& in, const JointMlConfig& cfg,
                                  OpCounter* ops) {
    if (cfg.max_iter < 1) throw InvalidInput("joint_ml_estimate: max_iter must be >= 1");
    ChannelEstimate est;
    double b = std::max(0.0, cfg.b_init);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        est.h_hat = ls_channel_given_b(in, b, ops);
        const double b_next = ls_b_given_channel(in, est.h_hat, ops);
        est.iterations_used = it;
        if (ops) ++ops->iterations;
        const bool done = std::abs(b_next - b) < cfg.tol;
        b = b_next;
        if (done) {
            est.converged = true;
            break;
        }
    }
    // Final channel consistent with the final b.
    est.h_hat = ls_channel_given_b(in, b, ops);
    est.b_hat = b;
    return est;
}

double blind_objective(const EstimationInput& in, const CMatrix& phi_hh, double b,
                       OpCounter* ops) {
    const CMatrix a = in.A_o + b * in.A_p;
    const Eigen::Index m = a.rows();
    CMatrix phi = a * phi_hh * a.adjoint();
    phi.diagonal().array() += in.sigma_w2;
    Eigen::LLT<CMatrix> llt(phi);
    if (llt.info() != Eigen::Success) {
        throw SingularError("blind_objective: covariance is not positive definite");
    }
    const CVector z = llt.matrixL().solve(in.r_window);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
    count(ops, static_cast<std::uint64_t>(m * m * m));
    return z.squaredNorm() + log_det;
}

double blind_b_estimate(const EstimationInput& in, const BlindEstConfig& cfg, OpCounter* ops) {
    in.validate();
    if (!(cfg.b_hi > cfg.b_lo) || cfg.b_lo < 0.0) {
        throw InvalidInput("blind_b_estimate: search interval must satisfy 0 <= b_lo < b_hi");
    }
    if (!(in.sigma_w2 > 0.0)) throw InvalidInput("blind_b_estimate: sigma_w2 must be positive");
    if (cfg.phi_hh.rows() != in.A_o.cols() || !is_hermitian_psd(cfg.phi_hh)) {
        throw InvalidInput("blind_b_estimate: phi_hh must be a Hermitian PSD matrix of order q_h+1");
    }
    auto f = [&](double b) {
        if (ops) ++ops->iterations;
        return blind_objective(in, cfg.phi_hh, b, ops);
    };

    // Coarse scan to bracket the global minimum, then golden-section.
    const int n = std::max(3, cfg.bracket_points);
    const double step = (cfg.b_hi - cfg.b_lo) / (n - 1);
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double v = f(cfg.b_lo + i * step);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double lo = cfg.b_lo + std::max(0, best - 1) * step;
    double hi = cfg.b_lo + std::min(n - 1, best + 1) * step;

    double x1 = hi - kGoldenRatio * (hi - lo);
    double x2 = lo + kGoldenRatio * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > cfg.tolerance) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGoldenRatio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGoldenRatio * (hi - lo);
            f2 = f(x2);
        }
    }
    double b_hat = 0.5 * (lo + hi);
    // The interval end points are candidates too (monotone objectives).
    if (best == 0 && f(cfg.b_lo) <= f(b_hat)) b_hat = cfg.b_lo;
    if (best == n - 1 && f(cfg.b_hi) <= f(b_hat)) b_hat = cfg.b_hi;
    return b_hat;
}

double residual_variance(const EstimationInput& in, const CVector& h, double b) {
    in.validate();
    const CVector e = in.r_window - (in.A_o + b * in.A_p) * h;
    return e.squaredNorm() / static_cast<double>(e.size());
}

}  // namespace vamos
