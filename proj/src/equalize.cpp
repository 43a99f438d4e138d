#include "vamos/equalize.hpp"

#include <cmath>

#include "vamos/trellis.hpp"

namespace vamos {

namespace {

constexpr double kIllConditioned = 1e10;

/// Register value whose every symbol (both users for Bits = 2) is the guard.
template <int Bits>
std::uint64_t guard_register(double guard_value) {
    return guard_value < 0.0 ? ~std::uint64_t{0} : std::uint64_t{0};
}

int guard_code_joint(double guard_value) {
    const int g = static_cast<int>(symbol_to_code(guard_value));
    return g | (g << 1);
}

/// Pinned code for the single-user trellis of the user whose training is `tsc`.
int pinned_single(int n, const BurstLayout& layout, const TrainingSequence& tsc) {
    const int len = layout.length();
    if (n < len && layout.is_payload(n)) return -1;
    const int t = n - layout.training_offset();
    if (n < len && t >= 0 && t < layout.training_length) {
        return static_cast<int>(symbol_to_code(tsc.symbols[t]));
    }
    return static_cast<int>(symbol_to_code(layout.guard_value));
}

int pinned_joint(int n, const BurstContext& ctx) {
    const auto& layout = ctx.layout;
    const int len = layout.length();
    if (n < len && layout.is_payload(n)) return -1;
    const int t = n - layout.training_offset();
    if (n < len && t >= 0 && t < layout.training_length) {
        return static_cast<int>(symbol_to_code(ctx.tsc_o.symbols[t]) |
                                (symbol_to_code(ctx.tsc_p.symbols[t]) << 1));
    }
    return guard_code_joint(layout.guard_value);
}

struct LsFit {
    RVector theta;
    double residual = 0.0;
    bool regularized = false;
};

/// Minimum-norm least squares via a complete orthogonal decomposition. Rank
/// deficient or badly conditioned designs are flagged.
LsFit solve_ls(const RMatrix& x, const RVector& y) {
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(x);
    LsFit fit;
    fit.theta = cod.solve(y);
    fit.residual = (x * fit.theta - y).squaredNorm();
    const Eigen::Index rank = cod.rank();
    if (rank < x.cols()) {
        fit.regularized = true;
    } else if (rank > 0) {
        const auto diag = cod.matrixQTZ().diagonal().head(rank).cwiseAbs();
        const double ratio = diag.maxCoeff() / diag.minCoeff();
        fit.regularized = ratio * ratio > kIllConditioned;
    }
    return fit;
}

/// Columns [Re r'[k - kappa], -Im r'[k - kappa]] for kappa = 0..q_f where
/// r' = r c* / |c|^2, so that X theta = P_c{f * r} for theta = [f_I; f_Q].
void fill_prefilter_columns(RMatrix& x, Eigen::Index row, const CVector& rp, Eigen::Index k,
                            int q_f) {
    for (int kappa = 0; kappa <= q_f; ++kappa) {
        const Eigen::Index i = k - kappa;
        const cplx v = (i >= 0 && i < rp.size()) ? rp[i] : cplx(0.0);
        x(row, kappa) = v.real();
        x(row, q_f + 1 + kappa) = -v.imag();
    }
}

CVector prefilter_from_theta(const RVector& theta, int q_f) {
    CVector f(q_f + 1);
    for (int k = 0; k <= q_f; ++k) f[k] = cplx(theta[k], theta[q_f + 1 + k]);
    return f;
}

Symbols decode_user(const std::vector<std::uint8_t>& codes, int len, int bit) {
    Symbols s(len);
    for (int n = 0; n < len; ++n) s[n] = code_to_symbol((codes[static_cast<std::size_t>(n)] >> bit) & 1u);
    return s;
}

void check_received_length(const CVector& r, const BurstLayout& layout, const char* who) {
    if (r.size() < layout.length()) {
        throw InvalidInput(std::string(who) + ": received burst has " + std::to_string(r.size()) +
                           " samples, layout needs at least " + std::to_string(layout.length()));
    }
}

int resolve_k0_max(int k0_max, int q_f) { return k0_max < 0 ? q_f : k0_max; }

}  // namespace

double project_onto(cplx x, cplx c) {
    const double n2 = std::norm(c);
    if (!(n2 > 0.0)) throw InvalidInput("project_onto: projection direction must be nonzero");
    return (x * std::conj(c)).real() / n2;
}

// ---------------------------------------------------------------------------
// Joint MLSE
// ---------------------------------------------------------------------------

EqualizerOutput joint_mlse(const CVector& r, const CVector& h_hat, double b_hat,
                           const BurstContext& ctx, const TrellisConfig& cfg) {
    const auto& layout = ctx.layout;
    check_received_length(r, layout, "joint_mlse");
    const int q = static_cast<int>(h_hat.size()) - 1;
    const int len = layout.length();
    const int steps = static_cast<int>(r.size());

    // Per-tap contribution of each joint code: h[kappa] (s_o + j b s_p).
    std::vector<std::array<cplx, 4>> contrib(static_cast<std::size_t>(q + 1));
    for (int kappa = 0; kappa <= q; ++kappa) {
        for (int code = 0; code < 4; ++code) {
            contrib[kappa][code] =
                h_hat[kappa] * cplx(code_to_symbol(code & 1), b_hat * code_to_symbol(code >> 1));
        }
    }
    auto metric = [&](int n, std::uint64_t reg) {
        cplx pred = 0.0;
        for (int kappa = 0; kappa <= q; ++kappa) pred += contrib[kappa][(reg >> (2 * kappa)) & 3u];
        return std::norm(r[n] - pred);
    };
    auto pinned = [&](int n) { return pinned_joint(n, ctx); };
    const auto res = viterbi_psp<2>(cfg.memory, steps, metric, pinned,
                                    guard_register<2>(layout.guard_value));

    EqualizerOutput out;
    out.burst_o = decode_user(res.codes, len, 0);
    out.burst_p = decode_user(res.codes, len, 1);
    out.bits_o = extract_payload(layout, out.burst_o);
    out.bits_p = extract_payload(layout, *out.burst_p);
    out.metric = res.metric;
    return out;
}

double joint_mlse_path_metric(const CVector& r, const CVector& h_hat, double b_hat,
                              const Symbols& a_o, const Symbols& a_p, double guard_value) {
    const Eigen::Index len = a_o.size();
    double total = 0.0;
    for (Eigen::Index k = 0; k < r.size(); ++k) {
        cplx pred = 0.0;
        for (Eigen::Index kappa = 0; kappa < h_hat.size(); ++kappa) {
            const Eigen::Index n = k - kappa;
            const bool inside = n >= 0 && n < len;
            pred += h_hat[kappa] * cplx(inside ? a_o[n] : guard_value,
                                        b_hat * (inside ? a_p[n] : guard_value));
        }
        total += std::norm(r[k] - pred);
    }
    return total;
}

EqualizerOutput single_user_mlse(const CVector& r, const CVector& h_hat,
                                 const BurstContext& ctx, int memory) {
    const auto& layout = ctx.layout;
    check_received_length(r, layout, "single_user_mlse");
    const int q = static_cast<int>(h_hat.size()) - 1;
    auto metric = [&](int n, std::uint64_t reg) {
        cplx pred = 0.0;
        for (int kappa = 0; kappa <= q; ++kappa) pred += h_hat[kappa] * reg_symbol<1>(reg, kappa);
        return std::norm(r[n] - pred);
    };
    auto pinned = [&](int n) { return pinned_single(n, layout, ctx.tsc_o); };
    const auto res = viterbi_psp<1>(memory, static_cast<int>(r.size()), metric, pinned,
                                    guard_register<1>(layout.guard_value));
    EqualizerOutput out;
    out.burst_o = decode_user(res.codes, layout.length(), 0);
    out.bits_o = extract_payload(layout, out.burst_o);
    out.metric = res.metric;
    return out;
}

// ---------------------------------------------------------------------------
// MIC
// ---------------------------------------------------------------------------

RVector mic_filter_output(const CVector& r, const CVector& f, cplx c) {
    const double n2 = std::norm(c);
    if (!(n2 > 0.0)) throw InvalidInput("mic_filter_output: projection direction must be nonzero");
    RVector y(r.size());
    for (Eigen::Index k = 0; k < r.size(); ++k) {
        cplx acc = 0.0;
        for (Eigen::Index kappa = 0; kappa < f.size() && kappa <= k; ++kappa) {
            acc += f[kappa] * r[k - kappa];
        }
        y[k] = (acc * std::conj(c)).real() / n2;
    }
    return y;
}

namespace {

/// LS fit of one MIC branch over rows n in [n_begin, n_end) whose reference
/// symbols come from `ref` (burst indexing); k0 swept over [k0_min, k0_max].
MicFilters fit_mic(const CVector& r, const Symbols& ref, int n_begin, int n_end,
                   const MicConfig& cfg) {
    const int q_f = cfg.q_f;
    const int q_b = cfg.q_b;
    const int cols = 2 * (q_f + 1) + q_b;
    const CVector rp = r * std::conj(cfg.c) / std::norm(cfg.c);
    const int k0_max = resolve_k0_max(cfg.k0_max, q_f);

    MicFilters best;
    bool have = false;
    for (int k0 = cfg.k0_min; k0 <= k0_max; ++k0) {
        const int end = std::min<int>(n_end, static_cast<int>(r.size()) - k0);
        const int rows = end - n_begin;
        if (rows < 1) continue;
        RMatrix x(rows, cols);
        RVector y(rows);
        for (int i = 0; i < rows; ++i) {
            const int n = n_begin + i;
            fill_prefilter_columns(x, i, rp, n + k0, q_f);
            for (int kappa = 1; kappa <= q_b; ++kappa) x(i, 2 * (q_f + 1) + kappa - 1) = -ref[n - kappa];
            y[i] = ref[n];
        }
        const LsFit fit = solve_ls(x, y);
        if (!have || fit.residual < best.residual) {
            have = true;
            best.f = prefilter_from_theta(fit.theta, q_f);
            best.b_fb = RVector::Zero(q_b + 1);
            best.b_fb.tail(q_b) = fit.theta.tail(q_b);
            best.k0 = k0;
            best.c = cfg.c;
            best.residual = fit.residual;
            best.regularized = fit.regularized;
        }
    }
    if (!have) throw InvalidInput("mic_adapt: no decision delay leaves rows to fit");
    return best;
}

void check_mic_orders(int q_f, int q_b, int k0_min, int n_tr, const char* who) {
    if (q_f < 0 || q_b < 0 || k0_min < 0 || n_tr <= q_f + q_b) {
        throw InvalidInput(std::string(who) + ": training length " + std::to_string(n_tr) +
                           " must exceed q_f + q_b = " + std::to_string(q_f + q_b));
    }
}

}  // namespace

MicFilters mic_adapt(const CVector& r, const TrainingSequence& tsc, const BurstLayout& layout,
                     const MicConfig& cfg) {
    check_received_length(r, layout, "mic_adapt");
    check_mic_orders(cfg.q_f, cfg.q_b, cfg.k0_min, tsc.length(), "mic_adapt");
    if (tsc.length() != layout.training_length) throw InvalidInput("mic_adapt: training length mismatch");
    Symbols ref = Symbols::Constant(layout.length(), layout.guard_value);
    const int t0 = layout.training_offset();
    ref.segment(t0, tsc.length()) = tsc.symbols;
    return fit_mic(r, ref, t0 + cfg.q_b, t0 + tsc.length(), cfg);
}

MicFilters mic_adapt_decided(const CVector& r, const Symbols& burst, const BurstLayout& layout,
                             const MicConfig& cfg) {
    check_received_length(r, layout, "mic_adapt_decided");
    check_mic_orders(cfg.q_f, cfg.q_b, cfg.k0_min, layout.training_length, "mic_adapt_decided");
    if (burst.size() != layout.length()) throw InvalidInput("mic_adapt_decided: burst length mismatch");
    return fit_mic(r, burst, cfg.q_b, layout.length(), cfg);
}

EqualizerOutput mic_equalize(const CVector& r, const MicFilters& filters,
                             const TrainingSequence& tsc, const BurstLayout& layout,
                             int memory) {
    check_received_length(r, layout, "mic_equalize");
    const RVector y = mic_filter_output(r, filters.f, filters.c);
    const int k0 = filters.k0;
    const int q_b = static_cast<int>(filters.b_fb.size()) - 1;
    const int steps = static_cast<int>(y.size()) - k0;
    const int len = layout.length();
    if (steps < len - layout.guard) {
        throw InvalidInput("mic_equalize: decision delay " + std::to_string(k0) +
                           " leaves the burst tail unobserved");
    }
    auto metric = [&](int n, std::uint64_t reg) {
        double pred = reg_symbol<1>(reg, 0);
        for (int kappa = 1; kappa <= q_b; ++kappa) pred += filters.b_fb[kappa] * reg_symbol<1>(reg, kappa);
        const double e = y[n + k0] - pred;
        return e * e;
    };
    auto pinned = [&](int n) { return pinned_single(n, layout, tsc); };
    const auto res = viterbi_psp<1>(memory, steps, metric, pinned,
                                    guard_register<1>(layout.guard_value));
    EqualizerOutput out;
    out.burst_o = decode_user(res.codes, len, 0);
    out.bits_o = extract_payload(layout, out.burst_o);
    out.metric = res.metric;
    return out;
}

EqualizerOutput mic_receive(const CVector& r, const TrainingSequence& tsc,
                            const BurstLayout& layout, const MicConfig& cfg) {
    EqualizerOutput out = mic_equalize(r, mic_adapt(r, tsc, layout, cfg), tsc, layout, cfg.memory);
    for (int pass = 0; pass < cfg.refine_passes; ++pass) {
        const MicFilters f = mic_adapt_decided(r, out.burst_o, layout, cfg);
        out = mic_equalize(r, f, tsc, layout, cfg.memory);
    }
    return out;
}

MicFilters mic_filters_for_single_tap(cplx h0) {
    if (!(std::norm(h0) > 0.0)) throw InvalidInput("mic_filters_for_single_tap: zero channel tap");
    MicFilters f;
    f.f = CVector::Constant(1, std::conj(h0) / std::norm(h0));
    f.b_fb = RVector::Zero(1);
    return f;
}

// ---------------------------------------------------------------------------
// SIC
// ---------------------------------------------------------------------------

SicResult sic_receive(const CVector& r, const CVector& h_hat, double b_hat, double b0,
                      const BurstContext& ctx, const MicConfig& mic_cfg) {
    const auto& layout = ctx.layout;
    SicResult res;
    if (!(b_hat >= b0)) {
        res.out = mic_receive(r, ctx.tsc_o, layout, mic_cfg);
        return res;
    }
    // Stage 1: detect the stronger paired user and cancel it.
    const EqualizerOutput out_p = mic_receive(r, ctx.tsc_p, layout, mic_cfg);
    const CVector xp = cplx(0.0, b_hat) * out_p.burst_o.cast<cplx>();
    const CVector contribution =
        convolve_burst(h_hat, xp, cplx(0.0, b_hat * layout.guard_value));
    res.r_cancelled = r;
    const Eigen::Index n = std::min(r.size(), contribution.size());
    res.r_cancelled.head(n) -= contribution.head(n);
    res.cancelled = true;

    // Stage 2: MIC for the desired user on the cleaned signal.
    res.out = mic_receive(res.r_cancelled, ctx.tsc_o, layout, mic_cfg);
    res.out.bits_p = out_p.bits_o;
    res.out.burst_p = out_p.burst_o;
    return res;
}

// ---------------------------------------------------------------------------
// V-MIC
// ---------------------------------------------------------------------------

namespace {

VmicFilters fit_vmic(const CVector& r, const Symbols& ao, const Symbols& ap, int n_begin,
                     int n_end, const VmicConfig& cfg) {
    const int q_f = cfg.q_f;
    const int q_b = cfg.q_b;
    const int nf = 2 * (q_f + 1);
    const int cols = nf + q_b + (q_b + 1);
    const CVector rp = r * std::conj(cfg.c) / std::norm(cfg.c);
    const int k0_max = resolve_k0_max(cfg.k0_max, q_f);

    VmicFilters best;
    bool have = false;
    for (int k0 = cfg.k0_min; k0 <= k0_max; ++k0) {
        const int end = std::min<int>(n_end, static_cast<int>(r.size()) - k0);
        const int rows = end - n_begin;
        if (rows < 1) continue;
        RMatrix xo(rows, cols), xp(rows, cols);
        RVector yo(rows), yp(rows);
        for (int i = 0; i < rows; ++i) {
            const int n = n_begin + i;
            fill_prefilter_columns(xo, i, rp, n + k0, q_f);
            xp.row(i).head(nf) = xo.row(i).head(nf);
            // Upper branch: own strictly causal, cross causal.
            for (int kappa = 1; kappa <= q_b; ++kappa) xo(i, nf + kappa - 1) = -ao[n - kappa];
            for (int kappa = 0; kappa <= q_b; ++kappa) xo(i, nf + q_b + kappa) = -ap[n - kappa];
            // Lower branch: cross causal, own strictly causal.
            for (int kappa = 0; kappa <= q_b; ++kappa) xp(i, nf + kappa) = -ao[n - kappa];
            for (int kappa = 1; kappa <= q_b; ++kappa) xp(i, nf + q_b + kappa) = -ap[n - kappa];
            yo[i] = ao[n];
            yp[i] = ap[n];
        }
        const LsFit fo = solve_ls(xo, yo);
        const LsFit fp = solve_ls(xp, yp);
        const double total = fo.residual + fp.residual;
        if (!have || total < best.residual_o + best.residual_p) {
            have = true;
            best.f_o = prefilter_from_theta(fo.theta, q_f);
            best.f_p = prefilter_from_theta(fp.theta, q_f);
            best.B[0][0] = RVector::Zero(q_b + 1);
            best.B[0][0].tail(q_b) = fo.theta.segment(nf, q_b);
            best.B[0][1] = fo.theta.segment(nf + q_b, q_b + 1);
            best.B[1][0] = fp.theta.segment(nf, q_b + 1);
            best.B[1][1] = RVector::Zero(q_b + 1);
            best.B[1][1].tail(q_b) = fp.theta.segment(nf + q_b + 1, q_b);
            best.k0 = k0;
            best.c = cfg.c;
            best.residual_o = fo.residual;
            best.residual_p = fp.residual;
            best.regularized = fo.regularized || fp.regularized;
        }
    }
    if (!have) throw InvalidInput("vmic_adapt: no decision delay leaves rows to fit");
    return best;
}

}  // namespace

VmicFilters vmic_adapt(const CVector& r, const BurstContext& ctx, const VmicConfig& cfg) {
    const auto& layout = ctx.layout;
    check_received_length(r, layout, "vmic_adapt");
    const int n_tr = layout.training_length;
    if (ctx.tsc_o.length() != n_tr || ctx.tsc_p.length() != n_tr) {
        throw InvalidInput("vmic_adapt: training lengths do not match the layout");
    }
    if (cfg.q_f < 0 || cfg.q_b < 0 || cfg.k0_min < 0 || n_tr <= 2 * cfg.q_b) {
        throw InvalidInput("vmic_adapt: invalid filter orders");
    }
    const int t0 = layout.training_offset();
    Symbols ao = Symbols::Constant(layout.length(), layout.guard_value);
    Symbols ap = ao;
    ao.segment(t0, n_tr) = ctx.tsc_o.symbols;
    ap.segment(t0, n_tr) = ctx.tsc_p.symbols;
    return fit_vmic(r, ao, ap, t0 + cfg.q_b, t0 + n_tr, cfg);
}

VmicFilters vmic_adapt_decided(const CVector& r, const Symbols& burst_o, const Symbols& burst_p,
                               const BurstLayout& layout, const VmicConfig& cfg) {
    check_received_length(r, layout, "vmic_adapt_decided");
    if (burst_o.size() != layout.length() || burst_p.size() != layout.length()) {
        throw InvalidInput("vmic_adapt_decided: burst length mismatch");
    }
    return fit_vmic(r, burst_o, burst_p, cfg.q_b, layout.length(), cfg);
}

EqualizerOutput vmic_equalize(const CVector& r, const VmicFilters& filters,
                              const BurstContext& ctx, const TrellisConfig& cfg) {
    const auto& layout = ctx.layout;
    check_received_length(r, layout, "vmic_equalize");
    const RVector u_o = mic_filter_output(r, filters.f_o, filters.c);
    const RVector u_p = mic_filter_output(r, filters.f_p, filters.c);
    const int k0 = filters.k0;
    const int q_b = static_cast<int>(filters.B[0][0].size()) - 1;
    const int steps = static_cast<int>(u_o.size()) - k0;
    const int len = layout.length();
    if (steps < len - layout.guard) {
        throw InvalidInput("vmic_equalize: decision delay " + std::to_string(k0) +
                           " leaves the burst tail unobserved");
    }
    const auto& B = filters.B;
    auto metric = [&](int n, std::uint64_t reg) {
        double po = reg_symbol<2>(reg, 0, 0);
        double pp = reg_symbol<2>(reg, 0, 1);
        for (int kappa = 0; kappa <= q_b; ++kappa) {
            const double so = reg_symbol<2>(reg, kappa, 0);
            const double sp = reg_symbol<2>(reg, kappa, 1);
            po += B[0][0][kappa] * so + B[0][1][kappa] * sp;
            pp += B[1][0][kappa] * so + B[1][1][kappa] * sp;
        }
        const double eo = u_o[n + k0] - po;
        const double ep = u_p[n + k0] - pp;
        return eo * eo + ep * ep;
    };
    auto pinned = [&](int n) { return pinned_joint(n, ctx); };
    const auto res = viterbi_psp<2>(cfg.memory, steps, metric, pinned,
                                    guard_register<2>(layout.guard_value));
    EqualizerOutput out;
    out.burst_o = decode_user(res.codes, len, 0);
    out.burst_p = decode_user(res.codes, len, 1);
    out.bits_o = extract_payload(layout, out.burst_o);
    out.bits_p = extract_payload(layout, *out.burst_p);
    out.metric = res.metric;
    return out;
}

EqualizerOutput vmic_receive(const CVector& r, const BurstContext& ctx, const VmicConfig& cfg) {
    const TrellisConfig trellis{cfg.memory, true};
    EqualizerOutput out = vmic_equalize(r, vmic_adapt(r, ctx, cfg), ctx, trellis);
    for (int pass = 0; pass < cfg.refine_passes; ++pass) {
        const VmicFilters f = vmic_adapt_decided(r, out.burst_o, *out.burst_p, ctx.layout, cfg);
        out = vmic_equalize(r, f, ctx, trellis);
    }
    return out;
}

double vmic_path_metric(const CVector& r, const VmicFilters& filters, const Symbols& a_o,
                        const Symbols& a_p, double guard_value) {
    const RVector u_o = mic_filter_output(r, filters.f_o, filters.c);
    const RVector u_p = mic_filter_output(r, filters.f_p, filters.c);
    const Eigen::Index len = a_o.size();
    const int q_b = static_cast<int>(filters.B[0][0].size()) - 1;
    auto sym = [&](const Symbols& a, Eigen::Index n) {
        return (n >= 0 && n < len) ? a[n] : guard_value;
    };
    double total = 0.0;
    for (Eigen::Index n = 0; n + filters.k0 < u_o.size(); ++n) {
        double po = sym(a_o, n);
        double pp = sym(a_p, n);
        for (int kappa = 0; kappa <= q_b; ++kappa) {
            po += filters.B[0][0][kappa] * sym(a_o, n - kappa) + filters.B[0][1][kappa] * sym(a_p, n - kappa);
            pp += filters.B[1][0][kappa] * sym(a_o, n - kappa) + filters.B[1][1][kappa] * sym(a_p, n - kappa);
        }
        const double eo = u_o[n + filters.k0] - po;
        const double ep = u_p[n + filters.k0] - pp;
        total += eo * eo + ep * ep;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Receiver front-end
// ---------------------------------------------------------------------------

const char* to_string(ReceiverKind kind) {
    switch (kind) {
        case ReceiverKind::joint_mlse: return "joint_mlse";
        case ReceiverKind::mic: return "mic";
        case ReceiverKind::sic: return "sic";
        case ReceiverKind::vmic: return "vmic";
        case ReceiverKind::ceq: return "ceq";
    }
    return "?";
}

ReceiverKind receiver_from_string(const std::string& name) {
    for (auto k : {ReceiverKind::joint_mlse, ReceiverKind::mic, ReceiverKind::sic,
                   ReceiverKind::vmic, ReceiverKind::ceq}) {
        if (name == to_string(k)) return k;
    }
    throw InvalidInput("unknown receiver '" + name + "'");
}

EqualizerOutput receive_burst(ReceiverKind kind, const CVector& r, const BurstContext& ctx,
                              const ReceiverConfig& cfg, bool paired) {
    if (!paired) {
        if (kind == ReceiverKind::sic || kind == ReceiverKind::vmic) kind = ReceiverKind::mic;
        if (kind == ReceiverKind::joint_mlse) kind = ReceiverKind::ceq;
    }
    switch (kind) {
        case ReceiverKind::joint_mlse: {
            const auto in = make_estimation_input(r, ctx.layout, ctx.tsc_o, ctx.tsc_p, cfg.order);
            const auto est = joint_ml_estimate(in, cfg.estimation);
            return joint_mlse(r, est.h_hat, est.b_hat, ctx, {cfg.mlse_memory, true});
        }
        case ReceiverKind::ceq: {
            const auto in = make_estimation_input(r, ctx.layout, ctx.tsc_o, ctx.tsc_p, cfg.order);
            return single_user_mlse(r, ls_channel_given_b(in, 0.0), ctx, cfg.mlse_memory);
        }
        case ReceiverKind::mic: {
            return mic_receive(r, ctx.tsc_o, ctx.layout, cfg.mic);
        }
        case ReceiverKind::sic: {
            const auto in = make_estimation_input(r, ctx.layout, ctx.tsc_o, ctx.tsc_p, cfg.order);
            const auto est = joint_ml_estimate(in, cfg.estimation);
            return sic_receive(r, est.h_hat, est.b_hat, cfg.b0, ctx, cfg.mic).out;
        }
        case ReceiverKind::vmic: {
            return vmic_receive(r, ctx, cfg.vmic);
        }
    }
    throw InvalidInput("receive_burst: unknown receiver");
}

}  // namespace vamos
