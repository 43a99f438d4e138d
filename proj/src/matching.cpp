#include "vamos/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

namespace vamos {

namespace {

void check_square_even(const RMatrix& w, const char* who) {
    if (w.rows() != w.cols()) throw InvalidInput(std::string(who) + ": matrix must be square");
    if (w.rows() % 2 != 0 || w.rows() == 0) {
        throw InvalidInput(std::string(who) + ": need a positive even number of vertices, got " +
                           std::to_string(w.rows()));
    }
}

/// Weighted blossom algorithm for general graphs (Edmonds; primal-dual with
/// S/T labels, nested blossoms and lazy best-edge bookkeeping), O(n^3).
class Blossom {
public:
    Blossom(int n, const std::vector<WeightedEdge>& edges, bool max_card)
        : nv_(n), edges_(edges), max_card_(max_card) {}

    std::vector<int> run();

private:
    int nv_;
    const std::vector<WeightedEdge>& edges_;
    bool max_card_;

    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_, label_, labelend_, inblossom_, blossomparent_, blossombase_;
    std::vector<std::vector<int>> blossomchilds_, blossomendps_, blossombestedges_;
    std::vector<char> has_bestedges_;
    std::vector<int> bestedge_, unused_;
    std::vector<long long> dualvar_;
    std::vector<char> allowedge_;
    std::vector<int> queue_;

    long long slack(int k) const {
        const auto& e = edges_[static_cast<std::size_t>(k)];
        return dualvar_[e.i] + dualvar_[e.j] - 2 * e.w;
    }

    void leaves(int b, std::vector<int>& out) const {
        if (b < nv_) {
            out.push_back(b);
            return;
        }
        for (int t : blossomchilds_[b]) leaves(t, out);
    }
    std::vector<int> leaves(int b) const {
        std::vector<int> out;
        leaves(b, out);
        return out;
    }

    void assign_label(int w, int t, int p) {
        const int b = inblossom_[w];
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            leaves(b, queue_);
        } else if (t == 2) {
            const int base = blossombase_[b];
            assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
        }
    }

    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            path.push_back(b);
            label_[b] = 5;
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = edges_[k].i;
        int w = edges_[k].j;
        const int bb = inblossom_[base];
        int bv = inblossom_[v];
        int bw = inblossom_[w];
        const int b = unused_.back();
        unused_.pop_back();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;
        auto& path = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        path.clear();
        endps.clear();
        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }
        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dualvar_[b] = 0;
        for (int leaf : leaves(b)) {
            if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
            inblossom_[leaf] = b;
        }
        std::vector<int> bestedgeto(static_cast<std::size_t>(2 * nv_), -1);
        for (int sub : path) {
            std::vector<std::vector<int>> nblists;
            if (!has_bestedges_[sub]) {
                for (int leaf : leaves(sub)) {
                    std::vector<int> l;
                    for (int p : neighbend_[leaf]) l.push_back(p / 2);
                    nblists.push_back(std::move(l));
                }
            } else {
                nblists.push_back(blossombestedges_[sub]);
            }
            for (const auto& nblist : nblists) {
                for (int kk : nblist) {
                    int i = edges_[kk].i;
                    int j = edges_[kk].j;
                    if (inblossom_[j] == b) std::swap(i, j);
                    const int bj = inblossom_[j];
                    if (bj != b && label_[bj] == 1 &&
                        (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj]))) {
                        bestedgeto[bj] = kk;
                    }
                }
            }
            blossombestedges_[sub].clear();
            has_bestedges_[sub] = 0;
            bestedge_[sub] = -1;
        }
        blossombestedges_[b].clear();
        for (int kk : bestedgeto) {
            if (kk != -1) blossombestedges_[b].push_back(kk);
        }
        has_bestedges_[b] = 1;
        bestedge_[b] = -1;
        for (int kk : blossombestedges_[b]) {
            if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
        }
    }

    static int at(const std::vector<int>& v, int j) {
        const int n = static_cast<int>(v.size());
        return v[static_cast<std::size_t>(((j % n) + n) % n)];
    }

    void expand_blossom(int b, bool endstage) {
        for (int s : blossomchilds_[b]) {
            blossomparent_[s] = -1;
            if (s < nv_) {
                inblossom_[s] = s;
            } else if (endstage && dualvar_[s] == 0) {
                expand_blossom(s, endstage);
            } else {
                for (int leaf : leaves(s)) inblossom_[leaf] = s;
            }
        }
        if (!endstage && label_[b] == 2) {
            const auto& childs = blossomchilds_[b];
            const auto& endps = blossomendps_[b];
            const int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            int j = static_cast<int>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
            int jstep, endptrick;
            if (j & 1) {
                j -= static_cast<int>(childs.size());
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            int p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[at(endps, j - endptrick) ^ endptrick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allowedge_[at(endps, j - endptrick) / 2] = 1;
                j += jstep;
                p = at(endps, j - endptrick) ^ endptrick;
                allowedge_[p / 2] = 1;
                j += jstep;
            }
            int bv = at(childs, j);
            label_[endpoint_[p ^ 1]] = label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (at(childs, j) != entrychild) {
                bv = at(childs, j);
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                int found = -1;
                for (int leaf : leaves(bv)) {
                    if (label_[leaf] != 0) {
                        found = leaf;
                        break;
                    }
                }
                if (found != -1) {
                    label_[found] = 0;
                    label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
                    assign_label(found, 2, labelend_[found]);
                }
                j += jstep;
            }
        }
        label_[b] = labelend_[b] = -1;
        blossomchilds_[b].clear();
        blossomendps_[b].clear();
        blossombase_[b] = -1;
        blossombestedges_[b].clear();
        has_bestedges_[b] = 0;
        bestedge_[b] = -1;
        unused_.push_back(b);
    }

    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= nv_) augment_blossom(t, v);
        auto& childs = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        const int i = static_cast<int>(std::find(childs.begin(), childs.end(), t) - childs.begin());
        int j = i;
        int jstep, endptrick;
        if (i & 1) {
            j -= static_cast<int>(childs.size());
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        while (j != 0) {
            j += jstep;
            t = at(childs, j);
            const int p = at(endps, j - endptrick) ^ endptrick;
            if (t >= nv_) augment_blossom(t, endpoint_[p]);
            j += jstep;
            t = at(childs, j);
            if (t >= nv_) augment_blossom(t, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(childs.begin(), childs.begin() + i, childs.end());
        std::rotate(endps.begin(), endps.begin() + i, endps.end());
        blossombase_[b] = blossombase_[childs[0]];
    }

    void augment_matching(int k) {
        const int v = edges_[k].i;
        const int w = edges_[k].j;
        for (auto [s, p] : {std::pair{v, 2 * k + 1}, std::pair{w, 2 * k}}) {
            for (;;) {
                const int bs = inblossom_[s];
                if (bs >= nv_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                const int t = endpoint_[labelend_[bs]];
                const int bt = inblossom_[t];
                s = endpoint_[labelend_[bt]];
                const int j = endpoint_[labelend_[bt] ^ 1];
                if (bt >= nv_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }
};

std::vector<int> Blossom::run() {
    const int n = nv_;
    const int ne = static_cast<int>(edges_.size());
    if (ne == 0) return std::vector<int>(static_cast<std::size_t>(n), -1);
    long long maxweight = 0;
    for (const auto& e : edges_) maxweight = std::max(maxweight, e.w);

    endpoint_.resize(static_cast<std::size_t>(2 * ne));
    for (int p = 0; p < 2 * ne; ++p) endpoint_[p] = (p % 2 == 0) ? edges_[p / 2].i : edges_[p / 2].j;
    neighbend_.assign(static_cast<std::size_t>(n), {});
    for (int k = 0; k < ne; ++k) {
        neighbend_[edges_[k].i].push_back(2 * k + 1);
        neighbend_[edges_[k].j].push_back(2 * k);
    }
    mate_.assign(static_cast<std::size_t>(n), -1);
    label_.assign(static_cast<std::size_t>(2 * n), 0);
    labelend_.assign(static_cast<std::size_t>(2 * n), -1);
    inblossom_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) inblossom_[i] = i;
    blossomparent_.assign(static_cast<std::size_t>(2 * n), -1);
    blossomchilds_.assign(static_cast<std::size_t>(2 * n), {});
    blossombase_.assign(static_cast<std::size_t>(2 * n), -1);
    for (int i = 0; i < n; ++i) blossombase_[i] = i;
    blossomendps_.assign(static_cast<std::size_t>(2 * n), {});
    bestedge_.assign(static_cast<std::size_t>(2 * n), -1);
    blossombestedges_.assign(static_cast<std::size_t>(2 * n), {});
    has_bestedges_.assign(static_cast<std::size_t>(2 * n), 0);
    unused_.clear();
    for (int b = n; b < 2 * n; ++b) unused_.push_back(b);
    dualvar_.assign(static_cast<std::size_t>(2 * n), 0);
    for (int i = 0; i < n; ++i) dualvar_[i] = maxweight;
    allowedge_.assign(static_cast<std::size_t>(ne), 0);

    for (int stage = 0; stage < n; ++stage) {
        std::fill(label_.begin(), label_.end(), 0);
        std::fill(bestedge_.begin(), bestedge_.end(), -1);
        for (int b = n; b < 2 * n; ++b) {
            blossombestedges_[b].clear();
            has_bestedges_[b] = 0;
        }
        std::fill(allowedge_.begin(), allowedge_.end(), 0);
        queue_.clear();
        for (int v = 0; v < n; ++v) {
            if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);
        }
        bool augmented = false;
        for (;;) {
            while (!queue_.empty() && !augmented) {
                const int v = queue_.back();
                queue_.pop_back();
                for (int p : neighbend_[v]) {
                    const int k = p / 2;
                    const int w = endpoint_[p];
                    if (inblossom_[v] == inblossom_[w]) continue;
                    long long kslack = 0;
                    if (!allowedge_[k]) {
                        kslack = slack(k);
                        if (kslack <= 0) allowedge_[k] = 1;
                    }
                    if (allowedge_[k]) {
                        if (label_[inblossom_[w]] == 0) {
                            assign_label(w, 2, p ^ 1);
                        } else if (label_[inblossom_[w]] == 1) {
                            const int base = scan_blossom(v, w);
                            if (base >= 0) {
                                add_blossom(base, k);
                            } else {
                                augment_matching(k);
                                augmented = true;
                                break;
                            }
                        } else if (label_[w] == 0) {
                            label_[w] = 2;
                            labelend_[w] = p ^ 1;
                        }
                    } else if (label_[inblossom_[w]] == 1) {
                        const int b = inblossom_[v];
                        if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
                    } else if (label_[w] == 0) {
                        if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
                    }
                }
            }
            if (augmented) break;

            int deltatype = -1;
            long long delta = 0;
            int deltaedge = -1;
            int deltablossom = -1;
            if (!max_card_) {
                deltatype = 1;
                delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + n);
            }
            for (int v = 0; v < n; ++v) {
                if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                    const long long d = slack(bestedge_[v]);
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 2;
                        deltaedge = bestedge_[v];
                    }
                }
            }
            for (int b = 0; b < 2 * n; ++b) {
                if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                    const long long d = slack(bestedge_[b]) / 2;
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 3;
                        deltaedge = bestedge_[b];
                    }
                }
            }
            for (int b = n; b < 2 * n; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                    (deltatype == -1 || dualvar_[b] < delta)) {
                    delta = dualvar_[b];
                    deltatype = 4;
                    deltablossom = b;
                }
            }
            if (deltatype == -1) {
                deltatype = 1;
                delta = std::max<long long>(0, *std::min_element(dualvar_.begin(), dualvar_.begin() + n));
            }
            for (int v = 0; v < n; ++v) {
                if (label_[inblossom_[v]] == 1) {
                    dualvar_[v] -= delta;
                } else if (label_[inblossom_[v]] == 2) {
                    dualvar_[v] += delta;
                }
            }
            for (int b = n; b < 2 * n; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                    if (label_[b] == 1) {
                        dualvar_[b] += delta;
                    } else if (label_[b] == 2) {
                        dualvar_[b] -= delta;
                    }
                }
            }
            if (deltatype == 1) break;
            if (deltatype == 2) {
                allowedge_[deltaedge] = 1;
                int i = edges_[deltaedge].i;
                int j = edges_[deltaedge].j;
                if (label_[inblossom_[i]] == 0) std::swap(i, j);
                queue_.push_back(i);
            } else if (deltatype == 3) {
                allowedge_[deltaedge] = 1;
                queue_.push_back(edges_[deltaedge].i);
            } else {
                expand_blossom(deltablossom, false);
            }
        }
        if (!augmented) break;
        for (int b = n; b < 2 * n; ++b) {
            if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dualvar_[b] == 0) {
                expand_blossom(b, true);
            }
        }
    }
    std::vector<int> mate(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v) {
        if (mate_[v] >= 0) mate[v] = endpoint_[mate_[v]];
    }
    return mate;
}

Matching from_mate(const RMatrix& w, const std::vector<int>& mate) {
    Matching m;
    for (int i = 0; i < static_cast<int>(mate.size()); ++i) {
        if (mate[i] > i) m.pairs.emplace_back(i, mate[i]);
    }
    m.weight = matching_weight(w, m.pairs);
    return m;
}

}  // namespace

std::vector<int> max_weight_matching(int n_vertices, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality) {
    for (const auto& e : edges) {
        if (e.i < 0 || e.j < 0 || e.i >= n_vertices || e.j >= n_vertices || e.i == e.j) {
            throw InvalidInput("max_weight_matching: invalid edge");
        }
    }
    return Blossom(n_vertices, edges, max_cardinality).run();
}

double matching_weight(const RMatrix& w, const std::vector<std::pair<int, int>>& pairs) {
    double s = 0.0;
    for (auto [i, j] : pairs) s += w(i, j);
    return s;
}

Matching min_weight_matching_dp(const RMatrix& w) {
    check_square_even(w, "min_weight_matching_dp");
    const int n = static_cast<int>(w.rows());
    if (n > 24) throw InvalidInput("min_weight_matching_dp: too many vertices for subset DP");
    const std::uint32_t full = (n == 32) ? 0xffffffffu : ((1u << n) - 1u);
    // best[mask] = optimal weight of matching the vertices in `mask`.
    std::vector<double> best(std::size_t{1} << n, std::numeric_limits<double>::infinity());
    best[0] = 0.0;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        if (std::popcount(mask) % 2 != 0) continue;
        const int i = std::countr_zero(mask);
        const std::uint32_t rest = mask & ~(1u << i);
        double b = std::numeric_limits<double>::infinity();
        for (std::uint32_t r = rest; r; r &= r - 1) {
            const int j = std::countr_zero(r);
            const double v = w(i, j) + best[rest & ~(1u << j)];
            if (v < b) b = v;
        }
        best[mask] = b;
    }
    Matching m;
    std::uint32_t mask = full;
    while (mask) {
        const int i = std::countr_zero(mask);
        const std::uint32_t rest = mask & ~(1u << i);
        for (std::uint32_t r = rest; r; r &= r - 1) {
            const int j = std::countr_zero(r);
            if (w(i, j) + best[rest & ~(1u << j)] == best[mask]) {
                m.pairs.emplace_back(i, j);
                mask = rest & ~(1u << j);
                break;
            }
        }
    }
    m.weight = matching_weight(w, m.pairs);
    return m;
}

Matching min_weight_matching_blossom(const RMatrix& w) {
    check_square_even(w, "min_weight_matching_blossom");
    const int n = static_cast<int>(w.rows());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!std::isfinite(w(i, j))) throw InvalidInput("min_weight_matching_blossom: non-finite weight");
            lo = std::min(lo, w(i, j));
            hi = std::max(hi, w(i, j));
        }
    }
    // Maximise sum (hi - w) over maximum-cardinality (perfect) matchings.
    const double span = hi - lo;
    const double scale = span > 0.0 ? std::ldexp(1.0, 40) / span : 1.0;
    std::vector<WeightedEdge> edges;
    edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            edges.push_back({i, j, 1 + std::llround((hi - w(i, j)) * scale)});
        }
    }
    return from_mate(w, max_weight_matching(n, edges, true));
}

Matching min_weight_perfect_matching(const RMatrix& w, int dp_limit) {
    check_square_even(w, "min_weight_perfect_matching");
    const int n = static_cast<int>(w.rows());
    double max_finite = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::isnan(w(i, j))) throw InvalidInput("min_weight_perfect_matching: NaN weight");
            if (std::abs(w(i, j) - w(j, i)) > 1e-12 * std::max(1.0, std::abs(w(i, j))) &&
                !(std::isinf(w(i, j)) && std::isinf(w(j, i)))) {
                throw InvalidInput("min_weight_perfect_matching: matrix is not symmetric");
            }
            if (std::isfinite(w(i, j))) max_finite = std::max(max_finite, std::abs(w(i, j)));
        }
    }
    const double sentinel = 1e6 * std::max(1.0, max_finite);
    RMatrix c = w;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && std::isinf(c(i, j))) c(i, j) = sentinel;
        }
        c(i, i) = 0.0;
    }
    Matching m = n <= dp_limit ? min_weight_matching_dp(c) : min_weight_matching_blossom(c);
    std::string bad;
    for (auto [i, j] : m.pairs) {
        if (std::isinf(w(i, j))) bad += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
    }
    if (!bad.empty()) {
        throw InfeasibleError("min_weight_perfect_matching: no finite perfect matching; forced pairs" + bad);
    }
    m.weight = matching_weight(w, m.pairs);
    return m;
}

}  // namespace vamos
