#include "vamos/grid_table.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "vamos/types.hpp"

namespace vamos {

static_assert(std::endian::native == std::endian::little,
              "table files are little-endian; add byte swapping for this platform");

namespace {

constexpr char kMagic[8] = {'V', 'A', 'M', 'O', 'S', 'T', 'B', 'L'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw InvalidInput("table file truncated");
    return v;
}

void put_string(std::ostream& os, const std::string& s) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
    const auto n = get<std::uint32_t>(is);
    if (n > (1u << 20)) throw InvalidInput("table file: implausible string length");
    std::string s(n, '\0');
    if (n && !is.read(s.data(), n)) throw InvalidInput("table file truncated");
    return s;
}

}  // namespace

std::vector<double> linspace_step(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw InvalidInput("linspace_step: need step > 0 and hi >= lo");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-6));
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

const char* to_string(TableType type) {
    switch (type) {
        case TableType::stage1: return "stage1";
        case TableType::stage2: return "stage2";
        case TableType::rra: return "rra";
        case TableType::single: return "single";
    }
    return "?";
}

GridTable::GridTable(TableType type, std::vector<Axis> axes, std::string receiver,
                     std::string label)
    : type_(type), receiver_(std::move(receiver)), label_(std::move(label)), axes_(std::move(axes)) {
    std::size_t n = 1;
    for (const auto& a : axes_) n *= a.size();
    values_.assign(n, 0.0);
}

std::size_t GridTable::stride(std::size_t d) const {
    std::size_t s = 1;
    for (std::size_t k = d + 1; k < axes_.size(); ++k) s *= axes_[k].size();
    return s;
}

std::size_t GridTable::flat_index(const std::vector<std::size_t>& idx) const {
    if (idx.size() != axes_.size()) throw InvalidInput("GridTable: index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t d = 0; d < axes_.size(); ++d) {
        if (idx[d] >= axes_[d].size()) throw InvalidInput("GridTable: index out of range");
        flat = flat * axes_[d].size() + idx[d];
    }
    return flat;
}

std::vector<std::size_t> GridTable::unflatten(std::size_t flat) const {
    std::vector<std::size_t> idx(axes_.size());
    for (std::size_t d = axes_.size(); d-- > 0;) {
        idx[d] = flat % axes_[d].size();
        flat /= axes_[d].size();
    }
    return idx;
}

double GridTable::interpolate(const std::vector<double>& point) const {
    if (point.size() != axes_.size()) {
        throw InvalidInput("GridTable::interpolate: expected " + std::to_string(axes_.size()) +
                           " coordinates, got " + std::to_string(point.size()));
    }
    return interpolate(point.data());
}

double GridTable::interpolate(const double* point) const {
    const std::size_t nd = axes_.size();
    // Per axis: lower node, weight of the upper node.
    std::size_t lo[16];
    double t[16];
    std::size_t st[16];
    if (nd > 16) throw InvalidInput("GridTable::interpolate: too many dimensions");
    for (std::size_t d = 0; d < nd; ++d) {
        const auto& p = axes_[d].points;
        st[d] = stride(d);
        if (p.size() == 1) {
            lo[d] = 0;
            t[d] = 0.0;
            continue;
        }
        const double x = std::clamp(point[d], p.front(), p.back());
        auto it = std::upper_bound(p.begin(), p.end(), x);
        std::size_t i = static_cast<std::size_t>(it - p.begin());
        i = std::min(std::max<std::size_t>(i, 1), p.size() - 1) - 1;
        lo[d] = i;
        t[d] = (x - p[i]) / (p[i + 1] - p[i]);
    }
    double acc = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << nd); ++corner) {
        double w = 1.0;
        std::size_t flat = 0;
        for (std::size_t d = 0; d < nd; ++d) {
            const bool up = (corner >> d) & 1u;
            if (up && axes_[d].size() == 1) {
                w = 0.0;
                break;
            }
            w *= up ? t[d] : 1.0 - t[d];
            flat += (lo[d] + (up ? 1 : 0)) * st[d];
        }
        if (w != 0.0) acc += w * values_[flat];
    }
    return acc;
}

void GridTable::validate(double lo, double hi) const {
    std::size_t n = 1;
    for (const auto& a : axes_) {
        if (a.points.empty()) throw InvalidInput("table axis '" + a.name + "' is empty");
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            if (!std::isfinite(a.points[i])) throw InvalidInput("table axis '" + a.name + "' has a non-finite node");
            if (i > 0 && !(a.points[i] > a.points[i - 1])) {
                throw InvalidInput("table axis '" + a.name + "' is not strictly increasing");
            }
        }
        n *= a.size();
    }
    if (n != values_.size()) {
        throw InvalidInput("table holds " + std::to_string(values_.size()) + " values, axes need " +
                           std::to_string(n));
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < lo || v > hi) {
            throw InvalidInput("table value " + format_double(v) + " outside [" + format_double(lo) +
                               ", " + format_double(hi) + "]");
        }
    }
}

void GridTable::write(std::ostream& os) const {
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(type_));
    put_string(os, receiver_);
    put_string(os, label_);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(meta_.size()));
    for (const auto& [k, v] : meta_) {
        put_string(os, k);
        put_string(os, v);
    }
    put<std::uint32_t>(os, static_cast<std::uint32_t>(axes_.size()));
    for (const auto& a : axes_) {
        put_string(os, a.name);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(a.points.size()));
        for (double p : a.points) put<double>(os, p);
    }
    put<std::uint64_t>(os, values_.size());
    for (double v : values_) put<double>(os, v);
}

GridTable GridTable::read(std::istream& is) {
    char magic[sizeof kMagic];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw InvalidInput("not a table file (bad magic)");
    }
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion) throw InvalidInput("unsupported table version " + std::to_string(version));
    GridTable t;
    const auto type = get<std::uint32_t>(is);
    if (type < 1 || type > 4) throw InvalidInput("unknown table type " + std::to_string(type));
    t.type_ = static_cast<TableType>(type);
    t.receiver_ = get_string(is);
    t.label_ = get_string(is);
    const auto n_meta = get<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        auto k = get_string(is);
        t.meta_[k] = get_string(is);
    }
    const auto n_axes = get<std::uint32_t>(is);
    if (n_axes > 16) throw InvalidInput("table file: too many axes");
    for (std::uint32_t d = 0; d < n_axes; ++d) {
        Axis a;
        a.name = get_string(is);
        const auto n = get<std::uint32_t>(is);
        if (n > (1u << 24)) throw InvalidInput("table file: implausible axis length");
        a.points.resize(n);
        for (auto& p : a.points) p = get<double>(is);
        t.axes_.push_back(std::move(a));
    }
    const auto n_values = get<std::uint64_t>(is);
    if (n_values > (std::uint64_t{1} << 32)) throw InvalidInput("table file: implausible value count");
    t.values_.resize(n_values);
    for (auto& v : t.values_) v = get<double>(is);
    t.validate(-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
    return t;
}

void GridTable::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write(os);
    if (!os) throw Error("failed writing '" + path + "'");
}

GridTable GridTable::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open table '" + path + "'");
    return read(is);
}

void GridTable::write_csv(std::ostream& os) const {
    os << "# type=" << to_string(type_) << " receiver=" << receiver_ << " label=" << label_ << '\n';
    for (const auto& a : axes_) os << a.name << ',';
    os << "value\n";
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const auto idx = unflatten(i);
        for (std::size_t d = 0; d < axes_.size(); ++d) os << format_double(axes_[d].points[idx[d]]) << ',';
        os << format_double(values_[i]) << '\n';
    }
}

std::vector<double> isotonic_increasing(const std::vector<double>& y) {
    std::vector<double> mean;
    std::vector<std::size_t> count;
    for (double v : y) {
        mean.push_back(v);
        count.push_back(1);
        while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
            const std::size_t n = count[count.size() - 2] + count.back();
            const double m = (mean[mean.size() - 2] * static_cast<double>(count[count.size() - 2]) +
                              mean.back() * static_cast<double>(count.back())) /
                             static_cast<double>(n);
            mean.pop_back();
            count.pop_back();
            mean.back() = m;
            count.back() = n;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (std::size_t b = 0; b < mean.size(); ++b) out.insert(out.end(), count[b], mean[b]);
    return out;
}

std::vector<double> isotonic_decreasing(const std::vector<double>& y) {
    std::vector<double> neg(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) neg[i] = -y[i];
    auto fit = isotonic_increasing(neg);
    for (auto& v : fit) v = -v;
    return fit;
}

void isotonic_along(GridTable& table, std::size_t d, bool increasing) {
    const std::size_t n = table.axis(d).size();
    const std::size_t s = table.stride(d);
    auto& v = table.values();
    std::vector<double> line(n);
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
        if ((flat / s) % n != 0) continue;  // visit each line once, from its first node
        for (std::size_t i = 0; i < n; ++i) line[i] = v[flat + i * s];
        const auto fit = increasing ? isotonic_increasing(line) : isotonic_decreasing(line);
        for (std::size_t i = 0; i < n; ++i) v[flat + i * s] = fit[i];
    }
}

std::string format_double(double x) {
    std::ostringstream ss;
    ss.precision(17);
    ss << x;
    return ss.str();
}

}  // namespace vamos
