#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace vamos {

struct Axis {
    std::string name;
    std::vector<double> points;  // strictly increasing

    std::size_t size() const { return points.size(); }
    bool operator==(const Axis& other) const = default;
};

/// Evenly spaced grid lo, lo + step, ..., up to hi (inclusive within step/1e6).
std::vector<double> linspace_step(double lo, double hi, double step);

enum class TableType : std::uint32_t { stage1 = 1, stage2 = 2, rra = 3, single = 4 };

const char* to_string(TableType type);

/// Dense N-dimensional table over rectilinear axes with row-major values
/// (last axis fastest), multilinear interpolation and boundary clamping.
class GridTable {
public:
    GridTable() = default;
    GridTable(TableType type, std::vector<Axis> axes, std::string receiver = {},
              std::string label = {});

    TableType type() const { return type_; }
    const std::string& receiver() const { return receiver_; }
    const std::string& label() const { return label_; }
    std::map<std::string, std::string>& meta() { return meta_; }
    const std::map<std::string, std::string>& meta() const { return meta_; }

    std::size_t dims() const { return axes_.size(); }
    const Axis& axis(std::size_t d) const { return axes_.at(d); }
    const std::vector<Axis>& axes() const { return axes_; }
    std::size_t size() const { return values_.size(); }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    std::size_t flat_index(const std::vector<std::size_t>& idx) const;
    std::vector<std::size_t> unflatten(std::size_t flat) const;
    std::size_t stride(std::size_t d) const;

    double at(const std::vector<std::size_t>& idx) const { return values_[flat_index(idx)]; }
    double& at(const std::vector<std::size_t>& idx) { return values_[flat_index(idx)]; }

    /// Multilinear interpolation; coordinates outside an axis are clamped.
    double interpolate(const double* point) const;
    double interpolate(const std::vector<double>& point) const;

    /// Structural checks: strictly increasing non-empty axes, value count,
    /// finite values within [lo, hi].
    void validate(double lo = 0.0, double hi = 1.0) const;

    void save(const std::string& path) const;
    static GridTable load(const std::string& path);
    void write(std::ostream& os) const;
    static GridTable read(std::istream& is);

    /// One row per node: axis coordinates then value.
    void write_csv(std::ostream& os) const;

    bool operator==(const GridTable& other) const = default;

private:
    TableType type_ = TableType::stage1;
    std::string receiver_;
    std::string label_;
    std::map<std::string, std::string> meta_;
    std::vector<Axis> axes_;
    std::vector<double> values_;
};

/// Pool-adjacent-violators fit: the non-decreasing sequence closest in
/// least squares to `y` (equal weights).
std::vector<double> isotonic_increasing(const std::vector<double>& y);
std::vector<double> isotonic_decreasing(const std::vector<double>& y);

/// Applies an isotonic fit along axis `d` for every line of the table.
void isotonic_along(GridTable& table, std::size_t d, bool increasing);

/// Formats a double with 17 significant digits.
std::string format_double(double x);

}  // namespace vamos
