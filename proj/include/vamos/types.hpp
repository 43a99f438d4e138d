#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vamos {

using cplx = std::complex<double>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RVector = Vector<double>;
using CVector = Vector<cplx>;
using RMatrix = Matrix<double>;
using CMatrix = Matrix<cplx>;

/// ±1 symbol sequences are stored as real vectors.
using Symbols = RVector;

using Rng = std::mt19937_64;

/// Base for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input rejected by an operation precondition.
struct InvalidInput : Error {
    using Error::Error;
};

/// A least-squares or covariance system is rank deficient.
struct SingularError : Error {
    using Error::Error;
};

/// No finite perfect matching exists for a power matrix.
struct InfeasibleError : Error {
    using Error::Error;
};

/// SplitMix64 finaliser; used to derive independent per-task seeds from a
/// master seed so results never depend on scheduling.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) noexcept {
    return mix_seed(mix_seed(mix_seed(mix_seed(master) ^ a) ^ b) ^ c);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace vamos
