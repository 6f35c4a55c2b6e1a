#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace jpa {

template <class Scalar>
using mat_t = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class Scalar>
using vec_t = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = mat_t<double>;
using Vec = vec_t<double>;
using Point2 = Eigen::Vector2d;

/// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before any
/// log-odds conversion so costs stay finite.
inline constexpr double kProbEpsilon = 1e-6;

/// Axis-aligned pixel box. (x0, y0) is the top-left corner in image
/// coordinates, width/height are in pixels.
struct Box {
    int x0 = 0;
    int y0 = 0;
    int width = 0;
    int height = 0;

    double area() const { return static_cast<double>(width) * height; }
    double diagonal() const {
        return std::sqrt(static_cast<double>(width) * width +
                         static_cast<double>(height) * height);
    }
    bool contains(const Point2& p) const {
        return p.x() >= x0 && p.x() < x0 + width && p.y() >= y0 && p.y() < y0 + height;
    }
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or usage. CLI maps this to exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed or inconsistent data (files, instances, solutions). Exit code 3.
struct DataError : Error {
    using Error::Error;
};

/// Instance exceeds a solver's hard size cap; the caller must lower the
/// candidate count or raise the confidence threshold.
struct InstanceTooLargeError : DataError {
    using DataError::DataError;
};

/// Index of the (i, j) entry, i < j, in a packed upper-triangular pair table
/// over n items.
inline std::size_t pair_index(int n, int i, int j) {
    return static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i + 1) / 2 +
           (j - i - 1);
}

inline std::size_t pair_count(int n) {
    return static_cast<std::size_t>(n) * (n - 1) / 2;
}

/// Symmetric per-pair table with the diagonal excluded. Storage is packed
/// upper-triangular with canonical ordering (lower index first), so symmetry
/// is structural rather than an invariant to maintain.
template <class Scalar>
class PairTable {
  public:
    PairTable() = default;
    explicit PairTable(int n, const Scalar& fill = Scalar())
        : n_(n), values_(pair_count(n), fill) {}

    int size() const { return n_; }
    std::size_t pairs() const { return values_.size(); }

    const Scalar& operator()(int i, int j) const { return values_[index(i, j)]; }
    Scalar& operator()(int i, int j) { return values_[index(i, j)]; }

    const std::vector<Scalar>& packed() const { return values_; }
    std::vector<Scalar>& packed() { return values_; }

  private:
    std::size_t index(int i, int j) const {
        if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_)
            throw DataError("pair table index out of range: (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") for n=" + std::to_string(n_));
        if (i > j) std::swap(i, j);
        return pair_index(n_, i, j);
    }

    int n_ = 0;
    std::vector<Scalar> values_;
};

}  // namespace jpa
