#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace genmetrics {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

/// Raised when input data violates a structural invariant (bad shape,
/// non-finite entries, mismatched dimensions).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised on file I/O and format problems.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DtypeOrigin { f32, f64 };

/// An N x D matrix of sample feature vectors. Immutable after construction;
/// safe to share across threads. Storage is always promoted to 64-bit floats.
class EmbeddingSet {
public:
    /// Validates N >= 1, D >= 1 and that every entry is finite.
    EmbeddingSet(Matrix data, std::string label = {},
                 DtypeOrigin dtype_origin = DtypeOrigin::f64);

    const Matrix& data() const { return data_; }
    const std::string& label() const { return label_; }
    DtypeOrigin dtype_origin() const { return dtype_origin_; }

    Index n() const { return data_.rows(); }
    Index dim() const { return data_.cols(); }

private:
    Matrix data_;
    std::string label_;
    DtypeOrigin dtype_origin_;
};

/// Throws ValidationError if a and b have different feature dimensions.
void require_same_dim(const EmbeddingSet& a, const EmbeddingSet& b);

} // namespace genmetrics
