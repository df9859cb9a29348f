#include "genmetrics/embedding_set.hpp"

#include <cmath>

namespace genmetrics {

EmbeddingSet::EmbeddingSet(Matrix data, std::string label, DtypeOrigin dtype_origin)
    : data_(std::move(data)), label_(std::move(label)), dtype_origin_(dtype_origin) {
    if (data_.rows() < 1 || data_.cols() < 1) {
        throw ValidationError("embedding set must have at least one row and one column, got " +
                              std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()));
    }
    for (Index i = 0; i < data_.rows(); ++i) {
        for (Index j = 0; j < data_.cols(); ++j) {
            if (!std::isfinite(data_(i, j))) {
                throw ValidationError("non-finite value at row " + std::to_string(i));
            }
        }
    }
}

void require_same_dim(const EmbeddingSet& a, const EmbeddingSet& b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("feature dimension mismatch: " + std::to_string(a.dim()) +
                              " vs " + std::to_string(b.dim()));
    }
}

} // namespace genmetrics
