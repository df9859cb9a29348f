#pragma once

#include "genmetrics/embedding_set.hpp"

#include <functional>
#include <vector>

namespace genmetrics {

/// Block sizes for the chunked pairwise-distance sweep. col_chunk == 0 means
/// "all columns in one block". Peak memory is O(row_chunk * col_chunk).
struct ChunkPlan {
    Index row_chunk = 1024;
    Index col_chunk = 0;
};

/// Execution policy shared by all chunked kernels. threads == 0 picks
/// hardware concurrency. Results are bitwise independent of the thread count
/// for a fixed ChunkPlan: threads own disjoint output rows and every per-row
/// reduction runs sequentially in reference index order.
struct ExecPolicy {
    ChunkPlan chunk{};
    int threads = 0;

    int resolved_threads() const;
};

/// Per-sample distance to the k-th nearest neighbor within one set,
/// self excluded.
struct KnnRadii {
    std::vector<double> radii;
    int k = 0;
    Index source_n = 0;
};

/// Dense Euclidean distance block between rows [r0, r1) of A and all rows
/// of B. Entry (i, j) = ||A[r0+i] - B[j]||_2, 64-bit accumulation, tiny
/// negative radicands from the expanded form clamped to zero.
Matrix pairwise_block(const EmbeddingSet& A, Index r0, Index r1,
                      const EmbeddingSet& B);

/// Same block in squared distances; the scoring sweeps work on these and
/// take square roots only where needed.
Matrix pairwise_sq_block(const Matrix& A, Index r0, Index r1,
                         const Matrix& B, Index c0, Index c1);

/// radii[i] = k-th smallest of {d(x_i, x_m) : m != i}. Ties count toward k
/// (the radius is the k-th order statistic including tied distances).
/// Memory stays O(row_chunk * col_chunk), never O(N^2).
KnnRadii knn_radii(const EmbeddingSet& X, int k, const ExecPolicy& policy = {});

/// Arithmetic mean of knn_radii, summed in index order.
double mean_knn_radius(const EmbeddingSet& X, int k, const ExecPolicy& policy = {});
double mean_radius(const KnnRadii& radii);

/// Splits [0, n) into per-thread contiguous ranges and runs fn(begin, end)
/// on each. Used by nn-core and the scoring sweeps.
void parallel_row_ranges(Index n, int threads,
                         const std::function<void(Index, Index)>& fn);

/// Runs fn(r0, r1) once per chunk of the fixed global grid {0, row_chunk,
/// 2*row_chunk, ...}, chunks distributed over threads. Because the block
/// boundaries never depend on the thread count, the floating-point work per
/// chunk is identical for any number of threads.
void parallel_chunk_grid(Index n, Index row_chunk, int threads,
                         const std::function<void(Index, Index)>& fn);

} // namespace genmetrics
