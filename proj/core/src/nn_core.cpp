#include "genmetrics/nn_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace genmetrics {

int ExecPolicy::resolved_threads() const {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_row_ranges(Index n, int threads,
                         const std::function<void(Index, Index)>& fn) {
    const Index nt = std::min<Index>(std::max(threads, 1), n);
    if (nt <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    const Index base = n / nt;
    const Index rem = n % nt;
    Index begin = 0;
    for (Index t = 0; t < nt; ++t) {
        const Index end = begin + base + (t < rem ? 1 : 0);
        pool.emplace_back(fn, begin, end);
        begin = end;
    }
    for (auto& th : pool) th.join();
}

void parallel_chunk_grid(Index n, Index row_chunk, int threads,
                         const std::function<void(Index, Index)>& fn) {
    const Index rc = std::max<Index>(row_chunk, 1);
    const Index nchunks = (n + rc - 1) / rc;
    parallel_row_ranges(nchunks, threads, [&](Index cb, Index ce) {
        for (Index ci = cb; ci < ce; ++ci) {
            const Index r0 = ci * rc;
            fn(r0, std::min(n, r0 + rc));
        }
    });
}

Matrix pairwise_sq_block(const Matrix& A, Index r0, Index r1,
                         const Matrix& B, Index c0, Index c1) {
    const Index nr = r1 - r0;
    const Index nc = c1 - c0;
    Matrix block = -2.0 * (A.middleRows(r0, nr) * B.middleRows(c0, nc).transpose());
    const Eigen::VectorXd an = A.middleRows(r0, nr).rowwise().squaredNorm();
    const Eigen::VectorXd bn = B.middleRows(c0, nc).rowwise().squaredNorm();
    block.colwise() += an;
    block.rowwise() += bn.transpose();
    block = block.cwiseMax(0.0);

    // The expanded form leaves rounding residue of order eps * (|a|^2 + |b|^2)
    // on coincident rows; identical rows must yield an exact zero (closed-ball
    // tests against radius 0 and the coincidence early-exit depend on it).
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (Index i = 0; i < nr; ++i) {
        for (Index j = 0; j < nc; ++j) {
            const double d2 = block(i, j);
            if (d2 == 0.0) continue;
            if (d2 <= 64.0 * eps * (an(i) + bn(j)) &&
                A.row(r0 + i) == B.row(c0 + j)) {
                block(i, j) = 0.0;
            }
        }
    }
    return block;
}

Matrix pairwise_block(const EmbeddingSet& A, Index r0, Index r1, const EmbeddingSet& B) {
    require_same_dim(A, B);
    if (r0 < 0 || r1 > A.n() || r0 >= r1) {
        throw ValidationError("bad row range [" + std::to_string(r0) + ", " +
                              std::to_string(r1) + ") for " + std::to_string(A.n()) + " rows");
    }
    return pairwise_sq_block(A.data(), r0, r1, B.data(), 0, B.n()).cwiseSqrt();
}

KnnRadii knn_radii(const EmbeddingSet& X, int k, const ExecPolicy& policy) {
    const Index n = X.n();
    if (k < 1 || k > n - 1) {
        throw ValidationError("k must satisfy 1 <= k <= N-1, got k=" + std::to_string(k) +
                              " with N=" + std::to_string(n));
    }
    const Matrix& M = X.data();
    const Index row_chunk = std::max<Index>(policy.chunk.row_chunk, 1);
    const Index col_chunk = policy.chunk.col_chunk > 0 ? policy.chunk.col_chunk : n;

    KnnRadii out;
    out.radii.resize(static_cast<std::size_t>(n));
    out.k = k;
    out.source_n = n;

    parallel_chunk_grid(n, row_chunk, policy.resolved_threads(), [&](Index r0, Index r1) {
        // one bounded max-heap of the k smallest squared distances per row
        std::vector<std::vector<double>> heaps(static_cast<std::size_t>(r1 - r0));
        for (auto& h : heaps) h.reserve(static_cast<std::size_t>(k));
        for (Index c0 = 0; c0 < n; c0 += col_chunk) {
            const Index c1 = std::min(n, c0 + col_chunk);
            const Matrix block = pairwise_sq_block(M, r0, r1, M, c0, c1);
            for (Index i = r0; i < r1; ++i) {
                auto& heap = heaps[static_cast<std::size_t>(i - r0)];
                const double* row = block.data() +
                    static_cast<std::size_t>(i - r0) * static_cast<std::size_t>(c1 - c0);
                for (Index j = c0; j < c1; ++j) {
                    if (j == i) continue; // self excluded
                    const double d2 = row[j - c0];
                    if (heap.size() < static_cast<std::size_t>(k)) {
                        heap.push_back(d2);
                        std::push_heap(heap.begin(), heap.end());
                    } else if (d2 < heap.front()) {
                        std::pop_heap(heap.begin(), heap.end());
                        heap.back() = d2;
                        std::push_heap(heap.begin(), heap.end());
                    }
                }
            }
        }
        for (Index i = r0; i < r1; ++i) {
            out.radii[static_cast<std::size_t>(i)] =
                std::sqrt(heaps[static_cast<std::size_t>(i - r0)].front());
        }
    });
    return out;
}

double mean_radius(const KnnRadii& radii) {
    double sum = 0.0;
    for (const double r : radii.radii) sum += r;
    return sum / static_cast<double>(radii.radii.size());
}

double mean_knn_radius(const EmbeddingSet& X, int k, const ExecPolicy& policy) {
    return mean_radius(knn_radii(X, k, policy));
}

} // namespace genmetrics
