#include "genmetrics/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace genmetrics {
namespace {

void require_radii_match(const EmbeddingSet& ref, const KnnRadii& radii) {
    if (radii.source_n != ref.n() ||
        radii.radii.size() != static_cast<std::size_t>(ref.n())) {
        throw ValidationError("radii were computed from a set of " +
                              std::to_string(radii.source_n) + " samples, reference has " +
                              std::to_string(ref.n()));
    }
}

// Chunked sweep of squared distances between query rows and reference rows.
// row_fn(i, d2_row, j0, j1) sees one contiguous slice of squared distances
// for query row i, column chunks arriving in index order; returning true
// marks the row finished so later chunks are skipped for it.
template <class RowFn>
void sweep_sq(const Matrix& Q, const Matrix& R, const ExecPolicy& policy, RowFn row_fn) {
    const Index nq = Q.rows();
    const Index nr = R.rows();
    const Index row_chunk = std::max<Index>(policy.chunk.row_chunk, 1);
    const Index col_chunk = policy.chunk.col_chunk > 0 ? policy.chunk.col_chunk : nr;

    parallel_chunk_grid(nq, row_chunk, policy.resolved_threads(), [&](Index r0, Index r1) {
        std::vector<char> done(static_cast<std::size_t>(r1 - r0), 0);
        Index remaining = r1 - r0;
        for (Index c0 = 0; c0 < nr && remaining > 0; c0 += col_chunk) {
            const Index c1 = std::min(nr, c0 + col_chunk);
            const Matrix block = pairwise_sq_block(Q, r0, r1, R, c0, c1);
            for (Index i = r0; i < r1; ++i) {
                if (done[static_cast<std::size_t>(i - r0)]) continue;
                const double* row = block.data() +
                    static_cast<std::size_t>(i - r0) * static_cast<std::size_t>(c1 - c0);
                if (row_fn(i, row, c0, c1)) {
                    done[static_cast<std::size_t>(i - r0)] = 1;
                    --remaining;
                }
            }
        }
    });
}

std::vector<double> squared(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
    return out;
}

} // namespace

ScoreVector bsr_scores(const EmbeddingSet& query, const EmbeddingSet& ref,
                       const KnnRadii& radii, const ExecPolicy& policy) {
    require_same_dim(query, ref);
    require_radii_match(ref, radii);
    const std::vector<double> r2 = squared(radii.radii);

    ScoreVector out{std::vector<double>(static_cast<std::size_t>(query.n()), 0.0),
                    ScoreRule::bsr};
    sweep_sq(query.data(), ref.data(), policy,
             [&](Index i, const double* d2, Index j0, Index j1) {
                 for (Index j = j0; j < j1; ++j) {
                     if (d2[j - j0] <= r2[static_cast<std::size_t>(j)]) {
                         out.scores[static_cast<std::size_t>(i)] = 1.0;
                         return true;
                     }
                 }
                 return false;
             });
    return out;
}

ScoreVector dsr_scores(const EmbeddingSet& query, const EmbeddingSet& ref,
                       const KnnRadii& radii, int k, const ExecPolicy& policy) {
    require_same_dim(query, ref);
    require_radii_match(ref, radii);
    if (k != radii.k) {
        throw ValidationError("dsr k=" + std::to_string(k) +
                              " does not match radii k=" + std::to_string(radii.k));
    }
    const std::vector<double> r2 = squared(radii.radii);

    std::vector<double> counts(static_cast<std::size_t>(query.n()), 0.0);
    sweep_sq(query.data(), ref.data(), policy,
             [&](Index i, const double* d2, Index j0, Index j1) {
                 double c = counts[static_cast<std::size_t>(i)];
                 for (Index j = j0; j < j1; ++j) {
                     if (d2[j - j0] <= r2[static_cast<std::size_t>(j)]) c += 1.0;
                 }
                 counts[static_cast<std::size_t>(i)] = c;
                 return false;
             });
    for (double& c : counts) c /= static_cast<double>(k);
    return {std::move(counts), ScoreRule::dsr};
}

ScoreVector csr_scores(const EmbeddingSet& realset, const KnnRadii& radii,
                       const EmbeddingSet& fakeset, const ExecPolicy& policy) {
    require_same_dim(realset, fakeset);
    require_radii_match(realset, radii);
    const std::vector<double> r2 = squared(radii.radii);

    ScoreVector out{std::vector<double>(static_cast<std::size_t>(realset.n()), 0.0),
                    ScoreRule::csr};
    sweep_sq(realset.data(), fakeset.data(), policy,
             [&](Index i, const double* d2, Index j0, Index j1) {
                 const double ri2 = r2[static_cast<std::size_t>(i)];
                 for (Index j = j0; j < j1; ++j) {
                     if (d2[j - j0] <= ri2) {
                         out.scores[static_cast<std::size_t>(i)] = 1.0;
                         return true;
                     }
                 }
                 return false;
             });
    return out;
}

double membership_prob(double d, const ThresholdRadius& R) {
    if (d < 0.0) throw ValidationError("distance must be non-negative");
    if (R.value == 0.0) return d == 0.0 ? 1.0 : 0.0;
    return d <= R.value ? 1.0 - d / R.value : 0.0;
}

ThresholdRadius threshold_radius(const KnnRadii& radii, double a,
                                 const std::string& source_label) {
    if (a <= 0.0) throw ValidationError("threshold multiplier a must be positive");
    return {a * mean_radius(radii), a, radii.k, source_label};
}

ThresholdRadius threshold_radius(const EmbeddingSet& ref, int k, double a,
                                 const ExecPolicy& policy) {
    return threshold_radius(knn_radii(ref, k, policy), a, ref.label());
}

ScoreVector psr_scores(const EmbeddingSet& query, const EmbeddingSet& ref,
                       const ThresholdRadius& R, const ExecPolicy& policy) {
    require_same_dim(query, ref);
    const double Rv = R.value;
    const double R2 = Rv * Rv;

    // product of (1 - membership) per query row, reference index order
    std::vector<double> product(static_cast<std::size_t>(query.n()), 1.0);
    sweep_sq(query.data(), ref.data(), policy,
             [&](Index i, const double* d2, Index j0, Index j1) {
                 double p = product[static_cast<std::size_t>(i)];
                 for (Index j = j0; j < j1; ++j) {
                     const double dd = d2[j - j0];
                     if (dd == 0.0) {        // exact coincidence: score is 1
                         product[static_cast<std::size_t>(i)] = 0.0;
                         return true;
                     }
                     if (dd >= R2) continue; // membership 0, factor 1
                     p *= std::sqrt(dd) / Rv;
                 }
                 product[static_cast<std::size_t>(i)] = p;
                 return false;
             });

    ScoreVector out{std::move(product), ScoreRule::psr};
    for (double& s : out.scores) s = 1.0 - s;
    return out;
}

} // namespace genmetrics
