#pragma once

#include "genmetrics/embedding_set.hpp"

#include <filesystem>

namespace genmetrics {

enum class FileFormat { npy, rawbin };

/// Maps "npy"/"rawbin" to FileFormat, or infers from a path extension
/// (".npy" -> npy, anything else -> rawbin).
FileFormat parse_format(const std::string& name);
FileFormat infer_format(const std::filesystem::path& path);

/// Loads an embedding matrix from disk.
///
/// npy: format v1.0 only, C-contiguous, 2-D, dtype <f4 or <f8.
/// rawbin: 16-byte header (magic "GMEB", u32 N, u32 D, u32 dtype code 4|8),
/// little-endian row-major payload.
///
/// 32-bit storage is promoted to 64-bit working precision. Row order on disk
/// is preserved exactly.
EmbeddingSet load_embeddings(const std::filesystem::path& path, FileFormat format,
                             std::string label = {});

/// Writes set to disk in the given format. 64-bit sets round-trip bitwise.
/// The on-disk dtype follows set.dtype_origin().
void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path,
                     FileFormat format);

/// Row-stacks a's rows followed by b's rows. Dimensions must match.
EmbeddingSet concat(const EmbeddingSet& a, const EmbeddingSet& b);

/// Deterministic subsample: keeps the first n rows.
EmbeddingSet prefix_subsample(const EmbeddingSet& set, Index n);

} // namespace genmetrics
