#include "bitext/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "bitext/io.hpp"

namespace bitext {

static_assert(std::endian::native == std::endian::little,
              "embedding files are read without byte swapping");

EmbeddingSet::EmbeddingSet(EmbeddingMatrix vectors, Side side, Origin origin)
    : vectors_(std::move(vectors)), side_(side), origin_(origin) {
  for (Eigen::Index i = 0; i < vectors_.rows(); ++i) {
    const double norm = vectors_.row(i).cast<double>().norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DataError("embedding row " + std::to_string(i) + " has zero or non-finite norm");
    }
    vectors_.row(i) = (vectors_.row(i).cast<double>() / norm).cast<float>();
  }
}

EmbeddingSet load_embeddings(const std::filesystem::path& path, std::size_t dim, Side side,
                             Origin origin) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  const std::string bytes = read_file(path);
  const std::size_t row_bytes = dim * sizeof(float);
  if (bytes.empty() || bytes.size() % row_bytes != 0) {
    throw FormatError(path.string() + ": size " + std::to_string(bytes.size()) +
                      " is not a positive multiple of " + std::to_string(row_bytes) + " bytes");
  }
  const auto rows = static_cast<Eigen::Index>(bytes.size() / row_bytes);
  EmbeddingMatrix m(rows, static_cast<Eigen::Index>(dim));
  std::memcpy(m.data(), bytes.data(), bytes.size());
  try {
    return EmbeddingSet(std::move(m), side, origin);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_embeddings(const EmbeddingMatrix& vectors, const std::filesystem::path& path) {
  std::string bytes(static_cast<std::size_t>(vectors.size()) * sizeof(float), '\0');
  std::memcpy(bytes.data(), vectors.data(), bytes.size());
  write_file_atomic(path, bytes);
}

}  // namespace bitext
