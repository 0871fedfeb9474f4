#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "heirag/nutrients.hpp"

namespace heirag {

inline constexpr std::size_t kDefaultEmbeddingDim = 384;
inline constexpr std::string_view kHashScheme = "hash-v1";
inline constexpr std::string_view kExternalScheme = "external";

/// Unit-norm dense vector.
struct EmbeddingVector {
  std::vector<float> values;

  std::size_t dim() const noexcept { return values.size(); }
  std::span<const float> view() const noexcept { return values; }
};

/// Deterministic one-line description of a food: description, then every
/// non-zero component as "<name>: <value> <unit> per serving" in a fixed
/// order, then energy. Segments are joined by " | ".
std::string render_food_text(const FoodItem& item);

/// 64-bit FNV-1a.
std::uint64_t token_hash(std::string_view token);

/// Embeds text with the given scheme. Only "hash-v1" is built in: signed
/// feature hashing of lowercase alphanumeric tokens plus component magnitude
/// features, L2-normalized. Text that yields no features maps to the unit
/// vector on coordinate 0. Throws ArgumentError when dim < 8 and ConfigError
/// for schemes that cannot embed text locally.
EmbeddingVector embed_text(std::string_view text, std::size_t dim = kDefaultEmbeddingDim,
                           std::string_view scheme = kHashScheme);

/// Exhaustive-scan food index. Rows are unit-norm and aligned with items.
class FoodIndex {
 public:
  FoodIndex() = default;
  FoodIndex(std::vector<FoodItem> items, std::vector<float> matrix, std::size_t dim,
            std::string scheme_id);

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& scheme_id() const noexcept { return scheme_id_; }
  const std::vector<FoodItem>& items() const noexcept { return items_; }
  const FoodItem& item(std::size_t row) const { return items_.at(row); }
  std::span<const float> row(std::size_t i) const;
  std::span<const float> matrix() const noexcept { return matrix_; }

  std::optional<std::size_t> find(FoodCode code) const;
  const FoodItem* food(FoodCode code) const;

  bool operator==(const FoodIndex& other) const;

 private:
  std::vector<FoodItem> items_;
  std::vector<float> matrix_;  // row-major, size() x dim_
  std::size_t dim_ = 0;
  std::string scheme_id_;
  std::unordered_map<FoodCode, std::size_t> by_code_;
};

/// Renders and embeds every item. Throws ArgumentError on an empty list or
/// duplicate codes.
FoodIndex build_index(std::vector<FoodItem> items, std::string_view scheme = kHashScheme,
                      std::size_t dim = kDefaultEmbeddingDim);

/// Uses precomputed rows (re-normalized) instead of the built-in scheme.
/// `matrix` is row-major, items.size() x dim.
FoodIndex build_index_from_vectors(std::vector<FoodItem> items, std::vector<float> matrix,
                                   std::size_t dim);

/// Vector file: "HEIV" magic, u16 version, u16 dim, then little-endian
/// float32 rows.
struct VectorFile {
  std::size_t dim = 0;
  std::vector<float> matrix;
  std::size_t rows() const noexcept { return dim ? matrix.size() / dim : 0; }
};

void write_vector_file(const std::filesystem::path& path, std::span<const float> matrix,
                       std::size_t dim);
/// Throws CorruptionError on bad magic/version or a truncated body.
VectorFile read_vector_file(const std::filesystem::path& path);

/// Writes corpus.jsonl, vectors.bin and index.json into `dir`.
void persist(const FoodIndex& index, const std::filesystem::path& dir);

/// Loads an index written by persist(). Throws CorruptionError when the
/// corpus and vector files disagree, ConfigError when `expected_dim` is set
/// and differs from the stored dimension.
FoodIndex load_index(const std::filesystem::path& dir,
                     std::optional<std::size_t> expected_dim = std::nullopt);

}  // namespace heirag
