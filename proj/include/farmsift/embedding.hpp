#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "farmsift/text.hpp"
#include "farmsift/types.hpp"

namespace farmsift {

// What a lookup miss produces: the zero vector, or a deterministic
// pseudo-random unit vector derived from the word.
enum class OovPolicy { kZero, kHash };

struct EmbeddingTable {
  int dim = 0;
  std::unordered_map<std::string, Vector, text::StringHash, std::equal_to<>>
      vectors;
  OovPolicy oov_policy = OovPolicy::kZero;
  std::uint64_t oov_seed = 0;
};

// Text format: a "count dim" header line, then one "word v1 .. v_dim" line
// per word. Throws std::runtime_error with "file:line:" on malformed input
// or a count mismatch.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

// Same format, words sorted bytewise, values round-trip exactly.
void save_embeddings(const EmbeddingTable& table,
                     const std::filesystem::path& path);

// nullptr when the word is not in the table.
const Vector* find_vector(const EmbeddingTable& table, std::string_view word);

// Stored vector, or the OOV policy's vector.
Vector embed(const EmbeddingTable& table, std::string_view word);

// Unit-norm vector seeded from (word, seed) only.
Vector hash_vector(std::string_view word, int dim, std::uint64_t seed);

// Materializes hash vectors for a fixed vocabulary; misses fall back to zero.
EmbeddingTable make_hash_table(std::span<const std::string> words, int dim,
                               std::uint64_t seed);

}  // namespace farmsift
