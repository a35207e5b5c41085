#include "farmsift/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "farmsift/rng.hpp"

namespace farmsift {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                           what);
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open embedding file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    fail(path, 1, "missing header line");
  }
  std::size_t declared = 0;
  int dim = 0;
  {
    std::istringstream hdr(line);
    std::string extra;
    if (!(hdr >> declared >> dim) || dim <= 0 || (hdr >> extra)) {
      fail(path, 1, "header must be \"count dim\"");
    }
  }
  EmbeddingTable table;
  table.dim = dim;
  table.vectors.reserve(declared);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) {
      fail(path, line_no, "expected \"word v1 .. v_dim\"");
    }
    Vector v(dim);
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    for (int k = 0; k < dim; ++k) {
      while (p != end && *p == ' ') ++p;
      double value = 0.0;
      const auto res = std::from_chars(p, end, value);
      if (res.ec != std::errc{}) {
        fail(path, line_no, "expected " + std::to_string(dim) +
                                " values, found " + std::to_string(k));
      }
      v[k] = value;
      p = res.ptr;
    }
    while (p != end && *p == ' ') ++p;
    if (p != end) {
      fail(path, line_no,
           "more than " + std::to_string(dim) + " values on line");
    }
    table.vectors[line.substr(0, sp)] = std::move(v);
  }
  if (table.vectors.size() != declared) {
    fail(path, line_no,
         "header declares " + std::to_string(declared) + " words, file has " +
             std::to_string(table.vectors.size()));
  }
  return table;
}

void save_embeddings(const EmbeddingTable& table,
                     const std::filesystem::path& path) {
  std::vector<const std::string*> words;
  words.reserve(table.vectors.size());
  for (const auto& [w, v] : table.vectors) words.push_back(&w);
  std::sort(words.begin(), words.end(),
            [](const auto* a, const auto* b) { return *a < *b; });
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write embedding file: " + path.string());
  }
  out << table.vectors.size() << ' ' << table.dim << '\n';
  char buf[64];
  for (const auto* w : words) {
    out << *w;
    const Vector& v = table.vectors.at(*w);
    for (Index k = 0; k < v.size(); ++k) {
      std::snprintf(buf, sizeof buf, " %.17g", v[k]);
      out << buf;
    }
    out << '\n';
  }
}

const Vector* find_vector(const EmbeddingTable& table, std::string_view word) {
  const auto it = table.vectors.find(word);
  return it == table.vectors.end() ? nullptr : &it->second;
}

Vector embed(const EmbeddingTable& table, std::string_view word) {
  if (const Vector* v = find_vector(table, word)) return *v;
  if (table.oov_policy == OovPolicy::kHash) {
    return hash_vector(word, table.dim, table.oov_seed);
  }
  return Vector::Zero(table.dim);
}

Vector hash_vector(std::string_view word, int dim, std::uint64_t seed) {
  rng::Engine eng(rng::fnv1a(word) ^
                  (seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull));
  Vector v(dim);
  for (int k = 0; k < dim; ++k) v[k] = rng::normal(eng);
  const double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / norm;
}

EmbeddingTable make_hash_table(std::span<const std::string> words, int dim,
                               std::uint64_t seed) {
  EmbeddingTable table;
  table.dim = dim;
  table.oov_seed = seed;
  for (const auto& w : words) {
    table.vectors[w] = hash_vector(w, dim, seed);
  }
  return table;
}

}  // namespace farmsift
