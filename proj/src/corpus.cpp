#include "farmsift/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "farmsift/rng.hpp"
#include "farmsift/text.hpp"

namespace farmsift {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                           what);
}

std::string require_string(const json& j, const char* key,
                           const std::filesystem::path& path,
                           std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    fail(path, line, std::string("missing string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

}  // namespace

std::vector<Record> load_corpus(const std::filesystem::path& path,
                                LoadMode mode) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path.string());
  }
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(path, line_no, std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object()) fail(path, line_no, "record is not a JSON object");

    Record r;
    r.id = require_string(j, "id", path, line_no);
    r.headline = require_string(j, "headline", path, line_no);
    if (const auto it = j.find("tokens"); it != j.end()) {
      if (!it->is_array()) fail(path, line_no, "tokens must be an array");
      for (const auto& t : *it) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_string() ||
            !t[1].is_string()) {
          fail(path, line_no, "each token must be [surface, pos]");
        }
        r.tokens.push_back({t[0].get<std::string>(), t[1].get<std::string>()});
      }
    }
    if (const auto it = j.find("label"); it != j.end()) {
      if (!it->is_number_integer()) {
        fail(path, line_no, "label must be an integer");
      }
      r.label = it->get<int>();
      if (r.label != 0 && r.label != 1) {
        fail(path, line_no, "label must be 0 or 1");
      }
    } else if (mode == LoadMode::kLabeled) {
      fail(path, line_no, "missing label");
    }
    if (const auto it = j.find("source"); it != j.end() && it->is_string()) {
      r.source = it->get<std::string>();
    }
    if (const auto it = j.find("date"); it != j.end() && it->is_string()) {
      r.date = it->get<std::string>();
    }
    if (const auto it = j.find("origin_url");
        it != j.end() && it->is_string()) {
      r.origin_url = it->get<std::string>();
    }
    records.push_back(std::move(r));
  }
  return records;
}

void save_corpus(std::span<const Record> records,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write corpus file: " + path.string());
  }
  for (const auto& r : records) {
    json j;
    j["id"] = r.id;
    j["headline"] = r.headline;
    if (!r.tokens.empty()) {
      json toks = json::array();
      for (const auto& t : r.tokens) {
        toks.push_back(json::array({t.surface, t.pos}));
      }
      j["tokens"] = std::move(toks);
    }
    if (r.label != Record::kUnlabeled) j["label"] = r.label;
    if (!r.source.empty()) j["source"] = r.source;
    if (!r.date.empty()) j["date"] = r.date;
    if (r.origin_url) j["origin_url"] = *r.origin_url;
    out << j.dump() << '\n';
  }
}

Record clean(Record r) {
  std::string& s = r.headline;
  for (char& c : s) {
    if (c == '\n' || c == '\t' || c == '\r') c = ' ';
  }
  std::string collapsed;
  collapsed.reserve(s.size());
  bool in_run = false;
  for (char c : s) {
    if (c == ' ') {
      if (!in_run) collapsed.push_back(' ');
      in_run = true;
    } else {
      collapsed.push_back(c);
      in_run = false;
    }
  }
  std::size_t begin = collapsed.find_first_not_of(' ');
  if (begin == std::string::npos) {
    s.clear();
    return r;
  }
  const std::size_t end = collapsed.find_last_not_of(' ');
  s = collapsed.substr(begin, end - begin + 1);
  return r;
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string host_of(std::string_view url) {
  const std::size_t scheme = url.find("://");
  std::string_view rest =
      scheme == std::string_view::npos ? url : url.substr(scheme + 3);
  std::size_t cut = rest.find_first_of("/?#");
  if (cut != std::string_view::npos) rest = rest.substr(0, cut);
  const std::size_t at = rest.rfind('@');
  if (at != std::string_view::npos) rest = rest.substr(at + 1);
  const std::size_t colon = rest.rfind(':');
  if (colon != std::string_view::npos &&
      rest.find(']') == std::string_view::npos) {
    rest = rest.substr(0, colon);
  }
  return lowercase(rest);
}

bool host_matches(const std::string& host, const std::string& domain) {
  if (host == domain) return true;
  if (host.size() <= domain.size() + 1) return false;
  return host.ends_with(domain) &&
         host[host.size() - domain.size() - 1] == '.';
}

}  // namespace

std::vector<Record> drop_cross_source(
    std::vector<Record> records,
    std::span<const std::string> credible_domains) {
  std::vector<std::string> domains;
  domains.reserve(credible_domains.size());
  for (const auto& d : credible_domains) domains.push_back(lowercase(d));

  std::erase_if(records, [&](const Record& r) {
    if (r.label != 1 || !r.origin_url) return false;
    const std::string host = host_of(*r.origin_url);
    return std::any_of(domains.begin(), domains.end(), [&](const auto& d) {
      return host_matches(host, d);
    });
  });
  return records;
}

std::vector<Record> balance(std::vector<Record> records, std::uint64_t seed) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int y = records[i].label;
    if (y != 0 && y != 1) {
      throw std::invalid_argument("balance needs labeled records");
    }
    by_class[y].push_back(i);
  }
  if (by_class[0].size() == by_class[1].size()) return records;

  const int majority = by_class[0].size() > by_class[1].size() ? 0 : 1;
  const std::size_t target = by_class[1 - majority].size();
  rng::Engine eng(seed);
  rng::shuffle(by_class[majority], eng);

  std::vector<char> keep(records.size(), 1);
  for (std::size_t k = target; k < by_class[majority].size(); ++k) {
    keep[by_class[majority][k]] = 0;
  }
  std::vector<Record> out;
  out.reserve(2 * target);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.push_back(std::move(records[i]));
  }
  return out;
}

CorpusSplit split_corpus(std::vector<Record> records, std::uint64_t seed) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int y = records[i].label;
    if (y != 0 && y != 1) {
      throw std::invalid_argument("split needs labeled records");
    }
    by_class[y].push_back(i);
  }
  rng::Engine eng(seed);
  rng::shuffle(by_class[0], eng);
  rng::shuffle(by_class[1], eng);

  std::vector<std::size_t> order;
  order.reserve(records.size());
  const std::size_t rounds = std::max(by_class[0].size(), by_class[1].size());
  for (std::size_t i = 0; i < rounds; ++i) {
    if (i < by_class[0].size()) order.push_back(by_class[0][i]);
    if (i < by_class[1].size()) order.push_back(by_class[1][i]);
  }

  const std::size_t n = order.size();
  const std::size_t train_n = 4 * n / 5;
  const std::size_t rest = n - train_n;
  const std::size_t valid_n = (rest + 1) / 2;

  CorpusSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    Record& r = records[order[i]];
    if (i < train_n) {
      split.train.push_back(std::move(r));
    } else if (i < train_n + valid_n) {
      split.validation.push_back(std::move(r));
    } else {
      split.test.push_back(std::move(r));
    }
  }
  return split;
}

CorpusStats stats(std::span<const Record> records) {
  struct Acc {
    std::size_t count = 0;
    double tokens = 0.0;
    std::array<double, kPosCategoryCount> pos{};
  };
  Acc acc[2];
  for (const auto& r : records) {
    if (r.label != 0 && r.label != 1) {
      throw std::invalid_argument("stats needs labeled records");
    }
    Acc& a = acc[r.label];
    ++a.count;
    a.tokens += static_cast<double>(r.tokens.size());
    for (const auto& t : r.tokens) {
      a.pos[static_cast<std::size_t>(simplify(t.pos))] += 1.0;
    }
  }
  CorpusStats out;
  for (int y = 0; y < 2; ++y) {
    if (acc[y].count == 0) continue;
    ClassStats cs;
    cs.count = acc[y].count;
    const double n = static_cast<double>(acc[y].count);
    cs.mean_tokens = acc[y].tokens / n;
    for (int c = 0; c < kPosCategoryCount; ++c) {
      cs.pos_means[static_cast<std::size_t>(c)] =
          acc[y].pos[static_cast<std::size_t>(c)] / n;
    }
    (y == 0 ? out.credible : out.farm) = cs;
  }
  return out;
}

namespace {

std::string encode_cp(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

// Vocabulary pools the generator draws from. Pools are large relative to the
// per-class differences so word identity alone does not give the class away
// through side channels.
struct SynthWorld {
  std::vector<std::string> content_a, content_b, emotive;
  std::array<std::vector<std::string>, kPosCategoryCount> surfaces;
  std::array<std::vector<std::string>, kPosCategoryCount> raw_tags;
  std::map<std::string, double> lexicon;
};

class WordMint {
 public:
  WordMint(rng::Engine& eng, std::vector<std::string> chars)
      : eng_(eng), chars_(std::move(chars)) {}

  std::string fresh(int len) {
    for (;;) {
      std::string w;
      for (int k = 0; k < len; ++k) {
        w += chars_[rng::below(eng_, chars_.size())];
      }
      if (used_.insert(w).second) return w;
    }
  }

  // 20% single, 60% double, 20% triple character words.
  std::string fresh() {
    const double u = rng::uniform01(eng_);
    return fresh(u < 0.2 ? 1 : u < 0.8 ? 2 : 3);
  }

  std::vector<std::string> batch(std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(fresh());
    return out;
  }

  bool seen(const std::string& w) const { return used_.contains(w); }

 private:
  rng::Engine& eng_;
  std::vector<std::string> chars_;
  std::unordered_set<std::string> used_;
};

SynthWorld build_world(std::uint64_t seed) {
  rng::Engine eng(rng::derive_seed(seed, "synth-vocab"));
  SynthWorld world;

  std::vector<std::string> chars;
  {
    std::unordered_set<char32_t> seen;
    while (chars.size() < 700) {
      const char32_t cp =
          static_cast<char32_t>(0x4E00 + rng::below(eng, 0x9FFF - 0x4E00 + 1));
      if (seen.insert(cp).second) chars.push_back(encode_cp(cp));
    }
  }
  WordMint mint(eng, chars);

  world.content_a = mint.batch(500);
  world.content_b = mint.batch(500);
  world.emotive = mint.batch(150);

  const auto cat = [&](PosCategory c) -> std::vector<std::string>& {
    return world.surfaces[static_cast<std::size_t>(c)];
  };
  cat(PosCategory::kAdverb) = mint.batch(200);
  cat(PosCategory::kPreposition) = mint.batch(60);
  cat(PosCategory::kConjunction) = mint.batch(25);
  cat(PosCategory::kParticle) = mint.batch(15);
  cat(PosCategory::kInterjection) = mint.batch(8);
  cat(PosCategory::kWhitespace) = {" "};

  // OTHER mixes CJK function words with Latin tokens, which stay atomic in
  // the sentiment stream.
  {
    auto& pool = cat(PosCategory::kOther);
    pool = mint.batch(24);
    std::unordered_set<std::string> seen;
    while (pool.size() < 30) {
      std::string w;
      const std::size_t len = 2 + rng::below(eng, 4);
      for (std::size_t k = 0; k < len; ++k) {
        w.push_back(static_cast<char>('A' + rng::below(eng, 26)));
      }
      if (seen.insert(w).second) pool.push_back(w);
    }
  }

  {
    static const std::vector<std::string> marks = {
        "！", "？", "。", "，", "、", "：", "；", "…", "—", "～", "「", "」",
        "『", "』", "（", "）", "《", "》", "【", "】", "!",  "?",  ".",  "~"};
    auto& pool = cat(PosCategory::kPunct);
    std::unordered_set<std::string> seen;
    while (pool.size() < 300) {
      std::string s = marks[rng::below(eng, marks.size())];
      if (rng::uniform01(eng) < 0.5) s += marks[rng::below(eng, marks.size())];
      if (seen.insert(s).second) pool.push_back(s);
    }
  }

  for (const auto tag : ckip_tags()) {
    world.raw_tags[static_cast<std::size_t>(simplify(tag))].emplace_back(tag);
  }

  for (const auto& w : world.emotive) {
    const double sign = rng::uniform01(eng) < 0.5 ? -1.0 : 1.0;
    world.lexicon[w] = sign * rng::uniform(eng, 0.55, 0.95);
  }
  for (const auto* pool : {&world.content_a, &world.content_b}) {
    for (const auto& w : *pool) {
      if (rng::uniform01(eng) < 0.4) {
        world.lexicon[w] =
            std::clamp(rng::normal(eng) * 0.12, -1.0, 1.0);
      }
    }
  }
  // Two-character entries that are not words of the corpus; they only ever
  // match through character bigrams.
  for (std::size_t added = 0; added < 200;) {
    std::string w =
        chars[rng::below(eng, chars.size())] + chars[rng::below(eng, chars.size())];
    if (mint.seen(w) || world.lexicon.contains(w)) continue;
    world.lexicon[w] = rng::uniform(eng, -0.3, 0.3);
    ++added;
  }
  return world;
}

// Per-headline mean token count by category for the credible class.
constexpr std::array<double, kPosCategoryCount> kBaseMeans = {
    /*A*/ 0.06,    /*C*/ 0.08, /*D*/ 0.47,     /*I*/ 0.005, /*N*/ 5.85,
    /*OTHER*/ 0.19, /*P*/ 3.34, /*T*/ 0.01,     /*PUNCT*/ 0.227,
    /*V*/ 0.86,    /*WHITESPACE*/ 0.16};

Record make_record(rng::Engine& eng, const SynthWorld& world,
                   const StyleKnobs& knobs, int label, std::string id) {
  const double emotive_p =
      std::clamp(0.05 + (label == 1 ? knobs.sentiment_gap : 0.0), 0.0, 1.0);
  const double pool_a_p =
      std::clamp(0.5 + (label == 1 ? -0.5 : 0.5) * knobs.word_gap, 0.0, 1.0);

  const auto draw_content = [&]() -> const std::string& {
    if (rng::uniform01(eng) < emotive_p) {
      return world.emotive[rng::below(eng, world.emotive.size())];
    }
    const auto& pool =
        rng::uniform01(eng) < pool_a_p ? world.content_a : world.content_b;
    return pool[rng::below(eng, pool.size())];
  };

  Record r;
  r.id = std::move(id);
  r.label = label;
  r.source = label == 1 ? "content-farm-synth" : "newswire-synth";

  for (int c = 0; c < kPosCategoryCount; ++c) {
    const auto category = static_cast<PosCategory>(c);
    double mean = kBaseMeans[static_cast<std::size_t>(c)];
    if (label == 1) {
      if (category == PosCategory::kPunct) mean += knobs.punct_gap;
      if (category == PosCategory::kAdverb) mean += knobs.adverb_gap;
    }
    const int k = rng::poisson(eng, mean);
    const auto& tags = world.raw_tags[static_cast<std::size_t>(c)];
    for (int i = 0; i < k; ++i) {
      const std::string& tag = tags[rng::below(eng, tags.size())];
      const bool content = category == PosCategory::kNoun ||
                           category == PosCategory::kVerb ||
                           category == PosCategory::kAdjective;
      const auto& pool = world.surfaces[static_cast<std::size_t>(c)];
      const std::string& surface =
          content ? draw_content() : pool[rng::below(eng, pool.size())];
      r.tokens.push_back({surface, tag});
    }
  }
  if (r.tokens.empty()) {
    const auto& tags = world.raw_tags[static_cast<std::size_t>(PosCategory::kNoun)];
    r.tokens.push_back({draw_content(), tags[rng::below(eng, tags.size())]});
  }
  rng::shuffle(r.tokens, eng);

  for (const auto& t : r.tokens) r.headline += t.surface;
  return r;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(int n_per_class, std::uint64_t seed,
                                          const StyleKnobs& knobs) {
  if (n_per_class < 0) {
    throw std::invalid_argument("n_per_class must be non-negative");
  }
  SyntheticCorpus out;
  const SynthWorld world = build_world(seed);
  out.lexicon = world.lexicon;

  rng::Engine eng(rng::derive_seed(seed, "synth-records"));
  char id[32];
  char date[16];
  for (int label = 0; label < 2; ++label) {
    for (int i = 0; i < n_per_class; ++i) {
      std::snprintf(id, sizeof id, "syn-%c-%06d", label == 1 ? 'f' : 'c', i);
      std::snprintf(date, sizeof date, "2021-%02d-%02d", 1 + (i / 28) % 12,
                    1 + i % 28);
      Record r = make_record(eng, world, knobs, label, id);
      r.date = date;
      out.records.push_back(std::move(r));
    }
  }

  // Punctuation stays out of the vocabulary, as in most pretrained tables;
  // its trace in the features is the POS block, not an embedding row.
  std::unordered_set<std::string> seen;
  const auto add = [&](const std::string& w) {
    if (seen.insert(w).second) out.vocabulary.push_back(w);
  };
  for (const auto* pool : {&world.content_a, &world.content_b, &world.emotive}) {
    for (const auto& w : *pool) add(w);
  }
  for (int c = 0; c < kPosCategoryCount; ++c) {
    if (c == static_cast<int>(PosCategory::kPunct) ||
        c == static_cast<int>(PosCategory::kWhitespace)) {
      continue;
    }
    for (const auto& w : world.surfaces[static_cast<std::size_t>(c)]) add(w);
  }
  add(std::string(text::kWhitespaceMark));
  std::sort(out.vocabulary.begin(), out.vocabulary.end());
  return out;
}

std::vector<Record> generate_synthetic(int n_per_class, std::uint64_t seed,
                                       const StyleKnobs& knobs) {
  return generate_synthetic_corpus(n_per_class, seed, knobs).records;
}

}  // namespace farmsift
