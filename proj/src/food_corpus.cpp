#include "heirag/food_corpus.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "heirag/csv.hpp"
#include "heirag/error.hpp"

namespace heirag {

namespace {

struct TextComponent {
  double IntakeProfile::*member;
  std::string_view name;
  std::string_view unit;
  bool magnitude;  // contributes a "<name>#mag" feature
};

constexpr std::array<TextComponent, 13> kTextComponents{{
    {&IntakeProfile::f_totfruit_cup, "total fruits", "cup eq", true},
    {&IntakeProfile::f_wholefruit_cup, "whole fruits", "cup eq", true},
    {&IntakeProfile::f_totveg_cup, "total vegetables", "cup eq", true},
    {&IntakeProfile::f_greensbeans_cup, "greens and beans", "cup eq", true},
    {&IntakeProfile::f_wholegrain_oz, "whole grains", "oz eq", true},
    {&IntakeProfile::f_refinedgrain_oz, "refined grains", "oz eq", true},
    {&IntakeProfile::f_dairy_cup, "dairy", "cup eq", true},
    {&IntakeProfile::f_totprotein_oz, "total protein foods", "oz eq", true},
    {&IntakeProfile::f_seaplant_oz, "seafood and plant proteins", "oz eq", true},
    {&IntakeProfile::sodium_mg, "sodium", "mg", false},
    {&IntakeProfile::added_sugars_g, "added sugars", "g", false},
    {&IntakeProfile::sfa_g, "saturated fat", "g", false},
    {&IntakeProfile::fiber_g, "fiber", "g", false},
}};

constexpr std::string_view kSeparator = " | ";
constexpr char kVectorMagic[4] = {'H', 'E', 'I', 'V'};
constexpr std::uint16_t kVectorVersion = 1;

// Up to three decimals, trailing zeros dropped but one decimal kept.
std::string format_amount(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

bool is_magnitude_component(std::string_view name) {
  for (const auto& c : kTextComponents) {
    if (c.magnitude && c.name == name) return true;
  }
  return false;
}

void add_token_features(std::string_view text, std::vector<double>& acc) {
  const std::size_t dim = acc.size();
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const std::uint64_t h = token_hash(token);
    acc[h % dim] += (h >> 63) ? -1.0 : 1.0;
    token.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
}

void add_magnitude_features(std::string_view text, std::vector<double>& acc) {
  const std::size_t dim = acc.size();
  while (!text.empty()) {
    const auto end = text.find(kSeparator);
    const std::string_view segment = text.substr(0, end);
    const auto colon = segment.find(": ");
    if (colon != std::string_view::npos) {
      const auto name = segment.substr(0, colon);
      if (is_magnitude_component(name)) {
        auto rest = segment.substr(colon + 2);
        rest = rest.substr(0, rest.find(' '));
        if (auto v = csv::parse_number(rest); v && std::isfinite(*v)) {
          acc[token_hash(std::string(name) + "#mag") % dim] += *v;
        }
      }
    }
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + kSeparator.size());
  }
}

void normalize_rows(std::vector<float>& matrix, std::size_t dim) {
  for (std::size_t r = 0; r * dim < matrix.size(); ++r) {
    double norm = 0;
    for (std::size_t i = 0; i < dim; ++i) norm += double(matrix[r * dim + i]) * matrix[r * dim + i];
    norm = std::sqrt(norm);
    if (!(norm > 0) || !std::isfinite(norm)) {
      throw ArgumentError("vector row " + std::to_string(r) + " has zero or non-finite norm");
    }
    for (std::size_t i = 0; i < dim; ++i) {
      matrix[r * dim + i] = static_cast<float>(matrix[r * dim + i] / norm);
    }
  }
}

void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

std::string render_food_text(const FoodItem& item) {
  std::string text = item.description;
  for (const auto& c : kTextComponents) {
    const double v = item.amounts.*c.member;
    if (v == 0) continue;
    text += kSeparator;
    text += c.name;
    text += ": ";
    text += format_amount(v);
    text += ' ';
    text += c.unit;
    text += " per serving";
  }
  char energy[64];
  std::snprintf(energy, sizeof energy, "%.0f", item.amounts.energy_kcal);
  text += kSeparator;
  text += "energy: ";
  text += energy;
  text += " kcal";
  return text;
}

std::uint64_t token_hash(std::string_view token) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

EmbeddingVector embed_text(std::string_view text, std::size_t dim, std::string_view scheme) {
  if (dim < 8) throw ArgumentError("embedding dim must be >= 8");
  if (scheme != kHashScheme) {
    throw ConfigError("embedding scheme '" + std::string(scheme) + "' cannot embed text locally");
  }
  std::vector<double> acc(dim, 0.0);
  add_token_features(text, acc);
  add_magnitude_features(text, acc);

  double norm = 0;
  for (double v : acc) norm += v * v;
  norm = std::sqrt(norm);

  EmbeddingVector out;
  out.values.assign(dim, 0.0f);
  if (norm == 0) {
    out.values[0] = 1.0f;
    return out;
  }
  for (std::size_t i = 0; i < dim; ++i) out.values[i] = static_cast<float>(acc[i] / norm);
  return out;
}

FoodIndex::FoodIndex(std::vector<FoodItem> items, std::vector<float> matrix, std::size_t dim,
                     std::string scheme_id)
    : items_(std::move(items)), matrix_(std::move(matrix)), dim_(dim), scheme_id_(std::move(scheme_id)) {
  if (dim_ == 0) throw ArgumentError("index dim must be positive");
  if (matrix_.size() != items_.size() * dim_) {
    throw ArgumentError("index matrix has " + std::to_string(matrix_.size()) +
                        " values, expected " + std::to_string(items_.size() * dim_));
  }
  by_code_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!by_code_.emplace(items_[i].food_code, i).second) {
      throw ArgumentError("duplicate food_code " + std::to_string(items_[i].food_code));
    }
  }
}

std::span<const float> FoodIndex::row(std::size_t i) const {
  if (i >= items_.size()) throw ArgumentError("index row out of range");
  return std::span<const float>(matrix_).subspan(i * dim_, dim_);
}

std::optional<std::size_t> FoodIndex::find(FoodCode code) const {
  auto it = by_code_.find(code);
  if (it == by_code_.end()) return std::nullopt;
  return it->second;
}

const FoodItem* FoodIndex::food(FoodCode code) const {
  auto r = find(code);
  return r ? &items_[*r] : nullptr;
}

bool FoodIndex::operator==(const FoodIndex& other) const {
  return items_ == other.items_ && matrix_ == other.matrix_ && dim_ == other.dim_ &&
         scheme_id_ == other.scheme_id_;
}

FoodIndex build_index(std::vector<FoodItem> items, std::string_view scheme, std::size_t dim) {
  if (items.empty()) throw ArgumentError("build_index: no items");
  std::vector<float> matrix;
  matrix.reserve(items.size() * dim);
  for (const auto& item : items) {
    const auto v = embed_text(render_food_text(item), dim, scheme);
    matrix.insert(matrix.end(), v.values.begin(), v.values.end());
  }
  return FoodIndex(std::move(items), std::move(matrix), dim, std::string(scheme));
}

FoodIndex build_index_from_vectors(std::vector<FoodItem> items, std::vector<float> matrix,
                                   std::size_t dim) {
  if (items.empty()) throw ArgumentError("build_index: no items");
  if (dim == 0 || matrix.size() != items.size() * dim) {
    throw CorruptionError("external vectors have " + std::to_string(dim ? matrix.size() / dim : 0) +
                          " rows, corpus has " + std::to_string(items.size()));
  }
  for (float v : matrix) {
    if (!std::isfinite(v)) throw ArgumentError("external vectors contain non-finite values");
  }
  normalize_rows(matrix, dim);
  return FoodIndex(std::move(items), std::move(matrix), dim, std::string(kExternalScheme));
}

void write_vector_file(const std::filesystem::path& path, std::span<const float> matrix,
                       std::size_t dim) {
  if (dim == 0 || dim > 0xffff) throw ArgumentError("vector dim must be in [1, 65535]");
  if (matrix.size() % dim != 0) throw ArgumentError("matrix size is not a multiple of dim");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out.write(kVectorMagic, 4);
  put_u16(out, kVectorVersion);
  put_u16(out, static_cast<std::uint16_t>(dim));
  for (float v : matrix) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    const char b[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                       static_cast<char>((bits >> 16) & 0xff), static_cast<char>(bits >> 24)};
    out.write(b, 4);
  }
  if (!out) throw ArgumentError("write failed: " + path.string());
}

VectorFile read_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptionError("cannot open vector file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || !std::equal(kVectorMagic, kVectorMagic + 4, bytes.begin())) {
    throw CorruptionError(path.string() + ": bad vector file header");
  }
  if (get_u16(&bytes[4]) != kVectorVersion) {
    throw CorruptionError(path.string() + ": unsupported vector file version");
  }
  VectorFile vf;
  vf.dim = get_u16(&bytes[6]);
  if (vf.dim == 0) throw CorruptionError(path.string() + ": zero dimension");
  const std::size_t body = bytes.size() - 8;
  if (body % (4 * vf.dim) != 0) throw CorruptionError(path.string() + ": truncated vector row");
  vf.matrix.resize(body / 4);
  for (std::size_t i = 0; i < vf.matrix.size(); ++i) {
    const unsigned char* p = &bytes[8 + 4 * i];
    const std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                               (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
    vf.matrix[i] = std::bit_cast<float>(bits);
  }
  return vf;
}

namespace {

nlohmann::json food_to_record(const FoodItem& f) {
  nlohmann::json amounts = nlohmann::json::object();
  for (const auto& field : kIntakeFields) amounts[std::string(field.name)] = f.amounts.*field.member;
  return {
      {"food_code", f.food_code},
      {"text", render_food_text(f)},
      {"metadata",
       {{"description", f.description},
        {"serving_desc", f.serving_desc},
        {"tags", f.tags},
        {"amounts", amounts}}},
  };
}

FoodItem food_from_record(const nlohmann::json& j) {
  FoodItem f;
  f.food_code = j.at("food_code").get<FoodCode>();
  const auto& meta = j.at("metadata");
  f.description = meta.at("description").get<std::string>();
  f.serving_desc = meta.at("serving_desc").get<std::string>();
  f.tags = meta.at("tags").get<std::vector<std::string>>();
  const auto& amounts = meta.at("amounts");
  for (const auto& field : kIntakeFields) {
    f.amounts.*field.member = amounts.at(std::string(field.name)).get<double>();
  }
  return f;
}

}  // namespace

void persist(const FoodIndex& index, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "corpus.jsonl");
    if (!out) throw ArgumentError("cannot write " + (dir / "corpus.jsonl").string());
    for (const auto& item : index.items()) out << food_to_record(item).dump() << '\n';
  }
  write_vector_file(dir / "vectors.bin", index.matrix(), index.dim());
  std::ofstream manifest(dir / "index.json");
  manifest << nlohmann::json{{"scheme_id", index.scheme_id()},
                             {"dim", index.dim()},
                             {"count", index.size()}}
                  .dump(2)
           << '\n';
}

FoodIndex load_index(const std::filesystem::path& dir, std::optional<std::size_t> expected_dim) {
  std::ifstream manifest_in(dir / "index.json");
  if (!manifest_in) throw CorruptionError("missing index manifest in " + dir.string());
  nlohmann::json manifest;
  std::vector<FoodItem> items;
  try {
    manifest_in >> manifest;
    std::ifstream corpus(dir / "corpus.jsonl");
    if (!corpus) throw CorruptionError("missing corpus.jsonl in " + dir.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(corpus, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        items.push_back(food_from_record(nlohmann::json::parse(line)));
      } catch (const nlohmann::json::exception& e) {
        throw CorruptionError("corpus.jsonl line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError("index manifest: " + std::string(e.what()));
  }

  auto vf = read_vector_file(dir / "vectors.bin");
  if (vf.rows() != items.size()) {
    throw CorruptionError("corpus has " + std::to_string(items.size()) + " records but vectors.bin has " +
                          std::to_string(vf.rows()) + " rows");
  }
  const auto stored_dim = manifest.value("dim", std::size_t{0});
  if (stored_dim != vf.dim) throw CorruptionError("manifest dim disagrees with vectors.bin");
  if (expected_dim && *expected_dim != vf.dim) {
    throw ConfigError("index dim " + std::to_string(vf.dim) + " does not match configured dim " +
                      std::to_string(*expected_dim));
  }
  std::set<FoodCode> codes;
  for (const auto& it : items) {
    if (!codes.insert(it.food_code).second) {
      throw CorruptionError("duplicate food_code " + std::to_string(it.food_code) + " in corpus");
    }
  }
  return FoodIndex(std::move(items), std::move(vf.matrix), vf.dim,
                   manifest.value("scheme_id", std::string(kHashScheme)));
}

}  // namespace heirag
