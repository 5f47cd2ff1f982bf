// Copyright 2026 The sagetok Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sagetok/embeddings.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sagetok/parallel.h"

namespace sagetok {
namespace {

constexpr char kTableMagic[4] = {'S', 'G', 'T', 'B'};
constexpr std::uint32_t kTableVersion = 1;

// Linear congruential generator of the reference word2vec tool. Cheap and
// identical on every platform.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : state_(seed) {}
  std::uint64_t Next() {
    state_ = state_ * 25214903917ULL + 11;
    return state_;
  }
  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Samples ids proportional to count^0.75.
class NoiseSampler {
 public:
  NoiseSampler(const SentenceStore& store, std::size_t vocab_size) {
    std::vector<double> counts(vocab_size, 0.0);
    for (const auto& s : store.encoded) {
      for (TokenId id : s.ids) {
        if (id != kUnkId) counts[id] += 1.0;
      }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < vocab_size; ++i) {
      if (counts[i] <= 0) continue;
      total += std::pow(counts[i], 0.75);
      cumulative_.push_back(total);
      ids_.push_back(static_cast<TokenId>(i));
    }
    for (double& c : cumulative_) c /= total;
  }

  bool empty() const { return ids_.empty(); }

  TokenId Sample(Lcg& rng) const {
    const double u = rng.Uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return ids_[it - cumulative_.begin()];
  }

 private:
  std::vector<double> cumulative_;
  std::vector<TokenId> ids_;
};

void CheckRow(std::size_t rows, TokenId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= rows) {
    ThrowInvariant("token id " + std::to_string(id) + " outside embedding table");
  }
}

}  // namespace

void EmbedConfig::Validate() const {
  if (dim < 1) ThrowConfig("embedding dimension must be >= 1");
  if (window < 1) ThrowConfig("embedding window must be >= 1");
  if (negatives < 0) ThrowConfig("negative sample count must be >= 0");
  if (epochs < 0) ThrowConfig("epoch count must be >= 0");
  if (!(initial_lr > 0) || !(final_lr >= 0) || final_lr > initial_lr) {
    ThrowConfig("learning rates must satisfy 0 <= final <= initial, initial > 0");
  }
  if (threads < 1) ThrowConfig("thread count must be >= 1");
}

SkipGramTable InitTables(std::size_t vocab_size, const EmbedConfig& cfg) {
  if (cfg.dim < 1) ThrowConfig("embedding dimension must be >= 1");
  SkipGramTable t;
  t.rows = vocab_size;
  t.dim = cfg.dim;
  t.window = cfg.window;
  const std::size_t n = vocab_size * static_cast<std::size_t>(cfg.dim);
  t.target.resize(n);
  t.context.assign(n, 0.0f);
  Lcg rng(cfg.seed);
  for (auto& v : t.target) {
    v = static_cast<float>((rng.Uniform() - 0.5) / cfg.dim);
  }
  return t;
}

SkipGramTable TrainEmbeddings(const SentenceStore& store, std::size_t vocab_size,
                              const EmbedConfig& cfg) {
  cfg.Validate();
  if (store.size() == 0) ThrowData("cannot train embeddings on an empty store");
  SkipGramTable table = InitTables(vocab_size, cfg);
  table.vocab_hash = store.vocab_hash;
  if (cfg.epochs == 0) return table;

  for (const auto& s : store.encoded) {
    for (TokenId id : s.ids) {
      if (id != kUnkId) CheckRow(vocab_size, id);
    }
  }
  const NoiseSampler noise(store, vocab_size);
  const int negatives = noise.empty() ? 0 : cfg.negatives;
  const std::size_t tokens = store.TokenCount();
  const double total_work = static_cast<double>(tokens) * cfg.epochs;
  const int dim = cfg.dim;
  const int window = cfg.window;
  float* target = table.target.data();
  float* context = table.context.data();
  std::atomic<std::uint64_t> processed{0};

  const int threads = std::max(1, cfg.threads);
  ParallelFor(store.size(), threads, [&](std::size_t begin, std::size_t end, int worker) {
    Lcg rng(cfg.seed * 0x9E3779B97F4A7C15ULL + 7919 * (worker + 1));
    std::vector<float> grad(dim);
    std::uint64_t local = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (std::size_t s = begin; s < end; ++s) {
        const auto& ids = store.encoded[s].ids;
        const std::uint64_t seen = threads == 1 ? local : processed.load(std::memory_order_relaxed);
        const double progress = std::min(1.0, static_cast<double>(seen) / total_work);
        const double lr = cfg.initial_lr - (cfg.initial_lr - cfg.final_lr) * progress;
        const auto n = static_cast<std::ptrdiff_t>(ids.size());
        for (std::ptrdiff_t i = 0; i < n; ++i) {
          const TokenId t = ids[i];
          if (t == kUnkId) continue;
          float* in = target + static_cast<std::size_t>(t) * dim;
          const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
          const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + window);
          for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            if (j == i || ids[j] == kUnkId) continue;
            std::fill(grad.begin(), grad.end(), 0.0f);
            for (int k = 0; k <= negatives; ++k) {
              TokenId out;
              double label;
              if (k == 0) {
                out = ids[j];
                label = 1.0;
              } else {
                out = noise.Sample(rng);
                if (out == ids[j]) continue;
                label = 0.0;
              }
              float* ctx = context + static_cast<std::size_t>(out) * dim;
              double f = 0.0;
              for (int d = 0; d < dim; ++d) f += static_cast<double>(in[d]) * ctx[d];
              const double sig = 1.0 / (1.0 + std::exp(-f));
              const auto g = static_cast<float>((label - sig) * lr);
              for (int d = 0; d < dim; ++d) grad[d] += g * ctx[d];
              for (int d = 0; d < dim; ++d) ctx[d] += g * in[d];
            }
            for (int d = 0; d < dim; ++d) in[d] += grad[d];
          }
        }
        local += ids.size();
        if (threads > 1) processed.fetch_add(ids.size(), std::memory_order_relaxed);
      }
    }
  });
  return table;
}

SkipGramTable RemapTables(const SkipGramTable& table, const Vocabulary& old_vocab,
                          const Vocabulary& new_vocab) {
  if (table.rows != old_vocab.size()) {
    ThrowInvariant("table has " + std::to_string(table.rows) +
                   " rows but the old vocabulary has " +
                   std::to_string(old_vocab.size()) + " tokens");
  }
  SkipGramTable out;
  out.rows = new_vocab.size();
  out.dim = table.dim;
  out.window = table.window;
  out.vocab_hash = new_vocab.Hash();
  const auto dim = static_cast<std::size_t>(table.dim);
  out.target.resize(out.rows * dim);
  out.context.resize(out.rows * dim);
  for (std::size_t id = 0; id < new_vocab.size(); ++id) {
    const auto& tok = new_vocab.token(static_cast<TokenId>(id));
    const auto old = old_vocab.Find(tok);
    if (!old) ThrowInvariant("token '" + tok + "' is not in the old vocabulary");
    std::copy_n(table.target.begin() + *old * dim, dim, out.target.begin() + id * dim);
    std::copy_n(table.context.begin() + *old * dim, dim, out.context.begin() + id * dim);
  }
  return out;
}

namespace {

template <typename T>
void Put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T Get(std::string_view& in) {
  if (in.size() < sizeof(T)) ThrowData("truncated embedding table");
  T v;
  std::memcpy(&v, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return v;
}

}  // namespace

std::string SerializeTable(const SkipGramTable& table) {
  std::string out(kTableMagic, sizeof(kTableMagic));
  Put<std::uint32_t>(out, kTableVersion);
  Put<std::uint64_t>(out, table.vocab_hash);
  Put<std::uint64_t>(out, table.rows);
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(table.dim));
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(table.window));
  out.append(reinterpret_cast<const char*>(table.target.data()),
             table.target.size() * sizeof(float));
  out.append(reinterpret_cast<const char*>(table.context.data()),
             table.context.size() * sizeof(float));
  return out;
}

SkipGramTable DeserializeTable(std::string_view in) {
  if (in.size() < 4 || std::memcmp(in.data(), kTableMagic, 4) != 0) {
    ThrowData("not an embedding table (bad magic)");
  }
  in.remove_prefix(4);
  if (Get<std::uint32_t>(in) != kTableVersion) ThrowData("unsupported table version");
  SkipGramTable t;
  t.vocab_hash = Get<std::uint64_t>(in);
  t.rows = Get<std::uint64_t>(in);
  t.dim = static_cast<int>(Get<std::uint32_t>(in));
  t.window = static_cast<int>(Get<std::uint32_t>(in));
  const std::size_t n = t.rows * static_cast<std::size_t>(t.dim);
  if (in.size() != 2 * n * sizeof(float)) ThrowData("embedding table size mismatch");
  t.target.resize(n);
  t.context.resize(n);
  std::memcpy(t.target.data(), in.data(), n * sizeof(float));
  std::memcpy(t.context.data(), in.data() + n * sizeof(float), n * sizeof(float));
  return t;
}

void WriteTableFile(const std::filesystem::path& path, const SkipGramTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowData("cannot write " + path.string());
  const std::string bytes = SerializeTable(table);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

SkipGramTable ReadTableFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowData("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return DeserializeTable(bytes);
}

}  // namespace sagetok
