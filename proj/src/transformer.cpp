#include "lectern/transformer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include "lectern/error.hpp"

namespace lectern::embed::detail {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

// ---------------------------------------------------------------------------
// safetensors: u64le header length, JSON header, raw tensor data
// ---------------------------------------------------------------------------

class SafeTensors {
 public:
  explicit SafeTensors(const std::filesystem::path& path) : blob_(read_file(path)) {
    if (blob_.size() < 8) throw std::runtime_error("safetensors file too short");
    std::uint64_t header_len = 0;
    std::memcpy(&header_len, blob_.data(), 8);
    if (8 + header_len > blob_.size())
      throw std::runtime_error("safetensors header length out of range");
    header_ = json::parse(blob_.substr(8, header_len));
    data_offset_ = 8 + header_len;
  }

  bool contains(const std::string& name) const { return header_.contains(name); }

  FTensor tensor(const std::string& name) const {
    const json* entry = nullptr;
    if (header_.contains(name)) {
      entry = &header_.at(name);
    } else if (header_.contains("bert." + name)) {
      entry = &header_.at("bert." + name);
    } else {
      throw std::runtime_error("missing tensor: " + name);
    }
    const std::string dtype = entry->at("dtype").get<std::string>();
    if (dtype != "F32")
      throw std::runtime_error("tensor " + name + " has unsupported dtype " + dtype);
    const auto shape = entry->at("shape").get<std::vector<std::size_t>>();
    const auto offsets = entry->at("data_offsets").get<std::vector<std::size_t>>();
    if (offsets.size() != 2 || offsets[1] < offsets[0])
      throw std::runtime_error("tensor " + name + " has bad offsets");

    FTensor t;
    t.rows = shape.empty() ? 1 : shape[0];
    t.cols = shape.size() > 1 ? shape[1] : 1;
    const std::size_t count = t.rows * t.cols;
    const std::size_t bytes = offsets[1] - offsets[0];
    if (bytes != count * sizeof(float))
      throw std::runtime_error("tensor " + name + " size mismatch");
    if (data_offset_ + offsets[1] > blob_.size())
      throw std::runtime_error("tensor " + name + " data out of range");
    t.v.resize(count);
    std::memcpy(t.v.data(), blob_.data() + data_offset_ + offsets[0], bytes);
    return t;
  }

 private:
  std::string blob_;
  json header_;
  std::size_t data_offset_ = 0;
};

// ---------------------------------------------------------------------------
// float math
// ---------------------------------------------------------------------------

// y = x W^T + b for row-major x (W_tokens x in), weight (out x in)
FTensor linear(const FTensor& x, const FTensor& w, const FTensor& b) {
  FTensor y;
  y.rows = x.rows;
  y.cols = w.rows;
  y.v.assign(y.rows * y.cols, 0.0f);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const float* xi = x.v.data() + i * x.cols;
    float* yi = y.v.data() + i * y.cols;
    for (std::size_t o = 0; o < w.rows; ++o) {
      const float* wo = w.v.data() + o * w.cols;
      float acc = b.v.empty() ? 0.0f : b.v[o];
      for (std::size_t k = 0; k < x.cols; ++k) acc += xi[k] * wo[k];
      yi[o] = acc;
    }
  }
  return y;
}

void layer_norm(FTensor& x, const FTensor& gamma, const FTensor& beta, float eps) {
  for (std::size_t i = 0; i < x.rows; ++i) {
    float* xi = x.v.data() + i * x.cols;
    float mean = 0.0f;
    for (std::size_t j = 0; j < x.cols; ++j) mean += xi[j];
    mean /= static_cast<float>(x.cols);
    float var = 0.0f;
    for (std::size_t j = 0; j < x.cols; ++j) {
      const float d = xi[j] - mean;
      var += d * d;
    }
    var /= static_cast<float>(x.cols);
    const float inv = 1.0f / std::sqrt(var + eps);
    for (std::size_t j = 0; j < x.cols; ++j)
      xi[j] = (xi[j] - mean) * inv * gamma.v[j] + beta.v[j];
  }
}

void add_inplace(FTensor& x, const FTensor& y) {
  for (std::size_t i = 0; i < x.v.size(); ++i) x.v[i] += y.v[i];
}

void gelu_inplace(FTensor& x) {
  constexpr float inv_sqrt2 = 0.70710678118654752f;
  for (float& v : x.v) v = 0.5f * v * (1.0f + std::erf(v * inv_sqrt2));
}

FTensor self_attention(const FTensor& x, const FTensor& q_w, const FTensor& q_b,
                       const FTensor& k_w, const FTensor& k_b, const FTensor& v_w,
                       const FTensor& v_b, std::size_t heads) {
  const std::size_t w_tokens = x.rows;
  const std::size_t dim = x.cols;
  const std::size_t head_dim = dim / heads;
  const FTensor q = linear(x, q_w, q_b);
  const FTensor k = linear(x, k_w, k_b);
  const FTensor v = linear(x, v_w, v_b);

  FTensor ctx;
  ctx.rows = w_tokens;
  ctx.cols = dim;
  ctx.v.assign(w_tokens * dim, 0.0f);
  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  std::vector<float> scores(w_tokens);

  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * head_dim;
    for (std::size_t i = 0; i < w_tokens; ++i) {
      const float* qi = q.v.data() + i * dim + off;
      float max_score = -1e30f;
      for (std::size_t j = 0; j < w_tokens; ++j) {
        const float* kj = k.v.data() + j * dim + off;
        float acc = 0.0f;
        for (std::size_t d = 0; d < head_dim; ++d) acc += qi[d] * kj[d];
        scores[j] = acc * scale;
        max_score = std::max(max_score, scores[j]);
      }
      float denom = 0.0f;
      for (std::size_t j = 0; j < w_tokens; ++j) {
        scores[j] = std::exp(scores[j] - max_score);
        denom += scores[j];
      }
      float* out = ctx.v.data() + i * dim + off;
      for (std::size_t j = 0; j < w_tokens; ++j) {
        const float p = scores[j] / denom;
        const float* vj = v.v.data() + j * dim + off;
        for (std::size_t d = 0; d < head_dim; ++d) out[d] += p * vj[d];
      }
    }
  }
  return ctx;
}

Matrix to_matrix(const FTensor& x) {
  Matrix m(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) m(i, j) = x.at(i, j);
  return m;
}

bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

Manifest Manifest::load(const std::filesystem::path& file) {
  const json doc = json::parse(read_file(file));
  Manifest m;
  m.hidden_size = doc.at("hidden_size").get<std::size_t>();
  m.num_layers = doc.at("num_layers").get<std::size_t>();
  m.num_heads = doc.at("num_heads").get<std::size_t>();
  m.intermediate_size = doc.at("intermediate_size").get<std::size_t>();
  m.vocab_size = doc.at("vocab_size").get<std::size_t>();
  m.max_input_length = doc.value("max_input_length", std::size_t{512});
  m.layer_norm_eps = doc.value("layer_norm_eps", 1e-12);
  m.lower_case = doc.value("lower_case", true);
  if (m.hidden_size == 0 || m.num_layers == 0 || m.num_heads == 0 ||
      m.hidden_size % m.num_heads != 0)
    throw std::runtime_error("manifest has inconsistent dimensions");
  return m;
}

// ---------------------------------------------------------------------------
// WordPiece
// ---------------------------------------------------------------------------

WordPieceTokenizer WordPieceTokenizer::load(const std::filesystem::path& vocab_file,
                                            bool lower_case) {
  std::ifstream in(vocab_file);
  if (!in) throw std::runtime_error("cannot open " + vocab_file.string());
  WordPieceTokenizer t;
  t.lower_case_ = lower_case;
  std::string line;
  int id = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.vocab_.emplace(line, id++);
  }
  const auto find = [&](const char* tok) {
    const auto it = t.vocab_.find(tok);
    return it == t.vocab_.end() ? -1 : it->second;
  };
  t.cls_ = find("[CLS]");
  t.sep_ = find("[SEP]");
  t.unk_ = find("[UNK]");
  if (t.cls_ < 0 || t.sep_ < 0 || t.unk_ < 0)
    throw std::runtime_error("vocabulary lacks [CLS]/[SEP]/[UNK]");
  return t;
}

WordPieceTokenizer::Encoding WordPieceTokenizer::encode(std::string_view sentence,
                                                        std::size_t max_len) const {
  // basic tokenization: whitespace split, punctuation split, optional lowering
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      words.push_back(current);
      current.clear();
    }
  };
  for (const char c : sentence) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      flush();
    } else if (uc < 0x80 && is_punct(uc)) {
      flush();
      words.emplace_back(1, c);
    } else {
      current.push_back(lower_case_ && uc < 0x80
                            ? static_cast<char>(std::tolower(uc))
                            : c);
    }
  }
  flush();

  std::vector<int> pieces;
  for (const auto& word : words) {
    if (word.size() > 100) {
      pieces.push_back(unk_);
      continue;
    }
    std::vector<int> word_pieces;
    std::size_t start = 0;
    bool bad = false;
    while (start < word.size()) {
      std::size_t end = word.size();
      int found = -1;
      while (start < end) {
        std::string sub = (start > 0 ? "##" : "") + word.substr(start, end - start);
        const auto it = vocab_.find(sub);
        if (it != vocab_.end()) {
          found = it->second;
          break;
        }
        --end;
      }
      if (found < 0) {
        bad = true;
        break;
      }
      word_pieces.push_back(found);
      start = end;
    }
    if (bad) {
      pieces.push_back(unk_);
    } else {
      pieces.insert(pieces.end(), word_pieces.begin(), word_pieces.end());
    }
  }

  Encoding enc;
  if (pieces.size() + 2 > max_len) {
    pieces.resize(max_len - 2);
    enc.truncated = true;
  }
  enc.ids.reserve(pieces.size() + 2);
  enc.ids.push_back(cls_);
  enc.ids.insert(enc.ids.end(), pieces.begin(), pieces.end());
  enc.ids.push_back(sep_);
  return enc;
}

// ---------------------------------------------------------------------------
// TransformerModel
// ---------------------------------------------------------------------------

std::unique_ptr<TransformerModel> TransformerModel::load(
    const std::filesystem::path& dir) {
  const Manifest manifest = Manifest::load(dir / "manifest.json");
  WordPieceTokenizer tokenizer =
      WordPieceTokenizer::load(dir / "vocab.txt", manifest.lower_case);

  SafeTensors st(dir / "model.safetensors");
  auto tensor_pair = [&](const std::string& base, FTensor& w, FTensor& b) {
    w = st.tensor(base + ".weight");
    b = st.tensor(base + ".bias");
  };
  auto norm_pair = [&](const std::string& base, FTensor& w, FTensor& b) {
    // older exports name LayerNorm params gamma/beta
    if (st.contains(base + ".weight") || st.contains("bert." + base + ".weight")) {
      tensor_pair(base, w, b);
    } else {
      w = st.tensor(base + ".gamma");
      b = st.tensor(base + ".beta");
    }
  };

  auto model = std::unique_ptr<TransformerModel>(
      new TransformerModel(manifest, std::move(tokenizer)));
  model->word_emb_ = st.tensor("embeddings.word_embeddings.weight");
  model->pos_emb_ = st.tensor("embeddings.position_embeddings.weight");
  model->type_emb_ = st.tensor("embeddings.token_type_embeddings.weight");
  norm_pair("embeddings.LayerNorm", model->emb_ln_w_, model->emb_ln_b_);

  if (model->word_emb_.cols != manifest.hidden_size)
    throw std::runtime_error("word embedding width disagrees with manifest");
  if (model->tokenizer_.vocab_size() > model->word_emb_.rows)
    throw std::runtime_error("vocabulary larger than the word embedding table");
  // never index past the position table, whatever the manifest claims
  model->manifest_.max_input_length =
      std::min(model->manifest_.max_input_length, model->pos_emb_.rows);

  model->layers_.resize(manifest.num_layers);
  for (std::size_t i = 0; i < manifest.num_layers; ++i) {
    const std::string base = "encoder.layer." + std::to_string(i) + ".";
    Layer& l = model->layers_[i];
    tensor_pair(base + "attention.self.query", l.q_w, l.q_b);
    tensor_pair(base + "attention.self.key", l.k_w, l.k_b);
    tensor_pair(base + "attention.self.value", l.v_w, l.v_b);
    tensor_pair(base + "attention.output.dense", l.attn_out_w, l.attn_out_b);
    norm_pair(base + "attention.output.LayerNorm", l.attn_ln_w, l.attn_ln_b);
    tensor_pair(base + "intermediate.dense", l.inter_w, l.inter_b);
    tensor_pair(base + "output.dense", l.out_w, l.out_b);
    norm_pair(base + "output.LayerNorm", l.out_ln_w, l.out_ln_b);
  }

  if (st.contains("pooler.dense.weight") || st.contains("bert.pooler.dense.weight")) {
    tensor_pair("pooler.dense", model->pooler_w_, model->pooler_b_);
    model->has_pooler_ = true;
  }
  return model;
}

TokenEmbeddings TransformerModel::encode(std::string_view sentence) const {
  const auto enc = tokenizer_.encode(sentence, manifest_.max_input_length);
  if (enc.truncated)
    std::cerr << "lectern: sentence truncated to " << manifest_.max_input_length
              << " tokens before inference\n";

  const std::size_t w_tokens = enc.ids.size();
  const std::size_t dim = manifest_.hidden_size;
  const auto eps = static_cast<float>(manifest_.layer_norm_eps);

  FTensor x;
  x.rows = w_tokens;
  x.cols = dim;
  x.v.assign(w_tokens * dim, 0.0f);
  for (std::size_t t = 0; t < w_tokens; ++t) {
    const auto id = static_cast<std::size_t>(enc.ids[t]);
    for (std::size_t j = 0; j < dim; ++j)
      x.v[t * dim + j] = word_emb_.at(id, j) + pos_emb_.at(t, j) + type_emb_.at(0, j);
  }
  layer_norm(x, emb_ln_w_, emb_ln_b_, eps);

  TokenEmbeddings out;
  out.tokens = w_tokens;
  out.special_prefix = 1;
  out.special_suffix = 1;
  out.layers.reserve(layers_.size());

  for (const Layer& l : layers_) {
    FTensor ctx = self_attention(x, l.q_w, l.q_b, l.k_w, l.k_b, l.v_w, l.v_b,
                                 manifest_.num_heads);
    FTensor attn = linear(ctx, l.attn_out_w, l.attn_out_b);
    add_inplace(attn, x);
    layer_norm(attn, l.attn_ln_w, l.attn_ln_b, eps);

    FTensor inter = linear(attn, l.inter_w, l.inter_b);
    gelu_inplace(inter);
    FTensor ff = linear(inter, l.out_w, l.out_b);
    add_inplace(ff, attn);
    layer_norm(ff, l.out_ln_w, l.out_ln_b, eps);

    x = std::move(ff);
    out.layers.push_back(to_matrix(x));
  }

  out.pooled_cls.resize(dim);
  if (has_pooler_) {
    for (std::size_t o = 0; o < dim; ++o) {
      float acc = pooler_b_.v[o];
      const float* wo = pooler_w_.v.data() + o * dim;
      for (std::size_t j = 0; j < dim; ++j) acc += x.v[j] * wo[j];
      out.pooled_cls[o] = std::tanh(acc);
    }
  } else {
    for (std::size_t j = 0; j < dim; ++j) out.pooled_cls[j] = x.v[j];
  }
  return out;
}

}  // namespace lectern::embed::detail
