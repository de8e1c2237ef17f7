#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lectern/embedding.hpp"

namespace lectern::embed::detail {

/// model directory layout: manifest.json + vocab.txt + model.safetensors
struct Manifest {
  std::size_t hidden_size = 0;
  std::size_t num_layers = 0;
  std::size_t num_heads = 0;
  std::size_t intermediate_size = 0;
  std::size_t max_input_length = 512;
  std::size_t vocab_size = 0;
  double layer_norm_eps = 1e-12;
  bool lower_case = true;

  static Manifest load(const std::filesystem::path& file);
};

class WordPieceTokenizer {
 public:
  struct Encoding {
    std::vector<int> ids;  // [CLS] pieces... [SEP]
    bool truncated = false;
  };

  static WordPieceTokenizer load(const std::filesystem::path& vocab_file,
                                 bool lower_case);

  Encoding encode(std::string_view sentence, std::size_t max_len) const;

  int cls_id() const { return cls_; }
  int sep_id() const { return sep_; }
  int unk_id() const { return unk_; }
  std::size_t vocab_size() const { return vocab_.size(); }

 private:
  std::unordered_map<std::string, int> vocab_;
  bool lower_case_ = true;
  int cls_ = -1;
  int sep_ = -1;
  int unk_ = -1;
};

/// Row-major float32 tensor; weights stay in the precision they ship in.
struct FTensor {
  std::size_t rows = 0;
  std::size_t cols = 0;  // 1 for vectors
  std::vector<float> v;

  float at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

/// BERT-style bidirectional encoder, inference only. Loads HuggingFace-named
/// F32 tensors from a safetensors file. Stateless after construction.
class TransformerModel {
 public:
  static std::unique_ptr<TransformerModel> load(const std::filesystem::path& dir);

  /// Full hidden stack for one sentence. Over-length sentences are truncated
  /// to max_input_length and a note is written to stderr.
  TokenEmbeddings encode(std::string_view sentence) const;

  std::size_t hidden_size() const { return manifest_.hidden_size; }
  std::size_t num_layers() const { return manifest_.num_layers; }
  std::size_t max_input_length() const { return manifest_.max_input_length; }
  const WordPieceTokenizer& tokenizer() const { return tokenizer_; }

 private:
  struct Layer {
    FTensor q_w, q_b, k_w, k_b, v_w, v_b;
    FTensor attn_out_w, attn_out_b, attn_ln_w, attn_ln_b;
    FTensor inter_w, inter_b, out_w, out_b, out_ln_w, out_ln_b;
  };

  Manifest manifest_;
  WordPieceTokenizer tokenizer_;
  FTensor word_emb_, pos_emb_, type_emb_, emb_ln_w_, emb_ln_b_;
  std::vector<Layer> layers_;
  FTensor pooler_w_, pooler_b_;
  bool has_pooler_ = false;

  TransformerModel(Manifest manifest, WordPieceTokenizer tokenizer)
      : manifest_(manifest), tokenizer_(std::move(tokenizer)) {}
};

}  // namespace lectern::embed::detail
