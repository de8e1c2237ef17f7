#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "lectern/embedding.hpp"
#include "lectern/store.hpp"
#include "lectern/summarizer.hpp"

namespace lectern {

/// Store + embedder glue used identically by the HTTP service and the CLI's
/// local mode, so both produce the same summaries for the same inputs.
class Engine {
 public:
  Engine(const std::filesystem::path& storage_path,
         std::optional<std::filesystem::path> model_dir);

  store::Store& store() { return store_; }
  const embed::EmbeddingEngine& embedder() const { return embedder_; }

  struct CreateResult {
    store::SummaryRecord record;
    bool cached = false;
  };

  /// Cache-first summary creation: an exact params match returns the stored
  /// record without touching the embedder.
  CreateResult create_summary(std::int64_t lecture_id, const std::string& name,
                              const pipeline::SummaryParams& params);

 private:
  store::Store store_;
  embed::EmbeddingEngine embedder_;
};

}  // namespace lectern
