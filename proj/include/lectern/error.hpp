#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace lectern {

enum class ErrorCode {
  decode_error,         // input is not valid UTF-8
  malformed_timestamp,  // SRT timestamp line does not match the arrow format
  malformed_block,      // SRT block lacks a timestamp line
  empty_input,
  empty_content,
  model_unavailable,
  layer_out_of_range,
  k_too_large,
  empty_matrix,
  degenerate_input,
  empty_graph,
  invalid_params,
  no_sentences_retained,
  not_found,
  storage_error,
};

const char* to_string(ErrorCode code);

/// Single exception type for all typed failures; `index()` carries the
/// zero-based SRT block index when the parser raised the error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Error(ErrorCode code, std::string message, std::size_t index)
      : std::runtime_error(std::move(message)), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace lectern
