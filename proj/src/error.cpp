#include "lectern/error.hpp"

namespace lectern {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::decode_error: return "decode_error";
    case ErrorCode::malformed_timestamp: return "malformed_timestamp";
    case ErrorCode::malformed_block: return "malformed_block";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::empty_content: return "empty_content";
    case ErrorCode::model_unavailable: return "model_unavailable";
    case ErrorCode::layer_out_of_range: return "layer_out_of_range";
    case ErrorCode::k_too_large: return "k_too_large";
    case ErrorCode::empty_matrix: return "empty_matrix";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::empty_graph: return "empty_graph";
    case ErrorCode::invalid_params: return "invalid_params";
    case ErrorCode::no_sentences_retained: return "no_sentences_retained";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::storage_error: return "storage_error";
  }
  return "unknown";
}

}  // namespace lectern
