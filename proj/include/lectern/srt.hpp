#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lectern::srt {

struct SrtCue {
  int64_t sequence = 0;
  int64_t start_ms = 0;
  int64_t end_ms = 0;
  std::string text;  // payload, internal line breaks already joined
};

struct ParseResult {
  std::vector<SrtCue> cues;
  // Cue numbers that do not strictly increase are accepted; this flag records
  // that the file was irregular.
  bool non_monotonic_sequence = false;
};

/// Parse SubRip input. UTF-8 with optional BOM; `,` or `.` accepted as the
/// millisecond separator; `<...>`/`{...}` styling tags stripped; cues empty
/// after cleaning are dropped. Throws Error with codes decode_error,
/// malformed_timestamp or malformed_block (block index attached).
ParseResult parse_srt(std::string_view input);

/// Join cue payloads with single spaces, collapsing whitespace runs.
std::string cues_to_paragraph(const std::vector<SrtCue>& cues);

}  // namespace lectern::srt
