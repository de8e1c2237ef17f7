#include "lectern/srt.hpp"

#include <cctype>
#include <charconv>
#include <string>

#include "lectern/error.hpp"

namespace lectern::srt {

namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len;
    uint32_t cp;
    if (b0 < 0x80) {
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1Fu;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0Fu;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07u;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto bk = static_cast<unsigned char>(s[i + k]);
      if ((bk & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (bk & 0x3Fu);
    }
    // overlong encodings, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
        cp > 0x10FFFF)
      return false;
    i += len;
  }
  return true;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

// Removes well-formed <...> and {...} spans; unterminated openers are kept
// verbatim so malformed payload text is never silently truncated.
std::string strip_tags(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '<' || c == '{') {
      const char closer = (c == '<') ? '>' : '}';
      const std::size_t end = s.find(closer, i + 1);
      if (end != std::string_view::npos) {
        i = end + 1;
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_int(std::string_view s, int64_t& out) {
  if (s.empty()) return false;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

// HH:MM:SS,mmm with `.` tolerated in place of the comma. Returns false on any
// shape mismatch.
bool parse_timestamp(std::string_view s, int64_t& out_ms) {
  std::size_t i = 0;
  auto digits = [&](std::size_t min_d, std::size_t max_d, int64_t& val) {
    std::size_t start = i;
    val = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) &&
           i - start < max_d) {
      val = val * 10 + (s[i] - '0');
      ++i;
    }
    return i - start >= min_d;
  };
  int64_t h, m, sec, ms;
  if (!digits(1, 3, h)) return false;
  if (i >= s.size() || s[i] != ':') return false;
  ++i;
  if (!digits(2, 2, m)) return false;
  if (i >= s.size() || s[i] != ':') return false;
  ++i;
  if (!digits(2, 2, sec)) return false;
  if (i >= s.size() || (s[i] != ',' && s[i] != '.')) return false;
  ++i;
  if (!digits(3, 3, ms)) return false;
  if (i != s.size()) return false;
  out_ms = ((h * 60 + m) * 60 + sec) * 1000 + ms;
  return true;
}

bool parse_timing_line(std::string_view line, int64_t& start_ms, int64_t& end_ms) {
  const std::size_t arrow = line.find("-->");
  if (arrow == std::string_view::npos) return false;
  const std::string_view lhs = trim(line.substr(0, arrow));
  std::string_view rhs = trim(line.substr(arrow + 3));
  // trailing cue settings (e.g. position hints) after the end stamp are ignored
  const std::size_t sp = rhs.find_first_of(" \t");
  if (sp != std::string_view::npos) rhs = rhs.substr(0, sp);
  return parse_timestamp(lhs, start_ms) && parse_timestamp(rhs, end_ms);
}

}  // namespace

ParseResult parse_srt(std::string_view input) {
  if (input.substr(0, 3) == "\xEF\xBB\xBF") input.remove_prefix(3);
  if (!valid_utf8(input))
    throw Error(ErrorCode::decode_error, "input is not valid UTF-8");

  std::string normalized;
  normalized.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input[i] == '\r') {
      if (i + 1 < input.size() && input[i + 1] == '\n') continue;
      normalized.push_back('\n');
    } else {
      normalized.push_back(input[i]);
    }
  }

  // split into blank-line-separated blocks
  std::vector<std::vector<std::string_view>> blocks;
  std::vector<std::string_view> current;
  std::string_view text = normalized;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
    if (trim(line).empty()) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(line);
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  if (!current.empty()) blocks.push_back(std::move(current));

  ParseResult result;
  int64_t prev_sequence = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& lines = blocks[b];
    std::size_t line_idx = 0;
    int64_t sequence = 0;
    const bool has_number = parse_int(trim(lines[0]), sequence);
    if (has_number) ++line_idx;

    if (line_idx >= lines.size()) {
      throw Error(ErrorCode::malformed_block,
                  "block " + std::to_string(b) + " lacks a timestamp line", b);
    }
    int64_t start_ms = 0;
    int64_t end_ms = 0;
    if (!parse_timing_line(trim(lines[line_idx]), start_ms, end_ms)) {
      throw Error(ErrorCode::malformed_timestamp,
                  "block " + std::to_string(b) +
                      ": timestamp line does not match 'HH:MM:SS,mmm --> HH:MM:SS,mmm'",
                  b);
    }
    if (start_ms > end_ms) {
      throw Error(ErrorCode::malformed_timestamp,
                  "block " + std::to_string(b) + ": cue start is after cue end", b);
    }
    ++line_idx;

    std::string payload;
    for (std::size_t i = line_idx; i < lines.size(); ++i) {
      if (!payload.empty()) payload.push_back(' ');
      payload += strip_tags(lines[i]);
    }
    payload = collapse_whitespace(payload);
    if (payload.empty()) continue;

    if (!has_number) sequence = prev_sequence + 1;
    if (sequence <= prev_sequence && !result.cues.empty())
      result.non_monotonic_sequence = true;
    prev_sequence = sequence;
    result.cues.push_back(SrtCue{sequence, start_ms, end_ms, std::move(payload)});
  }
  return result;
}

std::string cues_to_paragraph(const std::vector<SrtCue>& cues) {
  std::string joined;
  for (const auto& cue : cues) {
    if (!joined.empty()) joined.push_back(' ');
    joined += cue.text;
  }
  return collapse_whitespace(joined);
}

}  // namespace lectern::srt
