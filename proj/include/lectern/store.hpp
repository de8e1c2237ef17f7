#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lectern/summarizer.hpp"

struct sqlite3;

namespace lectern::store {

using pipeline::LectureTranscript;
using pipeline::SummaryParams;
using pipeline::SummaryRecord;

/// Single-file persistent store for lectures and summaries. Two tables plus a
/// versioned meta table; summaries are unique per (lecture, canonical params)
/// so identical requests share one cached row. Writes are serialized; every
/// operation is atomic.
class Store {
 public:
  explicit Store(const std::filesystem::path& db_path);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  LectureTranscript put_lecture(const std::string& name, const std::string& content);
  /// Replaces name/content and drops the lecture's cached summaries.
  LectureTranscript update_lecture(std::int64_t id, const std::string& name,
                                   const std::string& content);
  LectureTranscript get_lecture(std::int64_t id) const;
  std::vector<LectureTranscript> list_lectures() const;  // created_at, then id
  void delete_lecture(std::int64_t id);                  // cascades to summaries

  /// Persists the record; if a record with the same (lecture, params) identity
  /// already exists, returns that record unchanged.
  SummaryRecord put_summary(const SummaryRecord& record);
  SummaryRecord get_summary(std::int64_t id) const;
  std::vector<SummaryRecord> list_summaries(
      std::optional<std::int64_t> lecture_id = {}) const;
  void delete_summary(std::int64_t id);

  /// Exact match on canonicalized params (defaults filled), else nothing.
  std::optional<SummaryRecord> find_cached_summary(std::int64_t lecture_id,
                                                   const SummaryParams& params) const;

  int schema_version() const;

 private:
  void migrate();
  mutable std::mutex mutex_;
  sqlite3* db_ = nullptr;
};

/// Current time as RFC 3339 UTC, second resolution.
std::string rfc3339_utc_now();

}  // namespace lectern::store
