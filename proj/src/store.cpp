#include "lectern/store.hpp"

#include <sqlite3.h>

#include <chrono>
#include <ctime>

#include "lectern/error.hpp"

namespace lectern::store {

using nlohmann::json;

namespace {

// RAII around sqlite3_stmt with positional binding helpers.
class Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
      throw Error(ErrorCode::storage_error,
                  std::string("prepare failed: ") + sqlite3_errmsg(db));
  }
  ~Stmt() { sqlite3_finalize(stmt_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  Stmt& bind(int pos, std::int64_t v) {
    sqlite3_bind_int64(stmt_, pos, v);
    return *this;
  }
  Stmt& bind(int pos, const std::string& v) {
    sqlite3_bind_text(stmt_, pos, v.c_str(), static_cast<int>(v.size()),
                      SQLITE_TRANSIENT);
    return *this;
  }

  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(ErrorCode::storage_error,
                std::string("step failed: ") + sqlite3_errstr(rc));
  }

  std::int64_t column_int64(int col) { return sqlite3_column_int64(stmt_, col); }
  std::string column_text(int col) {
    const unsigned char* p = sqlite3_column_text(stmt_, col);
    return p == nullptr ? std::string()
                        : std::string(reinterpret_cast<const char*>(p));
  }

 private:
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string message = err != nullptr ? err : "unknown sqlite error";
    sqlite3_free(err);
    throw Error(ErrorCode::storage_error, "exec failed: " + message);
  }
}

std::string indices_to_json(const std::vector<std::size_t>& indices) {
  return json(indices).dump();
}

std::vector<std::size_t> indices_from_json(const std::string& text) {
  return json::parse(text).get<std::vector<std::size_t>>();
}

constexpr int kSchemaVersion = 1;

}  // namespace

std::string rfc3339_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Store::Store(const std::filesystem::path& db_path) {
  if (db_path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(db_path.parent_path(), ec);
  }
  if (sqlite3_open(db_path.string().c_str(), &db_) != SQLITE_OK) {
    const std::string message = sqlite3_errmsg(db_);
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorCode::storage_error, "cannot open " + db_path.string() + ": " + message);
  }
  exec(db_, "PRAGMA foreign_keys = ON;");
  migrate();
}

Store::~Store() { sqlite3_close(db_); }

void Store::migrate() {
  exec(db_, "BEGIN;");
  try {
    exec(db_,
         "CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);");
    {
      Stmt check(db_, "SELECT value FROM meta WHERE key = 'schema_version';");
      if (check.step()) {
        const int found = std::stoi(check.column_text(0));
        if (found > kSchemaVersion)
          throw Error(ErrorCode::storage_error,
                      "storage schema version " + std::to_string(found) +
                          " is newer than this build supports");
        // future migrations branch on `found` here
      } else {
        Stmt insert(db_, "INSERT INTO meta (key, value) VALUES ('schema_version', ?1);");
        insert.bind(1, std::to_string(kSchemaVersion));
        insert.step();
      }
    }
    exec(db_,
         "CREATE TABLE IF NOT EXISTS lectures ("
         "  id INTEGER PRIMARY KEY AUTOINCREMENT,"
         "  name TEXT NOT NULL,"
         "  content TEXT NOT NULL,"
         "  created_at TEXT NOT NULL);");
    exec(db_,
         "CREATE TABLE IF NOT EXISTS summaries ("
         "  id INTEGER PRIMARY KEY AUTOINCREMENT,"
         "  lecture_id INTEGER NOT NULL REFERENCES lectures(id) ON DELETE CASCADE,"
         "  name TEXT NOT NULL,"
         "  params TEXT NOT NULL,"
         "  sentence_indices TEXT NOT NULL,"
         "  text TEXT NOT NULL,"
         "  created_at TEXT NOT NULL,"
         "  UNIQUE (lecture_id, params));");
    exec(db_, "COMMIT;");
  } catch (...) {
    exec(db_, "ROLLBACK;");
    throw;
  }
}

int Store::schema_version() const {
  std::lock_guard lock(mutex_);
  Stmt stmt(db_, "SELECT value FROM meta WHERE key = 'schema_version';");
  if (!stmt.step()) throw Error(ErrorCode::storage_error, "missing schema version");
  return std::stoi(stmt.column_text(0));
}

LectureTranscript Store::put_lecture(const std::string& name, const std::string& content) {
  if (content.empty()) throw Error(ErrorCode::empty_content, "lecture content is empty");
  std::lock_guard lock(mutex_);
  LectureTranscript lecture;
  lecture.name = name;
  lecture.content = content;
  lecture.created_at = rfc3339_utc_now();
  Stmt stmt(db_, "INSERT INTO lectures (name, content, created_at) VALUES (?1, ?2, ?3);");
  stmt.bind(1, name).bind(2, content).bind(3, lecture.created_at);
  stmt.step();
  lecture.id = sqlite3_last_insert_rowid(db_);
  return lecture;
}

LectureTranscript Store::update_lecture(std::int64_t id, const std::string& name,
                                        const std::string& content) {
  if (content.empty()) throw Error(ErrorCode::empty_content, "lecture content is empty");
  std::lock_guard lock(mutex_);
  {
    Stmt stmt(db_, "UPDATE lectures SET name = ?1, content = ?2 WHERE id = ?3;");
    stmt.bind(1, name).bind(2, content).bind(3, id);
    stmt.step();
  }
  if (sqlite3_changes(db_) == 0)
    throw Error(ErrorCode::not_found, "lecture " + std::to_string(id) + " not found");
  {
    // edited content invalidates every cached summary of this lecture
    Stmt stmt(db_, "DELETE FROM summaries WHERE lecture_id = ?1;");
    stmt.bind(1, id);
    stmt.step();
  }
  Stmt fetch(db_, "SELECT id, name, content, created_at FROM lectures WHERE id = ?1;");
  fetch.bind(1, id);
  fetch.step();
  return LectureTranscript{fetch.column_int64(0), fetch.column_text(1),
                           fetch.column_text(2), fetch.column_text(3)};
}

LectureTranscript Store::get_lecture(std::int64_t id) const {
  std::lock_guard lock(mutex_);
  Stmt stmt(db_, "SELECT id, name, content, created_at FROM lectures WHERE id = ?1;");
  stmt.bind(1, id);
  if (!stmt.step())
    throw Error(ErrorCode::not_found, "lecture " + std::to_string(id) + " not found");
  return LectureTranscript{stmt.column_int64(0), stmt.column_text(1), stmt.column_text(2),
                           stmt.column_text(3)};
}

std::vector<LectureTranscript> Store::list_lectures() const {
  std::lock_guard lock(mutex_);
  Stmt stmt(db_,
            "SELECT id, name, content, created_at FROM lectures "
            "ORDER BY created_at, id;");
  std::vector<LectureTranscript> lectures;
  while (stmt.step())
    lectures.push_back(LectureTranscript{stmt.column_int64(0), stmt.column_text(1),
                                         stmt.column_text(2), stmt.column_text(3)});
  return lectures;
}

void Store::delete_lecture(std::int64_t id) {
  std::lock_guard lock(mutex_);
  Stmt stmt(db_, "DELETE FROM lectures WHERE id = ?1;");
  stmt.bind(1, id);
  stmt.step();
  if (sqlite3_changes(db_) == 0)
    throw Error(ErrorCode::not_found, "lecture " + std::to_string(id) + " not found");
}

SummaryRecord Store::put_summary(const SummaryRecord& record) {
  std::lock_guard lock(mutex_);
  {
    Stmt exists(db_, "SELECT 1 FROM lectures WHERE id = ?1;");
    exists.bind(1, record.lecture_id);
    if (!exists.step())
      throw Error(ErrorCode::not_found,
                  "lecture " + std::to_string(record.lecture_id) + " not found");
  }
  const std::string params_key = record.params.to_canonical_json().dump();
  SummaryRecord stored = record;
  stored.created_at = rfc3339_utc_now();
  {
    Stmt stmt(db_,
              "INSERT OR IGNORE INTO summaries "
              "(lecture_id, name, params, sentence_indices, text, created_at) "
              "VALUES (?1, ?2, ?3, ?4, ?5, ?6);");
    stmt.bind(1, record.lecture_id)
        .bind(2, record.name)
        .bind(3, params_key)
        .bind(4, indices_to_json(record.sentence_indices))
        .bind(5, record.text)
        .bind(6, stored.created_at);
    stmt.step();
  }
  // either the fresh row or the identity winner from a concurrent insert
  Stmt fetch(db_,
             "SELECT id, lecture_id, name, params, sentence_indices, text, created_at "
             "FROM summaries WHERE lecture_id = ?1 AND params = ?2;");
  fetch.bind(1, record.lecture_id).bind(2, params_key);
  if (!fetch.step())
    throw Error(ErrorCode::storage_error, "summary insert did not persist");
  stored.id = fetch.column_int64(0);
  stored.name = fetch.column_text(2);
  stored.sentence_indices = indices_from_json(fetch.column_text(4));
  stored.text = fetch.column_text(5);
  stored.created_at = fetch.column_text(6);
  return stored;
}

namespace {

SummaryRecord record_from_row(Stmt& stmt) {
  SummaryRecord record;
  record.id = stmt.column_int64(0);
  record.lecture_id = stmt.column_int64(1);
  record.name = stmt.column_text(2);
  record.params = SummaryParams::from_json(json::parse(stmt.column_text(3)));
  record.sentence_indices = indices_from_json(stmt.column_text(4));
  record.text = stmt.column_text(5);
  record.created_at = stmt.column_text(6);
  return record;
}

}  // namespace

SummaryRecord Store::get_summary(std::int64_t id) const {
  std::lock_guard lock(mutex_);
  Stmt stmt(db_,
            "SELECT id, lecture_id, name, params, sentence_indices, text, created_at "
            "FROM summaries WHERE id = ?1;");
  stmt.bind(1, id);
  if (!stmt.step())
    throw Error(ErrorCode::not_found, "summary " + std::to_string(id) + " not found");
  return record_from_row(stmt);
}

std::vector<SummaryRecord> Store::list_summaries(
    std::optional<std::int64_t> lecture_id) const {
  std::lock_guard lock(mutex_);
  std::vector<SummaryRecord> records;
  if (lecture_id) {
    Stmt stmt(db_,
              "SELECT id, lecture_id, name, params, sentence_indices, text, created_at "
              "FROM summaries WHERE lecture_id = ?1 ORDER BY created_at, id;");
    stmt.bind(1, *lecture_id);
    while (stmt.step()) records.push_back(record_from_row(stmt));
  } else {
    Stmt stmt(db_,
              "SELECT id, lecture_id, name, params, sentence_indices, text, created_at "
              "FROM summaries ORDER BY created_at, id;");
    while (stmt.step()) records.push_back(record_from_row(stmt));
  }
  return records;
}

void Store::delete_summary(std::int64_t id) {
  std::lock_guard lock(mutex_);
  Stmt stmt(db_, "DELETE FROM summaries WHERE id = ?1;");
  stmt.bind(1, id);
  stmt.step();
  if (sqlite3_changes(db_) == 0)
    throw Error(ErrorCode::not_found, "summary " + std::to_string(id) + " not found");
}

std::optional<SummaryRecord> Store::find_cached_summary(
    std::int64_t lecture_id, const SummaryParams& params) const {
  std::lock_guard lock(mutex_);
  Stmt stmt(db_,
            "SELECT id, lecture_id, name, params, sentence_indices, text, created_at "
            "FROM summaries WHERE lecture_id = ?1 AND params = ?2;");
  stmt.bind(1, lecture_id).bind(2, params.to_canonical_json().dump());
  if (!stmt.step()) return std::nullopt;
  return record_from_row(stmt);
}

}  // namespace lectern::store
