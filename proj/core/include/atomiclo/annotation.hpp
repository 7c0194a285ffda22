#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atomiclo/corpus.hpp"
#include "atomiclo/taxonomy.hpp"

namespace atomiclo {

struct AnnotationState {
  std::vector<LOCode> selected;  // in selection order
  std::string notes;
  long revision = 0;
  std::string last_modified;  // ISO-8601 UTC; empty until the first write

  friend bool operator==(const AnnotationState&, const AnnotationState&) = default;
};

struct QuestionSummary {
  std::string id;
  std::string chapter;
  std::string dataset;
  std::size_t label_count = 0;
  long revision = 0;
};

struct QuestionFilter {
  std::optional<std::string> chapter;
  std::optional<std::string> dataset;
  std::optional<bool> labeled;
};

struct QuestionView {
  Question question;  // ground_truth and notes reflect the current state
  AnnotationState state;
  std::vector<LearningObjective> chapter_los;
};

struct ExportBundle {
  std::string jsonl;                      // corpus file, corpus order
  std::vector<std::string> unlabeled_ids;  // questions exported with no labels
};

/// Thrown on a stale expected_revision; carries the state the caller lost to.
class RevisionConflictError : public Error {
 public:
  RevisionConflictError(std::string id, AnnotationState current);
  const AnnotationState& current() const noexcept { return current_; }

 private:
  AnnotationState current_;
};

/// Label store for the tagging workflow. Writes are serialized, checked
/// against the caller's expected revision and persisted to `snapshot_path`
/// (atomic rename) before they return. The initial state of each question
/// comes from the corpus, at revision 0, unless a snapshot already exists.
class AnnotationStore {
 public:
  using Clock = std::function<std::string()>;

  /// An empty snapshot path keeps the store in memory only.
  AnnotationStore(Taxonomy taxonomy, Corpus corpus, std::filesystem::path snapshot_path,
                  Clock clock = {});

  const Taxonomy& taxonomy() const noexcept { return taxonomy_; }

  std::vector<QuestionSummary> list_questions(const QuestionFilter& filter = {}) const;
  /// Throws Error{NotFound}.
  QuestionView get_question(std::string_view id) const;

  /// Replaces the selected set. Duplicate codes are dropped, order kept.
  /// Throws Error{NotFound, InvalidCode, ChapterMismatch} or
  /// RevisionConflictError.
  AnnotationState put_labels(std::string_view id, std::span<const std::string> codes,
                             long expected_revision);
  /// Stores `text` verbatim; an empty string clears the notes.
  AnnotationState put_notes(std::string_view id, std::string text, long expected_revision);

  ExportBundle export_ground_truth() const;

 private:
  struct Entry {
    Question question;
    AnnotationState state;
  };

  Entry& entry(std::string_view id);
  const Entry& entry(std::string_view id) const;
  void check_revision(const Entry& e, long expected) const;
  void commit(Entry& e, AnnotationState next);
  void persist() const;
  void restore();

  Taxonomy taxonomy_;
  std::vector<Entry> entries_;
  std::filesystem::path snapshot_path_;
  Clock clock_;
  mutable std::mutex mutex_;
};

std::string serialize_state(const AnnotationState& state);

/// Minimal HTTP front end for an AnnotationStore.
class AnnotationServer {
 public:
  /// `static_dir` is served at "/" when nonempty.
  AnnotationServer(AnnotationStore& store, std::filesystem::path static_dir = {});
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  /// Binds and returns the port (an ephemeral one when `port` is 0).
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace atomiclo
