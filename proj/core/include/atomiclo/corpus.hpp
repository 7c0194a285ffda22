#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atomiclo/error.hpp"
#include "atomiclo/taxonomy.hpp"

namespace atomiclo {

struct Question {
  std::string id;
  std::string chapter;
  std::string source;   // e.g. "Course", "OpenStax"
  std::string dataset;  // e.g. "Energy", "Chapter 8"
  std::string text;
  std::vector<LOCode> ground_truth;  // deduplicated, first-occurrence order
  std::string notes;                 // empty when absent

  friend bool operator==(const Question&, const Question&) = default;
};

enum class CorpusMode { Labeled, Unlabeled };

struct CorpusIssue {
  std::string question_id;  // "line N" when the id itself is unreadable
  ErrorCode code;
  std::string detail;
};

/// Raised by the corpus loaders. Validation runs over the whole file and
/// collects one issue per rejected question; code() is the first issue's.
class CorpusError : public Error {
 public:
  explicit CorpusError(std::vector<CorpusIssue> issues);
  const std::vector<CorpusIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<CorpusIssue> issues_;
};

class Corpus {
 public:
  Corpus() = default;

  /// Validates ids, ground-truth resolution and chapter membership.
  static Corpus from_questions(std::vector<Question> questions, const Taxonomy& taxonomy,
                               CorpusMode mode);

  std::span<const Question> questions() const noexcept { return questions_; }
  std::size_t size() const noexcept { return questions_.size(); }
  CorpusMode mode() const noexcept { return mode_; }
  const Question* find(std::string_view id) const noexcept;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.mode_ == b.mode_ && a.questions_ == b.questions_;
  }

 private:
  std::vector<Question> questions_;
  CorpusMode mode_ = CorpusMode::Labeled;
};

/// One JSON object per line; blank lines are skipped.
Corpus parse_corpus(std::string_view jsonl, const Taxonomy& taxonomy, CorpusMode mode);
Corpus load_corpus(const std::filesystem::path& path, const Taxonomy& taxonomy, CorpusMode mode);

std::string serialize_question(const Question& question);
std::string serialize_corpus(std::span<const Question> questions);

struct CorpusStatsRow {
  std::string chapter;
  std::string source;
  std::string dataset;
  std::size_t count = 0;

  friend bool operator==(const CorpusStatsRow&, const CorpusStatsRow&) = default;
};

/// Question counts per (chapter, source, dataset) in order of first appearance.
std::vector<CorpusStatsRow> corpus_stats(const Corpus& corpus);

}  // namespace atomiclo
