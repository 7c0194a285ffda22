#include "atomiclo/corpus.hpp"

#include <algorithm>
#include <set>

#include "json_io.hpp"

namespace atomiclo {

namespace {

std::string summarize(const std::vector<CorpusIssue>& issues) {
  std::string msg = std::to_string(issues.size()) + " invalid question(s)";
  for (const auto& issue : issues) {
    msg += "; " + issue.question_id + ": " + std::string(to_string(issue.code)) +
           (issue.detail.empty() ? "" : " (" + issue.detail + ")");
  }
  return msg;
}

ErrorCode first_code(const std::vector<CorpusIssue>& issues) {
  return issues.empty() ? ErrorCode::ParseError : issues.front().code;
}

void dedupe(std::vector<LOCode>& codes) {
  std::set<LOCode> seen;
  std::erase_if(codes, [&](const LOCode& c) { return !seen.insert(c).second; });
}

}  // namespace

CorpusError::CorpusError(std::vector<CorpusIssue> issues)
    : Error(first_code(issues), summarize(issues)), issues_(std::move(issues)) {}

Corpus Corpus::from_questions(std::vector<Question> questions, const Taxonomy& taxonomy,
                              CorpusMode mode) {
  std::vector<CorpusIssue> issues;
  std::set<std::string, std::less<>> ids;
  for (auto& q : questions) {
    dedupe(q.ground_truth);
    if (!ids.insert(q.id).second) {
      issues.push_back({q.id, ErrorCode::DuplicateQuestionId, ""});
      continue;
    }
    if (!taxonomy.has_chapter(q.chapter)) {
      issues.push_back({q.id, ErrorCode::UnknownChapter, q.chapter});
      continue;
    }
    if (mode == CorpusMode::Labeled && q.ground_truth.empty()) {
      issues.push_back({q.id, ErrorCode::EmptyGroundTruth, ""});
      continue;
    }
    for (const auto& code : q.ground_truth) {
      const auto* lo = taxonomy.find(code);
      if (!lo) {
        issues.push_back({q.id, ErrorCode::UnknownLOCode, code.str()});
        break;
      }
      if (lo->chapter != q.chapter) {
        issues.push_back(
            {q.id, ErrorCode::ChapterMismatch, code.str() + " belongs to '" + lo->chapter + "'"});
        break;
      }
    }
  }
  if (!issues.empty()) throw CorpusError(std::move(issues));

  Corpus corpus;
  corpus.questions_ = std::move(questions);
  corpus.mode_ = mode;
  return corpus;
}

const Question* Corpus::find(std::string_view id) const noexcept {
  auto it = std::find_if(questions_.begin(), questions_.end(),
                         [&](const Question& q) { return q.id == id; });
  return it == questions_.end() ? nullptr : &*it;
}

Corpus parse_corpus(std::string_view jsonl, const Taxonomy& taxonomy, CorpusMode mode) {
  std::vector<Question> questions;
  std::vector<CorpusIssue> issues;
  std::size_t line_no = 0;
  while (!jsonl.empty()) {
    const auto nl = jsonl.find('\n');
    const auto line = jsonl.substr(0, nl);
    jsonl = nl == std::string_view::npos ? std::string_view{} : jsonl.substr(nl + 1);
    ++line_no;
    if (detail::trim(line).empty()) continue;

    const auto where = "line " + std::to_string(line_no);
    std::string id = where;
    try {
      const auto obj = detail::parse_json(line, where);
      if (!obj.is_object()) throw Error(ErrorCode::ParseError, "not an object");
      Question q;
      q.id = detail::required_string(obj, "id", where);
      id = q.id;
      q.chapter = detail::required_string(obj, "chapter", id);
      q.source = detail::required_string(obj, "source", id);
      q.dataset = detail::required_string(obj, "dataset", id);
      q.text = detail::required_string(obj, "text", id);
      auto gt = obj.find("ground_truth");
      if (gt != obj.end() && !gt->is_null()) {
        if (!gt->is_array()) throw Error(ErrorCode::ParseError, "ground_truth must be an array");
        for (const auto& code : *gt) {
          if (!code.is_string()) throw Error(ErrorCode::ParseError, "ground_truth entries must be strings");
          auto parsed = try_parse_lo_code(detail::trim(code.get<std::string>()));
          if (!parsed) {
            throw Error(ErrorCode::UnknownLOCode, "'" + code.get<std::string>() + "' is not an LO code");
          }
          q.ground_truth.push_back(*std::move(parsed));
        }
      }
      if (auto notes = obj.find("notes"); notes != obj.end() && notes->is_string()) {
        q.notes = notes->get<std::string>();
      }
      questions.push_back(std::move(q));
    } catch (const Error& e) {
      issues.push_back({id, e.code(), e.what()});
    }
  }
  if (!issues.empty()) {
    // Run the semantic checks on the readable questions too, so a single
    // pass reports every problem in the file.
    try {
      Corpus::from_questions(std::move(questions), taxonomy, mode);
    } catch (const CorpusError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
    throw CorpusError(std::move(issues));
  }
  return Corpus::from_questions(std::move(questions), taxonomy, mode);
}

Corpus load_corpus(const std::filesystem::path& path, const Taxonomy& taxonomy, CorpusMode mode) {
  return parse_corpus(detail::read_file(path), taxonomy, mode);
}

std::string serialize_question(const Question& q) {
  detail::OrderedJson obj;
  obj["id"] = q.id;
  obj["chapter"] = q.chapter;
  obj["source"] = q.source;
  obj["dataset"] = q.dataset;
  obj["text"] = q.text;
  auto& gt = obj["ground_truth"] = detail::OrderedJson::array();
  for (const auto& code : q.ground_truth) gt.push_back(code.str());
  if (!q.notes.empty()) obj["notes"] = q.notes;
  return obj.dump();
}

std::string serialize_corpus(std::span<const Question> questions) {
  std::string out;
  for (const auto& q : questions) {
    out += serialize_question(q);
    out += '\n';
  }
  return out;
}

std::vector<CorpusStatsRow> corpus_stats(const Corpus& corpus) {
  std::vector<CorpusStatsRow> rows;
  for (const auto& q : corpus.questions()) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const CorpusStatsRow& r) {
      return r.chapter == q.chapter && r.source == q.source && r.dataset == q.dataset;
    });
    if (it == rows.end()) {
      rows.push_back({q.chapter, q.source, q.dataset, 1});
    } else {
      ++it->count;
    }
  }
  return rows;
}

}  // namespace atomiclo
