#include <algorithm>
#include <set>

#include "atomiclo/annotation.hpp"
#include "json_io.hpp"

namespace atomiclo {

namespace {

using detail::Json;
using detail::OrderedJson;

OrderedJson state_json(const AnnotationState& state) {
  OrderedJson obj;
  auto& codes = obj["selected"] = OrderedJson::array();
  for (const auto& code : state.selected) codes.push_back(code.str());
  obj["notes"] = state.notes;
  obj["revision"] = state.revision;
  obj["last_modified"] = state.last_modified;
  return obj;
}

}  // namespace

RevisionConflictError::RevisionConflictError(std::string id, AnnotationState current)
    : Error(ErrorCode::RevisionConflict,
            id + " is at revision " + std::to_string(current.revision)),
      current_(std::move(current)) {}

std::string serialize_state(const AnnotationState& state) { return state_json(state).dump(); }

AnnotationStore::AnnotationStore(Taxonomy taxonomy, Corpus corpus,
                                 std::filesystem::path snapshot_path, Clock clock)
    : taxonomy_(std::move(taxonomy)),
      snapshot_path_(std::move(snapshot_path)),
      clock_(clock ? std::move(clock) : Clock(detail::utc_now)) {
  for (const auto& q : corpus.questions()) {
    entries_.push_back({q, AnnotationState{q.ground_truth, q.notes, 0, ""}});
  }
  if (!snapshot_path_.empty() && std::filesystem::exists(snapshot_path_)) restore();
}

AnnotationStore::Entry& AnnotationStore::entry(std::string_view id) {
  return const_cast<Entry&>(std::as_const(*this).entry(id));
}

const AnnotationStore::Entry& AnnotationStore::entry(std::string_view id) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const Entry& e) { return e.question.id == id; });
  if (it == entries_.end()) throw Error(ErrorCode::NotFound, "no question '" + std::string(id) + "'");
  return *it;
}

std::vector<QuestionSummary> AnnotationStore::list_questions(const QuestionFilter& filter) const {
  std::lock_guard lock(mutex_);
  std::vector<QuestionSummary> out;
  for (const auto& e : entries_) {
    const auto& q = e.question;
    if (filter.chapter && q.chapter != *filter.chapter) continue;
    if (filter.dataset && q.dataset != *filter.dataset) continue;
    if (filter.labeled && *filter.labeled == e.state.selected.empty()) continue;
    out.push_back({q.id, q.chapter, q.dataset, e.state.selected.size(), e.state.revision});
  }
  return out;
}

QuestionView AnnotationStore::get_question(std::string_view id) const {
  std::lock_guard lock(mutex_);
  const auto& e = entry(id);
  QuestionView view{e.question, e.state, taxonomy_.subset_by_chapter(e.question.chapter)};
  view.question.ground_truth = e.state.selected;
  view.question.notes = e.state.notes;
  return view;
}

void AnnotationStore::check_revision(const Entry& e, long expected) const {
  if (expected != e.state.revision) throw RevisionConflictError(e.question.id, e.state);
}

void AnnotationStore::commit(Entry& e, AnnotationState next) {
  next.revision = e.state.revision + 1;
  next.last_modified = clock_();
  auto previous = std::exchange(e.state, std::move(next));
  try {
    persist();
  } catch (...) {
    e.state = std::move(previous);
    throw;
  }
}

AnnotationState AnnotationStore::put_labels(std::string_view id,
                                            std::span<const std::string> codes,
                                            long expected_revision) {
  std::lock_guard lock(mutex_);
  auto& e = entry(id);
  std::vector<LOCode> selected;
  for (const auto& text : codes) {
    auto code = try_parse_lo_code(text);
    const auto* lo = code ? taxonomy_.find(*code) : nullptr;
    if (!lo) throw Error(ErrorCode::InvalidCode, "unknown LO code '" + text + "'");
    if (lo->chapter != e.question.chapter) {
      throw Error(ErrorCode::ChapterMismatch,
                  text + " belongs to " + lo->chapter + ", not " + e.question.chapter);
    }
    if (std::find(selected.begin(), selected.end(), *code) == selected.end()) {
      selected.push_back(*code);
    }
  }
  check_revision(e, expected_revision);
  auto next = e.state;
  next.selected = std::move(selected);
  commit(e, std::move(next));
  return e.state;
}

AnnotationState AnnotationStore::put_notes(std::string_view id, std::string text,
                                           long expected_revision) {
  std::lock_guard lock(mutex_);
  auto& e = entry(id);
  check_revision(e, expected_revision);
  auto next = e.state;
  next.notes = std::move(text);
  commit(e, std::move(next));
  return e.state;
}

ExportBundle AnnotationStore::export_ground_truth() const {
  std::lock_guard lock(mutex_);
  ExportBundle bundle;
  for (const auto& e : entries_) {
    auto q = e.question;
    q.ground_truth = e.state.selected;
    q.notes = e.state.notes;
    if (q.ground_truth.empty()) bundle.unlabeled_ids.push_back(q.id);
    bundle.jsonl += serialize_question(q);
    bundle.jsonl += '\n';
  }
  return bundle;
}

void AnnotationStore::persist() const {
  if (snapshot_path_.empty()) return;
  OrderedJson doc;
  auto& questions = doc["questions"] = OrderedJson::array();
  for (const auto& e : entries_) {
    auto obj = state_json(e.state);
    obj["id"] = e.question.id;
    questions.push_back(std::move(obj));
  }
  if (snapshot_path_.has_parent_path()) std::filesystem::create_directories(snapshot_path_.parent_path());
  detail::write_file_atomic(snapshot_path_, doc.dump(2) + "\n");
}

void AnnotationStore::restore() {
  const auto doc = detail::parse_json(detail::read_file(snapshot_path_), "annotation snapshot");
  const auto it = doc.find("questions");
  if (!doc.is_object() || it == doc.end() || !it->is_array()) {
    throw Error(ErrorCode::ParseError, "annotation snapshot needs a 'questions' array");
  }
  for (const auto& obj : *it) {
    const auto id = detail::required_string(obj, "id", "annotation snapshot");
    auto found = std::find_if(entries_.begin(), entries_.end(),
                              [&](const Entry& e) { return e.question.id == id; });
    if (found == entries_.end()) {
      throw Error(ErrorCode::NotFound, "snapshot question '" + id + "' is not in the corpus");
    }
    try {
      AnnotationState state;
      for (const auto& code : obj.at("selected")) {
        const auto& lo = taxonomy_.at(parse_lo_code(code.get<std::string>()));
        if (lo.chapter != found->question.chapter) {
          throw Error(ErrorCode::ChapterMismatch, id + ": " + lo.code.str());
        }
        state.selected.push_back(lo.code);
      }
      state.notes = obj.at("notes").get<std::string>();
      state.revision = obj.at("revision").get<long>();
      state.last_modified = obj.at("last_modified").get<std::string>();
      found->state = std::move(state);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::ParseError, "annotation snapshot, question '" + id + "': " + e.what());
    }
  }
}

}  // namespace atomiclo
