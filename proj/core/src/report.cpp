#include "atomiclo/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "json_io.hpp"

namespace atomiclo {

namespace {

using detail::OrderedJson;

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename T>
std::size_t index_of(const std::vector<T>& values, const T& value) {
  return static_cast<std::size_t>(std::find(values.begin(), values.end(), value) - values.begin());
}

struct Labeler {
  std::string model;
  PromptStrategy strategy;
  LOFormat format;
  int sample;
  std::string name;
};

std::vector<Labeler> labelers(const ExperimentConfig& cfg) {
  std::vector<Labeler> out;
  for (const auto& m : cfg.models) {
    for (auto s : cfg.strategies) {
      for (auto f : cfg.formats) {
        for (int sample = 0; sample < cfg.samples_per_cell; ++sample) {
          auto name = m.model_name + "/" + std::string(to_string(s)) + "/" + std::string(to_string(f));
          if (cfg.samples_per_cell > 1) name += "#" + std::to_string(sample);
          out.push_back({m.model_name, s, f, sample, std::move(name)});
        }
      }
    }
  }
  return out;
}

// One ground-truth set per question, in cell (question id) order.
std::vector<LabeledQuestion> human_questions(const RunRecord& record) {
  std::vector<LabeledQuestion> out;
  std::set<std::string> seen;
  for (const auto& cell : record.cells) {
    if (!seen.insert(cell.key.question_id).second) continue;
    out.push_back({cell.key.question_id, cell.chapter, cell.ground_truth, cell.ground_truth, 1.0});
  }
  return out;
}

std::vector<GroupMean> chapter_means(std::span<const LabeledQuestion> questions, bool use_truth) {
  std::vector<std::pair<std::string, std::size_t>> sizes;
  for (const auto& q : questions) {
    sizes.emplace_back(q.chapter, use_truth ? q.truth.size() : q.predicted.size());
  }
  return avg_lo_count(sizes);
}

}  // namespace

std::vector<MetricRow> aggregate_table(const RunRecord& record) {
  const auto& cfg = record.config;
  std::vector<std::string> datasets;
  std::vector<std::string> models;
  for (const auto& m : cfg.models) models.push_back(m.model_name);
  for (const auto& cell : record.cells) {
    if (index_of(datasets, cell.dataset) == datasets.size()) datasets.push_back(cell.dataset);
  }
  std::vector<MetricRow> rows;
  for (const auto& dataset : datasets) {
    for (const auto& model : models) {
      for (auto strategy : cfg.strategies) {
        for (auto format : cfg.formats) {
          MetricRow row;
          row.dataset = dataset;
          row.model_name = model;
          row.strategy = strategy;
          row.format = format;
          row.distance_mode = cfg.distance_mode;
          double jaccard = 0, f1 = 0, distance = 0;
          for (const auto& cell : record.cells) {
            if (cell.dataset != dataset || cell.key.model_name != model ||
                cell.key.strategy != strategy || cell.key.format != format) {
              continue;
            }
            if (!cell.score) {
              ++row.excluded;
              continue;
            }
            ++row.scored;
            row.exact_matches += static_cast<std::size_t>(cell.score->exact_match);
            jaccard += cell.score->jaccard;
            f1 += cell.score->f1;
            distance += cell.score->distance;
            row.distance_mode = cell.score->distance_mode;
          }
          if (row.scored + row.excluded == 0) continue;
          if (row.scored > 0) {
            const auto n = static_cast<double>(row.scored);
            row.mean_jaccard = jaccard / n;
            row.mean_f1 = f1 / n;
            row.mean_distance = distance / n;
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::string render_table_text(std::span<const MetricRow> rows) {
  const std::vector<std::string> header = {"Dataset", "Model", "Prompting", "Format", "EM",
                                           "Jaccard", "F1",    "Distance",  "Excluded"};
  std::vector<std::vector<std::string>> table = {header};
  for (const auto& r : rows) {
    table.push_back({r.dataset, r.model_name, std::string(to_string(r.strategy)),
                     std::string(to_string(r.format)),
                     std::to_string(r.exact_matches) + "/" + std::to_string(r.scored),
                     fixed(r.mean_jaccard, 3), fixed(r.mean_f1, 3), fixed(r.mean_distance, 3),
                     std::to_string(r.excluded)});
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], line[c].size());
  }
  std::string out = "Distance mode: ";
  out += rows.empty() ? "n/a" : std::string(to_string(rows.front().distance_mode));
  out += "\n";
  for (const auto& line : table) {
    std::string text;
    for (std::size_t c = 0; c < line.size(); ++c) {
      text += line[c];
      if (c + 1 < line.size()) text += std::string(widths[c] - line[c].size() + 2, ' ');
    }
    out += text + "\n";
  }
  return out;
}

std::string render_table_csv(std::span<const MetricRow> rows) {
  std::string out =
      "dataset,model,strategy,format,em_numerator,em_denominator,jaccard,f1,distance,excluded,"
      "distance_mode\n";
  for (const auto& r : rows) {
    out += csv_field(r.dataset) + "," + csv_field(r.model_name) + "," +
           std::string(to_string(r.strategy)) + "," + std::string(to_string(r.format)) + "," +
           std::to_string(r.exact_matches) + "," + std::to_string(r.scored) + "," +
           fixed(r.mean_jaccard, 3) + "," + fixed(r.mean_f1, 3) + "," + fixed(r.mean_distance, 3) +
           "," + std::to_string(r.excluded) + "," + std::string(to_string(r.distance_mode)) + "\n";
  }
  return out;
}

std::string render_table_json(std::span<const MetricRow> rows) {
  auto doc = OrderedJson::array();
  for (const auto& r : rows) {
    OrderedJson obj;
    obj["dataset"] = r.dataset;
    obj["model"] = r.model_name;
    obj["strategy"] = to_string(r.strategy);
    obj["format"] = to_string(r.format);
    obj["em"] = OrderedJson{{"numerator", r.exact_matches}, {"denominator", r.scored}};
    obj["jaccard"] = r.mean_jaccard;
    obj["f1"] = r.mean_f1;
    obj["distance"] = r.mean_distance;
    obj["excluded"] = r.excluded;
    obj["distance_mode"] = to_string(r.distance_mode);
    doc.push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

std::vector<LabeledQuestion> labeled_questions(const RunRecord& record, std::string_view model,
                                               PromptStrategy strategy, LOFormat format,
                                               int sample) {
  std::vector<LabeledQuestion> out;
  for (const auto& cell : record.cells) {
    if (!cell.score || cell.key.model_name != model || cell.key.strategy != strategy ||
        cell.key.format != format || cell.key.sample != sample) {
      continue;
    }
    out.push_back({cell.key.question_id, cell.chapter, cell.ground_truth,
                   cell.prediction ? cell.prediction->predicted : std::vector<LOCode>{},
                   cell.score->f1});
  }
  return out;
}

std::vector<GroupMean> avg_lo_count(
    std::span<const std::pair<std::string, std::size_t>> group_sizes) {
  std::vector<GroupMean> out;
  std::vector<std::size_t> totals;
  for (const auto& [group, size] : group_sizes) {
    auto it = std::find_if(out.begin(), out.end(), [&](const GroupMean& g) { return g.group == group; });
    if (it == out.end()) {
      out.push_back({group, 0.0, 0});
      totals.push_back(0);
      it = out.end() - 1;
    }
    const auto i = static_cast<std::size_t>(it - out.begin());
    totals[i] += size;
    ++it->questions;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean = static_cast<double>(totals[i]) / static_cast<double>(out[i].questions);
  }
  return out;
}

std::string_view to_string(HeatmapAxis axis) noexcept {
  return axis == HeatmapAxis::Human ? "human" : "model";
}

std::vector<HeatmapBucket> f1_by_count_heatmap(std::span<const LabeledQuestion> questions,
                                               HeatmapAxis axis) {
  std::map<std::size_t, std::pair<double, std::size_t>> buckets;
  for (const auto& q : questions) {
    const auto count = axis == HeatmapAxis::Human ? q.truth.size() : q.predicted.size();
    auto& [sum, n] = buckets[count];
    sum += q.f1;
    ++n;
  }
  std::vector<HeatmapBucket> out;
  for (const auto& [count, acc] : buckets) {
    out.push_back({count, acc.first / static_cast<double>(acc.second), acc.second});
  }
  return out;
}

std::vector<LOFrequency> lo_frequency(std::span<const std::vector<LOCode>> label_sets,
                                      std::span<const LearningObjective> universe) {
  std::map<LOCode, std::size_t> counts;
  for (const auto& set : label_sets) {
    std::set<LOCode> unique(set.begin(), set.end());
    for (const auto& code : unique) ++counts[code];
  }
  std::vector<LOFrequency> out;
  out.reserve(universe.size());
  for (const auto& lo : universe) {
    auto it = counts.find(lo.code);
    out.push_back({lo.code, it == counts.end() ? 0 : it->second});
  }
  return out;
}

std::vector<LOAccuracy> per_lo_accuracy(std::span<const LabeledQuestion> questions,
                                        std::size_t min_support) {
  std::vector<LOAccuracy> rows;
  for (const auto& q : questions) {
    std::set<LOCode> predicted(q.predicted.begin(), q.predicted.end());
    std::set<LOCode> seen;
    for (const auto& code : q.truth) {
      if (!seen.insert(code).second) continue;
      auto it = std::find_if(rows.begin(), rows.end(), [&](const LOAccuracy& r) { return r.code == code; });
      if (it == rows.end()) {
        rows.push_back({code, 0, 0, 0.0});
        it = rows.end() - 1;
      }
      ++it->support;
      if (predicted.contains(code)) ++it->hits;
    }
  }
  std::erase_if(rows, [&](const LOAccuracy& r) { return r.support < min_support; });
  for (auto& r : rows) r.accuracy = static_cast<double>(r.hits) / static_cast<double>(r.support);
  return rows;
}

void write_reports(const RunRecord& record, const Taxonomy& taxonomy,
                   const std::filesystem::path& dir, std::size_t min_support) {
  std::filesystem::create_directories(dir);
  const auto rows = aggregate_table(record);
  detail::write_file_atomic(dir / "table.txt", render_table_text(rows));
  detail::write_file_atomic(dir / "table.csv", render_table_csv(rows));
  detail::write_file_atomic(dir / "table.json", render_table_json(rows));

  const auto humans = human_questions(record);
  std::vector<LearningObjective> universe;
  for (const auto& chapter : taxonomy.chapters()) {
    const bool used = std::any_of(humans.begin(), humans.end(),
                                  [&](const LabeledQuestion& q) { return q.chapter == chapter; });
    if (!used) continue;
    for (auto& lo : taxonomy.subset_by_chapter(chapter)) universe.push_back(std::move(lo));
  }
  auto chapter_of = [&](const LOCode& code) { return taxonomy.at(code).chapter; };

  OrderedJson analytics;
  std::string avg_csv = "chapter,labeler,mean,questions\n";
  std::string heat_csv = "labeler,axis,lo_count,mean_f1,questions\n";
  std::string freq_csv = "labeler,code,chapter,count\n";
  std::string acc_csv = "labeler,code,support,hits,accuracy\n";

  auto emit_avg = [&](const std::string& labeler, const std::vector<GroupMean>& means) {
    auto& arr = analytics["avg_lo_count"][labeler] = OrderedJson::array();
    for (const auto& g : means) {
      avg_csv += csv_field(g.group) + "," + csv_field(labeler) + "," + fixed(g.mean, 2) + "," +
                 std::to_string(g.questions) + "\n";
      arr.push_back(OrderedJson{{"chapter", g.group}, {"mean", g.mean}, {"questions", g.questions}});
    }
  };
  auto emit_freq = [&](const std::string& labeler, const std::vector<std::vector<LOCode>>& sets) {
    auto& arr = analytics["lo_frequency"][labeler] = OrderedJson::array();
    for (const auto& f : lo_frequency(sets, universe)) {
      freq_csv += csv_field(labeler) + "," + f.code.str() + "," + csv_field(chapter_of(f.code)) +
                  "," + std::to_string(f.count) + "\n";
      arr.push_back(OrderedJson{{"code", f.code.str()}, {"count", f.count}});
    }
  };

  emit_avg("Human", chapter_means(humans, true));
  {
    std::vector<std::vector<LOCode>> sets;
    for (const auto& q : humans) sets.push_back(q.truth);
    emit_freq("Human", sets);
  }

  for (const auto& labeler : labelers(record.config)) {
    const auto questions =
        labeled_questions(record, labeler.model, labeler.strategy, labeler.format, labeler.sample);
    emit_avg(labeler.name, chapter_means(questions, false));

    for (auto axis : {HeatmapAxis::Human, HeatmapAxis::Model}) {
      auto& arr = analytics["heatmap"][labeler.name][std::string(to_string(axis))] = OrderedJson::array();
      for (const auto& b : f1_by_count_heatmap(questions, axis)) {
        heat_csv += csv_field(labeler.name) + "," + std::string(to_string(axis)) + "," +
                    std::to_string(b.lo_count) + "," + fixed(b.mean_f1, 3) + "," +
                    std::to_string(b.questions) + "\n";
        arr.push_back(OrderedJson{{"lo_count", b.lo_count}, {"mean_f1", b.mean_f1}, {"questions", b.questions}});
      }
    }

    std::vector<std::vector<LOCode>> sets;
    for (const auto& q : questions) sets.push_back(q.predicted);
    emit_freq(labeler.name, sets);

    auto& acc = analytics["per_lo_accuracy"][labeler.name] = OrderedJson::array();
    for (const auto& a : per_lo_accuracy(questions, min_support)) {
      acc_csv += csv_field(labeler.name) + "," + a.code.str() + "," + std::to_string(a.support) +
                 "," + std::to_string(a.hits) + "," + fixed(a.accuracy, 3) + "\n";
      acc.push_back(OrderedJson{{"code", a.code.str()}, {"support", a.support}, {"hits", a.hits},
                                {"accuracy", a.accuracy}});
    }
  }
  analytics["min_support"] = min_support;

  detail::write_file_atomic(dir / "avg_lo_count.csv", avg_csv);
  detail::write_file_atomic(dir / "heatmap.csv", heat_csv);
  detail::write_file_atomic(dir / "lo_frequency.csv", freq_csv);
  detail::write_file_atomic(dir / "per_lo_accuracy.csv", acc_csv);
  detail::write_file_atomic(dir / "analytics.json", analytics.dump(2) + "\n");
}

}  // namespace atomiclo
