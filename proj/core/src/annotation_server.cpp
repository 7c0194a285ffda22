#include <httplib.h>

#include "atomiclo/annotation.hpp"
#include "json_io.hpp"

namespace atomiclo {

namespace {

using detail::Json;
using detail::OrderedJson;

constexpr const char* kJson = "application/json";

OrderedJson lo_json(const LearningObjective& lo) {
  OrderedJson obj;
  obj["code"] = lo.code.str();
  obj["name"] = lo.name;
  obj["item"] = lo.item;
  obj["action"] = to_string(lo.action);
  obj["provided"] = lo.provided;
  obj["outcome"] = lo.outcome;
  obj["category"] = to_string(lo.category);
  obj["chapter"] = lo.chapter;
  return obj;
}

OrderedJson state_json(const AnnotationState& state) {
  return OrderedJson::parse(serialize_state(state));
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::RevisionConflict: return 409;
    case ErrorCode::InvalidCode:
    case ErrorCode::ChapterMismatch: return 422;
    case ErrorCode::IoError: return 500;
    default: return 400;
  }
}

void send(httplib::Response& res, int status, const OrderedJson& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const Error& e) {
  OrderedJson body;
  body["error"] = to_string(e.code());
  body["message"] = e.what();
  if (const auto* conflict = dynamic_cast<const RevisionConflictError*>(&e)) {
    body["state"] = state_json(conflict->current());
  }
  send(res, status_for(e.code()), body);
}

std::optional<std::string> param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  auto value = req.get_param_value(key);
  if (value.empty()) return std::nullopt;
  return value;
}

Json body_of(const httplib::Request& req) {
  auto doc = detail::parse_json(req.body, "request body");
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "request body must be a JSON object");
  return doc;
}

long expected_revision(const Json& body) {
  auto it = body.find("expected_revision");
  if (it == body.end() || !it->is_number_integer()) {
    throw Error(ErrorCode::MissingField, "expected_revision (integer) is required");
  }
  return it->get<long>();
}

// Wraps a handler so library errors become JSON error responses.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const Json::exception& e) {
      send_error(res, Error(ErrorCode::ParseError, e.what()));
    }
  };
}

}  // namespace

struct AnnotationServer::Impl {
  explicit Impl(AnnotationStore& s) : store(s) {}
  AnnotationStore& store;
  httplib::Server server;
};

AnnotationServer::AnnotationServer(AnnotationStore& store, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(store)) {
  auto& svr = impl_->server;
  auto& st = impl_->store;

  svr.Get("/api/questions", guarded([&st](const httplib::Request& req, httplib::Response& res) {
    QuestionFilter filter;
    filter.chapter = param(req, "chapter");
    filter.dataset = param(req, "dataset");
    if (auto labeled = param(req, "labeled")) {
      if (*labeled != "true" && *labeled != "false") {
        throw Error(ErrorCode::ParseError, "labeled must be true or false");
      }
      filter.labeled = *labeled == "true";
    }
    auto out = OrderedJson::array();
    for (const auto& s : st.list_questions(filter)) {
      out.push_back(OrderedJson{{"id", s.id},
                                {"chapter", s.chapter},
                                {"dataset", s.dataset},
                                {"label_count", s.label_count},
                                {"revision", s.revision}});
    }
    send(res, 200, out);
  }));

  svr.Get(R"(/api/questions/([^/]+))",
          guarded([&st](const httplib::Request& req, httplib::Response& res) {
            const auto view = st.get_question(req.matches[1].str());
            OrderedJson body;
            body["question"] = OrderedJson::parse(serialize_question(view.question));
            body["state"] = state_json(view.state);
            auto& los = body["los"] = OrderedJson::array();
            for (const auto& lo : view.chapter_los) los.push_back(lo_json(lo));
            send(res, 200, body);
          }));

  svr.Get("/api/los", guarded([&st](const httplib::Request& req, httplib::Response& res) {
    SearchFilters filters;
    filters.chapter = param(req, "chapter");
    if (auto c = param(req, "category")) filters.category = parse_category(*c);
    if (auto a = param(req, "action")) filters.action = parse_action(*a);
    auto out = OrderedJson::array();
    for (const auto& lo : search_los(st.taxonomy(), param(req, "query").value_or(""), filters)) {
      out.push_back(lo_json(lo));
    }
    send(res, 200, out);
  }));

  svr.Put(R"(/api/questions/([^/]+)/labels)",
          guarded([&st](const httplib::Request& req, httplib::Response& res) {
            const auto body = body_of(req);
            const auto it = body.find("codes");
            if (it == body.end() || !it->is_array()) {
              throw Error(ErrorCode::MissingField, "codes (array) is required");
            }
            const auto codes = it->get<std::vector<std::string>>();
            send(res, 200,
                 state_json(st.put_labels(req.matches[1].str(), codes, expected_revision(body))));
          }));

  svr.Put(R"(/api/questions/([^/]+)/notes)",
          guarded([&st](const httplib::Request& req, httplib::Response& res) {
            const auto body = body_of(req);
            const auto it = body.find("text");
            if (it == body.end() || !it->is_string()) {
              throw Error(ErrorCode::MissingField, "text (string) is required");
            }
            send(res, 200,
                 state_json(st.put_notes(req.matches[1].str(), it->get<std::string>(),
                                         expected_revision(body))));
          }));

  svr.Get("/api/export", guarded([&st](const httplib::Request& req, httplib::Response& res) {
    const auto bundle = st.export_ground_truth();
    if (param(req, "format") == "jsonl") {
      res.set_header("Content-Disposition", "attachment; filename=\"ground_truth.jsonl\"");
      res.set_content(bundle.jsonl, "application/x-ndjson");
      return;
    }
    OrderedJson body;
    body["corpus"] = bundle.jsonl;
    body["unlabeled_ids"] = bundle.unlabeled_ids;
    send(res, 200, body);
  }));

  if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) {
    svr.set_mount_point("/", static_dir.string());
  } else {
    svr.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<!doctype html><title>atomiclo</title><p>Annotation API at /api.</p>",
                      "text/html");
    });
  }
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  auto& svr = impl_->server;
  if (port == 0) {
    const int bound = svr.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host);
    return bound;
  }
  if (!svr.bind_to_port(host, port)) {
    throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void AnnotationServer::listen() { impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_) impl_->server.stop();
}

void AnnotationServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace atomiclo
