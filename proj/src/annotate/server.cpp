#include "ccc/annotate/server.hpp"

#include <cmath>

#include <fmt/format.h>
#include <httplib.h>

#include "ccc/error.hpp"
#include "ccc/imaging/image_io.hpp"

namespace ccc {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::InvalidTransition: return 409;
    case ErrorCode::EmptyProposal:
    case ErrorCode::BoxOutOfBounds:
    case ErrorCode::DegeneratePolygon: return 422;
    case ErrorCode::Io:
    case ErrorCode::BackendUnavailable: return 500;
    default: return 400;
  }
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status(code), {{"error", {{"code", to_string(code)}, {"message", message}}}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
  return j;
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw Error(ErrorCode::InvalidArgument, fmt::format("'{}' must be a string", key));
  return j[key].get<std::string>();
}

/// Pixel boxes pass through; normalized boxes are widened outward to whole
/// pixels.
std::optional<Box> box_from_body(const json& j, int width, int height) {
  if (!j.contains("box") || j["box"].is_null()) return std::nullopt;
  const json& b = j["box"];
  if (!b.is_array() || b.size() != 4) throw Error(ErrorCode::InvalidArgument, "box must be [x,y,w,h]");
  for (const auto& v : b)
    if (!v.is_number()) throw Error(ErrorCode::InvalidArgument, "box values must be numbers");
  if (j.value("normalized", false)) {
    const double x = b[0].get<double>(), y = b[1].get<double>(), w = b[2].get<double>(), h = b[3].get<double>();
    const int x0 = static_cast<int>(std::floor(x * width));
    const int y0 = static_cast<int>(std::floor(y * height));
    const int x1 = static_cast<int>(std::ceil((x + w) * width));
    const int y1 = static_cast<int>(std::ceil((y + h) * height));
    return Box{x0, y0, x1 - x0, y1 - y0};
  }
  for (const auto& v : b)
    if (!v.is_number_integer()) throw Error(ErrorCode::InvalidArgument, "pixel box values must be integers");
  return Box{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
}

}  // namespace

struct AnnotateServer::Impl {
  TaskStore& store;
  httplib::Server http;

  explicit Impl(TaskStore& s) : store(s) {}

  template <typename F>
  void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      send_error(res, ErrorCode::InvalidArgument, e.what());
    }
  }
};

AnnotateServer::AnnotateServer(TaskStore& store, ServerOptions options) : impl_(std::make_unique<Impl>(store)) {
  Impl& im = *impl_;
  auto& http = im.http;

  http.Get("/tasks", [&im](const httplib::Request&, httplib::Response& res) {
    im.guarded(res, [&] {
      json tasks = json::array();
      json counts = {{"pending", 0}, {"proposed", 0}, {"accepted", 0}};
      for (const auto& t : im.store.review_queue()) {
        tasks.push_back(to_json(t));
        counts[std::string(to_string(t.status))] = counts[std::string(to_string(t.status))].get<int>() + 1;
      }
      counts["total"] = tasks.size();
      send_json(res, 200, {{"tasks", tasks}, {"counts", counts}});
    });
  });

  http.Get(R"(/tasks/([^/]+))", [&im](const httplib::Request& req, httplib::Response& res) {
    im.guarded(res, [&] { send_json(res, 200, to_json(im.store.get(req.matches[1]))); });
  });

  http.Post(R"(/tasks/([^/]+)/(box|propose|accept|reject))", [&im](const httplib::Request& req,
                                                                    httplib::Response& res) {
    im.guarded(res, [&] {
      const std::string id = req.matches[1];
      const std::string action = req.matches[2];
      const AnnotationTask current = im.store.get(id);
      const json body = parse_body(req);
      AnnotationTask t;
      if (action == "box") {
        const auto box = box_from_body(body, current.width, current.height);
        if (!box) throw Error(ErrorCode::InvalidArgument, "missing 'box'");
        t = im.store.set_box(id, *box);
      } else if (action == "propose") {
        t = im.store.propose(id, box_from_body(body, current.width, current.height), opt_string(body, "annotator"));
      } else if (action == "accept") {
        t = im.store.accept(id, opt_string(body, "reviewer"));
      } else {
        t = im.store.reject(id);
      }
      json out = {{"task", to_json(t)}};
      if (t.proposal) out["polygon"] = polygon_to_json(*t.proposal);
      if (t.status == TaskStatus::Accepted) out["label_file"] = im.store.label_path(id).string();
      send_json(res, 200, out);
    });
  });

  http.Get(R"(/images/([^/]+)/([a-z0-9]+))", [&im](const httplib::Request& req, httplib::Response& res) {
    im.guarded(res, [&] {
      const MultiChannelRecord& r = im.store.record(req.matches[1]);
      const auto ch = parse_channel(std::string(req.matches[2]));
      if (!ch) throw Error(ErrorCode::NotFound, "unknown channel '" + std::string(req.matches[2]) + "'");
      const auto path = r.channel_path(*ch);
      if (!path) throw Error(ErrorCode::NotFound, fmt::format("record '{}' has no {} image", r.id, to_string(*ch)));
      const auto png = encode_png(read_image(*path));
      res.status = 200;
      res.set_content(reinterpret_cast<const char*>(png.data()), png.size(), "image/png");
    });
  });

  if (options.static_dir && !http.set_mount_point("/", options.static_dir->string())) {
    throw Error(ErrorCode::Io, "static directory not found: " + options.static_dir->string());
  }
}

AnnotateServer::~AnnotateServer() { stop(); }

int AnnotateServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(host);
  } else if (!impl_->http.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(ErrorCode::Io, fmt::format("cannot bind {}:{}", host, port));
  return bound;
}

void AnnotateServer::run() { impl_->http.listen_after_bind(); }

void AnnotateServer::stop() {
  if (impl_) impl_->http.stop();
}

}  // namespace ccc
