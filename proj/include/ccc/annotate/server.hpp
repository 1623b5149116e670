#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "ccc/annotate/tasks.hpp"
#include "ccc/error.hpp"

namespace ccc {

struct ServerOptions {
  /// Served under "/" when set (the browser client's build output).
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP front of a TaskStore:
///   GET  /tasks                      review queue plus status counts
///   GET  /tasks/{id}
///   POST /tasks/{id}/box             {"box":[x,y,w,h], "normalized":bool}
///   POST /tasks/{id}/propose         optional box, "annotator"
///   POST /tasks/{id}/accept          optional "reviewer"
///   POST /tasks/{id}/reject
///   GET  /images/{id}/{bf|cd61|cd45} PNG bytes
/// Errors: {"error":{"code":<ErrorCode name>,"message":...}} with 400, 404,
/// 409 or 422.
class AnnotateServer {
 public:
  explicit AnnotateServer(TaskStore& store, ServerOptions options = {});
  ~AnnotateServer();
  AnnotateServer(const AnnotateServer&) = delete;
  AnnotateServer& operator=(const AnnotateServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws Io on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status for an error code.
int http_status(ErrorCode code);

}  // namespace ccc
