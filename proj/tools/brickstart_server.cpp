// brickstart-server: the pipeline over HTTP for the browser client.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "brickstart/service.hpp"

namespace {
httplib::Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brickstart-server: HTTP API for brickstart sessions"};
  std::string host = "127.0.0.1";
  int port = 8080;
  int threads = 0;
  app.add_option("--host", host, "bind address")->envname("BRICKSTART_HOST");
  app.add_option("--port", port, "TCP port, 0 picks a free one")->envname("BRICKSTART_PORT")->check(CLI::Range(0, 65535));
  app.add_option("--threads", threads, "worker threads (default: hardware concurrency)")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    std::cerr << brickstart::Json{{"stage", "usage"}, {"code", "invalid_argument"}, {"message", e.what()}}.dump() << "\n";
    return brickstart::kExitUsage;
  }

  httplib::Server srv;
  if (threads > 0) srv.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  brickstart::Service service;
  service.mount(srv);

  const int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    std::cerr << brickstart::Json{{"stage", "listen"}, {"code", "io_error"},
                                  {"message", "cannot bind " + host + ":" + std::to_string(port)}}
                     .dump()
              << "\n";
    return brickstart::exit_code(brickstart::ErrorCode::IoError);
  }
  g_server = &srv;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on http://" << host << ":" << bound << "\n";
  srv.listen_after_bind();
  return 0;
}
