#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sparcs/model/fitted_model.hpp"
#include "sparcs/pipeline/cli.hpp"
#include "sparcs/service/predict_service.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>

namespace {

httplib::Server* g_server = nullptr;

void stop(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serve a trained SPARCS cost model over HTTP", "cost_server"};
  std::string model_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string allow_origin;
  app.add_option("--model", model_path, "Model JSON written by `sparcs_cost train`")->required();
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  app.add_option("--allow-origin", allow_origin, "Origin allowed by CORS (e.g. http://localhost:5173)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sparcs::pipeline::kExitConfig;
  }

  sparcs::service::PredictionService service;
  httplib::Server server;
  sparcs::service::mount(server, service, allow_origin);
  try {
    service.load(sparcs::model::FittedModel::load(model_path));
  } catch (const std::exception& e) {
    std::cerr << "cannot load model: " << e.what() << "\n";
    return sparcs::pipeline::kExitData;
  }

  g_server = &server;
  std::signal(SIGINT, stop);
  std::signal(SIGTERM, stop);
  std::cout << "serving " << model_path << " on " << host << ":" << port << std::endl;
  if (!server.listen(host, port)) {
    std::cerr << "cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}
