#include "sparcs/service/predict_service.hpp"

#include <cmath>
#include <utility>

#include <httplib.h>

#include "sparcs/data/ingest.hpp"

namespace sparcs::service {

namespace {

Response unavailable() { return {503, {{"status", "loading"}, {"error", "model not loaded"}}}; }

Response rejected(const RequestError& e) {
  nlohmann::json body = {{"error", e.what()}};
  if (!e.field().empty()) body["field"] = e.field();
  return {e.status(), std::move(body)};
}

}  // namespace

double round_cents(double dollars) { return std::round(dollars * 100.0) / 100.0; }

std::vector<double> encode_request(const data::FeatureSchema& schema, const nlohmann::json& request) {
  if (!request.is_object()) throw RequestError(400, "", "request body must be a JSON object");
  std::vector<double> row;
  row.reserve(schema.size());
  for (const auto& f : schema.features()) {
    const auto it = request.find(f.name);
    if (it == request.end() || it->is_null()) {
      throw RequestError(400, f.name, "missing field " + f.name);
    }
    if (f.is_categorical()) {
      if (!it->is_string()) throw RequestError(400, f.name, "field " + f.name + " must be a string");
      row.push_back(static_cast<double>(f.encode(data::trim(it->get_ref<const std::string&>()))));
    } else {
      if (!it->is_number()) throw RequestError(400, f.name, "field " + f.name + " must be a number");
      const double v = it->get<double>();
      if (!std::isfinite(v)) throw RequestError(400, f.name, "field " + f.name + " must be finite");
      if (v < 0.0) throw RequestError(422, f.name, "field " + f.name + " must be >= 0");
      row.push_back(v);
    }
  }
  return row;
}

void PredictionService::load(model::FittedModel model) {
  if (model_) throw std::logic_error("prediction service model is already loaded");
  model_ = std::make_shared<const model::FittedModel>(std::move(model));
  ready_.store(true, std::memory_order_release);
}

Response PredictionService::health() const {
  if (!ready()) return {503, {{"status", "loading"}}};
  return {200, {{"status", "ok"}, {"model_family", model::to_string(model_->family())}}};
}

Response PredictionService::schema() const {
  if (!ready()) return unavailable();
  nlohmann::json body = model_->schema().to_json();
  body["schema_fingerprint"] = model_->schema_fingerprint();
  body["model_family"] = model::to_string(model_->family());
  return {200, std::move(body)};
}

Response PredictionService::predict(std::string_view body) const {
  if (!ready()) return unavailable();
  nlohmann::json request = nlohmann::json::parse(body, nullptr, false);
  if (request.is_discarded()) return rejected(RequestError(400, "", "request body is not valid JSON"));
  return predict_json(request);
}

Response PredictionService::predict_json(const nlohmann::json& request) const {
  if (!ready()) return unavailable();
  try {
    const auto row = encode_request(model_->schema(), request);
    const double cost = model_->predict_encoded(row);
    if (!std::isfinite(cost)) return {500, {{"error", "model produced a non-finite prediction"}}};
    return {200,
            {{"predicted_cost", round_cents(cost)},
             {"model_family", model::to_string(model_->family())},
             {"schema_fingerprint", model_->schema_fingerprint()}}};
  } catch (const RequestError& e) {
    return rejected(e);
  }
}

void mount(httplib::Server& server, const PredictionService& service, const std::string& allow_origin) {
  auto send = [allow_origin](httplib::Response& res, const Response& r) {
    res.status = r.status;
    if (!allow_origin.empty()) res.set_header("Access-Control-Allow-Origin", allow_origin);
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get("/health", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.health());
  });
  server.Get("/schema", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.schema());
  });
  server.Post("/predict", [&service, send](const httplib::Request& req, httplib::Response& res) {
    const auto type = req.get_header_value("Content-Type");
    if (type.rfind("application/json", 0) != 0) {
      send(res, {415, {{"error", "Content-Type must be application/json"}}});
      return;
    }
    send(res, service.predict(req.body));
  });
  if (!allow_origin.empty()) {
    server.Options(R"(/.*)", [allow_origin](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Origin", allow_origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
  }
}

}  // namespace sparcs::service
