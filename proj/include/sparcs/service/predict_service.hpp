#pragma once

#include <atomic>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sparcs/data/schema.hpp"
#include "sparcs/model/fitted_model.hpp"

namespace httplib {
class Server;
}

namespace sparcs::service {

struct Response {
  int status = 200;
  nlohmann::json body;
};

// A request the service rejects: `status` is 400 or 422 and `field` names the
// offending schema feature (empty for body-level problems).
class RequestError : public std::runtime_error {
 public:
  RequestError(int status, std::string field, const std::string& message)
      : std::runtime_error(message), status_(status), field_(std::move(field)) {}
  int status() const { return status_; }
  const std::string& field() const { return field_; }

 private:
  int status_;
  std::string field_;
};

// Encodes a JSON request object into a row in schema order. Categorical
// features take strings (trimmed; unseen values map to the UNKNOWN code),
// numeric features take JSON numbers. Missing or mistyped fields raise
// RequestError 400; a negative numeric value raises 422. Extra keys are
// ignored.
std::vector<double> encode_request(const data::FeatureSchema& schema, const nlohmann::json& request);

// Handlers for GET /health, GET /schema and POST /predict, independent of
// any transport. The model is installed once; afterwards the service is
// read-only and every handler is safe to call concurrently.
class PredictionService {
 public:
  // Throws std::logic_error on a second call.
  void load(model::FittedModel model);
  bool ready() const { return ready_.load(std::memory_order_acquire); }

  Response health() const;
  Response schema() const;
  Response predict(std::string_view body) const;
  Response predict_json(const nlohmann::json& request) const;

 private:
  std::shared_ptr<const model::FittedModel> model_;
  std::atomic<bool> ready_{false};
};

// Cents-rounded dollars.
double round_cents(double dollars);

// Registers the three endpoints (plus CORS preflight when `allow_origin` is
// non-empty) on `server`. `service` must outlive the server.
void mount(httplib::Server& server, const PredictionService& service, const std::string& allow_origin);

}  // namespace sparcs::service
