#include "iam/transforms.hpp"

#include <cmath>
#include <string>

#include "iam/error.hpp"

namespace iam {

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::GumbelMap: return "gumbel_map";
    case TransformKind::BoundedGumbelMap: return "bounded_gumbel_map";
    case TransformKind::Logit: return "logit";
    case TransformKind::IdentityLoss: return "identity_loss";
    case TransformKind::Confidence: return "confidence";
  }
  return "unknown";
}

TransformKind parse_transform_kind(std::string_view text) {
  if (text == "gumbel_map") return TransformKind::GumbelMap;
  if (text == "bounded_gumbel_map") return TransformKind::BoundedGumbelMap;
  if (text == "logit") return TransformKind::Logit;
  if (text == "identity_loss") return TransformKind::IdentityLoss;
  if (text == "confidence") return TransformKind::Confidence;
  throw validation_error("invalid_transform", std::string(text));
}

void TransformConfig::validate() const {
  if (!(eps1 > 0.0) || !std::isfinite(eps1)) throw validation_error("invalid_eps1", "eps1 must be > 0");
  if (!(eps2 > 0.0) || !std::isfinite(eps2)) throw validation_error("invalid_eps2", "eps2 must be > 0");
  if (!(std::exp(eps1) > 1.0 + eps2))
    throw validation_error("invalid_eps", "exp(eps1) must exceed 1 + eps2");
}

namespace {

// -log p, accurate near p = 1 where p - 1 is exact.
double neg_log(double p) { return p > 0.5 ? -std::log1p(p - 1.0) : -std::log(p); }

void check_open_unit(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw validation_error("domain_error", "confidence " + format_double(p) + " outside (0,1)");
}

}  // namespace

double gumbel_map(double p) {
  check_open_unit(p);
  return -std::log(neg_log(p));
}

double bounded_gumbel_map(double p, double eps1, double eps2) {
  if (!(p >= 0.0 && p <= 1.0))
    throw validation_error("domain_error", "confidence " + format_double(p) + " outside [0,1]");
  const double shifted = p + eps2;
  const double log_shifted = shifted > 0.5 ? std::log1p(p - 1.0 + eps2) : std::log(shifted);
  return -std::log(eps1 - log_shifted);
}

double bounded_gumbel_map(double p, const TransformConfig& cfg) {
  cfg.validate();
  return bounded_gumbel_map(p, cfg.eps1, cfg.eps2);
}

double logit(double p) {
  check_open_unit(p);
  return std::log(p) - std::log1p(-p);
}

double transform_gap(double p, const TransformConfig& cfg) {
  return gumbel_map(p) - bounded_gumbel_map(p, cfg);
}

ResponseBounds bounds(const TransformConfig& cfg) {
  cfg.validate();
  return {-std::log(cfg.eps1 - std::log(cfg.eps2)), -std::log(cfg.eps1 - std::log1p(cfg.eps2))};
}

double transform(double p, const TransformConfig& cfg) {
  const double x = cfg.flip_input ? 1.0 - p : p;
  switch (cfg.kind) {
    case TransformKind::GumbelMap: return gumbel_map(x);
    case TransformKind::BoundedGumbelMap: return bounded_gumbel_map(x, cfg.eps1, cfg.eps2);
    case TransformKind::Logit: return logit(x);
    case TransformKind::IdentityLoss: check_open_unit(x); return -neg_log(x);
    case TransformKind::Confidence: check_open_unit(x); return x;
  }
  return x;
}

ResponseMatrix apply_transform(const ConfidenceMatrix& matrix, const TransformConfig& cfg) {
  if (cfg.kind == TransformKind::BoundedGumbelMap) cfg.validate();
  ResponseMatrix out = matrix;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      try {
        out.at(r, c) = transform(matrix.at(r, c), cfg);
      } catch (const Error& e) {
        throw validation_error(e.code(), matrix.example_ids()[r] + "/" + matrix.model_ids()[c] +
                                             ": " + e.detail());
      }
    }
  }
  return out;
}

}  // namespace iam
