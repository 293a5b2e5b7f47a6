#pragma once

#include <string_view>
#include <utility>

#include "iam/data_model.hpp"

namespace iam {

// Same layout as a ConfidenceMatrix; cells hold transformed responses.
using ResponseMatrix = ConfidenceMatrix;

// Confidence -> response maps. Every kind is strictly increasing in p.
enum class TransformKind {
  GumbelMap,         // -log(-log p)
  BoundedGumbelMap,  // -log(eps1 - log(p + eps2))
  Logit,             // log(p / (1 - p))
  IdentityLoss,      // log p, i.e. the negated cross-entropy loss
  Confidence,        // p itself
};

std::string_view to_string(TransformKind kind);
TransformKind parse_transform_kind(std::string_view text);

inline constexpr double kDefaultEps1 = 1e-2;
inline constexpr double kDefaultEps2 = 1e-5;

struct TransformConfig {
  TransformKind kind = TransformKind::BoundedGumbelMap;
  double eps1 = kDefaultEps1;
  double eps2 = kDefaultEps2;
  // Replace p with 1 - p before mapping (first half of the double flip).
  bool flip_input = false;

  // Throws unless eps1 > 0, eps2 > 0 and exp(eps1) > 1 + eps2.
  void validate() const;
};

double gumbel_map(double p);
double bounded_gumbel_map(double p, double eps1, double eps2);
double bounded_gumbel_map(double p, const TransformConfig& cfg);
double logit(double p);

// GumbelMap minus Bounded GumbelMap. Increasing in p for every valid config.
double transform_gap(double p, const TransformConfig& cfg);

struct ResponseBounds {
  double lower;  // M1 = -log(eps1 - log eps2)
  double upper;  // M2 = -log(eps1 - log(1 + eps2))
  // Popoviciu: any distribution supported on (M1, M2) has variance below this.
  double max_variance() const { return (upper - lower) * (upper - lower) / 4.0; }
};

ResponseBounds bounds(const TransformConfig& cfg);

// Applies cfg (including flip_input) to one confidence.
double transform(double p, const TransformConfig& cfg);

// Elementwise application; the result keeps the matrix layout.
ResponseMatrix apply_transform(const ConfidenceMatrix& matrix, const TransformConfig& cfg);

}  // namespace iam
