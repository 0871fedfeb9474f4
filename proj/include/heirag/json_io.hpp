#pragma once

#include <span>

#include <nlohmann/json.hpp>

#include "heirag/explainer.hpp"
#include "heirag/hei.hpp"
#include "heirag/ingest.hpp"
#include "heirag/recommender.hpp"
#include "heirag/retrieval.hpp"

namespace heirag {

// Readers throw SchemaError on missing or mistyped fields and unknown keys.

nlohmann::json intake_to_json(const IntakeProfile& x);
/// Absent fields are zero. The result is validated.
IntakeProfile intake_from_json(const nlohmann::json& doc);

nlohmann::json demographics_to_json(const Demographics& d);
Demographics demographics_from_json(const nlohmann::json& doc);

/// {"seqn", "demographics", "intake", "days"}. When only "days" is given the
/// intake is their mean; when only "intake" is given "days" stays empty.
nlohmann::json user_to_json(const UserRecord& u);
UserRecord user_from_json(const nlohmann::json& doc);

/// Total plus the thirteen components with id, name, value, points and
/// max_points. Zero-energy and infinite values are written as null.
nlohmann::json hei_to_json(const HeiScore& h, const StandardsTable& standards);
nlohmann::json deltas_to_json(const ComponentDeltas& d);

nlohmann::json modification_to_json(const Modification& m);
nlohmann::json plan_to_json(const Plan& p, const StandardsTable& standards);
nlohmann::json candidate_to_json(const Candidate& c, const FoodIndex& index);
nlohmann::json grounded_to_json(const GroundedRecommendation& r);
nlohmann::json food_to_json(const FoodItem& f);

}  // namespace heirag
