#pragma once

#include <nlohmann/json.hpp>

#include "demod/domain.hpp"

namespace demod {

void to_json(nlohmann::json& j, const Span& s);
void to_json(nlohmann::json& j, const Post& p);
void from_json(const nlohmann::json& j, Post& p);
void to_json(nlohmann::json& j, const KeywordSpan& k);
void to_json(nlohmann::json& j, const DetectionResult& d);
void to_json(nlohmann::json& j, const TokenContribution& c);
void to_json(nlohmann::json& j, const Substitution& s);
void from_json(const nlohmann::json& j, Substitution& s);
void to_json(nlohmann::json& j, const PairExample& p);
void from_json(const nlohmann::json& j, PairExample& p);
void to_json(nlohmann::json& j, const Comment& c);
void from_json(const nlohmann::json& j, Comment& c);
void to_json(nlohmann::json& j, const UserProfile& p);
void from_json(const nlohmann::json& j, UserProfile& p);
void to_json(nlohmann::json& j, const AuthGrant& g);
void from_json(const nlohmann::json& j, AuthGrant& g);
void to_json(nlohmann::json& j, const SimulationResult& s);
void to_json(nlohmann::json& j, const ModificationResult& m);

nlohmann::json word_space_to_json(const ToxicWordSpace& space);
ToxicWordSpace word_space_from_json(const nlohmann::json& j);

}  // namespace demod
