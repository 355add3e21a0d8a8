#pragma once

#include "treeshift/criteria.hpp"
#include "treeshift/witness.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace treeshift {

using json = nlohmann::ordered_json;

json load_json(const std::filesystem::path& path);

json to_json(cx z);
cx cx_from_json(const json& j);

/// Finite doubles as numbers, non-finite ones as "inf", "-inf" or "nan".
json number(double x);

json to_json(const TreeSpec& spec);
TreeSpec tree_from_json(const json& j);

json to_json(const WeightFamily& w);
WeightFamily weights_from_json(const json& j, const TreeSpec& spec);

/// Vector literal: list of [address, re, im] triples.
json to_json(const FinSuppVec& f);
FinSuppVec vector_from_json(const json& j);

json to_json(const CriterionReport& r);
/// vertex,n,value rows.
std::string to_csv(const CriterionReport& r);

json to_json(const WitnessReport& r);
/// j,vertex,re,im rows of the generators.
std::string to_csv(const WitnessReport& r);

json to_json(const FertilityVerdict& v);

} // namespace treeshift
