#pragma once

// nlohmann::json conversions for the domain types. These define the record
// files of the project store and the documents exchanged by the HTTP API.

#include <json.hpp>

#include "treebench/checker.hpp"
#include "treebench/merge.hpp"
#include "treebench/model.hpp"
#include "treebench/store.hpp"

namespace treebench {

using Json = nlohmann::json;

void to_json(Json& j, const Token& t);
void from_json(const Json& j, Token& t);
void to_json(Json& j, const DepEdge& e);
void from_json(const Json& j, DepEdge& e);
// Decoding goes through DepGraph::build and so throws GraphError on
// structurally invalid input.
void to_json(Json& j, const DepGraph& g);
void from_json(const Json& j, DepGraph& g);
void to_json(Json& j, const Tagset& ts);
void from_json(const Json& j, Tagset& ts);
void to_json(Json& j, const EditOp& op);
void from_json(const Json& j, EditOp& op);

namespace check {
void to_json(Json& j, const Rule& r);
void from_json(const Json& j, Rule& r);
void to_json(Json& j, const Locus& l);
void to_json(Json& j, const Finding& f);
void to_json(Json& j, const CheckReport& r);
}  // namespace check

namespace merge {
void to_json(Json& j, const ParseSet& ps);
void from_json(const Json& j, ParseSet& ps);
void to_json(Json& j, const AgreementReport& r);
void to_json(Json& j, const Conflict& c);
void to_json(Json& j, const MergeResult& m);
}  // namespace merge

namespace store {
void to_json(Json& j, const AnnotationRecord& r);
void from_json(const Json& j, AnnotationRecord& r);
void to_json(Json& j, const ProjectSettings& s);
void from_json(const Json& j, ProjectSettings& s);
}  // namespace store

}  // namespace treebench
