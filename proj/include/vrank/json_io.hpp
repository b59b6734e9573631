#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vrank/model.hpp"

namespace vrank {

using json = nlohmann::json;

// Stable JSON schema for every persisted type. Keys are emitted sorted, so
// dumping the same value always yields the same bytes.

void to_json(json& j, const Problem& p);
/// Accepts both native field names (id, spec_text, module_interface,
/// reference_testbench) and VerilogEval names (task_id, prompt,
/// module_header, test). Unknown fields are ignored.
void from_json(const json& j, Problem& p);

void to_json(json& j, const Provenance& p);
void from_json(const json& j, Provenance& p);
void to_json(json& j, const Candidate& c);
void from_json(const json& j, Candidate& c);
void to_json(json& j, const TestCase& t);
void from_json(const json& j, TestCase& t);
void to_json(json& j, const Testbench& t);
void from_json(const json& j, Testbench& t);
void to_json(json& j, const ExecutionTrace& t);
void from_json(const json& j, ExecutionTrace& t);
void to_json(json& j, const Cluster& c);
void from_json(const json& j, Cluster& c);
void to_json(json& j, const ScoredCluster& s);
void from_json(const json& j, ScoredCluster& s);
void to_json(json& j, const ReferencePrediction& p);
void from_json(const json& j, ReferencePrediction& p);
void to_json(json& j, const CotParams& p);
void from_json(const json& j, CotParams& p);
void to_json(json& j, const RunParams& p);
void from_json(const json& j, RunParams& p);
void to_json(json& j, const CotDecision& d);
void from_json(const json& j, CotDecision& d);
void to_json(json& j, const RunReport& r);
void from_json(const json& j, RunReport& r);

std::string score_to_string(const Score& s);
Score score_from_string(const std::string& text);

/// Canonical on-disk form: two-space indent plus trailing newline.
std::string dump_report(const RunReport& report);
RunReport parse_report(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);
json read_json_file(const std::filesystem::path& path);

/// Reads a manifest: JSONL (one problem per line) or a JSON array.
std::vector<Problem> read_manifest(const std::filesystem::path& path);

/// traces.jsonl: one {"candidate": i, ...trace} object per line.
std::string dump_traces_jsonl(const std::vector<ExecutionTrace>& traces);
std::vector<ExecutionTrace> parse_traces_jsonl(const std::string& text);

}  // namespace vrank
