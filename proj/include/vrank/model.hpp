#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace vrank {

/// Consistency scores are exact rationals: strict scores are integers, case-wise
/// scores have denominator m.
using Score = boost::rational<std::int64_t>;

struct Problem {
  std::string id;
  std::string spec_text;
  std::string module_interface;
  std::optional<std::string> reference_testbench;  // evaluation only
};

/// Throws Error{invalid_argument} when id or module_interface is empty.
void validate(const Problem& problem);

/// Throws Error{invalid_argument} on duplicate or empty ids.
void validate_manifest(const std::vector<Problem>& manifest);

enum class ProvenanceKind { llm, injected };

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::llm;
  std::string provider;
  std::string model;

  bool operator==(const Provenance&) const = default;
};

/// Identity is the generation index, never the content: duplicate sources are
/// distinct candidates.
struct Candidate {
  int index = 0;
  std::string source;
  Provenance provenance;

  bool operator==(const Candidate&) const = default;
};

struct TestCase {
  int index = 0;
  std::string stimulus;
  std::optional<std::string> description;

  bool operator==(const TestCase&) const = default;
};

struct Testbench {
  std::string source;
  int case_count = 0;
  std::string marker_prefix = "VRANK";

  bool operator==(const Testbench&) const = default;
};

enum class TraceStatus { ok, compile_error, runtime_error, timeout, malformed_output };

/// Normalized per-case marker records of one simulation. Records are only
/// populated when status is ok, and then there is exactly one per test case.
struct ExecutionTrace {
  TraceStatus status = TraceStatus::ok;
  std::vector<std::string> records;

  bool ok() const noexcept { return status == TraceStatus::ok; }
  bool operator==(const ExecutionTrace&) const = default;
};

inline ExecutionTrace failed_trace(TraceStatus status) { return {status, {}}; }

struct Cluster {
  std::vector<int> members;  // ascending candidate indices
  ExecutionTrace canonical_trace;
  bool failed = false;

  int min_member() const { return members.front(); }
  std::size_t size() const noexcept { return members.size(); }
  bool operator==(const Cluster&) const = default;
};

struct ScoredCluster {
  Cluster cluster;
  Score score;

  bool operator==(const ScoredCluster&) const = default;
};

/// One reason-then-summarize exchange. `parsed` maps output signal names to
/// predicted values and is absent when the summary held no usable JSON.
struct ReferencePrediction {
  int attempt = 0;
  std::optional<std::map<std::string, std::string>> parsed;
  std::string raw_reasoning;
  std::string raw_summary;

  bool operator==(const ReferencePrediction&) const = default;
};

enum class LossKind { strict, case_wise };
enum class RepresentativeMode { deterministic, seeded_random };

struct CotParams {
  bool enabled = true;
  int x = 5;        // reasoning attempts per comparison
  int th = 80;      // percent of attempts that must back the challenger
  int depth = 2;    // clusters considered, counting the incumbent
  bool strict_greater = false;

  bool operator==(const CotParams&) const = default;
};

/// Run parameters, persisted into every report for provenance.
struct RunParams {
  int n = 10;
  int m_min = 10;
  LossKind loss = LossKind::strict;
  CotParams cot;
  RepresentativeMode representative = RepresentativeMode::deterministic;
  std::uint64_t seed = 0;
  std::string marker_prefix = "VRANK";
  int settle_delay = 10;

  bool operator==(const RunParams&) const = default;
};

/// Outcome of comparing the current top cluster against one challenger.
/// Cluster ids are positions in the consistency-ranked list.
struct CotDecision {
  int incumbent = 0;
  int challenger = 0;
  std::optional<int> case_index;
  std::vector<ReferencePrediction> predictions;
  int match_count = 0;
  int required = 0;
  bool swap = false;
  std::string note;

  bool operator==(const CotDecision&) const = default;
};

struct RunReport {
  std::string problem_id;
  RunParams params;
  std::vector<Candidate> candidates;
  std::vector<TestCase> test_cases;
  std::optional<Testbench> testbench;
  std::vector<ExecutionTrace> traces;
  std::vector<ScoredCluster> scored_clusters;  // consistency-ranked
  std::vector<int> cluster_order;              // after arbitration; ids into scored_clusters
  std::vector<CotDecision> cot_decisions;
  std::vector<int> final_ranking;              // one representative per cluster
  std::map<std::string, double> timings;
  std::optional<std::string> error;

  bool operator==(const RunReport&) const = default;
};

std::string to_string(TraceStatus status);
TraceStatus trace_status_from_string(const std::string& text);
std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& text);

}  // namespace vrank
