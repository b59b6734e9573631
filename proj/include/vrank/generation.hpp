#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vrank/gateway.hpp"
#include "vrank/model.hpp"

namespace vrank {

/// Body of the first ``` fenced block, verbatim (the info string after the
/// opening fence is dropped). nullopt when no closed fence exists.
std::optional<std::string> first_fenced_block(const std::string& text);

/// First balanced top-level {...} object in `text`, braces inside JSON strings
/// ignored. nullopt when none closes.
std::optional<std::string> first_json_object(const std::string& text);

/// Splits generated stimulus into cases. Each case begins at a line
/// `// CASE` (optionally `// CASE: description`); text before the first
/// marker is ignored. Contents of all fenced blocks are used when any exist.
std::vector<TestCase> parse_test_cases(const std::string& response);

/// Interprets a summary response as {signal: value}. Strings are kept,
/// integers become lowercase hex, booleans 1/0. nullopt when no JSON object
/// with at least one scalar field is found.
std::optional<std::map<std::string, std::string>> parse_prediction(const std::string& response);

/// n candidates, indices 0..n-1, one request each (attempt index = candidate
/// index). A response without a code fence passes through as the source.
std::vector<Candidate> generate_candidates(const Problem& problem, int n, Gateway& gateway);

/// Requests test cases, re-prompting (next attempt index) while fewer than
/// m_min parse, up to the gateway's retry budget.
/// Throws Error{insufficient_test_cases} when every attempt falls short.
std::vector<TestCase> generate_test_cases(const Problem& problem, int m_min, Gateway& gateway);

/// x independent exchanges predicting the outputs of one test case: a
/// zero-shot reasoning turn, then a summarize-as-JSON turn in the same
/// conversation. Always returns x predictions; an unparseable summary yields
/// `parsed` absent.
std::vector<ReferencePrediction> reason_reference(const Problem& problem, const Testbench& testbench,
                                                  int case_index, int x, Gateway& gateway,
                                                  const TestCase* test_case = nullptr);

}  // namespace vrank
