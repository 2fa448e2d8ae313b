#pragma once

// File formats: dataset ingestion and persistence (CSV and JSON-lines),
// factor-model JSON, and ground-truth sidecars.
//
// CSV layout: `study_id,rob_<domain>,...,rob_<domain>,association`. Risk
// values accept 0/1 and the aliases low/high; associations accept 0/1/2 and
// negative/none/positive. JSONL carries one object per line with keys
// study_id, rob (object of domain -> value), association.

#include <string>
#include <vector>

#include <json.hpp>

#include "mcma/core.hpp"
#include "mcma/factor.hpp"
#include "mcma/synthgen.hpp"

namespace mcma::io {

enum class Format { Csv, Jsonl };

// Detects by extension (.csv / .jsonl); throws DomainError otherwise.
Format format_from_path(const std::string& path);

// The six Cochrane risk-of-bias domains used when a fixture does not say
// otherwise.
const std::vector<std::string>& cochrane_domains();

// Reads and validates a dataset. Domain names and order come from the file
// header (CSV) or the first record (JSONL); when expected_domains is
// non-empty the file must provide exactly those domains in that order.
// Throws ParseError (malformed input, with line numbers) or DomainError
// (invalid values, with field names).
Dataset ingest(const std::string& path, Format format,
               const std::vector<std::string>& expected_domains = {});

void write_dataset(const Dataset& dataset, const std::string& path, Format format);

nlohmann::json ground_truth_to_json(const synthgen::GroundTruth& truth,
                                    const SyntheticParams& params);

nlohmann::json factor_model_to_json(const factor::FactorModel& model);
factor::FactorModel factor_model_from_json(const nlohmann::json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace mcma::io
