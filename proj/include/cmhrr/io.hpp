#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cmhrr/simulate.hpp"
#include "cmhrr/stratify.hpp"
#include "cmhrr/types.hpp"

namespace cmhrr {

enum class ReportFormat { text, delimited };

ReportFormat report_format_from_string(const std::string& s);

// Delimited ingestion. Headers must match the documented schemas exactly;
// any malformed row aborts with its line number (no silent dropping).
std::vector<HistoricalRecord> ingest_historical(std::istream& in);
std::vector<HistoricalRecord> ingest_historical_file(const std::string& path);
std::vector<TrialRecord> ingest_trial(std::istream& in);
std::vector<TrialRecord> ingest_trial_file(const std::string& path);

std::string write_historical_csv(const std::vector<HistoricalRecord>& records);
std::string write_trial_csv(const std::vector<TrialRecord>& records);

// Strata spec and historical summary files (JSON).
std::string write_strata_spec(const StrataSpec& spec);
StrataSpec read_strata_spec(const std::string& text);
StrataSpec read_strata_spec_file(const std::string& path);

std::string write_summary(const HistoricalSummary& summary);
HistoricalSummary read_summary(const std::string& text);
HistoricalSummary read_summary_file(const std::string& path);

// Scenario files: a single scenario object or {"scenarios": [...]}.
std::vector<ScenarioConfig> read_scenarios(const std::string& text);
std::vector<ScenarioConfig> read_scenarios_file(const std::string& path);
std::string write_scenarios(const std::vector<ScenarioConfig>& scenarios);

// Paired stratified/unadjusted analysis of one trial.
struct AnalysisReport {
    AnalysisResult stratified;
    int strata_count = 0;
    bool has_unadjusted = false;
    AnalysisResult unadjusted;
    double observed_reduction = 0.0;  // 1 - se_strat^2 / se_unadj^2
};

std::string emit_report(const AnalysisReport& report, ReportFormat format);

// One row per (scenario, psi, method), fixed column order.
std::string scenario_table_header();
std::string emit_scenario_table(const std::vector<ScenarioResult>& results);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace cmhrr
