// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gaslab/analysis.hpp"
#include "gaslab/estimators.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gaslab
{
struct ParseError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};
struct UnknownBlock : std::runtime_error
{
    explicit UnknownBlock(std::uint64_t number)
      : std::runtime_error("no block numbered " + std::to_string(number))
    {}
};

/// Partial account update applied after a block's transactions. Storage
/// writes of zero delete the slot.
struct AccountPatch
{
    std::optional<Wei> balance;
    std::optional<Bytes> code;
    std::map<Word, Word> storage;
};

struct StateDiff
{
    std::map<Address, AccountPatch> accounts;
};

struct ScenarioBlock
{
    BlockContext context;
    StateDiff diff;
};

struct ScenarioTransaction
{
    Transaction tx;                 // tx.id carries the scenario identifier
    std::uint64_t canonical_block;  // the block this transaction belongs to
};

/// A replayable synthetic chain fragment: base accounts, a block sequence
/// with per-block state diffs, and the transactions under study.
struct Scenario
{
    GasSchedule schedule = GasSchedule::standard();
    std::map<Address, AccountState> base_accounts;
    std::vector<ScenarioBlock> blocks;
    std::vector<ScenarioTransaction> transactions;

    std::uint64_t first_block() const { return blocks.front().context.number; }
    std::uint64_t last_block() const { return blocks.back().context.number; }
    const BlockContext& context_of(std::uint64_t number) const;
};

Scenario load_scenario(const std::string& path, bool lenient = false);
Scenario parse_scenario_json(const std::string& json_text, bool lenient = false);

/// Merges a partial schedule-override JSON document over `base`.
GasSchedule merge_schedule_overrides(const GasSchedule& base, const std::string& json_text);

/// World state after applying every diff up to and including `block_number`.
WorldState state_at(const Scenario& scenario, std::uint64_t block_number);

// -- the delta-offset evaluation protocol -----------------------------------

/// Which block context an estimation-time execution runs under: the context
/// of the (earlier) estimation block, or the transaction's own block.
enum class ContextMode
{
    Prev,
    Own,
};

struct EvaluationRecord
{
    std::string tx_id;
    std::uint64_t delta = 0;
    std::string estimator;  ///< "min/..." or "used/..." per target metric
    std::optional<Gas> estimate;
    Gas truth = 0;
    std::optional<double> ape;
    std::string dataset;  ///< "D1" or "D2"
};

struct ExperimentResult
{
    std::vector<EvaluationRecord> records;
    std::size_t skipped_insufficient_depth = 0;  ///< txs lacking delta room
};

ExperimentResult run_experiment(const Scenario& scenario,
    const std::vector<std::uint64_t>& deltas, ContextMode context = ContextMode::Prev);

/// One aggregated table row, after the consistent-inclusion rule: only
/// transactions for which every estimator of the same (target, delta) factor
/// produced an estimate are counted.
struct MetricRow
{
    std::string estimator;
    std::uint64_t delta = 0;
    std::string dataset;
    std::size_t n = 0;
    double median_ape = 0;
    double mean_ape = 0;
    double std_ape = 0;
    std::optional<double> r2;  ///< absent when the truth sample is degenerate
};

std::vector<MetricRow> aggregate_metrics(const std::vector<EvaluationRecord>& records);

// -- divergence between minimum gas limit and gas used ----------------------

struct DivergenceRow
{
    std::string tx_id;
    Gas g_min = 0;
    Gas g_used_at_g_min = 0;
    Gas g_cost = 0;
    double ape_between = 0;  ///< APE with y = gas used, y_hat = minimum gas limit
    std::string dataset;
};

struct DivergenceReport
{
    std::vector<DivergenceRow> rows;
    std::optional<KsResult> ks;  ///< min-gas vs gas-used distributions
};

DivergenceReport divergence_report(const Scenario& scenario,
    ContextMode context = ContextMode::Prev);

// -- report emission ---------------------------------------------------------

enum class ReportFormat
{
    Csv,
    Json,
};

struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Writes evaluation records in deterministic (tx_id, delta, estimator)
/// order. Empty record sets are an error; no file is written.
void emit_report(const std::vector<EvaluationRecord>& records, ReportFormat format,
    const std::string& out_path);

std::string records_to_csv(std::vector<EvaluationRecord> records);
std::string records_to_json(std::vector<EvaluationRecord> records);
std::vector<EvaluationRecord> records_from_json(const std::string& json_text);
std::vector<EvaluationRecord> records_from_csv(const std::string& csv_text);

std::string metrics_to_csv(const std::vector<MetricRow>& rows);

/// Serializes a scenario back to its JSON file format (used by the
/// scenario generator subcommand). Schedule overrides are not re-emitted;
/// generated scenarios use the standard schedule.
std::string scenario_to_json_text(const Scenario& scenario);

/// The bundled 3-contract, 120-block synthetic scenario exercising the
/// delta protocol (one state-independent contract, one timestamp-gated one,
/// one whose read slot the block diffs keep changing).
Scenario make_delta_scenario();

}  // namespace gaslab
