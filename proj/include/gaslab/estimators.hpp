// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gaslab/interpreter.hpp"

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace gaslab
{
/// Binary-search range: [g0, g_top] with g_top = min(g_block, g_from).
struct SearchBounds
{
    Gas g0 = 0;
    Gas g_top = 0;
    Gas g_block = 0;
    Gas g_from = 0;

    /// g_from is floor(balance / gas_price); gas_price == 0 means the sender
    /// budget is unconstrained.
    static SearchBounds compute(const WorldState& state, const BlockContext& block,
        const Transaction& tx, const GasSchedule& schedule);
};

struct BoundsInfeasible : std::runtime_error
{
    BoundsInfeasible() : std::runtime_error("search upper bound below intrinsic gas")
    {}
};

/// One binary-search probe: the budget tried and the status code observed.
struct Probe
{
    Gas budget;
    int z;
};

/// The binary-search loop exactly as specified, over an abstract z-oracle.
/// First probe is g_top itself; L/H updates and the floor-midpoint follow the
/// published procedure. Probe order is part of the contract.
std::optional<Gas> binary_search_min_gas(Gas g0, Gas g_top,
    const std::function<int(Gas)>& z_of, std::vector<Probe>* probe_log = nullptr);

/// EstimateGas: binary search driven by trace_call on fresh forks. The base
/// state is never modified. Probes that fail validity count as z=0.
std::optional<Gas> estimate_gas(const WorldState& state, const BlockContext& block,
    const Transaction& tx, const GasSchedule& schedule,
    std::vector<Probe>* probe_log = nullptr);

/// Brute-force oracle: linear scan g0, g0+1, ... up to min(g_top, scan_cap);
/// first committing budget wins. Returns nullopt when none commits; sets
/// *scan_truncated when the cap cut the scan short of g_top.
std::optional<Gas> min_gas_limit_exact(const WorldState& state,
    const BlockContext& block, const Transaction& tx, const GasSchedule& schedule,
    Gas scan_cap, bool* scan_truncated = nullptr);

/// Maximal contiguous runs of committing budgets within [lo, hi], ascending.
struct GasInterval
{
    Gas lo;
    Gas hi;
    friend bool operator==(const GasInterval&, const GasInterval&) = default;
};
std::vector<GasInterval> non_reverting_intervals(const WorldState& state,
    const BlockContext& block, const Transaction& tx, const GasSchedule& schedule,
    Gas lo, Gas hi);

// -- budget outcome taxonomy ----------------------------------------------

enum class BudgetOutcomeKind
{
    InvalidIntrinsic,
    RevertedPartialConsumption,
    RevertedFullConsumption,
    Committed,
    ExceedsBlockLimit,
    UnaffordableSender,
    OverfundedIncentive,
};

struct BudgetOutcome
{
    BudgetOutcomeKind kind;
    Gas incentive = 0;  ///< T_g - g_min, for OverfundedIncentive only
    friend bool operator==(const BudgetOutcome&, const BudgetOutcome&) = default;
};

std::string to_string(BudgetOutcomeKind kind);

struct InconsistentInputs : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Classifies a chosen budget T_g for an instance whose minimum gas limit is
/// `g_min` (if one exists) and whose execution at T_g produced `outcome`
/// (nullopt when the transaction was not processable at T_g).
BudgetOutcome classify_budget(Gas tx_gas_limit, const SearchBounds& bounds,
    std::optional<Gas> g_min, const std::optional<ExecutionOutcome>& outcome);

// -- RGUM baselines --------------------------------------------------------

enum class RgumVariant
{
    Mean,
    Median,
    Max,
    Min,
};

std::string to_string(RgumVariant variant);

/// Gas-used history of one (contract, selector) pair; holds at most the 10
/// most recent observations, oldest first.
struct CallHistory
{
    std::deque<Gas> recent;
    static constexpr std::size_t capacity = 10;
};

/// The chosen statistic over the history. Mean and the even-count median are
/// rounded half-up to integral gas. Empty history yields nullopt.
std::optional<Gas> rgum_estimate(const CallHistory& history, RgumVariant variant);

/// Per-(contract, selector) history registry.
class CallHistoryRegistry
{
public:
    using Key = std::pair<Address, std::array<std::uint8_t, 4>>;

    void record_gas_used(const Address& contract,
        const std::array<std::uint8_t, 4>& selector, Gas gas_used);
    const CallHistory* find(const Address& contract,
        const std::array<std::uint8_t, 4>& selector) const;

private:
    std::map<Key, CallHistory> histories_;
};

}  // namespace gaslab
