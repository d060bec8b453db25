// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/estimators.hpp"

#include <algorithm>

namespace gaslab
{
SearchBounds SearchBounds::compute(const WorldState& state, const BlockContext& block,
    const Transaction& tx, const GasSchedule& schedule)
{
    SearchBounds b;
    b.g0 = intrinsic_gas(tx, schedule);
    b.g_block = block.gas_limit != 0 ? block.gas_limit : schedule.default_block_gas_limit;
    if (tx.gas_price > 0)
    {
        const Wei affordable = state.balance(tx.from) / tx.gas_price;
        b.g_from = affordable > std::numeric_limits<Gas>::max()
                       ? std::numeric_limits<Gas>::max()
                       : static_cast<Gas>(affordable);
    }
    else
    {
        b.g_from = b.g_block;
    }
    b.g_top = std::min(b.g_block, b.g_from);
    return b;
}

std::optional<Gas> binary_search_min_gas(Gas g0, Gas g_top,
    const std::function<int(Gas)>& z_of, std::vector<Probe>* probe_log)
{
    if (g_top < g0)
        throw BoundsInfeasible{};

    Gas low = g0;
    Gas high = g_top;
    Gas g = g_top;  // the first probe is the top of the range, not a midpoint
    std::optional<Gas> best;
    while (low <= high)
    {
        const int z = z_of(g);
        if (probe_log)
            probe_log->push_back({g, z});
        if (z == 1)
        {
            best = g;
            if (g == 0)
                break;
            high = g - 1;
        }
        else
        {
            low = g + 1;
        }
        if (low > high)
            break;
        g = low / 2 + high / 2 + (low % 2 + high % 2) / 2;  // floor((L+H)/2), no overflow
    }
    return best;
}

std::optional<Gas> estimate_gas(const WorldState& state, const BlockContext& block,
    const Transaction& tx, const GasSchedule& schedule, std::vector<Probe>* probe_log)
{
    const SearchBounds bounds = SearchBounds::compute(state, block, tx, schedule);
    const auto z_of = [&](Gas budget) -> int {
        try
        {
            return trace_call(state, block, tx.with_gas_limit(budget), schedule).z;
        }
        catch (const ValidityError&)
        {
            return 0;  // unprocessable probes count as reverting
        }
    };
    return binary_search_min_gas(bounds.g0, bounds.g_top, z_of, probe_log);
}

std::optional<Gas> min_gas_limit_exact(const WorldState& state,
    const BlockContext& block, const Transaction& tx, const GasSchedule& schedule,
    Gas scan_cap, bool* scan_truncated)
{
    const SearchBounds bounds = SearchBounds::compute(state, block, tx, schedule);
    const Gas hi = std::min(bounds.g_top, scan_cap);
    if (scan_truncated)
        *scan_truncated = false;
    for (Gas g = bounds.g0; g <= hi; ++g)
    {
        try
        {
            if (trace_call(state, block, tx.with_gas_limit(g), schedule).z == 1)
                return g;
        }
        catch (const ValidityError&)
        {
        }
    }
    if (scan_truncated && hi < bounds.g_top)
        *scan_truncated = true;
    return std::nullopt;
}

std::vector<GasInterval> non_reverting_intervals(const WorldState& state,
    const BlockContext& block, const Transaction& tx, const GasSchedule& schedule,
    Gas lo, Gas hi)
{
    std::vector<GasInterval> intervals;
    std::optional<Gas> run_start;
    for (Gas g = lo; g <= hi; ++g)
    {
        int z = 0;
        try
        {
            z = trace_call(state, block, tx.with_gas_limit(g), schedule).z;
        }
        catch (const ValidityError&)
        {
        }
        if (z == 1 && !run_start)
            run_start = g;
        if (z == 0 && run_start)
        {
            intervals.push_back({*run_start, g - 1});
            run_start.reset();
        }
    }
    if (run_start)
        intervals.push_back({*run_start, hi});
    return intervals;
}

std::string to_string(BudgetOutcomeKind kind)
{
    switch (kind)
    {
    case BudgetOutcomeKind::InvalidIntrinsic:
        return "InvalidIntrinsic";
    case BudgetOutcomeKind::RevertedPartialConsumption:
        return "RevertedPartialConsumption";
    case BudgetOutcomeKind::RevertedFullConsumption:
        return "RevertedFullConsumption";
    case BudgetOutcomeKind::Committed:
        return "Committed";
    case BudgetOutcomeKind::ExceedsBlockLimit:
        return "ExceedsBlockLimit";
    case BudgetOutcomeKind::UnaffordableSender:
        return "UnaffordableSender";
    case BudgetOutcomeKind::OverfundedIncentive:
        return "OverfundedIncentive";
    }
    return "?";
}

BudgetOutcome classify_budget(Gas tx_gas_limit, const SearchBounds& bounds,
    std::optional<Gas> g_min, const std::optional<ExecutionOutcome>& outcome)
{
    if (tx_gas_limit < bounds.g0)
        return {BudgetOutcomeKind::InvalidIntrinsic};
    if (tx_gas_limit > bounds.g_block)
        return {BudgetOutcomeKind::ExceedsBlockLimit};
    if (tx_gas_limit > bounds.g_from)
        return {BudgetOutcomeKind::UnaffordableSender};

    if (!outcome)
        throw InconsistentInputs{"budget is executable but no outcome supplied"};
    if (outcome->z == 0)
    {
        if (outcome->halt == HaltReason::Revert)
        {
            if (outcome->gas_used >= tx_gas_limit)
                throw InconsistentInputs{"REVERT outcome consumed the full budget"};
            return {BudgetOutcomeKind::RevertedPartialConsumption};
        }
        if (outcome->gas_used != tx_gas_limit)
            throw InconsistentInputs{"exceptional halt must consume the budget"};
        return {BudgetOutcomeKind::RevertedFullConsumption};
    }

    if (!g_min || tx_gas_limit < *g_min)
        throw InconsistentInputs{"committed below the reported minimum gas limit"};
    if (tx_gas_limit == *g_min)
        return {BudgetOutcomeKind::Committed};
    return {BudgetOutcomeKind::OverfundedIncentive, tx_gas_limit - *g_min};
}

std::string to_string(RgumVariant variant)
{
    switch (variant)
    {
    case RgumVariant::Mean:
        return "mean";
    case RgumVariant::Median:
        return "median";
    case RgumVariant::Max:
        return "max";
    case RgumVariant::Min:
        return "min";
    }
    return "?";
}

namespace
{
/// Round-half-up integer mean of two values.
Gas mean2_half_up(Gas a, Gas b)
{
    // a + b cannot overflow in practice (gas-used values), but keep it safe
    const auto sum = static_cast<unsigned __int128>(a) + b;
    return static_cast<Gas>((sum + 1) / 2);
}
}  // namespace

std::optional<Gas> rgum_estimate(const CallHistory& history, RgumVariant variant)
{
    const auto& values = history.recent;
    if (values.empty())
        return std::nullopt;

    switch (variant)
    {
    case RgumVariant::Mean:
    {
        unsigned __int128 sum = 0;
        for (const Gas v : values)
            sum += v;
        const auto n = static_cast<unsigned __int128>(values.size());
        Gas q = static_cast<Gas>(sum / n);
        if ((sum % n) * 2 >= n)
            ++q;
        return q;
    }
    case RgumVariant::Median:
    {
        std::vector<Gas> sorted(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        const std::size_t mid = sorted.size() / 2;
        if (sorted.size() % 2 == 1)
            return sorted[mid];
        return mean2_half_up(sorted[mid - 1], sorted[mid]);
    }
    case RgumVariant::Max:
        return *std::max_element(values.begin(), values.end());
    case RgumVariant::Min:
        return *std::min_element(values.begin(), values.end());
    }
    return std::nullopt;
}

void CallHistoryRegistry::record_gas_used(const Address& contract,
    const std::array<std::uint8_t, 4>& selector, Gas gas_used)
{
    CallHistory& history = histories_[{contract, selector}];
    history.recent.push_back(gas_used);
    while (history.recent.size() > CallHistory::capacity)
        history.recent.pop_front();
}

const CallHistory* CallHistoryRegistry::find(const Address& contract,
    const std::array<std::uint8_t, 4>& selector) const
{
    const auto it = histories_.find({contract, selector});
    return it == histories_.end() ? nullptr : &it->second;
}

}  // namespace gaslab
