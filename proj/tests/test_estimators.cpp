// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gaslab/assembler.hpp>
#include <gaslab/estimators.hpp>

using namespace gaslab;

namespace
{
const Address sender = parse_address("0x00000000000000000000000000000000000000aa");
const Address target = parse_address("0x00000000000000000000000000000000000000cc");

struct Fixture
{
    WorldState state;
    BlockContext block;
    GasSchedule schedule = GasSchedule::standard();

    explicit Fixture(const Bytes& code, Gas block_limit = 30'000'000)
    {
        state.set_code(target, code);
        block.number = 1;
        block.gas_limit = block_limit;
    }

    Transaction tx(Gas gas_limit = 100'000) const
    {
        Transaction t;
        t.from = sender;
        t.to = target;
        t.gas_limit = gas_limit;
        return t;
    }
};

/// Straight transcription of the published search loop, kept separate from
/// the library so the probe-order contract is checked against an independent
/// rendering.
std::optional<Gas> reference_search(Gas g0, Gas g_top,
    const std::function<int(Gas)>& z_of, std::vector<Probe>& log)
{
    Gas low = g0;
    Gas high = g_top;
    Gas g = g_top;
    std::optional<Gas> best;
    while (low <= high)
    {
        const int z = z_of(g);
        log.push_back({g, z});
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
        g = low / 2 + high / 2 + (low % 2 + high % 2) / 2;
    }
    return best;
}
}  // namespace

TEST_CASE("search probes match the reference transcription")
{
    struct Oracle
    {
        Gas g0;
        Gas g_top;
        std::function<int(Gas)> z;
    };
    std::vector<Oracle> oracles;
    const Gas g0 = 21'000;
    const Gas g_top = 30'000'000;
    // monotone thresholds, including both endpoints
    for (const Gas t : {g0, g0 + 1, Gas{21'777}, Gas{100'000}, Gas{15'000'000},
             g_top - 1, g_top})
        oracles.push_back({g0, g_top, [t](Gas g) { return g >= t ? 1 : 0; }});
    oracles.push_back({g0, g_top, [](Gas) { return 1; }});  // all pass
    oracles.push_back({g0, g_top, [](Gas) { return 0; }});  // all fail
    oracles.push_back({g0, g0, [](Gas) { return 1; }});     // single-point range
    oracles.push_back({g0, g0, [](Gas) { return 0; }});
    oracles.push_back({0, 10, [](Gas) { return 1; }});      // zero lower bound
    // non-monotone oracles: the probe order must still match
    oracles.push_back({g0, g_top, [](Gas g) { return g % 2 == 0 ? 1 : 0; }});
    oracles.push_back(
        {g0, g_top, [](Gas g) { return g > 25'000 && g < 26'000 ? 0 : 1; }});
    oracles.push_back({g0, g_top, [](Gas g) { return g == 21'036 || g >= 22'002; }});
    for (const Gas t : {Gas{21'001}, Gas{65'536}, Gas{1'000'000}})
        oracles.push_back(
            {g0, g_top, [t](Gas g) { return g >= t && g % 3 != 0 ? 1 : 0; }});
    oracles.push_back({5, 5, [](Gas) { return 1; }});
    oracles.push_back({0, 0, [](Gas) { return 0; }});

    REQUIRE(oracles.size() >= 20);
    for (const Oracle& o : oracles)
    {
        std::vector<Probe> got;
        std::vector<Probe> want;
        const auto result = binary_search_min_gas(o.g0, o.g_top, o.z, &got);
        const auto expected = reference_search(o.g0, o.g_top, o.z, want);
        CHECK(result == expected);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
        {
            CHECK(got[i].budget == want[i].budget);
            CHECK(got[i].z == want[i].z);
        }
    }
}

TEST_CASE("the first probe is the top of the range")
{
    std::vector<Probe> log;
    binary_search_min_gas(21'000, 77'777, [](Gas g) { return g >= 30'000 ? 1 : 0; },
        &log);
    REQUIRE(!log.empty());
    CHECK(log.front().budget == 77'777);
}

TEST_CASE("monotone thresholds are found exactly")
{
    for (const Gas t : {Gas{21'000}, Gas{21'001}, Gas{54'321}, Gas{99'999}})
    {
        const auto r = binary_search_min_gas(
            21'000, 100'000, [t](Gas g) { return g >= t ? 1 : 0; });
        REQUIRE(r.has_value());
        CHECK(*r == t);
    }
    CHECK(!binary_search_min_gas(21'000, 100'000, [](Gas) { return 0; }));
}

TEST_CASE("an upper bound below the intrinsic floor is infeasible")
{
    CHECK_THROWS_AS(
        binary_search_min_gas(21'000, 20'999, [](Gas) { return 1; }),
        BoundsInfeasible);
}

TEST_CASE("search bounds combine block limit and sender affordability")
{
    Fixture f{assemble("STOP\n"), 50'000};
    f.state.set_balance(sender, 90'000);
    Transaction t = f.tx();
    t.gas_price = 2;
    const SearchBounds b = SearchBounds::compute(f.state, f.block, t, f.schedule);
    CHECK(b.g0 == 21'000);
    CHECK(b.g_block == 50'000);
    CHECK(b.g_from == 45'000);  // floor(90000 / 2)
    CHECK(b.g_top == 45'000);

    t.gas_price = 0;  // no sender constraint
    const SearchBounds free = SearchBounds::compute(f.state, f.block, t, f.schedule);
    CHECK(free.g_from == 50'000);
    CHECK(free.g_top == 50'000);
}

TEST_CASE("estimate_gas equals the brute-force oracle on monotone programs")
{
    const Bytes programs[] = {
        assemble("STOP\n"),
        assemble("PUSH1 0x01\nPUSH1 0x02\nADD\nPUSH1 0x00\nMSTORE\nSTOP\n"),
        build_clear_slot(),
        build_gas_gate(100),
        build_gas_gate(5'000),
    };
    for (const Bytes& code : programs)
    {
        Fixture f{code, 60'000};
        f.state.set_storage(target, 0, 1);
        const auto est = estimate_gas(f.state, f.block, f.tx(), f.schedule);
        const auto exact =
            min_gas_limit_exact(f.state, f.block, f.tx(), f.schedule, 60'000);
        REQUIRE(est.has_value());
        REQUIRE(exact.has_value());
        CHECK(*est == *exact);
    }
}

TEST_CASE("clear-slot minimum sits a full refund above the generous gas used")
{
    Fixture f{build_clear_slot(), 100'000};
    f.state.set_storage(target, 0, 1);
    const auto g_min =
        min_gas_limit_exact(f.state, f.block, f.tx(), f.schedule, 100'000);
    REQUIRE(g_min.has_value());
    CHECK(*g_min == 26'006);  // 21000 + 6 + 2100 + 2900

    const TraceCallResult generous =
        trace_call(f.state, f.block, f.tx(100'000), f.schedule);
    CHECK(generous.z == 1);
    CHECK(*g_min == generous.gas_used + 4'800);
}

TEST_CASE("gas gate minimum tracks the constraint, not the cost")
{
    for (const Gas c : {Gas{20}, Gas{100}, Gas{1'000}, Gas{7'500}})
    {
        Fixture f{build_gas_gate(c), 60'000};
        const auto g_min =
            min_gas_limit_exact(f.state, f.block, f.tx(), f.schedule, 60'000);
        REQUIRE(g_min.has_value());
        CHECK(*g_min == 21'000 + c + 3);  // GAS reads the post-charge budget
    }
}

TEST_CASE("discontinuity programs have two committing intervals")
{
    Fixture f{build_discontinuity(34, 1'000), 22'500};
    const auto intervals = non_reverting_intervals(
        f.state, f.block, f.tx(), f.schedule, 21'000, 22'500);
    REQUIRE(intervals.size() == 2);
    CHECK(intervals[0] == GasInterval{21'036, 21'036});
    CHECK(intervals[1] == GasInterval{22'002, 22'500});

    // the binary search lands on the upper interval and misses the narrow
    // lower one; the brute-force scan finds the true minimum
    const auto est = estimate_gas(f.state, f.block, f.tx(), f.schedule);
    const auto exact =
        min_gas_limit_exact(f.state, f.block, f.tx(), f.schedule, 100'000);
    REQUIRE(est.has_value());
    REQUIRE(exact.has_value());
    CHECK(*est == 22'002);
    CHECK(*exact == 21'036);
    CHECK(*est > *exact);
}

TEST_CASE("always-reverting programs yield no estimate")
{
    Fixture f{assemble("PUSH1 0x00\nPUSH1 0x00\nREVERT\n"), 40'000};
    CHECK(!estimate_gas(f.state, f.block, f.tx(), f.schedule));
    bool truncated = true;
    CHECK(!min_gas_limit_exact(f.state, f.block, f.tx(), f.schedule, 40'000,
        &truncated));
    CHECK(!truncated);  // the scan reached the top of the range
}

TEST_CASE("the scan cap reports truncation")
{
    Fixture f{build_gas_gate(5'000), 60'000};
    bool truncated = false;
    const auto r = min_gas_limit_exact(
        f.state, f.block, f.tx(), f.schedule, 22'000, &truncated);
    CHECK(!r.has_value());
    CHECK(truncated);
}

TEST_CASE("estimate_gas treats unprocessable probes as reverting")
{
    // the sender can afford small budgets but not the top-of-range probe, so
    // the search observes z=0 there and terminates without an estimate rather
    // than propagating the validity error
    Fixture f{assemble("STOP\n")};
    Transaction t = f.tx();
    t.gas_price = 1;
    t.value = 40'000;
    f.state.set_balance(sender, 62'000);
    f.block.gas_limit = 62'000;
    CHECK(!estimate_gas(f.state, f.block, t, f.schedule));
}

TEST_CASE("budget outcome taxonomy")
{
    SearchBounds bounds;
    bounds.g0 = 21'000;
    bounds.g_block = 30'000'000;
    bounds.g_from = 1'000'000;
    bounds.g_top = 1'000'000;

    CHECK(classify_budget(20'000, bounds, std::nullopt, std::nullopt) ==
          BudgetOutcome{BudgetOutcomeKind::InvalidIntrinsic});
    CHECK(classify_budget(40'000'000, bounds, std::nullopt, std::nullopt) ==
          BudgetOutcome{BudgetOutcomeKind::ExceedsBlockLimit});
    CHECK(classify_budget(2'000'000, bounds, std::nullopt, std::nullopt) ==
          BudgetOutcome{BudgetOutcomeKind::UnaffordableSender});

    ExecutionOutcome reverted;
    reverted.z = 0;
    reverted.halt = HaltReason::Revert;
    reverted.gas_used = 21'006;
    CHECK(classify_budget(50'000, bounds, std::nullopt, reverted) ==
          BudgetOutcome{BudgetOutcomeKind::RevertedPartialConsumption});

    ExecutionOutcome exhausted;
    exhausted.z = 0;
    exhausted.halt = HaltReason::OutOfGas;
    exhausted.gas_used = 50'000;
    CHECK(classify_budget(50'000, bounds, std::nullopt, exhausted) ==
          BudgetOutcome{BudgetOutcomeKind::RevertedFullConsumption});

    ExecutionOutcome committed;
    committed.z = 1;
    committed.gas_used = 23'000;
    CHECK(classify_budget(25'000, bounds, Gas{25'000}, committed) ==
          BudgetOutcome{BudgetOutcomeKind::Committed});
    CHECK(classify_budget(26'000, bounds, Gas{25'000}, committed) ==
          BudgetOutcome{BudgetOutcomeKind::OverfundedIncentive, 1'000});

    // inconsistent inputs are rejected, not classified
    CHECK_THROWS_AS(classify_budget(50'000, bounds, std::nullopt, std::nullopt),
        InconsistentInputs);
    CHECK_THROWS_AS(classify_budget(24'000, bounds, Gas{25'000}, committed),
        InconsistentInputs);
    ExecutionOutcome bad_exceptional = exhausted;
    bad_exceptional.gas_used = 49'999;
    CHECK_THROWS_AS(classify_budget(50'000, bounds, std::nullopt, bad_exceptional),
        InconsistentInputs);
}

TEST_CASE("history statistics round half up")
{
    CallHistory h;
    CHECK(!rgum_estimate(h, RgumVariant::Mean));

    h.recent = {100, 101};
    CHECK(*rgum_estimate(h, RgumVariant::Mean) == 101);    // 100.5 rounds up
    CHECK(*rgum_estimate(h, RgumVariant::Median) == 101);
    CHECK(*rgum_estimate(h, RgumVariant::Max) == 101);
    CHECK(*rgum_estimate(h, RgumVariant::Min) == 100);

    h.recent = {1, 2, 3, 4};
    CHECK(*rgum_estimate(h, RgumVariant::Mean) == 3);      // 2.5 rounds up
    CHECK(*rgum_estimate(h, RgumVariant::Median) == 3);

    h.recent = {7, 3, 9};
    CHECK(*rgum_estimate(h, RgumVariant::Median) == 7);    // odd count is exact
    CHECK(*rgum_estimate(h, RgumVariant::Mean) == 6);      // 19/3 rounds to 6
}

TEST_CASE("variant ordering: min <= median, mean <= max")
{
    CallHistory h;
    h.recent = {22'000, 21'000, 25'000, 21'500, 30'000};
    const Gas lo = *rgum_estimate(h, RgumVariant::Min);
    const Gas hi = *rgum_estimate(h, RgumVariant::Max);
    CHECK(lo <= *rgum_estimate(h, RgumVariant::Median));
    CHECK(lo <= *rgum_estimate(h, RgumVariant::Mean));
    CHECK(*rgum_estimate(h, RgumVariant::Median) <= hi);
    CHECK(*rgum_estimate(h, RgumVariant::Mean) <= hi);
}

TEST_CASE("the registry keeps the ten most recent observations per key")
{
    CallHistoryRegistry registry;
    const std::array<std::uint8_t, 4> sel = {0xde, 0xad, 0xbe, 0xef};
    for (Gas v = 1; v <= 15; ++v)
        registry.record_gas_used(target, sel, v);

    const CallHistory* h = registry.find(target, sel);
    REQUIRE(h != nullptr);
    REQUIRE(h->recent.size() == 10);
    CHECK(h->recent.front() == 6);  // oldest five evicted
    CHECK(h->recent.back() == 15);
    CHECK(*rgum_estimate(*h, RgumVariant::Min) == 6);

    const std::array<std::uint8_t, 4> other = {0, 0, 0, 1};
    CHECK(registry.find(target, other) == nullptr);
    CHECK(registry.find(sender, sel) == nullptr);
}

TEST_CASE("the transaction selector is the first four calldata bytes")
{
    Transaction t;
    CHECK(t.selector() == std::array<std::uint8_t, 4>{0, 0, 0, 0});
    t.data = {0x01};
    CHECK(t.selector() == std::array<std::uint8_t, 4>{0x01, 0, 0, 0});
    t.data = {0xde, 0xad, 0xbe, 0xef, 0x99};
    CHECK(t.selector() == std::array<std::uint8_t, 4>{0xde, 0xad, 0xbe, 0xef});
}
