// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/assembler.hpp"
#include "gaslab/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gaslab
{
namespace
{
using nlohmann::json;

struct TruthInfo
{
    std::optional<Gas> truth_min;
    Gas truth_used = 0;
    std::string dataset;
    std::optional<Gas> rgum[4];  // Mean, Median, Max, Min; fixed across deltas
};

constexpr RgumVariant rgum_variants[] = {
    RgumVariant::Mean, RgumVariant::Median, RgumVariant::Max, RgumVariant::Min};

std::optional<double> safe_ape(Gas truth, std::optional<Gas> estimate)
{
    if (!estimate || truth == 0)
        return std::nullopt;
    return ape(truth, *estimate);
}
}  // namespace

ExperimentResult run_experiment(const Scenario& scenario,
    const std::vector<std::uint64_t>& deltas, ContextMode context)
{
    ExperimentResult result;

    // canonical pass: truth values, datasets, and RGUM histories in block order
    std::vector<std::size_t> order(scenario.transactions.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scenario.transactions[a].canonical_block <
               scenario.transactions[b].canonical_block;
    });

    std::map<std::string, TruthInfo> truths;
    CallHistoryRegistry registry;
    const std::uint64_t first = scenario.first_block();

    for (const std::size_t idx : order)
    {
        const ScenarioTransaction& st = scenario.transactions[idx];
        const std::uint64_t block = st.canonical_block;
        if (block <= first)
        {
            ++result.skipped_insufficient_depth;
            continue;
        }

        const WorldState truth_state = state_at(scenario, block - 1);
        const BlockContext& truth_ctx = context == ContextMode::Prev
                                            ? scenario.context_of(block - 1)
                                            : scenario.context_of(block);

        TruthInfo info;
        // truth gas used plus the D1/D2 trace, from one traced execution
        WorldState exec_fork = truth_state.fork();
        const ExecutionOutcome outcome =
            execute(exec_fork, truth_ctx, st.tx, scenario.schedule);
        info.truth_used = outcome.gas_used;
        info.dataset = classify_trace(outcome.trace).dataset_name();
        info.truth_min =
            estimate_gas(truth_state, truth_ctx, st.tx, scenario.schedule);

        const CallHistory* history = registry.find(st.tx.to, st.tx.selector());
        for (std::size_t v = 0; v < 4; ++v)
            info.rgum[v] =
                history ? rgum_estimate(*history, rgum_variants[v]) : std::nullopt;
        registry.record_gas_used(st.tx.to, st.tx.selector(), info.truth_used);

        truths.emplace(st.tx.id, std::move(info));
    }

    // delta pass
    for (const std::uint64_t delta : deltas)
    {
        for (const std::size_t idx : order)
        {
            const ScenarioTransaction& st = scenario.transactions[idx];
            const auto truth_it = truths.find(st.tx.id);
            if (truth_it == truths.end())
                continue;
            const TruthInfo& info = truth_it->second;
            const std::uint64_t block = st.canonical_block;
            if (block < first + delta)
            {
                ++result.skipped_insufficient_depth;
                continue;
            }

            const WorldState est_state = state_at(scenario, block - delta);
            const BlockContext& est_ctx = context == ContextMode::Prev
                                              ? scenario.context_of(block - delta)
                                              : scenario.context_of(block);

            std::optional<Gas> est_min;
            std::optional<Gas> est_used;
            try
            {
                est_min = estimate_gas(est_state, est_ctx, st.tx, scenario.schedule);
            }
            catch (const BoundsInfeasible&)
            {
            }
            try
            {
                const TraceCallResult tc =
                    trace_call(est_state, est_ctx, st.tx, scenario.schedule);
                est_used = tc.gas_used;
            }
            catch (const ValidityError&)
            {
            }

            auto emit = [&](const std::string& estimator, std::optional<Gas> estimate,
                            Gas truth) {
                result.records.push_back({st.tx.id, delta, estimator, estimate,
                    truth, safe_ape(truth, estimate), info.dataset});
            };

            if (info.truth_min)
            {
                emit("min/EstimateGas", est_min, *info.truth_min);
                for (std::size_t v = 0; v < 4; ++v)
                    emit("min/RGUM-" + to_string(rgum_variants[v]), info.rgum[v],
                        *info.truth_min);
            }
            emit("used/TraceCall", est_used, info.truth_used);
            for (std::size_t v = 0; v < 4; ++v)
                emit("used/RGUM-" + to_string(rgum_variants[v]), info.rgum[v],
                    info.truth_used);
        }
    }

    // deterministic order
    std::sort(result.records.begin(), result.records.end(),
        [](const EvaluationRecord& a, const EvaluationRecord& b) {
            return std::tie(a.tx_id, a.delta, a.estimator) <
                   std::tie(b.tx_id, b.delta, b.estimator);
        });
    return result;
}

std::vector<MetricRow> aggregate_metrics(const std::vector<EvaluationRecord>& records)
{
    // factor = (target metric, delta); the consistent-inclusion rule keeps
    // only transactions for which every estimator of the factor produced an
    // estimate
    auto target_of = [](const std::string& estimator) {
        return estimator.substr(0, estimator.find('/'));
    };

    std::map<std::pair<std::string, std::uint64_t>, std::set<std::string>>
        factor_estimators;
    for (const EvaluationRecord& r : records)
        factor_estimators[{target_of(r.estimator), r.delta}].insert(r.estimator);

    // (factor, tx) -> number of estimators with a valid estimate
    std::map<std::tuple<std::string, std::uint64_t, std::string>, std::size_t> valid;
    for (const EvaluationRecord& r : records)
        if (r.estimate)
            ++valid[{target_of(r.estimator), r.delta, r.tx_id}];

    auto included = [&](const EvaluationRecord& r) {
        const auto factor = std::pair{target_of(r.estimator), r.delta};
        const auto it = valid.find({factor.first, factor.second, r.tx_id});
        return it != valid.end() &&
               it->second == factor_estimators.at(factor).size();
    };

    std::map<std::tuple<std::string, std::uint64_t, std::string>,
        std::vector<const EvaluationRecord*>>
        cells;
    for (const EvaluationRecord& r : records)
        if (included(r))
            cells[{r.estimator, r.delta, r.dataset}].push_back(&r);

    std::vector<MetricRow> rows;
    for (const auto& [key, cell] : cells)
    {
        MetricRow row;
        row.estimator = std::get<0>(key);
        row.delta = std::get<1>(key);
        row.dataset = std::get<2>(key);
        row.n = cell.size();

        std::vector<double> apes;
        std::vector<double> ys;
        std::vector<double> y_hats;
        for (const EvaluationRecord* r : cell)
        {
            apes.push_back(r->ape.value_or(0.0));
            ys.push_back(static_cast<double>(r->truth));
            y_hats.push_back(static_cast<double>(*r->estimate));
        }
        const SummaryStats stats = summary(apes);
        row.median_ape = stats.median;
        row.mean_ape = stats.mean;
        row.std_ape = stats.stddev;
        try
        {
            row.r2 = r_squared(ys, y_hats);
        }
        catch (const DegenerateSample&)
        {
            row.r2 = std::nullopt;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

DivergenceReport divergence_report(const Scenario& scenario, ContextMode context)
{
    DivergenceReport report;
    std::vector<double> mins;
    std::vector<double> useds;
    const std::uint64_t first = scenario.first_block();

    for (const ScenarioTransaction& st : scenario.transactions)
    {
        if (st.canonical_block <= first)
            continue;
        const WorldState state = state_at(scenario, st.canonical_block - 1);
        const BlockContext& ctx = context == ContextMode::Prev
                                      ? scenario.context_of(st.canonical_block - 1)
                                      : scenario.context_of(st.canonical_block);

        const std::optional<Gas> g_min =
            estimate_gas(state, ctx, st.tx, scenario.schedule);
        if (!g_min)
            continue;

        WorldState fork = state.fork();
        const ExecutionOutcome at_min = execute(
            fork, ctx, st.tx.with_gas_limit(*g_min), scenario.schedule);

        DivergenceRow row;
        row.tx_id = st.tx.id;
        row.g_min = *g_min;
        row.g_used_at_g_min = at_min.gas_used;
        row.g_cost = at_min.gas_cost;
        row.ape_between = ape(at_min.gas_used, *g_min);
        row.dataset = classify_trace(at_min.trace).dataset_name();
        report.rows.push_back(row);

        mins.push_back(static_cast<double>(*g_min));
        useds.push_back(static_cast<double>(at_min.gas_used));
    }

    if (!report.rows.empty())
        report.ks = ks_two_sample(useds, mins);
    return report;
}

namespace
{
std::vector<EvaluationRecord> sorted_records(std::vector<EvaluationRecord> records)
{
    std::sort(records.begin(), records.end(),
        [](const EvaluationRecord& a, const EvaluationRecord& b) {
            return std::tie(a.tx_id, a.delta, a.estimator) <
                   std::tie(b.tx_id, b.delta, b.estimator);
        });
    return records;
}

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}
}  // namespace

std::string records_to_csv(std::vector<EvaluationRecord> records)
{
    records = sorted_records(std::move(records));
    std::string out = "tx_id,delta,estimator,estimate,truth,ape,dataset\n";
    for (const EvaluationRecord& r : records)
    {
        out += r.tx_id + "," + std::to_string(r.delta) + "," + r.estimator + ",";
        out += r.estimate ? std::to_string(*r.estimate) : std::string{};
        out += "," + std::to_string(r.truth) + ",";
        out += r.ape ? format_double(*r.ape) : std::string{};
        out += "," + r.dataset + "\n";
    }
    return out;
}

std::string records_to_json(std::vector<EvaluationRecord> records)
{
    records = sorted_records(std::move(records));
    json arr = json::array();
    for (const EvaluationRecord& r : records)
    {
        json obj;
        obj["tx_id"] = r.tx_id;
        obj["delta"] = r.delta;
        obj["estimator"] = r.estimator;
        obj["estimate"] = r.estimate ? json(*r.estimate) : json(nullptr);
        obj["truth"] = r.truth;
        obj["ape"] = r.ape ? json(*r.ape) : json(nullptr);
        obj["dataset"] = r.dataset;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

std::vector<EvaluationRecord> records_from_json(const std::string& json_text)
{
    json arr;
    try
    {
        arr = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw ParseError{std::string{"records JSON: "} + e.what()};
    }
    std::vector<EvaluationRecord> records;
    for (const json& obj : arr)
    {
        EvaluationRecord r;
        r.tx_id = obj.at("tx_id").get<std::string>();
        r.delta = obj.at("delta").get<std::uint64_t>();
        r.estimator = obj.at("estimator").get<std::string>();
        if (!obj.at("estimate").is_null())
            r.estimate = obj.at("estimate").get<Gas>();
        r.truth = obj.at("truth").get<Gas>();
        if (!obj.at("ape").is_null())
            r.ape = obj.at("ape").get<double>();
        r.dataset = obj.at("dataset").get<std::string>();
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<EvaluationRecord> records_from_csv(const std::string& csv_text)
{
    std::istringstream in{csv_text};
    std::string line;
    if (!std::getline(in, line))
        throw ParseError{"empty records CSV"};
    std::vector<EvaluationRecord> records;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls{line};
        while (std::getline(ls, field, ','))
            fields.push_back(field);
        while (fields.size() < 7)
            fields.emplace_back();  // trailing empty fields
        EvaluationRecord r;
        r.tx_id = fields[0];
        r.delta = std::stoull(fields[1]);
        r.estimator = fields[2];
        if (!fields[3].empty())
            r.estimate = std::stoull(fields[3]);
        r.truth = std::stoull(fields[4]);
        if (!fields[5].empty())
            r.ape = std::stod(fields[5]);
        r.dataset = fields[6];
        records.push_back(std::move(r));
    }
    return records;
}

void emit_report(const std::vector<EvaluationRecord>& records, ReportFormat format,
    const std::string& out_path)
{
    if (records.empty())
        throw IoError{"refusing to write an empty report"};
    const std::string payload = format == ReportFormat::Csv
                                    ? records_to_csv(records)
                                    : records_to_json(records);
    std::ofstream out{out_path, std::ios::binary};
    if (!out)
        throw IoError{"cannot open for writing: " + out_path};
    out << payload;
    if (!out)
        throw IoError{"write failed: " + out_path};
}

std::string metrics_to_csv(const std::vector<MetricRow>& rows)
{
    std::vector<const MetricRow*> ordered;
    for (const MetricRow& r : rows)
        ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(), [](const MetricRow* a, const MetricRow* b) {
        return std::tie(a->estimator, a->delta, a->dataset) <
               std::tie(b->estimator, b->delta, b->dataset);
    });
    std::string out = "estimator,delta,dataset,n,median_ape,mean_ape,std_ape,r2\n";
    for (const MetricRow* r : ordered)
    {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s,%llu,%s,%zu,%.2f,%.2f,%.2f,",
            r->estimator.c_str(), static_cast<unsigned long long>(r->delta),
            r->dataset.c_str(), r->n, r->median_ape, r->mean_ape, r->std_ape);
        out += buf;
        if (r->r2)
        {
            std::snprintf(buf, sizeof(buf), "%.4f", *r->r2);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

// -- bundled synthetic scenario ---------------------------------------------

namespace
{
std::string storage_key_hex(const Word& w)
{
    return to_hex64(w);
}
}  // namespace

std::string scenario_to_json_text(const Scenario& scenario)
{
    json doc;
    json accounts = json::object();
    for (const auto& [addr, acc] : scenario.base_accounts)
    {
        json a = json::object();
        if (acc.balance != 0)
            a["balance"] = acc.balance.str();
        if (!acc.code.empty())
            a["code"] = to_hex(acc.code);
        if (!acc.storage.empty())
        {
            json storage = json::object();
            for (const auto& [slot, value] : acc.storage)
                storage[storage_key_hex(slot)] = storage_key_hex(value);
            a["storage"] = storage;
        }
        accounts[to_string(addr)] = a;
    }
    doc["base_state"] = {{"accounts", accounts}};

    json blocks = json::array();
    for (const ScenarioBlock& b : scenario.blocks)
    {
        json obj;
        obj["number"] = b.context.number;
        obj["timestamp"] = b.context.timestamp;
        obj["coinbase"] = to_string(b.context.coinbase);
        obj["gas_limit"] = b.context.gas_limit;
        obj["base_fee"] = b.context.base_fee.str();
        obj["prevrandao"] = storage_key_hex(b.context.prevrandao);
        if (!b.context.hash_lookup.empty())
        {
            json hashes = json::object();
            for (const auto& [num, hash] : b.context.hash_lookup)
                hashes[std::to_string(num)] = storage_key_hex(hash);
            obj["hashes"] = hashes;
        }
        if (!b.diff.accounts.empty())
        {
            json diff = json::object();
            for (const auto& [addr, patch] : b.diff.accounts)
            {
                json p = json::object();
                if (patch.balance)
                    p["balance"] = patch.balance->str();
                if (patch.code)
                    p["code"] = to_hex(*patch.code);
                if (!patch.storage.empty())
                {
                    json storage = json::object();
                    for (const auto& [slot, value] : patch.storage)
                        storage[storage_key_hex(slot)] = storage_key_hex(value);
                    p["storage"] = storage;
                }
                diff[to_string(addr)] = p;
            }
            obj["diff"] = diff;
        }
        blocks.push_back(std::move(obj));
    }
    doc["blocks"] = blocks;

    json txs = json::array();
    for (const ScenarioTransaction& st : scenario.transactions)
    {
        json obj;
        obj["id"] = st.tx.id;
        obj["from"] = to_string(st.tx.from);
        obj["to"] = to_string(st.tx.to);
        obj["value"] = st.tx.value.str();
        if (!st.tx.data.empty())
            obj["data"] = to_hex(st.tx.data);
        obj["gas_limit"] = st.tx.gas_limit;
        obj["gas_price"] = st.tx.gas_price.str();
        if (!st.tx.access_list.empty())
        {
            json al = json::array();
            for (const AccessListEntry& e : st.tx.access_list)
            {
                json slots = json::array();
                for (const Word& s : e.slots)
                    slots.push_back(storage_key_hex(s));
                al.push_back(json::array({to_string(e.address), slots}));
            }
            obj["access_list"] = al;
        }
        obj["block"] = st.canonical_block;
        txs.push_back(std::move(obj));
    }
    doc["transactions"] = txs;
    return doc.dump(1) + "\n";
}

Scenario make_delta_scenario()
{
    Scenario scenario;

    const Address sender = parse_address("0x00000000000000000000000000000000000000aa");
    const Address c_pure = parse_address("0x00000000000000000000000000000000000000c1");
    const Address c_time = parse_address("0x00000000000000000000000000000000000000c2");
    const Address c_store = parse_address("0x00000000000000000000000000000000000000c3");

    constexpr std::uint64_t first_block = 1000;
    constexpr std::uint64_t block_count = 120;
    constexpr std::uint64_t base_timestamp = 1'700'000'000;
    constexpr std::uint64_t seconds_per_block = 12;
    // the timestamp gate flips between blocks 1107 and 1108, so estimates at
    // delta >= 6 for transactions shortly after the flip land on the other side
    const std::uint64_t gate_timestamp =
        base_timestamp + seconds_per_block * (1108 - first_block);

    // C1: pure arithmetic, no state reads -> D1, identical at every delta.
    const Bytes code_pure = assemble(
        "PUSH1 0x07\n"
        "PUSH1 0x05\n"
        "ADD\n"
        "PUSH1 0x00\n"
        "MSTORE\n"
        "STOP\n");

    // C2: runs a costly tail only once the block timestamp passes the gate.
    std::string time_asm =
        "TIMESTAMP\n"
        "PUSH4 " + [&] {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "0x%08llx",
                static_cast<unsigned long long>(gate_timestamp));
            return std::string{buf};
        }() + "\n"
        "LT          // gate < timestamp ?\n"
        "PUSH2 @late\n"
        "JUMPI\n"
        "STOP\n"
        "late:\n"
        "JUMPDEST\n";
    for (int i = 0; i < 200; ++i)
        time_asm += "JUMPDEST\n";
    time_asm += "STOP\n";
    const Bytes code_time = assemble(time_asm);

    // C3: accumulates the call value into slot 0, which the block diffs keep
    // rewriting, so its write cost depends on the estimation state.
    const Bytes code_store = build_deposit_like();

    scenario.base_accounts[sender].balance = Wei{"1000000000000000000"};
    scenario.base_accounts[c_pure].code = code_pure;
    scenario.base_accounts[c_time].code = code_time;
    scenario.base_accounts[c_store].code = code_store;

    for (std::uint64_t i = 0; i < block_count; ++i)
    {
        ScenarioBlock block;
        block.context.number = first_block + i;
        block.context.timestamp = base_timestamp + seconds_per_block * i;
        block.context.gas_limit = 30'000'000;
        block.context.parent_number = block.context.number - 1;
        // cycle C3's slot 0 through 0, 1, 2 so the original-value-dependent
        // SSTORE pricing differs across nearby blocks
        AccountPatch patch;
        patch.storage[Word{0}] = Word{(i % 3)};
        block.diff.accounts[c_store] = patch;
        scenario.blocks.push_back(std::move(block));
    }

    int tx_counter = 0;
    auto add_tx = [&](const Address& to, std::uint64_t block, Wei value) {
        ScenarioTransaction st;
        const char* kind = to == c_pure ? "pure" : to == c_time ? "time" : "store";
        char id[32];
        std::snprintf(id, sizeof(id), "%s-%03d", kind, tx_counter++);
        st.tx.id = id;
        st.tx.from = sender;
        st.tx.to = to;
        st.tx.value = std::move(value);
        st.tx.gas_limit = 100'000;
        st.tx.gas_price = 1;
        st.canonical_block = block;
        scenario.transactions.push_back(std::move(st));
    };

    // C1 coverage across the whole range, including full-depth blocks
    for (std::uint64_t b = first_block + 2; b <= first_block + 119; b += 7)
        add_tx(c_pure, b, 0);
    // C2 both far from and straddling the timestamp gate
    for (std::uint64_t b = first_block + 3; b <= first_block + 119; b += 6)
        add_tx(c_time, b, 0);
    for (std::uint64_t b = 1109; b <= 1114; ++b)
        add_tx(c_time, b, 0);
    // C3 deposits, touched read-set
    for (std::uint64_t b = first_block + 4; b <= first_block + 119; b += 5)
        add_tx(c_store, b, 1);

    return scenario;
}

}  // namespace gaslab
