// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gaslab/analysis.hpp>
#include <gaslab/assembler.hpp>
#include <gaslab/estimators.hpp>
#include <gaslab/scenario.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace gaslab;
using nlohmann::json;

namespace
{
std::string slurp(const std::string& path)
{
    if (path == "-")
    {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in{path};
    if (!in)
        throw IoError{"cannot open: " + path};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void spill(const std::string& path, const std::string& payload)
{
    if (path.empty() || path == "-")
    {
        std::cout << payload;
        return;
    }
    std::ofstream out{path, std::ios::binary};
    if (!out)
        throw IoError{"cannot open for writing: " + path};
    out << payload;
}

/// Everything needed to execute one scenario transaction at some depth.
struct ResolvedCall
{
    Scenario scenario;
    WorldState state;
    BlockContext context;
    Transaction tx;
};

struct CallOptions
{
    std::string scenario_path;
    std::string tx_id;
    std::uint64_t at_block = 0;  // 0: one block before the transaction's own
    bool own_context = false;
    bool lenient = false;
    std::string schedule_path;
};

void add_call_options(CLI::App* cmd, CallOptions& opts)
{
    cmd->add_option("--scenario", opts.scenario_path, "scenario JSON file")
        ->required();
    cmd->add_option("--tx", opts.tx_id, "transaction id within the scenario")
        ->required();
    cmd->add_option("--at-block", opts.at_block,
        "estimation block (default: the block before the transaction's)");
    cmd->add_flag("--own-context", opts.own_context,
        "execute under the transaction's own block context instead of the "
        "estimation block's");
    cmd->add_flag("--lenient", opts.lenient, "warn on unknown scenario fields");
    cmd->add_option("--schedule", opts.schedule_path,
        "JSON file with gas schedule overrides");
}

ResolvedCall resolve(const CallOptions& opts)
{
    ResolvedCall call;
    call.scenario = load_scenario(opts.scenario_path, opts.lenient);
    if (!opts.schedule_path.empty())
        call.scenario.schedule = merge_schedule_overrides(
            call.scenario.schedule, slurp(opts.schedule_path));

    const ScenarioTransaction* found = nullptr;
    for (const ScenarioTransaction& st : call.scenario.transactions)
        if (st.tx.id == opts.tx_id)
            found = &st;
    if (!found)
        throw ValidationError{"no transaction with id '" + opts.tx_id + "'"};
    call.tx = found->tx;

    std::uint64_t at = opts.at_block;
    if (at == 0)
    {
        if (found->canonical_block <= call.scenario.first_block())
            throw ValidationError{
                "transaction sits in the first block; pass --at-block"};
        at = found->canonical_block - 1;
    }
    call.state = state_at(call.scenario, at);
    call.context = call.scenario.context_of(
        opts.own_context ? found->canonical_block : at);
    return call;
}

json outcome_summary(const ExecutionOutcome& out)
{
    json summary;
    summary["z"] = out.z;
    summary["gas_used"] = out.gas_used;
    summary["gas_cost"] = out.gas_cost;
    summary["refund"] = out.refund_applied;
    summary["halt"] = to_string(out.halt);
    return summary;
}

int run_command(const CallOptions& opts, bool with_trace)
{
    ResolvedCall call = resolve(opts);
    const ExecutionOutcome out = execute(
        call.state, call.context, call.tx, call.scenario.schedule, with_trace);
    if (with_trace)
        for (const StepRecord& step : out.trace)
        {
            json line;
            line["pc"] = step.pc;
            line["op"] = step.mnemonic();
            line["gas_before"] = step.gas_before;
            line["gas_charged"] = step.gas_charged;
            std::cout << line.dump() << "\n";
        }
    std::cout << outcome_summary(out).dump() << "\n";
    return 0;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gaslab: a desk-scale EVM gas laboratory"};
    app.require_subcommand(1);

    // assemble / disassemble ------------------------------------------------
    std::string asm_in = "-";
    std::string asm_out;
    auto* cmd_asm = app.add_subcommand("assemble", "assemble mnemonics to hex");
    cmd_asm->add_option("--in", asm_in, "input file ('-' for stdin)");
    cmd_asm->add_option("--out", asm_out, "output file (default stdout)");

    std::string dis_in = "-";
    std::string dis_out;
    auto* cmd_dis =
        app.add_subcommand("disassemble", "disassemble 0x-prefixed hex");
    cmd_dis->add_option("--in", dis_in, "input file ('-' for stdin)");
    cmd_dis->add_option("--out", dis_out, "output file (default stdout)");

    // execution -------------------------------------------------------------
    CallOptions run_opts;
    auto* cmd_run =
        app.add_subcommand("run", "execute one transaction, print the outcome");
    add_call_options(cmd_run, run_opts);

    CallOptions trace_opts;
    auto* cmd_trace = app.add_subcommand(
        "trace", "execute one transaction, print JSON Lines per step");
    add_call_options(cmd_trace, trace_opts);

    CallOptions estimate_opts;
    auto* cmd_estimate = app.add_subcommand(
        "estimate", "binary-search the smallest committing gas limit");
    add_call_options(cmd_estimate, estimate_opts);

    CallOptions oracle_opts;
    Gas scan_cap = 100'000;
    auto* cmd_oracle = app.add_subcommand(
        "oracle", "brute-force the exact minimum gas limit");
    add_call_options(cmd_oracle, oracle_opts);
    cmd_oracle->add_option("--scan-cap", scan_cap, "linear scan budget cap");

    CallOptions intervals_opts;
    Gas intervals_lo = 21'000;
    Gas intervals_hi = 100'000;
    auto* cmd_intervals = app.add_subcommand(
        "intervals", "enumerate committing budget intervals");
    add_call_options(cmd_intervals, intervals_opts);
    cmd_intervals->add_option("--lo", intervals_lo, "lowest budget to probe");
    cmd_intervals->add_option("--hi", intervals_hi, "highest budget to probe");

    CallOptions classify_opts;
    auto* cmd_classify = app.add_subcommand(
        "classify", "classify the transaction's declared gas limit");
    add_call_options(cmd_classify, classify_opts);

    // evaluation ------------------------------------------------------------
    std::string eval_scenario;
    std::vector<std::uint64_t> eval_deltas = {1, 2, 4, 6};
    std::string eval_out;
    std::string eval_metrics;
    std::string eval_format = "csv";
    bool eval_own_context = false;
    bool eval_lenient = false;
    auto* cmd_eval = app.add_subcommand(
        "evaluate", "run the delta-offset protocol over a scenario");
    cmd_eval->add_option("--scenario", eval_scenario, "scenario JSON file")
        ->required();
    cmd_eval->add_option("--deltas", eval_deltas, "block depths to evaluate");
    cmd_eval->add_option("--out", eval_out, "record output file")->required();
    cmd_eval->add_option("--metrics", eval_metrics,
        "also write aggregated metrics CSV here");
    cmd_eval->add_option("--format", eval_format, "record format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd_eval->add_flag("--own-context", eval_own_context,
        "estimate under each transaction's own block context");
    cmd_eval->add_flag("--lenient", eval_lenient, "warn on unknown fields");

    std::string div_scenario;
    bool div_own_context = false;
    bool div_lenient = false;
    auto* cmd_div = app.add_subcommand(
        "divergence", "compare minimum gas limits against gas used");
    cmd_div->add_option("--scenario", div_scenario, "scenario JSON file")
        ->required();
    cmd_div->add_flag("--own-context", div_own_context,
        "estimate under each transaction's own block context");
    cmd_div->add_flag("--lenient", div_lenient, "warn on unknown fields");

    std::string conv_in;
    std::string conv_out;
    std::string conv_to = "json";
    auto* cmd_conv = app.add_subcommand(
        "report-convert", "convert evaluation records between CSV and JSON");
    cmd_conv->add_option("--in", conv_in, "input records file")->required();
    cmd_conv->add_option("--out", conv_out, "output file (default stdout)");
    cmd_conv->add_option("--to", conv_to, "target format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    std::string gen_out = "scenarios/delta_protocol.json";
    auto* cmd_gen = app.add_subcommand(
        "gen-scenario", "write the bundled 120-block synthetic scenario");
    cmd_gen->add_option("--out", gen_out, "output path");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*cmd_asm)
        {
            spill(asm_out, to_hex(assemble(slurp(asm_in))) + "\n");
        }
        else if (*cmd_dis)
        {
            std::string text = slurp(dis_in);
            while (!text.empty() && (text.back() == '\n' || text.back() == ' '))
                text.pop_back();
            spill(dis_out, disassemble(parse_hex(text)) + "\n");
        }
        else if (*cmd_run)
        {
            return run_command(run_opts, /*with_trace=*/false);
        }
        else if (*cmd_trace)
        {
            return run_command(trace_opts, /*with_trace=*/true);
        }
        else if (*cmd_estimate)
        {
            ResolvedCall call = resolve(estimate_opts);
            json out;
            try
            {
                const auto estimate = estimate_gas(
                    call.state, call.context, call.tx, call.scenario.schedule);
                out["estimate"] = estimate ? json(*estimate) : json(nullptr);
            }
            catch (const BoundsInfeasible&)
            {
                out["estimate"] = nullptr;
            }
            std::cout << out.dump() << "\n";
        }
        else if (*cmd_oracle)
        {
            ResolvedCall call = resolve(oracle_opts);
            bool truncated = false;
            const auto g_min = min_gas_limit_exact(call.state, call.context,
                call.tx, call.scenario.schedule, scan_cap, &truncated);
            json out;
            out["min_gas_limit"] = g_min ? json(*g_min) : json(nullptr);
            out["truncated"] = truncated;
            std::cout << out.dump() << "\n";
        }
        else if (*cmd_intervals)
        {
            ResolvedCall call = resolve(intervals_opts);
            const auto intervals = non_reverting_intervals(call.state,
                call.context, call.tx, call.scenario.schedule, intervals_lo,
                intervals_hi);
            json arr = json::array();
            for (const GasInterval& iv : intervals)
                arr.push_back({{"lo", iv.lo}, {"hi", iv.hi}});
            std::cout << arr.dump() << "\n";
        }
        else if (*cmd_classify)
        {
            ResolvedCall call = resolve(classify_opts);
            const SearchBounds bounds = SearchBounds::compute(
                call.state, call.context, call.tx, call.scenario.schedule);
            std::optional<Gas> g_min;
            try
            {
                g_min = estimate_gas(
                    call.state, call.context, call.tx, call.scenario.schedule);
            }
            catch (const BoundsInfeasible&)
            {
            }
            std::optional<ExecutionOutcome> outcome;
            try
            {
                WorldState fork = call.state.fork();
                outcome = execute(
                    fork, call.context, call.tx, call.scenario.schedule);
            }
            catch (const ValidityError&)
            {
            }
            const BudgetOutcome budget =
                classify_budget(call.tx.gas_limit, bounds, g_min, outcome);
            json out;
            out["kind"] = to_string(budget.kind);
            if (budget.kind == BudgetOutcomeKind::OverfundedIncentive)
                out["incentive"] = budget.incentive;
            std::cout << out.dump() << "\n";
        }
        else if (*cmd_eval)
        {
            const Scenario scenario = load_scenario(eval_scenario, eval_lenient);
            const ExperimentResult result = run_experiment(scenario, eval_deltas,
                eval_own_context ? ContextMode::Own : ContextMode::Prev);
            emit_report(result.records,
                eval_format == "csv" ? ReportFormat::Csv : ReportFormat::Json,
                eval_out);
            if (!eval_metrics.empty())
                spill(eval_metrics, metrics_to_csv(aggregate_metrics(result.records)));
            std::cerr << result.records.size() << " records, "
                      << result.skipped_insufficient_depth
                      << " skipped for insufficient depth\n";
        }
        else if (*cmd_div)
        {
            const Scenario scenario = load_scenario(div_scenario, div_lenient);
            const DivergenceReport report = divergence_report(scenario,
                div_own_context ? ContextMode::Own : ContextMode::Prev);
            json out;
            json rows = json::array();
            for (const DivergenceRow& row : report.rows)
                rows.push_back({{"tx_id", row.tx_id}, {"g_min", row.g_min},
                    {"g_used_at_g_min", row.g_used_at_g_min},
                    {"g_cost", row.g_cost}, {"ape", row.ape_between},
                    {"dataset", row.dataset}});
            out["rows"] = rows;
            if (report.ks)
                out["ks"] = {{"d", report.ks->d}, {"p", report.ks->p}};
            std::cout << out.dump(2) << "\n";
        }
        else if (*cmd_conv)
        {
            const std::string text = slurp(conv_in);
            const auto records = text.find_first_not_of(" \t\r\n") !=
                                         std::string::npos &&
                                     text[text.find_first_not_of(" \t\r\n")] == '['
                                 ? records_from_json(text)
                                 : records_from_csv(text);
            spill(conv_out, conv_to == "csv" ? records_to_csv(records)
                                             : records_to_json(records));
        }
        else if (*cmd_gen)
        {
            spill(gen_out, scenario_to_json_text(make_delta_scenario()));
        }
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
