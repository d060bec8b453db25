// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/scenario.hpp"

#include "gaslab/opcodes.hpp"

#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace gaslab
{
namespace
{
using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
    const std::string& where, bool lenient)
{
    for (const auto& [key, value] : obj.items())
    {
        bool known = false;
        for (const char* a : allowed)
            if (key == a)
            {
                known = true;
                break;
            }
        if (!known)
        {
            const std::string message = "unknown field '" + key + "' in " + where;
            if (lenient)
                std::cerr << "warning: " << message << "\n";
            else
                throw ParseError{message};
        }
    }
}

const json& require(const json& obj, const char* key, const std::string& where)
{
    const auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError{"missing field '" + std::string{key} + "' in " + where};
    return *it;
}

Wei parse_wei(const json& j, const std::string& where)
{
    if (!j.is_string())
        throw ParseError{where + " must be a decimal string"};
    try
    {
        return Wei{j.get<std::string>()};
    }
    catch (const std::exception&)
    {
        throw ParseError{"invalid decimal value in " + where};
    }
}

std::map<Word, Word> parse_storage(const json& j, [[maybe_unused]] const std::string& where)
{
    std::map<Word, Word> storage;
    for (const auto& [slot, value] : j.items())
        storage[parse_word_hex(slot)] = parse_word_hex(value.get<std::string>());
    return storage;
}

AccountState parse_account(const json& j, const std::string& where, bool lenient)
{
    check_keys(j, {"balance", "code", "storage"}, where, lenient);
    AccountState acc;
    if (j.contains("balance"))
        acc.balance = parse_wei(j["balance"], where + ".balance");
    if (j.contains("code"))
        acc.code = parse_hex(j["code"].get<std::string>());
    if (j.contains("storage"))
        for (auto& [slot, value] : parse_storage(j["storage"], where))
            if (value != 0)  // zero entries are simply absent
                acc.storage.emplace(slot, value);
    return acc;
}

AccountPatch parse_account_patch(const json& j, const std::string& where, bool lenient)
{
    check_keys(j, {"balance", "code", "storage"}, where, lenient);
    AccountPatch patch;
    if (j.contains("balance"))
        patch.balance = parse_wei(j["balance"], where + ".balance");
    if (j.contains("code"))
        patch.code = parse_hex(j["code"].get<std::string>());
    if (j.contains("storage"))
        patch.storage = parse_storage(j["storage"], where);
    return patch;
}

ScenarioBlock parse_block(const json& j, bool lenient)
{
    const std::string where = "block";
    check_keys(j,
        {"number", "timestamp", "coinbase", "gas_limit", "base_fee", "prevrandao",
            "diff", "hashes"},
        where, lenient);
    ScenarioBlock block;
    block.context.number = require(j, "number", where).get<std::uint64_t>();
    block.context.timestamp = require(j, "timestamp", where).get<std::uint64_t>();
    if (j.contains("coinbase"))
        block.context.coinbase = parse_address(j["coinbase"].get<std::string>());
    if (j.contains("gas_limit"))
        block.context.gas_limit = j["gas_limit"].get<Gas>();
    if (j.contains("base_fee"))
        block.context.base_fee = parse_wei(j["base_fee"], where + ".base_fee");
    if (j.contains("prevrandao"))
        block.context.prevrandao = parse_word_hex(j["prevrandao"].get<std::string>());
    if (j.contains("hashes"))
        for (const auto& [num, hash] : j["hashes"].items())
            block.context.hash_lookup[std::stoull(num)] =
                parse_word_hex(hash.get<std::string>());
    block.context.parent_number =
        block.context.number > 0 ? block.context.number - 1 : 0;
    if (j.contains("diff"))
        for (const auto& [addr, patch] : j["diff"].items())
            block.diff.accounts[parse_address(addr)] =
                parse_account_patch(patch, where + ".diff", lenient);
    return block;
}

ScenarioTransaction parse_transaction(const json& j, bool lenient)
{
    const std::string where = "transaction";
    check_keys(j,
        {"id", "from", "to", "value", "data", "gas_limit", "gas_price",
            "access_list", "block", "is_create"},
        where, lenient);
    ScenarioTransaction st;
    st.tx.id = require(j, "id", where).get<std::string>();
    st.tx.from = parse_address(require(j, "from", where).get<std::string>());
    st.tx.to = parse_address(require(j, "to", where).get<std::string>());
    if (j.contains("value"))
        st.tx.value = parse_wei(j["value"], where + ".value");
    if (j.contains("data"))
        st.tx.data = parse_hex(j["data"].get<std::string>());
    st.tx.gas_limit = require(j, "gas_limit", where).get<Gas>();
    if (j.contains("gas_price"))
        st.tx.gas_price = parse_wei(j["gas_price"], where + ".gas_price");
    if (j.contains("is_create"))
        st.tx.is_create = j["is_create"].get<bool>();
    if (j.contains("access_list"))
        for (const json& entry : j["access_list"])
        {
            if (!entry.is_array() || entry.size() != 2)
                throw ParseError{"access_list entries must be [address, [slots]]"};
            AccessListEntry e;
            e.address = parse_address(entry[0].get<std::string>());
            for (const json& slot : entry[1])
                e.slots.push_back(parse_word_hex(slot.get<std::string>()));
            st.tx.access_list.push_back(std::move(e));
        }
    st.canonical_block = require(j, "block", where).get<std::uint64_t>();
    return st;
}

GasSchedule parse_schedule(const json& j, const GasSchedule& base, bool lenient)
{
    GasSchedule s = base;
    struct Field
    {
        const char* name;
        Gas* target;
    };
    const Field fields[] = {
        {"tx_base", &s.tx_base},
        {"create_surcharge", &s.create_surcharge},
        {"data_zero_byte", &s.data_zero_byte},
        {"data_nonzero_byte", &s.data_nonzero_byte},
        {"access_list_address", &s.access_list_address},
        {"access_list_slot", &s.access_list_slot},
        {"cold_sload", &s.cold_sload},
        {"warm_sload", &s.warm_sload},
        {"cold_account_access", &s.cold_account_access},
        {"warm_account_access", &s.warm_account_access},
        {"sstore_set", &s.sstore_set},
        {"sstore_reset", &s.sstore_reset},
        {"sstore_warm_dirty", &s.sstore_warm_dirty},
        {"sstore_clear_refund", &s.sstore_clear_refund},
        {"sstore_stipend", &s.sstore_stipend},
        {"memory_word_linear", &s.memory_word_linear},
        {"memory_quadratic_divisor", &s.memory_quadratic_divisor},
        {"keccak_base", &s.keccak_base},
        {"keccak_per_word", &s.keccak_per_word},
        {"refund_divisor", &s.refund_divisor},
        {"default_block_gas_limit", &s.default_block_gas_limit},
    };
    for (const auto& [key, value] : j.items())
    {
        if (key == "opcodes")
        {
            for (const auto& [mnemonic, cost] : value.items())
            {
                const auto op = opcode_by_name(mnemonic);
                if (!op)
                    throw ParseError{"unknown opcode '" + mnemonic + "' in schedule"};
                s.opcode_base[*op] = cost.get<Gas>();
            }
            continue;
        }
        bool matched = false;
        for (const Field& f : fields)
            if (key == f.name)
            {
                *f.target = value.get<Gas>();
                matched = true;
                break;
            }
        if (!matched)
        {
            const std::string message = "unknown schedule field '" + key + "'";
            if (lenient)
                std::cerr << "warning: " << message << "\n";
            else
                throw ParseError{message};
        }
    }
    return s;
}
}  // namespace

const BlockContext& Scenario::context_of(std::uint64_t number) const
{
    for (const ScenarioBlock& b : blocks)
        if (b.context.number == number)
            return b.context;
    throw UnknownBlock{number};
}

Scenario parse_scenario_json(const std::string& json_text, bool lenient)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw ParseError{std::string{"scenario JSON: "} + e.what()};
    }

    check_keys(doc, {"schedule", "base_state", "blocks", "transactions"}, "scenario",
        lenient);

    Scenario scenario;
    if (doc.contains("schedule"))
        scenario.schedule =
            parse_schedule(doc["schedule"], GasSchedule::standard(), lenient);

    const json& base_state = require(doc, "base_state", "scenario");
    check_keys(base_state, {"accounts"}, "base_state", lenient);
    if (base_state.contains("accounts"))
        for (const auto& [addr, acc] : base_state["accounts"].items())
            scenario.base_accounts[parse_address(addr)] =
                parse_account(acc, "account " + addr, lenient);

    for (const json& b : require(doc, "blocks", "scenario"))
        scenario.blocks.push_back(parse_block(b, lenient));
    for (const json& t : require(doc, "transactions", "scenario"))
        scenario.transactions.push_back(parse_transaction(t, lenient));

    // invariants
    if (scenario.blocks.empty())
        throw ValidationError{"scenario has no blocks"};
    for (std::size_t i = 1; i < scenario.blocks.size(); ++i)
        if (scenario.blocks[i].context.number <=
            scenario.blocks[i - 1].context.number)
            throw ValidationError{"block numbers must be strictly increasing"};
    for (const ScenarioTransaction& st : scenario.transactions)
    {
        bool found = false;
        for (const ScenarioBlock& b : scenario.blocks)
            if (b.context.number == st.canonical_block)
            {
                found = true;
                break;
            }
        if (!found)
            throw ValidationError{
                "transaction '" + st.tx.id + "' references a missing block"};
        if (st.tx.gas_limit == 0)
            throw ValidationError{
                "transaction '" + st.tx.id + "' has a zero gas limit"};
    }
    return scenario;
}

Scenario load_scenario(const std::string& path, bool lenient)
{
    std::ifstream in{path};
    if (!in)
        throw IoError{"cannot open scenario file: " + path};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_json(buffer.str(), lenient);
}

GasSchedule merge_schedule_overrides(const GasSchedule& base, const std::string& json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw ParseError{std::string{"schedule JSON: "} + e.what()};
    }
    return parse_schedule(doc, base, /*lenient=*/false);
}

WorldState state_at(const Scenario& scenario, std::uint64_t block_number)
{
    if (scenario.blocks.empty() || block_number < scenario.first_block() ||
        block_number > scenario.last_block())
        throw UnknownBlock{block_number};

    WorldState state;
    state.accounts_mutable() = scenario.base_accounts;
    for (const ScenarioBlock& block : scenario.blocks)
    {
        if (block.context.number > block_number)
            break;
        for (const auto& [addr, patch] : block.diff.accounts)
        {
            AccountState& acc = state.accounts_mutable()[addr];
            if (patch.balance)
                acc.balance = *patch.balance;
            if (patch.code)
                acc.code = *patch.code;
            for (const auto& [slot, value] : patch.storage)
            {
                if (value == 0)
                    acc.storage.erase(slot);
                else
                    acc.storage[slot] = value;
            }
        }
    }
    return state;
}

}  // namespace gaslab
