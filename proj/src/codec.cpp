#include "eclearn/codec.hpp"

#include <json.hpp>

#include "eclearn/parse.hpp"

namespace eclearn {

using nlohmann::json;

namespace {

constexpr size_t kMaxFrame = 64u << 20;

const char* kTypeNames[] = {
    "AddNewClause",  "SpecializeRequest", "StatsReply", "Replace",       "Proceed",
    "PruneRequest",  "PruneStatsReply",   "Remove",     "MediatorGrant", "MediatorDone",
};

json stats_to_json(const ClauseStats& s) {
    return json{{"tp", s.tp}, {"fp", s.fp}, {"fn", s.fn}, {"e", s.e}};
}

ClauseStats stats_from_json(const json& j) {
    ClauseStats s;
    s.tp = j.at("tp").get<long>();
    s.fp = j.at("fp").get<long>();
    s.fn = j.at("fn").get<long>();
    s.e = j.at("e").get<long>();
    return s;
}

json clause_to_json(const Clause& c) {
    json j;
    j["id"] = c.id;
    j["head"] = to_string(c.head);
    json body = json::array();
    for (const Literal& l : c.body) body.push_back(to_string(l));
    j["body"] = std::move(body);
    if (c.bottom) {
        json lits = json::array();
        for (const BottomLiteral& bl : c.bottom->literals)
            lits.push_back(json{{"lit", to_string(bl.lit)}, {"in", bl.input_vars}});
        j["bottom"] = json{{"head", to_string(c.bottom->head)}, {"lits", std::move(lits)}};
    }
    return j;
}

Clause clause_from_json(const json& j) {
    Clause c;
    c.id = j.at("id").get<ClauseId>();
    c.head = parse_atom(j.at("head").get<std::string>());
    for (const auto& l : j.at("body")) c.body.push_back(parse_atom(l.get<std::string>()));
    if (j.contains("bottom")) {
        auto bottom = std::make_shared<BottomClause>();
        bottom->head = parse_atom(j["bottom"].at("head").get<std::string>());
        for (const auto& bl : j["bottom"].at("lits")) {
            BottomLiteral b;
            b.lit = parse_atom(bl.at("lit").get<std::string>());
            b.input_vars = bl.at("in").get<std::vector<std::string>>();
            bottom->literals.push_back(std::move(b));
        }
        c.bottom = std::move(bottom);
        c.reset_refinements();
    }
    return c;
}

}  // namespace

const char* msg_type_name(MsgType t) { return kTypeNames[static_cast<int>(t)]; }

std::optional<MsgType> msg_type_from_name(const std::string& name) {
    for (int i = 0; i < 10; ++i) {
        if (name == kTypeNames[i]) return static_cast<MsgType>(i);
    }
    return std::nullopt;
}

std::string encode_payload(const Envelope& env) {
    json body;
    const Message& m = env.msg;
    body["clause_id"] = m.clause_id;
    if (!m.requester.empty()) body["requester"] = m.requester;
    if (!m.responder.empty()) body["responder"] = m.responder;
    if (!m.purpose.empty()) body["purpose"] = m.purpose;
    if (m.clause) body["clause"] = clause_to_json(*m.clause);
    if (m.type == MsgType::StatsReply || m.type == MsgType::PruneStatsReply) {
        body["stats"] = stats_to_json(m.parent_stats);
        json refs = json::object();
        for (const auto& [key, st] : m.refinement_stats) refs[key] = stats_to_json(st);
        body["refinements"] = std::move(refs);
        body["stable_since"] = m.stable_since;
    }

    json j;
    j["v"] = env.version;
    j["type"] = msg_type_name(m.type);
    j["seq"] = env.seq;
    j["sender"] = env.sender;
    j["to"] = env.to;
    j["body"] = std::move(body);
    return j.dump();
}

Envelope decode_payload(const std::string& payload, size_t base_offset) {
    json j;
    try {
        j = json::parse(payload);
    } catch (const json::parse_error& e) {
        throw CodecError(std::string("bad payload json: ") + e.what(),
                         base_offset + (e.byte > 0 ? e.byte - 1 : 0));
    }
    try {
        Envelope env;
        env.version = j.at("v").get<int>();
        auto type = msg_type_from_name(j.at("type").get<std::string>());
        if (!type) throw CodecError("unknown message type", base_offset);
        env.msg.type = *type;
        env.seq = j.at("seq").get<std::uint64_t>();
        env.sender = j.at("sender").get<std::string>();
        env.to = j.at("to").get<std::string>();

        const json& body = j.at("body");
        Message& m = env.msg;
        m.clause_id = body.at("clause_id").get<ClauseId>();
        if (body.contains("requester")) m.requester = body["requester"].get<std::string>();
        if (body.contains("responder")) m.responder = body["responder"].get<std::string>();
        if (body.contains("purpose")) m.purpose = body["purpose"].get<std::string>();
        if (body.contains("clause")) m.clause = clause_from_json(body["clause"]);
        if (body.contains("stats")) m.parent_stats = stats_from_json(body["stats"]);
        if (body.contains("refinements")) {
            for (const auto& [key, st] : body["refinements"].items())
                m.refinement_stats[key] = stats_from_json(st);
        }
        if (body.contains("stable_since")) m.stable_since = body["stable_since"].get<long>();
        return env;
    } catch (const CodecError&) {
        throw;
    } catch (const std::exception& e) {
        throw CodecError(std::string("bad payload: ") + e.what(), base_offset);
    }
}

std::vector<std::uint8_t> encode_message(const Envelope& env) {
    std::string payload = encode_payload(env);
    std::vector<std::uint8_t> out;
    out.reserve(payload.size() + 4);
    std::uint32_t n = static_cast<std::uint32_t>(payload.size());
    out.push_back(static_cast<std::uint8_t>(n >> 24));
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

Envelope decode_message(const std::vector<std::uint8_t>& buf, size_t& offset) {
    if (offset + 4 > buf.size())
        throw CodecError("truncated frame header", offset);
    std::uint32_t n = (static_cast<std::uint32_t>(buf[offset]) << 24) |
                      (static_cast<std::uint32_t>(buf[offset + 1]) << 16) |
                      (static_cast<std::uint32_t>(buf[offset + 2]) << 8) |
                      static_cast<std::uint32_t>(buf[offset + 3]);
    if (n > kMaxFrame) throw CodecError("frame length exceeds limit", offset);
    if (offset + 4 + n > buf.size())
        throw CodecError("truncated frame payload", buf.size());
    std::string payload(buf.begin() + offset + 4, buf.begin() + offset + 4 + n);
    Envelope env = decode_payload(payload, offset + 4);
    offset += 4 + n;
    return env;
}

}  // namespace eclearn
