#include "sqlgate/guard.hpp"

#include <nlohmann/json.hpp>

namespace sqlgate {

QueryTemplate::QueryTemplate(std::string id, TaintedString build, std::vector<TemplateField> fields)
    : id_(std::move(id)), build_(std::move(build)), fields_(std::move(fields)) {
    if (id_.empty()) throw ConfigError("template id must be non-empty");
    auto order = build_.field_ids();
    if (order.size() != fields_.size())
        throw ConfigError("template '" + id_ + "': field list does not match the build holes");
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i] != fields_[i].id)
            throw ConfigError("template '" + id_ + "': field order mismatch at '" + order[i] + "'");
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j)
            if (order[i] == order[j])
                throw ConfigError("template '" + id_ + "': duplicate field '" + order[i] + "'");
}

std::vector<std::string> QueryTemplate::field_order() const { return build_.field_ids(); }

ParserConfig QueryTemplate::parser_config() const {
    ParserConfig config;
    for (const TemplateField& f : fields_) config.field_kinds[f.id] = {f.kind};
    return config;
}

TaintedString QueryTemplate::bind(const std::map<std::string, Bytes>& inputs) const {
    if (inputs.size() != fields_.size())
        throw ConfigError("template '" + id_ + "': expected " + std::to_string(fields_.size()) +
                          " inputs, got " + std::to_string(inputs.size()));
    TaintedString out;
    for (const Segment& seg : build_.segments()) {
        if (seg.origin == Origin::Trusted) {
            out = out + TaintedString::literal(seg.text);
        } else {
            auto it = inputs.find(seg.field_id);
            if (it == inputs.end())
                throw ConfigError("template '" + id_ + "': missing input for field '" +
                                  seg.field_id + "'");
            out = out + TaintedString::tainted(it->second, seg.field_id);
        }
    }
    return out;
}

std::map<std::string, Bytes> QueryTemplate::benign_samples() const {
    std::map<std::string, Bytes> samples;
    for (const TemplateField& f : fields_)
        samples[f.id] = (f.kind == TaintKind::Number) ? "0" : "x";
    return samples;
}

namespace {

Skeleton token_skeleton(const Token& t) {
    std::string label = token_kind_name(t.kind);
    switch (t.kind) {
        case TokenKind::Keyword: label += ":" + t.keyword; break;
        case TokenKind::Identifier:
        case TokenKind::Number:
        case TokenKind::Operator:
        case TokenKind::StringLiteralBody: label += ":" + t.lexeme; break;
        default: break;
    }
    return Skeleton{label, {}};
}

Skeleton node_skeleton(const SyntaxNode& node) {
    if (node.tainted_field) return Skeleton{"placeholder:" + *node.tainted_field, {}};
    Skeleton sk{"node:" + node.rule, {}};
    for (const auto& child : node.children) {
        if (const SyntaxNode* n = std::get_if<SyntaxNode>(&child))
            sk.children.push_back(node_skeleton(*n));
        else
            sk.children.push_back(token_skeleton(std::get<Token>(child)));
    }
    return sk;
}

}  // namespace

Skeleton skeleton(const ParseTree& tree) { return node_skeleton(tree.root); }

const char* block_reason_name(BlockReason reason) {
    switch (reason) {
        case BlockReason::ParseFailure: return "parse_failure";
        case BlockReason::SkeletonMismatch: return "skeleton_mismatch";
        case BlockReason::MarkerCollision: return "marker_collision";
        case BlockReason::MultipleStatements: return "multiple_statements";
    }
    return "?";
}

const char* attack_class_name(AttackClass cls) {
    switch (cls) {
        case AttackClass::Tautology: return "tautology";
        case AttackClass::Union: return "union";
        case AttackClass::IllegalIncorrect: return "illegal_incorrect";
        case AttackClass::Piggyback: return "piggyback";
        case AttackClass::SecondOrder: return "second_order";
        case AttackClass::Unknown: return "unknown";
    }
    return "?";
}

std::string Verdict::to_json() const {
    nlohmann::json j;
    j["outcome"] = allowed ? "allowed" : "blocked";
    if (allowed) j["stripped_query"] = stripped_query;
    if (reason) j["reason"] = block_reason_name(*reason);
    if (position) j["position"] = *position;
    if (field_id) j["field_id"] = *field_id;
    if (attack_guess) j["attack_guess"] = attack_class_name(*attack_guess);
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

AttackClass classify(const ParseError& error, const std::vector<Token>& tokens) {
    (void)error;  // the verdict already carries position/field; tokens decide the label
    std::vector<const Token*> inside;
    bool open = false;
    for (const Token& t : tokens) {
        if (t.kind == TokenKind::OpenMarker) { open = true; continue; }
        if (t.kind == TokenKind::CloseMarker) { open = false; continue; }
        if (open) inside.push_back(&t);
    }
    for (const Token* t : inside)
        if (t->kind == TokenKind::Semicolon) return AttackClass::Piggyback;
    for (const Token* t : inside)
        if (t->kind == TokenKind::Keyword && t->keyword == "UNION") return AttackClass::Union;
    for (const Token* t : inside)
        if (t->kind == TokenKind::CommentStart) return AttackClass::Tautology;
    for (std::size_t i = 0; i + 2 < inside.size(); ++i) {
        // Always-true comparison: the same number on both sides of '='.
        if (inside[i]->kind == TokenKind::Number && inside[i + 1]->kind == TokenKind::Operator &&
            inside[i + 1]->lexeme == "=" && inside[i + 2]->kind == TokenKind::Number &&
            inside[i]->lexeme == inside[i + 2]->lexeme)
            return AttackClass::Tautology;
    }
    std::size_t quotes = 0, significant = 0;
    for (const Token* t : inside) {
        if (t->kind == TokenKind::Quote) ++quotes;
        if (t->kind != TokenKind::Whitespace) ++significant;
    }
    if (quotes % 2 == 1 || (significant > 0 && significant == quotes))
        return AttackClass::IllegalIncorrect;
    return AttackClass::Unknown;
}

Guard::Guard(std::vector<MarkerPair> pool) : pool_(std::move(pool)) { check_pool(pool_); }

void Guard::register_template(QueryTemplate tmpl) {
    // Trusted fragments must be free of pool marker bytes or the marker
    // count invariant cannot hold.
    TaintedString probe = tmpl.bind(tmpl.benign_samples());
    for (const Segment& seg : probe.segments()) {
        if (seg.origin != Origin::Trusted) continue;
        for (const MarkerPair& p : pool_)
            if (pair_collides(p, seg.text))
                throw ConfigError("template '" + tmpl.id() +
                                  "': trusted fragment contains pool marker bytes");
    }

    MarkerAssignment assignment;
    auto order = tmpl.field_order();
    for (std::size_t i = 0; i < order.size(); ++i)
        assignment.fields.emplace_back(order[i], pool_[i % pool_.size()]);
    MarkedQuery mq = render(probe, assignment);
    LexResult lexed = tokenize(mq);
    if (std::holds_alternative<LexError>(lexed))
        throw ConfigError("template '" + tmpl.id() + "': benign binding does not lex");
    ParseResult parsed = parse(std::get<std::vector<Token>>(lexed), tmpl.parser_config());
    if (const ParseError* pe = std::get_if<ParseError>(&parsed))
        throw ConfigError("template '" + tmpl.id() + "': benign binding does not parse: " +
                          pe->to_json());

    Skeleton reference = skeleton(std::get<ParseTree>(parsed));
    std::string id = tmpl.id();
    templates_.emplace(id, Registered{std::move(tmpl), std::move(reference)});
}

bool Guard::has_template(const std::string& id) const { return templates_.count(id) > 0; }

const QueryTemplate& Guard::get_template(const std::string& id) const { return lookup(id).tmpl; }

std::vector<std::string> Guard::template_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : templates_) ids.push_back(id);
    return ids;
}

const Guard::Registered& Guard::lookup(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw ConfigError("unknown template '" + id + "'");
    return it->second;
}

Verdict Guard::validate(const std::string& template_id, const std::map<std::string, Bytes>& inputs,
                        MarkerPolicy& policy) const {
    const Registered& reg = lookup(template_id);
    TaintedString ts = reg.tmpl.bind(inputs);

    Verdict blocked;
    blocked.allowed = false;

    MarkerAssignment assignment;
    for (const std::string& fid : reg.tmpl.field_order()) {
        try {
            assignment.fields.emplace_back(fid,
                                           policy.reassign_on_collision(fid, inputs.at(fid)));
        } catch (const CollisionExhaustedError&) {
            blocked.reason = BlockReason::MarkerCollision;
            blocked.field_id = fid;
            blocked.attack_guess = AttackClass::Unknown;
            return blocked;
        }
    }

    MarkedQuery mq;
    try {
        mq = render(ts, assignment);
    } catch (const MarkerCollisionError& e) {
        blocked.reason = BlockReason::MarkerCollision;
        blocked.field_id = e.field_id;
        blocked.attack_guess = AttackClass::Unknown;
        return blocked;
    }

    LexResult lexed = tokenize(mq);
    if (const LexError* le = std::get_if<LexError>(&lexed)) {
        blocked.reason = BlockReason::ParseFailure;
        blocked.position = le->position;
        for (const MarkerSpan& span : mq.spans)
            if (le->position >= span.open_begin && le->position < span.close_end)
                blocked.field_id = span.field_id;
        blocked.attack_guess = AttackClass::Unknown;
        return blocked;
    }
    const auto& tokens = std::get<std::vector<Token>>(lexed);

    ParseResult parsed = parse(tokens, reg.tmpl.parser_config());
    if (const ParseError* pe = std::get_if<ParseError>(&parsed)) {
        blocked.reason =
            pe->multiple_statements ? BlockReason::MultipleStatements : BlockReason::ParseFailure;
        blocked.position = pe->position;
        blocked.field_id = pe->inside_tainted;
        blocked.attack_guess = classify(*pe, tokens);
        return blocked;
    }

    if (skeleton(std::get<ParseTree>(parsed)) != reg.reference) {
        blocked.reason = BlockReason::SkeletonMismatch;
        blocked.attack_guess = AttackClass::Unknown;
        return blocked;
    }

    Verdict ok;
    ok.allowed = true;
    ok.stripped_query = strip(mq);
    return ok;
}

Verdict Guard::validate_stored(const std::string& template_id,
                               const std::map<std::string, Bytes>& stored_inputs,
                               MarkerPolicy& policy) const {
    // Stored values are re-tainted on every use; "already in the database"
    // earns no trust.
    return validate(template_id, stored_inputs, policy);
}

namespace {

TaintedString lit(const char* s) { return TaintedString::literal(s); }
TaintedString hole(const char* fid) { return TaintedString::tainted("", fid); }

}  // namespace

std::vector<QueryTemplate> builtin_templates() {
    std::vector<QueryTemplate> out;
    out.emplace_back("login",
                     lit("SELECT * FROM login WHERE name = '") + hole("name") +
                         lit("' AND password = '") + hole("password") + lit("';"),
                     std::vector<TemplateField>{{"name", TaintKind::StringBody},
                                                {"password", TaintKind::StringBody}});
    out.emplace_back("login_table",
                     lit("select * from login_table_ll where name='") + hole("name") +
                         lit("' and password='") + hole("password") + lit("'"),
                     std::vector<TemplateField>{{"name", TaintKind::StringBody},
                                                {"password", TaintKind::StringBody}});
    out.emplace_back(
        "employee_city",
        lit("SELECT Last_name1_l, First_name1_f, Title_t1_t, Notes_n1_n "
            "FROM Employee_Table1_e WHERE City_name1_c = ('") +
            hole("city") + lit("')"),
        std::vector<TemplateField>{{"city", TaintKind::StringBody}});
    out.emplace_back("bank",
                     lit("SELECT bank_accounts FROM users1 WHERE login1_area = '") +
                         hole("login1_area") + lit("' AND pass = '") + hole("pass") + lit("';"),
                     std::vector<TemplateField>{{"login1_area", TaintKind::StringBody},
                                                {"pass", TaintKind::StringBody}});
    out.emplace_back("register_user",
                     lit("INSERT INTO users (name, address, phone) VALUES ('") + hole("name") +
                         lit("', '") + hole("address") + lit("', '") + hole("phone") + lit("');"),
                     std::vector<TemplateField>{{"name", TaintKind::StringBody},
                                                {"address", TaintKind::StringBody},
                                                {"phone", TaintKind::StringBody}});
    out.emplace_back("profile_update",
                     lit("UPDATE users SET address = '") + hole("address") +
                         lit("' WHERE name = '") + hole("name") + lit("';"),
                     std::vector<TemplateField>{{"address", TaintKind::StringBody},
                                                {"name", TaintKind::StringBody}});
    return out;
}

}  // namespace sqlgate
