#ifndef SQLGATE_GUARD_HPP
#define SQLGATE_GUARD_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqlgate/delimiters.hpp"
#include "sqlgate/parser.hpp"
#include "sqlgate/taint.hpp"

namespace sqlgate {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& detail) : std::runtime_error(detail) {}
};

struct TemplateField {
    std::string id;
    TaintKind kind = TaintKind::StringBody;
};

/// The developer-declared intent: trusted fragments with named holes for
/// user input. Registered templates are immutable.
class QueryTemplate {
public:
    QueryTemplate(std::string id, TaintedString build, std::vector<TemplateField> fields);

    const std::string& id() const { return id_; }
    const std::vector<TemplateField>& fields() const { return fields_; }
    std::vector<std::string> field_order() const;
    ParserConfig parser_config() const;

    /// Substitutes the given value for each hole. Throws ConfigError when
    /// the input keys do not exactly match the template's fields.
    TaintedString bind(const std::map<std::string, Bytes>& inputs) const;

    /// The benign sample value used for the reference skeleton: "x" for
    /// string and identifier holes, "0" for numeric ones.
    std::map<std::string, Bytes> benign_samples() const;

private:
    std::string id_;
    TaintedString build_;
    std::vector<TemplateField> fields_;
};

/// Parse tree with every tainted span collapsed to a placeholder leaf.
/// Contains no user-supplied bytes; equality certifies structural identity.
struct Skeleton {
    std::string label;
    std::vector<Skeleton> children;

    bool operator==(const Skeleton&) const = default;
};

Skeleton skeleton(const ParseTree& tree);

enum class BlockReason { ParseFailure, SkeletonMismatch, MarkerCollision, MultipleStatements };
enum class AttackClass { Tautology, Union, IllegalIncorrect, Piggyback, SecondOrder, Unknown };

const char* block_reason_name(BlockReason reason);
const char* attack_class_name(AttackClass cls);

struct Verdict {
    bool allowed = false;
    Bytes stripped_query;  // allowed only
    std::optional<BlockReason> reason;
    std::optional<std::size_t> position;
    std::optional<std::string> field_id;
    std::optional<AttackClass> attack_guess;

    std::string to_json() const;
};

/// Best-effort attack labeling from the tokens inside tainted spans.
/// Diagnostic only; never part of the allow/block decision.
AttackClass classify(const ParseError& error, const std::vector<Token>& tokens);

/// The validation pipeline: assign markers, render, tokenize, parse,
/// compare skeletons, emit a verdict. Templates and reference skeletons
/// are immutable after registration and shareable across threads.
class Guard {
public:
    explicit Guard(std::vector<MarkerPair> pool = MarkerPolicy::default_pool());

    /// Computes and caches the reference skeleton (template bound to benign
    /// samples). Throws ConfigError when the template cannot parse or a
    /// trusted fragment contains pool marker bytes.
    void register_template(QueryTemplate tmpl);

    bool has_template(const std::string& id) const;
    const QueryTemplate& get_template(const std::string& id) const;
    std::vector<std::string> template_ids() const;

    Verdict validate(const std::string& template_id, const std::map<std::string, Bytes>& inputs,
                     MarkerPolicy& policy) const;

    /// Identical pipeline, named entry point for values coming back out of
    /// storage so call sites cannot treat stored data as trusted.
    Verdict validate_stored(const std::string& template_id,
                            const std::map<std::string, Bytes>& stored_inputs,
                            MarkerPolicy& policy) const;

    const std::vector<MarkerPair>& pool() const { return pool_; }

private:
    struct Registered {
        QueryTemplate tmpl;
        Skeleton reference;
    };

    const Registered& lookup(const std::string& id) const;

    std::vector<MarkerPair> pool_;
    std::map<std::string, Registered> templates_;
};

/// Built-in demo templates: login forms, employee search, bank lookup,
/// user registration, profile update.
std::vector<QueryTemplate> builtin_templates();

}  // namespace sqlgate

#endif
