#ifndef SQLGATE_CORPUS_HPP
#define SQLGATE_CORPUS_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqlgate/guard.hpp"

namespace sqlgate {

enum class CaseClass { Benign, Tautology, Union, IllegalIncorrect, Piggyback, SecondOrder };

const char* case_class_name(CaseClass cls);

struct AttackCase {
    std::string name;
    CaseClass cls = CaseClass::Benign;
    std::string template_id;
    std::map<std::string, Bytes> inputs;
    bool expect_allowed = false;
    bool second_order = false;  // run through the store-then-reuse path
};

class MalformedCaseError : public std::runtime_error {
public:
    MalformedCaseError(int line, const std::string& detail)
        : std::runtime_error("corpus line " + std::to_string(line) + ": " + detail), line(line) {}
    int line;
};

class UnknownTemplateError : public std::runtime_error {
public:
    explicit UnknownTemplateError(const std::string& case_name)
        : std::runtime_error("case '" + case_name + "' names an unregistered template") {}
};

struct CorpusReport {
    int total = 0;
    int passed = 0;
    int failed = 0;
    std::map<std::string, std::pair<int, int>> per_class;  // class -> (passed, failed)
    std::vector<std::pair<std::string, std::string>> failures;  // case name, actual verdict JSON

    std::string to_json() const;
    std::string table() const;
};

/// Attack payloads and benign inputs for every built-in template; one
/// attack family per class plus at least five benign cases per template.
std::vector<AttackCase> builtin_corpus();

/// JSON-lines, one case object per line. Blank lines are skipped.
std::vector<AttackCase> load_corpus(const std::string& path);

/// Validates every case; a case passes when the verdict outcome matches
/// its expectation. Second-order cases go through a store round trip and
/// validate_stored.
CorpusReport run_corpus(const Guard& guard, const std::vector<AttackCase>& cases,
                        MarkerPolicy policy);

}  // namespace sqlgate

#endif
