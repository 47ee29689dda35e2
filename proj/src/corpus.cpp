#include "sqlgate/corpus.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sqlgate/store.hpp"

namespace sqlgate {

const char* case_class_name(CaseClass cls) {
    switch (cls) {
        case CaseClass::Benign: return "benign";
        case CaseClass::Tautology: return "tautology";
        case CaseClass::Union: return "union";
        case CaseClass::IllegalIncorrect: return "illegal_incorrect";
        case CaseClass::Piggyback: return "piggyback";
        case CaseClass::SecondOrder: return "second_order";
    }
    return "?";
}

namespace {

CaseClass case_class_from_name(const std::string& name, int line) {
    if (name == "benign") return CaseClass::Benign;
    if (name == "tautology") return CaseClass::Tautology;
    if (name == "union") return CaseClass::Union;
    if (name == "illegal_incorrect") return CaseClass::IllegalIncorrect;
    if (name == "piggyback") return CaseClass::Piggyback;
    if (name == "second_order") return CaseClass::SecondOrder;
    throw MalformedCaseError(line, "unknown class '" + name + "'");
}

AttackCase make_case(std::string name, CaseClass cls, std::string template_id,
                     std::map<std::string, Bytes> inputs, bool expect_allowed,
                     bool second_order = false) {
    return AttackCase{std::move(name), cls, std::move(template_id), std::move(inputs),
                      expect_allowed, second_order};
}

}  // namespace

std::vector<AttackCase> builtin_corpus() {
    std::vector<AttackCase> cases;

    // Attack cases, one family per class.
    cases.push_back(make_case("tautology-or-1=1-comment", CaseClass::Tautology, "login",
                              {{"name", "' OR 1=1 --"}, {"password", ""}}, false));
    cases.push_back(make_case("tautology-or-1=1-dash", CaseClass::Tautology, "login_table",
                              {{"name", "'or 1=1 -"}, {"password", ""}}, false));
    cases.push_back(make_case("illegal-lone-quote", CaseClass::IllegalIncorrect, "employee_city",
                              {{"city", "'"}}, false));
    cases.push_back(make_case("illegal-paren-probe", CaseClass::IllegalIncorrect, "employee_city",
                              {{"city", "') ('UNION SELECT another_field FROM another_table"}},
                              false));
    cases.push_back(make_case(
        "union-debit-card", CaseClass::Union, "bank",
        {{"login1_area",
          "'UNION SELECT card_no1_c from Debit_Card1_d where accountNo1_a=100 --"},
         {"pass", ""}},
        false));
    cases.push_back(make_case("piggyback-drop-login", CaseClass::Piggyback, "login",
                              {{"name", "admin"}, {"password", "'; drop table login ;"}}, false));
    cases.push_back(make_case("second-order-stored-drop", CaseClass::SecondOrder, "profile_update",
                              {{"address", "x'; drop table login ;--"}, {"name", "bob"}}, false,
                              true));

    // Benign cases, five per template.
    auto benign = [&](const char* name, const char* tid, std::map<std::string, Bytes> in) {
        cases.push_back(make_case(name, CaseClass::Benign, tid, std::move(in), true));
    };
    benign("login-admin", "login", {{"name", "Adminstrator"}, {"password", "admin"}});
    benign("login-plain", "login", {{"name", "bob"}, {"password", "secret"}});
    benign("login-spaces", "login", {{"name", "mary jane"}, {"password", "pass word"}});
    benign("login-empty-password", "login", {{"name", "guest"}, {"password", ""}});
    benign("login-digits", "login", {{"name", "user42"}, {"password", "12345"}});

    benign("login-table-valid", "login_table",
           {{"name", "administrator1_ad"}, {"password", "admin1_ad"}});
    benign("login-table-plain", "login_table", {{"name", "alice"}, {"password", "wonder"}});
    benign("login-table-spaces", "login_table", {{"name", "a b c"}, {"password", "x y"}});
    benign("login-table-empty", "login_table", {{"name", ""}, {"password", ""}});
    benign("login-table-mixed", "login_table", {{"name", "Bob99"}, {"password", "Pa55"}});

    benign("employee-city-plain", "employee_city", {{"city", "Jaipur"}});
    benign("employee-city-spaces", "employee_city", {{"city", "New Delhi"}});
    benign("employee-city-empty", "employee_city", {{"city", ""}});
    benign("employee-city-digits", "employee_city", {{"city", "Sector17"}});
    benign("employee-city-long", "employee_city", {{"city", "Thiruvananthapuram"}});

    benign("bank-plain", "bank", {{"login1_area", "branch7"}, {"pass", "pin42"}});
    benign("bank-spaces", "bank", {{"login1_area", "main street"}, {"pass", "ok"}});
    benign("bank-empty-pass", "bank", {{"login1_area", "north"}, {"pass", ""}});
    benign("bank-digits", "bank", {{"login1_area", "100"}, {"pass", "100"}});
    benign("bank-mixed", "bank", {{"login1_area", "Area51"}, {"pass", "tope"}});

    benign("register-plain", "register_user",
           {{"name", "bob"}, {"address", "12 Elm Road"}, {"phone", "5550100"}});
    benign("register-spaces", "register_user",
           {{"name", "mary jane"}, {"address", "Flat 4 Rose Lane"}, {"phone", "5550101"}});
    benign("register-empty-phone", "register_user",
           {{"name", "carol"}, {"address", "9 Hill"}, {"phone", ""}});
    benign("register-digits", "register_user",
           {{"name", "user7"}, {"address", "Plot 77"}, {"phone", "9990007"}});
    benign("register-long", "register_user",
           {{"name", "dmitri"}, {"address", "221B Baker Street Marylebone"}, {"phone", "5550102"}});

    benign("profile-update-plain", "profile_update", {{"address", "New Town"}, {"name", "bob"}});
    benign("profile-update-spaces", "profile_update",
           {{"address", "Old Quarter 5"}, {"name", "mary jane"}});
    benign("profile-update-empty", "profile_update", {{"address", ""}, {"name", "carol"}});
    benign("profile-update-digits", "profile_update", {{"address", "42"}, {"name", "user7"}});
    cases.push_back(make_case("profile-update-stored-benign", CaseClass::Benign, "profile_update",
                              {{"address", "Hill View"}, {"name", "bob"}}, true, true));

    return cases;
}

std::vector<AttackCase> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    std::vector<AttackCase> cases;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw MalformedCaseError(lineno, "invalid JSON");
        if (!j.contains("name") || !j.contains("class") || !j.contains("template_id") ||
            !j.contains("inputs") || !j.contains("expected"))
            throw MalformedCaseError(lineno, "missing required field");
        AttackCase c;
        c.name = j["name"].get<std::string>();
        c.cls = case_class_from_name(j["class"].get<std::string>(), lineno);
        c.template_id = j["template_id"].get<std::string>();
        for (auto& [k, v] : j["inputs"].items()) c.inputs[k] = v.get<std::string>();
        std::string expected = j["expected"].get<std::string>();
        if (expected == "allowed")
            c.expect_allowed = true;
        else if (expected == "blocked")
            c.expect_allowed = false;
        else
            throw MalformedCaseError(lineno, "expected must be 'allowed' or 'blocked'");
        if (c.cls != CaseClass::Benign && c.expect_allowed)
            throw MalformedCaseError(lineno, "attack cases must expect 'blocked'");
        c.second_order = j.value("second_order", false);
        cases.push_back(std::move(c));
    }
    return cases;
}

std::string CorpusReport::to_json() const {
    nlohmann::json j;
    j["total"] = total;
    j["passed"] = passed;
    j["failed"] = failed;
    nlohmann::json pc = nlohmann::json::object();
    for (const auto& [cls, counts] : per_class)
        pc[cls] = {{"passed", counts.first}, {"failed", counts.second}};
    j["per_class"] = pc;
    nlohmann::json fails = nlohmann::json::array();
    for (const auto& [name, verdict] : failures)
        fails.push_back({{"case", name}, {"verdict", verdict}});
    j["failures"] = fails;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string CorpusReport::table() const {
    std::ostringstream out;
    out << "class               passed  failed\n";
    for (const auto& [cls, counts] : per_class) {
        out << cls;
        for (std::size_t i = cls.size(); i < 20; ++i) out << ' ';
        out << counts.first << "       " << counts.second << "\n";
    }
    out << "total: " << total << "  passed: " << passed << "  failed: " << failed << "\n";
    for (const auto& [name, verdict] : failures) out << "FAIL " << name << ": " << verdict << "\n";
    return out.str();
}

CorpusReport run_corpus(const Guard& guard, const std::vector<AttackCase>& cases,
                        MarkerPolicy policy) {
    CorpusReport report;
    for (const AttackCase& c : cases) {
        if (!guard.has_template(c.template_id)) throw UnknownTemplateError(c.name);

        Verdict verdict;
        if (c.second_order) {
            // Store step: the values land in the demo store unvalidated,
            // then come back out for the use step.
            Store store;
            std::vector<std::string> cols;
            std::vector<Bytes> row;
            std::map<std::string, Bytes> retrieved;
            for (const auto& [k, v] : c.inputs) {
                cols.push_back(k);
                row.push_back(v);
            }
            store.create_table(StoreTable{"scratch", cols, {}});
            store.insert_row("scratch", row);
            std::size_t i = 0;
            const StoreTable* scratch = store.table("scratch");
            for (const auto& [k, v] : c.inputs) retrieved[k] = scratch->rows.back()[i++];
            verdict = guard.validate_stored(c.template_id, retrieved, policy);
        } else {
            verdict = guard.validate(c.template_id, c.inputs, policy);
        }

        bool pass = verdict.allowed == c.expect_allowed;
        ++report.total;
        auto& counts = report.per_class[case_class_name(c.cls)];
        if (pass) {
            ++report.passed;
            ++counts.first;
        } else {
            ++report.failed;
            ++counts.second;
            report.failures.emplace_back(c.name, verdict.to_json());
        }
    }
    return report;
}

}  // namespace sqlgate
