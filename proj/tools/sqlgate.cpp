// sqlgate: validate templated SQL queries against tainted user input.
//
// Exit codes: 0 allowed / all cases pass, 1 blocked / failures, 2 usage or
// operational error.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sqlgate/config.hpp"
#include "sqlgate/corpus.hpp"
#include "sqlgate/guard.hpp"
#include "sqlgate/service.hpp"

using namespace sqlgate;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string mode = "dynamic";
    std::string pool = "default";
    std::string templates_file;
    bool json_output = false;
    bool deterministic = false;
};

std::uint64_t effective_seed(const GlobalOptions& opts) {
    std::uint64_t seed = opts.seed;
    if (seed == 0) {
        if (const char* env = std::getenv("SQLGATE_SEED")) seed = std::strtoull(env, nullptr, 10);
    }
    if (seed == 0) {
        if (opts.deterministic)
            throw ConfigError("--deterministic requires a non-zero seed");
        seed = std::random_device{}();
        if (seed == 0) seed = 1;
    }
    return seed;
}

std::vector<MarkerPair> load_pool_spec(const GlobalOptions& opts) {
    if (opts.pool == "default") return MarkerPolicy::default_pool();
    return load_pool(opts.pool);
}

Guard build_guard(const GlobalOptions& opts) {
    Guard guard(load_pool_spec(opts));
    for (QueryTemplate& t : builtin_templates()) guard.register_template(std::move(t));
    if (!opts.templates_file.empty())
        for (QueryTemplate& t : load_templates(opts.templates_file))
            guard.register_template(std::move(t));
    return guard;
}

MarkerPolicy build_policy(const GlobalOptions& opts) {
    RotationMode mode;
    if (opts.mode == "static")
        mode = RotationMode::Static;
    else if (opts.mode == "dynamic")
        mode = RotationMode::Dynamic;
    else
        throw ConfigError("--mode must be 'static' or 'dynamic'");
    return MarkerPolicy(load_pool_spec(opts), mode, effective_seed(opts));
}

int cmd_check(const GlobalOptions& opts, const std::string& template_id,
              const std::vector<std::string>& kv_args) {
    Guard guard = build_guard(opts);
    if (!guard.has_template(template_id)) {
        std::cerr << "unknown template: " << template_id << "\n";
        return 2;
    }
    std::map<std::string, Bytes> inputs;
    for (const std::string& kv : kv_args) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "inputs must be key=value, got: " << kv << "\n";
            return 2;
        }
        inputs[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    MarkerPolicy policy = build_policy(opts);
    Verdict verdict = guard.validate(template_id, inputs, policy);
    std::cout << verdict.to_json() << "\n";
    return verdict.allowed ? 0 : 1;
}

int cmd_corpus(const GlobalOptions& opts, const std::string& source) {
    Guard guard = build_guard(opts);
    std::vector<AttackCase> cases =
        source == "builtin" ? builtin_corpus() : load_corpus(source);
    CorpusReport report = run_corpus(guard, cases, build_policy(opts));
    if (opts.json_output)
        std::cout << report.to_json() << "\n";
    else
        std::cout << report.table();
    return report.failed == 0 ? 0 : 1;
}

int cmd_serve(const GlobalOptions& opts, const std::string& bind, bool test_mode) {
    std::string host = bind;
    int port = 8080;
    if (auto colon = bind.rfind(':'); colon != std::string::npos) {
        host = bind.substr(0, colon);
        port = std::stoi(bind.substr(colon + 1));
    }
    DemoService service(build_guard(opts), build_policy(opts), test_mode);
    if (!service.start(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 2;
    }
    std::cerr << "serving on " << host << ":" << service.port() << "\n";
    // Runs until killed; log lines stream one JSON object per verdict.
    std::size_t seen = 0;
    while (true) {
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
        auto entries = service.log_entries();
        for (; seen < entries.size(); ++seen)
            std::cout << "{\"endpoint\":\"" << entries[seen].endpoint
                      << "\",\"verdict\":" << entries[seen].verdict_json << "}" << std::endl;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sqlgate: taint-marking SQL injection guard"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--seed", opts.seed, "PRNG seed (0 = system entropy)");
    app.add_option("--mode", opts.mode, "static|dynamic")->check(CLI::IsMember({"static", "dynamic"}));
    app.add_option("--pool", opts.pool, "marker pool file or 'default'");
    app.add_option("--templates", opts.templates_file, "extra templates JSON file");
    app.add_flag("--json", opts.json_output, "JSON output");
    app.add_flag("--deterministic", opts.deterministic, "forbid entropy-derived seeds");

    std::string template_id;
    std::vector<std::string> kv_args;
    auto* check = app.add_subcommand("check", "validate one query");
    check->add_option("template", template_id, "template id")->required();
    check->add_option("inputs", kv_args, "field=value inputs");

    std::string corpus_source = "builtin";
    auto* corpus = app.add_subcommand("corpus", "run an attack/benign corpus");
    corpus->add_option("source", corpus_source, "'builtin' or a JSON-lines file");

    std::string bind = "127.0.0.1:8080";
    bool test_mode = false;
    auto* serve = app.add_subcommand("serve", "run the demo HTTP service");
    serve->add_option("bind", bind, "host:port");
    serve->add_flag("--test-mode", test_mode, "enable /reset and /store-hash");

    auto* gen_pool = app.add_subcommand("gen-pool", "print the default marker pool as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (check->parsed()) return cmd_check(opts, template_id, kv_args);
        if (corpus->parsed()) return cmd_corpus(opts, corpus_source);
        if (serve->parsed()) return cmd_serve(opts, bind, test_mode);
        if (gen_pool->parsed()) {
            std::cout << pool_to_json(load_pool_spec(opts)) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
