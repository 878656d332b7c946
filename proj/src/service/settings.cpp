#include "tenk/service/settings.hpp"

#include <cstdlib>

#include "tenk/error.hpp"
#include "tenk/fs.hpp"

namespace tenk::service {

Settings Settings::from_env() {
    Settings s;
    s.fetch = edgar::FetchPolicy::from_env();
    if (const char* d = std::getenv("DATA_DIR"); d && *d) s.data_dir = d;
    if (const char* p = std::getenv("PORT"); p && *p) {
        try {
            s.port = std::stoi(p);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, std::string("PORT is not a number: ") + p);
        }
        if (s.port < 0 || s.port > 65535) throw Error(ErrorCode::InvalidArgument, std::string("PORT out of range: ") + p);
    }
    if (const char* d = std::getenv("TENK_STATIC_DIR"); d && *d) s.static_dir = d;
    return s;
}

std::shared_ptr<grader::CompletionProvider> make_provider(const ProviderSpec& spec) {
    std::shared_ptr<grader::CompletionProvider> base;
    std::size_t bound = spec.max_concurrency;
    if (spec.kind == "stub") {
        if (spec.stub_script) {
            auto script = fs::read_file(*spec.stub_script);
            if (!script) throw Error(ErrorCode::InvalidArgument, "cannot read stub script " + spec.stub_script->string());
            base = grader::DeterministicStub::from_json(*script);
        } else {
            base = std::make_shared<grader::DeterministicStub>(spec.stub_answer);
        }
    } else if (spec.kind == "replay") {
        if (!spec.replay_dir) throw Error(ErrorCode::InvalidArgument, "--provider replay needs --replay-dir");
        base = std::make_shared<grader::ReplayProvider>(*spec.replay_dir);
    } else if (spec.kind == "http") {
        auto cfg = grader::ChatProviderConfig::from_env();
        bound = cfg.max_concurrency;
        base = std::make_shared<grader::ChatCompletionsProvider>(cfg, std::make_shared<HttplibTransport>(120));
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown provider '" + spec.kind + "' (stub, replay, http)");
    }
    if (spec.record_file) base = std::make_shared<grader::RecordingProvider>(base, *spec.record_file);
    return std::make_shared<grader::BoundedProvider>(base, bound);
}

}  // namespace tenk::service
