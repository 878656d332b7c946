#include "tenk/grader/provider.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "tenk/error.hpp"
#include "tenk/fs.hpp"
#include "tenk/grader/criteria.hpp"
#include "tenk/grader/prompt.hpp"
#include "tenk/hash.hpp"

namespace tenk::grader {

using json = nlohmann::json;

namespace {

std::string short_digest(std::string_view s) { return sha256_hex(s).substr(0, 12); }

std::vector<std::string> string_list(const json& v, const char* what) {
    std::vector<std::string> out;
    if (v.is_string()) {
        out.push_back(v.get<std::string>());
    } else if (v.is_array()) {
        for (const auto& item : v) {
            if (item.is_string()) {
                out.push_back(item.get<std::string>());
            } else if (item.is_number()) {
                out.push_back(item.dump());
            } else {
                throw Error(ErrorCode::InvalidArgument, std::string("stub script: ") + what + " entries must be strings");
            }
        }
    } else if (v.is_number()) {
        out.push_back(v.dump());
    } else {
        throw Error(ErrorCode::InvalidArgument, std::string("stub script: bad ") + what);
    }
    return out;
}

bool prompt_matches(const DeterministicStub::Rule& rule, const std::string& prompt) {
    for (const auto& s : rule.contains) {
        if (prompt.find(s) == std::string::npos) return false;
    }
    for (const auto& s : rule.excludes) {
        if (prompt.find(s) != std::string::npos) return false;
    }
    return true;
}

}  // namespace

DeterministicStub::DeterministicStub(std::string constant)
    : defaults_{constant}, id_("stub:" + short_digest(constant)) {}

std::shared_ptr<DeterministicStub> DeterministicStub::sequence(std::vector<std::string> answers) {
    if (answers.empty()) throw Error(ErrorCode::InvalidArgument, "stub sequence must not be empty");
    auto stub = std::make_shared<DeterministicStub>();
    json j = answers;
    stub->id_ = "stub:" + short_digest(j.dump());
    stub->defaults_ = std::move(answers);
    return stub;
}

std::shared_ptr<DeterministicStub> DeterministicStub::from_function(std::function<std::string(const std::string&)> fn) {
    auto stub = std::make_shared<DeterministicStub>();
    stub->fn_ = std::move(fn);
    stub->id_ = "stub:fn";
    return stub;
}

std::shared_ptr<DeterministicStub> DeterministicStub::from_json(const std::string& script) {
    auto doc = json::parse(script, nullptr, false);
    if (!doc.is_object()) throw Error(ErrorCode::InvalidArgument, "stub script is not a JSON object");
    auto stub = std::make_shared<DeterministicStub>();
    stub->id_ = "stub:" + short_digest(doc.dump());
    if (doc.contains("default")) stub->defaults_ = string_list(doc["default"], "default");
    if (stub->defaults_.empty()) throw Error(ErrorCode::InvalidArgument, "stub script: empty default");
    if (doc.contains("context_window")) {
        if (!doc["context_window"].is_number_unsigned() || doc["context_window"].get<std::size_t>() == 0) {
            throw Error(ErrorCode::InvalidArgument, "stub script: context_window must be a positive integer");
        }
        stub->context_window_ = doc["context_window"].get<std::size_t>();
    }
    if (doc.contains("rules")) {
        if (!doc["rules"].is_array()) throw Error(ErrorCode::InvalidArgument, "stub script: rules must be an array");
        for (const auto& r : doc["rules"]) {
            if (!r.is_object()) throw Error(ErrorCode::InvalidArgument, "stub script: rule must be an object");
            Rule rule;
            if (r.contains("contains")) rule.contains = string_list(r["contains"], "contains");
            if (r.contains("excludes")) rule.excludes = string_list(r["excludes"], "excludes");
            if (r.contains("dimension")) {
                auto d = parse_dimension(r["dimension"].get<std::string>());
                if (!d) throw Error(ErrorCode::InvalidArgument, "stub script: unknown dimension " + r["dimension"].dump());
                rule.contains.emplace_back(criterion_marker(*d));
            }
            if (r.contains("mode")) {
                auto m = parse_mode(r["mode"].get<std::string>());
                if (!m) throw Error(ErrorCode::InvalidArgument, "stub script: unknown mode " + r["mode"].dump());
                const auto& phrase = PromptTemplate::standard().strict_phrase;
                (*m == GraderMode::Strict ? rule.contains : rule.excludes).push_back(phrase);
            }
            if (r.contains("answer")) rule.answers = string_list(r["answer"], "answer");
            if (r.contains("answers")) rule.answers = string_list(r["answers"], "answers");
            if (r.contains("track")) rule.track = r["track"].get<std::string>();
            rule.fail = r.value("fail", false);
            if (rule.answers.empty() && !rule.track && !rule.fail) {
                throw Error(ErrorCode::InvalidArgument, "stub script: rule needs answer(s), track or fail");
            }
            stub->add_rule(std::move(rule));
        }
    }
    return stub;
}

void DeterministicStub::add_rule(Rule rule) {
    std::lock_guard lock(mutex_);
    rules_.push_back(std::move(rule));
    rule_cursors_.push_back(0);
}

std::string DeterministicStub::next_answer(std::vector<std::string>& answers, std::size_t& cursor) {
    const auto& a = answers[std::min(cursor, answers.size() - 1)];
    if (cursor < answers.size()) ++cursor;
    return a;
}

std::string DeterministicStub::complete(const std::string& prompt, int, double) {
    ++calls_;
    if (fn_) return fn_(prompt);
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        auto& rule = rules_[i];
        if (!prompt_matches(rule, prompt)) continue;
        if (rule.fail) throw Error(ErrorCode::ProviderFailure, "stub rule " + std::to_string(i) + " fails by design");
        if (rule.track) {
            auto slot = excerpt_slot_containing(prompt, *rule.track);
            return slot ? std::string(1, *slot) : std::string("none");
        }
        return next_answer(rule.answers, rule_cursors_[i]);
    }
    return next_answer(defaults_, default_cursor_);
}

std::optional<char> excerpt_slot_containing(const std::string& prompt, const std::string& marker) {
    auto at = prompt.find(marker);
    if (at == std::string::npos) return std::nullopt;
    static const std::string header = "## Excerpt ";
    auto h = prompt.rfind(header, at);
    if (h == std::string::npos || h + header.size() >= prompt.size()) return std::nullopt;
    return prompt[h + header.size()];
}

ReplayProvider::ReplayProvider(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw Error(ErrorCode::InvalidArgument, "replay directory does not exist: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".ndjson") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::size_t lineno = 0;
        for (const auto& line : fs::read_lines(file)) {
            ++lineno;
            if (line.empty()) continue;
            auto rec = json::parse(line, nullptr, false);
            if (!rec.is_object() || !rec.contains("prompt_hash") || !rec.contains("completion")) {
                throw Error(ErrorCode::StorageCorrupt,
                            file.string() + ":" + std::to_string(lineno) + ": not a transcript record");
            }
            recorded_[rec["prompt_hash"].get<std::string>()] = rec["completion"].get<std::string>();
            if (rec.contains("context_window") && rec["context_window"].is_number_unsigned()) {
                context_window_ = rec["context_window"].get<std::size_t>();
            }
        }
    }
}

std::string ReplayProvider::complete(const std::string& prompt, int, double) {
    auto it = recorded_.find(prompt_hash(prompt));
    if (it == recorded_.end()) {
        throw Error(ErrorCode::ProviderFailure, "no recorded completion for prompt " + prompt_hash(prompt));
    }
    return it->second;
}

RecordingProvider::RecordingProvider(std::shared_ptr<CompletionProvider> inner, std::filesystem::path file)
    : inner_(std::move(inner)), file_(std::move(file)) {}

std::string RecordingProvider::complete(const std::string& prompt, int max_output_tokens, double temperature) {
    auto completion = inner_->complete(prompt, max_output_tokens, temperature);
    json rec = {
        {"prompt_hash", prompt_hash(prompt)},
        {"provider", inner_->id()},
        {"max_output_tokens", max_output_tokens},
        {"temperature", temperature},
        {"context_window", inner_->context_window_tokens()},
        {"completion", completion},
    };
    std::lock_guard lock(mutex_);
    fs::append_line(file_, rec.dump());
    return completion;
}

BoundedProvider::BoundedProvider(std::shared_ptr<CompletionProvider> inner, std::size_t max_in_flight)
    : inner_(std::move(inner)), limit_(std::max<std::size_t>(1, max_in_flight)) {}

std::string BoundedProvider::complete(const std::string& prompt, int max_output_tokens, double temperature) {
    {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return in_flight_ < limit_; });
        ++in_flight_;
        peak_ = std::max(peak_, in_flight_);
    }
    struct Release {
        BoundedProvider* self;
        ~Release() {
            {
                std::lock_guard lock(self->mutex_);
                --self->in_flight_;
            }
            self->cv_.notify_one();
        }
    } release{this};
    return inner_->complete(prompt, max_output_tokens, temperature);
}

ChatProviderConfig ChatProviderConfig::from_env() {
    auto env = [](const char* name) -> std::string {
        const char* v = std::getenv(name);
        return v ? v : "";
    };
    ChatProviderConfig c;
    c.api_key = env("LLM_API_KEY");
    c.base_url = env("LLM_BASE_URL");
    c.model = env("LLM_MODEL");
    if (auto n = env("LLM_MAX_CONCURRENCY"); !n.empty()) {
        try {
            c.max_concurrency = std::stoul(n);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "LLM_MAX_CONCURRENCY is not a number: " + n);
        }
        if (c.max_concurrency == 0) throw Error(ErrorCode::InvalidArgument, "LLM_MAX_CONCURRENCY must be positive");
    }
    return c;
}

ChatCompletionsProvider::ChatCompletionsProvider(ChatProviderConfig config, std::shared_ptr<HttpTransport> transport,
                                                 std::function<void(std::chrono::milliseconds)> sleep)
    : config_(std::move(config)), transport_(std::move(transport)), sleep_(std::move(sleep)) {
    if (config_.base_url.empty()) throw Error(ErrorCode::InvalidArgument, "LLM_BASE_URL is not set");
    if (config_.model.empty()) throw Error(ErrorCode::InvalidArgument, "LLM_MODEL is not set");
    while (!config_.base_url.empty() && config_.base_url.back() == '/') config_.base_url.pop_back();
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string ChatCompletionsProvider::complete(const std::string& prompt, int max_output_tokens, double temperature) {
    HttpRequest req;
    req.method = "POST";
    req.url = config_.base_url + "/chat/completions";
    req.headers["Content-Type"] = "application/json";
    if (!config_.api_key.empty()) req.headers["Authorization"] = "Bearer " + config_.api_key;
    req.body = json{{"model", config_.model},
                    {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                    {"temperature", temperature},
                    {"max_tokens", max_output_tokens}}
                   .dump();

    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, config_.max_attempts); ++attempt) {
        if (attempt > 0) sleep_(std::chrono::milliseconds(500) * (1 << (attempt - 1)));
        HttpResponse resp;
        try {
            resp = transport_->send(req);
        } catch (const Error& e) {
            last_error = e.what();
            continue;
        }
        if (resp.status == 429 || resp.status >= 500) {
            last_error = "status " + std::to_string(resp.status);
            continue;
        }
        if (resp.status != 200) {
            throw Error(ErrorCode::ProviderFailure,
                        "completion endpoint returned " + std::to_string(resp.status) + ": " + resp.body.substr(0, 200));
        }
        auto doc = json::parse(resp.body, nullptr, false);
        try {
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception&) {
            throw Error(ErrorCode::ProviderFailure, "completion response lacks choices[0].message.content");
        }
    }
    throw Error(ErrorCode::ProviderFailure, "completion endpoint unavailable: " + last_error);
}

}  // namespace tenk::grader
