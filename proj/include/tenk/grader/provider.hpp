#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tenk/http_transport.hpp"

namespace tenk::grader {

inline constexpr std::size_t kDefaultContextWindow = 128000;

/// Anything that turns a prompt into completion text. Implementations throw
/// tenk::Error(ProviderFailure) when no completion could be obtained and
/// must be safe to call from several threads at once.
class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual std::string complete(const std::string& prompt, int max_output_tokens, double temperature) = 0;
    virtual std::size_t context_window_tokens() const { return kDefaultContextWindow; }
    /// Stable identity; part of the grade fingerprint.
    virtual std::string id() const = 0;
};

/// Scripted answers for tests and offline runs.
///
/// Rules are checked in order; the first whose `contains` substrings all
/// occur in the prompt (and whose `excludes` substrings all do not) answers.
/// A rule with several answers hands them out in turn and then repeats the
/// last one. `track` answers with the letter of the "## Excerpt X" block
/// that holds the marker text, or "none" if no block does. With no matching
/// rule the default sequence is used the same way.
class DeterministicStub : public CompletionProvider {
public:
    struct Rule {
        std::vector<std::string> contains;
        std::vector<std::string> excludes;
        std::vector<std::string> answers;
        std::optional<std::string> track;
        bool fail = false;
    };

    explicit DeterministicStub(std::string constant = "1");
    static std::shared_ptr<DeterministicStub> sequence(std::vector<std::string> answers);
    static std::shared_ptr<DeterministicStub> from_function(std::function<std::string(const std::string&)> fn);

    /// JSON script:
    ///   {"default": "1" | ["2","1"], "context_window": 128000,
    ///    "rules": [{"dimension": "confidence", "mode": "strict",
    ///               "contains": [...], "excludes": [...],
    ///               "answer": "1.5" | "answers": [...], "track": "...",
    ///               "fail": false}]}
    /// `dimension`/`mode` expand to the matching rubric / strict-phrase
    /// substrings of the standard template.
    static std::shared_ptr<DeterministicStub> from_json(const std::string& script);

    void add_rule(Rule rule);
    void set_context_window(std::size_t tokens) { context_window_ = tokens; }

    std::string complete(const std::string& prompt, int max_output_tokens, double temperature) override;
    std::size_t context_window_tokens() const override { return context_window_; }
    std::string id() const override { return id_; }

    std::size_t calls() const noexcept { return calls_.load(); }
    void reset_calls() noexcept { calls_ = 0; }

private:
    std::string next_answer(std::vector<std::string>& answers, std::size_t& cursor);

    std::mutex mutex_;
    std::vector<Rule> rules_;
    std::vector<std::size_t> rule_cursors_;
    std::vector<std::string> defaults_;
    std::size_t default_cursor_ = 0;
    std::function<std::string(const std::string&)> fn_;
    std::size_t context_window_ = kDefaultContextWindow;
    std::atomic<std::size_t> calls_{0};
    std::string id_ = "stub";
};

/// Letter of the excerpt block containing `marker`, if any.
std::optional<char> excerpt_slot_containing(const std::string& prompt, const std::string& marker);

/// Serves completions recorded by RecordingProvider, keyed by prompt hash.
/// Reads every *.ndjson file in the directory; a prompt with no recording
/// is a ProviderFailure.
class ReplayProvider : public CompletionProvider {
public:
    explicit ReplayProvider(const std::filesystem::path& dir);
    std::string complete(const std::string& prompt, int max_output_tokens, double temperature) override;
    std::size_t context_window_tokens() const override { return context_window_; }
    std::string id() const override { return id_; }
    std::size_t size() const noexcept { return recorded_.size(); }

private:
    std::map<std::string, std::string> recorded_;
    std::size_t context_window_ = kDefaultContextWindow;
    std::string id_ = "replay";
};

/// Pass-through that appends {prompt_hash, completion, ...} lines to a file.
class RecordingProvider : public CompletionProvider {
public:
    RecordingProvider(std::shared_ptr<CompletionProvider> inner, std::filesystem::path file);
    std::string complete(const std::string& prompt, int max_output_tokens, double temperature) override;
    std::size_t context_window_tokens() const override { return inner_->context_window_tokens(); }
    std::string id() const override { return inner_->id(); }

private:
    std::shared_ptr<CompletionProvider> inner_;
    std::filesystem::path file_;
    std::mutex mutex_;
};

/// Caps in-flight completions across every caller sharing this object.
class BoundedProvider : public CompletionProvider {
public:
    BoundedProvider(std::shared_ptr<CompletionProvider> inner, std::size_t max_in_flight = 4);
    std::string complete(const std::string& prompt, int max_output_tokens, double temperature) override;
    std::size_t context_window_tokens() const override { return inner_->context_window_tokens(); }
    std::string id() const override { return inner_->id(); }
    std::size_t peak_in_flight() const noexcept { return peak_; }

private:
    std::shared_ptr<CompletionProvider> inner_;
    std::size_t limit_;
    std::size_t in_flight_ = 0;
    std::size_t peak_ = 0;
    std::mutex mutex_;
    std::condition_variable cv_;
};

struct ChatProviderConfig {
    std::string api_key;
    std::string base_url;  // e.g. https://api.example.com/v1
    std::string model;
    std::size_t max_concurrency = 4;
    std::size_t context_window = kDefaultContextWindow;
    int max_attempts = 3;

    /// LLM_API_KEY, LLM_BASE_URL, LLM_MODEL, LLM_MAX_CONCURRENCY.
    static ChatProviderConfig from_env();
};

/// Chat-completions style endpoint: POST {base_url}/chat/completions with
/// {model, messages, temperature, max_tokens}; reads choices[0].message.content.
class ChatCompletionsProvider : public CompletionProvider {
public:
    ChatCompletionsProvider(ChatProviderConfig config, std::shared_ptr<HttpTransport> transport,
                            std::function<void(std::chrono::milliseconds)> sleep = {});
    std::string complete(const std::string& prompt, int max_output_tokens, double temperature) override;
    std::size_t context_window_tokens() const override { return config_.context_window; }
    std::string id() const override { return "http:" + config_.model; }

private:
    ChatProviderConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::function<void(std::chrono::milliseconds)> sleep_;
};

}  // namespace tenk::grader
