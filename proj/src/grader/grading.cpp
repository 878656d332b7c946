#include "tenk/grader/grading.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <future>
#include <numeric>

#include <json.hpp>

#include "tenk/fs.hpp"
#include "tenk/hash.hpp"
#include "tenk/text.hpp"

namespace tenk::grader {

using parser::ElementType;
using parser::SectionedFiling;

namespace {

constexpr std::string_view kJoin = "\n\n";

struct Piece {
    std::size_t ordinal;
    std::string text;
};

// Sentence-boundary split of an oversized element; a sentence that alone
// exceeds the limit falls back to truncate_to_tokens' whitespace cut.
std::vector<std::string> split_oversized(const std::string& text, std::size_t limit) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) out.push_back(std::move(current));
        current.clear();
    };
    for (auto sentence : text::split_sentences(text)) {
        while (text::estimate_tokens(sentence) > limit) {
            flush();
            auto head = text::truncate_to_tokens(sentence, limit);
            if (head.empty()) head = sentence.substr(0, limit * 4);
            auto rest = sentence.substr(head.size());
            out.push_back(head);
            auto first = rest.find_first_not_of(' ');
            sentence = first == std::string::npos ? std::string() : rest.substr(first);
        }
        if (sentence.empty()) continue;
        std::string candidate = current.empty() ? sentence : current + " " + sentence;
        if (text::estimate_tokens(candidate) > limit) {
            flush();
            current = sentence;
        } else {
            current = std::move(candidate);
        }
    }
    flush();
    return out;
}

}  // namespace

std::size_t chunk_token_limit(std::size_t token_budget) {
    return token_budget - std::min(kPromptReserveTokens, token_budget / 2);
}

std::vector<NarrativeChunk> chunk_narrative(const SectionedFiling& filing, const SectionSet& excluded,
                                            std::size_t token_budget) {
    if (token_budget < 1024) {
        throw Error(ErrorCode::InvalidArgument, "token budget must be at least 1024, got " + std::to_string(token_budget));
    }
    const auto limit = chunk_token_limit(token_budget);

    std::vector<Piece> pieces;
    for (const auto& el : filing.elements) {
        if (el.element_type != ElementType::NarrativeText || excluded.count(el.section)) continue;
        if (text::estimate_tokens(el.text) <= limit) {
            pieces.push_back({el.ordinal, el.text});
        } else {
            for (auto& part : split_oversized(el.text, limit)) pieces.push_back({el.ordinal, std::move(part)});
        }
    }
    if (pieces.empty()) {
        throw Error(ErrorCode::NoNarrativeText,
                    "no narrative text left to grade for " + filing.company + " " + std::to_string(filing.fiscal_year));
    }

    // Track codepoints so the joined estimate is exact without re-scanning.
    std::vector<NarrativeChunk> chunks;
    NarrativeChunk current;
    std::size_t current_cp = 0;
    auto estimate = [](std::size_t cp) { return (cp + 3) / 4; };
    for (auto& piece : pieces) {
        auto piece_cp = text::codepoint_count(piece.text);
        if (!current.text.empty() && estimate(current_cp + kJoin.size() + piece_cp) > limit) {
            current.estimated_tokens = estimate(current_cp);
            chunks.push_back(std::move(current));
            current = {};
            current_cp = 0;
        }
        if (!current.text.empty()) {
            current.text += kJoin;
            current_cp += kJoin.size();
        }
        current.text += piece.text;
        current_cp += piece_cp;
        current.ordinals.push_back(piece.ordinal);
    }
    current.estimated_tokens = estimate(current_cp);
    chunks.push_back(std::move(current));
    return chunks;
}

double parse_score(std::string_view completion) {
    std::size_t i = 0;
    while (i < completion.size() && !std::isdigit(static_cast<unsigned char>(completion[i]))) ++i;
    if (i == completion.size()) {
        throw Error(ErrorCode::UnparseableScore, "no number in completion: " + std::string(completion.substr(0, 80)));
    }
    std::size_t end = i;
    while (end < completion.size() && std::isdigit(static_cast<unsigned char>(completion[end]))) ++end;
    if (end + 1 < completion.size() && completion[end] == '.' &&
        std::isdigit(static_cast<unsigned char>(completion[end + 1]))) {
        ++end;
        while (end < completion.size() && std::isdigit(static_cast<unsigned char>(completion[end]))) ++end;
    }
    std::string literal(completion.substr(i, end - i));
    double value = std::strtod(literal.c_str(), nullptr);
    if (!(value >= 0.0)) value = 0.0;  // NaN cannot arise from digits, but stay total
    return std::clamp(value, 0.0, 2.0);
}

GradeResult grade_dimension(const SectionedFiling& filing, const Criterion& criterion, GraderMode mode,
                            CompletionProvider& provider, const SectionSet& excluded, const GradeOptions& options) {
    const auto& tmpl = options.prompt_template ? *options.prompt_template : PromptTemplate::standard();
    auto budget = options.token_budget ? options.token_budget : provider.context_window_tokens();
    auto chunks = chunk_narrative(filing, excluded, budget);

    GradeResult result;
    result.company = filing.company;
    result.fiscal_year = filing.fiscal_year;
    result.dimension = criterion.dimension;
    result.mode = mode;

    std::vector<std::string> hashes, completions;
    std::string last_error;
    for (std::size_t c = 0; c < chunks.size(); ++c) {
        auto prompt = build_absolute_prompt(chunks[c].text, criterion, filing.fiscal_year, mode, tmpl);
        std::optional<double> score;
        std::string hash, completion;
        for (int attempt = 0; attempt <= options.retries && !score; ++attempt) {
            auto effective = attempt == 0 ? prompt : prompt + "\n\n" + std::string(kScoreReminder);
            hash = prompt_hash(effective);
            GradeTranscriptRecord rec{filing.company, filing.fiscal_year, criterion.dimension, mode, c, attempt, hash,
                                      "", std::nullopt, ""};
            try {
                completion = provider.complete(effective, kScoreMaxTokens, 0.0);
                rec.raw_completion = completion;
                score = parse_score(completion);
                rec.score = score;
            } catch (const Error& e) {
                last_error = e.what();
                rec.error = e.what();
            }
            if (options.transcript) options.transcript(rec);
        }
        if (!score) {
            result.failed_chunks.push_back(c);
            continue;
        }
        result.chunk_scores.push_back(*score);
        hashes.push_back(hash);
        completions.push_back(completion);
    }
    if (result.chunk_scores.empty()) {
        throw Error(ErrorCode::AllChunksFailed, std::to_string(chunks.size()) + " chunk(s) failed for " +
                                                    std::string(to_string(criterion.dimension)) + "/" +
                                                    std::string(to_string(mode)) + "; last error: " + last_error);
    }
    result.score = std::accumulate(result.chunk_scores.begin(), result.chunk_scores.end(), 0.0) /
                   static_cast<double>(result.chunk_scores.size());
    result.prompt_hash = hashes.size() == 1 ? hashes.front() : sha256_hex(text::join(hashes, "\n"));
    result.raw_completion = text::join(completions, "\n");
    return result;
}

FilingGrades grade_filing(const SectionedFiling& filing, CompletionProvider& provider, const SectionSet& excluded,
                          const GradeOptions& options) {
    // Surface an empty selection once rather than as eight identical failures.
    chunk_narrative(filing, excluded, options.token_budget ? options.token_budget : provider.context_window_tokens());

    struct Pair {
        Dimension d;
        GraderMode m;
    };
    std::vector<Pair> pairs;
    for (auto d : kDimensions) {
        for (auto m : kModes) {
            bool wanted = options.pairs.empty() ||
                          std::find(options.pairs.begin(), options.pairs.end(), std::pair{d, m}) != options.pairs.end();
            if (wanted) pairs.push_back({d, m});
        }
    }
    if (pairs.empty()) return {};

    std::vector<std::optional<GradeResult>> results(pairs.size());
    std::vector<std::optional<GradeFailure>> failures(pairs.size());
    std::atomic<std::size_t> next{0}, done{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < pairs.size();) {
            auto [d, m] = pairs[i];
            try {
                results[i] = grade_dimension(filing, criterion_for(d), m, provider, excluded, options);
            } catch (const Error& e) {
                failures[i] = GradeFailure{d, m, e.code(), e.what()};
            } catch (const std::exception& e) {
                failures[i] = GradeFailure{d, m, ErrorCode::ProviderFailure, e.what()};
            }
            auto finished = ++done;
            if (options.on_progress) {
                std::lock_guard lock(progress_mutex);
                options.on_progress(finished, pairs.size());
            }
        }
    };
    auto threads = std::clamp<std::size_t>(options.parallelism, 1, pairs.size());
    std::vector<std::future<void>> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& f : pool) f.get();

    FilingGrades out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (results[i]) out.results.push_back(std::move(*results[i]));
        if (failures[i]) out.failures.push_back(std::move(*failures[i]));
    }
    return out;
}

TranscriptWriter::TranscriptWriter(std::filesystem::path file) : file_(std::move(file)) {}

void TranscriptWriter::write(const GradeTranscriptRecord& r) {
    nlohmann::json j = {
        {"company", r.company},
        {"year", r.fiscal_year},
        {"dimension", to_string(r.dimension)},
        {"mode", to_string(r.mode)},
        {"chunk_index", r.chunk_index},
        {"attempt", r.attempt},
        {"prompt_hash", r.prompt_hash},
        {"raw_completion", r.raw_completion},
        {"score", r.score ? nlohmann::json(*r.score) : nlohmann::json(nullptr)},
    };
    if (!r.error.empty()) j["error"] = r.error;
    std::lock_guard lock(mutex_);
    fs::append_line(file_, j.dump());
}

GradeTranscriptSink TranscriptWriter::sink() {
    return [this](const GradeTranscriptRecord& r) { write(r); };
}

}  // namespace tenk::grader
