#include "tenk/service/jobs.hpp"

#include <algorithm>
#include <random>

#include <spdlog/spdlog.h>

#include "tenk/hash.hpp"

namespace tenk::service {

using json = nlohmann::json;

namespace {

bool terminal(Stage s) { return s == Stage::Done || s == Stage::Failed; }

}  // namespace

json JobSnapshot::to_json() const {
    json j = {{"id", id},
              {"ticker", ticker},
              {"fingerprint", fingerprint},
              {"status", service::to_string(status)},
              {"progress", progress},
              {"detail", detail}};
    if (result) j["result"] = *result;
    if (status == Stage::Failed) {
        j["error"] = {{"message", error},
                      {"stage", error_stage ? json(service::to_string(*error_stage)) : json(nullptr)},
                      {"code", error_code ? json(tenk::to_string(*error_code)) : json(nullptr)}};
    }
    return j;
}

JobManager::JobManager(Runner runner, std::size_t workers) : runner_(std::move(runner)) {
    for (std::size_t i = 0; i < std::max<std::size_t>(1, workers); ++i) workers_.emplace_back([this] { worker_loop(); });
}

JobManager::~JobManager() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : workers_) t.join();
}

JobManager::Submitted JobManager::submit(AnalysisRequest request, const std::string& fingerprint) {
    std::lock_guard lock(mutex_);
    for (const auto& [id, job] : jobs_) {
        if (job.snap.fingerprint == fingerprint && !terminal(job.snap.status)) return {id, true};
    }
    std::random_device rd;
    auto id = "job-" + sha256_hex(fingerprint + std::to_string(++counter_) + std::to_string(rd())).substr(0, 16);
    Job job;
    job.snap.id = id;
    job.snap.fingerprint = fingerprint;
    job.snap.ticker = request.ticker;
    job.snap.detail = "queued";
    job.request = std::move(request);
    job.history.push_back(Stage::Queued);
    jobs_.emplace(id, std::move(job));
    queue_.push_back(id);
    cv_.notify_one();
    return {id, false};
}

std::optional<JobSnapshot> JobManager::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second.snap;
}

std::vector<Stage> JobManager::history(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(id);
    return it == jobs_.end() ? std::vector<Stage>{} : it->second.history;
}

void JobManager::wait_idle() {
    std::unique_lock lock(mutex_);
    idle_cv_.wait(lock, [&] { return queue_.empty() && active_ == 0; });
}

void JobManager::advance(Job& job, Stage stage, double progress, const std::string& detail) {
    auto& s = job.snap;
    if (terminal(s.status)) return;
    if (stage != Stage::Failed && static_cast<int>(stage) < static_cast<int>(s.status)) return;
    if (stage != s.status) job.history.push_back(stage);
    s.status = stage;
    if (stage != Stage::Failed) s.progress = std::max(s.progress, progress);
    s.detail = detail;
}

void JobManager::worker_loop() {
    for (;;) {
        std::string id;
        AnalysisRequest request;
        {
            std::unique_lock lock(mutex_);
            cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            if (stopping_ && queue_.empty()) return;
            id = queue_.front();
            queue_.pop_front();
            ++active_;
            request = jobs_.at(id).request;
        }
        ProgressFn progress = [&](Stage stage, double fraction, const std::string& detail) {
            std::lock_guard lock(mutex_);
            advance(jobs_.at(id), stage, overall_progress(stage, fraction), detail);
        };
        std::optional<PipelineResult> result;
        std::string error;
        std::optional<Stage> error_stage;
        std::optional<ErrorCode> error_code;
        try {
            result = runner_(request, id, progress);
        } catch (const StageError& e) {
            error = e.what();
            error_stage = e.stage();
            error_code = e.code();
        } catch (const Error& e) {
            error = e.what();
            error_code = e.code();
        } catch (const std::exception& e) {
            error = e.what();
        }
        {
            std::lock_guard lock(mutex_);
            auto& job = jobs_.at(id);
            if (result) {
                json summary = {{"ticker", result->ticker},
                                {"years", result->years},
                                {"grades", result->grades.size()},
                                {"provider_grades", result->provider_grades},
                                {"reused_grades", result->reused_grades},
                                {"comparisons", result->comparisons.size()},
                                {"warnings", result->warnings},
                                {"ratings_url", "/api/companies/" + result->ticker + "/ratings"}};
                advance(job, Stage::Done, 1.0, "done");
                job.snap.result = std::move(summary);
            } else {
                if (!error_stage && !terminal(job.snap.status)) error_stage = job.snap.status;
                spdlog::warn("job {} failed: {}", id, error);
                advance(job, Stage::Failed, 0.0, "failed");
                job.snap.error = error;
                job.snap.error_stage = error_stage;
                job.snap.error_code = error_code;
            }
            --active_;
        }
        idle_cv_.notify_all();
    }
}

}  // namespace tenk::service
