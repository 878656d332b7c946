#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tenk/service/pipeline.hpp"

namespace tenk::service {

struct JobSnapshot {
    std::string id;
    std::string fingerprint;
    std::string ticker;
    Stage status = Stage::Queued;
    double progress = 0.0;
    std::string detail;
    /// Set on Done.
    std::optional<nlohmann::json> result;
    /// Set on Failed.
    std::string error;
    std::optional<Stage> error_stage;
    std::optional<ErrorCode> error_code;

    nlohmann::json to_json() const;
};

/// In-process queue with a fixed worker pool. Status only moves forward
/// along Queued..Done (Failed from anywhere) and progress never drops; at
/// most one live job exists per fingerprint.
class JobManager {
public:
    using Runner = std::function<PipelineResult(const AnalysisRequest&, const std::string& job_id, const ProgressFn&)>;

    explicit JobManager(Runner runner, std::size_t workers = 2);
    ~JobManager();
    JobManager(const JobManager&) = delete;
    JobManager& operator=(const JobManager&) = delete;

    struct Submitted {
        std::string id;
        /// An identical request is still queued or running; `id` is that job.
        bool conflict = false;
    };
    Submitted submit(AnalysisRequest request, const std::string& fingerprint);

    std::optional<JobSnapshot> get(const std::string& id) const;
    /// Every status a job has passed through, in order.
    std::vector<Stage> history(const std::string& id) const;
    /// Blocks until no job is queued or running.
    void wait_idle();

private:
    struct Job {
        JobSnapshot snap;
        AnalysisRequest request;
        std::vector<Stage> history;
    };
    void worker_loop();
    void advance(Job& job, Stage stage, double progress, const std::string& detail);

    Runner runner_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::condition_variable idle_cv_;
    std::map<std::string, Job> jobs_;
    std::deque<std::string> queue_;
    std::size_t active_ = 0;
    std::size_t counter_ = 0;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

}  // namespace tenk::service
