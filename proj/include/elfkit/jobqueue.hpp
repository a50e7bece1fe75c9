#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace elfkit {

struct Task {
    std::uint64_t id = 0;
    std::string payload;
};

/// The three fields of a "searchWindow:dataComposition:modelName" task.
struct ModelTask {
    std::string search_window;
    std::string data_composition;
    std::string model_name;
};

/// Parses the colon-separated model-task payload; all three fields must be
/// non-empty.
ModelTask parse_model_task(const std::string& payload);

/// Durable at-least-once task dispatch backed by an append-only journal of
/// `E <id> <payload>` / `L <id> <worker>` / `A <id>` records, fsync'd
/// before each call returns. Replaying the journal reconstructs the queue;
/// leases do not survive recovery, so an unacked task is redelivered
/// (consumers must be idempotent). Each worker holds at most one
/// unacknowledged task at a time.
class JobQueue {
  public:
    explicit JobQueue(const std::string& journal_path);
    ~JobQueue();

    JobQueue(const JobQueue&) = delete;
    JobQueue& operator=(const JobQueue&) = delete;

    /// Durably appends a task; the id is visible only after the journal
    /// record hit disk.
    std::uint64_t enqueue(const std::string& payload);

    /// Hands the oldest queued task to the worker, or nothing when the
    /// queue is idle. A worker with an outstanding lease gets an error.
    std::optional<Task> lease(const std::string& worker);

    /// Acknowledges a task leased by this worker. Acked tasks are never
    /// redelivered.
    void ack(const std::string& worker, std::uint64_t task_id);

    /// Returns live leases older than the timeout to the queue. Recovery
    /// handles crashed processes; this handles stuck in-process workers.
    std::size_t requeue_expired(std::chrono::milliseconds lease_timeout);

    /// Registers the generation-drain callback: it fires exactly once each
    /// time the last outstanding task is acked, and may enqueue the next
    /// generation. If the journal already shows a fully acked workload
    /// (a crash can hit between the final ack and the callback), the
    /// callback fires immediately; it must therefore be idempotent.
    void final_task_hook(std::function<void()> callback);

    /// Marks the current generation complete; on an already-drained queue
    /// the hook fires right away.
    void seal();

    std::size_t queued_count() const;
    std::size_t leased_count() const;
    std::size_t acked_count() const;

  private:
    enum class State { Queued, Leased, Acked };
    struct Entry {
        std::string payload;
        State state = State::Queued;
        std::string worker;
        std::chrono::steady_clock::time_point leased_at{};
    };

    void replay();
    void append_record(const std::string& record);
    bool drained_locked() const;
    void fire_hook_if_drained(std::unique_lock<std::mutex>& lock);

    std::string path_;
    int fd_ = -1;
    mutable std::mutex mutex_;
    std::map<std::uint64_t, Entry> tasks_;
    std::deque<std::uint64_t> ready_;
    std::map<std::string, std::uint64_t> outstanding_;
    std::uint64_t next_id_ = 1;
    std::function<void()> hook_;
    bool hook_running_ = false;
};

}  // namespace elfkit
