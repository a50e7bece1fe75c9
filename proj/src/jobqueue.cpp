#include "elfkit/jobqueue.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace elfkit {

ModelTask parse_model_task(const std::string& payload) {
    const auto first = payload.find(':');
    const auto second = first == std::string::npos ? std::string::npos
                                                   : payload.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos ||
        payload.find(':', second + 1) != std::string::npos) {
        throw std::invalid_argument("model task: expected exactly 3 colon-separated fields");
    }
    ModelTask t;
    t.search_window = payload.substr(0, first);
    t.data_composition = payload.substr(first + 1, second - first - 1);
    t.model_name = payload.substr(second + 1);
    if (t.search_window.empty() || t.data_composition.empty() || t.model_name.empty()) {
        throw std::invalid_argument("model task: fields must be non-empty");
    }
    return t;
}

JobQueue::JobQueue(const std::string& journal_path) : path_(journal_path) {
    replay();
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd_ < 0) {
        throw std::runtime_error("jobqueue: cannot open journal " + path_ + ": " +
                                 std::strerror(errno));
    }
}

JobQueue::~JobQueue() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void JobQueue::replay() {
    std::ifstream in(path_);
    if (!in) {
        return;  // fresh journal
    }
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    while (pos < content.size()) {
        const std::size_t nl = content.find('\n', pos);
        if (nl == std::string::npos) {
            break;  // torn final record from a crash mid-write; drop it
        }
        const std::string line = content.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        char tag = 0;
        std::uint64_t id = 0;
        if (!(row >> tag >> id)) {
            throw std::runtime_error("jobqueue: corrupt journal record: " + line);
        }
        switch (tag) {
            case 'E': {
                std::string payload;
                std::getline(row, payload);
                if (!payload.empty() && payload.front() == ' ') {
                    payload.erase(payload.begin());
                }
                Entry entry;
                entry.payload = payload;
                tasks_[id] = std::move(entry);
                next_id_ = std::max(next_id_, id + 1);
                break;
            }
            case 'L':
                // A lease never survives recovery; the task stays queued.
                if (tasks_.count(id) == 0) {
                    throw std::runtime_error("jobqueue: lease of unknown task in journal");
                }
                break;
            case 'A': {
                const auto it = tasks_.find(id);
                if (it == tasks_.end()) {
                    throw std::runtime_error("jobqueue: ack of unknown task in journal");
                }
                it->second.state = State::Acked;
                break;
            }
            default:
                throw std::runtime_error("jobqueue: unknown journal tag: " + line);
        }
    }
    for (const auto& [id, entry] : tasks_) {
        if (entry.state == State::Queued) {
            ready_.push_back(id);
        }
    }
}

void JobQueue::append_record(const std::string& record) {
    const std::string line = record + '\n';
    std::size_t written = 0;
    while (written < line.size()) {
        const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw std::runtime_error("jobqueue: journal write failed: " +
                                     std::string(std::strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) {
        throw std::runtime_error("jobqueue: journal fsync failed: " +
                                 std::string(std::strerror(errno)));
    }
}

std::uint64_t JobQueue::enqueue(const std::string& payload) {
    if (payload.empty()) {
        throw std::invalid_argument("jobqueue: payload must be non-empty");
    }
    if (payload.find('\n') != std::string::npos || payload.find('\r') != std::string::npos) {
        throw std::invalid_argument("jobqueue: payload must not contain line breaks");
    }
    std::lock_guard<std::mutex> lock(mutex_);
    const std::uint64_t id = next_id_++;
    append_record("E " + std::to_string(id) + " " + payload);
    Entry entry;
    entry.payload = payload;
    tasks_[id] = std::move(entry);
    ready_.push_back(id);
    return id;
}

std::optional<Task> JobQueue::lease(const std::string& worker) {
    if (worker.empty() || worker.find_first_of(" \t\r\n") != std::string::npos) {
        throw std::invalid_argument("jobqueue: worker id must be non-empty without whitespace");
    }
    std::lock_guard<std::mutex> lock(mutex_);
    if (outstanding_.count(worker) > 0) {
        throw std::logic_error("jobqueue: worker '" + worker +
                               "' already holds an unacknowledged task");
    }
    if (ready_.empty()) {
        return std::nullopt;
    }
    const std::uint64_t id = ready_.front();
    append_record("L " + std::to_string(id) + " " + worker);
    ready_.pop_front();
    Entry& entry = tasks_.at(id);
    entry.state = State::Leased;
    entry.worker = worker;
    entry.leased_at = std::chrono::steady_clock::now();
    outstanding_[worker] = id;
    return Task{id, entry.payload};
}

void JobQueue::ack(const std::string& worker, std::uint64_t task_id) {
    std::unique_lock<std::mutex> lock(mutex_);
    const auto it = tasks_.find(task_id);
    if (it == tasks_.end()) {
        throw std::invalid_argument("jobqueue: ack of unknown task " + std::to_string(task_id));
    }
    if (it->second.state != State::Leased || it->second.worker != worker) {
        throw std::logic_error("jobqueue: task " + std::to_string(task_id) +
                               " is not leased by worker '" + worker + "'");
    }
    append_record("A " + std::to_string(task_id));
    it->second.state = State::Acked;
    it->second.worker.clear();
    outstanding_.erase(worker);
    fire_hook_if_drained(lock);
}

std::size_t JobQueue::requeue_expired(std::chrono::milliseconds lease_timeout) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    std::vector<std::uint64_t> expired;
    for (const auto& [worker, id] : outstanding_) {
        if (now - tasks_.at(id).leased_at >= lease_timeout) {
            expired.push_back(id);
        }
    }
    for (std::uint64_t id : expired) {
        Entry& entry = tasks_.at(id);
        outstanding_.erase(entry.worker);
        entry.state = State::Queued;
        entry.worker.clear();
        ready_.push_back(id);
    }
    std::sort(ready_.begin(), ready_.end());
    return expired.size();
}

bool JobQueue::drained_locked() const { return ready_.empty() && outstanding_.empty(); }

void JobQueue::fire_hook_if_drained(std::unique_lock<std::mutex>& lock) {
    if (!hook_ || hook_running_ || !drained_locked()) {
        return;
    }
    hook_running_ = true;
    lock.unlock();
    try {
        hook_();
    } catch (const std::exception& e) {
        std::cerr << "jobqueue: final-task hook failed: " << e.what() << '\n';
    } catch (...) {
        std::cerr << "jobqueue: final-task hook failed\n";
    }
    lock.lock();
    hook_running_ = false;
}

void JobQueue::final_task_hook(std::function<void()> callback) {
    std::unique_lock<std::mutex> lock(mutex_);
    hook_ = std::move(callback);
    // Recovery case: the journal shows a fully acked workload, so a crash
    // may have interrupted the previous hook run. Re-fire (idempotent).
    if (!tasks_.empty() && drained_locked()) {
        fire_hook_if_drained(lock);
    }
}

void JobQueue::seal() {
    std::unique_lock<std::mutex> lock(mutex_);
    fire_hook_if_drained(lock);
}

std::size_t JobQueue::queued_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return ready_.size();
}

std::size_t JobQueue::leased_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return outstanding_.size();
}

std::size_t JobQueue::acked_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::size_t n = 0;
    for (const auto& [id, entry] : tasks_) {
        if (entry.state == State::Acked) {
            ++n;
        }
    }
    return n;
}

}  // namespace elfkit
